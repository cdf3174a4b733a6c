//! The `extract` and `surrogate` commands.

use std::path::Path;
use std::time::Instant;

use ocsvm_rules::dataset::{load_csv, Dataset, FeatureEncoder};
use ocsvm_rules::ocsvm::{Label, OcsvmModel};
use ocsvm_rules::rules::{extract_rules, Extraction};
use ocsvm_rules::surrogate::{fit_tree, tree_to_rules, TreeRule};

use crate::artifacts::{self, ModelFile, RuleCounts, RulesFile, Timings, TreeFile, FORMAT_VERSION};
use crate::config::{RunConfig, Targets};
use crate::error::{CliError, Result};

/// Loads the dataset and replaces periodic columns by sine/cosine pairs.
pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let path = cfg.dataset_path();
    let mut d = load_csv(&path, &cfg.load_schema()).map_err(|e| match e {
        ocsvm_rules::Error::Io(source) => CliError::io(&path, source),
        other => other.into(),
    })?;
    for f in &cfg.schema.cyclical {
        d = d.expand_cyclical(f)?;
    }
    Ok(d)
}

pub struct Fitted {
    pub data: Dataset,
    pub file: ModelFile,
    pub fit_seconds: f64,
}

pub fn fit_model(cfg: &RunConfig) -> Result<Fitted> {
    let data = load_dataset(cfg)?;
    let numerical = data.numerical_names();
    let grouping = cfg.schema.categorical.clone();
    let in_model: &[String] = if cfg.ocsvm.categorical_in_model { &grouping } else { &[] };
    if numerical.is_empty() && in_model.is_empty() {
        return Err(CliError::Config(
            "the model needs at least one numerical column or categorical_in_model = true".into(),
        ));
    }
    let start = Instant::now();
    let encoder = FeatureEncoder::fit(&data, &numerical, in_model)?;
    let x = encoder.encode(&data)?;
    let model = OcsvmModel::fit(&x, cfg.ocsvm.nu, cfg.kernel()?, cfg.solver())?;
    Ok(Fitted {
        data,
        file: ModelFile {
            format_version: FORMAT_VERSION,
            schema: cfg.schema.clone(),
            grouping,
            encoder,
            model,
        },
        fit_seconds: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone)]
pub struct ExtractOutcome {
    pub rules: Vec<RulesFile>,
    pub timings: Timings,
}

impl ExtractOutcome {
    pub fn get(&self, label: Label) -> Option<&RulesFile> {
        self.rules.iter().find(|r| r.rule_set.label == label)
    }
}

fn rules_file(cfg: &RunConfig, ex: &Extraction, scaled: bool) -> RulesFile {
    RulesFile {
        format_version: FORMAT_VERSION,
        summary: ex.summary,
        cyclical: cfg.schema.cyclical.clone(),
        rule_set: if scaled { ex.scaled.clone() } else { ex.rules.clone() },
    }
}

/// Fits the model and writes `model.json` plus scaled and unscaled rule sets
/// (JSON and text) for every requested target.
pub fn run_extract(cfg: &RunConfig, targets: Targets, out: &Path) -> Result<ExtractOutcome> {
    let fitted = fit_model(cfg)?;
    artifacts::write_json(out, artifacts::MODEL_FILE, &fitted.file)?;

    let start = Instant::now();
    let ecfg = cfg.extraction_config();
    let mut rules = Vec::new();
    for label in targets.labels() {
        let ex = extract_rules(
            &fitted.data,
            &fitted.file.model,
            &fitted.file.encoder,
            &fitted.file.grouping,
            label,
            &ecfg,
        )?;
        for scaled in [false, true] {
            let file = rules_file(cfg, &ex, scaled);
            artifacts::write_json(out, &artifacts::rules_file(label, scaled, "json"), &file)?;
            artifacts::write_text(out, &artifacts::rules_file(label, scaled, "txt"), &file.to_text()?)?;
            if !scaled {
                rules.push(file);
            }
        }
    }
    Ok(ExtractOutcome {
        rules,
        timings: Timings {
            fit_seconds: fitted.fit_seconds,
            extract_seconds: start.elapsed().as_secs_f64(),
            surrogate_seconds: None,
        },
    })
}

#[derive(Debug, Clone)]
pub struct SurrogateOutcome {
    pub file: TreeFile,
    pub rules_na: Vec<String>,
    pub rules_a: Vec<String>,
    pub seconds: f64,
}

/// Fits an unpruned tree on the model's own predictions. Features are the
/// numerical columns in original units followed by one-hot indicators for
/// every categorical column.
pub fn run_surrogate(cfg: &RunConfig, out: &Path) -> Result<SurrogateOutcome> {
    let fitted = fit_model(cfg)?;
    let model_x = fitted.file.encoder.encode(&fitted.data)?;
    let labels = fitted.file.model.predict_all(&model_x)?;

    let start = Instant::now();
    let encoder = FeatureEncoder::fit(&fitted.data, &fitted.file.encoder.numerical, &fitted.file.grouping)?;
    let x = encoder.encode_unscaled(&fitted.data)?;
    let tree = fit_tree(&x, &labels, cfg.surrogate.seed)?;
    let (na, a) = tree_to_rules(&tree);
    let features = encoder.features();
    let render = |rules: &[TreeRule]| rules.iter().map(|r| r.render(&features)).collect::<Vec<_>>();

    let file = TreeFile {
        format_version: FORMAT_VERSION,
        stats: tree.stats,
        features: features.iter().map(|f| f.label()).collect(),
        training_accuracy: tree.accuracy(&x, &labels),
        rule_counts: RuleCounts {
            na: na.len(),
            a: a.len(),
        },
        tree,
    };
    let outcome = SurrogateOutcome {
        rules_na: render(&na),
        rules_a: render(&a),
        seconds: start.elapsed().as_secs_f64(),
        file,
    };
    artifacts::write_json(out, artifacts::TREE_FILE, &outcome.file)?;
    artifacts::write_text(out, artifacts::TREE_TEXT_FILE, &outcome.summary_text())?;
    Ok(outcome)
}

impl SurrogateOutcome {
    pub fn summary_text(&self) -> String {
        let f = &self.file;
        let mut s = format!(
            "{}\nTraining accuracy = {:.2}%\nRules: NA = {}, A = {}\n",
            f.stats,
            100.0 * f.training_accuracy,
            f.rule_counts.na,
            f.rule_counts.a
        );
        for line in self.rules_na.iter().chain(&self.rules_a) {
            s.push_str(line);
            s.push('\n');
        }
        s
    }
}
