//! On-disk documents written by the commands. Every JSON document carries a
//! `format_version`; readers reject versions they do not know.

use std::path::{Path, PathBuf};

use ocsvm_rules::dataset::{CyclicalFeature, FeatureEncoder};
use ocsvm_rules::ocsvm::{Label, OcsvmModel};
use ocsvm_rules::rules::{ExtractionSummary, RuleSet};
use ocsvm_rules::surrogate::{DecisionTree, TreeStats};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::SchemaSection;
use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

pub const MODEL_FILE: &str = "model.json";
pub const TREE_FILE: &str = "tree.json";
pub const TREE_TEXT_FILE: &str = "tree.txt";
pub const TIMINGS_FILE: &str = "timings.json";
pub const ERROR_FILE: &str = "error.json";
pub const REPORT_FILE: &str = "report.json";
pub const REPORT_TEXT_FILE: &str = "report.txt";
pub const PLOT_FILE: &str = "plot.svg";

/// `rules_na.json`, `rules_a.scaled.txt`, ...
pub fn rules_file(label: Label, scaled: bool, ext: &str) -> String {
    let unit = if scaled { ".scaled" } else { "" };
    format!("rules_{}{unit}.{ext}", label.tag())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub schema: SchemaSection,
    /// Categorical columns used to group rules.
    pub grouping: Vec<String>,
    pub encoder: FeatureEncoder,
    pub model: OcsvmModel,
}

impl ModelFile {
    pub fn validate(&self) -> Result<()> {
        check_version(self.format_version)?;
        self.encoder.validate()?;
        self.model.validate()?;
        if self.encoder.dim() != self.model.dim() {
            return Err(ocsvm_rules::Error::DimensionMismatch {
                expected: self.encoder.dim(),
                actual: self.model.dim(),
            }
            .into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RulesFile {
    pub format_version: u32,
    pub summary: ExtractionSummary,
    /// Needed to render sine/cosine pairs back as ranges of the original
    /// periodic column.
    #[serde(default)]
    pub cyclical: Vec<CyclicalFeature>,
    pub rule_set: RuleSet,
}

impl RulesFile {
    pub fn validate(&self) -> Result<()> {
        check_version(self.format_version)?;
        self.rule_set.validate()?;
        let s = &self.summary;
        if s.covered_rows + s.discarded_rows != s.target_rows {
            return Err(CliError::Other("rules summary does not add up".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> Result<String> {
        Ok(self.rule_set.to_text(&self.cyclical)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleCounts {
    pub na: usize,
    pub a: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub format_version: u32,
    pub stats: TreeStats,
    /// Feature names in tree column order.
    pub features: Vec<String>,
    pub training_accuracy: f64,
    pub rule_counts: RuleCounts,
    pub tree: DecisionTree,
}

impl TreeFile {
    pub fn validate(&self) -> Result<()> {
        check_version(self.format_version)?;
        if self.features.len() != self.tree.n_features {
            return Err(CliError::Other(format!(
                "tree has {} features but {} names",
                self.tree.n_features,
                self.features.len()
            )));
        }
        if self.rule_counts.na + self.rule_counts.a != self.stats.leaves {
            return Err(CliError::Other("tree rule counts do not match its leaves".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub fit_seconds: f64,
    pub extract_seconds: f64,
    pub surrogate_seconds: Option<f64>,
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(CliError::Other(format!(
            "unsupported format_version {v} (expected {FORMAT_VERSION})"
        )));
    }
    Ok(())
}

pub fn parse_model(text: &str) -> Result<ModelFile> {
    let m: ModelFile = serde_json::from_str(text).map_err(|e| CliError::json(MODEL_FILE, e))?;
    m.validate()?;
    Ok(m)
}

pub fn parse_rules(text: &str) -> Result<RulesFile> {
    let r: RulesFile = serde_json::from_str(text).map_err(|e| CliError::json("rules", e))?;
    r.validate()?;
    Ok(r)
}

pub fn parse_tree(text: &str) -> Result<TreeFile> {
    let t: TreeFile = serde_json::from_str(text).map_err(|e| CliError::json(TREE_FILE, e))?;
    t.validate()?;
    Ok(t)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        CliError::Json { source, .. } => CliError::json(path, source),
        other => other,
    })
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    with_path(path, parse_model(&read(path)?))
}

pub fn read_rules(path: &Path) -> Result<RulesFile> {
    with_path(path, parse_rules(&read(path)?))
}

pub fn read_tree(path: &Path) -> Result<TreeFile> {
    with_path(path, parse_tree(&read(path)?))
}

pub fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::json(name, e))?;
    text.push('\n');
    write_text(dir, name, &text)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::json(path, e))
}
