//! Run configuration, read from a JSON file.
//!
//! ```json
//! {
//!   "name": "seismic",
//!   "dataset": "seismic.csv",
//!   "schema": {
//!     "numerical": ["gdenergy", "gdpuls"],
//!     "categorical": [],
//!     "cyclical": [{ "column": "hour", "period": 24 }]
//!   },
//!   "ocsvm": { "nu": 0.1, "gamma": 0.1 },
//!   "kmeans": { "max_iter": 100, "n_init": 10, "seed": 0 },
//!   "extraction": { "discard_factor": 1.0, "box_mode": "all", "targets": "both" },
//!   "surrogate": { "seed": 42 },
//!   "output_dir": "out/seismic"
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use ocsvm_rules::clustering::KMeansOptions;
use ocsvm_rules::dataset::{CyclicalFeature, Schema};
use ocsvm_rules::ocsvm::{KernelParams, Label, SolverOptions};
use ocsvm_rules::rules::{BoxMode, DiscardThreshold, ExtractionConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Targets {
    Na,
    A,
    #[default]
    Both,
}

impl Targets {
    pub fn labels(self) -> Vec<Label> {
        match self {
            Targets::Na => vec![Label::NonAnomalous],
            Targets::A => vec![Label::Anomalous],
            Targets::Both => vec![Label::NonAnomalous, Label::Anomalous],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemaSection {
    #[serde(default)]
    pub numerical: Vec<String>,
    #[serde(default)]
    pub categorical: Vec<String>,
    /// Periodic numerical columns, replaced by sine/cosine pairs before fitting.
    #[serde(default)]
    pub cyclical: Vec<CyclicalFeature>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OcsvmSection {
    pub nu: f64,
    pub gamma: f64,
    pub tol: f64,
    pub max_iter: Option<usize>,
    /// Feed one-hot categorical columns to the SVM. When false the model sees
    /// numerical features only and categorical columns are used for grouping.
    pub categorical_in_model: bool,
}

impl Default for OcsvmSection {
    fn default() -> Self {
        Self {
            nu: 0.1,
            gamma: 0.1,
            tol: 1e-3,
            max_iter: None,
            categorical_in_model: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractionSection {
    pub discard_factor: f64,
    pub discard_threshold: DiscardThreshold,
    pub box_mode: BoxMode,
    pub max_clusters: Option<usize>,
    pub targets: Targets,
    pub strict_min_data: bool,
    pub prune: bool,
}

impl Default for ExtractionSection {
    fn default() -> Self {
        let d = ExtractionConfig::default();
        Self {
            discard_factor: d.discard_factor,
            discard_threshold: d.discard_threshold,
            box_mode: d.box_mode,
            max_clusters: d.max_clusters,
            targets: Targets::Both,
            strict_min_data: d.strict_min_data,
            prune: d.prune,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SurrogateSection {
    pub seed: u64,
}

impl Default for SurrogateSection {
    fn default() -> Self {
        Self { seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Identifier used in reports; defaults to the config file stem.
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: PathBuf,
    pub schema: SchemaSection,
    #[serde(default)]
    pub ocsvm: OcsvmSection,
    #[serde(default)]
    pub kmeans: KMeansOptions,
    #[serde(default)]
    pub extraction: ExtractionSection,
    #[serde(default)]
    pub surrogate: SurrogateSection,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(skip)]
    base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Parses and validates a config. `base_dir` anchors relative paths.
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = Self::from_json(&text, base)?;
        if cfg.name.is_none() {
            cfg.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        }
        Ok(cfg)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("run")
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.base_dir.join(&self.dataset)
    }

    pub fn output_path(&self) -> PathBuf {
        self.base_dir.join(&self.output_dir)
    }

    /// Columns read from the CSV: cyclical columns are loaded as numerical.
    pub fn load_schema(&self) -> Schema {
        let mut s = Schema::new(self.schema.numerical.iter().cloned(), self.schema.categorical.iter().cloned());
        s.numerical.extend(self.schema.cyclical.iter().map(|f| f.column.clone()));
        s
    }

    pub fn kernel(&self) -> Result<KernelParams> {
        Ok(KernelParams::rbf(self.ocsvm.gamma)?)
    }

    pub fn solver(&self) -> SolverOptions {
        SolverOptions {
            tol: self.ocsvm.tol,
            max_iter: self.ocsvm.max_iter,
        }
    }

    pub fn extraction_config(&self) -> ExtractionConfig {
        let e = &self.extraction;
        ExtractionConfig {
            discard_factor: e.discard_factor,
            discard_threshold: e.discard_threshold,
            box_mode: e.box_mode,
            max_clusters: e.max_clusters,
            kmeans: self.kmeans,
            strict_min_data: e.strict_min_data,
            prune: e.prune,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::Config(m));
        let o = &self.ocsvm;
        if !(o.nu > 0.0 && o.nu <= 1.0) {
            return bad(format!("ocsvm.nu must lie in (0, 1], got {}", o.nu));
        }
        if !(o.gamma > 0.0 && o.gamma.is_finite()) {
            return bad(format!("ocsvm.gamma must be positive, got {}", o.gamma));
        }
        if !(o.tol > 0.0 && o.tol.is_finite()) {
            return bad(format!("ocsvm.tol must be positive, got {}", o.tol));
        }
        if self.kmeans.n_init == 0 || self.kmeans.max_iter == 0 {
            return bad("kmeans.n_init and kmeans.max_iter must be at least 1".into());
        }
        self.extraction_config().validate()?;

        let s = &self.schema;
        if s.numerical.is_empty() && s.categorical.is_empty() && s.cyclical.is_empty() {
            return bad("schema declares no columns".into());
        }
        for f in &s.cyclical {
            if !(f.period > 0.0 && f.period.is_finite()) {
                return bad(format!("cyclical column '{}' needs a positive period", f.column));
            }
        }
        self.load_schema().validate()?;
        // Expanded cyclical names must not shadow declared columns.
        for f in &s.cyclical {
            for n in [f.sin_name(), f.cos_name()] {
                if s.numerical.contains(&n) || s.categorical.contains(&n) {
                    return bad(format!("column '{n}' clashes with the encoding of cyclical column '{}'", f.column));
                }
            }
        }
        Ok(())
    }
}
