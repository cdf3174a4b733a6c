//! One-class SVM anomaly detection with hypercube rule extraction.
//!
//! The pipeline scales numerical features to `[0, 1]`, fits a ν-one-class SVM
//! with an RBF kernel, splits the data into anomalous and non-anomalous rows,
//! and then covers the rows of one class with axis-aligned boxes that contain
//! no row of the other class. Each box becomes a rule of the form
//! `NOT OUTLIER IF x ≥ lo ∧ x ≤ hi ∧ cat = v`.
//!
//! A surrogate decision tree trained on the same labels is provided as a
//! baseline for rule counts.
//!
//! ```no_run
//! use ocsvm_rules::dataset::{load_csv, FeatureEncoder, Schema};
//! use ocsvm_rules::ocsvm::{KernelParams, Label, OcsvmModel, SolverOptions};
//! use ocsvm_rules::rules::{extract_rules, ExtractionConfig};
//!
//! # fn main() -> ocsvm_rules::Result<()> {
//! let schema = Schema::new(["gdenergy", "gdpuls"], []);
//! let data = load_csv("data/seismic.csv", &schema)?;
//! let encoder = FeatureEncoder::fit(&data, &schema.numerical, &[])?;
//! let model = OcsvmModel::fit(&encoder.encode(&data)?, 0.1, KernelParams::rbf(0.1)?, SolverOptions::default())?;
//! let ex = extract_rules(&data, &model, &encoder, &[], Label::NonAnomalous, &ExtractionConfig::default())?;
//! print!("{}", ex.rules.to_text(&[])?);
//! # Ok(())
//! # }
//! ```

pub mod clustering;
pub mod dataset;
mod error;
pub mod matrix;
pub mod ocsvm;
pub mod rules;
pub mod surrogate;

pub use error::{Error, Result};
pub use matrix::Matrix;
