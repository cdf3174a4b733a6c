//! Command-line front end for one-class SVM rule extraction: run configs,
//! the extract/surrogate pipeline, reports and SVG plots.

pub mod artifacts;
pub mod config;
pub mod error;
pub mod pipeline;
pub mod plot;
pub mod report;

pub use error::{CliError, Result};
