use serde::{Deserialize, Serialize};

use super::{scale_fit, Dataset, ScalingParams};
use crate::{Error, Matrix, Result};

/// Observed tokens of one categorical column, in first-appearance order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryLevels {
    pub column: String,
    pub levels: Vec<String>,
}

/// Describes one column of the encoded feature matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureInfo {
    Numerical { name: String },
    Indicator { column: String, value: String },
}

impl FeatureInfo {
    pub fn label(&self) -> String {
        match self {
            FeatureInfo::Numerical { name } => name.clone(),
            FeatureInfo::Indicator { column, value } => format!("{column}={value}"),
        }
    }
}

/// Turns a dataset into the model's feature matrix: min-max scaled
/// numerical columns followed by one-hot indicators for categorical columns.
///
/// Unseen categorical tokens encode as all-zero indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    pub numerical: Vec<String>,
    pub categorical: Vec<CategoryLevels>,
    pub scaling: ScalingParams,
}

impl FeatureEncoder {
    /// Fits scaling on `numerical`. When `categorical` is empty the model sees
    /// numerical features only.
    pub fn fit(d: &Dataset, numerical: &[String], categorical: &[String]) -> Result<Self> {
        let scaling = scale_fit(d, numerical)?;
        let categorical = categorical
            .iter()
            .map(|c| {
                let mut levels: Vec<String> = Vec::new();
                for v in d.categorical(c)? {
                    if !levels.contains(v) {
                        levels.push(v.clone());
                    }
                }
                Ok(CategoryLevels {
                    column: c.clone(),
                    levels,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            numerical: numerical.to_vec(),
            categorical,
            scaling,
        })
    }

    pub fn dim(&self) -> usize {
        self.numerical.len() + self.categorical.iter().map(|c| c.levels.len()).sum::<usize>()
    }

    pub fn features(&self) -> Vec<FeatureInfo> {
        let mut out: Vec<FeatureInfo> = self
            .numerical
            .iter()
            .map(|n| FeatureInfo::Numerical { name: n.clone() })
            .collect();
        for c in &self.categorical {
            out.extend(c.levels.iter().map(|v| FeatureInfo::Indicator {
                column: c.column.clone(),
                value: v.clone(),
            }));
        }
        out
    }

    /// Scaled feature matrix for `d`.
    pub fn encode(&self, d: &Dataset) -> Result<Matrix> {
        self.encode_inner(d, true)
    }

    /// Like [`encode`](Self::encode) but with numerical columns in original
    /// units.
    pub fn encode_unscaled(&self, d: &Dataset) -> Result<Matrix> {
        self.encode_inner(d, false)
    }

    fn encode_inner(&self, d: &Dataset, scaled: bool) -> Result<Matrix> {
        let num = self
            .numerical
            .iter()
            .map(|n| Ok((d.numerical(n)?, self.scaling.get(n)?)))
            .collect::<Result<Vec<_>>>()?;
        let cat = self
            .categorical
            .iter()
            .map(|c| Ok((d.categorical(&c.column)?, &c.levels)))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.dim();
        let mut data = Vec::with_capacity(d.rows() * dim);
        for row in 0..d.rows() {
            for (values, s) in &num {
                data.push(if scaled { s.scale(values[row]) } else { values[row] });
            }
            for (values, levels) in &cat {
                data.extend(levels.iter().map(|l| f64::from(u8::from(*l == values[row]))));
            }
        }
        Matrix::from_vec(d.rows(), dim, data)
    }

    /// Structural checks for encoders read from files.
    pub fn validate(&self) -> Result<()> {
        self.scaling.validate()?;
        for n in &self.numerical {
            self.scaling.get(n)?;
        }
        if self.scaling.columns.len() != self.numerical.len() {
            return Err(Error::InvalidParameter(
                "scaling params do not match numerical columns".into(),
            ));
        }
        Ok(())
    }
}
