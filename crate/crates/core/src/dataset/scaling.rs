use serde::{Deserialize, Serialize};

use super::{Column, ColumnData, Dataset};
use crate::{Error, Result};

/// Min-max range of one numerical column. `degenerate` is set exactly when
/// the column is constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnScale {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub degenerate: bool,
}

impl ColumnScale {
    pub fn scale(&self, v: f64) -> f64 {
        if self.degenerate {
            0.0
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }

    pub fn unscale(&self, v: f64) -> f64 {
        if self.degenerate {
            self.min
        } else {
            self.min + v * (self.max - self.min)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub columns: Vec<ColumnScale>,
}

impl ScalingParams {
    pub fn get(&self, name: &str) -> Result<&ColumnScale> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn scale_value(&self, v: f64, col: &str) -> Result<f64> {
        Ok(self.get(col)?.scale(v))
    }

    /// Checks that every stored range is well formed. Used after
    /// deserializing params from untrusted files.
    pub fn validate(&self) -> Result<()> {
        for c in &self.columns {
            if !c.min.is_finite() || !c.max.is_finite() || c.min > c.max {
                return Err(Error::InvalidParameter(format!(
                    "invalid range [{}, {}] for column '{}'",
                    c.min, c.max, c.name
                )));
            }
            if c.degenerate != (c.min == c.max) {
                return Err(Error::InvalidParameter(format!(
                    "degenerate flag inconsistent for column '{}'",
                    c.name
                )));
            }
        }
        Ok(())
    }
}

/// Records min and max of each listed numerical column.
pub fn scale_fit(d: &Dataset, numerical: &[String]) -> Result<ScalingParams> {
    let mut columns = Vec::with_capacity(numerical.len());
    for name in numerical {
        let v = d.numerical(name)?;
        if v.is_empty() {
            return Err(Error::Empty(format!("column '{name}' has no rows")));
        }
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        columns.push(ColumnScale {
            name: name.clone(),
            min,
            max,
            degenerate: min == max,
        });
    }
    Ok(ScalingParams { columns })
}

/// Maps the numerical columns covered by `p` to `[0, 1]`. The dataset's
/// numerical columns must be exactly the columns `p` was fitted on.
pub fn scale_apply(d: &Dataset, p: &ScalingParams) -> Result<Dataset> {
    let mut present = d.numerical_names();
    let mut expected: Vec<String> = p.names().map(str::to_string).collect();
    present.sort();
    expected.sort();
    if present != expected {
        return Err(Error::Schema(format!(
            "scaling params cover {expected:?} but dataset has numerical columns {present:?}"
        )));
    }
    let columns = d
        .columns()
        .iter()
        .map(|c| match &c.data {
            ColumnData::Numerical(v) => {
                let s = p.get(&c.name)?;
                Ok(Column::numerical(c.name.clone(), v.iter().map(|&x| s.scale(x)).collect()))
            }
            ColumnData::Categorical(_) => Ok(c.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(columns)
}

/// Inverse of the min-max map for one column. Degenerate columns map every
/// value back to the constant.
pub fn unscale_value(v: f64, col: &str, p: &ScalingParams) -> Result<f64> {
    Ok(p.get(col)?.unscale(v))
}
