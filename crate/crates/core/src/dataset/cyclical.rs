use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A periodic feature (hour of day, weekday, ...) represented by its sine and
/// cosine components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CyclicalFeature {
    pub column: String,
    pub period: f64,
}

impl CyclicalFeature {
    pub fn new(column: impl Into<String>, period: f64) -> Self {
        Self {
            column: column.into(),
            period,
        }
    }

    pub fn sin_name(&self) -> String {
        format!("{}_sin", self.column)
    }

    pub fn cos_name(&self) -> String {
        format!("{}_cos", self.column)
    }
}

fn check_period(period: f64) -> Result<()> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    Ok(())
}

pub fn cyclical_encode(v: f64, period: f64) -> Result<(f64, f64)> {
    check_period(period)?;
    let angle = TAU * v / period;
    Ok((angle.sin(), angle.cos()))
}

/// Recovers the position in `[0, period)` from a (sin, cos) pair. The pair
/// need not lie on the unit circle; only its direction matters.
pub fn cyclical_decode(s: f64, c: f64, period: f64) -> Result<f64> {
    check_period(period)?;
    if !(s.is_finite() && c.is_finite()) || (s == 0.0 && c == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "angle undefined for ({s}, {c})"
        )));
    }
    let mut t = s.atan2(c) / TAU * period;
    if t < 0.0 {
        t += period;
    }
    if t >= period {
        t -= period;
    }
    Ok(t)
}
