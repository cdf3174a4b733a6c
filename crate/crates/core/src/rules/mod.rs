//! Hypercube rules: closed per-feature intervals plus categorical equality
//! conditions, extracted so that each box covers points of one class and
//! none of the other.

mod extract;
mod text;

use serde::{Deserialize, Serialize};

use crate::dataset::{CategoricalState, Dataset, ScalingParams};
use crate::ocsvm::Label;
use crate::{Error, Result};

pub use extract::{
    bounding_box, contains_any_anomaly, extract_numeric_rules, extract_rules, BoxMode, ClusterBox,
    DiscardThreshold, Extraction, ExtractionConfig, ExtractionSummary, NumericRules,
};
pub use text::{angular_interval, AngularInterval};

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Signed change that moves `v` into the interval; zero inside.
    pub fn delta(&self, v: f64) -> f64 {
        if v < self.lo {
            self.lo - v
        } else if v > self.hi {
            self.hi - v
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Index of the categorical group (0 when there are no categoricals).
    pub group: usize,
    pub cluster: usize,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub state: CategoricalState,
    /// One interval per numerical column of the rule set.
    pub bounds: Vec<Interval>,
    pub label: Label,
    pub provenance: Provenance,
}

impl Rule {
    /// Closed-box membership of a numerical vector.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.bounds.len() == x.len() && self.bounds.iter().zip(x).all(|(b, &v)| b.contains(v))
    }

    /// Same categorical state and every interval contains the other's.
    pub fn subsumes(&self, other: &Rule) -> bool {
        self.state == other.state
            && self.bounds.len() == other.bounds.len()
            && self
                .bounds
                .iter()
                .zip(&other.bounds)
                .all(|(a, b)| a.contains_interval(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscardedCluster {
    pub group: usize,
    pub cluster: usize,
    pub points: usize,
}

/// Ordered rules sharing one label and one unit system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub label: Label,
    pub numerical: Vec<String>,
    pub categorical: Vec<String>,
    /// Bounds are in scaled `[0, 1]` units when set, original units otherwise.
    pub scaled: bool,
    /// Vertices of a box: `2^numerical.len()`.
    pub n_v: u64,
    pub rules: Vec<Rule>,
    pub discarded_clusters: Vec<DiscardedCluster>,
}

pub fn vertex_count(numerical: usize) -> Result<u64> {
    u32::try_from(numerical)
        .ok()
        .and_then(|d| 1u64.checked_shl(d))
        .filter(|_| numerical < 64)
        .ok_or_else(|| {
            Error::InvalidParameter(format!("{numerical} numerical features is too many for box vertices"))
        })
}

impl RuleSet {
    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// True when some rule with `state` contains `x`.
    pub fn covers(&self, state: &CategoricalState, x: &[f64]) -> bool {
        self.rules.iter().any(|r| r.state == *state && r.contains(x))
    }

    /// Row `row` of `d`, checked against the rules using the rule set's
    /// column names. `d` must be in the same units as the rules.
    pub fn covers_row(&self, d: &Dataset, row: usize) -> Result<bool> {
        let x = self
            .numerical
            .iter()
            .map(|n| Ok(d.numerical(n)?[row]))
            .collect::<Result<Vec<_>>>()?;
        let state = d.state_of(row, &self.categorical)?;
        Ok(self.covers(&state, &x))
    }

    pub fn discarded_points(&self) -> usize {
        self.discarded_clusters.iter().map(|d| d.points).sum()
    }

    /// Structural checks for rule sets read from files.
    pub fn validate(&self) -> Result<()> {
        if self.n_v != vertex_count(self.numerical.len())? {
            return Err(Error::InvalidParameter(format!(
                "n_v = {} inconsistent with {} numerical columns",
                self.n_v,
                self.numerical.len()
            )));
        }
        for (i, r) in self.rules.iter().enumerate() {
            if r.label != self.label {
                return Err(Error::InvalidParameter(format!("rule {i} has a different label")));
            }
            if r.bounds.len() != self.numerical.len() {
                return Err(Error::DimensionMismatch {
                    expected: self.numerical.len(),
                    actual: r.bounds.len(),
                });
            }
            if r.bounds.iter().any(|b| !(b.lo.is_finite() && b.hi.is_finite() && b.lo <= b.hi)) {
                return Err(Error::InvalidParameter(format!("rule {i} has an invalid interval")));
            }
            let cols: Vec<&str> = r.state.pairs().iter().map(|(c, _)| c.as_str()).collect();
            if !cols.is_empty() && cols != self.categorical.iter().map(String::as_str).collect::<Vec<_>>() {
                return Err(Error::InvalidParameter(format!(
                    "rule {i} state does not match the categorical columns"
                )));
            }
        }
        Ok(())
    }
}

/// Removes every rule contained in another rule with the same categorical
/// state. Of identical rules the first is kept. Only single-rule
/// containment is detected.
pub fn prune_rules(rs: &RuleSet) -> RuleSet {
    let rules = &rs.rules;
    let kept = rules
        .iter()
        .enumerate()
        .filter(|&(i, a)| {
            !rules.iter().enumerate().any(|(j, b)| {
                j != i && b.subsumes(a) && (j < i || !a.subsumes(b))
            })
        })
        .map(|(_, r)| r.clone())
        .collect();
    RuleSet {
        rules: kept,
        ..rs.clone()
    }
}

/// Maps interval endpoints from scaled to original units.
pub fn unscale_rules(rs: &RuleSet, p: &ScalingParams) -> Result<RuleSet> {
    if !rs.scaled {
        return Err(Error::InvalidParameter("rule set is already in original units".into()));
    }
    let scales = rs
        .numerical
        .iter()
        .map(|n| p.get(n))
        .collect::<Result<Vec<_>>>()?;
    let rules = rs
        .rules
        .iter()
        .map(|r| Rule {
            bounds: r
                .bounds
                .iter()
                .zip(&scales)
                .map(|(b, s)| Interval::new(s.unscale(b.lo), s.unscale(b.hi)))
                .collect(),
            ..r.clone()
        })
        .collect();
    Ok(RuleSet {
        rules,
        scaled: false,
        ..rs.clone()
    })
}

/// Per-feature changes that move a point into its nearest rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterfactual {
    pub point: Vec<f64>,
    pub nearest_rule: Rule,
    pub deltas: Vec<f64>,
    /// L1 norm of `deltas`, in the units of the rule set.
    pub distance: f64,
}

/// Finds the rule with `state` closest to `x` in L1 clip distance (ties to
/// the earlier rule). Use a scaled rule set to measure distance in scaled
/// units.
pub fn explain_point(x: &[f64], state: &CategoricalState, rs: &RuleSet) -> Result<Counterfactual> {
    if x.len() != rs.numerical.len() {
        return Err(Error::DimensionMismatch {
            expected: rs.numerical.len(),
            actual: x.len(),
        });
    }
    let mut best: Option<(&Rule, Vec<f64>, f64)> = None;
    for rule in rs.rules.iter().filter(|r| r.state == *state) {
        let deltas: Vec<f64> = rule.bounds.iter().zip(x).map(|(b, &v)| b.delta(v)).collect();
        let distance: f64 = deltas.iter().map(|d| d.abs()).sum();
        if best.as_ref().is_none_or(|(_, _, d)| distance < *d) {
            best = Some((rule, deltas, distance));
        }
    }
    let (rule, deltas, distance) = best.ok_or(Error::NoMatchingRule)?;
    Ok(Counterfactual {
        point: x.to_vec(),
        nearest_rule: rule.clone(),
        deltas,
        distance,
    })
}
