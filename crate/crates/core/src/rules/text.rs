use std::fmt::Write;

use super::{Interval, Rule, RuleSet};
use crate::dataset::{cyclical_decode, CyclicalFeature};
use crate::ocsvm::Label;
use crate::Result;

/// Smallest arc of a period containing a set of positions. `start > end`
/// means the arc wraps past the end of the period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularInterval {
    pub start: f64,
    pub end: f64,
    /// The arc covers the whole period.
    pub full: bool,
}

/// Angular extent of a box in (sin, cos) space.
///
/// A box that contains the origin spans every angle. Otherwise the extreme
/// angles of the box are attained at its corners, so the enclosing arc of
/// the four decoded corners is the answer.
pub fn angular_interval(sin: Interval, cos: Interval, period: f64) -> Result<AngularInterval> {
    if sin.contains(0.0) && cos.contains(0.0) {
        return Ok(AngularInterval {
            start: 0.0,
            end: period,
            full: true,
        });
    }
    let mut angles = Vec::with_capacity(4);
    for s in [sin.lo, sin.hi] {
        for c in [cos.lo, cos.hi] {
            angles.push(cyclical_decode(s, c, period)?);
        }
    }
    angles.sort_by(f64::total_cmp);
    // The arc is the complement of the widest gap between neighbours.
    let mut widest = (period - angles[3] + angles[0], 0);
    for i in 1..4 {
        let gap = angles[i] - angles[i - 1];
        if gap > widest.0 {
            widest = (gap, i);
        }
    }
    let start = angles[widest.1];
    let end = angles[(widest.1 + 3) % 4];
    Ok(AngularInterval {
        start,
        end,
        full: false,
    })
}

impl RuleSet {
    /// One line per rule, e.g. `NOT OUTLIER IF x ≥ 1 ∧ x ≤ 2 ∧ c = a`.
    ///
    /// Pairs of sine/cosine columns produced from `cyclical` features are
    /// rendered as a single approximate range of the original feature.
    pub fn to_text(&self, cyclical: &[CyclicalFeature]) -> Result<String> {
        let mut out = String::new();
        for rule in &self.rules {
            out.push_str(&self.render_rule(rule, cyclical)?);
            out.push('\n');
        }
        Ok(out)
    }

    fn render_rule(&self, rule: &Rule, cyclical: &[CyclicalFeature]) -> Result<String> {
        let head = match self.label {
            Label::NonAnomalous => "NOT OUTLIER IF",
            Label::Anomalous => "OUTLIER IF",
        };
        let position = |name: &str| self.numerical.iter().position(|n| n == name);
        let mut terms = Vec::new();
        let mut done = vec![false; self.numerical.len()];
        for (j, name) in self.numerical.iter().enumerate() {
            if done[j] {
                continue;
            }
            let paired = cyclical.iter().find_map(|f| {
                let (s, c) = (position(&f.sin_name())?, position(&f.cos_name())?);
                (s == j || c == j).then_some((f, s, c))
            });
            match paired {
                Some((f, s, c)) if !self.scaled => {
                    done[s] = true;
                    done[c] = true;
                    let arc = angular_interval(rule.bounds[s], rule.bounds[c], f.period)?;
                    terms.push(if arc.full {
                        format!("{} ∈ [0, {}) (approx.)", f.column, f.period)
                    } else if arc.start <= arc.end {
                        format!("{} ∈ [{}, {}] (approx.)", f.column, arc.start, arc.end)
                    } else {
                        format!("{} ∈ [{}, {}] (wraps, approx.)", f.column, arc.start, arc.end)
                    });
                }
                _ => {
                    done[j] = true;
                    let b = rule.bounds[j];
                    terms.push(format!("{name} ≥ {}", b.lo));
                    terms.push(format!("{name} ≤ {}", b.hi));
                }
            }
        }
        for (c, v) in rule.state.pairs() {
            terms.push(format!("{c} = {v}"));
        }
        let mut line = String::from(head);
        for (i, t) in terms.iter().enumerate() {
            let _ = write!(line, "{}{t}", if i == 0 { " " } else { " ∧ " });
        }
        Ok(line)
    }
}
