//! Hand-written SVG: a scatter of the data in original units with one
//! rectangle per rule. Rules whose box has zero width or height are drawn
//! as markers.

use std::fmt::Write as _;

use ocsvm_rules::dataset::{CategoricalState, Dataset};
use ocsvm_rules::ocsvm::Label;
use ocsvm_rules::rules::{Interval, RuleSet};

use crate::error::{CliError, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

pub struct PlotInput<'a> {
    pub data: &'a Dataset,
    pub labels: &'a [Label],
    /// Rules in original units.
    pub rules: &'a RuleSet,
    /// Categorical state to draw when the rules are grouped.
    pub state: Option<&'a CategoricalState>,
}

struct Axis {
    lo: f64,
    hi: f64,
    px_lo: f64,
    px_hi: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, px_lo: f64, px_hi: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        let pad = if hi > lo { 0.05 * (hi - lo) } else { 0.5_f64.max(lo.abs() * 0.05) };
        Self {
            lo: lo - pad,
            hi: hi + pad,
            px_lo,
            px_hi,
        }
    }

    fn map(&self, v: f64) -> f64 {
        self.px_lo + (v - self.lo) / (self.hi - self.lo) * (self.px_hi - self.px_lo)
    }
}

/// Parses `col=value[,col=value...]`.
pub fn parse_state(spec: &str) -> Result<CategoricalState> {
    let pairs = spec
        .split(',')
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("expected col=value, got '{kv}'")))?;
            Ok((k.trim().to_string(), v.trim().to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CategoricalState::new(pairs))
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(input: &PlotInput<'_>) -> Result<String> {
    let rs = input.rules;
    if rs.numerical.len() != 2 {
        return Err(CliError::Config(format!(
            "plots need exactly 2 numerical features, the rules use {}; select two columns in the config schema",
            rs.numerical.len()
        )));
    }
    if rs.scaled {
        return Err(CliError::Config("plots are drawn from rules in original units".into()));
    }
    let state = match (rs.categorical.is_empty(), input.state) {
        (true, _) => CategoricalState::default(),
        (false, Some(s)) => {
            for (c, _) in s.pairs() {
                if !rs.categorical.contains(c) {
                    return Err(CliError::Config(format!("'{c}' is not a grouping column of these rules")));
                }
            }
            s.clone()
        }
        (false, None) => {
            return Err(CliError::Config(format!(
                "rules are grouped by {}; pick one state with --state",
                rs.categorical.join(", ")
            )))
        }
    };
    let d = input.data;
    if input.labels.len() != d.rows() {
        return Err(ocsvm_rules::Error::DimensionMismatch {
            expected: d.rows(),
            actual: input.labels.len(),
        }
        .into());
    }
    let xs = d.numerical(&rs.numerical[0])?;
    let ys = d.numerical(&rs.numerical[1])?;
    let rows: Vec<usize> = (0..d.rows()).filter(|&r| state.matches_row(d, r)).collect();
    let rules: Vec<&[Interval]> = rs
        .rules
        .iter()
        .filter(|r| r.state.pairs().iter().all(|(c, v)| state.value(c).is_none_or(|s| s == v)))
        .map(|r| r.bounds.as_slice())
        .collect();

    let ax = Axis::new(
        rows.iter().map(|&r| xs[r]).chain(rules.iter().flat_map(|b| [b[0].lo, b[0].hi])),
        MARGIN,
        WIDTH - MARGIN / 2.0,
    );
    let ay = Axis::new(
        rows.iter().map(|&r| ys[r]).chain(rules.iter().flat_map(|b| [b[1].lo, b[1].hi])),
        HEIGHT - MARGIN,
        MARGIN / 2.0,
    );

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        "<style>.na{{fill:#1f77b4}} .a{{stroke:#d62728;stroke-width:1.5}} .rule{{fill:#2ca02c;fill-opacity:0.12;stroke:#2ca02c;stroke-width:1.2}} .outlier-rule{{fill:#d62728;fill-opacity:0.08;stroke:#d62728;stroke-dasharray:4 2}}</style>"
    );
    let _ = writeln!(s, r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##);

    // Axes with end labels.
    let (x0, x1, y0, y1) = (ax.px_lo, ax.px_hi, ay.px_lo, ay.px_hi);
    let _ = writeln!(s, r##"<g class="axes" stroke="#333333"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"##);
    let _ = writeln!(s, r#"<text x="{x0}" y="{:.1}">{:.4}</text>"#, y0 + 16.0, ax.lo);
    let _ = writeln!(s, r#"<text x="{x1}" y="{:.1}" text-anchor="end">{:.4}</text>"#, y0 + 16.0, ax.hi);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{y0}" text-anchor="end">{:.4}</text>"#, x0 - 4.0, ay.lo);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.4}</text>"#, x0 - 4.0, y1 + 10.0, ay.hi);
    let _ = writeln!(s, r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 12.0, escape(&rs.numerical[0]));
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" text-anchor="middle" transform="rotate(-90 14 {:.1})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(&rs.numerical[1])
    );
    if !state.is_empty() {
        let _ = writeln!(s, r#"<text x="{x1}" y="14" text-anchor="end">{}</text>"#, escape(&state.to_string()));
    }

    let class = match rs.label {
        Label::NonAnomalous => "rule",
        Label::Anomalous => "rule outlier-rule",
    };
    for b in &rules {
        let (px0, px1) = (ax.map(b[0].lo), ax.map(b[0].hi));
        let (py0, py1) = (ay.map(b[1].hi), ay.map(b[1].lo));
        let (w, h) = (px1 - px0, py1 - py0);
        if b[0].lo == b[0].hi || b[1].lo == b[1].hi {
            // Zero-area box: a diamond marker around its centre (or segment).
            let (cx, cy) = ((px0 + px1) / 2.0, (py0 + py1) / 2.0);
            let _ = writeln!(
                s,
                r#"<g class="{class} degenerate"><line x1="{px0:.2}" y1="{py0:.2}" x2="{px1:.2}" y2="{py1:.2}"/><path d="M{:.2} {cy:.2} L{cx:.2} {:.2} L{:.2} {cy:.2} L{cx:.2} {:.2} Z"/></g>"#,
                cx - 4.0,
                cy - 4.0,
                cx + 4.0,
                cy + 4.0
            );
        } else {
            let _ = writeln!(s, r#"<rect class="{class}" x="{px0:.2}" y="{py0:.2}" width="{w:.2}" height="{h:.2}"/>"#);
        }
    }

    for &r in &rows {
        let (px, py) = (ax.map(xs[r]), ay.map(ys[r]));
        match input.labels[r] {
            Label::NonAnomalous => {
                let _ = writeln!(s, r#"<circle class="na" cx="{px:.2}" cy="{py:.2}" r="2.5"/>"#);
            }
            Label::Anomalous => {
                let _ = writeln!(
                    s,
                    r#"<path class="a" d="M{:.2} {:.2} L{:.2} {:.2} M{:.2} {:.2} L{:.2} {:.2}"/>"#,
                    px - 3.0,
                    py - 3.0,
                    px + 3.0,
                    py + 3.0,
                    px - 3.0,
                    py + 3.0,
                    px + 3.0,
                    py - 3.0
                );
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

/// Number of rule shapes (rectangles and degenerate markers) in an SVG
/// produced by [`render_svg`].
pub fn count_rule_shapes(svg: &str) -> usize {
    svg.matches(r#"class="rule"#).count()
}
