use serde::{Deserialize, Serialize};

use super::{prune_rules, unscale_rules, vertex_count, DiscardedCluster, Interval, Provenance, Rule, RuleSet};
use crate::clustering::{kmeans_pp, KMeansOptions};
use crate::dataset::{filter_category, unique_categorical_states, CategoricalState, Dataset, FeatureEncoder, ScalingParams};
use crate::matrix::squared_distance;
use crate::ocsvm::{split_by_prediction, Label, OcsvmModel};
use crate::{Error, Matrix, Result};

/// How the box of a cluster is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxMode {
    /// Per-column min/max over every point of the cluster.
    #[default]
    All,
    /// Per-column min/max over the `n_v` points farthest from the centroid.
    Farthest,
}

/// Quantity multiplied by the discard factor `e` when deciding whether a
/// small cluster is dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardThreshold {
    /// `e · n_v`
    #[default]
    Vertices,
    /// `e · n_cl`, the current number of clusters.
    Clusters,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub discard_factor: f64,
    pub discard_threshold: DiscardThreshold,
    pub box_mode: BoxMode,
    /// Upper limit on the number of clusters; defaults to the number of
    /// points being covered.
    pub max_clusters: Option<usize>,
    pub kmeans: KMeansOptions,
    /// Require at least `n_v` covered points in every categorical group.
    pub strict_min_data: bool,
    pub prune: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            discard_factor: 1.0,
            discard_threshold: DiscardThreshold::Vertices,
            box_mode: BoxMode::All,
            max_clusters: None,
            kmeans: KMeansOptions::default(),
            strict_min_data: false,
            prune: true,
        }
    }
}

impl ExtractionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.discard_factor > 0.0 && self.discard_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "discard factor must be positive, got {}",
                self.discard_factor
            )));
        }
        if self.max_clusters == Some(0) {
            return Err(Error::InvalidParameter("max_clusters must be at least 1".into()));
        }
        Ok(())
    }
}

/// Axis-aligned box around `points`.
///
/// In [`BoxMode::Farthest`] only the `n_v` points farthest from `centroid`
/// are used (ties to the earlier point); with fewer points than `n_v` every
/// point is used and the remaining corners of the box are implied by the
/// per-column extremes.
pub fn bounding_box(points: &Matrix, mode: BoxMode, centroid: Option<&[f64]>, n_v: u64) -> Result<Vec<Interval>> {
    if points.is_empty() {
        return Err(Error::Empty("no points to bound".into()));
    }
    let rows: Vec<usize> = match mode {
        BoxMode::All => (0..points.rows()).collect(),
        BoxMode::Farthest => {
            let centroid = centroid
                .ok_or_else(|| Error::InvalidParameter("farthest-vertex box needs a centroid".into()))?;
            if centroid.len() != points.cols() {
                return Err(Error::DimensionMismatch {
                    expected: points.cols(),
                    actual: centroid.len(),
                });
            }
            let mut order: Vec<(usize, f64)> = points
                .iter_rows()
                .map(|r| squared_distance(r, centroid))
                .enumerate()
                .collect();
            order.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            let take = usize::try_from(n_v).unwrap_or(usize::MAX).min(order.len());
            order[..take].iter().map(|&(i, _)| i).collect()
        }
    };
    Ok((0..points.cols())
        .map(|j| {
            let (lo, hi) = rows.iter().map(|&i| points.get(i, j)).fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), v| (lo.min(v), hi.max(v)),
            );
            Interval::new(lo, hi)
        })
        .collect())
}

/// Number of rows of `others` inside the closed box.
pub fn contains_any_anomaly(bounds: &[Interval], others: &Matrix) -> usize {
    assert!(
        others.is_empty() || others.cols() == bounds.len(),
        "box has {} dimensions, points have {}",
        bounds.len(),
        others.cols()
    );
    others
        .iter_rows()
        .filter(|x| bounds.iter().zip(*x).all(|(b, &v)| b.contains(v)))
        .count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterBox {
    pub cluster: usize,
    pub bounds: Vec<Interval>,
    /// Rows of the covered matrix assigned to this cluster.
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericRules {
    /// Number of clusters at termination.
    pub clusters: usize,
    pub boxes: Vec<ClusterBox>,
    /// `(cluster, point count)` of clusters dropped by the discard rule.
    pub discarded: Vec<(usize, usize)>,
}

/// Covers the rows of `covered` with boxes that contain no row of `others`.
///
/// The number of clusters grows from one until every box is free of
/// `others`. A cluster with fewer than `n_v` points whose box still contains
/// a row of `others` is discarded when its size is at most `e` times the
/// threshold quantity; with `discard` off such a cluster keeps its box.
pub fn extract_numeric_rules(
    covered: &Matrix,
    others: &Matrix,
    n_v: u64,
    cfg: &ExtractionConfig,
    discard: bool,
) -> Result<NumericRules> {
    if covered.is_empty() {
        return Err(Error::Empty("no points to cover".into()));
    }
    cfg.validate()?;
    let n = covered.rows();
    let max_clusters = cfg.max_clusters.unwrap_or(n).min(n);
    let mut offending = 0;
    for n_cl in 1..=max_clusters {
        let clustering = kmeans_pp(covered, n_cl, cfg.kmeans)?;
        let threshold = match cfg.discard_threshold {
            DiscardThreshold::Vertices => n_v as f64,
            DiscardThreshold::Clusters => n_cl as f64,
        } * cfg.discard_factor;

        let mut boxes = Vec::with_capacity(n_cl);
        let mut discarded = Vec::new();
        offending = 0;
        for c in 0..n_cl {
            let members = clustering.members(c)?;
            if members.is_empty() {
                continue;
            }
            let bounds = bounding_box(
                &covered.select_rows(&members),
                cfg.box_mode,
                Some(clustering.centroid(c)),
                n_v,
            )?;
            let small = (members.len() as u64) < n_v;
            if contains_any_anomaly(&bounds, others) == 0 || (small && !discard) {
                boxes.push(ClusterBox {
                    cluster: c,
                    bounds,
                    members,
                });
            } else if small && members.len() as f64 <= threshold {
                discarded.push((c, members.len()));
            } else {
                offending += 1;
            }
        }
        if offending == 0 {
            return Ok(NumericRules {
                clusters: n_cl,
                boxes,
                discarded,
            });
        }
    }
    Err(Error::ExtractionNotConverged {
        clusters: max_clusters,
        offending,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionSummary {
    /// Rows of the class being explained.
    pub target_rows: usize,
    /// Rows of the other class.
    pub other_rows: usize,
    /// Target rows inside at least one rule.
    pub covered_rows: usize,
    pub discarded_rows: usize,
}

impl ExtractionSummary {
    pub fn coverage_percent(&self) -> f64 {
        if self.target_rows == 0 {
            100.0
        } else {
            100.0 * self.covered_rows as f64 / self.target_rows as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    /// Rules in scaled units.
    pub scaled: RuleSet,
    /// The same rules in original units.
    pub rules: RuleSet,
    pub summary: ExtractionSummary,
}

/// Runs the whole extraction for one target class.
///
/// `d` is the dataset in original units, `encoder` the feature encoding the
/// model was fitted with, and `categorical` the columns used for grouping.
/// The target class plays the covered role and the other class must stay
/// outside every box. For [`Label::Anomalous`] the discard rule is off.
pub fn extract_rules(
    d: &Dataset,
    model: &OcsvmModel,
    encoder: &FeatureEncoder,
    categorical: &[String],
    target: Label,
    cfg: &ExtractionConfig,
) -> Result<Extraction> {
    cfg.validate()?;
    let numerical = &encoder.numerical;
    if numerical.is_empty() && categorical.is_empty() {
        return Err(Error::InvalidParameter("no feature columns".into()));
    }
    let features = encoder.encode(d)?;
    let (anomalous, normal) = split_by_prediction(d, &features, model)?;
    let (covered, others) = match target {
        Label::NonAnomalous => (normal, anomalous),
        Label::Anomalous => (anomalous, normal),
    };

    let n_v = vertex_count(numerical.len())?;
    let required = (categorical.len() as u64 + 1).saturating_mul(n_v);
    if required > covered.rows() as u64 {
        return Err(Error::InsufficientData {
            required,
            available: covered.rows(),
        });
    }

    let discard = target == Label::NonAnomalous;
    let mut rules = Vec::new();
    let mut discarded_clusters = Vec::new();
    let mut push_numeric = |group: usize,
                            state: CategoricalState,
                            covered: &Dataset,
                            others: &Dataset,
                            rules: &mut Vec<Rule>|
     -> Result<()> {
        let cm = scaled_matrix(covered, numerical, &encoder.scaling)?;
        let om = scaled_matrix(others, numerical, &encoder.scaling)?;
        let found = extract_numeric_rules(&cm, &om, n_v, cfg, discard)?;
        rules.extend(found.boxes.into_iter().map(|b| Rule {
            state: state.clone(),
            bounds: b.bounds,
            label: target,
            provenance: Provenance {
                group,
                cluster: b.cluster,
                points: b.members.len(),
            },
        }));
        discarded_clusters.extend(found.discarded.into_iter().map(|(cluster, points)| DiscardedCluster {
            group,
            cluster,
            points,
        }));
        Ok(())
    };

    if categorical.is_empty() {
        push_numeric(0, CategoricalState::default(), &covered, &others, &mut rules)?;
    } else {
        let states = unique_categorical_states(&covered, categorical)?;
        for (group, state) in states.into_iter().enumerate() {
            if numerical.is_empty() {
                let points = (0..covered.rows()).filter(|&r| state.matches_row(&covered, r)).count();
                rules.push(Rule {
                    state,
                    bounds: Vec::new(),
                    label: target,
                    provenance: Provenance {
                        group,
                        cluster: 0,
                        points,
                    },
                });
                continue;
            }
            let (c, o) = filter_category(&covered, &others, &state);
            if cfg.strict_min_data && (c.rows() as u64) < n_v {
                return Err(Error::InsufficientData {
                    required: n_v,
                    available: c.rows(),
                });
            }
            push_numeric(group, state, &c, &o, &mut rules)?;
        }
    }

    let raw = RuleSet {
        label: target,
        numerical: numerical.clone(),
        categorical: categorical.to_vec(),
        scaled: true,
        n_v,
        rules,
        discarded_clusters,
    };
    let scaled = if cfg.prune { prune_rules(&raw) } else { raw };
    let mut original = unscale_rules(&scaled, &encoder.scaling)?;
    snap_to_observed(&mut original, d)?;

    let scaled_covered = scaled_dataset(&covered, numerical, &encoder.scaling)?;
    let mut covered_rows = 0;
    for r in 0..covered.rows() {
        if scaled.covers_row(&scaled_covered, r)? {
            covered_rows += 1;
        }
    }
    let summary = ExtractionSummary {
        target_rows: covered.rows(),
        other_rows: others.rows(),
        covered_rows,
        discarded_rows: scaled.discarded_points(),
    };
    Ok(Extraction {
        scaled,
        rules: original,
        summary,
    })
}

fn scaled_matrix(d: &Dataset, numerical: &[String], p: &ScalingParams) -> Result<Matrix> {
    let mut m = d.numerical_matrix(numerical)?;
    let scales = numerical.iter().map(|n| p.get(n)).collect::<Result<Vec<_>>>()?;
    for i in 0..m.rows() {
        for (v, s) in m.row_mut(i).iter_mut().zip(&scales) {
            *v = s.scale(*v);
        }
    }
    Ok(m)
}

fn scaled_dataset(d: &Dataset, numerical: &[String], p: &ScalingParams) -> Result<Dataset> {
    let mut out = d.clone();
    for n in numerical {
        let s = p.get(n)?;
        let values = d.numerical(n)?.iter().map(|&v| s.scale(v)).collect();
        out = out.with_column(crate::dataset::Column::numerical(n.clone(), values))?;
    }
    Ok(out)
}

/// Replaces unscaled endpoints by the observed value they came from when
/// the two differ only by rounding, so that rows on a box face stay inside
/// the box in original units.
fn snap_to_observed(rs: &mut RuleSet, d: &Dataset) -> Result<()> {
    for (j, name) in rs.numerical.iter().enumerate() {
        let mut values = d.numerical(name)?.to_vec();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let (Some(&first), Some(&last)) = (values.first(), values.last()) else {
            continue;
        };
        let tol = 1e-9 * first.abs().max(last.abs()).max(last - first).max(f64::MIN_POSITIVE);
        let snap = |e: f64| {
            let i = values.partition_point(|&v| v < e);
            [i.checked_sub(1), Some(i)]
                .into_iter()
                .flatten()
                .filter_map(|k| values.get(k).copied())
                .min_by(|a, b| (a - e).abs().total_cmp(&(b - e).abs()))
                .filter(|v| (v - e).abs() <= tol)
                .unwrap_or(e)
        };
        for rule in &mut rs.rules {
            let b = &mut rule.bounds[j];
            b.lo = snap(b.lo);
            b.hi = snap(b.hi);
        }
    }
    Ok(())
}
