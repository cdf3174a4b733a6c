//! Surrogate decision tree: an unpruned CART classifier with Gini splits,
//! fitted to the one-class SVM's labels and turned into one rule per leaf.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::FeatureInfo;
use crate::ocsvm::Label;
use crate::{Error, Matrix, Result};

/// Split improvements closer than this are treated as ties.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    /// `x[feature] ≤ threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        label: Label,
        samples: usize,
        purity: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub depth: usize,
    pub nodes: usize,
    pub leaves: usize,
}

impl fmt::Display for TreeStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Depth = {}, Nodes = {}, Leaf nodes = {}",
            self.depth, self.nodes, self.leaves
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: TreeNode,
    pub n_features: usize,
    /// Kept for provenance; split ties are resolved deterministically so the
    /// seed does not influence the fitted tree.
    pub seed: u64,
    pub stats: TreeStats,
}

impl DecisionTree {
    pub fn predict(&self, x: &[f64]) -> Label {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { label, .. } => return *label,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    /// Fraction of rows whose prediction equals the given label.
    pub fn accuracy(&self, x: &Matrix, y: &[Label]) -> f64 {
        if y.is_empty() {
            return 1.0;
        }
        let hits = x.iter_rows().zip(y).filter(|(r, l)| self.predict(r) == **l).count();
        hits as f64 / y.len() as f64
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    pos: usize,
    neg: usize,
}

impl Counts {
    fn add(&mut self, l: Label) {
        match l {
            Label::NonAnomalous => self.pos += 1,
            Label::Anomalous => self.neg += 1,
        }
    }

    fn total(self) -> usize {
        self.pos + self.neg
    }

    fn gini(self) -> f64 {
        let n = self.total() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let (p, q) = (self.pos as f64 / n, self.neg as f64 / n);
        1.0 - p * p - q * q
    }

    /// Majority label, ties to non-anomalous.
    fn majority(self) -> Label {
        if self.pos >= self.neg {
            Label::NonAnomalous
        } else {
            Label::Anomalous
        }
    }
}

/// Grows a CART tree without depth or size limits.
///
/// A node becomes a leaf when it is pure or when no feature takes two
/// distinct values in it; otherwise it is split at the best Gini midpoint
/// threshold (ties: lowest feature, then lowest threshold), even if the
/// improvement is zero.
pub fn fit_tree(x: &Matrix, y: &[Label], seed: u64) -> Result<DecisionTree> {
    if y.is_empty() {
        return Err(Error::Empty("no training rows".into()));
    }
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            actual: x.rows(),
        });
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("features contain non-finite values".into()));
    }
    let mut indices: Vec<usize> = (0..y.len()).collect();
    let root = grow(x, y, &mut indices);
    let stats = stats_of(&root);
    Ok(DecisionTree {
        root,
        n_features: x.cols(),
        seed,
        stats,
    })
}

fn grow(x: &Matrix, y: &[Label], indices: &mut [usize]) -> TreeNode {
    let mut counts = Counts::default();
    for &i in indices.iter() {
        counts.add(y[i]);
    }
    let leaf = || TreeNode::Leaf {
        label: counts.majority(),
        samples: counts.total(),
        purity: counts.pos.max(counts.neg) as f64 / counts.total() as f64,
    };
    if counts.pos == 0 || counts.neg == 0 {
        return leaf();
    }
    let Some((feature, threshold)) = best_split(x, y, indices, counts) else {
        return leaf();
    };
    let split = partition(indices, |&i| x.get(i, feature) <= threshold);
    let (left, right) = indices.split_at_mut(split);
    TreeNode::Split {
        feature,
        threshold,
        left: Box::new(grow(x, y, left)),
        right: Box::new(grow(x, y, right)),
    }
}

fn best_split(x: &Matrix, y: &[Label], indices: &[usize], parent: Counts) -> Option<(usize, f64)> {
    let n = parent.total() as f64;
    let parent_gini = parent.gini();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut order = indices.to_vec();
    for feature in 0..x.cols() {
        order.sort_by(|&a, &b| x.get(a, feature).total_cmp(&x.get(b, feature)).then(a.cmp(&b)));
        let mut left = Counts::default();
        for k in 0..order.len() - 1 {
            left.add(y[order[k]]);
            let (v, next) = (x.get(order[k], feature), x.get(order[k + 1], feature));
            if v == next {
                continue;
            }
            let right = Counts {
                pos: parent.pos - left.pos,
                neg: parent.neg - left.neg,
            };
            let weighted = (left.total() as f64 * left.gini() + right.total() as f64 * right.gini()) / n;
            let decrease = parent_gini - weighted;
            if best.is_none_or(|(d, _, _)| decrease > d + TIE_EPS) {
                let mut threshold = v + (next - v) / 2.0;
                if threshold >= next {
                    threshold = v;
                }
                best = Some((decrease, feature, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

/// Stable in-place partition; returns the number of elements satisfying
/// `pred`, which end up first.
fn partition(v: &mut [usize], pred: impl Fn(&usize) -> bool) -> usize {
    let (yes, no): (Vec<usize>, Vec<usize>) = v.iter().partition(|i| pred(i));
    let k = yes.len();
    v[..k].copy_from_slice(&yes);
    v[k..].copy_from_slice(&no);
    k
}

fn stats_of(node: &TreeNode) -> TreeStats {
    match node {
        TreeNode::Leaf { .. } => TreeStats {
            depth: 0,
            nodes: 1,
            leaves: 1,
        },
        TreeNode::Split { left, right, .. } => {
            let (l, r) = (stats_of(left), stats_of(right));
            TreeStats {
                depth: 1 + l.depth.max(r.depth),
                nodes: 1 + l.nodes + r.nodes,
                leaves: l.leaves + r.leaves,
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    Le,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub feature: usize,
    pub op: Comparison,
    pub threshold: f64,
}

impl Predicate {
    pub fn holds(&self, x: &[f64]) -> bool {
        match self.op {
            Comparison::Le => x[self.feature] <= self.threshold,
            Comparison::Gt => x[self.feature] > self.threshold,
        }
    }

    /// Indicator features render as equalities.
    pub fn render(&self, features: &[FeatureInfo]) -> String {
        match (features.get(self.feature), self.op) {
            (Some(FeatureInfo::Indicator { column, value }), Comparison::Gt) if self.threshold >= 0.0 && self.threshold < 1.0 => {
                format!("{column} = {value}")
            }
            (Some(FeatureInfo::Indicator { column, value }), Comparison::Le) if self.threshold >= 0.0 && self.threshold < 1.0 => {
                format!("{column} ≠ {value}")
            }
            (info, op) => {
                let name = info.map_or_else(|| format!("x{}", self.feature), FeatureInfo::label);
                let sym = match op {
                    Comparison::Le => "≤",
                    Comparison::Gt => ">",
                };
                format!("{name} {sym} {}", self.threshold)
            }
        }
    }
}

/// Path from the root to one leaf.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeRule {
    pub predicates: Vec<Predicate>,
    pub label: Label,
    pub samples: usize,
}

impl TreeRule {
    pub fn matches(&self, x: &[f64]) -> bool {
        self.predicates.iter().all(|p| p.holds(x))
    }

    pub fn render(&self, features: &[FeatureInfo]) -> String {
        let head = match self.label {
            Label::NonAnomalous => "NOT OUTLIER IF",
            Label::Anomalous => "OUTLIER IF",
        };
        if self.predicates.is_empty() {
            return format!("{head} TRUE");
        }
        let body: Vec<String> = self.predicates.iter().map(|p| p.render(features)).collect();
        format!("{head} {}", body.join(" ∧ "))
    }
}

/// One rule per leaf, split into `(non-anomalous, anomalous)` rules.
pub fn tree_to_rules(t: &DecisionTree) -> (Vec<TreeRule>, Vec<TreeRule>) {
    let mut out = (Vec::new(), Vec::new());
    let mut path = Vec::new();
    walk(&t.root, &mut path, &mut out);
    out
}

fn walk(node: &TreeNode, path: &mut Vec<Predicate>, out: &mut (Vec<TreeRule>, Vec<TreeRule>)) {
    match node {
        TreeNode::Leaf { label, samples, .. } => {
            let rule = TreeRule {
                predicates: path.clone(),
                label: *label,
                samples: *samples,
            };
            match label {
                Label::NonAnomalous => out.0.push(rule),
                Label::Anomalous => out.1.push(rule),
            }
        }
        TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        } => {
            for (op, child) in [(Comparison::Le, left), (Comparison::Gt, right)] {
                path.push(Predicate {
                    feature: *feature,
                    op,
                    threshold: *threshold,
                });
                walk(child, path, out);
                path.pop();
            }
        }
    }
}
