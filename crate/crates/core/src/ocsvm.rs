//! ν-one-class SVM with an RBF kernel.
//!
//! The dual problem
//!
//! ```text
//! minimize    ½ αᵀQα,   Q_ij = exp(-γ‖x_i − x_j‖²)
//! subject to  0 ≤ α_i ≤ 1/(νn),   Σ α_i = 1
//! ```
//!
//! is solved with two-coordinate updates on the most violating pair. The
//! decision value of a point is `g(x) = Σ α_i K(x_i, x) − ρ`; points with
//! `g(x) ≥ 0` are non-anomalous.

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::matrix::squared_distance;
use crate::{Error, Matrix, Result};

/// Above this many training rows the kernel matrix is not cached and rows
/// are recomputed on demand.
const DENSE_KERNEL_LIMIT: usize = 8192;

/// Curvature floor for the pair update when the two points coincide.
const MIN_CURVATURE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NonAnomalous,
    Anomalous,
}

impl Label {
    pub fn sign(self) -> i8 {
        match self {
            Label::NonAnomalous => 1,
            Label::Anomalous => -1,
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::NonAnomalous => Label::Anomalous,
            Label::Anomalous => Label::NonAnomalous,
        }
    }

    /// Short tag used in file names and reports.
    pub fn tag(self) -> &'static str {
        match self {
            Label::NonAnomalous => "na",
            Label::Anomalous => "a",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::NonAnomalous => "non-anomalous",
            Label::Anomalous => "anomalous",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub gamma: f64,
}

impl KernelParams {
    pub fn rbf(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParameter(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self { gamma })
    }
}

/// `exp(-γ‖x − y‖²)`.
pub fn rbf_kernel(x: &[f64], y: &[f64], gamma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if gamma < 0.0 || gamma.is_nan() {
        return Err(Error::InvalidParameter(format!("gamma must be non-negative, got {gamma}")));
    }
    Ok(rbf(x, y, gamma))
}

#[inline]
fn rbf(x: &[f64], y: &[f64], gamma: f64) -> f64 {
    (-gamma * squared_distance(x, y)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop when the maximal KKT violation drops below this.
    pub tol: f64,
    /// Iteration cap; `None` means `100 · n`.
    pub max_iter: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            max_iter: None,
        }
    }
}

/// Full dual solution over all training points.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub alphas: Vec<f64>,
    pub rho: f64,
    /// `(Qα)_i` for each training point, so `gradient[i] − rho` is the
    /// decision value of point `i`.
    pub gradient: Vec<f64>,
    pub upper_bound: f64,
    pub iterations: usize,
    /// Maximal violating-pair gap at termination.
    pub violation: f64,
}

enum KernelRows<'a> {
    Dense { n: usize, q: Vec<f64> },
    OnDemand { x: &'a Matrix, gamma: f64 },
}

impl<'a> KernelRows<'a> {
    fn new(x: &'a Matrix, gamma: f64) -> Self {
        let n = x.rows();
        if n > DENSE_KERNEL_LIMIT {
            return KernelRows::OnDemand { x, gamma };
        }
        let mut q = vec![0.0; n * n];
        for i in 0..n {
            q[i * n + i] = 1.0;
            for j in 0..i {
                let k = rbf(x.row(i), x.row(j), gamma);
                q[i * n + j] = k;
                q[j * n + i] = k;
            }
        }
        KernelRows::Dense { n, q }
    }

    fn row(&self, i: usize) -> Cow<'_, [f64]> {
        match self {
            KernelRows::Dense { n, q } => Cow::Borrowed(&q[i * n..(i + 1) * n]),
            KernelRows::OnDemand { x, gamma } => {
                let xi = x.row(i);
                Cow::Owned(x.iter_rows().map(|xj| rbf(xi, xj, *gamma)).collect())
            }
        }
    }
}

fn check_problem(x: &Matrix, nu: f64) -> Result<()> {
    let n = x.rows();
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(Error::InvalidParameter(format!("nu must be in (0, 1], got {nu}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "at least 2 training rows required, got {n}"
        )));
    }
    if nu * (n as f64) < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "nu * n = {} < 1; increase nu or the number of rows",
            nu * n as f64
        )));
    }
    if x.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("training data contains non-finite values".into()));
    }
    Ok(())
}

/// Offset from the KKT conditions: the mean gradient over free variables,
/// or the midpoint of the feasible interval when every variable is at a
/// bound.
fn compute_rho(alphas: &[f64], gradient: &[f64], upper: f64) -> f64 {
    let (mut sum, mut free) = (0.0, 0usize);
    let (mut lb, mut ub) = (f64::NEG_INFINITY, f64::INFINITY);
    for (&a, &g) in alphas.iter().zip(gradient) {
        if a <= 0.0 {
            ub = ub.min(g);
        } else if a >= upper {
            lb = lb.max(g);
        } else {
            sum += g;
            free += 1;
        }
    }
    if free > 0 {
        sum / free as f64
    } else if lb.is_finite() && ub.is_finite() {
        0.5 * (lb + ub)
    } else if lb.is_finite() {
        lb
    } else {
        ub
    }
}

/// Solves the one-class dual for the rows of `x`.
pub fn solve_dual(x: &Matrix, nu: f64, kernel: KernelParams, opts: SolverOptions) -> Result<DualSolution> {
    check_problem(x, nu)?;
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    let n = x.rows();
    let upper = 1.0 / (nu * n as f64);
    let max_iter = opts.max_iter.unwrap_or(100 * n);

    // Feasible start: the first ⌊νn⌋ variables at the bound, the remainder
    // of the unit mass on the next one.
    let mut alphas = vec![0.0; n];
    let full = ((nu * n as f64).floor() as usize).min(n);
    alphas[..full].fill(upper);
    if full < n {
        alphas[full] = (1.0 - full as f64 * upper).max(0.0);
    }

    let rows = KernelRows::new(x, kernel.gamma);
    let mut gradient = vec![0.0; n];
    for (i, &a) in alphas.iter().enumerate() {
        if a > 0.0 {
            let qi = rows.row(i);
            for (g, q) in gradient.iter_mut().zip(qi.iter()) {
                *g += a * q;
            }
        }
    }

    let mut iterations = 0;
    let violation = loop {
        // i can grow (α_i < C) with the smallest gradient; j can shrink
        // (α_j > 0) with the largest. Ties go to the lowest index.
        let mut i_up = None;
        let mut j_low = None;
        for k in 0..n {
            if alphas[k] < upper && i_up.is_none_or(|i: usize| gradient[k] < gradient[i]) {
                i_up = Some(k);
            }
            if alphas[k] > 0.0 && j_low.is_none_or(|j: usize| gradient[k] > gradient[j]) {
                j_low = Some(k);
            }
        }
        let (Some(i), Some(j)) = (i_up, j_low) else {
            break 0.0;
        };
        let gap = gradient[j] - gradient[i];
        if gap < opts.tol {
            break gap.max(0.0);
        }
        if iterations >= max_iter {
            let rho = compute_rho(&alphas, &gradient, upper);
            return Err(Error::NotConverged {
                iterations,
                violation: gap,
                alphas,
                rho,
            });
        }
        iterations += 1;

        let qi = rows.row(i);
        let qj = rows.row(j);
        let curvature = (qi[i] + qj[j] - 2.0 * qi[j]).max(MIN_CURVATURE);
        let room_i = upper - alphas[i];
        let room_j = alphas[j];
        let step = (gap / curvature).min(room_i).min(room_j);
        if step == room_i {
            alphas[i] = upper;
        } else {
            alphas[i] += step;
        }
        if step == room_j {
            alphas[j] = 0.0;
        } else {
            alphas[j] -= step;
        }
        for ((g, a), b) in gradient.iter_mut().zip(qi.iter()).zip(qj.iter()) {
            *g += step * (a - b);
        }
    };

    let rho = compute_rho(&alphas, &gradient, upper);
    Ok(DualSolution {
        alphas,
        rho,
        gradient,
        upper_bound: upper,
        iterations,
        violation,
    })
}

/// `½ αᵀQα` evaluated directly from the data.
pub fn dual_objective(x: &Matrix, alphas: &[f64], gamma: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..x.rows() {
        if alphas[i] == 0.0 {
            continue;
        }
        for j in 0..x.rows() {
            total += alphas[i] * alphas[j] * rbf(x.row(i), x.row(j), gamma);
        }
    }
    0.5 * total
}

/// A fitted one-class SVM. Only support vectors (α > 0) are kept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcsvmModel {
    pub support_vectors: Matrix,
    pub alphas: Vec<f64>,
    pub rho: f64,
    pub nu: f64,
    pub kernel: KernelParams,
    pub n_train: usize,
}

impl OcsvmModel {
    pub fn fit(x: &Matrix, nu: f64, kernel: KernelParams, opts: SolverOptions) -> Result<Self> {
        let sol = solve_dual(x, nu, kernel, opts)?;
        let keep: Vec<usize> = (0..x.rows()).filter(|&i| sol.alphas[i] > 0.0).collect();
        Ok(Self {
            support_vectors: x.select_rows(&keep),
            alphas: keep.iter().map(|&i| sol.alphas[i]).collect(),
            rho: sol.rho,
            nu,
            kernel,
            n_train: x.rows(),
        })
    }

    pub fn dim(&self) -> usize {
        self.support_vectors.cols()
    }

    pub fn n_support(&self) -> usize {
        self.alphas.len()
    }

    pub fn decision_function(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let gamma = self.kernel.gamma;
        let s: f64 = self
            .support_vectors
            .iter_rows()
            .zip(&self.alphas)
            .map(|(sv, a)| a * rbf(sv, x, gamma))
            .sum();
        Ok(s - self.rho)
    }

    /// Non-anomalous when the decision value is `≥ 0`.
    pub fn predict(&self, x: &[f64]) -> Result<Label> {
        Ok(label_of(self.decision_function(x)?))
    }

    pub fn predict_all(&self, x: &Matrix) -> Result<Vec<Label>> {
        x.iter_rows().map(|r| self.predict(r)).collect()
    }

    /// Structural checks for models read from files.
    pub fn validate(&self) -> Result<()> {
        if self.alphas.len() != self.support_vectors.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.support_vectors.rows(),
                actual: self.alphas.len(),
            });
        }
        if self.support_vectors.as_slice().len() != self.support_vectors.rows() * self.support_vectors.cols() {
            return Err(Error::InvalidParameter("support vector storage is inconsistent".into()));
        }
        KernelParams::rbf(self.kernel.gamma)?;
        if !(self.nu > 0.0 && self.nu <= 1.0) {
            return Err(Error::InvalidParameter(format!("nu must be in (0, 1], got {}", self.nu)));
        }
        if !self.rho.is_finite()
            || self.alphas.iter().any(|a| !(a.is_finite() && *a >= 0.0))
            || self.support_vectors.as_slice().iter().any(|v| !v.is_finite())
        {
            return Err(Error::InvalidParameter("model contains invalid coefficients".into()));
        }
        Ok(())
    }
}

pub fn label_of(decision: f64) -> Label {
    if decision >= 0.0 {
        Label::NonAnomalous
    } else {
        Label::Anomalous
    }
}

/// Splits `d` into `(anomalous, non_anomalous)` rows using the model's
/// predictions on `features`, whose rows correspond to the rows of `d`.
pub fn split_by_prediction(d: &Dataset, features: &Matrix, m: &OcsvmModel) -> Result<(Dataset, Dataset)> {
    if features.rows() != d.rows() {
        return Err(Error::DimensionMismatch {
            expected: d.rows(),
            actual: features.rows(),
        });
    }
    let labels = m.predict_all(features)?;
    let (mut anomalous, mut normal) = (Vec::new(), Vec::new());
    for (i, l) in labels.iter().enumerate() {
        match l {
            Label::Anomalous => anomalous.push(i),
            Label::NonAnomalous => normal.push(i),
        }
    }
    Ok((d.select_rows(&anomalous), d.select_rows(&normal)))
}
