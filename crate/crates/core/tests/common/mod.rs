#![allow(dead_code)]

use ocsvm_rules::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points from an isotropic 2D Gaussian.
pub fn gaussian_blob(n: usize, centre: [f64; 2], sd: f64, seed: u64) -> Vec<[f64; 2]> {
    let mut r = rng(seed);
    let normal = Normal::new(0.0, sd).unwrap();
    (0..n)
        .map(|_| [centre[0] + normal.sample(&mut r), centre[1] + normal.sample(&mut r)])
        .collect()
}

pub fn matrix(points: &[[f64; 2]]) -> Matrix {
    Matrix::from_rows(points, 2).unwrap()
}

pub fn uniform_points(n: usize, dim: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let data: Vec<f64> = (0..n * dim).map(|_| r.random::<f64>()).collect();
    Matrix::from_vec(n, dim, data).unwrap()
}

/// Euclidean projection onto `{0 ≤ a_i ≤ c, Σ a_i = 1}` by bisection on the
/// shift τ in `a_i = clip(v_i − τ, 0, c)`.
fn project(v: &[f64], c: f64) -> Vec<f64> {
    let mass = |tau: f64| v.iter().map(|x| (x - tau).clamp(0.0, c)).sum::<f64>();
    let mut lo = v.iter().copied().fold(f64::INFINITY, f64::min) - c - 1.0;
    let mut hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let tau = 0.5 * (lo + hi);
    v.iter().map(|x| (x - tau).clamp(0.0, c)).collect()
}

/// Dense Gram matrix computed directly, independent of the library.
pub fn gram(x: &Matrix, gamma: f64) -> Vec<Vec<f64>> {
    (0..x.rows())
        .map(|i| {
            (0..x.rows())
                .map(|j| {
                    let d: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
                    (-gamma * d).exp()
                })
                .collect()
        })
        .collect()
}

pub fn objective(q: &[Vec<f64>], a: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        for j in 0..a.len() {
            s += a[i] * a[j] * q[i][j];
        }
    }
    0.5 * s
}

/// Accelerated projected gradient on the one-class dual. Returns the
/// minimiser and its objective.
pub fn qp_oracle(x: &Matrix, nu: f64, gamma: f64) -> (Vec<f64>, f64) {
    let n = x.rows();
    let c = 1.0 / (nu * n as f64);
    let q = gram(x, gamma);
    let lipschitz: f64 = q
        .iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let step = 1.0 / lipschitz;
    let mut a = project(&vec![1.0 / n as f64; n], c);
    let mut y = a.clone();
    let mut t = 1.0f64;
    for _ in 0..20_000 {
        let grad: Vec<f64> = (0..n).map(|i| (0..n).map(|j| q[i][j] * y[j]).sum()).collect();
        let v: Vec<f64> = y.iter().zip(&grad).map(|(yi, g)| yi - step * g).collect();
        let next = project(&v, c);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = next
            .iter()
            .zip(&a)
            .map(|(n1, a0)| n1 + (t - 1.0) / t_next * (n1 - a0))
            .collect();
        a = next;
        t = t_next;
    }
    let f = objective(&q, &a);
    (a, f)
}

/// Largest KKT residual of a dual solution, with decision values computed
/// from scratch.
pub fn kkt_residual(x: &Matrix, alphas: &[f64], rho: f64, upper: f64, gamma: f64) -> f64 {
    let q = gram(x, gamma);
    let mut worst: f64 = 0.0;
    for i in 0..alphas.len() {
        let g: f64 = (0..alphas.len()).map(|j| alphas[j] * q[i][j]).sum::<f64>() - rho;
        let r = if alphas[i] <= 0.0 {
            (-g).max(0.0)
        } else if alphas[i] >= upper {
            g.max(0.0)
        } else {
            g.abs()
        };
        worst = worst.max(r);
    }
    worst
}
