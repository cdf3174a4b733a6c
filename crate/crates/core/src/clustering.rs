//! K-means with k-means++ seeding and Lloyd iterations.
//!
//! Everything is deterministic for a given seed: restart `r` draws from a
//! ChaCha generator seeded with `seed + r`, assignment ties go to the lowest
//! cluster index, and the best restart is the one with the lowest inertia
//! (ties to the earliest restart).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::matrix::squared_distance;
use crate::{Error, Matrix, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KMeansOptions {
    pub max_iter: usize,
    pub n_init: usize,
    pub seed: u64,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            n_init: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub labels: Vec<usize>,
    pub centroids: Matrix,
    pub inertia: f64,
    pub seed: u64,
}

impl Clustering {
    /// Row indices assigned to cluster `idx`, in original order.
    pub fn members(&self, idx: usize) -> Result<Vec<usize>> {
        if idx >= self.k {
            return Err(Error::InvalidParameter(format!(
                "cluster index {idx} out of range for k = {}",
                self.k
            )));
        }
        Ok(self
            .labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == idx)
            .map(|(i, _)| i)
            .collect())
    }

    pub fn centroid(&self, idx: usize) -> &[f64] {
        self.centroids.row(idx)
    }
}

/// Rows of `x` that belong to cluster `idx`.
pub fn points_in_cluster(c: &Clustering, x: &Matrix, idx: usize) -> Result<Matrix> {
    if x.rows() != c.labels.len() {
        return Err(Error::DimensionMismatch {
            expected: c.labels.len(),
            actual: x.rows(),
        });
    }
    Ok(x.select_rows(&c.members(idx)?))
}

/// Best of `n_init` k-means++ runs.
pub fn kmeans_pp(x: &Matrix, k: usize, opts: KMeansOptions) -> Result<Clustering> {
    if x.is_empty() {
        return Err(Error::Empty("no rows to cluster".into()));
    }
    if k == 0 || k > x.rows() {
        return Err(Error::InvalidParameter(format!(
            "k must be in [1, {}], got {k}",
            x.rows()
        )));
    }
    let mut best: Option<Clustering> = None;
    for r in 0..opts.n_init.max(1) {
        let seed = opts.seed.wrapping_add(r as u64);
        let run = lloyd(x, seed_centroids(x, k, seed), opts.max_iter, seed);
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// D² sampling: the first centre uniformly, each further one with
/// probability proportional to the squared distance to the nearest chosen
/// centre.
fn seed_centroids(x: &Matrix, k: usize, seed: u64) -> Matrix {
    let n = x.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = Vec::with_capacity(k);
    chosen.push(rng.random_range(0..n));
    let mut d2: Vec<f64> = x
        .iter_rows()
        .map(|r| squared_distance(r, x.row(chosen[0])))
        .collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if d > 0.0 && acc > target {
                    pick = Some(i);
                    break;
                }
            }
            // Rounding can leave `target` just above the accumulated sum.
            pick.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("total > 0"))
        } else {
            // All remaining points coincide with a centre.
            (0..n).find(|i| !chosen.contains(i)).expect("k <= n")
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(squared_distance(x.row(i), x.row(next)));
        }
    }
    x.select_rows(&chosen)
}

fn assign(x: &Matrix, centroids: &Matrix, labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (i, row) in x.iter_rows().enumerate() {
        let mut best = (0, f64::INFINITY);
        for (c, centre) in centroids.iter_rows().enumerate() {
            let d = squared_distance(row, centre);
            if d < best.1 {
                best = (c, d);
            }
        }
        labels[i] = best.0;
        inertia += best.1;
    }
    inertia
}

/// Recomputes centroids as cluster means. Empty clusters are respawned at
/// the point farthest from its current centroid.
fn update(x: &Matrix, labels: &[usize], centroids: &mut Matrix) {
    let k = centroids.rows();
    let dim = x.cols();
    let mut sums = Matrix::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (row, &l) in x.iter_rows().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums.row_mut(l).iter_mut().zip(row) {
            *s += v;
        }
    }
    let mut cost: Vec<f64> = x
        .iter_rows()
        .zip(labels)
        .map(|(row, &l)| squared_distance(row, centroids.row(l)))
        .collect();
    for c in 0..k {
        if counts[c] == 0 {
            let mut far = 0;
            for i in 1..cost.len() {
                if cost[i] > cost[far] {
                    far = i;
                }
            }
            centroids.row_mut(c).copy_from_slice(x.row(far));
            cost[far] = 0.0;
        } else {
            let n = counts[c] as f64;
            for (dst, s) in centroids.row_mut(c).iter_mut().zip(sums.row(c)) {
                *dst = s / n;
            }
        }
    }
}

fn lloyd(x: &Matrix, mut centroids: Matrix, max_iter: usize, seed: u64) -> Clustering {
    let mut labels = vec![0; x.rows()];
    let mut inertia = assign(x, &centroids, &mut labels);
    let mut next = labels.clone();
    for _ in 0..max_iter {
        update(x, &labels, &mut centroids);
        let new_inertia = assign(x, &centroids, &mut next);
        debug_assert!(
            new_inertia <= inertia * (1.0 + 1e-9) + 1e-12,
            "Lloyd step increased inertia: {inertia} -> {new_inertia}"
        );
        inertia = new_inertia;
        if next == labels {
            break;
        }
        std::mem::swap(&mut labels, &mut next);
    }
    Clustering {
        k: centroids.rows(),
        labels,
        centroids,
        inertia,
        seed,
    }
}
