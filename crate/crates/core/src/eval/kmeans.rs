use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::metrics::Labeling;
use crate::error::{Error, Result};
use crate::tensor::Matrix;

const MAX_LLOYD_ITERS: usize = 300;

/// One Lloyd run.
#[derive(Clone, Debug)]
pub struct KMeansRun {
    pub labeling: Labeling,
    pub centroids: Matrix,
    /// Within-cluster sum of squares after the final iteration.
    pub wcss: f64,
    /// WCSS after every assignment step.
    pub wcss_trace: Vec<f64>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding.
fn seed_centroids(x: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let n = x.rows();
    let mut chosen = vec![rng.random_range(0..n)];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(chosen[0]))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                if d > 0.0 && target < d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            if d2[pick] == 0.0 {
                // rounding ran past the end; take the last positive weight
                pick = (0..n).rev().find(|&i| d2[i] > 0.0).expect("total > 0");
            }
            pick
        } else {
            // every point coincides with a chosen centroid
            rng.random_range(0..n)
        };
        chosen.push(next);
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(x.row(i), x.row(next)));
        }
    }
    Matrix::from_fn(k, x.cols(), |c, j| x.get(chosen[c], j))
}

/// Nearest centroid, ties to the lower index.
fn assign(x: &Matrix, centroids: &Matrix, labels: &mut [usize]) -> (f64, Vec<f64>) {
    let mut wcss = 0.0;
    let mut dist = vec![0.0; x.rows()];
    for i in 0..x.rows() {
        let (best, d) = (0..centroids.rows())
            .map(|c| (c, sq_dist(x.row(i), centroids.row(c))))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        labels[i] = best;
        dist[i] = d;
        wcss += d;
    }
    (wcss, dist)
}

fn lloyd(x: &Matrix, k: usize, rng: &mut ChaCha8Rng) -> Result<KMeansRun> {
    let (n, dim) = (x.rows(), x.cols());
    let mut centroids = seed_centroids(x, k, rng);
    let mut labels = vec![usize::MAX; n];
    let mut wcss_trace = Vec::new();
    for _ in 0..MAX_LLOYD_ITERS {
        let previous = labels.clone();
        let (wcss, dist) = assign(x, &centroids, &mut labels);
        wcss_trace.push(wcss);
        if labels == previous {
            break;
        }
        let mut sums = vec![0.0; k * dim];
        let mut sizes = vec![0usize; k];
        for (i, &l) in labels.iter().enumerate() {
            sizes[l] += 1;
            for (s, v) in sums[l * dim..(l + 1) * dim].iter_mut().zip(x.row(i)) {
                *s += v;
            }
        }
        let mut taken = vec![false; n];
        for c in 0..k {
            if sizes[c] > 0 {
                for j in 0..dim {
                    centroids.set(c, j, sums[c * dim + j] / sizes[c] as f64);
                }
            } else {
                // empty cluster: move it to the worst-served point
                let far = (0..n)
                    .filter(|&i| !taken[i])
                    .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)))
                    .expect("k <= n");
                taken[far] = true;
                for j in 0..dim {
                    centroids.set(c, j, x.get(far, j));
                }
            }
        }
    }
    let wcss = *wcss_trace.last().expect("at least one assignment");
    Ok(KMeansRun {
        labeling: Labeling::new(labels, k)?,
        centroids,
        wcss,
        wcss_trace,
    })
}

/// Every restart of k-means, each seeded from one stream derived from `seed`.
pub fn kmeans_restarts(features: &Matrix, k: usize, seed: u64, restarts: usize) -> Result<Vec<KMeansRun>> {
    if k == 0 || k > features.rows() {
        return Err(Error::InvalidArgument(format!(
            "cluster count {k} must lie in 1..={}",
            features.rows()
        )));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("at least one restart is needed".into()));
    }
    if features.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("features contain non-finite values".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..restarts).map(|_| lloyd(features, k, &mut rng)).collect()
}

/// Best-of-restarts k-means (lowest WCSS, earliest restart on ties).
pub fn kmeans(features: &Matrix, k: usize, seed: u64, restarts: usize) -> Result<KMeansRun> {
    let runs = kmeans_restarts(features, k, seed, restarts)?;
    Ok(runs
        .into_iter()
        .reduce(|best, r| if r.wcss < best.wcss { r } else { best })
        .expect("restarts > 0"))
}
