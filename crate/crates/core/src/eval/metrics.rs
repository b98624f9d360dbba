use pathfinding::kuhn_munkres::kuhn_munkres;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cluster assignment with ids in `0..n_clusters`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labeling {
    labels: Vec<usize>,
    n_clusters: usize,
}

impl Labeling {
    pub fn new(labels: Vec<usize>, n_clusters: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= n_clusters) {
            return Err(Error::InvalidArgument(format!(
                "label {bad} outside 0..{n_clusters}"
            )));
        }
        Ok(Self { labels, n_clusters })
    }

    /// Maps arbitrary ids onto `0..k` in ascending id order.
    pub fn from_ids<T: Ord + Clone>(ids: &[T]) -> Self {
        let mut distinct: Vec<T> = ids.to_vec();
        distinct.sort();
        distinct.dedup();
        let labels = ids
            .iter()
            .map(|v| distinct.binary_search(v).expect("present"))
            .collect();
        Self {
            labels,
            n_clusters: distinct.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_clusters(&self) -> usize {
        self.n_clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// ACC, NMI and purity of one clustering.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub acc: f64,
    pub nmi: f64,
    pub pur: f64,
}

impl Metrics {
    pub fn compute(truth: &Labeling, pred: &Labeling) -> Result<Self> {
        Ok(Self {
            acc: accuracy(truth, pred)?,
            nmi: nmi(truth, pred)?,
            pur: purity(truth, pred)?,
        })
    }
}

/// `counts[t][p]`: samples with truth `t` and prediction `p`.
fn contingency(truth: &Labeling, pred: &Labeling) -> Result<Vec<Vec<usize>>> {
    if truth.len() != pred.len() {
        return Err(Error::Shape(format!(
            "labelings have lengths {} and {}",
            truth.len(),
            pred.len()
        )));
    }
    if truth.is_empty() {
        return Err(Error::InvalidArgument("labelings are empty".into()));
    }
    let mut counts = vec![vec![0usize; pred.n_clusters()]; truth.n_clusters()];
    for (&t, &p) in truth.labels().iter().zip(pred.labels()) {
        counts[t][p] += 1;
    }
    Ok(counts)
}

/// Fraction of samples matched under the best one-to-one map from predicted
/// to true labels.
pub fn accuracy(truth: &Labeling, pred: &Labeling) -> Result<f64> {
    let counts = contingency(truth, pred)?;
    let size = truth.n_clusters().max(pred.n_clusters());
    let mut weights = pathfinding::matrix::Matrix::new(size, size, 0i64);
    for (t, row) in counts.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            weights[(p, t)] = c as i64;
        }
    }
    let (matched, _) = kuhn_munkres(&weights);
    Ok(matched as f64 / truth.len() as f64)
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Base-2 mutual information normalized by the larger of the two entropies.
pub fn nmi(truth: &Labeling, pred: &Labeling) -> Result<f64> {
    let counts = contingency(truth, pred)?;
    let n = truth.len() as f64;
    let row_sums: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<usize> = (0..pred.n_clusters())
        .map(|p| counts.iter().map(|r| r[p]).sum())
        .collect();
    let h_truth = entropy(row_sums.iter().copied(), n);
    let h_pred = entropy(col_sums.iter().copied(), n);
    let h_max = h_truth.max(h_pred);
    if h_max == 0.0 {
        // a single cluster on both sides: identical trivial partitions
        return Ok(1.0);
    }
    let nonzero_rows = counts.iter().filter(|r| r.iter().any(|&c| c > 0));
    let one_to_one = nonzero_rows.clone().count() == col_sums.iter().filter(|&&c| c > 0).count()
        && nonzero_rows.clone().all(|r| r.iter().filter(|&&c| c > 0).count() == 1);
    if one_to_one {
        // same partition up to relabeling: MI equals both entropies
        return Ok(1.0);
    }
    let mut mi = 0.0;
    for (t, row) in counts.iter().enumerate() {
        for (p, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let joint = c as f64 / n;
            mi += joint * (c as f64 * n / (row_sums[t] as f64 * col_sums[p] as f64)).log2();
        }
    }
    Ok((mi / h_max).clamp(0.0, 1.0))
}

/// `Σᵢ max_h nᵢʰ / n` over predicted clusters.
pub fn purity(truth: &Labeling, pred: &Labeling) -> Result<f64> {
    let counts = contingency(truth, pred)?;
    let majority: usize = (0..pred.n_clusters())
        .map(|p| counts.iter().map(|r| r[p]).max().unwrap_or(0))
        .sum();
    Ok(majority as f64 / truth.len() as f64)
}
