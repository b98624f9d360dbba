use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::GraphMode;

/// How the data-fit numerator `X_[n] G^{≠n}_[2]` is formed.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Variant {
    /// Uses the data tensor directly.
    #[default]
    Exact,
    /// Replaces the data by its truncated HOSVD at the given multilinear ranks.
    Lra { tucker_ranks: Vec<usize> },
}

/// Solver parameters. Defaults follow the usual operating point
/// (β = 0.1, k = 5, 20 inner iterations).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Ring ranks `[R₁..R_N]`; `tr_ranks[n]` is the left rank of core `n`.
    pub tr_ranks: Vec<usize>,
    /// Weight of the manifold regularizer on the sample core.
    pub beta: f64,
    /// Neighbour count for the graph construction.
    pub k_neighbors: usize,
    /// Multiplicative updates per core per sweep.
    pub inner_iters: usize,
    /// Maximum passes over all cores.
    pub outer_sweeps: usize,
    /// Stop when the relative objective change of a sweep drops below this.
    pub tol: f64,
    pub variant: Variant,
    pub graph_mode: GraphMode,
    /// Added to every denominator.
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tr_ranks: Vec::new(),
            beta: 0.1,
            k_neighbors: 5,
            inner_iters: 20,
            outer_sweeps: 200,
            tol: 1e-6,
            variant: Variant::Exact,
            graph_mode: GraphMode::Hypergraph,
            epsilon: 1e-12,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn new(tr_ranks: Vec<usize>) -> Self {
        Self {
            tr_ranks,
            ..Self::default()
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k_neighbors = k;
        self
    }

    pub fn with_inner_iters(mut self, t: usize) -> Self {
        self.inner_iters = t;
        self
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.outer_sweeps = sweeps;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_lra(self, tucker_ranks: Vec<usize>) -> Self {
        self.with_variant(Variant::Lra { tucker_ranks })
    }

    pub fn with_graph_mode(mut self, mode: GraphMode) -> Self {
        self.graph_mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// Whether a regularizer is attached at all.
    pub fn regularized(&self) -> bool {
        self.beta > 0.0 && self.graph_mode != GraphMode::None
    }

    pub fn validate(&self, order: usize) -> Result<()> {
        if self.tr_ranks.len() != order {
            return Err(Error::Rank(format!(
                "{} ring ranks for a tensor of order {order}",
                self.tr_ranks.len()
            )));
        }
        if order < 2 {
            return Err(Error::InvalidArgument(
                "tensor-ring factorization needs at least two modes".into(),
            ));
        }
        if self.tr_ranks.contains(&0) {
            return Err(Error::InvalidArgument("ring ranks must be positive".into()));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.k_neighbors == 0 || self.inner_iters == 0 || self.outer_sweeps == 0 {
            return Err(Error::InvalidArgument(
                "k_neighbors, inner_iters and outer_sweeps must be positive".into(),
            ));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!("tol must be >= 0, got {}", self.tol)));
        }
        if let Variant::Lra { tucker_ranks } = &self.variant {
            if tucker_ranks.len() != order {
                return Err(Error::Rank(format!(
                    "{} Tucker ranks for a tensor of order {order}",
                    tucker_ranks.len()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let c = SolverConfig::new(vec![2, 2, 2]);
        assert!(c.validate(3).is_ok());
        assert!(c.validate(2).is_err());
        assert!(c.clone().with_beta(-1.0).validate(3).is_err());
        assert!(c.clone().with_epsilon(0.0).validate(3).is_err());
        assert!(c.clone().with_inner_iters(0).validate(3).is_err());
        assert!(c.clone().with_lra(vec![1, 1]).validate(3).is_err());
        assert!(SolverConfig::new(vec![0, 2, 2]).validate(3).is_err());
    }

    #[test]
    fn regularizer_switch() {
        let c = SolverConfig::new(vec![1, 1]);
        assert!(c.regularized());
        assert!(!c.clone().with_beta(0.0).regularized());
        assert!(!c.with_graph_mode(GraphMode::None).regularized());
    }

    #[test]
    fn serde_round_trip() {
        let c = SolverConfig::new(vec![3, 3]).with_lra(vec![4, 5]);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"kind\":\"lra\""));
        let back: SolverConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
