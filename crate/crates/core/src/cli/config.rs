//! Run configuration: defaults, then an optional `key = value` file, then flags.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::GraphMode;
use crate::solver::{SolverConfig, Variant};

/// Everything a `decompose` or `cluster` run needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub ranks: Vec<usize>,
    pub tucker_ranks: Option<Vec<usize>>,
    pub beta: f64,
    pub k: usize,
    pub t_max: usize,
    pub sweeps: usize,
    pub tol: f64,
    pub epsilon: f64,
    pub graph_mode: GraphMode,
    pub seed: u64,
    pub repetitions: usize,
    pub restarts: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            ranks: Vec::new(),
            tucker_ranks: None,
            beta: s.beta,
            k: s.k_neighbors,
            t_max: s.inner_iters,
            sweeps: s.outer_sweeps,
            tol: s.tol,
            epsilon: s.epsilon,
            graph_mode: s.graph_mode,
            seed: s.seed,
            repetitions: 10,
            restarts: 10,
        }
    }
}

/// Comma-separated positive integers; a single value is accepted as well.
pub fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split([',', 'x'])
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::InvalidArgument(format!("bad list entry {p:?} in {s:?}")))
        })
        .collect()
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value {value:?} for {key}")))
}

impl RunConfig {
    /// Sets one key. Dashes and underscores are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().replace('-', "_").as_str() {
            "ranks" | "tr_ranks" => self.ranks = parse_list(value)?,
            "tucker_ranks" => {
                self.tucker_ranks = match value {
                    "" | "none" => None,
                    v => Some(parse_list(v)?),
                }
            }
            "beta" => self.beta = parse("beta", value)?,
            "k" | "k_neighbors" => self.k = parse("k", value)?,
            "t_max" | "inner_iters" => self.t_max = parse("t_max", value)?,
            "sweeps" | "outer_sweeps" => self.sweeps = parse("sweeps", value)?,
            "tol" => self.tol = parse("tol", value)?,
            "epsilon" | "eps" => self.epsilon = parse("epsilon", value)?,
            "graph_mode" => self.graph_mode = value.parse()?,
            "seed" => self.seed = parse("seed", value)?,
            "repetitions" => self.repetitions = parse("repetitions", value)?,
            "restarts" => self.restarts = parse("restarts", value)?,
            other => return Err(Error::InvalidArgument(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("config line {}: expected key = value, got {raw:?}", i + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    /// Solver settings for one run with the given seed.
    pub fn solver(&self, seed: u64) -> SolverConfig {
        SolverConfig {
            tr_ranks: self.ranks.clone(),
            beta: self.beta,
            k_neighbors: self.k,
            inner_iters: self.t_max,
            outer_sweeps: self.sweeps,
            tol: self.tol,
            variant: match &self.tucker_ranks {
                Some(r) => Variant::Lra { tucker_ranks: r.clone() },
                None => Variant::Exact,
            },
            graph_mode: self.graph_mode,
            epsilon: self.epsilon,
            seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!((c.beta, c.k, c.t_max, c.tol, c.epsilon, c.repetitions), (0.1, 5, 20, 1e-6, 1e-12, 10));
    }

    #[test]
    fn file_then_override() {
        let mut c = RunConfig::default();
        c.apply_text("# comment\nranks = 3,3,3\nbeta=0.5\n\ntucker-ranks = 4x4x4 # inline\n")
            .unwrap();
        c.set("beta", "0.25").unwrap();
        assert_eq!(c.ranks, vec![3, 3, 3]);
        assert_eq!(c.beta, 0.25);
        assert_eq!(c.tucker_ranks, Some(vec![4, 4, 4]));
        assert!(matches!(c.solver(7).variant, Variant::Lra { .. }));
        assert_eq!(c.solver(7).seed, 7);
    }

    #[test]
    fn rejects_garbage() {
        let mut c = RunConfig::default();
        assert!(c.set("colour", "blue").is_err());
        assert!(c.set("k", "-1").is_err());
        assert!(c.set("ranks", "2,0").is_err());
        assert!(c.apply_text("beta 0.1").is_err());
    }
}
