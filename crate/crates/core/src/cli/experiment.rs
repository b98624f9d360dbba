//! Experiment drivers and the JSON record they produce.

use std::io::Write;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};
use crate::eval::{kmeans_restarts, Labeling, Metrics};
use crate::solver::{solve, PhaseTimes, SolveResult};
use crate::tensor::DenseTensor;

/// One solve, plus k-means scores when labels were given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Repetition {
    pub seed: u64,
    pub sweeps_run: usize,
    pub converged: bool,
    pub final_objective: f64,
    pub final_fit: f64,
    /// Scores of the lowest-WCSS k-means restart.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_of_restarts: Option<Metrics>,
    /// Scores averaged over all k-means restarts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_of_restarts: Option<Metrics>,
    pub phase_seconds: PhaseTimes,
    #[serde(default)]
    pub kmeans_seconds: f64,
    pub objective_trace: Vec<f64>,
    pub fit_trace: Vec<f64>,
}

/// Mean and sample standard deviation (the latter only with two or more
/// repetitions).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: Metrics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<Metrics>,
}

impl MetricStats {
    pub fn from_samples(samples: &[Metrics]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let n = samples.len() as f64;
        let mean = Metrics {
            acc: samples.iter().map(|m| m.acc).sum::<f64>() / n,
            nmi: samples.iter().map(|m| m.nmi).sum::<f64>() / n,
            pur: samples.iter().map(|m| m.pur).sum::<f64>() / n,
        };
        let std = (samples.len() >= 2).then(|| {
            let sd = |f: fn(&Metrics) -> f64, mu: f64| {
                (samples.iter().map(|m| (f(m) - mu).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            };
            Metrics {
                acc: sd(|m| m.acc, mean.acc),
                nmi: sd(|m| m.nmi, mean.nmi),
                pur: sd(|m| m.pur, mean.pur),
            }
        });
        Some(Self { mean, std })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub config: RunConfig,
    pub seed: u64,
    pub input_shape: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_clusters: Option<usize>,
    pub repetitions: Vec<Repetition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_of_restarts: Option<MetricStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_of_restarts: Option<MetricStats>,
    /// Phase times summed over repetitions.
    pub phase_seconds: PhaseTimes,
    pub wall_seconds: f64,
    /// Traces of a single-run command; per-repetition traces live in
    /// `repetitions`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objective_trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fit_trace: Vec<f64>,
}

impl ExperimentRecord {
    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }
}

fn repetition(result: &SolveResult) -> Repetition {
    Repetition {
        seed: result.seed,
        sweeps_run: result.sweeps_run,
        converged: result.converged,
        final_objective: result.final_objective(),
        final_fit: result.final_fit(),
        best_of_restarts: None,
        mean_of_restarts: None,
        phase_seconds: result.times.clone(),
        kmeans_seconds: 0.0,
        objective_trace: result.objective_trace.clone(),
        fit_trace: result.fit_trace.clone(),
    }
}

fn sum_times(reps: &[Repetition]) -> PhaseTimes {
    let mut t = PhaseTimes::default();
    for r in reps {
        t.graph_build += r.phase_seconds.graph_build;
        t.lra += r.phase_seconds.lra;
        t.updates += r.phase_seconds.updates;
        t.evaluation += r.phase_seconds.evaluation;
    }
    t
}

/// Clamps negative entries to zero. Returns how many were changed.
pub fn truncate_negatives(x: &mut DenseTensor) -> usize {
    let mut changed = 0;
    for v in x.data_mut() {
        if *v < 0.0 {
            *v = 0.0;
            changed += 1;
        }
    }
    changed
}

/// A single factorization with `config.seed`.
pub fn decompose(x: &DenseTensor, config: &RunConfig) -> Result<(SolveResult, ExperimentRecord)> {
    let start = Instant::now();
    let result = solve(x, &config.solver(config.seed))?;
    let rep = repetition(&result);
    let record = ExperimentRecord {
        command: "decompose".into(),
        config: config.clone(),
        seed: config.seed,
        input_shape: x.shape().to_vec(),
        n_clusters: None,
        phase_seconds: rep.phase_seconds.clone(),
        repetitions: vec![rep],
        best_of_restarts: None,
        mean_of_restarts: None,
        wall_seconds: start.elapsed().as_secs_f64(),
        objective_trace: result.objective_trace.clone(),
        fit_trace: result.fit_trace.clone(),
    };
    Ok((result, record))
}

/// Repetition `r` factorizes with seed `config.seed + r`, then clusters the
/// sample-core features into as many groups as `labels` has classes.
/// Repetitions run in parallel.
pub fn cluster(x: &DenseTensor, labels: &Labeling, config: &RunConfig) -> Result<ExperimentRecord> {
    let n_samples = *x.shape().last().expect("tensor has at least one mode");
    if labels.len() != n_samples {
        return Err(Error::Shape(format!(
            "{} labels for {n_samples} samples on the last mode",
            labels.len()
        )));
    }
    if config.repetitions == 0 {
        return Err(Error::InvalidArgument("repetitions must be positive".into()));
    }
    let start = Instant::now();
    let k = labels.n_clusters();
    let reps: Vec<Repetition> = (0..config.repetitions as u64)
        .into_par_iter()
        .map(|r| {
            let seed = config.seed.wrapping_add(r);
            let result = solve(x, &config.solver(seed))?;
            let mut rep = repetition(&result);
            let t = Instant::now();
            let runs = kmeans_restarts(&result.feature_matrix(), k, seed, config.restarts)?;
            let scores = runs
                .iter()
                .map(|run| Metrics::compute(labels, &run.labeling))
                .collect::<Result<Vec<_>>>()?;
            let best = runs
                .iter()
                .enumerate()
                .fold(0, |b, (i, run)| if run.wcss < runs[b].wcss { i } else { b });
            rep.best_of_restarts = Some(scores[best]);
            rep.mean_of_restarts = MetricStats::from_samples(&scores).map(|s| s.mean);
            rep.kmeans_seconds = t.elapsed().as_secs_f64();
            Ok(rep)
        })
        .collect::<Result<_>>()?;
    let best: Vec<Metrics> = reps.iter().filter_map(|r| r.best_of_restarts).collect();
    let mean: Vec<Metrics> = reps.iter().filter_map(|r| r.mean_of_restarts).collect();
    Ok(ExperimentRecord {
        command: "cluster".into(),
        config: config.clone(),
        seed: config.seed,
        input_shape: x.shape().to_vec(),
        n_clusters: Some(k),
        phase_seconds: sum_times(&reps),
        best_of_restarts: MetricStats::from_samples(&best),
        mean_of_restarts: MetricStats::from_samples(&mean),
        repetitions: reps,
        wall_seconds: start.elapsed().as_secs_f64(),
        objective_trace: Vec::new(),
        fit_trace: Vec::new(),
    })
}

/// Per-sweep update time of both solvers on a uniform random cube of side `size`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub elements: usize,
    pub exact_seconds_per_sweep: f64,
    pub lra_seconds_per_sweep: f64,
    pub lra_setup_seconds: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct BenchSpec {
    pub sizes: Vec<usize>,
    pub order: usize,
    pub rank: usize,
    pub tucker_rank: usize,
    pub sweeps: usize,
    pub seed: u64,
}

/// Rows come out in strictly increasing size; `sizes` may be given in any
/// order but must not repeat.
pub fn bench(spec: &BenchSpec) -> Result<Vec<BenchRow>> {
    let mut sizes = spec.sizes.clone();
    sizes.sort_unstable();
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] == w[1]) || sizes[0] < 2 {
        return Err(Error::InvalidArgument(format!(
            "bench sizes must be distinct integers >= 2, got {:?}",
            spec.sizes
        )));
    }
    if spec.order < 2 || spec.sweeps == 0 {
        return Err(Error::InvalidArgument("bench needs order >= 2 and sweeps >= 1".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for size in sizes {
        let shape = vec![size; spec.order];
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ size as u64);
        let x = DenseTensor::random_uniform(&shape, &mut rng);
        let run = RunConfig {
            ranks: vec![spec.rank; spec.order],
            k: RunConfig::default().k.min(size - 1),
            sweeps: spec.sweeps,
            tol: 0.0,
            seed: spec.seed,
            ..RunConfig::default()
        };
        let exact = solve(&x, &run.solver(spec.seed))?;
        let lra_run = RunConfig {
            tucker_ranks: Some(vec![spec.tucker_rank.min(size); spec.order]),
            ..run
        };
        let lra = solve(&x, &lra_run.solver(spec.seed))?;
        let per = |r: &SolveResult| r.sweep_update_seconds.iter().sum::<f64>() / r.sweep_update_seconds.len() as f64;
        let (te, tl) = (per(&exact), per(&lra));
        rows.push(BenchRow {
            size,
            elements: x.len(),
            exact_seconds_per_sweep: te,
            lra_seconds_per_sweep: tl,
            lra_setup_seconds: lra.times.lra,
            ratio: tl / te,
        });
    }
    Ok(rows)
}

pub fn write_bench_csv<W: Write>(w: W, rows: &[BenchRow]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
