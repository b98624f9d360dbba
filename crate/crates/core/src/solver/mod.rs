//! Multiplicative-update solvers for hypergraph-regularized nonnegative
//! tensor-ring factorization.
//!
//! Each sweep visits cores `0..N` in order. For core `n` the fit numerator
//! is formed once (from the data or from its Tucker surrogate), the sub-chain
//! Gram is obtained by self-contraction, and `inner_iters` multiplicative
//! steps are applied. Only the last core, whose rows are the samples,
//! carries the regularizer.

mod config;
mod update;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use config::{SolverConfig, Variant};
pub use update::{
    exact_numerator, low_rank_numerator, mur_step, mur_update_inner, objective,
    projected_cores, DataTerm, Regularizer,
};

use crate::error::{Error, Result};
use crate::hypergraph::{samples_from_tensor, GraphMode, Hypergraph};
use crate::lra::{hosvd_truncate, TuckerApprox};
use crate::tensor::{unfold_tr, DenseTensor, Matrix, TRCores};
use update::{clamp_nonnegative, objective_parts, project_core};

/// Wall-clock seconds spent in each phase of a solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub graph_build: f64,
    pub lra: f64,
    pub updates: f64,
    pub evaluation: f64,
}

/// Output of a solve. Trace index 0 holds the initial state, index `s` the
/// state after sweep `s`.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub cores: TRCores,
    pub objective_trace: Vec<f64>,
    /// `‖X − TR(cores)‖_F / ‖X‖_F`.
    pub fit_trace: Vec<f64>,
    /// Seconds since the start of the solve at each trace point.
    pub elapsed: Vec<f64>,
    /// Update-phase seconds of each sweep (excludes objective evaluation).
    pub sweep_update_seconds: Vec<f64>,
    pub sweeps_run: usize,
    pub converged: bool,
    pub seed: u64,
    pub times: PhaseTimes,
}

impl SolveResult {
    /// Rows are samples: the mode-2 unfolding of the last core.
    pub fn feature_matrix(&self) -> Matrix {
        feature_matrix(&self.cores)
    }

    pub fn final_fit(&self) -> f64 {
        *self.fit_trace.last().expect("trace has the initial entry")
    }

    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace has the initial entry")
    }
}

/// `G⁽ᴺ⁾₍₂₎`: `I_N × R_N R_1`, one row per sample.
pub fn feature_matrix(cores: &TRCores) -> Matrix {
    cores.core_unfold2(cores.order() - 1)
}

/// One multiplicative step as seen by an [`Observer`].
#[derive(Debug)]
pub struct InnerStep<'a> {
    /// 1-based sweep number.
    pub sweep: usize,
    pub core: usize,
    /// 0-based inner iteration.
    pub iter: usize,
    /// Full numerator used by the step.
    pub numerator: &'a Matrix,
    /// `G⁽ⁿ⁾₍₂₎` after the step.
    pub factor: &'a Matrix,
}

/// Hook called after every inner iteration.
pub trait Observer {
    fn inner_step(&mut self, step: &InnerStep<'_>);
}

/// Observer that does nothing.
pub struct NoObserver;

impl Observer for NoObserver {
    fn inner_step(&mut self, _: &InnerStep<'_>) {}
}

impl<F: FnMut(&InnerStep<'_>)> Observer for F {
    fn inner_step(&mut self, step: &InnerStep<'_>) {
        self(step)
    }
}

/// Solves with the variant selected in `config`.
pub fn solve(x: &DenseTensor, config: &SolverConfig) -> Result<SolveResult> {
    solve_with(x, config, None, &mut NoObserver)
}

/// Exact solver regardless of `config.variant`.
pub fn solve_hgntr(x: &DenseTensor, config: &SolverConfig) -> Result<SolveResult> {
    let config = config.clone().with_variant(Variant::Exact);
    solve_with(x, &config, None, &mut NoObserver)
}

/// Low-rank accelerated solver; `config.variant` must carry Tucker ranks.
pub fn solve_lra_hgntr(x: &DenseTensor, config: &SolverConfig) -> Result<SolveResult> {
    if config.variant == Variant::Exact {
        return Err(Error::InvalidArgument(
            "the low-rank solver needs Tucker ranks in the config".into(),
        ));
    }
    solve_with(x, config, None, &mut NoObserver)
}

fn check_nonnegative(x: &DenseTensor) -> Result<()> {
    let mut negatives = x.data().iter().enumerate().filter(|(_, &v)| v < 0.0);
    if let Some((first, _)) = negatives.next() {
        return Err(Error::NegativeInput {
            count: 1 + negatives.count(),
            first,
        });
    }
    if !x.is_finite() {
        return Err(Error::InvalidArgument("data tensor has non-finite entries".into()));
    }
    Ok(())
}

/// Builds the regularizer for `config` from the rows of `X_[N]`, or `None`
/// when it is switched off.
pub fn build_regularizer(x: &DenseTensor, config: &SolverConfig) -> Result<Option<Regularizer>> {
    if !config.regularized() {
        return Ok(None);
    }
    let samples = samples_from_tensor(x)?;
    let graph = match config.graph_mode {
        GraphMode::Hypergraph => Hypergraph::knn(&samples, config.k_neighbors)?,
        GraphMode::PairwiseGraph => Hypergraph::pairwise_knn(&samples, config.k_neighbors)?,
        GraphMode::None => return Ok(None),
    };
    Ok(Some(Regularizer::from_graph(&graph)))
}

enum FitSource {
    Exact(Vec<Matrix>),
    LowRank {
        tucker: TuckerApprox,
        core_unfoldings: Vec<Matrix>,
        projected: TRCores,
    },
}

/// Full solver entry point: optional initial cores (otherwise uniform(0,1)
/// from `config.seed`) and an observer for every inner iteration.
pub fn solve_with(
    x: &DenseTensor,
    config: &SolverConfig,
    init: Option<TRCores>,
    observer: &mut dyn Observer,
) -> Result<SolveResult> {
    let start = Instant::now();
    let order = x.order();
    config.validate(order)?;
    check_nonnegative(x)?;

    let mut times = PhaseTimes::default();
    let phase = Instant::now();
    let reg = build_regularizer(x, config)?;
    times.graph_build = phase.elapsed().as_secs_f64();

    let mut cores = match init {
        Some(c) => {
            if c.shape() != x.shape() || c.ranks() != config.tr_ranks {
                return Err(Error::Shape(format!(
                    "initial cores describe {:?} at ranks {:?}, expected {:?} at {:?}",
                    c.shape(),
                    c.ranks(),
                    x.shape(),
                    config.tr_ranks
                )));
            }
            c
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            TRCores::random_uniform(x.shape(), &config.tr_ranks, &mut rng)?
        }
    };

    let phase = Instant::now();
    let mut source = match &config.variant {
        Variant::Exact => FitSource::Exact(
            (0..order)
                .map(|n| unfold_tr(x, n))
                .collect::<Result<Vec<_>>>()?,
        ),
        Variant::Lra { tucker_ranks } => {
            let tucker = hosvd_truncate(x, tucker_ranks)?;
            let core_unfoldings = (0..order)
                .map(|n| unfold_tr(tucker.core(), n))
                .collect::<Result<Vec<_>>>()?;
            let projected = projected_cores(&cores, &tucker)?;
            FitSource::LowRank {
                tucker,
                core_unfoldings,
                projected,
            }
        }
    };
    times.lra = phase.elapsed().as_secs_f64();

    let x_norm = x.frobenius_norm().max(f64::MIN_POSITIVE);
    let phase = Instant::now();
    let (obj0, res0) = objective_parts(x, &cores, reg.as_ref(), config.beta)?;
    times.evaluation += phase.elapsed().as_secs_f64();
    let mut objective_trace = vec![obj0];
    let mut fit_trace = vec![res0 / x_norm];
    let mut elapsed = vec![start.elapsed().as_secs_f64()];
    let mut sweep_update_seconds = Vec::new();
    let mut converged = false;

    for sweep in 1..=config.outer_sweeps {
        let phase = Instant::now();
        for n in 0..order {
            let fit_numerator = match &mut source {
                FitSource::Exact(unfoldings) => exact_numerator(&unfoldings[n], &cores, n)?,
                FitSource::LowRank {
                    tucker,
                    core_unfoldings,
                    projected,
                } => {
                    let mut num = low_rank_numerator(tucker, core_unfoldings, projected, n)?;
                    clamp_nonnegative(&mut num);
                    num
                }
            };
            let gram = cores.subchain_gram(n)?;
            let step_reg = reg
                .as_ref()
                .filter(|_| n + 1 == order)
                .map(|r| (r, config.beta));
            let mut g = cores.core_unfold2(n);
            for iter in 0..config.inner_iters {
                let numerator =
                    mur_step(&mut g, &fit_numerator, &gram, step_reg, config.epsilon, n)?;
                observer.inner_step(&InnerStep {
                    sweep,
                    core: n,
                    iter,
                    numerator: &numerator,
                    factor: &g,
                });
            }
            cores.set_core_unfold2(n, &g)?;
            if let FitSource::LowRank {
                tucker, projected, ..
            } = &mut source
            {
                let mut zs = std::mem::replace(projected, cores.clone()).into_cores();
                zs[n] = project_core(&cores, tucker, n)?;
                *projected = TRCores::new(zs)?;
            }
        }
        let update_secs = phase.elapsed().as_secs_f64();
        times.updates += update_secs;
        sweep_update_seconds.push(update_secs);

        let phase = Instant::now();
        let (obj, res) = objective_parts(x, &cores, reg.as_ref(), config.beta)?;
        times.evaluation += phase.elapsed().as_secs_f64();
        if !obj.is_finite() {
            return Err(Error::NonFinite { core: order - 1 });
        }
        let prev = *objective_trace.last().expect("initial entry");
        objective_trace.push(obj);
        fit_trace.push(res / x_norm);
        elapsed.push(start.elapsed().as_secs_f64());
        if ((prev - obj).abs() / prev.abs().max(f64::MIN_POSITIVE)) < config.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveResult {
        sweeps_run: sweep_update_seconds.len(),
        cores,
        objective_trace,
        fit_trace,
        elapsed,
        sweep_update_seconds,
        converged,
        seed: config.seed,
        times,
    })
}
