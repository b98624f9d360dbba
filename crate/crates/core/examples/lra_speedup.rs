// Per-sweep cost of the exact solver against the Tucker-accelerated one.

use hgntr::{solve_hgntr, solve_lra_hgntr, DenseTensor, Result, SolveResult, SolverConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn per_sweep(r: &SolveResult) -> f64 {
    r.sweep_update_seconds.iter().sum::<f64>() / r.sweep_update_seconds.len() as f64
}

/// Returns accelerated / exact per-sweep time.
pub fn run_example() -> Result<f64> {
    let side = 40;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x = DenseTensor::random_uniform(&[side, side, side], &mut rng);
    let config = SolverConfig::new(vec![4, 4, 4]).with_sweeps(5).with_tol(0.0);
    let exact = solve_hgntr(&x, &config)?;
    let lra = solve_lra_hgntr(&x, &config.clone().with_lra(vec![8, 8, 8]))?;
    let ratio = per_sweep(&lra) / per_sweep(&exact);
    println!(
        "{side}^3: exact {:.2} ms/sweep, accelerated {:.2} ms/sweep (+{:.2} ms HOSVD), ratio {ratio:.2}",
        per_sweep(&exact) * 1e3,
        per_sweep(&lra) * 1e3,
        lra.times.lra * 1e3
    );
    Ok(ratio)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
