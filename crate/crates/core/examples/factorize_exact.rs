// Fit an exact tensor-ring tensor without regularization.

use hgntr::cli::synth;
use hgntr::{solve_hgntr, Result, SolverConfig};

/// Returns the final relative fit error.
pub fn run_example() -> Result<f64> {
    let (x, _) = synth::tr_exact(&[6, 5, 30], &[2, 2, 2], 3)?;
    let config = SolverConfig::new(vec![2, 2, 2]).with_beta(0.0).with_sweeps(200).with_tol(0.0);
    let r = solve_hgntr(&x, &config)?;
    for s in (0..=r.sweeps_run).step_by(50) {
        println!("sweep {s:>3}: objective {:.4e}, fit {:.4e}", r.objective_trace[s], r.fit_trace[s]);
    }
    println!("final fit {:.3e} after {} sweeps", r.final_fit(), r.sweeps_run);
    Ok(r.final_fit())
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
