// Recover a clean low-rank tensor from a noisy copy with both solvers.

use hgntr::cli::synth;
use hgntr::eval::{add_gaussian_noise, snr_db};
use hgntr::{solve_hgntr, solve_lra_hgntr, Result, SolverConfig};

/// Returns `(accelerated, exact)` relative errors against the clean tensor.
pub fn run_example() -> Result<(f64, f64)> {
    let (clean, _) = synth::tucker_exact(&[16, 16, 16], &[3, 3, 3], 2)?;
    let noisy = add_gaussian_noise(&clean, 10.0, 8, true)?;
    println!("realized SNR after truncation {:.2} dB", snr_db(&clean, &noisy));
    let config = SolverConfig::new(vec![3, 3, 3]).with_sweeps(60);
    let exact = solve_hgntr(&noisy, &config)?.cores.reconstruct().rel_diff(&clean);
    let lra = solve_lra_hgntr(&noisy, &config.with_lra(vec![3, 3, 3]))?
        .cores
        .reconstruct()
        .rel_diff(&clean);
    println!("error to clean tensor: exact {exact:.4}, accelerated {lra:.4}");
    Ok((lra, exact))
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
