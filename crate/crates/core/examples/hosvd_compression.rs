// Truncated HOSVD of an exact Tucker tensor, then of a noisy copy.

use hgntr::cli::synth;
use hgntr::eval::add_gaussian_noise;
use hgntr::{hosvd_truncate, Result};

/// Returns the relative reconstruction error on the clean tensor.
pub fn run_example() -> Result<f64> {
    let (x, _) = synth::tucker_exact(&[12, 10, 8], &[3, 2, 2], 4)?;
    let t = hosvd_truncate(&x, &[3, 2, 2])?;
    let err = t.reconstruct().rel_diff(&x);
    println!("exact Tucker recovered with error {err:.2e}, orthonormality {:.2e}", t.orthonormality_error());

    let noisy = add_gaussian_noise(&x, 5.0, 9, false)?;
    let denoised = hosvd_truncate(&noisy, &[3, 2, 2])?.reconstruct();
    println!(
        "at 5 dB: noisy error {:.4}, truncated error {:.4}",
        noisy.rel_diff(&x),
        denoised.rel_diff(&x)
    );
    Ok(err)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
