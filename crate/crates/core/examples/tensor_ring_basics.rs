// Build a small tensor ring, reconstruct it and look at the sub-chain
// identities the solver relies on.

use hgntr::tensor::unfold_tr;
use hgntr::{Result, TRCores};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Returns the worst relative error of `X_[n] = G_(2) Sub_[2]ᵀ` and of the
/// fast sub-chain Gram, over all modes.
pub fn run_example() -> Result<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cores = TRCores::random_uniform(&[4, 5, 6], &[2, 3, 2], &mut rng)?;
    let x = cores.reconstruct();
    println!("shape {:?}, ranks {:?}, |X| = {:.4}", x.shape(), cores.ranks(), x.frobenius_norm());

    let (mut unfold_err, mut gram_err) = (0.0f64, 0.0f64);
    for n in 0..cores.order() {
        let sub = cores.subchain_unfold2(n)?;
        let approx = cores.core_unfold2(n).matmul_nt(&sub)?;
        unfold_err = unfold_err.max(approx.rel_diff(&unfold_tr(&x, n)?));
        gram_err = gram_err.max(cores.subchain_gram(n)?.rel_diff(&sub.matmul_tn(&sub)?));
    }
    println!("unfolding identity error {unfold_err:.2e}, Gram error {gram_err:.2e}");
    Ok((unfold_err, gram_err))
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
