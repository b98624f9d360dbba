use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Adds iid Gaussian noise scaled so that `10·log₁₀(‖X‖²/‖noise‖²)` equals
/// `snr_db` exactly. `snr_db = +∞` returns `x` unchanged. With `truncate`,
/// negative entries of the result are clamped to zero.
pub fn add_gaussian_noise(x: &DenseTensor, snr_db: f64, seed: u64, truncate: bool) -> Result<DenseTensor> {
    if snr_db.is_nan() || snr_db == f64::NEG_INFINITY {
        return Err(Error::InvalidArgument(format!("invalid SNR {snr_db}")));
    }
    let signal = x.frobenius_norm();
    if signal == 0.0 {
        return Err(Error::InvalidArgument(
            "cannot set an SNR relative to a zero tensor".into(),
        ));
    }
    if snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    let noise = gaussian_noise(x.shape(), signal, snr_db, seed);
    let mut out = x.clone();
    for (o, e) in out.data_mut().iter_mut().zip(noise.data()) {
        *o += e;
        if truncate && *o < 0.0 {
            *o = 0.0;
        }
    }
    Ok(out)
}

/// The noise tensor [`add_gaussian_noise`] would add for these arguments.
pub fn gaussian_noise(shape: &[usize], signal_norm: f64, snr_db: f64, seed: u64) -> DenseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = shape.iter().product();
    let raw: Vec<f64> = (0..len).map(|_| StandardNormal.sample(&mut rng)).collect();
    let raw_norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = signal_norm / 10f64.powf(snr_db / 20.0);
    let c = target / raw_norm;
    DenseTensor::new(shape.to_vec(), raw.into_iter().map(|v| v * c).collect())
        .expect("length from shape")
}

/// Realized SNR in dB of `noisy` relative to `clean`.
pub fn snr_db(clean: &DenseTensor, noisy: &DenseTensor) -> f64 {
    let e = clean.distance(noisy);
    20.0 * (clean.frobenius_norm() / e).log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal() -> DenseTensor {
        DenseTensor::from_fn(&[4, 5, 3], |i| 1.0 + (i[0] * 15 + i[1] * 3 + i[2]) as f64 * 0.1)
    }

    #[test]
    fn infinite_snr_is_identity() {
        let x = signal();
        assert_eq!(add_gaussian_noise(&x, f64::INFINITY, 1, false).unwrap(), x);
    }

    #[test]
    fn zero_db_noise_matches_signal_energy() {
        let x = signal();
        let y = add_gaussian_noise(&x, 0.0, 2, false).unwrap();
        let e = x.distance(&y);
        assert!((e / x.frobenius_norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ten_db_noise_energy() {
        let x = signal();
        let y = add_gaussian_noise(&x, 10.0, 3, false).unwrap();
        let e2 = x.distance(&y).powi(2);
        let s2 = x.frobenius_norm().powi(2);
        assert!((e2 / (s2 / 10.0) - 1.0).abs() < 1e-9);
        assert!((snr_db(&x, &y) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn truncation_and_determinism() {
        let x = signal();
        let a = add_gaussian_noise(&x, -5.0, 4, true).unwrap();
        assert!(a.is_nonnegative());
        assert_eq!(a, add_gaussian_noise(&x, -5.0, 4, true).unwrap());
        assert_ne!(a, add_gaussian_noise(&x, -5.0, 5, true).unwrap());
    }

    #[test]
    fn zero_tensor_is_an_error() {
        assert!(add_gaussian_noise(&DenseTensor::zeros(&[2, 2]), 10.0, 0, false).is_err());
        assert!(add_gaussian_noise(&signal(), f64::NAN, 0, false).is_err());
    }
}
