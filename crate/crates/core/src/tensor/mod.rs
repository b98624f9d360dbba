//! Dense tensors, matricizations and tensor-ring algebra.
//!
//! Modes are zero-based throughout the API. Two unfoldings are provided:
//!
//! * [`unfold_classic`]: rows index mode `n`, columns run over the remaining
//!   modes in ascending order `0, .., n-1, n+1, .., N-1` with the first listed
//!   mode varying slowest.
//! * [`unfold_tr`]: same rows, columns run over the remaining modes cyclically
//!   `n+1, .., N-1, 0, .., n-1`, first listed slowest. This is the ordering the
//!   tensor-ring identities are written against.

mod dense;
mod matrix;
mod ring;

pub use dense::DenseTensor;
pub use matrix::Matrix;
pub use ring::{multilinear_product, TRCores};

use crate::error::{Error, Result};

fn check_mode(order: usize, n: usize) -> Result<()> {
    if n >= order {
        return Err(Error::ModeOutOfRange { mode: n, order });
    }
    Ok(())
}

fn classic_perm(order: usize, n: usize) -> Vec<usize> {
    std::iter::once(n)
        .chain((0..order).filter(|&m| m != n))
        .collect()
}

fn cyclic_perm(order: usize, n: usize) -> Vec<usize> {
    (0..order).map(|k| (n + k) % order).collect()
}

fn unfold_with(x: &DenseTensor, perm: &[usize]) -> Result<Matrix> {
    let rows = x.shape()[perm[0]];
    let cols = x.len() / rows;
    let p = x.permute(perm)?;
    Matrix::new(rows, cols, p.into_data())
}

fn fold_with(m: &Matrix, perm: &[usize], shape: &[usize]) -> Result<DenseTensor> {
    let permuted_shape: Vec<usize> = perm.iter().map(|&p| shape[p]).collect();
    let expected_cols: usize = permuted_shape[1..].iter().product();
    if m.rows() != permuted_shape[0] || m.cols() != expected_cols {
        return Err(Error::Shape(format!(
            "{}x{} matrix cannot fold into {shape:?} along mode {}",
            m.rows(),
            m.cols(),
            perm[0]
        )));
    }
    let mut inverse = vec![0usize; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inverse[p] = k;
    }
    DenseTensor::new(permuted_shape, m.data().to_vec())?.permute(&inverse)
}

/// Classical mode-`n` unfolding `X_(n)`.
pub fn unfold_classic(x: &DenseTensor, n: usize) -> Result<Matrix> {
    check_mode(x.order(), n)?;
    unfold_with(x, &classic_perm(x.order(), n))
}

/// Cyclic mode-`n` unfolding `X_[n]`.
pub fn unfold_tr(x: &DenseTensor, n: usize) -> Result<Matrix> {
    check_mode(x.order(), n)?;
    unfold_with(x, &cyclic_perm(x.order(), n))
}

/// Inverse of [`unfold_classic`].
pub fn fold(m: &Matrix, n: usize, shape: &[usize]) -> Result<DenseTensor> {
    check_mode(shape.len(), n)?;
    fold_with(m, &classic_perm(shape.len(), n), shape)
}

/// Inverse of [`unfold_tr`].
pub fn fold_tr(m: &Matrix, n: usize, shape: &[usize]) -> Result<DenseTensor> {
    check_mode(shape.len(), n)?;
    fold_with(m, &cyclic_perm(shape.len(), n), shape)
}

/// `X ×ₙ U`: contracts mode `n` of `x` with the columns of `u`.
pub fn mode_n_product(x: &DenseTensor, u: &Matrix, n: usize) -> Result<DenseTensor> {
    check_mode(x.order(), n)?;
    if u.cols() != x.shape()[n] {
        return Err(Error::Shape(format!(
            "mode-{n} product needs {} columns, matrix has {}",
            x.shape()[n],
            u.cols()
        )));
    }
    let product = u.matmul(&unfold_classic(x, n)?)?;
    let mut shape = x.shape().to_vec();
    shape[n] = u.rows();
    fold(&product, n, &shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn indexed(shape: &[usize]) -> DenseTensor {
        DenseTensor::from_fn(shape, |i| {
            i.iter().fold(0.0, |acc, &v| acc * 10.0 + v as f64 + 1.0)
        })
    }

    #[test]
    fn classic_unfold_of_matrix_is_itself() {
        let x = DenseTensor::from_fn(&[2, 3], |i| (i[0] * 3 + i[1]) as f64);
        let m = unfold_classic(&x, 0).unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.data(), x.data());
    }

    #[test]
    fn constant_tensor_unfolds_to_constant_matrix() {
        let x = DenseTensor::filled(&[2, 2, 2], 1.0);
        for m in [unfold_classic(&x, 1).unwrap(), unfold_tr(&x, 1).unwrap()] {
            assert_eq!((m.rows(), m.cols()), (2, 4));
            assert!(m.data().iter().all(|&v| v == 1.0));
        }
    }

    // X(i,j,k) = 100i + 10j + k on a (3,4,2) tensor, 1-based values.
    fn probe() -> DenseTensor {
        DenseTensor::from_fn(&[3, 4, 2], |i| {
            (100 * (i[0] + 1) + 10 * (i[1] + 1) + (i[2] + 1)) as f64
        })
    }

    #[test]
    fn classic_unfold_index_map_by_enumeration() {
        let x = probe();
        let m = unfold_classic(&x, 2).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 12));
        // columns: (i, j) with i slowest
        for i in 0..3 {
            for j in 0..4 {
                for k in 0..2 {
                    assert_eq!(m.get(k, i * 4 + j), x.get(&[i, j, k]));
                }
            }
        }
    }

    #[test]
    fn cyclic_unfold_index_map_by_enumeration() {
        let x = probe();
        let m = unfold_tr(&x, 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (4, 6));
        // columns: (k, i) with k slowest
        for i in 0..3 {
            for j in 0..4 {
                for k in 0..2 {
                    assert_eq!(m.get(j, k * 3 + i), x.get(&[i, j, k]));
                }
            }
        }
        assert_eq!(unfold_tr(&x, 0).unwrap(), unfold_classic(&x, 0).unwrap());
    }

    #[test]
    fn folds_invert_unfolds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = DenseTensor::random_uniform(&[3, 2, 4, 5], &mut rng);
        for n in 0..4 {
            let a = unfold_classic(&x, n).unwrap();
            assert_eq!(fold(&a, n, x.shape()).unwrap(), x);
            let b = unfold_tr(&x, n).unwrap();
            assert_eq!(fold_tr(&b, n, x.shape()).unwrap(), x);
        }
    }

    #[test]
    fn fold_of_zero_matrix() {
        let z = fold(&Matrix::zeros(2, 6), 0, &[2, 3, 2]).unwrap();
        assert_eq!(z, DenseTensor::zeros(&[2, 3, 2]));
        assert!(fold(&Matrix::zeros(2, 5), 0, &[2, 3, 2]).is_err());
    }

    #[test]
    fn mode_out_of_range() {
        let x = indexed(&[2, 2]);
        assert!(matches!(
            unfold_classic(&x, 2),
            Err(Error::ModeOutOfRange { mode: 2, order: 2 })
        ));
        assert!(unfold_tr(&x, 5).is_err());
        assert!(mode_n_product(&x, &Matrix::identity(2), 3).is_err());
    }

    #[test]
    fn mode_product_identity_and_sum() {
        let x = indexed(&[2, 3, 2]);
        assert_eq!(mode_n_product(&x, &Matrix::identity(3), 1).unwrap(), x);
        let ones = Matrix::new(1, 3, vec![1.0; 3]).unwrap();
        let s = mode_n_product(&x, &ones, 1).unwrap();
        assert_eq!(s.shape(), &[2, 1, 2]);
        for i in 0..2 {
            for k in 0..2 {
                let direct: f64 = (0..3).map(|j| x.get(&[i, j, k])).sum();
                assert_eq!(s.get(&[i, 0, k]), direct);
            }
        }
        assert!(mode_n_product(&x, &Matrix::identity(2), 1).is_err());
    }
}
