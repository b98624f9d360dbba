//! Truncated HOSVD used as the low-rank surrogate of the data tensor.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::tensor::{mode_n_product, unfold_classic, DenseTensor, Matrix};

/// Tucker form `C ×₁ U⁽¹⁾ ⋯ ×_N U⁽ᴺ⁾` with orthonormal factor columns.
/// The core is signed.
#[derive(Clone, Debug, PartialEq)]
pub struct TuckerApprox {
    core: DenseTensor,
    factors: Vec<Matrix>,
}

impl TuckerApprox {
    pub fn new(core: DenseTensor, factors: Vec<Matrix>) -> Result<Self> {
        if factors.len() != core.order() {
            return Err(Error::Shape(format!(
                "{} factors for a core of order {}",
                factors.len(),
                core.order()
            )));
        }
        for (n, u) in factors.iter().enumerate() {
            if u.cols() != core.shape()[n] {
                return Err(Error::Shape(format!(
                    "factor {n} has {} columns, core extent is {}",
                    u.cols(),
                    core.shape()[n]
                )));
            }
        }
        Ok(Self { core, factors })
    }

    pub fn core(&self) -> &DenseTensor {
        &self.core
    }

    pub fn factors(&self) -> &[Matrix] {
        &self.factors
    }

    pub fn factor(&self, n: usize) -> &Matrix {
        &self.factors[n]
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.core.shape().to_vec()
    }

    /// Extents of the approximated tensor.
    pub fn shape(&self) -> Vec<usize> {
        self.factors.iter().map(Matrix::rows).collect()
    }

    /// `X̃ = C ×₁ U⁽¹⁾ ⋯ ×_N U⁽ᴺ⁾`.
    pub fn reconstruct(&self) -> DenseTensor {
        self.factors
            .iter()
            .enumerate()
            .fold(self.core.clone(), |acc, (n, u)| {
                mode_n_product(&acc, u, n).expect("shapes validated at construction")
            })
    }

    /// Largest `|UᵀU − I|` entry over all factors.
    pub fn orthonormality_error(&self) -> f64 {
        self.factors
            .iter()
            .map(|u| {
                let g = u.matmul_tn(u).expect("same matrix");
                g.max_abs_diff(&Matrix::identity(u.cols()))
            })
            .fold(0.0, f64::max)
    }
}

/// Truncated HOSVD: `U⁽ⁿ⁾` are the leading eigenvectors of `X_(n) X_(n)ᵀ`
/// and `C = X ×₁ U⁽¹⁾ᵀ ⋯ ×_N U⁽ᴺ⁾ᵀ`.
pub fn hosvd_truncate(x: &DenseTensor, ranks: &[usize]) -> Result<TuckerApprox> {
    if ranks.len() != x.order() {
        return Err(Error::Rank(format!(
            "{} Tucker ranks for a tensor of order {}",
            ranks.len(),
            x.order()
        )));
    }
    for (n, (&r, &i)) in ranks.iter().zip(x.shape()).enumerate() {
        if r == 0 || r > i {
            return Err(Error::Rank(format!(
                "Tucker rank {r} for mode {n} must lie in 1..={i}"
            )));
        }
    }
    let factors = ranks
        .iter()
        .enumerate()
        .map(|(n, &r)| leading_left_vectors(&unfold_classic(x, n)?, r))
        .collect::<Result<Vec<_>>>()?;
    let mut core = x.clone();
    for (n, u) in factors.iter().enumerate() {
        core = mode_n_product(&core, &u.transpose(), n)?;
    }
    TuckerApprox::new(core, factors)
}

/// Top-`r` left singular vectors of `m` via the eigendecomposition of `m mᵀ`.
fn leading_left_vectors(m: &Matrix, r: usize) -> Result<Matrix> {
    let gram = m.matmul_nt(m)?;
    let n = gram.rows();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(n, n, gram.data()));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let mut u = Matrix::zeros(n, r);
    for (col, &k) in order.iter().take(r).enumerate() {
        let v = eig.eigenvectors.column(k);
        let peak = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        let flip = !v.iter().any(|&x| x == peak);
        for i in 0..n {
            u.set(i, col, if flip { -v[i] } else { v[i] });
        }
    }
    Ok(u)
}
