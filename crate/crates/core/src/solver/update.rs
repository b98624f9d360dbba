use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::lra::TuckerApprox;
use crate::tensor::{unfold_tr, DenseTensor, Matrix, TRCores};

/// `S` and `D_V` of the manifold regularizer on the sample core.
#[derive(Clone, Debug)]
pub struct Regularizer {
    similarity: Matrix,
    degrees: Vec<f64>,
}

impl Regularizer {
    pub fn new(similarity: Matrix, degrees: Vec<f64>) -> Result<Self> {
        if similarity.rows() != similarity.cols() || similarity.rows() != degrees.len() {
            return Err(Error::Shape(format!(
                "similarity {}x{} with {} degrees",
                similarity.rows(),
                similarity.cols(),
                degrees.len()
            )));
        }
        Ok(Self {
            similarity,
            degrees,
        })
    }

    pub fn from_graph(graph: &Hypergraph) -> Self {
        Self {
            similarity: graph.similarity().clone(),
            degrees: graph.vertex_degrees().to_vec(),
        }
    }

    pub fn similarity(&self) -> &Matrix {
        &self.similarity
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn size(&self) -> usize {
        self.degrees.len()
    }

    /// `tr(Gᵀ (D_V − S) G)`.
    pub fn quadratic(&self, g: &Matrix) -> Result<f64> {
        let sg = self.similarity.matmul(g)?;
        let mut acc = 0.0;
        for i in 0..g.rows() {
            let d = self.degrees[i];
            for (gv, sv) in g.row(i).iter().zip(sg.row(i)) {
                acc += gv * (d * gv - sv);
            }
        }
        Ok(acc)
    }
}

/// Data source for the fit numerator of a core update.
#[derive(Clone, Copy, Debug)]
pub enum DataTerm<'a> {
    /// The data tensor itself.
    Exact(&'a DenseTensor),
    /// Its Tucker surrogate.
    LowRank(&'a TuckerApprox),
}

/// Objective: `½‖X − TR(cores)‖²_F + (β/2) tr(G⁽ᴺ⁾₍₂₎ᵀ L G⁽ᴺ⁾₍₂₎)`.
pub fn objective(
    x: &DenseTensor,
    cores: &TRCores,
    reg: Option<&Regularizer>,
    beta: f64,
) -> Result<f64> {
    Ok(objective_parts(x, cores, reg, beta)?.0)
}

/// Objective together with `‖X − TR(cores)‖_F`.
pub(crate) fn objective_parts(
    x: &DenseTensor,
    cores: &TRCores,
    reg: Option<&Regularizer>,
    beta: f64,
) -> Result<(f64, f64)> {
    if cores.shape() != x.shape() {
        return Err(Error::Shape(format!(
            "cores describe {:?}, data is {:?}",
            cores.shape(),
            x.shape()
        )));
    }
    let residual = x.distance(&cores.reconstruct());
    let mut value = 0.5 * residual * residual;
    if let Some(reg) = reg {
        let g = cores.core_unfold2(cores.order() - 1);
        if reg.size() != g.rows() {
            return Err(Error::Shape(format!(
                "regularizer has {} vertices, sample core has {} rows",
                reg.size(),
                g.rows()
            )));
        }
        if beta != 0.0 {
            value += 0.5 * beta * reg.quadratic(&g)?;
        }
    }
    Ok((value, residual))
}

/// One multiplicative step on `g = G⁽ⁿ⁾₍₂₎` given the fixed fit numerator
/// and `gram = (G^{≠n}_[2])ᵀ G^{≠n}_[2]`. When `reg` is present the step
/// uses `β·S·G` in the numerator and `β·D_V·G` in the denominator. Returns
/// the full numerator used.
pub fn mur_step(
    g: &mut Matrix,
    fit_numerator: &Matrix,
    gram: &Matrix,
    reg: Option<(&Regularizer, f64)>,
    epsilon: f64,
    core: usize,
) -> Result<Matrix> {
    let mut numerator = fit_numerator.clone();
    let mut denominator = g.matmul(gram)?;
    if let Some((reg, beta)) = reg {
        let sg = reg.similarity().matmul(g)?;
        let cols = g.cols();
        for i in 0..g.rows() {
            let d = beta * reg.degrees()[i];
            let num = &mut numerator.data_mut()[i * cols..(i + 1) * cols];
            for (nv, sv) in num.iter_mut().zip(sg.row(i)) {
                *nv += beta * sv;
            }
            let den = &mut denominator.data_mut()[i * cols..(i + 1) * cols];
            for (dv, gv) in den.iter_mut().zip(g.row(i)) {
                *dv += d * gv;
            }
        }
    }
    for ((gv, nv), dv) in g
        .data_mut()
        .iter_mut()
        .zip(numerator.data())
        .zip(denominator.data())
    {
        *gv *= nv / (dv + epsilon);
        if !gv.is_finite() {
            return Err(Error::NonFinite { core });
        }
    }
    Ok(numerator)
}

/// `X_[n] G^{≠n}_[2]` from the data tensor.
pub fn exact_numerator(x_unfolded: &Matrix, cores: &TRCores, n: usize) -> Result<Matrix> {
    x_unfolded.matmul(&cores.subchain_unfold2(n)?)
}

/// `U⁽ⁿ⁾ C_[n] Z^{≠n}_[2]` with `Z⁽ᵐ⁾ = G⁽ᵐ⁾ ×₂ U⁽ᵐ⁾ᵀ`; `z_cores` holds the
/// projected cores (its entry `n` is unused). Negative entries are kept.
pub fn low_rank_numerator(
    tucker: &TuckerApprox,
    core_unfoldings: &[Matrix],
    z_cores: &TRCores,
    n: usize,
) -> Result<Matrix> {
    let zsub = z_cores.subchain_unfold2(n)?;
    let inner = core_unfoldings[n].matmul(&zsub)?;
    tucker.factor(n).matmul(&inner)
}

/// Projects every core onto the Tucker factor of its mode.
pub fn projected_cores(cores: &TRCores, tucker: &TuckerApprox) -> Result<TRCores> {
    TRCores::new(
        (0..cores.order())
            .map(|m| project_core(cores, tucker, m))
            .collect::<Result<Vec<_>>>()?,
    )
}

pub(crate) fn project_core(cores: &TRCores, tucker: &TuckerApprox, m: usize) -> Result<DenseTensor> {
    cores.core(m).mode_product(&tucker.factor(m).transpose(), 1)
}

pub(crate) fn clamp_nonnegative(m: &mut Matrix) {
    m.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
}

/// Single multiplicative update of core `n` from scratch: forms the fit
/// numerator from `data`, the Gram by self-contraction, and applies one step
/// (with the regularizer only on the last core). Returns the updated
/// `G⁽ⁿ⁾₍₂₎`.
pub fn mur_update_inner(
    n: usize,
    data: DataTerm<'_>,
    cores: &TRCores,
    reg: Option<&Regularizer>,
    beta: f64,
    epsilon: f64,
) -> Result<Matrix> {
    let numerator = match data {
        DataTerm::Exact(x) => exact_numerator(&unfold_tr(x, n)?, cores, n)?,
        DataTerm::LowRank(t) => {
            let unfoldings = (0..t.core().order())
                .map(|m| unfold_tr(t.core(), m))
                .collect::<Result<Vec<_>>>()?;
            let z = projected_cores(cores, t)?;
            let mut num = low_rank_numerator(t, &unfoldings, &z, n)?;
            clamp_nonnegative(&mut num);
            num
        }
    };
    let gram = cores.subchain_gram(n)?;
    let mut g = cores.core_unfold2(n);
    let reg = reg.filter(|_| n + 1 == cores.order()).map(|r| (r, beta));
    mur_step(&mut g, &numerator, &gram, reg, epsilon, n)?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_cores(a: f64, b: f64) -> TRCores {
        TRCores::new(vec![
            DenseTensor::new(vec![1, 1, 1], vec![a]).unwrap(),
            DenseTensor::new(vec![1, 1, 1], vec![b]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn scalar_update_closed_form() {
        // x = 6, g = 2, g_other = 1: g·(x·g_o)/(g·g_o²) = 6
        let x = DenseTensor::new(vec![1, 1], vec![6.0]).unwrap();
        let cores = scalar_cores(2.0, 1.0);
        let g = mur_update_inner(0, DataTerm::Exact(&x), &cores, None, 0.0, 1e-12).unwrap();
        assert!((g.get(0, 0) - 6.0).abs() < 1e-10);
    }

    #[test]
    fn balanced_ratio_is_a_fixed_point() {
        let mut g = Matrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let gram = Matrix::identity(2);
        let before = g.clone();
        // numerator equal to the denominator G·I
        mur_step(&mut g, &before, &gram, None, 1e-300, 0).unwrap();
        assert!(g.max_abs_diff(&before) < 1e-15);
    }

    #[test]
    fn nan_is_reported_with_core_index() {
        let mut g = Matrix::new(1, 1, vec![1.0]).unwrap();
        let num = Matrix::new(1, 1, vec![f64::NAN]).unwrap();
        let err = mur_step(&mut g, &num, &Matrix::identity(1), None, 1e-12, 3).unwrap_err();
        assert!(matches!(err, Error::NonFinite { core: 3 }));
    }

    #[test]
    fn zero_cores_objective_is_half_norm() {
        let x = DenseTensor::new(vec![1, 2], vec![3.0, 4.0]).unwrap();
        let cores = TRCores::new(vec![
            DenseTensor::zeros(&[1, 1, 1]),
            DenseTensor::zeros(&[1, 2, 1]),
        ])
        .unwrap();
        assert_eq!(objective(&x, &cores, None, 0.0).unwrap(), 12.5);
    }

    #[test]
    fn regularizer_quadratic_matches_dense_laplacian() {
        let s = Matrix::new(3, 3, vec![0.5, 0.2, 0.1, 0.2, 0.3, 0.0, 0.1, 0.0, 0.4]).unwrap();
        let d = vec![0.8, 0.5, 0.5];
        let reg = Regularizer::new(s.clone(), d.clone()).unwrap();
        let g = Matrix::new(3, 2, vec![1.0, 2.0, 0.5, 0.1, 3.0, 1.5]).unwrap();
        let l = Matrix::from_fn(3, 3, |i, j| if i == j { d[i] } else { 0.0 } - s.get(i, j));
        let lg = l.matmul(&g).unwrap();
        let direct: f64 = g.data().iter().zip(lg.data()).map(|(a, b)| a * b).sum();
        assert!((reg.quadratic(&g).unwrap() - direct).abs() < 1e-14);
        assert!(Regularizer::new(s, vec![1.0]).is_err());
    }
}
