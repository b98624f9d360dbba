use rand::Rng;

use super::matrix::{gemm_nn, Matrix};
use super::{fold, unfold_classic, DenseTensor};
use crate::error::{Error, Result};

/// Multilinear product of two third-order cores sharing a bond.
///
/// `a` is `(Ra, Ia, Rb)`, `b` is `(Rb, Ib, Rc)`; the result is
/// `(Ra, Ia·Ib, Rc)` with combined middle index `ia·Ib + ib`.
pub fn multilinear_product(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    let (sa, sb) = (a.shape(), b.shape());
    if sa.len() != 3 || sb.len() != 3 {
        return Err(Error::Shape(format!(
            "multilinear product needs third-order cores, got {sa:?} and {sb:?}"
        )));
    }
    if sa[2] != sb[0] {
        return Err(Error::Rank(format!(
            "bond extents differ: {} vs {}",
            sa[2], sb[0]
        )));
    }
    // (Ra·Ia) × Rb times Rb × (Ib·Rc), laid out exactly as (Ra, Ia·Ib, Rc).
    let (m, k, n) = (sa[0] * sa[1], sa[2], sb[1] * sb[2]);
    let mut out = vec![0.0; m * n];
    gemm_nn(m, k, n, a.data(), b.data(), &mut out);
    DenseTensor::new(vec![sa[0], sa[1] * sb[1], sb[2]], out)
}

/// Tensor-ring cores `G⁽⁰⁾..G⁽ᴺ⁻¹⁾`, core `n` of shape `(Rₙ, Iₙ, Rₙ₊₁)` with
/// `R_N = R_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TRCores {
    cores: Vec<DenseTensor>,
}

impl TRCores {
    pub fn new(cores: Vec<DenseTensor>) -> Result<Self> {
        if cores.is_empty() {
            return Err(Error::Shape("a tensor ring needs at least one core".into()));
        }
        let n = cores.len();
        for (k, c) in cores.iter().enumerate() {
            if c.order() != 3 {
                return Err(Error::Shape(format!(
                    "core {k} has order {}, expected 3",
                    c.order()
                )));
            }
            let next = &cores[(k + 1) % n];
            if c.shape()[2] != next.shape()[0] {
                return Err(Error::Rank(format!(
                    "core {k} right rank {} does not match core {} left rank {}",
                    c.shape()[2],
                    (k + 1) % n,
                    next.shape()[0]
                )));
            }
        }
        Ok(Self { cores })
    }

    /// Cores with independent uniform(0, 1) entries for data `shape` and
    /// ring `ranks` (`ranks[n]` is the left rank of core `n`).
    pub fn random_uniform<R: Rng + ?Sized>(
        shape: &[usize],
        ranks: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        if shape.len() != ranks.len() {
            return Err(Error::Rank(format!(
                "{} ranks given for a tensor of order {}",
                ranks.len(),
                shape.len()
            )));
        }
        if ranks.contains(&0) || shape.contains(&0) {
            return Err(Error::InvalidArgument("ranks and extents must be positive".into()));
        }
        let n = shape.len();
        let cores = (0..n)
            .map(|k| DenseTensor::random_uniform(&[ranks[k], shape[k], ranks[(k + 1) % n]], rng))
            .collect();
        Self::new(cores)
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.cores.len()
    }

    pub fn cores(&self) -> &[DenseTensor] {
        &self.cores
    }

    pub fn into_cores(self) -> Vec<DenseTensor> {
        self.cores
    }

    pub fn core(&self, n: usize) -> &DenseTensor {
        &self.cores[n]
    }

    /// Left ranks `[R₀..R_{N-1}]`.
    pub fn ranks(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.shape()[0]).collect()
    }

    /// Extents of the represented tensor.
    pub fn shape(&self) -> Vec<usize> {
        self.cores.iter().map(|c| c.shape()[1]).collect()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.cores.iter().all(DenseTensor::is_nonnegative)
    }

    pub fn scale_core(&mut self, n: usize, c: f64) {
        self.cores[n].scale(c);
    }

    /// Cyclic rotation: core `m` of the result is core `(m + k) mod N` of `self`.
    pub fn rotate(&self, k: usize) -> TRCores {
        let n = self.order();
        TRCores {
            cores: (0..n).map(|m| self.cores[(m + k) % n].clone()).collect(),
        }
    }

    /// `G⁽ⁿ⁾₍₂₎`: classical mode-2 unfolding of core `n`, `Iₙ × RₙRₙ₊₁`.
    pub fn core_unfold2(&self, n: usize) -> Matrix {
        unfold_classic(&self.cores[n], 1).expect("cores are third order")
    }

    /// Replaces core `n` by folding a `Iₙ × RₙRₙ₊₁` matrix.
    pub fn set_core_unfold2(&mut self, n: usize, g: &Matrix) -> Result<()> {
        let shape = self.cores[n].shape().to_vec();
        self.cores[n] = fold(g, 1, &shape)?;
        Ok(())
    }

    /// Sub-chain tensor `G^{≠n}`: product of every core except `n`, in cyclic
    /// order starting at `n+1`. Shape `(Rₙ₊₁, ∏_{m≠n} I_m, Rₙ)`.
    pub fn subchain(&self, n: usize) -> Result<DenseTensor> {
        let order = self.order();
        if order < 2 {
            return Err(Error::InvalidArgument(
                "sub-chain needs at least two cores".into(),
            ));
        }
        if n >= order {
            return Err(Error::ModeOutOfRange { mode: n, order });
        }
        let mut acc = self.cores[(n + 1) % order].clone();
        for step in 2..order {
            acc = multilinear_product(&acc, &self.cores[(n + step) % order])?;
        }
        Ok(acc)
    }

    /// `G^{≠n}_[2]`: rows run over the sub-chain's middle index, columns over
    /// `(rₙ, rₙ₊₁)` with `rₙ` slowest.
    pub fn subchain_unfold2(&self, n: usize) -> Result<Matrix> {
        Ok(subchain_to_unfold2(&self.subchain(n)?))
    }

    /// Full reconstruction: element `i` is `Tr(G₀(i₀) G₁(i₁) ⋯ G_{N-1}(i_{N-1}))`.
    pub fn reconstruct(&self) -> DenseTensor {
        let mut chain = self.cores[0].clone();
        for c in &self.cores[1..] {
            chain = multilinear_product(&chain, c).expect("ring ranks validated");
        }
        let (r, j) = (chain.shape()[0], chain.shape()[1]);
        let d = chain.data();
        let data = (0..j)
            .map(|jj| (0..r).map(|a| d[(a * j + jj) * r + a]).sum())
            .collect();
        DenseTensor::new(self.shape(), data).expect("shape matches cores")
    }

    /// `(G^{≠n}_[2])ᵀ G^{≠n}_[2]` without forming the sub-chain: each
    /// remaining core is contracted with itself over its data mode and the
    /// resulting `R²×R'²` transfer matrices are multiplied around the ring.
    pub fn subchain_gram(&self, n: usize) -> Result<Matrix> {
        let order = self.order();
        if order < 2 {
            return Err(Error::InvalidArgument(
                "sub-chain Gram needs at least two cores".into(),
            ));
        }
        if n >= order {
            return Err(Error::ModeOutOfRange { mode: n, order });
        }
        let mut transfer = self.self_contraction((n + 1) % order);
        for step in 2..order {
            transfer = transfer.matmul(&self.self_contraction((n + step) % order))?;
        }
        // transfer[(q,q'),(p,p')] with q ∈ Rₙ₊₁, p ∈ Rₙ
        let rp = self.cores[n].shape()[0];
        let rq = self.cores[n].shape()[2];
        let dim = rp * rq;
        let mut gram = Matrix::zeros(dim, dim);
        for p in 0..rp {
            for q in 0..rq {
                for pp in 0..rp {
                    for qq in 0..rq {
                        gram.set(
                            p * rq + q,
                            pp * rq + qq,
                            transfer.get(q * rq + qq, p * rp + pp),
                        );
                    }
                }
            }
        }
        Ok(gram)
    }

    /// `Q[(a,a'),(b,b')] = Σᵢ G(a,i,b) G(a',i,b')` for core `m`.
    fn self_contraction(&self, m: usize) -> Matrix {
        let s = self.cores[m].shape();
        let (ra, rb) = (s[0], s[2]);
        let g2 = self.core_unfold2(m);
        // gram[(a,b),(a',b')]
        let gram = g2.matmul_tn(&g2).expect("square by construction");
        let mut q = Matrix::zeros(ra * ra, rb * rb);
        for a in 0..ra {
            for b in 0..rb {
                for aa in 0..ra {
                    for bb in 0..rb {
                        q.set(a * ra + aa, b * rb + bb, gram.get(a * rb + b, aa * rb + bb));
                    }
                }
            }
        }
        q
    }
}

/// Mode-2 cyclic unfolding of a `(Rq, J, Rp)` chain: `J × Rp·Rq` with entry
/// `[j, p·Rq + q] = chain[q, j, p]`.
pub(crate) fn subchain_to_unfold2(chain: &DenseTensor) -> Matrix {
    let s = chain.shape();
    let (rq, j, rp) = (s[0], s[1], s[2]);
    let d = chain.data();
    let mut out = vec![0.0; j * rp * rq];
    for q in 0..rq {
        for jj in 0..j {
            let src = &d[(q * j + jj) * rp..(q * j + jj + 1) * rp];
            let row = &mut out[jj * rp * rq..(jj + 1) * rp * rq];
            for (p, &v) in src.iter().enumerate() {
                row[p * rq + q] = v;
            }
        }
    }
    Matrix::new(j, rp * rq, out).expect("sized above")
}
