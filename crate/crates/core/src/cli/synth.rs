//! Synthetic tensors with known structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::eval::Labeling;
use crate::lra::TuckerApprox;
use crate::tensor::{DenseTensor, Matrix, TRCores};

fn check_positive(what: &str, v: &[usize]) -> Result<()> {
    if v.is_empty() || v.contains(&0) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be a nonempty list of positive integers, got {v:?}"
        )));
    }
    Ok(())
}

/// Exact tensor-ring tensor from uniform(0,1) cores.
pub fn tr_exact(shape: &[usize], ranks: &[usize], seed: u64) -> Result<(DenseTensor, TRCores)> {
    check_positive("shape", shape)?;
    check_positive("ranks", ranks)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // the solver draws its initial cores from stream 0 of the same seed
    rng.set_stream(1);
    let cores = TRCores::random_uniform(shape, ranks, &mut rng)?;
    Ok((cores.reconstruct(), cores))
}

/// Exact Tucker tensor with uniform(0,1) core and factors (hence nonnegative).
pub fn tucker_exact(shape: &[usize], ranks: &[usize], seed: u64) -> Result<(DenseTensor, TuckerApprox)> {
    check_positive("shape", shape)?;
    check_positive("ranks", ranks)?;
    if shape.len() != ranks.len() || ranks.iter().zip(shape).any(|(r, i)| r > i) {
        return Err(Error::InvalidArgument(format!(
            "Tucker ranks {ranks:?} incompatible with shape {shape:?}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = DenseTensor::random_uniform(ranks, &mut rng);
    let factors = shape
        .iter()
        .zip(ranks)
        .map(|(&i, &r)| Matrix::from_fn(i, r, |_, _| rng.random::<f64>()))
        .collect();
    let t = TuckerApprox::new(core, factors)?;
    Ok((t.reconstruct(), t))
}

/// Clustered samples stacked along the last mode.
#[derive(Clone, Debug)]
pub struct ClusterData {
    pub tensor: DenseTensor,
    pub labels: Labeling,
}

/// `classes` uniform(0,1) prototypes of shape `proto_shape`, each repeated
/// `per_class` times with an added `eta·uniform(0,1)` perturbation per entry.
/// Sample `s` belongs to class `s / per_class`.
pub fn clusters(
    proto_shape: &[usize],
    classes: usize,
    per_class: usize,
    eta: f64,
    seed: u64,
) -> Result<ClusterData> {
    check_positive("prototype shape", proto_shape)?;
    if classes == 0 || per_class == 0 {
        return Err(Error::InvalidArgument("classes and per_class must be positive".into()));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("eta must be >= 0, got {eta}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let protos: Vec<DenseTensor> = (0..classes)
        .map(|_| DenseTensor::random_uniform(proto_shape, &mut rng))
        .collect();
    let n = classes * per_class;
    let d: usize = proto_shape.iter().product();
    // sample-major staging, then moved to the last mode
    let mut staged = Vec::with_capacity(n * d);
    for s in 0..n {
        let proto = &protos[s / per_class];
        staged.extend(proto.data().iter().map(|&v| v + eta * rng.random::<f64>()));
    }
    let mut shape = vec![n];
    shape.extend_from_slice(proto_shape);
    let order = shape.len();
    let staged = DenseTensor::new(shape, staged)?;
    let perm: Vec<usize> = (1..order).chain(std::iter::once(0)).collect();
    let tensor = staged.permute(&perm)?;
    let labels = Labeling::new((0..n).map(|s| s / per_class).collect(), classes)?;
    Ok(ClusterData { tensor, labels })
}
