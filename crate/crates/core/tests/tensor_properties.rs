use hgntr::tensor::{fold, fold_tr, mode_n_product, unfold_classic, unfold_tr};
use hgntr::{DenseTensor, Matrix, TRCores};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=4, 2..=4)
}

fn tensor(shape: &[usize], seed: u64) -> DenseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseTensor::random_uniform(shape, &mut rng)
}

fn ring(shape: &[usize], ranks: &[usize], seed: u64) -> TRCores {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TRCores::random_uniform(shape, ranks, &mut rng).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folds_are_exact_inverses(shape in shape_strategy(), seed in any::<u64>()) {
        let x = tensor(&shape, seed);
        for n in 0..shape.len() {
            prop_assert_eq!(&fold(&unfold_classic(&x, n).unwrap(), n, &shape).unwrap(), &x);
            prop_assert_eq!(&fold_tr(&unfold_tr(&x, n).unwrap(), n, &shape).unwrap(), &x);
        }
    }

    #[test]
    fn unfoldings_preserve_norm(shape in shape_strategy(), seed in any::<u64>()) {
        let x = tensor(&shape, seed);
        for n in 0..shape.len() {
            let m = unfold_tr(&x, n).unwrap();
            prop_assert_eq!(m.rows(), shape[n]);
            prop_assert!((m.frobenius_norm() - x.frobenius_norm()).abs() <= 1e-12 * x.frobenius_norm());
        }
    }

    #[test]
    fn cyclic_rotation_permutes_modes(
        shape in prop::collection::vec(1usize..=4, 3..=4),
        ranks in prop::collection::vec(1usize..=3, 4),
        k in 0usize..4,
        seed in any::<u64>(),
    ) {
        let n = shape.len();
        let cores = ring(&shape, &ranks[..n], seed);
        let k = k % n;
        let perm: Vec<usize> = (0..n).map(|m| (m + k) % n).collect();
        let rotated = cores.rotate(k).reconstruct();
        let expected = cores.reconstruct().permute(&perm).unwrap();
        prop_assert!(rotated.max_abs_diff(&expected) <= 1e-12);
    }

    #[test]
    fn gram_is_symmetric_psd_diagonal(
        shape in prop::collection::vec(1usize..=4, 3..=4),
        ranks in prop::collection::vec(1usize..=3, 4),
        seed in any::<u64>(),
    ) {
        let cores = ring(&shape, &ranks[..shape.len()], seed);
        for n in 0..shape.len() {
            let g = cores.subchain_gram(n).unwrap();
            prop_assert!(g.max_abs_diff(&g.transpose()) <= 1e-12 * (1.0 + g.frobenius_norm()));
            for i in 0..g.rows() {
                prop_assert!(g.get(i, i) >= 0.0);
            }
        }
    }

    #[test]
    fn mode_products_compose(seed in any::<u64>()) {
        let x = tensor(&[3, 4, 2], seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let a = Matrix::from_fn(5, 4, |_, _| rand::Rng::random::<f64>(&mut rng));
        let b = Matrix::from_fn(2, 5, |_, _| rand::Rng::random::<f64>(&mut rng));
        let twice = mode_n_product(&mode_n_product(&x, &a, 1).unwrap(), &b, 1).unwrap();
        let once = mode_n_product(&x, &b.matmul(&a).unwrap(), 1).unwrap();
        prop_assert!(twice.rel_diff(&once) <= 1e-12);
    }
}

#[test]
fn classic_and_cyclic_agree_on_first_and_last_mode_sets() {
    // for mode 0 both orders list the remaining modes 1..N ascending
    let x = tensor(&[2, 3, 4], 5);
    assert_eq!(unfold_classic(&x, 0).unwrap(), unfold_tr(&x, 0).unwrap());
    assert_ne!(unfold_classic(&x, 1).unwrap(), unfold_tr(&x, 1).unwrap());
}

#[test]
fn scaling_one_core_scales_the_tensor() {
    let cores = ring(&[3, 2, 4], &[2, 2, 3], 8);
    let mut scaled = cores.clone();
    scaled.scale_core(1, 2.5);
    let mut a = cores.reconstruct();
    a.scale(2.5);
    assert!(scaled.reconstruct().rel_diff(&a) < 1e-14);
}
