use hgntr::hypergraph::samples_from_tensor;
use hgntr::solver::{
    build_regularizer, exact_numerator, low_rank_numerator, mur_update_inner, objective, projected_cores,
    DataTerm, Regularizer,
};
use hgntr::tensor::{mode_n_product, unfold_tr};
use hgntr::{hosvd_truncate, DenseTensor, Hypergraph, Matrix, SolverConfig, TRCores};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ring(shape: &[usize], ranks: &[usize], seed: u64) -> TRCores {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TRCores::random_uniform(shape, ranks, &mut rng).unwrap()
}

fn data(shape: &[usize], seed: u64) -> DenseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseTensor::random_uniform(shape, &mut rng)
}

#[test]
fn low_rank_numerator_matches_surrogate_product() {
    let shape = [7, 6, 8, 5];
    let x = data(&shape, 1);
    let tucker = hosvd_truncate(&x, &[2, 3, 4, 5]).unwrap();
    let surrogate = tucker.reconstruct();
    let cores = ring(&shape, &[2, 3, 2, 2], 2);
    let z = projected_cores(&cores, &tucker).unwrap();
    let c_unf: Vec<Matrix> = (0..4).map(|n| unfold_tr(tucker.core(), n).unwrap()).collect();
    for n in 0..4 {
        let fast = low_rank_numerator(&tucker, &c_unf, &z, n).unwrap();
        let brute = exact_numerator(&unfold_tr(&surrogate, n).unwrap(), &cores, n).unwrap();
        assert!(fast.rel_diff(&brute) <= 1e-8, "mode {n}: {}", fast.rel_diff(&brute));
    }
}

#[test]
fn exact_data_is_a_fixed_point() {
    let cores = ring(&[4, 3, 5], &[2, 2, 3], 3);
    let x = cores.reconstruct();
    for n in 0..3 {
        let g = mur_update_inner(n, DataTerm::Exact(&x), &cores, None, 0.0, 1e-300).unwrap();
        assert!(g.rel_diff(&cores.core_unfold2(n)) <= 1e-12);
    }
}

#[test]
fn objective_matches_materialized_laplacian() {
    let x = data(&[4, 3, 9], 4);
    let cores = ring(&[4, 3, 9], &[2, 3, 2], 5);
    let cfg = SolverConfig::new(vec![2, 3, 2]).with_k(3).with_beta(0.4);
    let reg = build_regularizer(&x, &cfg).unwrap().unwrap();
    let fast = objective(&x, &cores, Some(&reg), 0.4).unwrap();

    let graph = Hypergraph::knn(&samples_from_tensor(&x).unwrap(), 3).unwrap();
    let l = graph.laplacian();
    let g = cores.core_unfold2(2);
    let quad = g.matmul_tn(&l.matmul(&g).unwrap()).unwrap();
    let trace: f64 = (0..quad.rows()).map(|i| quad.get(i, i)).sum();
    let resid = x.distance(&cores.reconstruct());
    let direct = 0.5 * resid * resid + 0.2 * trace;
    assert!((fast - direct).abs() <= 1e-10 * direct);

    let r = Regularizer::from_graph(&graph);
    assert!((r.quadratic(&g).unwrap() - trace).abs() <= 1e-10 * trace.abs().max(1.0));
}

#[test]
fn sample_permutation_conjugates_the_laplacian() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 15;
    let pts = Matrix::from_fn(n, 3, |_, _| rng.random::<f64>());
    let perm: Vec<usize> = (0..n).map(|i| (i * 7 + 3) % n).collect();
    let permuted = Matrix::from_fn(n, 3, |i, j| pts.get(perm[i], j));
    let l = Hypergraph::knn(&pts, 4).unwrap().laplacian();
    let lp = Hypergraph::knn(&permuted, 4).unwrap().laplacian();
    for i in 0..n {
        for j in 0..n {
            let d = (lp.get(i, j) - l.get(perm[i], perm[j])).abs();
            assert!(d <= 1e-12 * (1.0 + l.get(perm[i], perm[j]).abs()), "{i},{j}: {d:e}");
        }
    }
}

#[test]
fn tucker_error_shrinks_with_rank() {
    let x = data(&[6, 5, 7], 7);
    let mut last = f64::INFINITY;
    for r in 1..=5 {
        let err = hosvd_truncate(&x, &[r, 3, 4]).unwrap().reconstruct().distance(&x);
        assert!(err <= last + 1e-12);
        last = err;
    }
}

#[test]
fn tucker_reconstruction_is_a_product_chain() {
    let x = data(&[5, 4, 6], 8);
    let t = hosvd_truncate(&x, &[3, 2, 4]).unwrap();
    let mut chain = t.core().clone();
    for n in 0..3 {
        chain = mode_n_product(&chain, t.factor(n), n).unwrap();
    }
    assert!(t.reconstruct().max_abs_diff(&chain) <= 1e-12);
    let mut zero = t.core().clone();
    zero.scale(0.0);
    let z = hgntr::TuckerApprox::new(zero, t.factors().to_vec()).unwrap();
    assert_eq!(z.reconstruct().frobenius_norm(), 0.0);
}
