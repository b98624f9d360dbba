// kNN hypergraph over a handful of 2-D points and its Laplacian.

use hgntr::{Hypergraph, Matrix, Result};

/// Returns the largest `|L·1|` row sum.
pub fn run_example() -> Result<f64> {
    let points = Matrix::new(
        6,
        2,
        vec![0.0, 0.0, 0.1, 0.0, 0.0, 0.1, 5.0, 5.0, 5.1, 5.0, 5.0, 5.1],
    )?;
    let g = Hypergraph::knn(&points, 2)?;
    println!("sigma = {:.4}", g.sigma());
    for (e, members) in g.incidence().edges().iter().enumerate() {
        println!("edge {e}: {members:?} weight {:.4}", g.edge_weights()[e]);
    }
    let l = g.laplacian();
    let worst = (0..l.rows())
        .map(|i| l.row(i).iter().sum::<f64>().abs())
        .fold(0.0, f64::max);
    println!("max |L 1| = {worst:.2e}");

    let pairwise = Hypergraph::pairwise_knn(&points, 2)?;
    println!("graph mode uses {} two-vertex edges", pairwise.n_edges());
    Ok(worst)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
