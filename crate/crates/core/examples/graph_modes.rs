// The same data under hypergraph, pairwise-graph and no regularization.

use hgntr::cli::synth;
use hgntr::{solve, GraphMode, Result, SolverConfig};

/// Returns the final objectives in the order hypergraph, pairwise, none.
pub fn run_example() -> Result<Vec<f64>> {
    let data = synth::clusters(&[5, 5], 3, 8, 0.2, 11)?;
    let mut out = Vec::new();
    for mode in [GraphMode::Hypergraph, GraphMode::PairwiseGraph, GraphMode::None] {
        let config = SolverConfig::new(vec![2, 2, 2]).with_beta(0.5).with_graph_mode(mode).with_sweeps(40);
        let r = solve(&data.tensor, &config)?;
        println!("{mode:?}: objective {:.4e}, fit {:.4e}", r.final_objective(), r.final_fit());
        out.push(r.final_objective());
    }
    Ok(out)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
