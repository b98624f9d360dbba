// Synthetic clustered samples, HGNTR features and k-means scores.

use hgntr::cli::{cluster, synth, RunConfig};
use hgntr::Result;

/// Returns the mean best-of-restarts ACC.
pub fn run_example() -> Result<f64> {
    let data = synth::clusters(&[8, 8], 4, 15, 0.1, 5)?;
    let config = RunConfig {
        ranks: vec![3, 3, 3],
        sweeps: 50,
        repetitions: 3,
        ..RunConfig::default()
    };
    let record = cluster(&data.tensor, &data.labels, &config)?;
    let best = record.best_of_restarts.expect("labels were given");
    let std = best.std.expect("three repetitions");
    println!(
        "ACC {:.3} ± {:.3}, NMI {:.3} ± {:.3}, PUR {:.3} ± {:.3}",
        best.mean.acc, std.acc, best.mean.nmi, std.nmi, best.mean.pur, std.pur
    );
    Ok(best.mean.acc)
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
