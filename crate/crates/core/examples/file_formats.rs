// Write and read tensors, labels, a convergence trace and basis images.

use std::fs::File;

use hgntr::cli::format::{export_basis_images, load_labels, load_tensor, save_labels, save_tensor, write_trace_csv};
use hgntr::cli::{load_cores, save_cores, synth};
use hgntr::{solve, Result, SolverConfig};

/// Returns the number of basis images written.
pub fn run_example() -> Result<usize> {
    let dir = std::env::temp_dir().join(format!("hgntr-formats-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let data = synth::clusters(&[6, 4], 2, 5, 0.05, 1)?;
    save_tensor(&dir.join("x.ntf"), &data.tensor)?;
    save_labels(&dir.join("labels.txt"), data.labels.labels())?;
    let x = load_tensor(&dir.join("x.ntf"))?;
    assert_eq!(x, data.tensor);
    assert_eq!(load_labels(&dir.join("labels.txt"))?, data.labels);

    let r = solve(&x, &SolverConfig::new(vec![2, 2, 2]).with_sweeps(20))?;
    write_trace_csv(File::create(dir.join("trace.csv"))?, &r)?;
    save_cores(&dir.join("cores"), &r.cores)?;
    let cores = load_cores(&dir.join("cores"))?;
    let basis = cores.subchain_unfold2(cores.order() - 1)?;
    let images = export_basis_images(&dir.join("basis"), &basis, 4, 6, None)?;
    println!("wrote {} images under {}", images.len(), dir.display());
    std::fs::remove_dir_all(&dir)?;
    Ok(images.len())
}

fn main() -> Result<()> {
    run_example()?;
    Ok(())
}
