use std::path::Path;
use std::process::{Command, Output};

use hgntr::cli::format::{load_tensor, read_tensor, save_tensor, write_tensor};
use hgntr::{hosvd_truncate, DenseTensor};
use proptest::prelude::*;
use tempfile::tempdir;

fn hgntr(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgntr"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = hgntr(args, dir);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.trim()).expect("stderr is one JSON object")
}

proptest! {
    #[test]
    fn tensor_files_round_trip_bit_exact(
        shape in prop::collection::vec(1usize..=4, 1..=4),
        seed in any::<u64>(),
    ) {
        let len: usize = shape.iter().product();
        let mut state = seed;
        let data: Vec<f64> = (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = f64::from_bits(state);
                if v.is_finite() { v } else { -0.0 }
            })
            .collect();
        let x = DenseTensor::new(shape, data).unwrap();
        let mut buf = Vec::new();
        write_tensor(&mut buf, &x).unwrap();
        let back = read_tensor(&buf[..]).unwrap();
        prop_assert_eq!(back.shape(), x.shape());
        for (a, b) in back.data().iter().zip(x.data()) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn decompose_is_reproducible_and_writes_outputs() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "tr-exact", "--shape", "5,4,12", "--ranks", "2,2,2", "--seed", "3", "--out", "x.ntf"], d);
    for out in ["a", "b"] {
        ok(&["decompose", "--input", "x.ntf", "--out-dir", out, "--ranks", "2,2,2", "--sweeps", "15"], d);
    }
    let column = |name: &str, i: usize| -> Vec<String> {
        let text = std::fs::read_to_string(d.join(name).join("trace.csv")).unwrap();
        text.lines().map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
    };
    assert_eq!(column("a", 0)[0], "sweep");
    assert_eq!(column("a", 3)[0], "elapsed_seconds");
    assert_eq!(column("a", 1), column("b", 1));
    assert_eq!(column("a", 2), column("b", 2));
    assert_eq!(column("a", 0).len(), 17);

    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("a/record.json")).unwrap()).unwrap();
    assert_eq!(record["objective_trace"].as_array().unwrap().len(), 16);
    assert_eq!(record["config"]["sweeps"], 15);
    for n in 0..3 {
        let core = load_tensor(&d.join(format!("a/core_{n}.ntf"))).unwrap();
        assert_eq!(core.order(), 3);
        assert!(core.is_nonnegative());
    }
}

#[test]
fn negative_input_needs_the_flag() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    let mut x = DenseTensor::filled(&[3, 3, 8], 1.0);
    x.data_mut()[2] = -0.5;
    save_tensor(&d.join("neg.ntf"), &x).unwrap();
    let out = hgntr(&["decompose", "--input", "neg.ntf", "--out-dir", "o", "--ranks", "2,2,2", "--k", "3"], d);
    let err = error_json(&out);
    assert_eq!(err["error"], "negative_input");
    assert!(err["message"].as_str().unwrap().contains("1 negative"));
    ok(
        &["decompose", "--input", "neg.ntf", "--out-dir", "o", "--ranks", "2,2,2", "--k", "3", "--sweeps", "3", "--truncate-negatives"],
        d,
    );
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "clusters", "--proto-shape", "4,4", "--classes", "2", "--per-class", "6", "--eta", "0.05", "--out", "x.ntf", "--labels", "y.txt"], d);
    std::fs::write(d.join("run.cfg"), "ranks = 2,2,2\nbeta = 0.4\nsweeps = 7\nrepetitions = 2\nrestarts = 3\n").unwrap();
    ok(&["cluster", "--input", "x.ntf", "--labels", "y.txt", "--config", "run.cfg", "--beta", "0.2", "--record", "r.json"], d);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("r.json")).unwrap()).unwrap();
    assert_eq!(r["config"]["beta"], 0.2);
    assert_eq!(r["config"]["sweeps"], 7);
    assert_eq!(r["repetitions"].as_array().unwrap().len(), 2);
    assert_eq!(r["repetitions"][1]["seed"], 1);
    assert!(r["best_of_restarts"]["std"].is_object());
    assert!(r["mean_of_restarts"]["mean"]["acc"].as_f64().unwrap() > 0.0);

    // one repetition: no standard deviation
    ok(&["cluster", "--input", "x.ntf", "--labels", "y.txt", "--config", "run.cfg", "--repetitions", "1", "--record", "one.json"], d);
    let one: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("one.json")).unwrap()).unwrap();
    assert!(one["best_of_restarts"].get("std").is_none());

    std::fs::write(d.join("short.txt"), "0\n1\n").unwrap();
    let out = hgntr(&["cluster", "--input", "x.ntf", "--labels", "short.txt", "--ranks", "2,2,2"], d);
    assert_eq!(error_json(&out)["error"], "shape");
}

#[test]
fn synth_kinds() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "clusters", "--proto-shape", "3,2", "--classes", "3", "--per-class", "4", "--eta", "0", "--seed", "5", "--out", "c.ntf", "--labels", "c.txt"], d);
    let c = load_tensor(&d.join("c.ntf")).unwrap();
    let samples = hgntr::hypergraph::samples_from_tensor(&c).unwrap();
    for s in 0..12 {
        assert_eq!(samples.row(s), samples.row(s / 4 * 4));
    }
    let labels = std::fs::read_to_string(d.join("c.txt")).unwrap();
    assert_eq!(labels.lines().collect::<Vec<_>>(), ["0", "0", "0", "0", "1", "1", "1", "1", "2", "2", "2", "2"]);

    ok(&["synth", "tucker-exact", "--shape", "5,4,6,3", "--ranks", "2,2,2,2", "--seed", "1", "--out", "t.ntf"], d);
    let t = load_tensor(&d.join("t.ntf")).unwrap();
    assert!(hosvd_truncate(&t, &[2, 2, 2, 2]).unwrap().reconstruct().rel_diff(&t) <= 1e-9);

    let a = std::fs::read(d.join("t.ntf")).unwrap();
    ok(&["synth", "tucker-exact", "--shape", "5,4,6,3", "--ranks", "2,2,2,2", "--seed", "1", "--out", "t2.ntf"], d);
    assert_eq!(a, std::fs::read(d.join("t2.ntf")).unwrap());

    let out = hgntr(&["synth", "tr-exact", "--shape", "3,0", "--ranks", "1,1", "--out", "z.ntf"], d);
    assert_eq!(error_json(&out)["error"], "invalid_argument");
}

#[test]
fn noise_command() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "tr-exact", "--shape", "4,4,4", "--ranks", "2,2,2", "--out", "x.ntf"], d);
    ok(&["noise", "--input", "x.ntf", "--out", "same.ntf", "--snr-db", "inf"], d);
    assert_eq!(std::fs::read(d.join("x.ntf")).unwrap(), std::fs::read(d.join("same.ntf")).unwrap());
    ok(&["noise", "--input", "x.ntf", "--out", "n.ntf", "--snr-db", "-3", "--seed", "4", "--truncate"], d);
    let n = load_tensor(&d.join("n.ntf")).unwrap();
    assert!(n.is_nonnegative());
    ok(&["noise", "--input", "x.ntf", "--out", "m.ntf", "--snr-db", "20", "--seed", "4"], d);
    let (x, m) = (load_tensor(&d.join("x.ntf")).unwrap(), load_tensor(&d.join("m.ntf")).unwrap());
    assert!((hgntr::eval::snr_db(&x, &m) - 20.0).abs() < 1e-9);
}

#[test]
fn bench_rows_increase_in_size() {
    let dir = tempdir().unwrap();
    let csv = ok(&["bench", "--sizes", "10,6,8", "--sweeps", "1", "--rank", "2", "--tucker-rank", "3"], dir.path());
    let sizes: Vec<usize> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(sizes, vec![6, 8, 10]);
    assert!(csv.starts_with("size,elements,exact_seconds_per_sweep,lra_seconds_per_sweep"));
}

#[test]
fn export_basis_writes_pgm() {
    let dir = tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "tr-exact", "--shape", "4,3,10", "--ranks", "2,3,2", "--out", "x.ntf", "--cores-dir", "g"], d);
    ok(&["export-basis", "--cores-dir", "g", "--width", "3", "--height", "4", "--out-dir", "img"], d);
    let files: Vec<_> = std::fs::read_dir(d.join("img")).unwrap().collect();
    assert_eq!(files.len(), 4);
    let img = std::fs::read(d.join("img/basis_000.pgm")).unwrap();
    assert!(img.starts_with(b"P5\n3 4\n255\n"));
    let pixels = &img[b"P5\n3 4\n255\n".len()..];
    assert_eq!(pixels.len(), 12);
    assert_eq!(*pixels.iter().min().unwrap(), 0);
    assert_eq!(*pixels.iter().max().unwrap(), 255);

    let out = hgntr(&["export-basis", "--cores-dir", "g", "--width", "5", "--height", "4", "--out-dir", "img2"], d);
    assert_eq!(error_json(&out)["error"], "shape");
}
