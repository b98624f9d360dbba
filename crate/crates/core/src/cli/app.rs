//! Argument parsing and command dispatch for the `hgntr` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_list, RunConfig};
use super::experiment::{self, BenchSpec};
use super::format;
use super::synth;
use crate::error::{Error, Result};
use crate::eval::add_gaussian_noise;
use crate::tensor::TRCores;

#[derive(Debug, Parser)]
#[command(name = "hgntr", version, about = "Hypergraph-regularized nonnegative tensor ring factorization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic tensor.
    Synth {
        #[command(subcommand)]
        kind: SynthKind,
    },
    /// Factorize a tensor and write cores, a JSON record and a trace CSV.
    Decompose(DecomposeArgs),
    /// Factorize, run k-means on the sample core, score against labels.
    Cluster(ClusterArgs),
    /// Add Gaussian noise at a prescribed SNR.
    Noise(NoiseArgs),
    /// Time exact against low-rank accelerated sweeps over cube sizes.
    Bench(BenchArgs),
    /// Write the sample-mode basis as grayscale PGM images.
    ExportBasis(ExportArgs),
}

#[derive(Debug, Subcommand)]
pub enum SynthKind {
    /// Exact tensor ring from uniform(0,1) cores.
    TrExact {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        ranks: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the generating cores here.
        #[arg(long)]
        cores_dir: Option<PathBuf>,
    },
    /// Exact Tucker tensor from a uniform(0,1) core and factors.
    TuckerExact {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        ranks: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Class prototypes plus uniform perturbations, samples on the last mode.
    Clusters {
        #[arg(long)]
        proto_shape: String,
        #[arg(long)]
        classes: usize,
        #[arg(long)]
        per_class: usize,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        labels: PathBuf,
    },
}

/// Solver settings. Each flag overrides the same key from `--config`.
#[derive(Debug, Default, Args)]
pub struct ConfigArgs {
    /// File of `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub ranks: Option<String>,
    /// Enables the low-rank accelerated solver.
    #[arg(long)]
    pub tucker_ranks: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub t_max: Option<String>,
    #[arg(long)]
    pub sweeps: Option<String>,
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// hypergraph, pairwise-graph or none.
    #[arg(long)]
    pub graph_mode: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub repetitions: Option<String>,
    #[arg(long)]
    pub restarts: Option<String>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)?;
        }
        let flags = [
            ("ranks", &self.ranks),
            ("tucker_ranks", &self.tucker_ranks),
            ("beta", &self.beta),
            ("k", &self.k),
            ("t_max", &self.t_max),
            ("sweeps", &self.sweeps),
            ("tol", &self.tol),
            ("epsilon", &self.epsilon),
            ("graph_mode", &self.graph_mode),
            ("seed", &self.seed),
            ("repetitions", &self.repetitions),
            ("restarts", &self.restarts),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                c.set(key, v)?;
            }
        }
        if c.ranks.is_empty() {
            return Err(Error::InvalidArgument("TR ranks are required (--ranks or ranks = ...)".into()));
        }
        Ok(c)
    }
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Clamp negative input entries to zero instead of failing.
    #[arg(long)]
    pub truncate_negatives: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Where to write the JSON record; stdout when absent.
    #[arg(long)]
    pub record: Option<PathBuf>,
    #[arg(long)]
    pub truncate_negatives: bool,
    #[command(flatten)]
    pub config: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Target SNR in dB; `inf` leaves the tensor unchanged.
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Clamp negative results to zero.
    #[arg(long)]
    pub truncate: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Cube side lengths, e.g. `16,32,48`.
    #[arg(long, default_value = "16,24,32,48")]
    pub sizes: String,
    #[arg(long, default_value_t = 3)]
    pub order: usize,
    #[arg(long, default_value_t = 4)]
    pub rank: usize,
    #[arg(long, default_value_t = 8)]
    pub tucker_rank: usize,
    #[arg(long, default_value_t = 5)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    /// Directory holding `core_0.ntf`, `core_1.ntf`, ...
    #[arg(long)]
    pub cores_dir: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Write at most this many images.
    #[arg(long)]
    pub limit: Option<usize>,
}

pub fn core_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("core_{n}.ntf"))
}

pub fn save_cores(dir: &Path, cores: &TRCores) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    for (n, c) in cores.cores().iter().enumerate() {
        format::save_tensor(&core_path(dir, n), c)?;
    }
    Ok(())
}

/// Reads `core_0.ntf`, `core_1.ntf`, ... until the first missing index.
pub fn load_cores(dir: &Path) -> Result<TRCores> {
    let mut cores = Vec::new();
    while core_path(dir, cores.len()).exists() {
        cores.push(format::load_tensor(&core_path(dir, cores.len()))?);
    }
    if cores.is_empty() {
        return Err(Error::InvalidArgument(format!("no core_0.ntf in {}", dir.display())));
    }
    TRCores::new(cores)
}

fn load_input(path: &Path, truncate: bool) -> Result<crate::DenseTensor> {
    let mut x = format::load_tensor(path)?;
    if truncate {
        experiment::truncate_negatives(&mut x);
    }
    Ok(x)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn run_synth(kind: SynthKind) -> Result<()> {
    match kind {
        SynthKind::TrExact { shape, ranks, seed, out, cores_dir } => {
            let (x, cores) = synth::tr_exact(&parse_list(&shape)?, &parse_list(&ranks)?, seed)?;
            format::save_tensor(&out, &x)?;
            if let Some(dir) = cores_dir {
                save_cores(&dir, &cores)?;
            }
            println!("wrote {} {:?}", out.display(), x.shape());
        }
        SynthKind::TuckerExact { shape, ranks, seed, out } => {
            let (x, _) = synth::tucker_exact(&parse_list(&shape)?, &parse_list(&ranks)?, seed)?;
            format::save_tensor(&out, &x)?;
            println!("wrote {} {:?}", out.display(), x.shape());
        }
        SynthKind::Clusters { proto_shape, classes, per_class, eta, seed, out, labels } => {
            let data = synth::clusters(&parse_list(&proto_shape)?, classes, per_class, eta, seed)?;
            format::save_tensor(&out, &data.tensor)?;
            format::save_labels(&labels, data.labels.labels())?;
            println!("wrote {} {:?} and {}", out.display(), data.tensor.shape(), labels.display());
        }
    }
    Ok(())
}

/// Runs one command.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { kind } => run_synth(kind)?,
        Command::Decompose(a) => {
            let config = a.config.resolve()?;
            let x = load_input(&a.input, a.truncate_negatives)?;
            let (result, record) = experiment::decompose(&x, &config)?;
            save_cores(&a.out_dir, &result.cores)?;
            record.write_json(create(&a.out_dir.join("record.json"))?)?;
            format::write_trace_csv(create(&a.out_dir.join("trace.csv"))?, &result)?;
            println!(
                "{} sweeps, relative fit {:.6e}, objective {:.6e}",
                result.sweeps_run,
                result.final_fit(),
                result.final_objective()
            );
        }
        Command::Cluster(a) => {
            let config = a.config.resolve()?;
            let x = load_input(&a.input, a.truncate_negatives)?;
            let labels = format::load_labels(&a.labels)?;
            let record = experiment::cluster(&x, &labels, &config)?;
            match &a.record {
                Some(path) => {
                    record.write_json(create(path)?)?;
                    if let Some(s) = &record.best_of_restarts {
                        println!("ACC {:.4} NMI {:.4} PUR {:.4}", s.mean.acc, s.mean.nmi, s.mean.pur);
                    }
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    record.write_json(&mut lock)?;
                    writeln!(lock)?;
                }
            }
        }
        Command::Noise(a) => {
            let x = format::load_tensor(&a.input)?;
            let y = add_gaussian_noise(&x, a.snr_db, a.seed, a.truncate)?;
            format::save_tensor(&a.out, &y)?;
        }
        Command::Bench(a) => {
            let spec = BenchSpec {
                sizes: parse_list(&a.sizes)?,
                order: a.order,
                rank: a.rank,
                tucker_rank: a.tucker_rank,
                sweeps: a.sweeps,
                seed: a.seed,
            };
            let rows = experiment::bench(&spec)?;
            match &a.out {
                Some(path) => experiment::write_bench_csv(create(path)?, &rows)?,
                None => experiment::write_bench_csv(std::io::stdout().lock(), &rows)?,
            }
        }
        Command::ExportBasis(a) => {
            let cores = load_cores(&a.cores_dir)?;
            let basis = cores.subchain_unfold2(cores.order() - 1)?;
            let paths = format::export_basis_images(&a.out_dir, &basis, a.width, a.height, a.limit)?;
            println!("wrote {} images to {}", paths.len(), a.out_dir.display());
        }
    }
    Ok(())
}

/// One JSON object: `{"error": kind, "message": text}`.
pub fn error_line(e: &Error) -> String {
    serde_json::json!({ "error": e.kind(), "message": e.to_string() }).to_string()
}

/// Parses the process arguments and runs; errors go to stderr as one JSON line.
pub fn main_entry() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
