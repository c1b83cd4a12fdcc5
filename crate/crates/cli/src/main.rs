use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wvc_core::evo::Algorithm;
use wvc_core::experiment::{self, ExperimentConfig, ExperimentError};
use wvc_core::graph::{self, Genotype, GraphError, InstanceKind, WeightedGraph};

const EXIT_TARGET_MISSED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INSTANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "wvc", version, about = "Evolutionary multi-objective search for weighted vertex cover")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated instance in the text format.
    Generate(GenerateArgs),
    /// Solve the LP relaxation of G(x).
    Lp(LpArgs),
    /// Compute OPT and a witness cover.
    Exact(ExactArgs),
    /// Run one trial.
    Run(RunArgs),
    /// Run a batch of trials and write CSV rows plus a JSON summary.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gnp,
    Path,
    Star,
    CompleteBipartite,
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Vertex count (gnp, path).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (gnp).
    #[arg(long)]
    p: Option<f64>,
    /// Leaves (star).
    #[arg(long)]
    k: Option<usize>,
    /// Side sizes (complete-bipartite).
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    #[arg(long, default_value_t = 1)]
    wmax: u64,
}

impl GeneratorArgs {
    fn kind(&self) -> Result<InstanceKind, Failure> {
        let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| Failure::usage(format!("--{flag} is required")));
        match self.kind {
            None => Err(Failure::usage("either --instance or --kind is required")),
            Some(Kind::Gnp) => Ok(InstanceKind::Gnp {
                n: need(self.n, "n")?,
                p: self.p.ok_or_else(|| Failure::usage("--p is required"))?,
            }),
            Some(Kind::Path) => Ok(InstanceKind::Path { n: need(self.n, "n")? }),
            Some(Kind::Star) => Ok(InstanceKind::Star { k: need(self.k, "k")? }),
            Some(Kind::CompleteBipartite) => {
                Ok(InstanceKind::CompleteBipartite { a: need(self.a, "a")?, b: need(self.b, "b")? })
            }
        }
    }

    fn generate(&self, seed: u64) -> Result<WeightedGraph, Failure> {
        graph::gen_instance(self.kind()?, self.wmax, seed).map_err(|e| match e {
            GraphError::InvalidParams(_) => Failure::usage(e.to_string()),
            other => Failure::instance(other.to_string()),
        })
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    instance: Option<PathBuf>,
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Seed for a generated instance.
    #[arg(long, default_value_t = 0)]
    instance_seed: u64,
}

impl InstanceArgs {
    fn load(&self) -> Result<WeightedGraph, Failure> {
        match &self.instance {
            Some(path) => load_instance(path),
            None => self.generator.generate(self.instance_seed),
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args)]
struct LpArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Bitstring x; defaults to 0^n.
    #[arg(long)]
    selection: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long, value_parser = parse_algorithm)]
    algo: Algorithm,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    target_ratio: Option<f64>,
    /// Target ratio 1+E when no --target-ratio is given.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Known OPT (skips the exact solver).
    #[arg(long)]
    opt: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monitor archive size bounds every iteration.
    #[arg(long)]
    check_bounds: bool,
    /// Keep running after the target until 0^n is in the archive.
    #[arg(long)]
    await_zero: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl TrialArgs {
    fn config(&self) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(self.algo);
        c.seed_base = self.seed;
        c.budget = self.budget;
        c.target_ratio = self.target_ratio;
        c.epsilon = self.epsilon;
        c.opt = self.opt;
        c.check_bounds = self.check_bounds;
        c.await_zero_string = self.await_zero;
        c
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    trial: TrialArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    trial: TrialArgs,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Run trials one after another instead of on the thread pool.
    #[arg(long)]
    sequential: bool,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: wvc_core::evo::EvoError| e.to_string())
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, msg: msg.into() }
    }

    fn instance(msg: impl Into<String>) -> Self {
        Self { code: EXIT_INSTANCE, msg: msg.into() }
    }
}

impl From<ExperimentError> for Failure {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config(_) | ExperimentError::Evo(_) => Failure::usage(e.to_string()),
            ExperimentError::Graph(_) | ExperimentError::Exact(_) => Failure::instance(e.to_string()),
            ExperimentError::Io(_) | ExperimentError::Csv(_) | ExperimentError::Json(_) => {
                Failure::instance(e.to_string())
            }
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::instance(e.to_string())
    }
}

fn load_instance(path: &Path) -> Result<WeightedGraph, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))?;
    graph::parse(&text).map_err(|e| Failure::instance(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, body: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(body.as_bytes())?;
            if !body.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(v).map_err(|e| Failure::instance(e.to_string()))
}

fn cmd_generate(args: &GenerateArgs) -> Result<u8, Failure> {
    let g = args.generator.generate(args.seed)?;
    emit(args.out.as_deref(), &graph::serialize(&g))?;
    Ok(0)
}

fn cmd_lp(args: &LpArgs) -> Result<u8, Failure> {
    let g = load_instance(&args.instance)?;
    let x = match &args.selection {
        Some(s) => s.parse::<Genotype>().map_err(|e| Failure::usage(e.to_string()))?,
        None => Genotype::zeros(g.n()),
    };
    let report = experiment::lp_report(&g, &x)?;
    let body = match args.format {
        Format::Json => to_json(&report)?,
        _ => report.to_string(),
    };
    emit(None, &body)?;
    Ok(0)
}

fn cmd_exact(args: &ExactArgs) -> Result<u8, Failure> {
    let g = load_instance(&args.instance)?;
    let report = experiment::exact_report(&g)?;
    let body = match args.format {
        Format::Json => to_json(&report)?,
        _ => report.to_string(),
    };
    emit(None, &body)?;
    Ok(0)
}

fn cmd_run(args: &RunArgs) -> Result<u8, Failure> {
    let g = args.trial.instance.load()?;
    let report = experiment::run_single(&args.trial.config(), &g)?;
    let json = report.to_json()?;
    match args.format {
        Format::Json => emit(None, &json)?,
        _ => emit(None, &report.to_string())?,
    }
    if let Some(path) = &args.trial.out {
        fs::write(path, format!("{json}\n"))?;
    }
    Ok(if report.target_met() { 0 } else { EXIT_TARGET_MISSED })
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<u8, Failure> {
    let g = args.trial.instance.load()?;
    let mut config = args.trial.config();
    config.trials = args.trials;
    config.parallel = !args.sequential;

    let cancel = Arc::new(AtomicBool::new(false));
    {
        let cancel = Arc::clone(&cancel);
        // Only fails if a handler is already installed.
        let _ = ctrlc::set_handler(move || cancel.store(true, Ordering::Relaxed));
    }
    let result = experiment::run_experiment(&config, &g, Some(&cancel))?;

    let summary = result.summary_json()?;
    match args.format {
        Format::Json => emit(args.trial.out.as_deref(), &result.to_json()?)?,
        _ => {
            let mut csv = Vec::new();
            result.write_csv(&mut csv)?;
            let csv = String::from_utf8(csv).expect("csv output is utf-8");
            match &args.trial.out {
                Some(path) => {
                    fs::write(path, &csv)?;
                    fs::write(path.with_extension("summary.json"), format!("{summary}\n"))?;
                }
                None => {
                    emit(None, &csv)?;
                    eprintln!("{summary}");
                }
            }
        }
    }
    if result.summary.interrupted {
        eprintln!("interrupted after {} of {} trials", result.summary.completed, result.summary.trials);
    }
    Ok(if result.summary.bound_violations > 0 { EXIT_TARGET_MISSED } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Lp(a) => cmd_lp(a),
        Command::Exact(a) => cmd_exact(a),
        Command::Run(a) => cmd_run(a),
        Command::Experiment(a) => cmd_experiment(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
