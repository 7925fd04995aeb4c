//! Command-line surface of `su11net`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use su11net_core::verify;
use su11net_core::{DistributorKind, Scheme};

use crate::config::{parse_config, BackendKind, ConfigErrors, EncodingSpec, ExperimentConfig, Format, RSpec};
use crate::emit::{render, EmitError};
use crate::run::{run_experiment, Row};

/// Default output directory when neither `--out` nor the config names a path.
pub const OUT_DIR_ENV: &str = "SU11NET_OUT_DIR";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FLAGGED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "su11net", version, about = "Squeezed-light interferometer network sensitivity reports")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Displacement on one mode between a squeezer and its inverse.
    SingleDisplacement(SchemeArgs),
    /// Phase on one mode between a squeezer and its inverse.
    SinglePhase(SchemeArgs),
    /// Average displacement over M nodes.
    NetworkDisplacement(SchemeArgs),
    /// Average phase over M nodes, photon counting at port 1.
    NetworkPhase(SchemeArgs),
    /// Average phase over M nodes with a squeezed-coherent probe and homodyne readout.
    NetworkPhaseHomodyne(SchemeArgs),
    /// Run a config file (typically with a squeezing sweep).
    Sweep(SweepArgs),
    /// Run the acceptance checks and print a pass/fail table.
    Verify,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent and no default directory is set.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_parser = parse_format)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_backend)]
    pub backend: Option<BackendKind>,
    /// Per-mode Fock cutoff (also enables it for --qfi-numeric).
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Network average at which the slope is taken.
    #[arg(long)]
    pub seed_point: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of network nodes.
    #[arg(short = 'M', long = "modes")]
    pub modes: Option<usize>,
    /// Squeezing parameter.
    #[arg(long)]
    pub r: Option<f64>,
    /// Squeezing phase of the probe.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, value_parser = parse_distributor)]
    pub distributor: Option<DistributorKind>,
    /// Same value at every node.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "encoding")]
    pub uniform: Option<f64>,
    /// Comma-separated node values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub encoding: Option<Vec<f64>>,
    /// Coherent seed amplitude for the homodyne scheme.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub guard: Option<f64>,
    /// Also compute the QFI with the Fock oracle.
    #[arg(long)]
    pub qfi_numeric: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_backend(s: &str) -> Result<BackendKind, String> {
    s.parse()
}

fn parse_distributor(s: &str) -> Result<DistributorKind, String> {
    s.parse().map_err(|e: su11net_core::Error| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Io(String),
}

impl From<ConfigErrors> for Failure {
    fn from(e: ConfigErrors) -> Self {
        Failure::Config(e.to_string())
    }
}

fn load(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_config(&text)?)
}

fn apply_run_args(cfg: &mut ExperimentConfig, run: &RunArgs) {
    if let Some(kind) = run.backend {
        cfg.backend.kind = kind;
    }
    if let Some(c) = run.cutoff {
        cfg.backend.cutoff = Some(c);
    }
    if let Some(eta) = run.seed_point {
        cfg.eval_point = Some(eta);
    }
    if let Some(f) = run.output.format {
        cfg.output.format = f;
    }
    if let Some(p) = &run.output.out {
        cfg.output.path = Some(p.clone());
    }
}

fn scheme_config(scheme: Scheme, args: &SchemeArgs) -> Result<ExperimentConfig, Failure> {
    let mut cfg = match &args.config {
        Some(path) => {
            let cfg = load(path)?;
            if cfg.scheme != scheme {
                return Err(Failure::Config(format!(
                    "config error: {} describes scheme {}, not {scheme}",
                    path.display(),
                    cfg.scheme
                )));
            }
            cfg
        }
        None => ExperimentConfig::new(scheme, if scheme.is_single_mode() { 1 } else { 2 }),
    };
    if let Some(m) = args.modes {
        cfg.modes = m;
    }
    if let Some(r) = args.r {
        cfg.r = RSpec::Fixed(r);
    }
    if args.beta.is_some() {
        cfg.beta = args.beta;
    }
    if let Some(d) = args.distributor {
        cfg.distributor = d;
    }
    if let Some(u) = args.uniform {
        cfg.encoding = EncodingSpec::Uniform(u);
    }
    if let Some(v) = &args.encoding {
        cfg.encoding = EncodingSpec::Values(v.clone());
    }
    if args.alpha.is_some() {
        cfg.alpha_seed = args.alpha;
    }
    if args.guard.is_some() {
        cfg.backend.guard = args.guard;
    }
    if args.qfi_numeric {
        cfg.backend.qfi_numeric = true;
    }
    apply_run_args(&mut cfg, &args.run);
    cfg.validate()?;
    Ok(cfg)
}

fn destination(cfg: &ExperimentConfig, name: &str) -> Option<PathBuf> {
    if let Some(p) = &cfg.output.path {
        return Some(p.clone());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|dir| PathBuf::from(dir).join(format!("{name}.{}", cfg.output.format.extension())))
}

fn write_rows(rows: &[Row], cfg: &ExperimentConfig, name: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: EmitError| match e {
        EmitError::Empty => Failure::Config(e.to_string()),
        other => Failure::Io(other.to_string()),
    };
    let text = render(rows, cfg.output.format).map_err(io)?;
    match destination(cfg, name) {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("cannot create {}: {e}", dir.display())))?;
            }
            fs::write(&path, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("cannot write stdout: {e}"))),
    }
}

fn experiment(cfg: ExperimentConfig, name: &str, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, Failure> {
    let rows = run_experiment(&cfg);
    write_rows(&rows, &cfg, name, stdout)?;
    let flagged: Vec<&Row> = rows.iter().filter(|r| r.is_flagged()).collect();
    for row in &flagged {
        let flags: Vec<&str> = row.flags.iter().map(|f| f.as_str()).collect();
        let _ = write!(stderr, "flagged: {} M={} r={}: {}", row.scheme, row.modes, row.r, flags.join(";"));
        let _ = match &row.error {
            Some(e) => writeln!(stderr, " ({e})"),
            None => writeln!(stderr),
        };
    }
    Ok(if flagged.is_empty() { EXIT_OK } else { EXIT_FLAGGED })
}

fn verify_table(stdout: &mut dyn Write) -> Result<u8, Failure> {
    let outcomes = verify::run_all();
    let mut all = true;
    for o in &outcomes {
        all &= o.passed;
        writeln!(stdout, "{o}").map_err(|e| Failure::Io(format!("cannot write stdout: {e}")))?;
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    writeln!(stdout, "{passed}/{} criteria passed", outcomes.len())
        .map_err(|e| Failure::Io(format!("cannot write stdout: {e}")))?;
    Ok(if all { EXIT_OK } else { EXIT_FLAGGED })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::SingleDisplacement(a) => run_scheme(Scheme::SingleDisplacement, a, stdout, stderr),
        Command::SinglePhase(a) => run_scheme(Scheme::SinglePhase, a, stdout, stderr),
        Command::NetworkDisplacement(a) => run_scheme(Scheme::NetworkDisplacement, a, stdout, stderr),
        Command::NetworkPhase(a) => run_scheme(Scheme::NetworkPhase, a, stdout, stderr),
        Command::NetworkPhaseHomodyne(a) => run_scheme(Scheme::NetworkPhaseHomodyne, a, stdout, stderr),
        Command::Sweep(a) => load(&a.config).and_then(|mut cfg| {
            apply_run_args(&mut cfg, &a.run);
            cfg.validate()?;
            experiment(cfg, "sweep", stdout, stderr)
        }),
        Command::Verify => verify_table(stdout),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(msg)) => {
            let _ = writeln!(stderr, "{msg}");
            EXIT_CONFIG
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

fn run_scheme(scheme: Scheme, args: &SchemeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8, Failure> {
    let cfg = scheme_config(scheme, args)?;
    experiment(cfg, scheme.id(), stdout, stderr)
}
