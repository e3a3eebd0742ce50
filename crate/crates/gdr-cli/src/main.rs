//! `gdr`: batch front end for the gravitational class-contraction transform.
//!
//! Three subcommands:
//! * `run` transforms a labeled CSV and can record metrics, per-iteration
//!   scatter plots, and a replayable manifest of the resolved settings.
//! * `blobs` generates a synthetic Gaussian-blob dataset for experiments.
//! * `replay` reruns a recorded manifest, reproducing its outputs byte for
//!   byte.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 bad flags or invalid settings.

mod manifest;
mod svg;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use gdr_core::dataset::format_f64;
use gdr_core::{
    load_csv, make_blobs, write_csv, AlphaWeights, GdrConfig, GdrSession, IterationReport,
    LabeledDataset, Method, StepGuards,
};

use manifest::RunManifest;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values or settings the engine rejects. Exit code 2.
    Validation(String),
    /// Filesystem or CSV transport failures. Exit code 1.
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Io(msg) => f.write_str(msg),
        }
    }
}

fn core_error(e: gdr_core::Error) -> CliError {
    match e {
        gdr_core::Error::Io(_) | gdr_core::Error::Csv(_) => CliError::Io(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

#[derive(Parser)]
#[command(
    name = "gdr",
    version,
    about = "Pull same-class points together under simulated gravity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a labeled CSV dataset and write the moved points
    Run(RunArgs),
    /// Generate a synthetic Gaussian-blob dataset
    Blobs(BlobsArgs),
    /// Rerun a recorded manifest, reproducing its outputs exactly
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    /// Inverse-distance attraction in the working space
    Newtonian,
    /// Curved-metric attraction around each mass
    Schwarzschild,
    /// Flat-metric attraction around each mass
    Minkowski,
}

impl From<MethodArg> for Method {
    fn from(value: MethodArg) -> Method {
        match value {
            MethodArg::Newtonian => Method::Newtonian,
            MethodArg::Schwarzschild => Method::Schwarzschild,
            MethodArg::Minkowski => Method::Minkowski,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Input CSV with a header row and one label column
    #[arg(long)]
    input: PathBuf,

    /// Header name of the label column
    #[arg(long)]
    label_column: String,

    /// Attraction model moving the points
    #[arg(long, value_enum)]
    method: MethodArg,

    /// Output CSV path for the transformed dataset
    #[arg(long)]
    output: PathBuf,

    /// Movement weights "radial,polar,azimuthal"; each in [0, 1], summing to 1
    #[arg(long, value_name = "A1,A2,A3", default_value = "0.33,0.33,0.34")]
    alphas: String,

    /// Maximum number of iterations
    #[arg(long, default_value_t = 6)]
    max_iter: usize,

    /// Stop early when the relative total-variance change drops below this
    /// (0 disables early stopping)
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,

    /// Move points in the full input space instead of a 3-dimensional
    /// principal subspace (newtonian only)
    #[arg(long)]
    no_pca: bool,

    /// Neighborhood size for the per-class density sort (clamped to class
    /// size minus one)
    #[arg(long, default_value_t = 20)]
    lof_k: usize,

    /// Cap each pairwise move at the pair distance and average the
    /// accumulated moves over the class (newtonian only)
    #[arg(long)]
    stabilized: bool,

    /// Recorded in the manifest for provenance; the transform itself draws
    /// no randomness
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write per-iteration variance rows (iteration,class,variance,total)
    /// to this CSV
    #[arg(long)]
    metrics: Option<PathBuf>,

    /// Write initial.svg and iter_<t>.svg scatter plots into this directory
    #[arg(long)]
    plot_dir: Option<PathBuf>,

    /// Record the resolved settings to this JSON file for `gdr replay`
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct BlobsArgs {
    /// Number of classes
    #[arg(long, default_value_t = 10)]
    classes: usize,

    /// Points per class
    #[arg(long, default_value_t = 50)]
    per_class: usize,

    /// Feature dimensionality
    #[arg(long, default_value_t = 64)]
    dim: usize,

    /// Standard deviation of each class around its center
    #[arg(long, default_value_t = 1.0)]
    spread: f64,

    /// Class centers are drawn uniformly from [-center-scale, center-scale]
    #[arg(long, default_value_t = 10.0)]
    center_scale: f64,

    /// Generator seed
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Output CSV path
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReplayArgs {
    /// Manifest JSON written by a previous `gdr run --manifest`
    #[arg(long)]
    manifest: PathBuf,
}

/// Everything a run needs, after flag parsing and defaulting. Manifests
/// serialize exactly this, so `run` and `replay` share one code path.
pub struct ResolvedRun {
    pub input: PathBuf,
    pub label_column: String,
    pub output: PathBuf,
    pub metrics: Option<PathBuf>,
    pub plot_dir: Option<PathBuf>,
    pub method: Method,
    pub use_pca: bool,
    pub alpha: AlphaWeights,
    pub max_iter: usize,
    pub tol: f64,
    pub lof_k: usize,
    pub stabilized: bool,
    pub seed: u64,
    pub guards: StepGuards,
}

pub(crate) fn method_name(method: Method) -> &'static str {
    match method {
        Method::Newtonian => "newtonian",
        Method::Schwarzschild => "schwarzschild",
        Method::Minkowski => "minkowski",
    }
}

pub(crate) fn parse_method(name: &str) -> Result<Method, CliError> {
    match name {
        "newtonian" => Ok(Method::Newtonian),
        "schwarzschild" => Ok(Method::Schwarzschild),
        "minkowski" => Ok(Method::Minkowski),
        other => Err(CliError::Validation(format!("unknown method {other:?}"))),
    }
}

fn parse_alphas(text: &str) -> Result<AlphaWeights, CliError> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::Validation(format!(
            "--alphas expects three comma-separated values, got {text:?}"
        )));
    }
    let mut values = [0.0; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part.trim().parse::<f64>().map_err(|_| {
            CliError::Validation(format!("--alphas component {part:?} is not a number"))
        })?;
    }
    AlphaWeights::new(values[0], values[1], values[2])
        .map_err(|e| CliError::Validation(format!("--alphas: {e}")))
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let method: Method = args.method.into();
    if args.no_pca && method.is_relativity() {
        return Err(CliError::Validation(
            "--no-pca applies to --method newtonian only; curved metrics need \
             the 3-dimensional working space"
                .to_string(),
        ));
    }
    let run = ResolvedRun {
        input: args.input,
        label_column: args.label_column,
        output: args.output,
        metrics: args.metrics,
        plot_dir: args.plot_dir,
        method,
        use_pca: !args.no_pca,
        alpha: parse_alphas(&args.alphas)?,
        max_iter: args.max_iter,
        tol: args.tol,
        lof_k: args.lof_k,
        stabilized: args.stabilized,
        seed: args.seed,
        guards: StepGuards::default(),
    };
    let started_at = unix_now();
    execute(&run)?;
    if let Some(path) = &args.manifest {
        RunManifest::from_resolved(&run, started_at).save(path)?;
    }
    Ok(())
}

/// Loads, transforms, and writes every artifact the run asked for.
fn execute(run: &ResolvedRun) -> Result<(), CliError> {
    let config = GdrConfig {
        method: run.method,
        use_pca: run.use_pca,
        alpha: run.alpha,
        max_iter: run.max_iter,
        tol: run.tol,
        guards: run.guards,
        stabilized: run.stabilized,
        lof_k: run.lof_k,
        seed: run.seed,
    };
    config.validate().map_err(core_error)?;

    let data = load_csv(&run.input, &run.label_column).map_err(core_error)?;
    let mut session = GdrSession::new(&data, config).map_err(core_error)?;

    if let Some(dir) = &run.plot_dir {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
        svg::emit_svg(&data, &dir.join("initial.svg"))?;
        while session.step().map_err(core_error)? {
            let t = session.reports().len();
            let snap = session.snapshot().map_err(core_error)?;
            svg::emit_svg(&snap, &dir.join(format!("iter_{t}.svg")))?;
        }
    }

    let (out, reports) = session.finish().map_err(core_error)?;
    write_csv(&out, &run.output).map_err(core_error)?;
    if let Some(path) = &run.metrics {
        write_metrics(&out, &reports, path)?;
    }
    Ok(())
}

/// One row per iteration and class: the class variance plus the
/// sample-weighted total repeated across that iteration's rows.
fn write_metrics(
    data: &LabeledDataset,
    reports: &[IterationReport],
    path: &Path,
) -> Result<(), CliError> {
    let io_err = |e: csv::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    let mut writer = csv::Writer::from_path(path).map_err(io_err)?;
    writer
        .write_record(["iteration", "class", "variance", "total"])
        .map_err(io_err)?;
    for report in reports {
        let total = format_f64(report.total_variance);
        for (class, &variance) in report.per_class_variance.iter().enumerate() {
            writer
                .write_record([
                    &report.iteration.to_string(),
                    &data.class_names()[class],
                    &format_f64(variance),
                    &total,
                ])
                .map_err(io_err)?;
        }
    }
    writer
        .flush()
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

fn cmd_blobs(args: BlobsArgs) -> Result<(), CliError> {
    let data = make_blobs(
        args.classes,
        args.per_class,
        args.dim,
        args.spread,
        args.center_scale,
        args.seed,
    )
    .map_err(core_error)?;
    write_csv(&data, &args.output).map_err(core_error)
}

fn cmd_replay(args: ReplayArgs) -> Result<(), CliError> {
    let run = RunManifest::load(&args.manifest)?.to_resolved()?;
    execute(&run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Blobs(args) => cmd_blobs(args),
        Command::Replay(args) => cmd_replay(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphas_parse_and_validate() {
        let w = parse_alphas("0.5, 0.25,0.25").unwrap();
        assert_eq!(w.as_array(), [0.5, 0.25, 0.25]);
        assert!(parse_alphas("0.5,0.5").is_err());
        assert!(parse_alphas("0.5,0.5,0.5").is_err());
        assert!(parse_alphas("a,b,c").is_err());
        assert!(parse_alphas("-0.2,0.6,0.6").is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for method in [Method::Newtonian, Method::Schwarzschild, Method::Minkowski] {
            assert_eq!(parse_method(method_name(method)).unwrap(), method);
        }
        assert!(parse_method("euclidean").is_err());
    }

    #[test]
    fn validation_and_io_map_to_distinct_exit_codes() {
        assert_eq!(CliError::Validation(String::new()).exit_code(), 2);
        assert_eq!(CliError::Io(String::new()).exit_code(), 1);
        let missing = gdr_core::Error::MissingLabelColumn {
            column: "y".into(),
            path: "x.csv".into(),
        };
        assert_eq!(core_error(missing).exit_code(), 2);
        let io = gdr_core::Error::Io(std::io::Error::other("disk"));
        assert_eq!(core_error(io).exit_code(), 1);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
