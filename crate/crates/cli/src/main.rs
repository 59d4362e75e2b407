use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use nodal_lab::harness::{dump_mesh, emit, emit_to_path, HarnessError, OutputFormat};
use nodal_lab::{run, ExperimentConfig, ExperimentKind};

/// Runs a nodal-lab experiment and reports it against its prediction.
///
/// Exit status is 0 when every check passes, 1 when a check fails and 2 on
/// usage or runtime errors.
#[derive(Debug, Parser)]
#[command(name = "nodal-lab", version)]
struct Args {
    /// constants-table, comb-verify, berezin-verify, kernel-check, jet-cov,
    /// zero-count, nodal-length, pairing or euler-3d.
    #[arg(long, value_parser = parse_kind)]
    experiment: Option<ExperimentKind>,
    /// Torus dimension (largest dimension for the exact kinds).
    #[arg(long)]
    dim: Option<usize>,
    /// Frequency cutoff Λ.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Grid points per axis for mesh extraction.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; falls back to NODAL_LAB_THREADS.
    #[arg(long)]
    threads: Option<usize>,
    /// Output file; results go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Relative slack added to 3·stderr in the pass rule.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Report zero wall time, for byte-identical reruns.
    #[arg(long)]
    no_timing: bool,
    /// Write the first draw's nodal mesh (polyline CSV for n = 2, OBJ for n = 3).
    #[arg(long)]
    mesh_dump: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<ExperimentKind, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    s.parse().map_err(|e: HarnessError| e.to_string())
}

fn config(args: &Args) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
                path: path.clone(),
                source,
            })?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(kind) = args.experiment {
                cfg.kind = kind;
            }
            cfg
        }
        None => match args.experiment {
            Some(kind) => ExperimentConfig::new(kind),
            None => return Err(HarnessError::InvalidConfig("--experiment or --config is required".into())),
        },
    };
    cfg.n = args.dim.or(cfg.n);
    cfg.lambda = args.lambda.or(cfg.lambda);
    cfg.samples = args.samples.unwrap_or(cfg.samples);
    cfg.grid = args.grid.or(cfg.grid);
    cfg.seed = args.seed.unwrap_or(cfg.seed);
    cfg.threads = args.threads.or(cfg.threads);
    cfg.out = args.out.clone().or(cfg.out);
    cfg.format = args.format.unwrap_or(cfg.format);
    cfg.tolerance = args.tolerance.or(cfg.tolerance);
    cfg.no_timing |= args.no_timing;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("nodal-lab: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> Result<bool, HarnessError> {
    let cfg = config(args)?;
    cfg.validate()?;
    if let Some(path) = &args.mesh_dump {
        dump_mesh(&cfg, path)?;
    }
    let report = run(&cfg)?;
    let mut summary: Box<dyn Write> = match &cfg.out {
        Some(path) => {
            emit_to_path(&report.results, cfg.format, path)?;
            Box::new(std::io::stdout())
        }
        None => {
            emit(&report.results, cfg.format, std::io::stdout().lock())?;
            Box::new(std::io::stderr())
        }
    };
    let mut sources: Vec<&str> = report.results.iter().map(|r| r.source.as_str()).collect();
    sources.dedup();
    let io = |source| HarnessError::Io {
        path: "<summary>".into(),
        source,
    };
    for s in sources {
        writeln!(summary, "prediction: {s}").map_err(io)?;
    }
    for c in &report.checks {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        writeln!(summary, "{verdict} {}: {}", c.label, c.detail).map_err(io)?;
    }
    Ok(report.passed())
}
