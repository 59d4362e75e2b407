use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{ExperimentResult, HarnessError, OutputFormat};

pub const CSV_HEADER: [&str; 12] = [
    "kind", "n", "lambda", "samples", "mean", "stderr", "predicted", "ratio", "z", "discards", "seconds", "seed",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes results as CSV (fixed header, one row each) or as a JSON array.
pub fn emit<W: Write>(results: &[ExperimentResult], format: OutputFormat, mut out: W) -> Result<(), HarnessError> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in results {
                w.write_record([
                    r.kind.clone(),
                    r.n.to_string(),
                    opt(r.lambda),
                    r.samples.to_string(),
                    r.mean.to_string(),
                    r.stderr.to_string(),
                    r.predicted.to_string(),
                    opt(r.ratio),
                    opt(r.z),
                    r.discards.to_string(),
                    r.seconds.to_string(),
                    r.seed.to_string(),
                ])?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, results)?;
            writeln!(out).map_err(csv::Error::from)?;
        }
    }
    Ok(())
}

pub fn emit_to_path(results: &[ExperimentResult], format: OutputFormat, path: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io)?;
    let mut w = BufWriter::new(file);
    emit(results, format, &mut w)?;
    w.flush().map_err(io)
}
