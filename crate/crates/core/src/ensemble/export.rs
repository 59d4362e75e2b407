use std::io::Write;

use itertools::Itertools;

use super::kernel::KernelRow;
use super::{BasisFunction, EnsembleError};

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).join(" ")
}

/// Columns `k, phase, normalization`; frequency entries are space separated.
pub fn write_basis_csv<W: Write>(basis: &[BasisFunction], out: W) -> Result<(), EnsembleError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "phase", "normalization"])?;
    for b in basis {
        w.write_record([join(&b.k), b.phase.to_string(), format!("{:e}", b.normalization)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_kernel_csv<W: Write>(rows: &[KernelRow], out: W) -> Result<(), EnsembleError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "beta", "exact", "scaled", "asymptotic"])?;
    for r in rows {
        w.write_record([
            join(&r.alpha),
            join(&r.beta),
            format!("{:e}", r.exact),
            format!("{:e}", r.scaled),
            format!("{:e}", r.asymptotic),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
