use std::io::Write;

use serde::Serialize;

use super::exact::ExactScalar;
use super::laws::{b_constant, theorem2_constant};
use super::partitions::{
    signed_permutation_sum_bruteforce, signed_permutation_sum_closed_form, PermutationScope,
};
use super::CombinatoricsError;

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantsRow {
    pub n: usize,
    pub c_n: f64,
    pub b_n: f64,
    pub sum_closed: ExactScalar,
    pub sum_bruteforce: ExactScalar,
    pub matches: bool,
}

#[derive(Serialize)]
struct CsvRow {
    n: usize,
    #[serde(rename = "C_n")]
    c_n: f64,
    #[serde(rename = "B_n")]
    b_n: f64,
    sum_closed: String,
    sum_bruteforce: String,
    #[serde(rename = "match")]
    matches: bool,
}

/// Constants `C_n`, `B_n` and both evaluations of the signed permutation sum
/// for `n = 1..=max_n`.
pub fn constants_table(max_n: usize) -> Result<Vec<ConstantsRow>, CombinatoricsError> {
    (1..=max_n)
        .map(|n| {
            let brute = signed_permutation_sum_bruteforce(n, 0, PermutationScope::Involutions)?;
            let closed = signed_permutation_sum_closed_form(n);
            Ok(ConstantsRow {
                n,
                c_n: theorem2_constant(n),
                b_n: b_constant(n)?,
                matches: brute == closed,
                sum_closed: closed,
                sum_bruteforce: brute,
            })
        })
        .collect()
}

pub fn write_constants_csv<W: Write>(rows: &[ConstantsRow], out: W) -> Result<(), CombinatoricsError> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["n", "C_n", "B_n", "sum_closed", "sum_bruteforce", "match"])?;
    }
    for r in rows {
        w.serialize(CsvRow {
            n: r.n,
            c_n: r.c_n,
            b_n: r.b_n,
            sum_closed: r.sum_closed.to_string(),
            sum_bruteforce: r.sum_bruteforce.to_string(),
            matches: r.matches,
        })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
