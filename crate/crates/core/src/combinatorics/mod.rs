//! Exact constants of the random-nodal-set asymptotics and the brute-force
//! oracles behind them.

mod covariance;
mod exact;
mod laws;
mod partitions;
mod table;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

pub use covariance::{
    hessian_slot, jet_covariance, jet_covariance_from_spectral, jet_dim, jet_multi_indices,
    wick_moment, JetCovariance,
};
pub use exact::{ratio_to_f64, ExactScalar};
pub use laws::{
    b_constant, b_constant_forms, l_eta, predicted_euler, predicted_pairing, predicted_volume,
    sphere_volume, theorem2_constant, weyl_leading,
};
pub use partitions::{
    c_sigma_p_bruteforce, cycle_type, invariant_partitions, involutions_fixing, permutation_sign,
    signed_permutation_sum, signed_permutation_sum_bruteforce, signed_permutation_sum_closed_form,
    CycleType, PartitionRecord, PermutationScope,
};
pub use table::{constants_table, write_constants_csv, ConstantsRow};

#[derive(Debug, Error)]
pub enum CombinatoricsError {
    #[error("double factorial undefined for {0} < -1")]
    NegativeDoubleFactorial(i64),
    #[error("cannot add monomials (4pi^2/Vol)^{left} and (4pi^2/Vol)^{right}")]
    MonomialMismatch { left: i32, right: i32 },
    #[error("permutation moves the pivot {pivot}")]
    PivotMoved { pivot: usize },
    #[error("not a permutation of the expected size")]
    InvalidPermutation,
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("formula is only stated for odd dimension, got n = {0}")]
    EvenDimension(usize),
    #[error("multi-index length {got} does not match dimension {n}")]
    MultiIndexLength { n: usize, got: usize },
    #[error("n = {n}: brute force gives {bruteforce}, closed form gives {closed}")]
    ClosedFormMismatch {
        n: usize,
        bruteforce: String,
        closed: String,
    },
    #[error("n = {n}: the two forms of B_n disagree ({first} vs {second})")]
    FormMismatch { n: usize, first: f64, second: f64 },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// `m!! = m(m−2)(m−4)…`, with `0!! = (−1)!! = 1`.
pub fn double_factorial(m: i64) -> Result<BigInt, CombinatoricsError> {
    if m < -1 {
        return Err(CombinatoricsError::NegativeDoubleFactorial(m));
    }
    let mut out = BigInt::one();
    let mut k = m;
    while k > 1 {
        out *= k;
        k -= 2;
    }
    Ok(out)
}

/// `C_{n,α,β}` as a multiple of `1/Vol`: the limit of
/// `Λ^{−|α+β|} ∂^α_y ∂^β_z C_Λ(y,z)` on the diagonal.
pub fn spectral_constant(n: usize, alpha: &[u32], beta: &[u32]) -> Result<ExactScalar, CombinatoricsError> {
    for len in [alpha.len(), beta.len()] {
        if len != n {
            return Err(CombinatoricsError::MultiIndexLength { n, got: len });
        }
    }
    if alpha.iter().zip(beta).any(|(a, b)| (a + b) % 2 != 0) {
        return Ok(ExactScalar::zero());
    }
    let abs_a: u32 = alpha.iter().sum();
    let abs_b: u32 = beta.iter().sum();
    let mut numer = BigInt::one();
    for (a, b) in alpha.iter().zip(beta) {
        numer *= double_factorial(i64::from(a + b) - 1)?;
    }
    let mut denom = BigInt::one();
    let mut k = (abs_a + abs_b) as i64 + n as i64;
    while k >= n as i64 + 2 {
        denom *= k;
        k -= 2;
    }
    // |α|+|β| is even here, so the exponent below is an integer.
    if (abs_a as i64 - abs_b as i64).rem_euclid(4) == 2 {
        numer = -numer;
    }
    Ok(ExactScalar::rational(BigRational::new(numer, denom)))
}

#[cfg(test)]
mod tests {
    use super::exact::rational;
    use super::*;

    #[test]
    fn double_factorial_values() {
        assert_eq!(double_factorial(-1).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(0).unwrap(), BigInt::from(1));
        assert_eq!(double_factorial(5).unwrap(), BigInt::from(15));
        assert_eq!(double_factorial(8).unwrap(), BigInt::from(384));
        assert!(matches!(
            double_factorial(-2),
            Err(CombinatoricsError::NegativeDoubleFactorial(-2))
        ));
    }

    #[test]
    fn spectral_constant_reference_entries() {
        for n in 1..=5usize {
            let zero = vec![0u32; n];
            let mut e1 = zero.clone();
            e1[0] = 1;
            let mut two_e1 = zero.clone();
            two_e1[0] = 2;
            let np = n as i64;
            assert_eq!(spectral_constant(n, &zero, &zero).unwrap(), ExactScalar::one());
            assert_eq!(
                spectral_constant(n, &e1, &e1).unwrap(),
                ExactScalar::rational(rational(1, np + 2))
            );
            assert_eq!(
                spectral_constant(n, &two_e1, &two_e1).unwrap(),
                ExactScalar::rational(rational(3, (np + 2) * (np + 4)))
            );
            assert_eq!(
                spectral_constant(n, &two_e1, &zero).unwrap(),
                ExactScalar::rational(rational(-1, np + 2))
            );
            assert!(spectral_constant(n, &e1, &zero).unwrap().is_zero());
        }
    }

    #[test]
    fn spectral_constant_checks_lengths() {
        assert!(matches!(
            spectral_constant(2, &[0], &[0, 0]),
            Err(CombinatoricsError::MultiIndexLength { n: 2, got: 1 })
        ));
    }

    #[test]
    fn spectral_constant_matches_sphere_moments() {
        // Oracle: the limit is the moment E[u^{α+β}] of the uniform measure on
        // the unit ball of R^n, signed by (−1)^{(|α|−|β|)/2}. In 1D:
        // ∫_{-1}^{1} u^{2k} du / 2 = 1/(2k+1).
        for k in 0..5u32 {
            for a in 0..=2 * k {
                let b = 2 * k - a;
                let got = spectral_constant(1, &[a], &[b]).unwrap();
                let sign = if (a as i64 - b as i64).rem_euclid(4) == 2 { -1.0 } else { 1.0 };
                let want = sign / (2.0 * k as f64 + 1.0);
                assert!((got.coefficient_f64() - want).abs() < 1e-15);
            }
        }
    }
}
