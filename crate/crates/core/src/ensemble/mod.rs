//! Gaussian random waves on the flat torus `(R/2πZ)^n`.

mod eval;
mod export;
mod grid;
mod kernel;
mod rng;

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

pub use eval::{Jet2, JetVector};
pub use export::{write_basis_csv, write_kernel_csv};
pub use grid::GridEvaluator;
pub use kernel::{
    empirical_jet_covariance, exact_jet_covariance, kernel_derivative, kernel_derivative_at,
    kernel_table, EmpiricalCovariance, KernelRow,
};
pub use rng::{stream_rng, StreamRng};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("frequency cutoff must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("grid of {grid} points per axis cannot resolve frequency cutoff {lambda}")]
    GridTooCoarse { grid: usize, lambda: f64 },
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

/// Flat torus with period `2π` on every axis and frequency cutoff `Λ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusSpec {
    pub n: usize,
    pub lambda: f64,
    pub seed: u64,
}

impl TorusSpec {
    pub fn new(n: usize, lambda: f64, seed: u64) -> Result<Self, EnsembleError> {
        if n == 0 {
            return Err(EnsembleError::InvalidDimension);
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(EnsembleError::InvalidCutoff(lambda));
        }
        Ok(Self { n, lambda, seed })
    }

    pub fn volume(&self) -> f64 {
        (2.0 * PI).powi(self.n as i32)
    }

    /// Largest integer frequency that can appear on a single axis.
    pub fn max_frequency(&self) -> i32 {
        self.lambda.floor() as i32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    Cos,
    Sin,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Cos => "cos",
            Phase::Sin => "sin",
        })
    }
}

/// `normalization · cos(k·x)` or `normalization · sin(k·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisFunction {
    pub k: Vec<i32>,
    pub phase: Phase,
    pub normalization: f64,
}

fn is_representative(k: &[i32]) -> bool {
    match k.iter().find(|&&c| c != 0) {
        None => true,
        Some(&c) => c > 0,
    }
}

/// Frequencies `k` with `|k| ≤ Λ`, one per pair `{k, −k}`, in lexicographic order.
pub fn half_lattice(n: usize, lambda: f64) -> Vec<Vec<i32>> {
    let l = lambda.floor() as i32;
    let l2 = lambda * lambda;
    let mut out = Vec::new();
    let mut k = vec![-l; n];
    loop {
        let norm2: i64 = k.iter().map(|&c| i64::from(c) * i64::from(c)).sum();
        if (norm2 as f64) <= l2 && is_representative(&k) {
            out.push(k.clone());
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if k[axis] < l {
                k[axis] += 1;
                break;
            }
            k[axis] = -l;
        }
    }
}

/// Real orthonormal eigenbasis of `−Δ` with eigenvalues at most `Λ²`.
pub fn enumerate_basis(spec: &TorusSpec) -> Vec<BasisFunction> {
    let vol = spec.volume();
    let mut out = Vec::new();
    for k in half_lattice(spec.n, spec.lambda) {
        if k.iter().all(|&c| c == 0) {
            out.push(BasisFunction {
                k,
                phase: Phase::Cos,
                normalization: 1.0 / vol.sqrt(),
            });
        } else {
            let norm = (2.0 / vol).sqrt();
            out.push(BasisFunction {
                k: k.clone(),
                phase: Phase::Cos,
                normalization: norm,
            });
            out.push(BasisFunction {
                k,
                phase: Phase::Sin,
                normalization: norm,
            });
        }
    }
    out
}

/// Shared, read-only data for drawing and evaluating samples.
///
/// Coefficient `0` multiplies the constant; coefficients `2m−1`, `2m` multiply
/// the cosine and sine of the `m`-th nonzero frequency.
#[derive(Clone, Debug)]
pub struct Ensemble {
    spec: TorusSpec,
    basis: Vec<BasisFunction>,
    /// Nonzero half-lattice frequencies, `n` entries each.
    freqs: Vec<i32>,
}

impl Ensemble {
    pub fn new(spec: TorusSpec) -> Self {
        let basis = enumerate_basis(&spec);
        let freqs = basis
            .iter()
            .filter(|b| b.phase == Phase::Sin)
            .flat_map(|b| b.k.iter().copied())
            .collect();
        Self { spec, basis, freqs }
    }

    pub fn spec(&self) -> &TorusSpec {
        &self.spec
    }

    pub fn basis(&self) -> &[BasisFunction] {
        &self.basis
    }

    /// `N(Λ)`.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub(crate) fn modes(&self) -> usize {
        self.freqs.len() / self.spec.n
    }

    pub(crate) fn all_freqs(&self) -> &[i32] {
        &self.freqs
    }

    pub(crate) fn freq(&self, mode: usize) -> &[i32] {
        let n = self.spec.n;
        &self.freqs[mode * n..(mode + 1) * n]
    }

    /// Draws `c_j ~ N(0, 1/N)` independently, in basis order.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> WaveSample<'_> {
        let sd = 1.0 / (self.len() as f64).sqrt();
        let coefficients = (0..self.len())
            .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        WaveSample {
            ensemble: self,
            coefficients,
        }
    }

    pub fn sample_from(&self, coefficients: Vec<f64>) -> Result<WaveSample<'_>, EnsembleError> {
        if coefficients.len() != self.len() {
            return Err(EnsembleError::LengthMismatch {
                expected: self.len(),
                got: coefficients.len(),
            });
        }
        Ok(WaveSample {
            ensemble: self,
            coefficients,
        })
    }
}

/// `f = Σ c_j e_j` for one draw of the coefficients.
#[derive(Clone, Debug)]
pub struct WaveSample<'e> {
    ensemble: &'e Ensemble,
    coefficients: Vec<f64>,
}

impl<'e> WaveSample<'e> {
    pub fn ensemble(&self) -> &'e Ensemble {
        self.ensemble
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn n(&self) -> usize {
        self.ensemble.n()
    }

    /// `‖f‖_{L²}`, which is the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `c · f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            ensemble: self.ensemble,
            coefficients: self.coefficients.iter().map(|x| c * x).collect(),
        }
    }

    pub(crate) fn constant_term(&self) -> f64 {
        self.coefficients[0] / self.ensemble.spec.volume().sqrt()
    }

    pub(crate) fn mode_coefficients(&self, mode: usize) -> (f64, f64) {
        (self.coefficients[2 * mode + 1], self.coefficients[2 * mode + 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::weyl_leading;

    fn spec(n: usize, lambda: f64) -> TorusSpec {
        TorusSpec::new(n, lambda, 0).unwrap()
    }

    #[test]
    fn basis_counts() {
        assert_eq!(enumerate_basis(&spec(1, 2.0)).len(), 5);
        assert_eq!(enumerate_basis(&spec(2, 1.0)).len(), 5);
        for n in 1..=3 {
            assert_eq!(enumerate_basis(&spec(n, 0.5)).len(), 1);
        }
        assert!(TorusSpec::new(1, -1.0, 0).is_err());
        assert!(TorusSpec::new(0, 1.0, 0).is_err());
    }

    #[test]
    fn basis_order_and_normalization() {
        let b = enumerate_basis(&spec(1, 2.0));
        let vol = 2.0 * PI;
        assert_eq!(b[0].k, vec![0]);
        assert!((b[0].normalization - 1.0 / vol.sqrt()).abs() < 1e-15);
        assert_eq!((b[1].k[0], b[1].phase), (1, Phase::Cos));
        assert_eq!((b[2].k[0], b[2].phase), (1, Phase::Sin));
        assert_eq!((b[3].k[0], b[3].phase), (2, Phase::Cos));
        assert!((b[4].normalization - (2.0 / vol).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lattice_count_matches_brute_force() {
        // Count of all k in Z^2 with |k| ≤ Λ against the basis size.
        for lambda in [3.0, 7.5, 12.0] {
            let l = lambda as i32;
            let mut count = 0;
            for a in -l..=l {
                for b in -l..=l {
                    if ((a * a + b * b) as f64) <= lambda * lambda {
                        count += 1;
                    }
                }
            }
            assert_eq!(enumerate_basis(&spec(2, lambda)).len(), count);
        }
    }

    #[test]
    fn basis_size_follows_weyl_law() {
        for n in 1..=3 {
            for lambda in [10.0, 20.0, 40.0] {
                let s = spec(n, lambda);
                let ratio = enumerate_basis(&s).len() as f64 / weyl_leading(n, s.volume(), lambda);
                assert!((ratio - 1.0).abs() < 1.0 / lambda, "n={n} Λ={lambda} ratio={ratio}");
            }
        }
    }

    #[test]
    fn representatives_are_unique() {
        let reps = half_lattice(3, 3.0);
        for k in &reps {
            let neg: Vec<i32> = k.iter().map(|c| -c).collect();
            if k.iter().any(|&c| c != 0) {
                assert!(!reps.contains(&neg));
            }
        }
        let mut sorted = reps.clone();
        sorted.sort();
        assert_eq!(sorted, reps);
    }
}
