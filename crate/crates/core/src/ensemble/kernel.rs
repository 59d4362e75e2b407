//! Diagonal derivatives of the normalized spectral projector kernel
//! `C_Λ(y,z) = Σ_j e_j(y) e_j(z) / N(Λ)`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::{stream_rng, BasisFunction, Ensemble, Phase, TorusSpec};
use crate::combinatorics::{jet_dim, jet_multi_indices, spectral_constant};

fn sign_for(alpha: &[u32], beta: &[u32]) -> i128 {
    let a: i64 = alpha.iter().map(|&v| i64::from(v)).sum();
    let b: i64 = beta.iter().map(|&v| i64::from(v)).sum();
    if (a - b).rem_euclid(4) == 2 {
        -1
    } else {
        1
    }
}

/// `∂^α_y ∂^β_z C_Λ(y,z)` on the diagonal, from exact lattice sums.
///
/// On the torus this is `(−1)^{(|α|−|β|)/2} Σ_{|k|≤Λ} k^{α+β} / (N·Vol)` when
/// `|α|+|β|` is even and zero otherwise, independent of `y`.
pub fn kernel_derivative(spec: &TorusSpec, alpha: &[u32], beta: &[u32]) -> f64 {
    let n = spec.n;
    assert!(alpha.len() == n && beta.len() == n, "multi-index length must equal n");
    let total: u32 = alpha.iter().chain(beta).sum();
    if total % 2 == 1 {
        return 0.0;
    }
    let power: Vec<u32> = alpha.iter().zip(beta).map(|(a, b)| a + b).collect();
    let l = spec.max_frequency();
    let l2 = spec.lambda * spec.lambda;
    let mut count: i128 = 0;
    let mut sum: i128 = 0;
    let mut k = vec![-l; n];
    'outer: loop {
        let norm2: i64 = k.iter().map(|&c| i64::from(c) * i64::from(c)).sum();
        if (norm2 as f64) <= l2 {
            count += 1;
            sum += k
                .iter()
                .zip(&power)
                .map(|(&c, &p)| i128::from(c).pow(p))
                .product::<i128>();
        }
        let mut axis = n;
        loop {
            if axis == 0 {
                break 'outer;
            }
            axis -= 1;
            if k[axis] < l {
                k[axis] += 1;
                break;
            }
            k[axis] = -l;
        }
    }
    let signed = sign_for(alpha, beta) * sum;
    signed as f64 / (count as f64 * spec.volume())
}

fn basis_derivative(b: &BasisFunction, alpha: &[u32], y: &[f64]) -> f64 {
    let theta: f64 = b.k.iter().zip(y).map(|(&k, &x)| f64::from(k) * x).sum();
    let scale: f64 = b.k.iter().zip(alpha).map(|(&k, &a)| f64::from(k).powi(a as i32)).product();
    let order: u32 = alpha.iter().sum();
    let base = match (b.phase, order % 4) {
        (Phase::Cos, 0) | (Phase::Sin, 1) => theta.cos(),
        (Phase::Cos, 1) | (Phase::Sin, 2) => -theta.sin(),
        (Phase::Cos, 2) | (Phase::Sin, 3) => -theta.cos(),
        _ => theta.sin(),
    };
    b.normalization * scale * base
}

/// Same quantity as [`kernel_derivative`], evaluated at `y` from the basis.
pub fn kernel_derivative_at(ensemble: &Ensemble, y: &[f64], alpha: &[u32], beta: &[u32]) -> f64 {
    let sum: f64 = ensemble
        .basis()
        .iter()
        .map(|b| basis_derivative(b, alpha, y) * basis_derivative(b, beta, y))
        .sum();
    sum / ensemble.len() as f64
}

/// Covariance of the scaled 2-jet: `Λ^{−|α|−|β|} · kernel_derivative`.
pub fn exact_jet_covariance(spec: &TorusSpec) -> DMatrix<f64> {
    let idx = jet_multi_indices(spec.n);
    let d = idx.len();
    DMatrix::from_fn(d, d, |i, j| {
        let order: u32 = idx[i].iter().chain(&idx[j]).sum();
        kernel_derivative(spec, &idx[i], &idx[j]) / spec.lambda.powi(order as i32)
    })
}

/// Entrywise `E[F_a F_b]` with standard errors.
#[derive(Clone, Debug)]
pub struct EmpiricalCovariance {
    pub mean: DMatrix<f64>,
    pub stderr: DMatrix<f64>,
    pub samples: usize,
}

const CHUNK: usize = 512;

/// Empirical second moments of the scaled jet at `y` over `samples` draws.
///
/// Draws use streams named `experiment`; chunks are reduced in a fixed order,
/// so the result does not depend on the thread count.
pub fn empirical_jet_covariance(
    ensemble: &Ensemble,
    y: &[f64],
    samples: usize,
    experiment: &str,
) -> EmpiricalCovariance {
    let spec = ensemble.spec();
    let n = spec.n;
    let d = jet_dim(n);
    let idx = jet_multi_indices(n);
    // The jet is linear in the coefficients: F = M c.
    let m = DMatrix::from_fn(d, ensemble.len(), |a, j| {
        let order: u32 = idx[a].iter().sum();
        basis_derivative(&ensemble.basis()[j], &idx[a], y) / spec.lambda.powi(order as i32)
    });
    let chunks: Vec<(Vec<f64>, Vec<f64>)> = (0..samples.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut s1 = vec![0.0; d * d];
            let mut s2 = vec![0.0; d * d];
            for trial in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let mut rng = stream_rng(spec.seed, experiment, trial as u64, 0);
                let f = ensemble.sample(&mut rng);
                let coeffs = nalgebra::DVector::from_column_slice(f.coefficients());
                let jet = &m * coeffs;
                for a in 0..d {
                    for b in 0..d {
                        let p = jet[a] * jet[b];
                        s1[a * d + b] += p;
                        s2[a * d + b] += p * p;
                    }
                }
            }
            (s1, s2)
        })
        .collect();
    let mut s1 = vec![0.0; d * d];
    let mut s2 = vec![0.0; d * d];
    for (c1, c2) in &chunks {
        for i in 0..d * d {
            s1[i] += c1[i];
            s2[i] += c2[i];
        }
    }
    let s = samples as f64;
    let mean = DMatrix::from_fn(d, d, |a, b| s1[a * d + b] / s);
    let stderr = DMatrix::from_fn(d, d, |a, b| {
        let mu = s1[a * d + b] / s;
        let var = (s2[a * d + b] / s - mu * mu).max(0.0) * s / (s - 1.0).max(1.0);
        (var / s).sqrt()
    });
    EmpiricalCovariance {
        mean,
        stderr,
        samples,
    }
}

/// One row of the kernel audit table.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelRow {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    /// `kernel_derivative` itself.
    pub exact: f64,
    /// `Λ^{−|α+β|} · exact`.
    pub scaled: f64,
    /// `C_{n,α,β} / Vol`.
    pub asymptotic: f64,
}

/// Kernel derivatives for all pairs of jet multi-indices (`|α|, |β| ≤ 2`).
pub fn kernel_table(spec: &TorusSpec) -> Vec<KernelRow> {
    let mut idx = jet_multi_indices(spec.n);
    idx.sort();
    idx.dedup();
    let mut rows = Vec::new();
    for alpha in &idx {
        for beta in &idx {
            let exact = kernel_derivative(spec, alpha, beta);
            let order: u32 = alpha.iter().chain(beta).sum();
            let c = spectral_constant(spec.n, alpha, beta).expect("lengths match");
            rows.push(KernelRow {
                alpha: alpha.clone(),
                beta: beta.clone(),
                exact,
                scaled: exact / spec.lambda.powi(order as i32),
                asymptotic: c.coefficient_f64() / spec.volume(),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::combinatorics::jet_covariance;

    #[test]
    fn normalization() {
        for n in 1..=3 {
            let spec = TorusSpec::new(n, 4.0, 0).unwrap();
            let z = vec![0; n];
            assert!((kernel_derivative(&spec, &z, &z) * spec.volume() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn second_moment_in_one_dimension() {
        let spec = TorusSpec::new(1, 40.0, 0).unwrap();
        // Σ_{|k|≤40} k² = 2·40·41·81/6 = 44280, N = 81
        let v = kernel_derivative(&spec, &[2], &[0]);
        assert!((v + 44280.0 / (81.0 * 2.0 * PI)).abs() < 1e-12);
        let scaled = v / 1600.0;
        let target = -1.0 / (3.0 * 2.0 * PI);
        assert!((scaled / target - 1.0).abs() < 0.03);
    }

    #[test]
    fn parity_vanishing() {
        let spec = TorusSpec::new(2, 6.0, 0).unwrap();
        assert_eq!(kernel_derivative(&spec, &[1, 0], &[0, 0]), 0.0);
        assert_eq!(kernel_derivative(&spec, &[1, 1], &[1, 0]), 0.0);
        assert_eq!(kernel_derivative(&spec, &[1, 0], &[0, 1]), 0.0);
    }

    #[test]
    fn stationarity() {
        let spec = TorusSpec::new(2, 5.0, 0).unwrap();
        let ens = Ensemble::new(spec);
        let pairs: [(&[u32], &[u32]); 4] =
            [(&[0, 0], &[0, 0]), (&[2, 0], &[0, 0]), (&[1, 1], &[1, 1]), (&[0, 1], &[0, 1])];
        for y in [[0.0, 0.0], [0.3, 2.0], [5.9, 1.1], [3.3, 3.3], [1.0, 6.0]] {
            for (a, b) in pairs {
                let exact = kernel_derivative(&spec, a, b);
                let at = kernel_derivative_at(&ens, &y, a, b);
                assert!((exact - at).abs() < 1e-12 * (1.0 + exact.abs()), "{a:?} {b:?} {y:?}");
            }
        }
    }

    #[test]
    fn approach_to_asymptotic_constants() {
        for n in 1..=2 {
            let a0 = jet_covariance(n).to_f64();
            let mut prev = f64::INFINITY;
            for lambda in [10.0, 20.0, 40.0] {
                let spec = TorusSpec::new(n, lambda, 0).unwrap();
                let exact = exact_jet_covariance(&spec) * spec.volume();
                let err = (exact - &a0).abs().max();
                assert!(err * lambda < 5.0, "n={n} Λ={lambda} err={err}");
                assert!(err < prev);
                prev = err;
            }
        }
    }
}
