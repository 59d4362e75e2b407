//! Leading-order expectation laws and their constants, in floating point.

use std::f64::consts::PI;

use super::partitions::signed_permutation_sum;
use super::CombinatoricsError;

/// `Vol(S^d)`, the area of the unit `d`-sphere in `R^{d+1}`.
pub fn sphere_volume(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_volume(d - 2),
    }
}

fn odd_sign(n: usize) -> f64 {
    if n.div_ceil(2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `C_n = 2(−1)^{(n+1)/2} / (π Vol(S^{n−1}))` for odd `n`, zero otherwise.
pub fn theorem2_constant(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        return 0.0;
    }
    2.0 * odd_sign(n) / (PI * sphere_volume(n - 1))
}

fn factorial_ratio(n: usize) -> f64 {
    // (n−1)! / ((n−1)/2)!
    ((n - 1) / 2 + 1..n).map(|k| k as f64).product()
}

/// Both displayed expressions of `B_n`, in order.
pub fn b_constant_forms(n: usize) -> (f64, f64) {
    if n.is_multiple_of(2) {
        return (0.0, 0.0);
    }
    let nf = n as f64;
    let scale = (nf + 2.0).powf(nf / 2.0);
    let first = 2.0 * odd_sign(n) / (2.0 * PI).powi(n as i32 - 1)
        * factorial_ratio(n)
        * PI.powf((nf - 3.0) / 2.0)
        / (2.0 * scale);
    let second = odd_sign(n) / (PI * sphere_volume(n - 1)) * 2.0 / scale;
    (first, second)
}

/// `B_n`, after checking its two expressions agree to 1e-12 relative.
pub fn b_constant(n: usize) -> Result<f64, CombinatoricsError> {
    let (first, second) = b_constant_forms(n);
    if (first - second).abs() > 1e-12 * first.abs().max(second.abs()) {
        return Err(CombinatoricsError::FormMismatch { n, first, second });
    }
    Ok(first)
}

/// `L(η) = (Vol/2π)^{1/2} |η|² Σ ε(σ) C_{σ,p}`, zero for even `n`.
pub fn l_eta(n: usize, eta: &[f64], vol: f64) -> Result<f64, CombinatoricsError> {
    if n == 0 || eta.len() != n {
        return Err(CombinatoricsError::InvalidDimension(n));
    }
    if n.is_multiple_of(2) {
        return Ok(0.0);
    }
    let sum = signed_permutation_sum(n)?.to_f64(vol);
    let norm2: f64 = eta.iter().map(|x| x * x).sum();
    Ok((vol / (2.0 * PI)).sqrt() * norm2 * sum)
}

/// Leading Weyl term `vol · ω_n Λ^n / (2π)^n`, with `ω_n` the unit-ball volume.
pub fn weyl_leading(n: usize, vol: f64, lambda: f64) -> f64 {
    let ball = sphere_volume(n - 1) / n as f64;
    vol * ball / (2.0 * PI).powi(n as i32) * lambda.powi(n as i32)
}

/// Expected (weighted) nodal volume at leading order.
pub fn predicted_volume(n: usize, lambda: f64, _vol: f64, weight_integral: f64) -> f64 {
    sphere_volume(n - 1) / sphere_volume(n) * lambda / (n as f64 + 2.0).sqrt() * weight_integral
}

/// Expected Euler characteristic of the nodal set at leading order (odd `n`).
pub fn predicted_euler(n: usize, lambda: f64, vol: f64) -> Result<f64, CombinatoricsError> {
    if n.is_multiple_of(2) {
        return Err(CombinatoricsError::EvenDimension(n));
    }
    let sign = if ((n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    let scaled = (lambda / (n as f64 + 2.0).sqrt()).powi(n as i32);
    Ok(2.0 * sign / (PI * sphere_volume(n - 1)) * scaled * vol)
}

/// Expected conormal pairing at leading order.
pub fn predicted_pairing(n: usize, lambda: f64, form_integral: f64) -> f64 {
    theorem2_constant(n) * (lambda / (n as f64 + 2.0).sqrt()).powi(n as i32) * form_integral
}
