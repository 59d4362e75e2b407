//! Closed computations carried out inside the algebra.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_rational::BigRational;

use super::{berezin_integral, exponential, GrassmannAlgebra, GrassmannElement, GrassmannError, GrassmannScalar};
use crate::combinatorics::wick_moment;

/// Coefficient of `E_1…E_{n−1}` in `∂_{Π_1}…∂_{Π_{n−1}} exp(c (Σ_j Π_j E_j)²)`.
///
/// Generators are ordered `Π_1 … Π_{n−1}, E_1 … E_{n−1}`.
pub fn leading_constant<S: GrassmannScalar>(n: usize, c: S) -> Result<S, GrassmannError> {
    let k = n.saturating_sub(1);
    let names = (1..=k).map(|j| format!("Pi{j}")).chain((1..=k).map(|j| format!("E{j}")));
    let alg = GrassmannAlgebra::new(names)?;
    let mut sum = GrassmannElement::zero(&alg);
    for j in 0..k {
        let pi = GrassmannElement::<S>::generator(&alg, j)?;
        let e = GrassmannElement::<S>::generator(&alg, k + j)?;
        sum = sum.try_add(&pi.multiply(&e)?)?;
    }
    let quad = sum.multiply(&sum)?.scale(&c);
    let integrated = berezin_integral(&exponential(&quad)?, &(0..k).collect::<Vec<_>>())?;
    let e_mask = ((1u64 << k) - 1) << k;
    Ok(integrated.coefficient(e_mask))
}

/// Checks `Σ_{j,k≠r} (Π_j E_k Π_k E_j + Π_j E_j Π_k E_k) = 0` on generators
/// `Π_1 … Π_n, E_1 … E_n`; `r` is one-based.
pub fn quadratic_vanishing_check(n: usize, r: usize) -> Result<bool, GrassmannError> {
    if r == 0 || r > n {
        return Err(GrassmannError::UnknownGenerator(r));
    }
    let alg = GrassmannAlgebra::with_generators(2 * n)?;
    let pi = |j: usize| GrassmannElement::<BigRational>::generator(&alg, j);
    let e = |j: usize| GrassmannElement::<BigRational>::generator(&alg, n + j);
    let mut total = GrassmannElement::zero(&alg);
    for j in (0..n).filter(|&j| j + 1 != r) {
        for k in (0..n).filter(|&k| k + 1 != r) {
            let a = pi(j)?.multiply(&e(k)?)?.multiply(&pi(k)?)?.multiply(&e(j)?)?;
            let b = pi(j)?.multiply(&e(j)?)?.multiply(&pi(k)?)?.multiply(&e(k)?)?;
            total = total.try_add(&a)?.try_add(&b)?;
        }
    }
    Ok(total.is_zero())
}

type Poly = BTreeMap<Vec<u32>, f64>;

fn poly_mul(a: &Poly, b: &Poly, max_degree: u32) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().sum::<u32>() <= max_degree {
                *out.entry(e).or_insert(0.0) += ca * cb;
            }
        }
    }
    out
}

fn multi_indices(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    if dim == 0 {
        return if degree == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=degree {
        for mut rest in multi_indices(dim - 1, degree - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Verifies `exp(−⟨p|A⁻¹|p⟩/2) = E[exp(i⟨c,p⟩)]` with `c ~ N(0, A⁻¹)`
/// coefficient by coefficient up to total degree `degree`. The right side's
/// coefficients are Wick moments of `A⁻¹`.
pub fn gaussian_fourier_check(a: &DMatrix<f64>, degree: usize) -> Result<bool, GrassmannError> {
    if degree > 6 {
        return Err(GrassmannError::DegreeTooHigh(degree));
    }
    let dim = a.nrows();
    if a.ncols() != dim || (a - a.transpose()).abs().max() > 1e-12 * a.abs().max() {
        return Err(GrassmannError::NotPositiveDefinite);
    }
    let chol = a.clone().cholesky().ok_or(GrassmannError::NotPositiveDefinite)?;
    let inv = chol.inverse();
    let max_degree = degree as u32;

    // Left side: Σ_k (−Q/2)^k / k!, Q = ⟨p|A⁻¹|p⟩.
    let mut half_q = Poly::new();
    for i in 0..dim {
        for j in 0..dim {
            let mut e = vec![0u32; dim];
            e[i] += 1;
            e[j] += 1;
            *half_q.entry(e).or_insert(0.0) += -0.5 * inv[(i, j)];
        }
    }
    let mut lhs = Poly::new();
    lhs.insert(vec![0; dim], 1.0);
    let mut power = lhs.clone();
    for k in 1..=degree / 2 {
        power = poly_mul(&power, &half_q, max_degree);
        for (e, c) in &power {
            *lhs.entry(e.clone()).or_insert(0.0) += c / factorial(k as u32);
        }
    }

    let scale = inv.abs().max().max(1.0).powi(degree as i32 / 2);
    for d in 0..=max_degree {
        for gamma in multi_indices(dim, d) {
            // i^{|γ|}/γ! · E[c^γ]; odd moments vanish so the factor is real.
            let idx: Vec<usize> = gamma
                .iter()
                .enumerate()
                .flat_map(|(i, &g)| std::iter::repeat_n(i, g as usize))
                .collect();
            let moment = wick_moment(&inv, &idx);
            let sign = if d % 4 == 2 { -1.0 } else { 1.0 };
            let denom: f64 = gamma.iter().map(|&g| factorial(g)).product();
            let rhs = if d % 2 == 1 { 0.0 } else { sign * moment / denom };
            let left = lhs.get(&gamma).copied().unwrap_or(0.0);
            if (left - rhs).abs() > 1e-12 * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn leading_constant_values() {
        assert_eq!(leading_constant(1, q(1)).unwrap(), q(1));
        assert_eq!(leading_constant(3, q(1)).unwrap(), q(2));
        assert_eq!(leading_constant(5, q(1)).unwrap(), q(12));
        assert_eq!(leading_constant(2, q(1)).unwrap(), q(0));
        assert_eq!(leading_constant(4, q(1)).unwrap(), q(0));
    }

    #[test]
    fn leading_constant_scales_as_power_of_c() {
        for n in [3usize, 5, 7] {
            let base = leading_constant(n, q(1)).unwrap();
            for c in [2i64, -3, 5] {
                let got = leading_constant(n, q(c)).unwrap();
                let want = &base * q(c).pow(((n - 1) / 2) as i32);
                assert_eq!(got, want, "n={n} c={c}");
            }
        }
    }

    #[test]
    fn quadratic_sum_vanishes() {
        for n in 1..=5 {
            for r in 1..=n {
                assert!(quadratic_vanishing_check(n, r).unwrap());
            }
        }
        assert!(quadratic_vanishing_check(3, 0).is_err());
    }

    #[test]
    fn gaussian_fourier_examples() {
        let one = DMatrix::from_element(1, 1, 1.0);
        assert!(gaussian_fourier_check(&one, 4).unwrap());
        assert!(gaussian_fourier_check(&one, 1).unwrap());
        assert!(gaussian_fourier_check(&DMatrix::identity(2, 2), 2).unwrap());
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.1, 0.5, 1.5, -0.3, 0.1, -0.3, 1.0]);
        assert!(gaussian_fourier_check(&a, 6).unwrap());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(gaussian_fourier_check(&bad, 2), Err(GrassmannError::NotPositiveDefinite));
        assert_eq!(gaussian_fourier_check(&one, 7), Err(GrassmannError::DegreeTooHigh(7)));
    }

    #[test]
    fn quartic_coefficient_is_one_eighth() {
        // e^{−p²/2}: coefficient of p⁴ is 1/8; Wick side gives 3/4! = 1/8.
        let one = DMatrix::from_element(1, 1, 1.0);
        assert!((wick_moment(&one, &[0, 0, 0, 0]) / 24.0 - 0.125).abs() < 1e-15);
        assert!(gaussian_fourier_check(&one, 4).unwrap());
    }
}
