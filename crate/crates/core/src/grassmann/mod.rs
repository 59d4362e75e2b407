//! Exterior (Grassmann) algebra on at most 64 odd generators, with Berezin
//! integration.
//!
//! A monomial is a bitmask; bit `i` stands for generator `g_i` and the
//! canonical order of a monomial is increasing generator index.

mod checks;

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub use checks::{gaussian_fourier_check, leading_constant, quadratic_vanishing_check};

#[derive(Debug, Error, PartialEq)]
pub enum GrassmannError {
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("{0} generators requested, at most 64 are supported")]
    TooManyGenerators(usize),
    #[error("generator index {0} out of range")]
    UnknownGenerator(usize),
    #[error("generator {0} listed twice")]
    RepeatedGenerator(usize),
    #[error("exponential needs a body with a known exponential")]
    NonNumericBody,
    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,
    #[error("degree {0} exceeds the supported maximum of 6")]
    DegreeTooHigh(usize),
}

/// Coefficient ring of a Grassmann element.
pub trait GrassmannScalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `exp(self)`, when representable.
    fn exp_scalar(&self) -> Option<Self>;
    fn from_u32(k: u32) -> Self;
}

impl GrassmannScalar for f64 {
    fn exp_scalar(&self) -> Option<Self> {
        Some(self.exp())
    }

    fn from_u32(k: u32) -> Self {
        f64::from(k)
    }
}

impl GrassmannScalar for BigRational {
    fn exp_scalar(&self) -> Option<Self> {
        self.is_zero().then(BigRational::one)
    }

    fn from_u32(k: u32) -> Self {
        BigRational::from_integer(k.into())
    }
}

/// Named, ordered odd generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrassmannAlgebra {
    names: Vec<String>,
}

impl GrassmannAlgebra {
    pub fn new<I, T>(names: I) -> Result<Arc<Self>, GrassmannError>
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > 64 {
            return Err(GrassmannError::TooManyGenerators(names.len()));
        }
        Ok(Arc::new(Self { names }))
    }

    /// Generators named `g1 … gm`.
    pub fn with_generators(m: usize) -> Result<Arc<Self>, GrassmannError> {
        Self::new((1..=m).map(|i| format!("g{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Mask of all generators.
    pub fn top_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }
}

/// Sign of moving the generators of `b` past those of `a`, i.e. of
/// `mono(a)·mono(b) = ± mono(a|b)`; `a` and `b` must be disjoint.
#[inline]
pub fn reorder_sign(a: u64, b: u64) -> bool {
    let mut rest = b;
    let mut parity = 0u32;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        let above = if j == 63 { 0 } else { a >> (j + 1) };
        parity ^= above.count_ones() & 1;
    }
    parity == 1
}

/// Finitely supported map from generator subsets to coefficients.
#[derive(Clone, Debug)]
pub struct GrassmannElement<S> {
    algebra: Arc<GrassmannAlgebra>,
    terms: Vec<(u64, S)>,
}

impl<S: GrassmannScalar> PartialEq for GrassmannElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.terms == other.terms
    }
}

impl<S: GrassmannScalar> GrassmannElement<S> {
    pub fn zero(algebra: &Arc<GrassmannAlgebra>) -> Self {
        Self {
            algebra: Arc::clone(algebra),
            terms: Vec::new(),
        }
    }

    pub fn scalar(algebra: &Arc<GrassmannAlgebra>, value: S) -> Self {
        Self::monomial(algebra, 0, value)
    }

    pub fn one(algebra: &Arc<GrassmannAlgebra>) -> Self {
        Self::scalar(algebra, S::one())
    }

    /// `coeff · g_{i1}…g_{ik}` in canonical order.
    pub fn monomial(algebra: &Arc<GrassmannAlgebra>, mask: u64, coeff: S) -> Self {
        debug_assert!(mask & !algebra.top_mask() == 0);
        let terms = if coeff.is_zero() { Vec::new() } else { vec![(mask, coeff)] };
        Self {
            algebra: Arc::clone(algebra),
            terms,
        }
    }

    pub fn generator(algebra: &Arc<GrassmannAlgebra>, i: usize) -> Result<Self, GrassmannError> {
        if i >= algebra.len() {
            return Err(GrassmannError::UnknownGenerator(i));
        }
        Ok(Self::monomial(algebra, 1 << i, S::one()))
    }

    /// `Σ c_i g_i` from `(generator, coefficient)` pairs.
    pub fn linear(algebra: &Arc<GrassmannAlgebra>, coeffs: &[(usize, S)]) -> Result<Self, GrassmannError> {
        let mut terms = Vec::with_capacity(coeffs.len());
        for (i, c) in coeffs {
            if *i >= algebra.len() {
                return Err(GrassmannError::UnknownGenerator(*i));
            }
            terms.push((1u64 << i, c.clone()));
        }
        Ok(Self::from_terms(algebra, terms))
    }

    /// Builds an element from arbitrary (possibly repeated) terms.
    pub fn from_terms(algebra: &Arc<GrassmannAlgebra>, mut terms: Vec<(u64, S)>) -> Self {
        terms.sort_unstable_by_key(|t| t.0);
        let mut merged: Vec<(u64, S)> = Vec::with_capacity(terms.len());
        for (mask, c) in terms {
            match merged.last_mut() {
                Some(last) if last.0 == mask => last.1 = last.1.clone() + c,
                _ => merged.push((mask, c)),
            }
        }
        merged.retain(|t| !t.1.is_zero());
        Self {
            algebra: Arc::clone(algebra),
            terms: merged,
        }
    }

    pub fn algebra(&self) -> &Arc<GrassmannAlgebra> {
        &self.algebra
    }

    pub fn terms(&self) -> &[(u64, S)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mask: u64) -> S {
        match self.terms.binary_search_by_key(&mask, |t| t.0) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    pub fn body(&self) -> S {
        self.coefficient(0)
    }

    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|t| t.0.count_ones() % 2 == 0)
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|t| t.0.count_ones() % 2 == 1)
    }

    pub fn scale(&self, factor: &S) -> Self {
        Self::from_terms(
            &self.algebra,
            self.terms.iter().map(|(m, c)| (*m, c.clone() * factor.clone())).collect(),
        )
    }

    fn check_same(&self, other: &Self) -> Result<(), GrassmannError> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(GrassmannError::AlgebraMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check_same(other)?;
        let terms = self.terms.iter().chain(&other.terms).cloned().collect();
        Ok(Self::from_terms(&self.algebra, terms))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self, GrassmannError> {
        self.check_same(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma & mb != 0 {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                let c = if reorder_sign(*ma, *mb) { -c } else { c };
                terms.push((ma | mb, c));
            }
        }
        Ok(Self::from_terms(&self.algebra, terms))
    }

    /// Left odd derivative `∂/∂g_i`.
    pub fn derivative(&self, i: usize) -> Result<Self, GrassmannError> {
        if i >= self.algebra.len() {
            return Err(GrassmannError::UnknownGenerator(i));
        }
        let bit = 1u64 << i;
        let below = bit - 1;
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| m & bit != 0)
            .map(|(m, c)| {
                let c = if (m & below).count_ones() % 2 == 1 { -c.clone() } else { c.clone() };
                (m ^ bit, c)
            })
            .collect();
        Ok(Self::from_terms(&self.algebra, terms))
    }
}

/// `a · b`.
pub fn multiply<S: GrassmannScalar>(
    a: &GrassmannElement<S>,
    b: &GrassmannElement<S>,
) -> Result<GrassmannElement<S>, GrassmannError> {
    a.multiply(b)
}

/// `exp(x) = exp(body) · Σ_k nil^k / k!`, exact because `nil` is nilpotent.
pub fn exponential<S: GrassmannScalar>(x: &GrassmannElement<S>) -> Result<GrassmannElement<S>, GrassmannError> {
    let algebra = x.algebra();
    let body = x.body();
    let prefactor = body.exp_scalar().ok_or(GrassmannError::NonNumericBody)?;
    let nil = GrassmannElement::from_terms(
        algebra,
        x.terms().iter().filter(|t| t.0 != 0).cloned().collect(),
    );
    let mut sum = GrassmannElement::one(algebra);
    let mut power = GrassmannElement::one(algebra);
    for k in 1..=algebra.len() as u32 {
        power = power.multiply(&nil)?.scale(&(S::one() / S::from_u32(k)));
        if power.is_zero() {
            break;
        }
        sum = sum.try_add(&power)?;
    }
    Ok(sum.scale(&prefactor))
}

/// `∂_{over[0]} ∂_{over[1]} … ∂_{over[d−1]} x`: the last listed generator is
/// differentiated first.
pub fn berezin_integral<S: GrassmannScalar>(
    x: &GrassmannElement<S>,
    over: &[usize],
) -> Result<GrassmannElement<S>, GrassmannError> {
    let mut seen = 0u64;
    for &g in over {
        if g >= x.algebra().len() {
            return Err(GrassmannError::UnknownGenerator(g));
        }
        if seen & (1 << g) != 0 {
            return Err(GrassmannError::RepeatedGenerator(g));
        }
        seen |= 1 << g;
    }
    let mut out = x.clone();
    for &g in over.iter().rev() {
        out = out.derivative(g)?;
    }
    Ok(out)
}

/// Coefficient of the monomial `top_mask` in `(∏ one_forms) ∧ omega`.
///
/// A product that never reaches `top_mask` gives zero.
pub fn wedge_top_coefficient<S: GrassmannScalar>(
    one_forms: &[GrassmannElement<S>],
    omega: &GrassmannElement<S>,
    top_mask: u64,
) -> Result<S, GrassmannError> {
    let mut acc = GrassmannElement::one(omega.algebra());
    for form in one_forms {
        acc = acc.multiply(form)?;
        acc.terms.retain(|t| t.0 & !top_mask == 0);
        if acc.is_zero() {
            return Ok(S::zero());
        }
    }
    // Only the complementary monomials of omega can complete the product.
    let mut total = S::zero();
    for (ma, ca) in &acc.terms {
        let need = top_mask & !ma;
        let cb = omega.coefficient(need);
        if cb.is_zero() {
            continue;
        }
        let c = ca.clone() * cb;
        total = total + if reorder_sign(*ma, need) { -c } else { c };
    }
    Ok(total)
}

impl<S: GrassmannScalar> Add for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;

    fn add(self, rhs: Self) -> GrassmannElement<S> {
        self.try_add(rhs).expect("elements of the same algebra")
    }
}

impl<S: GrassmannScalar> Sub for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;

    fn sub(self, rhs: Self) -> GrassmannElement<S> {
        self.try_add(&-rhs).expect("elements of the same algebra")
    }
}

impl<S: GrassmannScalar> Mul for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;

    fn mul(self, rhs: Self) -> GrassmannElement<S> {
        self.multiply(rhs).expect("elements of the same algebra")
    }
}

impl<S: GrassmannScalar> Neg for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;

    fn neg(self) -> GrassmannElement<S> {
        self.scale(&-S::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type Q = BigRational;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    fn gens(m: usize) -> (Arc<GrassmannAlgebra>, Vec<GrassmannElement<Q>>) {
        let alg = GrassmannAlgebra::with_generators(m).unwrap();
        let g = (0..m).map(|i| GrassmannElement::generator(&alg, i).unwrap()).collect();
        (alg, g)
    }

    #[test]
    fn anticommuting_generators() {
        let (alg, g) = gens(6);
        assert_eq!(&g[0] * &g[1], GrassmannElement::monomial(&alg, 0b11, q(1)));
        assert_eq!(&g[1] * &g[0], GrassmannElement::monomial(&alg, 0b11, q(-1)));
        assert!((&g[0] * &g[0]).is_zero());
        let a = &g[0] * &g[1];
        let b = &g[2] * &g[3];
        let c = &g[4] * &g[5];
        assert_eq!(&a * &b, GrassmannElement::monomial(&alg, 0b1111, q(1)));
        let ab = &a * &b;
        assert_eq!(&ab * &c, &c * &ab);
    }

    #[test]
    fn mismatched_algebras() {
        let (_, g) = gens(2);
        let (_, h) = gens(3);
        assert_eq!(g[0].multiply(&h[0]), Err(GrassmannError::AlgebraMismatch));
    }

    #[test]
    fn exponential_examples() {
        let (alg, g) = gens(4);
        assert_eq!(exponential(&g[0]).unwrap(), &GrassmannElement::one(&alg) + &g[0]);
        assert_eq!(
            exponential(&GrassmannElement::<Q>::zero(&alg)).unwrap(),
            GrassmannElement::one(&alg)
        );
        let x = (&g[0] * &g[1]).scale(&q(7));
        assert_eq!(exponential(&x).unwrap(), &GrassmannElement::one(&alg) + &x);
        // exp(g1g2 + g3g4) = 1 + g1g2 + g3g4 + g1g2g3g4
        let y = &(&g[0] * &g[1]) + &(&g[2] * &g[3]);
        let e = exponential(&y).unwrap();
        assert_eq!(e.coefficient(0b1111), q(1));
        assert_eq!(e.terms().len(), 4);
        let with_body = &GrassmannElement::scalar(&alg, q(1)) + &g[0];
        assert_eq!(exponential(&with_body), Err(GrassmannError::NonNumericBody));
    }

    #[test]
    fn exponential_splits_scalar_part() {
        let alg = GrassmannAlgebra::with_generators(4).unwrap();
        let phi = GrassmannElement::from_terms(&alg, vec![(0b0011, 0.7), (0b1100, -1.3), (0b1111, 0.25)]);
        let p = GrassmannElement::scalar(&alg, 0.4);
        let lhs = exponential(&(&p + &phi)).unwrap();
        let rhs = &exponential(&p).unwrap() * &exponential(&phi).unwrap();
        for ((ma, ca), (mb, cb)) in lhs.terms().iter().zip(rhs.terms()) {
            assert_eq!(ma, mb);
            assert!((ca - cb).abs() < 1e-14);
        }
    }

    #[test]
    fn berezin_examples() {
        let (alg, g) = gens(2);
        let x = &GrassmannElement::scalar(&alg, q(3)) + &g[0].scale(&q(5));
        assert_eq!(berezin_integral(&x, &[0]).unwrap(), GrassmannElement::scalar(&alg, q(5)));
        let c = GrassmannElement::scalar(&alg, q(3));
        assert!(berezin_integral(&c, &[0]).unwrap().is_zero());
        // exp(k·Π Q) = 1 + kΠQ, whose Π-integral is k·Q
        let k = q(-4);
        let e = exponential(&(&g[0] * &g[1]).scale(&k)).unwrap();
        assert_eq!(berezin_integral(&e, &[0]).unwrap(), g[1].scale(&k));
        assert_eq!(
            berezin_integral(&e, &[0, 0]),
            Err(GrassmannError::RepeatedGenerator(0))
        );
    }

    #[test]
    fn berezin_order_is_operator_composition() {
        let (alg, g) = gens(2);
        let x = &g[0] * &g[1];
        // ∂_{g1}∂_{g2}(g1g2) = ∂_{g1}(−g1) = −1
        assert_eq!(berezin_integral(&x, &[0, 1]).unwrap(), GrassmannElement::scalar(&alg, q(-1)));
        assert_eq!(berezin_integral(&x, &[1, 0]).unwrap(), GrassmannElement::scalar(&alg, q(1)));
    }

    #[test]
    fn wedge_examples_in_one_dimension() {
        // generators dy, dη, dt
        let alg = GrassmannAlgebra::new(["dy", "deta", "dt"]).unwrap();
        let (fp, fpp, t, b) = (1.3, -0.4, 0.8, 2.1);
        let df = GrassmannElement::linear(&alg, &[(0, fp)]).unwrap();
        let a = GrassmannElement::linear(&alg, &[(0, t * fpp), (2, fp), (1, -1.0)]).unwrap();
        let omega = GrassmannElement::linear(&alg, &[(1, b)]).unwrap();
        let w = wedge_top_coefficient(&[df.clone(), a.clone()], &omega, 0b111).unwrap();
        assert!((w + fp * fp * b).abs() < 1e-14);
        let w = wedge_top_coefficient(&[df.clone(), df.clone()], &omega, 0b111).unwrap();
        assert_eq!(w, 0.0);
        let dy_only = GrassmannElement::linear(&alg, &[(0, b)]).unwrap();
        assert_eq!(wedge_top_coefficient(&[df, a], &dy_only, 0b111).unwrap(), 0.0);
    }

    #[test]
    fn berezin_of_expanded_product() {
        let (alg, g) = gens(3);
        // (g1 + 2g2)(g3 + g1) = g1g3 + 2g2g3 − 2g1g2
        let x = &(&g[0] + &g[1].scale(&q(2))) * &(&g[2] + &g[0]);
        let y = berezin_integral(&x, &[1, 2]).unwrap();
        assert_eq!(y, GrassmannElement::scalar(&alg, q(-2)));
    }
}
