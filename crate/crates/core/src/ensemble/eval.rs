//! Exact point evaluation of samples and their derivatives.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::WaveSample;
use crate::combinatorics::hessian_slot;

/// Value, gradient and Hessian (row-major) at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: Vec<f64>,
}

/// Scaled 2-jet `(f; ∇f/Λ; Hess f/Λ²)`, Hessian slots with the second index outer.
#[derive(Clone, Debug, PartialEq)]
pub struct JetVector(pub Vec<f64>);

impl JetVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `e^{i m x_d}` for `m ∈ [−L, L]`, one row of `2L+1` per axis, flattened.
pub(crate) fn axis_powers(x: &[f64], l: i32) -> Vec<Complex64> {
    let l = l as usize;
    let width = 2 * l + 1;
    let mut out = vec![Complex64::new(1.0, 0.0); width * x.len()];
    for (row, &xd) in out.chunks_exact_mut(width).zip(x) {
        let base = Complex64::from_polar(1.0, xd);
        let mut z = Complex64::new(1.0, 0.0);
        for m in 1..=l {
            z *= base;
            row[l + m] = z;
            row[l - m] = z.conj();
        }
    }
    out
}

const VALUE: u8 = 0;
const GRADIENT: u8 = 1;
const HESSIAN: u8 = 2;

/// Unnormalized sums over modes for a fixed dimension `N`: value,
/// gradient and the upper triangle of the Hessian.
fn mode_sums<const ORDER: u8, const N: usize>(
    freqs: &[i32],
    coefficients: &[f64],
    pw: &[Complex64],
    l: i32,
) -> (f64, [f64; N], [[f64; N]; N]) {
    let width = (2 * l + 1) as usize;
    let mut value = 0.0;
    let mut gradient = [0.0; N];
    let mut hessian = [[0.0; N]; N];
    for (k, ab) in freqs.chunks_exact(N).zip(coefficients.chunks_exact(2)) {
        let k: [i32; N] = k.try_into().unwrap();
        let mut z = pw[(k[0] + l) as usize];
        for d in 1..N {
            z *= pw[d * width + (k[d] + l) as usize];
        }
        let v = ab[0] * z.re + ab[1] * z.im;
        value += v;
        let kf = k.map(f64::from);
        if ORDER >= GRADIENT {
            let dv = ab[1] * z.re - ab[0] * z.im;
            for d in 0..N {
                gradient[d] += kf[d] * dv;
            }
        }
        if ORDER >= HESSIAN {
            for r in 0..N {
                let kr = kf[r] * v;
                for c in r..N {
                    hessian[r][c] -= kf[c] * kr;
                }
            }
        }
    }
    (value, gradient, hessian)
}

impl<'e> WaveSample<'e> {
    fn accumulate<const ORDER: u8>(&self, x: &[f64]) -> Jet2 {
        match self.n() {
            1 => self.accumulate_fixed::<ORDER, 1>(x),
            2 => self.accumulate_fixed::<ORDER, 2>(x),
            3 => self.accumulate_fixed::<ORDER, 3>(x),
            4 => self.accumulate_fixed::<ORDER, 4>(x),
            _ => self.accumulate_general::<ORDER>(x),
        }
    }

    fn accumulate_fixed<const ORDER: u8, const N: usize>(&self, x: &[f64]) -> Jet2 {
        let ens = self.ensemble();
        assert_eq!(x.len(), N, "point has the wrong dimension");
        let l = ens.spec().max_frequency();
        let pw = axis_powers(x, l);
        let s = (2.0 / ens.spec().volume()).sqrt();
        let (value, gradient, hessian) =
            mode_sums::<ORDER, N>(ens.all_freqs(), &self.coefficients()[1..], &pw, l);
        let mut h = vec![0.0; N * N];
        for r in 0..N {
            for c in r..N {
                h[r * N + c] = s * hessian[r][c];
                h[c * N + r] = s * hessian[r][c];
            }
        }
        Jet2 {
            value: self.constant_term() + s * value,
            gradient: gradient.iter().map(|g| s * g).collect(),
            hessian: h,
        }
    }

    fn accumulate_general<const ORDER: u8>(&self, x: &[f64]) -> Jet2 {
        let ens = self.ensemble();
        let n = ens.n();
        assert_eq!(x.len(), n, "point has the wrong dimension");
        let l = ens.spec().max_frequency();
        let width = (2 * l + 1) as usize;
        let pw = axis_powers(x, l);
        let s = (2.0 / ens.spec().volume()).sqrt();
        let mut value = 0.0;
        let mut gradient = vec![0.0; n];
        let mut hessian = vec![0.0; n * n];
        let coefficients = &self.coefficients()[1..];
        for (k, ab) in ens.all_freqs().chunks_exact(n).zip(coefficients.chunks_exact(2)) {
            let mut z = Complex64::new(1.0, 0.0);
            for (d, &kd) in k.iter().enumerate() {
                z *= pw[d * width + (kd + l) as usize];
            }
            let v = ab[0] * z.re + ab[1] * z.im;
            value += v;
            if ORDER >= GRADIENT {
                let dv = ab[1] * z.re - ab[0] * z.im;
                for (g, &kd) in gradient.iter_mut().zip(k) {
                    *g += f64::from(kd) * dv;
                }
            }
            if ORDER >= HESSIAN {
                for r in 0..n {
                    let kr = f64::from(k[r]) * v;
                    for c in r..n {
                        hessian[r * n + c] -= f64::from(k[c]) * kr;
                    }
                }
            }
        }
        for r in 0..n {
            for c in r..n {
                hessian[r * n + c] *= s;
            }
            for c in 0..r {
                hessian[r * n + c] = hessian[c * n + r];
            }
        }
        Jet2 {
            value: self.constant_term() + s * value,
            gradient: gradient.into_iter().map(|g| s * g).collect(),
            hessian,
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.accumulate::<VALUE>(x).value
    }

    pub fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let j = self.accumulate::<GRADIENT>(x);
        (j.value, j.gradient)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.accumulate::<GRADIENT>(x).gradient
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_row_slice(n, n, &self.accumulate::<HESSIAN>(x).hessian)
    }

    pub fn jet2(&self, x: &[f64]) -> Jet2 {
        self.accumulate::<HESSIAN>(x)
    }

    /// Scaled 2-jet at `y`.
    pub fn jet(&self, y: &[f64], lambda: f64) -> JetVector {
        let n = self.n();
        let j = self.jet2(y);
        let mut out = vec![0.0; n * n + n + 1];
        out[0] = j.value;
        for l in 0..n {
            out[1 + l] = j.gradient[l] / lambda;
        }
        for s in 0..n {
            for r in 0..n {
                out[hessian_slot(n, r, s)] = j.hessian[r * n + s] / (lambda * lambda);
            }
        }
        JetVector(out)
    }
}
