use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;

use super::exact::{ratio_to_f64, rational};
use super::spectral_constant;

/// Length of the scaled 2-jet `(F_0; F_1..F_n; F_{r,s})`.
pub fn jet_dim(n: usize) -> usize {
    n * n + n + 1
}

/// Position of `F_{r,s}` (zero-based `r`, `s`); `s` is the outer index.
pub fn hessian_slot(n: usize, r: usize, s: usize) -> usize {
    1 + n + s * n + r
}

/// Derivative multi-index of every jet slot.
pub fn jet_multi_indices(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(jet_dim(n));
    out.push(vec![0; n]);
    for l in 0..n {
        let mut a = vec![0; n];
        a[l] = 1;
        out.push(a);
    }
    for s in 0..n {
        for r in 0..n {
            let mut a = vec![0; n];
            a[r] += 1;
            a[s] += 1;
            out.push(a);
        }
    }
    out
}

/// Limiting covariance `A_0` of the scaled 2-jet, in exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetCovariance {
    n: usize,
    entries: Vec<BigRational>,
}

impl JetCovariance {
    fn zeros(n: usize) -> Self {
        let d = jet_dim(n);
        Self {
            n,
            entries: vec![BigRational::zero(); d * d],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        jet_dim(self.n)
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim() + j]
    }

    fn set(&mut self, i: usize, j: usize, v: BigRational) {
        let d = self.dim();
        self.entries[i * d + j] = v;
    }

    pub fn is_symmetric(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| ratio_to_f64(self.get(i, j)))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.to_f64()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// Builds `A_0` from its block description.
pub fn jet_covariance(n: usize) -> JetCovariance {
    let mut a = JetCovariance::zeros(n);
    let np = n as i64;
    let inv2 = rational(1, np + 2);
    let inv24 = rational(1, (np + 2) * (np + 4));

    // A_{1,1}
    a.set(0, 0, rational(1, 1));
    for l in 0..n {
        a.set(1 + l, 1 + l, inv2.clone());
    }
    // A_{2,1}: only F_0 couples to the diagonal Hessian entries.
    for s in 0..n {
        let slot = hessian_slot(n, s, s);
        a.set(slot, 0, -inv2.clone());
        a.set(0, slot, -inv2.clone());
    }
    // A_{2,2}
    let delta = |a: usize, b: usize| i64::from(a == b);
    for s in 0..n {
        for sp in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let b = if s == sp {
                        delta(i, j) * (1 + 2 * delta(j, s))
                    } else {
                        delta(i, s) * delta(j, sp) + delta(i, sp) * delta(j, s)
                    };
                    if b != 0 {
                        let v = &inv24 * BigRational::from_integer(b.into());
                        a.set(hessian_slot(n, i, s), hessian_slot(n, j, sp), v);
                    }
                }
            }
        }
    }
    a
}

/// Builds `A_0` entrywise from the spectral constants of the jet slots.
pub fn jet_covariance_from_spectral(n: usize) -> JetCovariance {
    let idx = jet_multi_indices(n);
    let mut a = JetCovariance::zeros(n);
    for (i, alpha) in idx.iter().enumerate() {
        for (j, beta) in idx.iter().enumerate() {
            let c = spectral_constant(n, alpha, beta).expect("indices have length n");
            a.set(i, j, c.coefficient().clone());
        }
    }
    a
}

/// Gaussian moment `E[x_{i_1} … x_{i_k}]` for a centred vector with covariance
/// `cov`, summed over perfect pairings.
pub fn wick_moment(cov: &DMatrix<f64>, indices: &[usize]) -> f64 {
    if indices.len() % 2 == 1 {
        return 0.0;
    }
    let mut scratch = indices.to_vec();
    pairings(cov, &mut scratch)
}

fn pairings(cov: &DMatrix<f64>, idx: &mut [usize]) -> f64 {
    if idx.is_empty() {
        return 1.0;
    }
    let first = idx[0];
    let mut total = 0.0;
    for k in 1..idx.len() {
        let c = cov[(first, idx[k])];
        if c == 0.0 {
            continue;
        }
        idx.swap(1, k);
        total += c * pairings(cov, &mut idx[2..]);
        idx.swap(1, k);
    }
    total
}
