//! Pairing of the conormal cycle `{(x, t·d_x f) : f(x) = 0, t ≠ 0}` with a
//! test form.
//!
//! For every mesh element at `x` with measure `μ` the contribution is
//! `μ/|∇f(x)| · ∫ W(x, t) dt`, where `W` is the coefficient of
//! `dy¹…dyⁿ dη₁…dη_n dt` in `df ∧ ⋀_j (t d∂_j f + ∂_j f dt − dη_j) ∧ ω` at
//! `η = t∇f(x)`. The `t`-integral runs over both signs of `t`, restricted to
//! the support `r0 ≤ |t|·|∇f| ≤ r1` of `ω`.

use std::sync::Arc;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::{
    find_zeros_circle, marching_cubes, marching_squares, NodalError, NodalMesh, TestForm,
};
use crate::ensemble::WaveSample;
use crate::grassmann::{wedge_top_coefficient, GrassmannAlgebra, GrassmannElement};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingConfig {
    /// Gauss–Legendre nodes per sign branch; the check reruns with twice as many.
    pub nodes: usize,
    /// `ε_grad = eps_grad_factor · Λ · ‖f‖`.
    pub eps_grad_factor: f64,
    /// Grid points per axis used to extract the nodal mesh.
    pub grid: usize,
}

impl PairingConfig {
    pub fn for_cutoff(lambda: f64) -> Self {
        Self {
            nodes: 16,
            eps_grad_factor: 1e-8,
            grid: (10.0 * lambda).ceil() as usize,
        }
    }

    fn validate(&self) -> Result<(), NodalError> {
        if self.nodes < 16 {
            return Err(NodalError::InvalidConfig(format!(
                "need at least 16 quadrature nodes per branch, got {}",
                self.nodes
            )));
        }
        if self.eps_grad_factor.is_nan() || self.eps_grad_factor <= 0.0 {
            return Err(NodalError::InvalidConfig("eps_grad_factor must be positive".into()));
        }
        Ok(())
    }
}

fn rule(nodes: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(nodes)
        .expect("at least two nodes")
        .as_node_weight_pairs()
        .to_vec()
}

/// Extracts the nodal mesh of `f` and evaluates the pairing on it.
pub fn conormal_pairing(f: &WaveSample<'_>, form: &TestForm, cfg: &PairingConfig) -> Result<f64, NodalError> {
    cfg.validate()?;
    let mesh = match f.n() {
        1 => find_zeros_circle(f, cfg.grid, 1e-13)?,
        2 => marching_squares(f, cfg.grid, 0.0)?,
        3 => marching_cubes(f, cfg.grid, 0.0)?,
        n => return Err(NodalError::DimensionMismatch { expected: 3, got: n }),
    };
    conormal_pairing_on_mesh(f, &mesh, form, cfg)
}

/// Pairing on a precomputed mesh of the zero set of `f`.
pub fn conormal_pairing_on_mesh(
    f: &WaveSample<'_>,
    mesh: &NodalMesh,
    form: &TestForm,
    cfg: &PairingConfig,
) -> Result<f64, NodalError> {
    cfg.validate()?;
    let n = f.n();
    if form.n() != n || mesh.dimension() != n {
        return Err(NodalError::DimensionMismatch { expected: n, got: form.n() });
    }
    let names = (1..=n)
        .map(|k| format!("dy{k}"))
        .chain((1..=n).map(|k| format!("deta{k}")))
        .chain(std::iter::once("dt".to_string()));
    let alg = GrassmannAlgebra::new(names)?;
    let dt = 2 * n;
    let top = alg.top_mask();
    let omegas: Vec<GrassmannElement<f64>> = form.masks().map(|m| GrassmannElement::monomial(&alg, m, 1.0)).collect();
    let coarse = rule(cfg.nodes);
    let fine = rule(2 * cfg.nodes);
    let threshold = cfg.eps_grad_factor * f.ensemble().spec().lambda * f.l2_norm();
    let (r0, r1) = form.support();

    let mut total = [0.0f64; 2];
    let mut magnitude = 0.0;
    let mut poly = vec![vec![0.0; n + 1]; omegas.len()];
    let mut eta = vec![0.0; n];
    for (x, measure) in mesh.elements() {
        let jet = f.jet2(&x);
        let gn = jet.gradient.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gn < threshold {
            return Err(NodalError::Degenerate {
                gradient: gn,
                threshold,
            });
        }
        wedge_polynomials(&alg, &jet.gradient, &jet.hessian, dt, &omegas, top, &mut poly)?;
        let (a, b) = (r0 / gn, r1 / gn);
        for (slot, nodes) in [&coarse, &fine].into_iter().enumerate() {
            let mut integral = 0.0;
            for sign in [1.0, -1.0] {
                for &(node, weight) in nodes {
                    let t = sign * (0.5 * (a + b) + 0.5 * (b - a) * node);
                    for (e, g) in eta.iter_mut().zip(&jet.gradient) {
                        *e = t * g;
                    }
                    let mut w = 0.0;
                    for (c, coeffs) in poly.iter().enumerate() {
                        let value = form.component_value(c, &x, &eta);
                        if value != 0.0 {
                            w += value * coeffs.iter().rev().fold(0.0, |acc, p| acc * t + p);
                        }
                    }
                    integral += 0.5 * (b - a) * weight * w;
                }
            }
            let contribution = measure / gn * integral;
            total[slot] += contribution;
            if slot == 1 {
                magnitude += contribution.abs();
            }
        }
    }
    let change = (total[1] - total[0]).abs();
    if change > 1e-3 * magnitude.max(f64::MIN_POSITIVE) {
        return Err(NodalError::QuadratureNotConverged {
            relative_change: change / magnitude,
        });
    }
    Ok(total[1])
}

/// Fills `poly[c][p]` with the coefficient of `t^p` in the wedge coefficient
/// against the `c`-th form component. Writing each one-form as
/// `A_j = t·H_j + G_j`, the product expands over the subsets that take `H`.
fn wedge_polynomials(
    alg: &Arc<GrassmannAlgebra>,
    gradient: &[f64],
    hessian: &[f64],
    dt: usize,
    omegas: &[GrassmannElement<f64>],
    top: u64,
    poly: &mut [Vec<f64>],
) -> Result<(), NodalError> {
    let n = gradient.len();
    let df = GrassmannElement::linear(alg, &gradient.iter().copied().enumerate().collect::<Vec<_>>())?;
    let h_forms = (0..n)
        .map(|j| GrassmannElement::linear(alg, &(0..n).map(|k| (k, hessian[j * n + k])).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let g_forms = (0..n)
        .map(|j| GrassmannElement::linear(alg, &[(dt, gradient[j]), (n + j, -1.0)]))
        .collect::<Result<Vec<_>, _>>()?;
    for row in poly.iter_mut() {
        row.iter_mut().for_each(|p| *p = 0.0);
    }
    let mut forms = Vec::with_capacity(n + 1);
    for subset in 0..(1u32 << n) {
        forms.clear();
        forms.push(df.clone());
        for j in 0..n {
            forms.push(if subset & (1 << j) != 0 { h_forms[j].clone() } else { g_forms[j].clone() });
        }
        let degree = subset.count_ones() as usize;
        for (c, omega) in omegas.iter().enumerate() {
            poly[c][degree] += wedge_top_coefficient(&forms, omega, top)?;
        }
    }
    Ok(())
}

/// `−Σ_i ∫ ω_{(0),(1)}(x_i, η) dη` over the zeros of a one-dimensional sample.
pub fn conormal_pairing_closed_form_1d(mesh: &NodalMesh, form: &TestForm, nodes: usize) -> Result<f64, NodalError> {
    let NodalMesh::Points(zeros) = mesh else {
        return Err(NodalError::DimensionMismatch {
            expected: 1,
            got: mesh.dimension(),
        });
    };
    let (r0, r1) = form.support();
    let pairs = rule(nodes);
    let mut total = 0.0;
    for z in zeros {
        let mut integral = 0.0;
        for sign in [1.0, -1.0] {
            for &(node, weight) in &pairs {
                let eta = sign * (0.5 * (r0 + r1) + 0.5 * (r1 - r0) * node);
                integral += 0.5 * (r1 - r0) * weight * form.component_value(0, &[z.x], &[eta]);
            }
        }
        total -= integral;
    }
    Ok(total)
}
