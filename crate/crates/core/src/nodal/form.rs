//! Compactly supported test n-forms on the punctured cotangent bundle of the
//! torus, written in coordinates `(y, η)`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;
use serde::{Deserialize, Serialize};

use super::NodalError;
use crate::combinatorics::sphere_volume;

/// Spatial factor `s(y)` of a test form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum SpatialWeight {
    One,
    /// `cos²(y_axis)`.
    CosSquared { axis: usize },
}

impl SpatialWeight {
    pub fn value(&self, y: &[f64]) -> f64 {
        match self {
            SpatialWeight::One => 1.0,
            SpatialWeight::CosSquared { axis } => y[*axis].cos().powi(2),
        }
    }

    /// `∫_{T^n} s dy`.
    pub fn integral(&self, n: usize) -> f64 {
        let vol = (2.0 * PI).powi(n as i32);
        match self {
            SpatialWeight::One => vol,
            SpatialWeight::CosSquared { .. } => vol / 2.0,
        }
    }
}

fn default_r0() -> f64 {
    0.5
}

fn default_r1() -> f64 {
    2.0
}

/// Serializable description of the preset test form
///
/// `ω = s(y−τ) ρ(|η|) (1 + tilt·η₁/|η|) dη₁∧…∧dη_n + mixed · s(y−τ) ρ(|η|) dy¹∧dη₂∧…∧dη_n`
///
/// where `ρ` is a smooth bump supported in `r0 ≤ |η| ≤ r1` and `τ` is `shift`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormSpec {
    pub weight: SpatialWeight,
    #[serde(default = "default_r0")]
    pub r0: f64,
    #[serde(default = "default_r1")]
    pub r1: f64,
    #[serde(default)]
    pub tilt: f64,
    #[serde(default)]
    pub mixed: f64,
    #[serde(default)]
    pub shift: Vec<f64>,
}

impl Default for FormSpec {
    fn default() -> Self {
        Self {
            weight: SpatialWeight::One,
            r0: default_r0(),
            r1: default_r1(),
            tilt: 0.0,
            mixed: 0.0,
            shift: Vec::new(),
        }
    }
}

/// Which preset component a monomial carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Pure,
    Mixed,
}

/// A test form in dimension `n`, with monomials over the generators
/// `dy¹…dyⁿ, dη₁…dη_n` (bits `0..n` and `n..2n`).
#[derive(Clone, Debug, PartialEq)]
pub struct TestForm {
    n: usize,
    spec: FormSpec,
    components: Vec<(u64, Kind)>,
}

impl TestForm {
    pub fn new(n: usize, spec: FormSpec) -> Result<Self, NodalError> {
        if n == 0 {
            return Err(NodalError::InvalidConfig("form dimension must be positive".into()));
        }
        if !(spec.r0 > 0.0 && spec.r1 > spec.r0) {
            return Err(NodalError::InvalidConfig(format!(
                "bump support must satisfy 0 < r0 < r1, got [{}, {}]",
                spec.r0, spec.r1
            )));
        }
        if let SpatialWeight::CosSquared { axis } = spec.weight {
            if axis >= n {
                return Err(NodalError::InvalidConfig(format!("weight axis {axis} out of range")));
            }
        }
        if !spec.shift.is_empty() && spec.shift.len() != n {
            return Err(NodalError::InvalidConfig("shift must have n entries".into()));
        }
        let eta_all = ((1u64 << n) - 1) << n;
        let mut components = vec![(eta_all, Kind::Pure)];
        if spec.mixed != 0.0 {
            components.push((1 | (eta_all & !(1 << n)), Kind::Mixed));
        }
        Ok(Self { n, spec, components })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> &FormSpec {
        &self.spec
    }

    /// `(r0, r1)`: every component vanishes unless `r0 < |η| < r1`.
    pub fn support(&self) -> (f64, f64) {
        (self.spec.r0, self.spec.r1)
    }

    /// Monomial masks of the nonzero components.
    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.components.iter().map(|c| c.0)
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    /// Smooth bump `exp(−1/(1−s²))` on `(r0, r1)`, `s` the affine map to `(−1, 1)`.
    pub fn bump(&self, r: f64) -> f64 {
        let (r0, r1) = self.support();
        if r <= r0 || r >= r1 {
            return 0.0;
        }
        let s = (2.0 * r - r0 - r1) / (r1 - r0);
        (-1.0 / (1.0 - s * s)).exp()
    }

    fn spatial(&self, y: &[f64]) -> f64 {
        if self.spec.shift.is_empty() {
            self.spec.weight.value(y)
        } else {
            let shifted: Vec<f64> = y.iter().zip(&self.spec.shift).map(|(a, b)| a - b).collect();
            self.spec.weight.value(&shifted)
        }
    }

    /// Value of the `index`-th component at `(y, η)`.
    pub fn component_value(&self, index: usize, y: &[f64], eta: &[f64]) -> f64 {
        let r = eta.iter().map(|e| e * e).sum::<f64>().sqrt();
        let rho = self.bump(r);
        if rho == 0.0 {
            return 0.0;
        }
        let s = self.spatial(y);
        match self.components[index].1 {
            Kind::Pure => s * rho * (1.0 + self.spec.tilt * eta[0] / r),
            Kind::Mixed => self.spec.mixed * s * rho,
        }
    }

    /// `∫ ω_{(0…0),(1…1)}(y, η) dⁿy dⁿη`, the quantity entering the leading
    /// pairing law. The tilt term integrates to zero over each sphere.
    pub fn fiber_integral(&self) -> f64 {
        let (r0, r1) = self.support();
        let radial = GaussLegendre::new(64)
            .expect("degree is valid")
            .integrate(r0, r1, |r| self.bump(r) * r.powi(self.n as i32 - 1));
        self.spec.weight.integral(self.n) * sphere_volume(self.n - 1) * radial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks_and_values() {
        let form = TestForm::new(
            2,
            FormSpec {
                mixed: 0.5,
                tilt: 0.3,
                ..FormSpec::default()
            },
        )
        .unwrap();
        let masks: Vec<u64> = form.masks().collect();
        assert_eq!(masks, vec![0b1100, 0b1001]);
        assert_eq!(form.component_value(0, &[0.0, 0.0], &[0.1, 0.0]), 0.0);
        let v = form.component_value(0, &[0.0, 0.0], &[1.25, 0.0]);
        assert!((v - 1.3 * (-1.0f64).exp()).abs() < 1e-15);
        let m = form.component_value(1, &[0.0, 0.0], &[0.0, 1.25]);
        assert!((m - 0.5 * (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn fiber_integral_in_one_dimension() {
        let form = TestForm::new(1, FormSpec::default()).unwrap();
        // Trapezoid rule: exponentially accurate for a bump flat at both ends.
        let m = 20_000;
        let h = 1.5 / m as f64;
        let radial: f64 = (1..m).map(|i| form.bump(0.5 + i as f64 * h)).sum::<f64>() * h;
        let want = 2.0 * PI * 2.0 * radial;
        assert!((form.fiber_integral() / want - 1.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_support() {
        let bad = FormSpec {
            r0: 0.0,
            ..FormSpec::default()
        };
        assert!(TestForm::new(2, bad).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let spec = FormSpec {
            weight: SpatialWeight::CosSquared { axis: 0 },
            ..FormSpec::default()
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<FormSpec>(&text).unwrap(), spec);
    }
}
