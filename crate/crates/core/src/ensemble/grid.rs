//! Sample values on a uniform periodic grid via inverse FFT.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{EnsembleError, WaveSample};

/// Evaluates samples on the grid `x_d = 2π (i_d + offset) / g`, flattened
/// row-major with axis 0 slowest.
#[derive(Clone)]
pub struct GridEvaluator {
    n: usize,
    g: usize,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridEvaluator").field("n", &self.n).field("g", &self.g).finish()
    }
}

impl GridEvaluator {
    pub fn new(n: usize, g: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_inverse(g);
        Self { n, g, fft }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn points_per_axis(&self) -> usize {
        self.g
    }

    pub fn len(&self) -> usize {
        self.g.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.g == 0
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.g as f64
    }

    /// Values of `f` at the grid points shifted by `offset` cells on every axis.
    pub fn values(&self, f: &WaveSample<'_>, offset: f64) -> Result<Vec<f64>, EnsembleError> {
        let ens = f.ensemble();
        let lambda = ens.spec().lambda;
        if f.n() != self.n {
            return Err(EnsembleError::LengthMismatch {
                expected: self.n,
                got: f.n(),
            });
        }
        if (self.g as f64) <= 2.0 * lambda {
            return Err(EnsembleError::GridTooCoarse { grid: self.g, lambda });
        }
        let g = self.g;
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); self.len()];
        data[0] = Complex64::new(f.constant_term(), 0.0);
        let s = (2.0 / ens.spec().volume()).sqrt();
        let shift = 2.0 * PI * offset / g as f64;
        for mode in 0..ens.modes() {
            let k = ens.freq(mode);
            let (a, b) = f.mode_coefficients(mode);
            let mut idx = 0usize;
            let mut phase = 0.0;
            for &kd in k {
                idx = idx * g + kd.rem_euclid(g as i32) as usize;
                phase += f64::from(kd) * shift;
            }
            let c = Complex64::new(s * a, -s * b);
            data[idx] = if offset == 0.0 { c } else { c * Complex64::from_polar(1.0, phase) };
        }
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); g];
        for axis in 0..n {
            let stride = g.pow((n - 1 - axis) as u32);
            if stride == 1 {
                self.fft.process_with_scratch(&mut data, &mut scratch);
                continue;
            }
            let block = stride * g;
            for start in (0..data.len()).step_by(block) {
                for inner in 0..stride {
                    let base = start + inner;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    self.fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
        Ok(data.into_iter().map(|z| z.re).collect())
    }

    /// Coordinates of the grid point with multi-index `idx`.
    pub fn point(&self, idx: &[usize], offset: f64) -> Vec<f64> {
        idx.iter().map(|&i| (i as f64 + offset) * self.spacing()).collect()
    }
}
