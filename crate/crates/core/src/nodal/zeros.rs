use super::{check_resolution, gradient_threshold, GridValues, NodalError, NodalMesh, Zero};
use crate::ensemble::WaveSample;

fn positive(v: f64) -> bool {
    v >= 0.0
}

/// Zeros of a one-dimensional sample: one per sign change on the grid, refined
/// by bisection on the exact trigonometric sum until the bracket is below `tol`.
pub fn find_zeros_circle(f: &WaveSample<'_>, grid: usize, tol: f64) -> Result<NodalMesh, NodalError> {
    if f.n() != 1 {
        return Err(NodalError::DimensionMismatch { expected: 1, got: f.n() });
    }
    check_resolution(grid, f.ensemble().spec().lambda)?;
    let vals = GridValues::from_sample(f, grid, 0.0)?;
    let h = vals.spacing();
    let threshold = gradient_threshold(f);
    let mut zeros = Vec::new();
    for i in 0..grid {
        let (va, vb) = (vals.values[i], vals.values[(i + 1) % grid]);
        let sign_lo = positive(va);
        if sign_lo == positive(vb) {
            continue;
        }
        let (mut lo, mut hi) = (i as f64 * h, (i + 1) as f64 * h);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if positive(f.evaluate(&[mid])) == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let x = super::wrap(0.5 * (lo + hi));
        let derivative = f.gradient(&[x])[0];
        if derivative.abs() < threshold {
            return Err(NodalError::Degenerate {
                gradient: derivative.abs(),
                threshold,
            });
        }
        zeros.push(Zero { x, derivative });
    }
    Ok(NodalMesh::Points(zeros))
}

/// Euler characteristic of a finite point set: its cardinality.
pub fn euler_points(mesh: &NodalMesh) -> i64 {
    mesh.len() as i64
}
