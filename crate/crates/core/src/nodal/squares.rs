use super::{check_resolution, gradient_threshold, wrap, GridValues, NodalError, NodalMesh, Segment};
use crate::ensemble::WaveSample;

/// Nodal lines of a two-dimensional sample by marching squares on a
/// `grid × grid` periodic lattice shifted by `offset` cells. Saddle cells are
/// resolved by the exact value at the cell centre.
pub fn marching_squares(f: &WaveSample<'_>, grid: usize, offset: f64) -> Result<NodalMesh, NodalError> {
    if f.n() != 2 {
        return Err(NodalError::DimensionMismatch { expected: 2, got: f.n() });
    }
    check_resolution(grid, f.ensemble().spec().lambda)?;
    let vals = GridValues::from_sample(f, grid, offset)?;
    check_grid_gradient(&vals, gradient_threshold(f))?;
    Ok(marching_squares_on_grid(&vals, |x| f.evaluate(x)))
}

/// Flags samples whose values change by less than `threshold·h` across some
/// sign-changing grid edge, a proxy for a vanishing gradient on the nodal set.
pub(crate) fn check_grid_gradient(vals: &GridValues, threshold: f64) -> Result<(), NodalError> {
    let g = vals.g;
    let h = vals.spacing();
    let mut min_slope = f64::INFINITY;
    for flat in 0..vals.values.len() {
        let v = vals.values[flat];
        for axis in 0..vals.n {
            let stride = g.pow((vals.n - 1 - axis) as u32);
            let coord = (flat / stride) % g;
            let next = if coord + 1 == g { flat + stride - g * stride } else { flat + stride };
            let w = vals.values[next];
            if (v >= 0.0) != (w >= 0.0) {
                min_slope = min_slope.min((v - w).abs() / h);
            }
        }
    }
    if min_slope < threshold {
        return Err(NodalError::Degenerate {
            gradient: min_slope,
            threshold,
        });
    }
    Ok(())
}

fn crossing(a: [f64; 2], b: [f64; 2], va: f64, vb: f64) -> [f64; 2] {
    let t = va / (va - vb);
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

fn segment(a: [f64; 2], b: [f64; 2], keys: [u64; 2]) -> Segment {
    let d = [b[0] - a[0], b[1] - a[1]];
    let length = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let tangent = if length > 0.0 { [d[0] / length, d[1] / length] } else { [0.0, 0.0] };
    Segment {
        a,
        b,
        midpoint: [wrap(0.5 * (a[0] + b[0])), wrap(0.5 * (a[1] + b[1]))],
        length,
        tangent,
        keys,
    }
}

/// Marching squares on precomputed values; `center` evaluates the field at a
/// point and is only called for saddle cells.
pub fn marching_squares_on_grid(vals: &GridValues, center: impl Fn(&[f64]) -> f64) -> NodalMesh {
    assert_eq!(vals.n, 2, "marching squares needs a 2-D grid");
    let g = vals.g;
    let h = vals.spacing();
    let v = vals.perturbed();
    let at = |i: usize, j: usize| v[(i % g) * g + (j % g)];
    let idx = |i: usize, j: usize| ((i % g) * g + (j % g)) as u64;
    let mut segs = Vec::new();
    for i in 0..g {
        for j in 0..g {
            let vals4 = [at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)];
            let pos = vals4.map(|x| x > 0.0);
            if pos.iter().all(|&p| p) || pos.iter().all(|&p| !p) {
                continue;
            }
            let (x0, y0) = ((i as f64 + vals.offset) * h, (j as f64 + vals.offset) * h);
            let corners = [[x0, y0], [x0 + h, y0], [x0 + h, y0 + h], [x0, y0 + h]];
            // Edges: 0 = c0–c1, 1 = c1–c2, 2 = c3–c2, 3 = c0–c3.
            let ends = [(0usize, 1usize), (1, 2), (3, 2), (0, 3)];
            let keys = [
                2 * idx(i, j),
                2 * idx(i + 1, j) + 1,
                2 * idx(i, j + 1),
                2 * idx(i, j) + 1,
            ];
            let point = |e: usize| {
                let (a, b) = ends[e];
                crossing(corners[a], corners[b], vals4[a], vals4[b])
            };
            let crossed: Vec<usize> = (0..4).filter(|&e| pos[ends[e].0] != pos[ends[e].1]).collect();
            let mut emit = |e1: usize, e2: usize| segs.push(segment(point(e1), point(e2), [keys[e1], keys[e2]]));
            if crossed.len() == 2 {
                emit(crossed[0], crossed[1]);
            } else {
                let c = center(&[x0 + 0.5 * h, y0 + 0.5 * h]);
                if (c > 0.0) == pos[0] {
                    // c0 and c2 are joined through the centre.
                    emit(0, 1);
                    emit(2, 3);
                } else {
                    emit(0, 3);
                    emit(1, 2);
                }
            }
        }
    }
    NodalMesh::Segments(segs)
}
