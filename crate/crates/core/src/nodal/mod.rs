//! Discretized nodal sets and the functionals computed on them.

mod cubes;
mod dump;
mod form;
mod pairing;
mod squares;
mod zeros;

use std::f64::consts::PI;
use std::path::PathBuf;

use thiserror::Error;

use crate::ensemble::{EnsembleError, GridEvaluator, WaveSample};
use crate::grassmann::GrassmannError;

pub use cubes::{marching_cubes, marching_cubes_on_grid};
pub use dump::{write_obj, write_polyline_csv};
pub use form::{FormSpec, SpatialWeight, TestForm};
pub use pairing::{conormal_pairing, conormal_pairing_closed_form_1d, conormal_pairing_on_mesh, PairingConfig};
pub use squares::{marching_squares, marching_squares_on_grid};
pub use zeros::{euler_points, find_zeros_circle};

#[derive(Debug, Error)]
pub enum NodalError {
    #[error("grid of {grid} points per axis is too coarse, need at least {needed}")]
    GridTooCoarse { grid: usize, needed: usize },
    #[error("degenerate sample: |grad f| = {gradient:e} below threshold {threshold:e} on the nodal set")]
    Degenerate { gradient: f64, threshold: f64 },
    #[error("t-quadrature did not converge (relative change {relative_change:e})")]
    QuadratureNotConverged { relative_change: f64 },
    #[error("expected dimension {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Uniformly sampled values on the grid `x_d = (i_d + offset)·2π/g`.
#[derive(Clone, Debug)]
pub struct GridValues {
    pub n: usize,
    pub g: usize,
    pub offset: f64,
    pub values: Vec<f64>,
}

impl GridValues {
    pub fn from_sample(f: &WaveSample<'_>, g: usize, offset: f64) -> Result<Self, NodalError> {
        let values = GridEvaluator::new(f.n(), g).values(f, offset)?;
        Ok(Self {
            n: f.n(),
            g,
            offset,
            values,
        })
    }

    pub fn from_fn(n: usize, g: usize, offset: f64, f: impl Fn(&[f64]) -> f64) -> Self {
        let h = 2.0 * PI / g as f64;
        let total = g.pow(n as u32);
        let mut x = vec![0.0; n];
        let values = (0..total)
            .map(|flat| {
                let mut rest = flat;
                for d in (0..n).rev() {
                    x[d] = ((rest % g) as f64 + offset) * h;
                    rest /= g;
                }
                f(&x)
            })
            .collect();
        Self { n, g, offset, values }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.g as f64
    }

    /// Replaces exact zeros by `+1e-12·range` so every vertex has a strict sign.
    pub(crate) fn perturbed(&self) -> Vec<f64> {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let eps = 1e-12 * (hi - lo).max(f64::MIN_POSITIVE);
        self.values.iter().map(|&v| if v == 0.0 { eps } else { v }).collect()
    }
}

/// A zero of a function on the circle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zero {
    pub x: f64,
    pub derivative: f64,
}

/// One straight piece of a nodal line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    /// Endpoints in the cell's unwrapped frame.
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Midpoint reduced to `[0, 2π)²`.
    pub midpoint: [f64; 2],
    pub length: f64,
    pub tangent: [f64; 2],
    /// Grid-edge keys of the two endpoints.
    pub keys: [u64; 2],
}

/// Welded triangle mesh of a nodal surface.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Surface {
    /// Vertex positions reduced to `[0, 2π)³`, sorted by grid-edge key.
    pub vertices: Vec<[f64; 3]>,
    pub keys: Vec<u64>,
    pub triangles: Vec<[u32; 3]>,
    pub areas: Vec<f64>,
    /// Triangle centroids reduced to `[0, 2π)³`.
    pub centroids: Vec<[f64; 3]>,
}

impl Surface {
    /// Builds a mesh from explicit vertices and triangles (no grid keys).
    pub fn from_indexed(vertices: Vec<[f64; 3]>, triangles: Vec<[u32; 3]>) -> Self {
        let (areas, centroids) = triangles
            .iter()
            .map(|t| {
                let p = t.map(|i| vertices[i as usize]);
                (triangle_area(&p), centroid(&p))
            })
            .unzip();
        let keys = (0..vertices.len() as u64).collect();
        Self {
            vertices,
            keys,
            triangles,
            areas,
            centroids,
        }
    }

    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(u32, u32)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn area(&self) -> f64 {
        self.areas.iter().sum()
    }
}

pub(crate) fn triangle_area(p: &[[f64; 3]; 3]) -> f64 {
    let u = [p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]];
    let v = [p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]];
    let c = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
}

pub(crate) fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

pub(crate) fn centroid(p: &[[f64; 3]; 3]) -> [f64; 3] {
    std::array::from_fn(|d| wrap((p[0][d] + p[1][d] + p[2][d]) / 3.0))
}

/// Discretized zero set, by dimension.
#[derive(Clone, Debug, PartialEq)]
pub enum NodalMesh {
    Points(Vec<Zero>),
    Segments(Vec<Segment>),
    Surface(Surface),
}

impl NodalMesh {
    pub fn dimension(&self) -> usize {
        match self {
            NodalMesh::Points(_) => 1,
            NodalMesh::Segments(_) => 2,
            NodalMesh::Surface(_) => 3,
        }
    }

    /// Number of elements (points, segments or triangles).
    pub fn len(&self) -> usize {
        match self {
            NodalMesh::Points(p) => p.len(),
            NodalMesh::Segments(s) => s.len(),
            NodalMesh::Surface(s) => s.triangles.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(location, measure)` of every element: unit mass for points,
    /// length for segments, area for triangles.
    pub fn elements(&self) -> Vec<(Vec<f64>, f64)> {
        match self {
            NodalMesh::Points(p) => p.iter().map(|z| (vec![z.x], 1.0)).collect(),
            NodalMesh::Segments(s) => s.iter().map(|s| (s.midpoint.to_vec(), s.length)).collect(),
            NodalMesh::Surface(s) => s
                .centroids
                .iter()
                .zip(&s.areas)
                .map(|(c, a)| (c.to_vec(), *a))
                .collect(),
        }
    }

    /// `V − E + F` after welding; the point count for `n = 1`.
    pub fn euler_characteristic(&self) -> i64 {
        match self {
            NodalMesh::Points(p) => p.len() as i64,
            NodalMesh::Segments(segs) => {
                let mut verts: Vec<u64> = segs.iter().flat_map(|s| s.keys).collect();
                verts.sort_unstable();
                verts.dedup();
                verts.len() as i64 - segs.len() as i64
            }
            NodalMesh::Surface(s) => {
                s.vertices.len() as i64 - s.edge_count() as i64 + s.triangles.len() as i64
            }
        }
    }
}

/// `Σ weight(x_e)·measure_e` over mesh elements.
pub fn nodal_volume(mesh: &NodalMesh, weight: impl Fn(&[f64]) -> f64) -> f64 {
    mesh.elements().iter().map(|(x, m)| weight(x) * m).sum()
}

/// `V − E + F` of a welded surface mesh.
pub fn euler_characteristic(mesh: &NodalMesh) -> i64 {
    mesh.euler_characteristic()
}

/// Degeneracy threshold `ε_grad = 1e-8·Λ·‖f‖`.
pub fn gradient_threshold(f: &WaveSample<'_>) -> f64 {
    1e-8 * f.ensemble().spec().lambda * f.l2_norm()
}

pub(crate) fn check_resolution(g: usize, lambda: f64) -> Result<(), NodalError> {
    let needed = (8.0 * lambda).ceil() as usize;
    if g < needed {
        return Err(NodalError::GridTooCoarse { grid: g, needed });
    }
    Ok(())
}
