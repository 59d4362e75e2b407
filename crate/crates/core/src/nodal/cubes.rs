//! Nodal surfaces in three dimensions by marching tetrahedra on the
//! Freudenthal (Kuhn) subdivision of each grid cube.
//!
//! Every cube is cut into six tetrahedra along its main diagonal, identically
//! in every cube, so the tetrahedra triangulate the torus and the piecewise
//! linear zero set is a closed surface. Mesh vertices lie on tetrahedron
//! edges and are keyed by `8·(lower grid vertex) + (direction mask)`, which
//! welds neighbouring cubes exactly.

use super::squares::check_grid_gradient;
use super::{
    centroid, check_resolution, gradient_threshold, triangle_area, wrap, GridValues, NodalError, NodalMesh, Surface,
};
use crate::ensemble::WaveSample;

const AXIS_ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Nodal surface of a three-dimensional sample on a `grid³` lattice.
pub fn marching_cubes(f: &WaveSample<'_>, grid: usize, offset: f64) -> Result<NodalMesh, NodalError> {
    if f.n() != 3 {
        return Err(NodalError::DimensionMismatch { expected: 3, got: f.n() });
    }
    check_resolution(grid, f.ensemble().spec().lambda)?;
    let vals = GridValues::from_sample(f, grid, offset)?;
    check_grid_gradient(&vals, gradient_threshold(f))?;
    Ok(marching_cubes_on_grid(&vals))
}

struct Builder {
    /// `(key, wrapped position)` per triangle corner, welded afterwards.
    corners: Vec<(u64, [f64; 3])>,
    areas: Vec<f64>,
    centroids: Vec<[f64; 3]>,
}

pub fn marching_cubes_on_grid(vals: &GridValues) -> NodalMesh {
    assert_eq!(vals.n, 3, "marching cubes needs a 3-D grid");
    let g = vals.g;
    let h = vals.spacing();
    let v = vals.perturbed();
    let index = |i: usize, j: usize, k: usize| ((i % g) * g + (j % g)) * g + (k % g);
    let mut b = Builder {
        corners: Vec::new(),
        areas: Vec::new(),
        centroids: Vec::new(),
    };
    let mut cv = [0.0f64; 8];
    let mut cpos = [[0.0f64; 3]; 8];
    let mut cidx = [0usize; 8];
    for i in 0..g {
        for j in 0..g {
            for k in 0..g {
                let mut pos = 0;
                for (m, val) in cv.iter_mut().enumerate() {
                    let (di, dj, dk) = (m & 1, (m >> 1) & 1, (m >> 2) & 1);
                    cidx[m] = index(i + di, j + dj, k + dk);
                    *val = v[cidx[m]];
                    pos += usize::from(*val > 0.0);
                    cpos[m] = [
                        (i as f64 + vals.offset + di as f64) * h,
                        (j as f64 + vals.offset + dj as f64) * h,
                        (k as f64 + vals.offset + dk as f64) * h,
                    ];
                }
                if pos == 0 || pos == 8 {
                    continue;
                }
                for order in AXIS_ORDERS {
                    let c1 = 1usize << order[0];
                    let c2 = c1 | (1 << order[1]);
                    let tet = [0usize, c1, c2, 7];
                    polygonize(&tet, &cv, &cpos, &cidx, &mut b);
                }
            }
        }
    }
    NodalMesh::Surface(weld(b))
}

fn polygonize(tet: &[usize; 4], cv: &[f64; 8], cpos: &[[f64; 3]; 8], cidx: &[usize; 8], b: &mut Builder) {
    let (plus, minus): (Vec<usize>, Vec<usize>) = tet.iter().partition(|&&c| cv[c] > 0.0);
    // Corner masks along the chain are nested, so the smaller mask is the
    // lower end of the edge.
    let vertex = |p: usize, q: usize| -> (u64, [f64; 3]) {
        let (lo, hi) = if p & q == p { (p, q) } else { (q, p) };
        let t = cv[lo] / (cv[lo] - cv[hi]);
        let x = std::array::from_fn(|d| cpos[lo][d] + t * (cpos[hi][d] - cpos[lo][d]));
        (8 * cidx[lo] as u64 + (lo ^ hi) as u64, x)
    };
    match (plus.len(), minus.len()) {
        (1, 3) => emit(b, [vertex(plus[0], minus[0]), vertex(plus[0], minus[1]), vertex(plus[0], minus[2])]),
        (3, 1) => emit(b, [vertex(minus[0], plus[0]), vertex(minus[0], plus[1]), vertex(minus[0], plus[2])]),
        (2, 2) => {
            let (a, bb, c, d) = (plus[0], plus[1], minus[0], minus[1]);
            let ac = vertex(a, c);
            let ad = vertex(a, d);
            let bd = vertex(bb, d);
            let bc = vertex(bb, c);
            emit(b, [ac, ad, bd]);
            emit(b, [ac, bd, bc]);
        }
        _ => {}
    }
}

fn emit(b: &mut Builder, tri: [(u64, [f64; 3]); 3]) {
    let p = tri.map(|t| t.1);
    b.areas.push(triangle_area(&p));
    b.centroids.push(centroid(&p));
    for (key, x) in tri {
        b.corners.push((key, x.map(wrap)));
    }
}

fn weld(b: Builder) -> Surface {
    let mut unique: Vec<(u64, [f64; 3])> = b.corners.clone();
    unique.sort_unstable_by_key(|c| c.0);
    unique.dedup_by_key(|c| c.0);
    let keys: Vec<u64> = unique.iter().map(|c| c.0).collect();
    let lookup = |k: u64| keys.binary_search(&k).expect("key was inserted") as u32;
    let triangles = b
        .corners
        .chunks_exact(3)
        .map(|t| [lookup(t[0].0), lookup(t[1].0), lookup(t[2].0)])
        .collect();
    Surface {
        vertices: unique.into_iter().map(|c| c.1).collect(),
        keys,
        triangles,
        areas: b.areas,
        centroids: b.centroids,
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::ensemble::{stream_rng, Ensemble, Phase, TorusSpec};

    fn from_fn(g: usize, offset: f64, f: impl Fn(&[f64]) -> f64) -> NodalMesh {
        marching_cubes_on_grid(&GridValues::from_fn(3, g, offset, f))
    }

    #[test]
    fn small_level_set_is_a_sphere() {
        let f = |x: &[f64]| x[0].cos() + x[1].cos() + x[2].cos() - 2.5;
        for g in [24, 48] {
            let mesh = from_fn(g, 0.0, f);
            assert_eq!(mesh.euler_characteristic(), 2, "g={g}");
        }
    }

    #[test]
    fn planes_are_tori() {
        let mesh = from_fn(16, 0.25, |x| x[0].sin());
        assert_eq!(mesh.euler_characteristic(), 0);
        let NodalMesh::Surface(s) = &mesh else { panic!() };
        // two flat tori of area 4π² each
        assert!((s.area() - 8.0 * PI * PI).abs() < 1e-9);
    }

    #[test]
    fn sine_sample_gives_two_tori() {
        let ens = Ensemble::new(TorusSpec::new(3, 1.5, 0).unwrap());
        let j = ens
            .basis()
            .iter()
            .position(|b| b.k == vec![1, 0, 0] && b.phase == Phase::Sin)
            .unwrap();
        let mut c = vec![0.0; ens.len()];
        c[j] = 1.0 / ens.basis()[j].normalization;
        let f = ens.sample_from(c).unwrap();
        assert_eq!(marching_cubes(&f, 24, 0.5).unwrap().euler_characteristic(), 0);
    }

    #[test]
    fn welded_mesh_is_closed() {
        // Every edge of a closed surface borders exactly two triangles.
        let ens = Ensemble::new(TorusSpec::new(3, 3.0, 4).unwrap());
        let f = ens.sample(&mut stream_rng(4, "cubes", 0, 0));
        let NodalMesh::Surface(s) = marching_cubes(&f, 32, 0.0).unwrap() else { panic!() };
        let mut edges: Vec<(u32, u32)> = s
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        let mut i = 0;
        while i < edges.len() {
            let mut j = i;
            while j < edges.len() && edges[j] == edges[i] {
                j += 1;
            }
            assert_eq!(j - i, 2);
            i = j;
        }
        assert_eq!(2 * s.edge_count(), 3 * s.triangles.len());
    }

    #[test]
    fn euler_characteristic_is_even_and_shift_invariant() {
        let ens = Ensemble::new(TorusSpec::new(3, 3.0, 5).unwrap());
        for trial in 0..4 {
            let f = ens.sample(&mut stream_rng(5, "cubes", trial, 0));
            let a = marching_cubes(&f, 48, 0.0).unwrap().euler_characteristic();
            let b = marching_cubes(&f, 48, 0.5).unwrap().euler_characteristic();
            assert_eq!(a % 2, 0);
            assert_eq!(a, b);
        }
    }
}
