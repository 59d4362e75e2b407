//! Plain-text mesh dumps for inspection.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{NodalError, NodalMesh};

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> NodalError + '_ {
    move |source| NodalError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Wavefront OBJ text of a surface mesh: `v x y z` lines then 1-based `f a b c`.
pub fn write_obj(mesh: &NodalMesh, path: &Path) -> Result<(), NodalError> {
    let NodalMesh::Surface(s) = mesh else {
        return Err(NodalError::DimensionMismatch {
            expected: 3,
            got: mesh.dimension(),
        });
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    (|| -> std::io::Result<()> {
        for v in &s.vertices {
            writeln!(w, "v {} {} {}", v[0], v[1], v[2])?;
        }
        for t in &s.triangles {
            writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        w.flush()
    })()
    .map_err(io_err(path))
}

/// One row per nodal-line segment: `x0,y0,x1,y1,length`.
pub fn write_polyline_csv(mesh: &NodalMesh, path: &Path) -> Result<(), NodalError> {
    let NodalMesh::Segments(segs) = mesh else {
        return Err(NodalError::DimensionMismatch {
            expected: 2,
            got: mesh.dimension(),
        });
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    (|| -> std::io::Result<()> {
        writeln!(w, "x0,y0,x1,y1,length")?;
        for s in segs {
            writeln!(w, "{},{},{},{},{}", s.a[0], s.a[1], s.b[0], s.b[1], s.length)?;
        }
        w.flush()
    })()
    .map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodal::{marching_cubes_on_grid, marching_squares_on_grid, GridValues};

    #[test]
    fn dumps() {
        let dir = tempfile::tempdir().unwrap();
        let surface = marching_cubes_on_grid(&GridValues::from_fn(3, 12, 0.0, |x| {
            x[0].cos() + x[1].cos() + x[2].cos() - 2.5
        }));
        let obj = dir.path().join("s.obj");
        write_obj(&surface, &obj).unwrap();
        let text = std::fs::read_to_string(&obj).unwrap();
        assert!(text.starts_with("v "));
        assert!(text.lines().any(|l| l.starts_with("f ")));

        let lines = marching_squares_on_grid(&GridValues::from_fn(2, 16, 0.5, |x| x[0].sin()), |_| 0.0);
        let csv = dir.path().join("l.csv");
        write_polyline_csv(&lines, &csv).unwrap();
        assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 33);
        assert!(write_obj(&lines, &obj).is_err());
        assert!(matches!(
            write_obj(&surface, Path::new("/nonexistent/dir/x.obj")),
            Err(NodalError::Io { .. })
        ));
    }
}
