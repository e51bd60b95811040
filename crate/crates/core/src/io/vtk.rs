use std::io::Write;

use crate::error::{Result, SvemError};
use crate::mesh::SurfaceMesh;
use crate::scalar::Real;

/// Legacy ASCII VTK polydata with nodal scalars `u_h`, `u_exact` and `error`.
pub fn write_vtk<T: Real, W: Write>(mesh: &SurfaceMesh<T>, u_h: &[T], u_exact: &[T], mut w: W) -> Result<()> {
    let n = mesh.n_vertices();
    if u_h.len() != n || u_exact.len() != n {
        return Err(SvemError::InvalidParameter("field length does not match vertex count".into()));
    }
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "svem solution")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET POLYDATA")?;
    writeln!(w, "POINTS {n} double")?;
    for v in mesh.vertices() {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", v[0].as_f64(), v[1].as_f64(), v[2].as_f64())?;
    }
    let size: usize = mesh.faces().iter().map(|f| f.len() + 1).sum();
    writeln!(w, "POLYGONS {} {size}", mesh.n_faces())?;
    for f in mesh.faces() {
        write!(w, "{}", f.len())?;
        for i in f {
            write!(w, " {i}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    let err: Vec<T> = u_h.iter().zip(u_exact).map(|(&a, &b)| b - a).collect();
    for (name, data) in [("u_h", u_h), ("u_exact", u_exact), ("error", &err[..])] {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for v in data {
            writeln!(w, "{:.16e}", v.as_f64())?;
        }
    }
    w.flush()?;
    Ok(())
}
