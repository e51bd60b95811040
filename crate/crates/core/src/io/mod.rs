//! File formats: OFF meshes, legacy VTK, Matrix Market, convergence CSV.

pub mod csv;
pub mod mm;
pub mod off;
pub mod vtk;
