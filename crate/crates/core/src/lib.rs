//! Lowest-order surface virtual elements for the Laplace-Beltrami equation
//! on polygonal surface meshes.
//!
//! The numerical core is generic over the scalar type ([`Real`], implemented
//! for `f32` and `f64`). The aliases at the crate root fix it to `f64`.

pub mod analysis;
pub mod assembly;
pub mod dense;
pub mod error;
pub mod generators;
pub mod geom;
pub mod io;
pub mod mesh;
pub mod pasting;
pub mod scalar;
pub mod sparse;
pub mod surface;
pub mod vem;

pub use analysis::{ErrorRecord, Slopes, Study, StudyLevel};
pub use assembly::{AssemblyOptions, Constraint, DiscreteSystem, SolveReport, SolverKind};
pub use error::{Result, SvemError};
pub use generators::CylinderHalf;
pub use mesh::{Diagnostic, ElementFrame, RegularityReport, SurfaceMesh};
pub use scalar::Real;
pub use surface::{Benchmark, BenchmarkProblem, ImplicitSurface, SmoothSurface};
pub use vem::LocalVem;

pub type Mesh = SurfaceMesh<f64>;
pub type Frame = ElementFrame<f64>;
pub type Surface = SmoothSurface<f64>;
pub type Problem = BenchmarkProblem<f64>;
pub type System = DiscreteSystem<f64>;
pub type Record = ErrorRecord<f64>;

pub type Mesh32 = SurfaceMesh<f32>;
pub type Surface32 = SmoothSurface<f32>;
pub type Problem32 = BenchmarkProblem<f32>;
pub type System32 = DiscreteSystem<f32>;
