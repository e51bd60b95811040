//! Discrete error norms, experimental orders of convergence, the geometric
//! error probe, and the two benchmark convergence studies.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::assembly::{assemble_with, solve, AssemblyOptions, DiscreteSystem, SolveReport, SolverKind};
use crate::error::{Result, SvemError};
use crate::generators::{cylinder_half, cylinder_nominal_h, sphere_hybrid, CylinderHalf};
use crate::geom::{self, Point3};
use crate::mesh::{regularity, SurfaceMesh};
use crate::pasting::{default_merge_tol, paste};
use crate::scalar::Real;
use crate::sparse;
use crate::surface::{benchmark, Benchmark, BenchmarkProblem, ImplicitSurface};

/// Nodal interpolant: vertex values of `u`.
pub fn interpolate<T: Real>(mesh: &SurfaceMesh<T>, u: impl Fn(&Point3<T>) -> T) -> Vec<T> {
    mesh.vertices().iter().map(u).collect()
}

/// One row of a convergence table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorRecord<T> {
    pub level: usize,
    pub h: T,
    pub n_dofs: usize,
    /// `sqrt(δᵀ M δ)`
    pub err_l2: T,
    /// `max |δ_i|`
    pub err_linf: T,
    /// `sqrt(δᵀ A δ)`
    pub err_h1: T,
    pub eoc_l2: Option<T>,
    pub eoc_linf: Option<T>,
    pub eoc_h1: Option<T>,
}

/// Error norms of the solved system against the interpolated exact solution,
/// with `δ = u_I - ξ`. `level` and `h` are filled in by the caller.
pub fn errors<T: Real>(sys: &DiscreteSystem<T>, mesh: &SurfaceMesh<T>, problem: &BenchmarkProblem<T>) -> Result<ErrorRecord<T>> {
    let xi = sys
        .solution
        .as_ref()
        .ok_or_else(|| SvemError::InvalidParameter("system has not been solved".into()))?;
    let ui = interpolate(mesh, |p| problem.exact_u(p));
    let delta: Vec<T> = ui.iter().zip(xi).map(|(&a, &b)| a - b).collect();
    Ok(error_norms(sys, &delta))
}

/// Norms of a given nodal error vector.
pub fn error_norms<T: Real>(sys: &DiscreteSystem<T>, delta: &[T]) -> ErrorRecord<T> {
    let l2 = sys.mass.bilinear(delta, delta).max(T::zero()).sqrt();
    let h1 = sys.stiffness.bilinear(delta, delta).max(T::zero()).sqrt();
    let linf = delta.iter().fold(T::zero(), |m, &d| m.max(d.abs()));
    ErrorRecord {
        level: 0,
        h: T::zero(),
        n_dofs: delta.len(),
        err_l2: l2,
        err_linf: linf,
        err_h1: h1,
        eoc_l2: None,
        eoc_linf: None,
        eoc_h1: None,
    }
}

/// `log(e_prev / e_cur) / log(h_prev / h_cur)`
pub fn eoc<T: Real>(h_prev: T, e_prev: T, h_cur: T, e_cur: T) -> T {
    (e_prev / e_cur).ln() / (h_prev / h_cur).ln()
}

/// Fills the EOC columns from consecutive rows.
pub fn fill_eoc<T: Real>(records: &mut [ErrorRecord<T>]) {
    for k in 1..records.len() {
        let (p, c) = (records[k - 1].clone(), &mut records[k]);
        c.eoc_l2 = Some(eoc(p.h, p.err_l2, c.h, c.err_l2));
        c.eoc_linf = Some(eoc(p.h, p.err_linf, c.h, c.err_linf));
        c.eoc_h1 = Some(eoc(p.h, p.err_h1, c.h, c.err_h1));
    }
}

/// Least-squares slope of `log e` against `log h`.
pub fn log_log_slope<T: Real>(h: &[T], e: &[T]) -> T {
    assert_eq!(h.len(), e.len());
    let n = T::from_count(h.len());
    let xs: Vec<T> = h.iter().map(|v| v.ln()).collect();
    let ys: Vec<T> = e.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Slopes<T> {
    pub l2: T,
    pub linf: T,
    pub h1: T,
}

pub fn slopes<T: Real>(records: &[ErrorRecord<T>]) -> Slopes<T> {
    let h: Vec<T> = records.iter().map(|r| r.h).collect();
    let pick = |f: fn(&ErrorRecord<T>) -> T| log_log_slope(&h, &records.iter().map(f).collect::<Vec<_>>());
    Slopes { l2: pick(|r| r.err_l2), linf: pick(|r| r.err_linf), h1: pick(|r| r.err_h1) }
}

/// Default number of probe points per fan triangle.
pub const DEFAULT_PROBE_SAMPLES: usize = 15;

/// Largest `|d|` over sample points of every face. Each face is split into
/// the fan of triangles joining its vertex mean to its edges; each fan
/// triangle is sampled on the smallest barycentric lattice with at least
/// `samples_per_face` points.
pub fn geometric_probe<T: Real, S: ImplicitSurface<T>>(mesh: &SurfaceMesh<T>, surface: &S, samples_per_face: usize) -> T {
    let samples = samples_per_face.max(1);
    let mut order = 0usize;
    while (order + 1) * (order + 2) / 2 < samples {
        order += 1;
    }
    let mut worst = T::zero();
    for f in 0..mesh.n_faces() {
        let pts = mesh.face_points(f);
        let n = pts.len();
        let c = geom::scale(&pts.iter().fold([T::zero(); 3], |a, p| geom::add(&a, p)), T::one() / T::from_count(n));
        for k in 0..n {
            let (p, q) = (pts[k], pts[(k + 1) % n]);
            if order == 0 {
                let g = geom::scale(&geom::add(&geom::add(&c, &p), &q), T::one() / T::lit(3.0));
                worst = worst.max(surface.signed_distance(&g).abs());
                continue;
            }
            let m = T::from_count(order);
            for i in 0..=order {
                for j in 0..=(order - i) {
                    let (a, b) = (T::from_count(i) / m, T::from_count(j) / m);
                    let w = T::one() - a - b;
                    let x = geom::add(&geom::add(&geom::scale(&c, a), &geom::scale(&p, b)), &geom::scale(&q, w));
                    worst = worst.max(surface.signed_distance(&x).abs());
                }
            }
        }
    }
    worst
}

/// Everything recorded for one refinement level of a study.
#[derive(Clone, Debug)]
pub struct StudyLevel<T> {
    pub record: ErrorRecord<T>,
    pub report: SolveReport<T>,
    pub load_sum: T,
    pub load_norm: T,
    pub mass_norm: T,
    pub solution_norm: T,
    pub face_sizes: BTreeMap<usize, usize>,
    /// Largest element diameter.
    pub max_diameter: T,
    /// Largest `|d|` from [`geometric_probe`].
    pub max_distance: T,
}

/// Refinement sequence of a convergence study.
#[derive(Clone, Debug, PartialEq)]
pub enum Study {
    /// Hybrid sphere meshes at the given subdivision levels, `sphere-xy`.
    Sphere { levels: Vec<u32> },
    /// Pasted half-cylinders for each `N`, `cylinder-exp`.
    Cylinder { n_list: Vec<usize> },
}

impl Study {
    pub fn problem(&self) -> Benchmark {
        match self {
            Study::Sphere { .. } => Benchmark::SphereXy,
            Study::Cylinder { .. } => Benchmark::CylinderExp,
        }
    }

    /// Level labels (subdivision level or `N`).
    pub fn labels(&self) -> Vec<usize> {
        match self {
            Study::Sphere { levels } => levels.iter().map(|&l| l as usize).collect(),
            Study::Cylinder { n_list } => n_list.clone(),
        }
    }
}

/// Mesh for one level of a study and the `h` reported for it: the largest
/// element diameter for spheres, `2 sin(π / 8N)` for the pasted cylinder.
pub fn study_mesh<T: Real>(study: &Study, label: usize) -> Result<(SurfaceMesh<T>, T)> {
    match study {
        Study::Sphere { .. } => {
            let level = u32::try_from(label).map_err(|_| SvemError::InvalidParameter("level too large".into()))?;
            let m = sphere_hybrid::<T>(level);
            let h = regularity(&m)?.h;
            Ok((m, h))
        }
        Study::Cylinder { .. } => {
            let g1 = cylinder_half::<T>(CylinderHalf::Gamma1, label)?;
            let g2 = cylinder_half::<T>(CylinderHalf::Gamma2, label)?;
            let m = paste(&g1, &g2, default_merge_tol(&g1, &g2))?;
            Ok((m, cylinder_nominal_h(label)))
        }
    }
}

/// Runs one level: mesh, assemble, solve, measure.
pub fn run_level<T: Real>(study: &Study, label: usize, opts: AssemblyOptions, solver: SolverKind) -> Result<StudyLevel<T>> {
    let problem = benchmark::<T>(study.problem());
    let (mesh, h) = study_mesh::<T>(study, label)?;
    let max_diameter = regularity(&mesh)?.h;
    let mut sys = assemble_with(&mesh, &problem, opts)?;
    let report = solve(&mut sys, solver)?;
    let mut record = errors(&sys, &mesh, &problem)?;
    record.level = label;
    record.h = h;
    let xi = sys.solution.as_ref().expect("solved");
    Ok(StudyLevel {
        record,
        report,
        load_sum: sys.load.iter().copied().sum(),
        load_norm: sparse::norm2(&sys.load),
        mass_norm: sys.mass.frobenius_norm(),
        solution_norm: sparse::norm2(xi),
        face_sizes: mesh.face_size_histogram(),
        max_diameter,
        max_distance: geometric_probe(&mesh, &problem.surface, DEFAULT_PROBE_SAMPLES),
    })
}

/// Runs every level in order, calling `on_level` after each one (with EOCs
/// filled in). Stops at the first failure, reporting the failing level.
pub fn run_study<T: Real>(
    study: &Study,
    opts: AssemblyOptions,
    solver: SolverKind,
    mut on_level: impl FnMut(&StudyLevel<T>) -> Result<()>,
) -> Result<Vec<StudyLevel<T>>> {
    let mut out: Vec<StudyLevel<T>> = Vec::new();
    for label in study.labels() {
        let mut lvl = run_level::<T>(study, label, opts, solver)
            .map_err(|e| SvemError::AtLevel { level: label, source: Box::new(e) })?;
        if let Some(prev) = out.last() {
            let (p, c) = (&prev.record, &mut lvl.record);
            c.eoc_l2 = Some(eoc(p.h, p.err_l2, c.h, c.err_l2));
            c.eoc_linf = Some(eoc(p.h, p.err_linf, c.h, c.err_linf));
            c.eoc_h1 = Some(eoc(p.h, p.err_h1, c.h, c.err_h1));
        }
        on_level(&lvl)?;
        out.push(lvl);
    }
    Ok(out)
}
