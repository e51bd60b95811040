//! Global system: assembly of stiffness, mass and load, the zero-mean
//! constrained square system for closed surfaces, and Dirichlet elimination
//! for surfaces with boundary.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use rayon::prelude::*;

use crate::error::{Result, SvemError};
use crate::mesh::{build_frame, SurfaceMesh};
use crate::scalar::Real;
use crate::sparse::{self, SparseMatrix};
use crate::surface::BenchmarkProblem;
use crate::vem::LocalVem;

/// How the additive constant / boundary values are fixed.
#[derive(Clone, Debug, PartialEq)]
pub enum Constraint<T> {
    /// `∫ u_h = 0`, imposed through the row `onesᵀ M` replacing the last
    /// equation.
    ZeroMean,
    /// Prescribed values at `fixed` vertices.
    Dirichlet { fixed: Vec<usize>, values: Vec<T> },
}

#[derive(Clone, Debug)]
pub struct DiscreteSystem<T> {
    /// `A`
    pub stiffness: SparseMatrix<T>,
    /// Polynomial (consistency) part of `A`.
    pub stiffness_consistency: SparseMatrix<T>,
    /// `M`
    pub mass: SparseMatrix<T>,
    /// `b`
    pub load: Vec<T>,
    pub constraint: Constraint<T>,
    /// `ξ`, filled in by [`solve`].
    pub solution: Option<Vec<T>>,
}

impl<T: Real> DiscreteSystem<T> {
    pub fn n_dofs(&self) -> usize {
        self.load.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct AssemblyOptions {
    /// Worker threads for the element loop; `0` or `1` runs serially. Local
    /// matrices are merged in element order either way, so the result does
    /// not depend on this setting.
    pub threads: usize,
}

/// Local matrices of every face, in face order.
pub fn local_matrices<T: Real>(mesh: &SurfaceMesh<T>, opts: AssemblyOptions) -> Result<Vec<LocalVem<T>>> {
    let one = |f: usize| build_frame(mesh, f).and_then(|fr| LocalVem::new(&fr));
    if opts.threads <= 1 {
        (0..mesh.n_faces()).map(one).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| SvemError::InvalidParameter(format!("thread pool: {e}")))?;
        pool.install(|| (0..mesh.n_faces()).into_par_iter().map(one).collect())
    }
}

fn scatter<T: Real>(
    mesh: &SurfaceMesh<T>,
    locals: &[LocalVem<T>],
    pick: impl Fn(&LocalVem<T>) -> &crate::dense::DenseMatrix<T>,
) -> SparseMatrix<T> {
    let n = mesh.n_vertices();
    let cap: usize = mesh.faces().iter().map(|f| f.len() * f.len()).sum();
    let mut trip = Vec::with_capacity(cap);
    for (face, lv) in mesh.faces().iter().zip(locals) {
        let m = pick(lv);
        for (a, &i) in face.iter().enumerate() {
            for (b, &j) in face.iter().enumerate() {
                trip.push((i, j, m[(a, b)]));
            }
        }
    }
    SparseMatrix::from_triplets(n, n, trip)
}

pub fn assemble<T: Real>(mesh: &SurfaceMesh<T>, problem: &BenchmarkProblem<T>) -> Result<DiscreteSystem<T>> {
    assemble_with(mesh, problem, AssemblyOptions::default())
}

pub fn assemble_with<T: Real>(
    mesh: &SurfaceMesh<T>,
    problem: &BenchmarkProblem<T>,
    opts: AssemblyOptions,
) -> Result<DiscreteSystem<T>> {
    let n = mesh.n_vertices();
    let constraint = if problem.zero_mean_constrained {
        if !mesh.is_closed() {
            return Err(SvemError::ConstraintMismatch(
                "zero-mean problem requires a closed mesh, but the mesh has boundary edges".into(),
            ));
        }
        Constraint::ZeroMean
    } else {
        let Some(g) = problem.boundary_data.as_ref() else {
            return Err(SvemError::ConstraintMismatch("Dirichlet problem without boundary data".into()));
        };
        let fixed: Vec<usize> = (0..n).filter(|&v| mesh.boundary_vertex_flags()[v]).collect();
        if fixed.is_empty() {
            return Err(SvemError::ConstraintMismatch(
                "Dirichlet problem requires a mesh with boundary, but the mesh is closed".into(),
            ));
        }
        let values = fixed.iter().map(|&v| g(&mesh.vertices()[v])).collect();
        Constraint::Dirichlet { fixed, values }
    };

    let locals = local_matrices(mesh, opts)?;
    let stiffness = scatter(mesh, &locals, |l| &l.stiffness);
    let stiffness_consistency = scatter(mesh, &locals, |l| &l.stiffness_consistency);
    let mass = scatter(mesh, &locals, |l| &l.mass);

    let mut f: Vec<T> = mesh.vertices().iter().map(|p| problem.load_f(p)).collect();
    if matches!(constraint, Constraint::ZeroMean) {
        let weights = mass.row_sums();
        let total: T = weights.iter().copied().sum();
        let mean = sparse::dot(&weights, &f) / total;
        for v in f.iter_mut() {
            *v -= mean;
        }
    }

    let mut load = vec![T::zero(); n];
    for (face, lv) in mesh.faces().iter().zip(&locals) {
        let integral: T = lv.mass.row_sums().iter().zip(face).map(|(&w, &i)| w * f[i]).sum();
        let share = integral / T::from_count(face.len());
        for &i in face {
            load[i] += share;
        }
    }

    Ok(DiscreteSystem { stiffness, stiffness_consistency, mass, load, constraint, solution: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolverKind {
    /// Sparse LU (zero mean) or Cholesky (Dirichlet).
    #[default]
    Direct,
    /// Jacobi-preconditioned conjugate gradients.
    Iterative { rel_tol_exp: i32, max_iter: usize },
}

impl SolverKind {
    pub fn iterative() -> Self {
        SolverKind::Iterative { rel_tol_exp: -13, max_iter: 0 }
    }
}

/// Diagnostics of a solve.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<T> {
    /// `‖S ξ - r‖` for the square system actually posed (constrained matrix
    /// `S` and right-hand side `r`).
    pub residual: T,
    /// `‖A‖_F ‖ξ‖ + ‖b‖`
    pub scale: T,
    /// `onesᵀ M ξ` (zero-mean problems only).
    pub mean_constraint: Option<T>,
    pub iterations: Option<usize>,
}

/// Relative residual above which a double-precision solve is reported as
/// singular. See [`residual_tol`].
pub const RESIDUAL_TOL: f64 = 1e-9;

/// `RESIDUAL_TOL`, or `1000 ε` if that is larger (single precision).
pub fn residual_tol<T: Real>() -> T {
    T::lit(RESIDUAL_TOL).max(T::epsilon() * T::lit(1e3))
}

/// The square zero-mean system: rows `0..N-1` of `A`, last row `onesᵀ M`,
/// right-hand side `(b_0, …, b_{N-2}, 0)`.
pub fn zero_mean_system<T: Real>(sys: &DiscreteSystem<T>) -> (SparseMatrix<T>, Vec<T>) {
    let n = sys.n_dofs();
    let mut trip: Vec<(usize, usize, T)> = sys.stiffness.iter().filter(|&(i, _, _)| i + 1 < n).collect();
    for (j, s) in sys.mass.col_sums().into_iter().enumerate() {
        trip.push((n - 1, j, s));
    }
    let mut rhs = sys.load.clone();
    rhs[n - 1] = T::zero();
    (SparseMatrix::from_triplets(n, n, trip), rhs)
}

/// Every connected component of the stiffness graph carries one kernel
/// direction (the constants on it). The mean constraint removes only one, and
/// Dirichlet data removes those of components that touch the boundary.
fn check_pinned<T: Real>(sys: &DiscreteSystem<T>) -> Result<()> {
    let n = sys.n_dofs();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, j, _) in sys.stiffness.iter() {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut pinned = vec![false; n];
    if let Constraint::Dirichlet { fixed, .. } = &sys.constraint {
        for &v in fixed {
            let r = find(&mut parent, v);
            pinned[r] = true;
        }
    }
    let roots: Vec<usize> = (0..n).filter(|&v| find(&mut parent, v) == v).collect();
    let free = match sys.constraint {
        Constraint::ZeroMean => roots.len().saturating_sub(1),
        Constraint::Dirichlet { .. } => roots.iter().filter(|&&r| !pinned[r]).count(),
    };
    if free > 0 {
        return Err(SvemError::SingularSystem(format!(
            "{} connected components, {free} without a constraint",
            roots.len()
        )));
    }
    Ok(())
}

/// Solves the system, stores `ξ` in `sys.solution` and returns diagnostics.
///
/// The direct zero-mean solve never factors the bordered matrix: its dense
/// mean row destroys sparsity. Instead the last unknown is pinned to zero, the
/// reduced (SPD) stiffness is factored by sparse Cholesky, and the constant
/// is added that makes the discrete mean vanish. Since `A 1 = 0` this is the
/// unique solution of the bordered system; the reported residual is measured
/// against that system.
pub fn solve<T: Real>(sys: &mut DiscreteSystem<T>, kind: SolverKind) -> Result<SolveReport<T>> {
    let n = sys.n_dofs();
    if n == 0 {
        return Err(SvemError::SingularSystem("empty system".into()));
    }
    check_pinned(sys)?;
    let (xi, iterations) = match &sys.constraint {
        Constraint::ZeroMean => match kind {
            SolverKind::Direct => {
                let (mut x, _) = solve_eliminated(sys, &[n - 1], &[T::zero()], kind)?;
                mean_shift(sys, &mut x);
                (x, None)
            }
            SolverKind::Iterative { rel_tol_exp, max_iter } => {
                let (mut x, it) = conjugate_gradient(&sys.stiffness, &sys.load, rel_tol_exp, max_iter)?;
                mean_shift(sys, &mut x);
                (x, Some(it))
            }
        },
        Constraint::Dirichlet { fixed, values } => solve_eliminated(sys, fixed, values, kind)?,
    };

    if xi.iter().any(|v| !v.is_finite()) {
        return Err(SvemError::SingularSystem("solution is not finite".into()));
    }
    let report = report(sys, &xi, iterations);
    if !(report.residual <= residual_tol::<T>() * report.scale) {
        return Err(SvemError::SingularSystem(format!(
            "residual {:e} exceeds {:e} (system is singular; is the mesh connected?)",
            report.residual,
            residual_tol::<T>() * report.scale
        )));
    }
    sys.solution = Some(xi);
    Ok(report)
}

/// Solves `A ξ = b` with `ξ` prescribed on `fixed`, eliminating those unknowns.
fn solve_eliminated<T: Real>(
    sys: &DiscreteSystem<T>,
    fixed: &[usize],
    values: &[T],
    kind: SolverKind,
) -> Result<(Vec<T>, Option<usize>)> {
    let n = sys.n_dofs();
    let mut is_fixed = vec![usize::MAX; n];
    for (k, &v) in fixed.iter().enumerate() {
        is_fixed[v] = k;
    }
    let free: Vec<usize> = (0..n).filter(|&v| is_fixed[v] == usize::MAX).collect();
    let mut free_pos = vec![usize::MAX; n];
    for (k, &v) in free.iter().enumerate() {
        free_pos[v] = k;
    }
    let mut trip = Vec::new();
    let mut rhs: Vec<T> = free.iter().map(|&v| sys.load[v]).collect();
    for (i, j, a) in sys.stiffness.iter() {
        let fi = free_pos[i];
        if fi == usize::MAX {
            continue;
        }
        match free_pos[j] {
            usize::MAX => rhs[fi] -= a * values[is_fixed[j]],
            fj => trip.push((fi, fj, a)),
        }
    }
    let m = free.len();
    let mut x_free = vec![T::zero(); m];
    let mut iterations = None;
    if m > 0 {
        let reduced = SparseMatrix::from_triplets(m, m, trip);
        match kind {
            SolverKind::Direct => {
                let llt = reduced.to_faer().sp_cholesky(Side::Lower).map_err(|e| {
                    SvemError::SingularSystem(format!("Cholesky factorization failed: {e:?}"))
                })?;
                let mut x = Mat::from_fn(m, 1, |i, _| rhs[i]);
                llt.solve_in_place(x.as_mut());
                x_free = (0..m).map(|i| x[(i, 0)]).collect();
            }
            SolverKind::Iterative { rel_tol_exp, max_iter } => {
                let (x, it) = conjugate_gradient(&reduced, &rhs, rel_tol_exp, max_iter)?;
                x_free = x;
                iterations = Some(it);
            }
        }
    }
    let mut xi = vec![T::zero(); n];
    for (k, &v) in fixed.iter().enumerate() {
        xi[v] = values[k];
    }
    for (k, &v) in free.iter().enumerate() {
        xi[v] = x_free[k];
    }
    Ok((xi, iterations))
}

fn mean_shift<T: Real>(sys: &DiscreteSystem<T>, x: &mut [T]) {
    let w = sys.mass.col_sums();
    let shift = sparse::dot(&w, x) / w.iter().copied().sum::<T>();
    for v in x.iter_mut() {
        *v -= shift;
    }
}

fn report<T: Real>(sys: &DiscreteSystem<T>, xi: &[T], iterations: Option<usize>) -> SolveReport<T> {
    let n = sys.n_dofs();
    let scale = sys.stiffness.frobenius_norm() * sparse::norm2(xi) + sparse::norm2(&sys.load);
    match &sys.constraint {
        Constraint::ZeroMean => {
            let (s, rhs) = zero_mean_system(sys);
            let r: Vec<T> = s.matvec(xi).iter().zip(&rhs).map(|(&a, &b)| a - b).collect();
            SolveReport {
                residual: sparse::norm2(&r),
                scale,
                mean_constraint: Some(sparse::dot(&sys.mass.col_sums(), xi)),
                iterations,
            }
        }
        Constraint::Dirichlet { fixed, .. } => {
            let mut is_fixed = vec![false; n];
            for &v in fixed {
                is_fixed[v] = true;
            }
            let ax = sys.stiffness.matvec(xi);
            let r: Vec<T> = (0..n).filter(|&i| !is_fixed[i]).map(|i| ax[i] - sys.load[i]).collect();
            SolveReport { residual: sparse::norm2(&r), scale, mean_constraint: None, iterations }
        }
    }
}

/// Jacobi-preconditioned CG for a symmetric positive (semi)definite matrix
/// with a consistent right-hand side.
fn conjugate_gradient<T: Real>(a: &SparseMatrix<T>, b: &[T], rel_tol_exp: i32, max_iter: usize) -> Result<(Vec<T>, usize)> {
    let n = b.len();
    let max_iter = if max_iter == 0 { 10 * n.max(10) } else { max_iter };
    let tol = T::lit(10f64.powi(rel_tol_exp)) * sparse::norm2(b);
    let diag = a.diagonal();
    if diag.iter().any(|&d| d <= T::zero()) {
        return Err(SvemError::SingularSystem("non-positive diagonal entry".into()));
    }
    let mut x = vec![T::zero(); n];
    let mut r = b.to_vec();
    if sparse::norm2(&r) <= tol {
        return Ok((x, 0));
    }
    let mut z: Vec<T> = r.iter().zip(&diag).map(|(&ri, &d)| ri / d).collect();
    let mut p = z.clone();
    let mut rz = sparse::dot(&r, &z);
    for it in 1..=max_iter {
        let ap = a.matvec(&p);
        let pap = sparse::dot(&p, &ap);
        if pap <= T::zero() {
            return Err(SvemError::SingularSystem("conjugate gradients broke down".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if sparse::norm2(&r) <= tol {
            return Ok((x, it));
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = sparse::dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(SvemError::SingularSystem(format!("conjugate gradients did not converge in {max_iter} iterations")))
}
