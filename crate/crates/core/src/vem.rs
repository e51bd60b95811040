//! Element-level computations of the lowest-order virtual element method.
//!
//! Degrees of freedom are vertex values. Polynomials are expanded in the
//! scaled monomials `{1, (x - x_E)/h_E, (y - y_E)/h_E}` of the element frame,
//! with `x_E` the area centroid and `h_E` the diameter.

use crate::dense::DenseMatrix;
use crate::error::{Result, SvemError};
use crate::geom::Point2;
use crate::mesh::ElementFrame;
use crate::scalar::Real;

/// Local matrices of one element.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalVem<T> {
    pub n_dofs: usize,
    /// `3 × n`: dof vector → monomial coefficients of `Π∇v`.
    pub proj_coeffs: DenseMatrix<T>,
    /// `n × n`: dof vector → dofs of `Π∇v`.
    pub proj_dofs: DenseMatrix<T>,
    pub stiffness: DenseMatrix<T>,
    /// Polynomial part of `stiffness` (without stabilization).
    pub stiffness_consistency: DenseMatrix<T>,
    pub mass: DenseMatrix<T>,
}

impl<T: Real> LocalVem<T> {
    pub fn new(frame: &ElementFrame<T>) -> Result<Self> {
        let (proj_coeffs, proj_dofs) = projector(frame)?;
        let stab = stabilization(&proj_dofs);
        let consistency = stiffness_consistency(frame, &proj_coeffs);
        let stiffness = consistency.add(&stab);
        let mass = mass_consistency(frame, &proj_coeffs).add(&stab.scaled(frame.area));
        Ok(Self { n_dofs: frame.n_vertices(), proj_coeffs, proj_dofs, stiffness, stiffness_consistency: consistency, mass })
    }
}

/// Values of the scaled monomials at the vertices (`D`, `n × 3`).
pub fn vertex_monomials<T: Real>(frame: &ElementFrame<T>) -> DenseMatrix<T> {
    let h = frame.diameter;
    let c = frame.centroid2d;
    DenseMatrix::from_fn(frame.n_vertices(), 3, |i, a| match a {
        0 => T::one(),
        1 => (frame.coords2d[i][0] - c[0]) / h,
        _ => (frame.coords2d[i][1] - c[1]) / h,
    })
}

/// Monomial coefficients of a linear function `p(x, y) = a + b x + c y`
/// (frame coordinates) in the scaled basis.
pub fn scaled_coefficients<T: Real>(frame: &ElementFrame<T>, a: T, b: T, c: T) -> [T; 3] {
    let h = frame.diameter;
    let x = frame.centroid2d;
    [a + b * x[0] + c * x[1], b * h, c * h]
}

/// Right-hand side `B` (`3 × n`) of the projector system.
///
/// Row 0 fixes the constant via the mean of the vertex values. Rows 1–2 are
/// the boundary integrals `∫_∂E φ_i ∇m_α·n`; the trace of `φ_i` is the hat
/// function on the two edges meeting at vertex `i`, so the integral equals
/// `(|e_prev| n_prev + |e_next| n_next) / 2 · ∇m_α`.
fn projector_rhs<T: Real>(frame: &ElementFrame<T>) -> DenseMatrix<T> {
    let n = frame.n_vertices();
    let h = frame.diameter;
    let half = T::lit(0.5);
    let inv_n = T::one() / T::from_count(n);
    let mut b = DenseMatrix::zeros(3, n);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let (lp, np) = (frame.edge_lengths[prev], frame.edge_normals[prev]);
        let (ln, nn) = (frame.edge_lengths[i], frame.edge_normals[i]);
        b[(0, i)] = inv_n;
        b[(1, i)] = half * (lp * np[0] + ln * nn[0]) / h;
        b[(2, i)] = half * (lp * np[1] + ln * nn[1]) / h;
    }
    b
}

/// Elliptic projector `Π∇` as `(proj_coeffs, proj_dofs)`.
pub fn projector<T: Real>(frame: &ElementFrame<T>) -> Result<(DenseMatrix<T>, DenseMatrix<T>)> {
    let d = vertex_monomials(frame);
    let b = projector_rhs(frame);
    let g = b.matmul(&d);
    let coeffs = g
        .solve(&b, T::epsilon() * T::lit(16.0))
        .ok_or(SvemError::SingularLocalSystem { face: frame.face })?;
    let dofs = d.matmul(&coeffs);
    Ok((coeffs, dofs))
}

/// `(I - Π)ᵀ (I - Π)` on dofs.
fn stabilization<T: Real>(proj_dofs: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = proj_dofs.rows();
    let r = DenseMatrix::identity(n).sub(proj_dofs);
    r.tr_matmul(&r)
}

/// `|E| ∇Π∇φ_i · ∇Π∇φ_j`.
fn stiffness_consistency<T: Real>(frame: &ElementFrame<T>, coeffs: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = coeffs.cols();
    let s = frame.area / (frame.diameter * frame.diameter);
    DenseMatrix::from_fn(n, n, |i, j| s * (coeffs[(1, i)] * coeffs[(1, j)] + coeffs[(2, i)] * coeffs[(2, j)]))
}

/// `∫_E Π∇φ_i Π∇φ_j` from the exact monomial mass matrix.
fn mass_consistency<T: Real>(frame: &ElementFrame<T>, coeffs: &DenseMatrix<T>) -> DenseMatrix<T> {
    let h = monomial_mass(frame);
    let m = coeffs.transpose().matmul(&h).matmul(coeffs);
    let half = T::lit(0.5);
    DenseMatrix::from_fn(m.rows(), m.cols(), |i, j| half * (m[(i, j)] + m[(j, i)]))
}

/// Exact area moments of a polygon up to second order:
/// `(∫1, ∫x, ∫y, ∫x², ∫xy, ∫y²)`, by Green's theorem edge by edge.
pub fn polygon_moments<T: Real>(pts: &[Point2<T>]) -> [T; 6] {
    let n = pts.len();
    let mut m = [T::zero(); 6];
    for k in 0..n {
        let [x0, y0] = pts[k];
        let [x1, y1] = pts[(k + 1) % n];
        let c = x0 * y1 - x1 * y0;
        m[0] += c;
        m[1] += c * (x0 + x1);
        m[2] += c * (y0 + y1);
        m[3] += c * (x0 * x0 + x0 * x1 + x1 * x1);
        m[4] += c * (x0 * y1 + T::lit(2.0) * x0 * y0 + T::lit(2.0) * x1 * y1 + x1 * y0);
        m[5] += c * (y0 * y0 + y0 * y1 + y1 * y1);
    }
    let w = [2.0, 6.0, 6.0, 12.0, 24.0, 12.0];
    for (v, d) in m.iter_mut().zip(w) {
        *v /= T::lit(d);
    }
    m
}

/// `H_{αβ} = ∫_E m_α m_β` for the scaled monomials.
pub fn monomial_mass<T: Real>(frame: &ElementFrame<T>) -> DenseMatrix<T> {
    let c = frame.centroid2d;
    let local: Vec<Point2<T>> = frame.coords2d.iter().map(|p| [p[0] - c[0], p[1] - c[1]]).collect();
    let [a, sx, sy, sxx, sxy, syy] = polygon_moments(&local);
    let h = frame.diameter;
    let h2 = h * h;
    let vals = [[a, sx / h, sy / h], [sx / h, sxx / h2, sxy / h2], [sy / h, sxy / h2, syy / h2]];
    DenseMatrix::from_fn(3, 3, |i, j| vals[i][j])
}

pub fn local_stiffness<T: Real>(frame: &ElementFrame<T>) -> Result<DenseMatrix<T>> {
    Ok(LocalVem::new(frame)?.stiffness)
}

pub fn local_mass<T: Real>(frame: &ElementFrame<T>) -> Result<DenseMatrix<T>> {
    Ok(LocalVem::new(frame)?.mass)
}
