//! Polygonal surface meshes, per-element planar frames, and mesh-quality
//! checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Result, SvemError};
use crate::geom::{self, Point2, Point3};
use crate::scalar::Real;
use crate::surface::ImplicitSurface;

/// Faces whose out-of-plane deviation exceeds this multiple of `h_E²` are
/// rejected.
pub const MAX_PLANARITY_RATIO: f64 = 0.5;

/// Relative area below which a projected polygon is degenerate.
const AREA_EPS: f64 = 1e-14;

/// Polygonal approximation of a surface: vertex positions and faces given as
/// counterclockwise vertex cycles (w.r.t. the outward normal).
///
/// Boundary flags are derived from the topology: a vertex is on the boundary
/// iff it belongs to an edge used by exactly one face.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceMesh<T> {
    vertices: Vec<Point3<T>>,
    faces: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

/// One use of an undirected edge by a face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeUse {
    pub face: usize,
    /// Position of the edge's first vertex in the face cycle.
    pub local: usize,
    /// Whether the face traverses the edge from the smaller to the larger
    /// vertex index.
    pub ascending: bool,
}

impl<T: Real> SurfaceMesh<T> {
    pub fn new(vertices: Vec<Point3<T>>, faces: Vec<Vec<usize>>) -> Result<Self> {
        for (f, face) in faces.iter().enumerate() {
            if face.len() < 3 {
                return Err(SvemError::InvalidMesh(format!("face {f} has {} vertices", face.len())));
            }
            if let Some(&bad) = face.iter().find(|&&v| v >= vertices.len()) {
                return Err(SvemError::InvalidMesh(format!(
                    "face {f} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            let distinct: BTreeSet<usize> = face.iter().copied().collect();
            if distinct.len() != face.len() {
                return Err(SvemError::InvalidMesh(format!("face {f} repeats a vertex")));
            }
        }
        let mut mesh = Self { boundary: vec![false; vertices.len()], vertices, faces };
        let mut flags = vec![false; mesh.vertices.len()];
        for (&(a, b), uses) in &mesh.edge_map() {
            if uses.len() == 1 {
                flags[a] = true;
                flags[b] = true;
            }
        }
        mesh.boundary = flags;
        Ok(mesh)
    }

    #[inline]
    pub fn vertices(&self) -> &[Point3<T>] {
        &self.vertices
    }

    #[inline]
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    #[inline]
    pub fn boundary_vertex_flags(&self) -> &[bool] {
        &self.boundary
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn is_closed(&self) -> bool {
        !self.boundary.iter().any(|&b| b)
    }

    pub fn face_points(&self, face: usize) -> Vec<Point3<T>> {
        self.faces[face].iter().map(|&v| self.vertices[v]).collect()
    }

    /// Undirected edges keyed by `(min, max)` vertex index, with every face
    /// that uses them.
    pub fn edge_map(&self) -> BTreeMap<(usize, usize), Vec<EdgeUse>> {
        let mut map: BTreeMap<(usize, usize), Vec<EdgeUse>> = BTreeMap::new();
        for (f, face) in self.faces.iter().enumerate() {
            let n = face.len();
            for k in 0..n {
                let (a, b) = (face[k], face[(k + 1) % n]);
                map.entry((a.min(b), a.max(b))).or_default().push(EdgeUse {
                    face: f,
                    local: k,
                    ascending: a < b,
                });
            }
        }
        map
    }

    /// Directed boundary edges `(a, b)` in the orientation of their face.
    pub fn boundary_edges(&self) -> Vec<(usize, usize, EdgeUse)> {
        self.edge_map()
            .into_iter()
            .filter(|(_, uses)| uses.len() == 1)
            .map(|((lo, hi), uses)| {
                let u = uses[0];
                if u.ascending {
                    (lo, hi, u)
                } else {
                    (hi, lo, u)
                }
            })
            .collect()
    }

    /// Number of faces per polygon size.
    pub fn face_size_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for f in &self.faces {
            *h.entry(f.len()).or_insert(0) += 1;
        }
        h
    }

    pub fn bounding_box_diagonal(&self) -> T {
        if self.vertices.is_empty() {
            return T::zero();
        }
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        geom::dist(&lo, &hi)
    }

    /// Euler characteristic `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_map().len() as i64 + self.faces.len() as i64
    }

    /// Same mesh with vertices renumbered: new index of old vertex `i` is
    /// `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        assert_eq!(perm.len(), self.vertices.len());
        let mut vertices = vec![[T::zero(); 3]; self.vertices.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let faces = self.faces.iter().map(|f| f.iter().map(|&v| perm[v]).collect()).collect();
        Self::new(vertices, faces)
    }

    pub fn frame(&self, face: usize) -> Result<ElementFrame<T>> {
        build_frame(self, face)
    }
}

/// Planar chart of one element: the face is projected onto its least-squares
/// plane and expressed in 2D coordinates centered at the projected vertex mean.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementFrame<T> {
    /// Index of the face this frame was built for (used to label errors).
    pub face: usize,
    pub origin: Point3<T>,
    pub tangent_basis: [Point3<T>; 2],
    pub normal: Point3<T>,
    pub coords2d: Vec<Point2<T>>,
    pub area: T,
    pub diameter: T,
    /// Area centroid in frame coordinates.
    pub centroid2d: Point2<T>,
    /// Outward unit normal of edge `k` (from vertex `k` to vertex `k+1`).
    pub edge_normals: Vec<Point2<T>>,
    pub edge_lengths: Vec<T>,
    pub planarity_defect: T,
}

impl<T: Real> ElementFrame<T> {
    pub fn n_vertices(&self) -> usize {
        self.coords2d.len()
    }

    /// Maps frame coordinates back to space (onto the fitted plane).
    pub fn lift(&self, q: &Point2<T>) -> Point3<T> {
        let [t1, t2] = &self.tangent_basis;
        geom::add(&self.origin, &geom::add(&geom::scale(t1, q[0]), &geom::scale(t2, q[1])))
    }

    pub fn centroid3d(&self) -> Point3<T> {
        self.lift(&self.centroid2d)
    }

    /// Builds the frame of a polygon given by its vertex positions. `face` is
    /// only used to label errors.
    pub fn from_points(points: &[Point3<T>], face: usize) -> Result<Self> {
        let n = points.len();
        let degenerate = |reason: &str| SvemError::DegenerateFace { face, reason: reason.to_string() };
        if n < 3 {
            return Err(degenerate("fewer than three vertices"));
        }
        let inv_n = T::one() / T::from_count(n);
        let mut origin = [T::zero(); 3];
        for p in points {
            origin = geom::add(&origin, p);
        }
        origin = geom::scale(&origin, inv_n);
        let rel: Vec<Point3<T>> = points.iter().map(|p| geom::sub(p, &origin)).collect();

        let mut cov = [[T::zero(); 3]; 3];
        for r in &rel {
            for i in 0..3 {
                for j in 0..3 {
                    cov[i][j] += r[i] * r[j];
                }
            }
        }
        let (_, vecs) = geom::symmetric_eigen3(cov);
        let mut normal = [vecs[0][0], vecs[1][0], vecs[2][0]];
        let mut newell = [T::zero(); 3];
        for k in 0..n {
            newell = geom::add(&newell, &geom::cross(&rel[k], &rel[(k + 1) % n]));
        }
        if geom::dot(&normal, &newell) < T::zero() {
            normal = geom::scale(&normal, -T::one());
        }
        let normal = geom::normalize(&normal).ok_or_else(|| degenerate("no best-fit plane"))?;

        let in_plane = |v: &Point3<T>| geom::sub(v, &geom::scale(&normal, geom::dot(v, &normal)));
        let t1 = rel
            .iter()
            .find_map(|r| geom::normalize(&in_plane(r)))
            .ok_or_else(|| degenerate("vertices coincide"))?;
        let t2 = geom::cross(&normal, &t1);

        let coords2d: Vec<Point2<T>> = rel.iter().map(|r| [geom::dot(r, &t1), geom::dot(r, &t2)]).collect();
        let planarity_defect = rel.iter().fold(T::zero(), |m, r| m.max(geom::dot(r, &normal).abs()));

        let mut diameter = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                diameter = diameter.max(geom::dist2(&coords2d[i], &coords2d[j]));
            }
        }
        if diameter <= T::zero() {
            return Err(degenerate("zero diameter"));
        }

        let (area, centroid2d) = shoelace(&coords2d);
        if area <= T::lit(AREA_EPS) * diameter * diameter {
            return Err(degenerate("projected polygon has non-positive area"));
        }
        if self_intersects(&coords2d) {
            return Err(degenerate("polygon boundary self-intersects"));
        }
        if planarity_defect > T::lit(MAX_PLANARITY_RATIO) * diameter * diameter {
            return Err(degenerate("planarity defect exceeds 0.5 h_E^2"));
        }

        let mut edge_normals = Vec::with_capacity(n);
        let mut edge_lengths = Vec::with_capacity(n);
        for k in 0..n {
            let a = coords2d[k];
            let b = coords2d[(k + 1) % n];
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            if len <= T::zero() {
                return Err(degenerate("zero-length edge"));
            }
            edge_normals.push([dy / len, -dx / len]);
            edge_lengths.push(len);
        }

        Ok(Self {
            face,
            origin,
            tangent_basis: [t1, t2],
            normal,
            coords2d,
            area,
            diameter,
            centroid2d,
            edge_normals,
            edge_lengths,
            planarity_defect,
        })
    }
}

/// Signed area and area centroid of a closed polygon.
pub fn shoelace<T: Real>(pts: &[Point2<T>]) -> (T, Point2<T>) {
    let n = pts.len();
    let mut a2 = T::zero();
    let mut cx = T::zero();
    let mut cy = T::zero();
    for k in 0..n {
        let p = pts[k];
        let q = pts[(k + 1) % n];
        let c = geom::cross2(&p, &q);
        a2 += c;
        cx += (p[0] + q[0]) * c;
        cy += (p[1] + q[1]) * c;
    }
    let area = a2 * T::lit(0.5);
    if a2 == T::zero() {
        return (area, [T::zero(); 2]);
    }
    let s = T::one() / (T::lit(3.0) * a2);
    (area, [cx * s, cy * s])
}

fn orient<T: Real>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> T {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment<T: Real>(a: &Point2<T>, b: &Point2<T>, p: &Point2<T>) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_touch<T: Real>(p1: &Point2<T>, p2: &Point2<T>, q1: &Point2<T>, q2: &Point2<T>, tol: T) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol)) {
        return true;
    }
    (d1.abs() <= tol && on_segment(q1, q2, p1))
        || (d2.abs() <= tol && on_segment(q1, q2, p2))
        || (d3.abs() <= tol && on_segment(p1, p2, q1))
        || (d4.abs() <= tol && on_segment(p1, p2, q2))
}

/// Whether two non-adjacent edges of the polygon touch or cross.
pub fn self_intersects<T: Real>(pts: &[Point2<T>]) -> bool {
    let n = pts.len();
    let mut scale = T::zero();
    for p in pts {
        scale = scale.max(p[0].abs()).max(p[1].abs());
    }
    let tol = T::lit(1e-13) * scale * scale;
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_touch(&pts[i], &pts[(i + 1) % n], &pts[j], &pts[(j + 1) % n], tol) {
                return true;
            }
        }
    }
    false
}

pub fn build_frame<T: Real>(mesh: &SurfaceMesh<T>, face_index: usize) -> Result<ElementFrame<T>> {
    ElementFrame::from_points(&mesh.face_points(face_index), face_index)
}

/// Kernel of a polygon (the set of points from which the whole polygon is
/// visible), computed by clipping a bounding box against the inner half-plane
/// of every edge. Empty when the polygon is not star-shaped.
pub fn polygon_kernel<T: Real>(frame: &ElementFrame<T>) -> Vec<Point2<T>> {
    let pts = &frame.coords2d;
    let pad = frame.diameter;
    let (mut lo, mut hi) = ([T::infinity(); 2], [T::neg_infinity(); 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let mut poly = vec![
        [lo[0] - pad, lo[1] - pad],
        [hi[0] + pad, lo[1] - pad],
        [hi[0] + pad, hi[1] + pad],
        [lo[0] - pad, hi[1] + pad],
    ];
    let n = pts.len();
    for k in 0..n {
        let a = pts[k];
        let nrm = frame.edge_normals[k];
        // inside: (p - a)·n ≤ 0
        let side = |p: &Point2<T>| (p[0] - a[0]) * nrm[0] + (p[1] - a[1]) * nrm[1];
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let p = poly[i];
            let q = poly[(i + 1) % poly.len()];
            let (sp, sq) = (side(&p), side(&q));
            if sp <= T::zero() {
                out.push(p);
            }
            if (sp < T::zero() && sq > T::zero()) || (sp > T::zero() && sq < T::zero()) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        poly = out;
        if poly.is_empty() {
            break;
        }
    }
    let (area, _) = if poly.len() >= 3 { shoelace(&poly) } else { (T::zero(), [T::zero(); 2]) };
    if area <= T::lit(AREA_EPS) * frame.diameter * frame.diameter {
        Vec::new()
    } else {
        poly
    }
}

/// Radius of the largest disk contained in the polygon's kernel, i.e. the
/// largest ball the polygon is star-shaped with respect to. Zero for
/// non-star-shaped polygons.
///
/// The disk center maximizes the distance to all edge lines; this linear
/// program in `(x, y, r)` is solved by enumerating its vertices (triples of
/// active edge constraints).
pub fn star_radius<T: Real>(frame: &ElementFrame<T>) -> T {
    let pts = &frame.coords2d;
    let n = pts.len();
    let rhs: Vec<T> = (0..n)
        .map(|k| frame.edge_normals[k][0] * pts[k][0] + frame.edge_normals[k][1] * pts[k][1])
        .collect();
    let tol = T::lit(1e-12) * frame.diameter;
    let mut best = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let rows = [i, j, k];
                let a = crate::dense::DenseMatrix::from_fn(3, 3, |r, c| {
                    if c < 2 {
                        frame.edge_normals[rows[r]][c]
                    } else {
                        T::one()
                    }
                });
                let b = crate::dense::DenseMatrix::from_fn(3, 1, |r, _| rhs[rows[r]]);
                let Some(sol) = a.solve(&b, T::lit(1e-12)) else { continue };
                let (x, y, r) = (sol[(0, 0)], sol[(1, 0)], sol[(2, 0)]);
                if r <= best {
                    continue;
                }
                let feasible = (0..n).all(|e| {
                    frame.edge_normals[e][0] * x + frame.edge_normals[e][1] * y + r <= rhs[e] + tol
                });
                if feasible {
                    best = r;
                }
            }
        }
    }
    best
}

/// Mesh-regularity summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityReport<T> {
    /// min over elements of `ρ_E / h_E`.
    pub gamma1: T,
    /// min over elements of (smallest vertex distance) / `h_E`.
    pub gamma2: T,
    pub h: T,
    pub max_planarity_defect_ratio: T,
    pub n_elements: usize,
    pub n_vertices: usize,
    /// Faces with an empty kernel.
    pub non_star_shaped: Vec<usize>,
    pub valid: bool,
}

pub fn regularity<T: Real>(mesh: &SurfaceMesh<T>) -> Result<RegularityReport<T>> {
    let mut gamma1 = T::infinity();
    let mut gamma2 = T::infinity();
    let mut h = T::zero();
    let mut planarity = T::zero();
    let mut non_star = Vec::new();
    for f in 0..mesh.n_faces() {
        let frame = build_frame(mesh, f)?;
        let he = frame.diameter;
        h = h.max(he);
        planarity = planarity.max(frame.planarity_defect / (he * he));
        let rho = if polygon_kernel(&frame).is_empty() {
            non_star.push(f);
            T::zero()
        } else {
            star_radius(&frame)
        };
        gamma1 = gamma1.min(rho / he);
        let pts = &frame.coords2d;
        let mut dmin = T::infinity();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                dmin = dmin.min(geom::dist2(&pts[i], &pts[j]));
            }
        }
        gamma2 = gamma2.min(dmin / he);
    }
    if mesh.n_faces() == 0 {
        gamma1 = T::zero();
        gamma2 = T::zero();
    }
    Ok(RegularityReport {
        gamma1,
        gamma2,
        h,
        max_planarity_defect_ratio: planarity,
        n_elements: mesh.n_faces(),
        n_vertices: mesh.n_vertices(),
        valid: non_star.is_empty() && mesh.n_faces() > 0,
        non_star_shaped: non_star,
    })
}

/// A problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind")]
pub enum Diagnostic<T> {
    NonManifoldEdge { a: usize, b: usize, faces: usize },
    InconsistentOrientation { a: usize, b: usize },
    /// Vertex lying inside a boundary edge it does not belong to.
    TJunction { a: usize, b: usize, vertex: usize },
    DuplicateVertex { a: usize, b: usize },
    DegenerateFace { face: usize, reason: String },
    OffSurfaceVertex { vertex: usize, distance: T },
}

impl<T: fmt::Display> fmt::Display for Diagnostic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::NonManifoldEdge { a, b, faces } => write!(f, "edge ({a},{b}) used by {faces} faces"),
            Diagnostic::InconsistentOrientation { a, b } => {
                write!(f, "edge ({a},{b}) traversed in the same direction by both faces")
            }
            Diagnostic::TJunction { a, b, vertex } => {
                write!(f, "vertex {vertex} hangs on boundary edge ({a},{b}) (non-manifold T-junction)")
            }
            Diagnostic::DuplicateVertex { a, b } => write!(f, "vertices {a} and {b} coincide"),
            Diagnostic::DegenerateFace { face, reason } => write!(f, "face {face}: {reason}"),
            Diagnostic::OffSurfaceVertex { vertex, distance } => {
                write!(f, "vertex {vertex} is off the surface by {distance}")
            }
        }
    }
}

/// Distance below which vertices are treated as the same point in
/// [`validate`], relative to the bounding-box diagonal.
const COINCIDENCE_REL: f64 = 1e-9;

/// Tolerance on `|d|` at mesh vertices.
pub const VERTEX_ON_SURFACE_TOL: f64 = 1e-10;

/// Checks edge-manifoldness, orientation consistency, hanging nodes, face
/// validity and (optionally) that every vertex lies on `surface`. An empty
/// result means the mesh is valid.
pub fn validate<T: Real, S: ImplicitSurface<T>>(mesh: &SurfaceMesh<T>, surface: Option<&S>) -> Vec<Diagnostic<T>> {
    let mut out = Vec::new();
    for (&(a, b), uses) in &mesh.edge_map() {
        if uses.len() > 2 {
            out.push(Diagnostic::NonManifoldEdge { a, b, faces: uses.len() });
        } else if uses.len() == 2 && uses[0].ascending == uses[1].ascending {
            out.push(Diagnostic::InconsistentOrientation { a, b });
        }
    }

    let tol = T::lit(COINCIDENCE_REL) * mesh.bounding_box_diagonal();
    let boundary_edges = mesh.boundary_edges();
    let boundary_vertices: Vec<usize> =
        (0..mesh.n_vertices()).filter(|&v| mesh.boundary_vertex_flags()[v]).collect();
    let verts = mesh.vertices();
    for &(a, b, _) in &boundary_edges {
        let len = geom::dist(&verts[a], &verts[b]);
        for &v in &boundary_vertices {
            if v == a || v == b {
                continue;
            }
            let (d, t) = geom::point_segment(&verts[v], &verts[a], &verts[b]);
            if d <= tol && t * len > tol && (T::one() - t) * len > tol {
                out.push(Diagnostic::TJunction { a, b, vertex: v });
            }
        }
    }
    for (i, &a) in boundary_vertices.iter().enumerate() {
        for &b in &boundary_vertices[i + 1..] {
            if geom::dist(&verts[a], &verts[b]) <= tol {
                out.push(Diagnostic::DuplicateVertex { a, b });
            }
        }
    }

    for f in 0..mesh.n_faces() {
        if let Err(SvemError::DegenerateFace { reason, .. }) = build_frame(mesh, f) {
            out.push(Diagnostic::DegenerateFace { face: f, reason });
        }
    }

    if let Some(s) = surface {
        for (v, p) in verts.iter().enumerate() {
            let d = s.signed_distance(p);
            if d.abs() > T::lit(VERTEX_ON_SURFACE_TOL) {
                out.push(Diagnostic::OffSurfaceVertex { vertex: v, distance: d });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::SmoothSurface;

    fn single(points: Vec<Point3<f64>>) -> SurfaceMesh<f64> {
        let n = points.len();
        SurfaceMesh::new(points, vec![(0..n).collect()]).unwrap()
    }

    fn unit_square() -> SurfaceMesh<f64> {
        single(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    }

    #[test]
    fn square_frame() {
        let m = unit_square();
        let fr = build_frame(&m, 0).unwrap();
        assert!((fr.area - 1.0).abs() < 1e-15);
        assert!((fr.diameter - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(fr.planarity_defect, 0.0);
        let c = fr.centroid3d();
        assert!(geom::dist(&c, &[0.5, 0.5, 0.0]) < 1e-15);
        assert!(geom::dist(&fr.normal, &[0.0, 0.0, 1.0]) < 1e-15);
        for (k, n) in fr.edge_normals.iter().enumerate() {
            let a = fr.coords2d[k];
            let b = fr.coords2d[(k + 1) % 4];
            let mid = [(a[0] + b[0]) / 2.0 - fr.centroid2d[0], (a[1] + b[1]) / 2.0 - fr.centroid2d[1]];
            assert!(n[0] * mid[0] + n[1] * mid[1] > 0.0);
            assert!((n[0].hypot(n[1]) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn triangle_frame() {
        let m = single(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let fr = build_frame(&m, 0).unwrap();
        assert!((fr.area - 0.5).abs() < 1e-15);
        assert!((fr.diameter - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn lifted_hexagon_defect_matches_exhaustive_plane_fit() {
        let mut pts: Vec<Point3<f64>> = (0..6)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 3.0;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        pts[2][2] = 1e-3;
        let fr = ElementFrame::from_points(&pts, 0).unwrap();
        // brute-force least-squares plane: scan normals on a fine grid of the
        // upper hemisphere near the z axis and keep the one minimizing the
        // sum of squared offsets about the vertex mean.
        let mean = pts.iter().fold([0.0; 3], |acc, p| geom::add(&acc, p)).map(|c| c / 6.0);
        let mut best = (f64::INFINITY, 0.0);
        let steps = 400;
        for i in -steps..=steps {
            for j in -steps..=steps {
                let n = geom::normalize(&[i as f64 * 5e-6, j as f64 * 5e-6, 1.0]).unwrap();
                let offs: Vec<f64> = pts.iter().map(|p| geom::dot(&geom::sub(p, &mean), &n)).collect();
                let ss: f64 = offs.iter().map(|o| o * o).sum();
                if ss < best.0 {
                    best = (ss, offs.iter().fold(0.0f64, |m, o| m.max(o.abs())));
                }
            }
        }
        assert!((fr.planarity_defect - best.1).abs() < 2e-6, "{} vs {}", fr.planarity_defect, best.1);
        // projection of the bump onto span{1, x, y} is 1/6 + 1/3 at the lifted vertex
        assert!((fr.planarity_defect - 5e-4).abs() < 1e-6);
    }

    #[test]
    fn closed_polygon_identity() {
        let pts: Vec<Point3<f64>> = (0..7)
            .map(|k| {
                let t = k as f64 * 2.0 * std::f64::consts::PI / 7.0;
                [1.3 * t.cos() + 0.2, 0.7 * t.sin(), 0.1 * t.cos()]
            })
            .collect();
        let fr = ElementFrame::from_points(&pts, 0).unwrap();
        let mut s = [0.0; 2];
        for k in 0..7 {
            s[0] += fr.edge_lengths[k] * fr.edge_normals[k][0];
            s[1] += fr.edge_lengths[k] * fr.edge_normals[k][1];
        }
        assert!(s[0].abs() < 1e-12 && s[1].abs() < 1e-12);
        let (a, _) = shoelace(&fr.coords2d);
        assert!((a - fr.area).abs() <= 1e-12 * fr.area);
    }

    #[test]
    fn bowtie_is_rejected() {
        let m = single(vec![[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        assert!(matches!(build_frame(&m, 0), Err(SvemError::DegenerateFace { .. })));
        assert!(regularity(&m).is_err());
    }

    #[test]
    fn square_regularity() {
        let r = regularity(&unit_square()).unwrap();
        assert!((r.gamma1 - 0.5 / 2f64.sqrt()).abs() < 1e-14);
        assert!((r.gamma2 - 1.0 / 2f64.sqrt()).abs() < 1e-14);
        assert!(r.valid);
    }

    #[test]
    fn triangle_regularity_is_incircle() {
        let m = single(vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]);
        let fr = build_frame(&m, 0).unwrap();
        let rho = star_radius(&fr);
        assert!((rho - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-14);
        let r = regularity(&m).unwrap();
        assert!((r.gamma2 - 1.0 / 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn comb_polygon_has_empty_kernel() {
        // a "U" shape: simple but not star-shaped
        let pts = vec![
            [0.0, 0.0, 0.0],
            [3.0, 0.0, 0.0],
            [3.0, 3.0, 0.0],
            [2.0, 3.0, 0.0],
            [2.0, 0.5, 0.0],
            [1.0, 0.5, 0.0],
            [1.0, 3.0, 0.0],
            [0.0, 3.0, 0.0],
        ];
        let m = single(pts);
        let r = regularity(&m).unwrap();
        assert_eq!(r.non_star_shaped, vec![0]);
        assert_eq!(r.gamma1, 0.0);
        assert!(!r.valid);
    }

    #[test]
    fn t_junction_is_reported() {
        // left: two stacked squares; right: one square of double height whose
        // left edge is not split.
        let v = vec![
            [-1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0],
            [-1.0, 0.5, 0.0],
            [0.0, 1.0, 0.0],
            [-1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        let faces = vec![vec![0, 1, 2, 3], vec![3, 2, 4, 5], vec![1, 6, 7, 4]];
        let m = SurfaceMesh::new(v, faces).unwrap();
        let d = validate::<f64, SmoothSurface<f64>>(&m, None);
        assert!(d.iter().any(|x| matches!(x, Diagnostic::TJunction { vertex: 2, .. })), "{d:?}");
    }

    #[test]
    fn off_surface_vertex_is_reported() {
        let r = 1.0 / 3f64.sqrt();
        let mut m = single(vec![[r, r, r], [r, -r, r], [-r, r, r]]);
        assert!(validate(&m, Some(&SmoothSurface::unit_sphere())).is_empty());
        m.vertices[1] = geom::scale(&m.vertices[1], 1.01);
        let d = validate(&m, Some(&SmoothSurface::unit_sphere()));
        assert!(matches!(d[..], [Diagnostic::OffSurfaceVertex { vertex: 1, .. }]));
    }

    #[test]
    fn inconsistent_orientation_is_reported() {
        let v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        let m = SurfaceMesh::new(v, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        let d = validate::<f64, SmoothSurface<f64>>(&m, None);
        assert!(d.iter().any(|x| matches!(x, Diagnostic::InconsistentOrientation { a: 0, b: 1 })));
    }

    #[test]
    fn structural_errors() {
        let v = vec![[0.0f64; 3]; 3];
        assert!(SurfaceMesh::new(v.clone(), vec![vec![0, 1]]).is_err());
        assert!(SurfaceMesh::new(v.clone(), vec![vec![0, 1, 3]]).is_err());
        assert!(SurfaceMesh::new(v, vec![vec![0, 1, 1]]).is_err());
    }

    #[test]
    fn excessive_warp_is_rejected() {
        let pts = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 3.0], [1.0, 1.0, 0.0], [0.0, 1.0, 3.0]];
        assert!(matches!(ElementFrame::from_points(&pts, 3), Err(SvemError::DegenerateFace { face: 3, .. })));
    }
}
