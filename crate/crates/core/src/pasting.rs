//! Joining two polygonal meshes along straight seams.
//!
//! Seam vertices that coincide are identified; vertices of one mesh that fall
//! strictly inside a seam edge of the other (hanging nodes) are inserted into
//! that edge's face, which turns it into a polygon with collinear consecutive
//! vertices. The result is edge-manifold without any re-triangulation.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Result, SvemError};
use crate::geom::{self, Point3};
use crate::mesh::{validate, Diagnostic, SurfaceMesh};
use crate::scalar::Real;
use crate::surface::SmoothSurface;

/// Default merge tolerance relative to the bounding-box diagonal of the
/// union of both meshes.
pub const DEFAULT_MERGE_TOL_REL: f64 = 1e-9;

pub fn default_merge_tol<T: Real>(a: &SurfaceMesh<T>, b: &SurfaceMesh<T>) -> T {
    let mut lo = [T::infinity(); 3];
    let mut hi = [T::neg_infinity(); 3];
    for v in a.vertices().iter().chain(b.vertices()) {
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    T::lit(DEFAULT_MERGE_TOL_REL) * geom::dist(&lo, &hi)
}

fn boundary_vertex_list<T: Real>(m: &SurfaceMesh<T>) -> Vec<usize> {
    (0..m.n_vertices()).filter(|&v| m.boundary_vertex_flags()[v]).collect()
}

/// Inserts, for every boundary edge of `faces`, the candidate vertices lying
/// strictly inside it (ordered along the edge).
fn insert_hanging_nodes<T: Real>(
    faces: &mut [Vec<usize>],
    edges: &[(usize, usize, usize)],
    candidates: &[usize],
    verts: &[Point3<T>],
    tol: T,
) -> usize {
    // face -> list of (local position of edge start, inserted vertices)
    let mut inserts: BTreeMap<usize, Vec<(usize, Vec<usize>)>> = BTreeMap::new();
    let mut count = 0;
    for &(face, a, b) in edges {
        let len = geom::dist(&verts[a], &verts[b]);
        let mut hits: Vec<(T, usize)> = candidates
            .iter()
            .filter(|&&v| v != a && v != b)
            .filter_map(|&v| {
                let (d, t) = geom::point_segment(&verts[v], &verts[a], &verts[b]);
                (d <= tol && t * len > tol && (T::one() - t) * len > tol).then_some((t, v))
            })
            .collect();
        if hits.is_empty() {
            continue;
        }
        hits.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        count += hits.len();
        let local = faces[face].iter().position(|&v| v == a).unwrap();
        inserts.entry(face).or_default().push((local, hits.into_iter().map(|(_, v)| v).collect()));
    }
    for (face, mut list) in inserts {
        // insert from the back so earlier positions stay valid
        list.sort_by(|x, y| y.0.cmp(&x.0));
        for (local, vs) in list {
            let at = local + 1;
            faces[face].splice(at..at, vs);
        }
    }
    count
}

fn directed_boundary(faces: &[Vec<usize>]) -> BTreeMap<(usize, usize), usize> {
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for f in faces {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut out = BTreeMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            if count[&(a.min(b), a.max(b))] == 1 {
                out.insert((a, b), fi);
            }
        }
    }
    out
}

/// Pastes `b` onto `a`. Vertices of `a` keep their indices; unmatched
/// vertices of `b` follow in their original order. Faces of `a` come first,
/// then faces of `b`.
pub fn paste<T: Real>(a: &SurfaceMesh<T>, b: &SurfaceMesh<T>, merge_tol: T) -> Result<SurfaceMesh<T>> {
    let ba = boundary_vertex_list(a);
    let bb = boundary_vertex_list(b);
    let va = a.vertices();
    let vb = b.vertices();

    // identify coincident seam vertices
    let mut match_b: BTreeMap<usize, usize> = BTreeMap::new();
    let mut match_a: BTreeMap<usize, usize> = BTreeMap::new();
    for &j in &bb {
        let near: Vec<usize> = ba.iter().copied().filter(|&i| geom::dist(&va[i], &vb[j]) <= merge_tol).collect();
        if near.len() > 1 {
            return Err(SvemError::ToleranceAmbiguity(format!(
                "vertices {near:?} of the first mesh are all within tolerance of vertex {j} of the second"
            )));
        }
        if let Some(&i) = near.first() {
            if let Some(prev) = match_a.insert(i, j) {
                return Err(SvemError::ToleranceAmbiguity(format!(
                    "vertices {prev} and {j} of the second mesh are both within tolerance of vertex {i} of the first"
                )));
            }
            match_b.insert(j, i);
        }
    }

    let mut verts: Vec<Point3<T>> = va.to_vec();
    let mut map_b = vec![usize::MAX; vb.len()];
    for (j, p) in vb.iter().enumerate() {
        match match_b.get(&j) {
            Some(&i) => {
                verts[i] = geom::midpoint(&va[i], p);
                map_b[j] = i;
            }
            None => {
                map_b[j] = verts.len();
                verts.push(*p);
            }
        }
    }
    let na = a.n_faces();
    let mut faces: Vec<Vec<usize>> = a.faces().to_vec();
    faces.extend(b.faces().iter().map(|f| f.iter().map(|&v| map_b[v]).collect::<Vec<_>>()));

    // boundary vertices of each side in combined numbering
    let cand_from_b: Vec<usize> = bb.iter().map(|&j| map_b[j]).collect();
    let cand_from_a: Vec<usize> = ba.clone();
    let edges_a: Vec<(usize, usize, usize)> =
        a.boundary_edges().into_iter().map(|(s, e, u)| (u.face, s, e)).collect();
    let edges_b: Vec<(usize, usize, usize)> =
        b.boundary_edges().into_iter().map(|(s, e, u)| (na + u.face, map_b[s], map_b[e])).collect();
    insert_hanging_nodes(&mut faces, &edges_a, &cand_from_b, &verts, merge_tol);
    insert_hanging_nodes(&mut faces, &edges_b, &cand_from_a, &verts, merge_tol);

    // seam = edges on the boundary of both sides, traversed in opposite directions
    let bnd_a = directed_boundary(&faces[..na]);
    let bnd_b = directed_boundary(&faces[na..]);
    let mut seam: Vec<(usize, usize)> = Vec::new();
    for &(s, e) in bnd_a.keys() {
        if bnd_b.contains_key(&(e, s)) {
            seam.push((s, e));
        } else if bnd_b.contains_key(&(s, e)) {
            return Err(SvemError::SeamMismatch(format!(
                "seam edge ({s},{e}) has the same orientation in both meshes"
            )));
        }
    }
    if seam.is_empty() {
        return Err(SvemError::SeamMismatch("the meshes share no seam edge".into()));
    }
    check_seams_straight(&seam, &bnd_a, &bnd_b, &verts, merge_tol)?;

    let mesh = SurfaceMesh::new(verts, faces)
        .map_err(|e| SvemError::SeamMismatch(format!("pasted mesh is malformed: {e}")))?;
    let topo: Vec<Diagnostic<T>> = validate::<T, SmoothSurface<T>>(&mesh, None)
        .into_iter()
        .filter(|d| !matches!(d, Diagnostic::DegenerateFace { .. }))
        .collect();
    if let Some(d) = topo.first() {
        return Err(SvemError::SeamMismatch(format!("pasted mesh is not edge-manifold: {d}")));
    }
    Ok(mesh)
}

/// Splits the seam into connected chains and checks that each one is a
/// straight segment covered by both meshes.
fn check_seams_straight<T: Real>(
    seam: &[(usize, usize)],
    bnd_a: &BTreeMap<(usize, usize), usize>,
    bnd_b: &BTreeMap<(usize, usize), usize>,
    verts: &[Point3<T>],
    tol: T,
) -> Result<()> {
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(s, e) in seam {
        adj.entry(s).or_default().insert(e);
        adj.entry(e).or_default().insert(s);
    }
    let mut seen = BTreeSet::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut chain = Vec::new();
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                continue;
            }
            chain.push(v);
            stack.extend(adj[&v].iter().copied());
        }
        // farthest pair spans the chain
        let (mut p, mut q, mut best) = (chain[0], chain[0], T::zero());
        for (i, &x) in chain.iter().enumerate() {
            for &y in &chain[i + 1..] {
                let d = geom::dist(&verts[x], &verts[y]);
                if d > best {
                    (p, q, best) = (x, y, d);
                }
            }
        }
        for &v in &chain {
            if geom::point_line(&verts[v], &verts[p], &verts[q]) > tol {
                return Err(SvemError::SeamMismatch(format!(
                    "seam through vertices {p} and {q} is not straight (vertex {v} is off the line)"
                )));
            }
        }
        // a boundary edge continuing the seam line beyond its end means one
        // mesh's seam is longer than the other's
        for &end in [p, q].iter() {
            for bnd in [bnd_a, bnd_b] {
                for &(s, e) in bnd.keys() {
                    if s != end && e != end {
                        continue;
                    }
                    let other = if s == end { e } else { s };
                    if adj[&end].contains(&other) {
                        continue;
                    }
                    let on_line = geom::point_line(&verts[other], &verts[p], &verts[q]) <= tol;
                    let outward = {
                        let (_, t) = geom::point_segment(&verts[other], &verts[p], &verts[q]);
                        t < T::zero() || t > T::one()
                    };
                    if on_line && outward {
                        return Err(SvemError::SeamMismatch(format!(
                            "the seams do not cover the same segment (boundary continues past vertex {end})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cylinder_half, CylinderHalf};

    fn rect_grid(x0: f64, x1: f64, nx: usize, ny: usize) -> SurfaceMesh<f64> {
        let mut v = Vec::new();
        for j in 0..=ny {
            for i in 0..=nx {
                v.push([x0 + (x1 - x0) * i as f64 / nx as f64, j as f64 / ny as f64, 0.0]);
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut f = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                f.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        SurfaceMesh::new(v, f).unwrap()
    }

    #[test]
    fn flat_strips_make_one_pentagon() {
        let left = rect_grid(-1.0, 0.0, 1, 2);
        let right = rect_grid(0.0, 1.0, 1, 1);
        let m = paste(&left, &right, 1e-9).unwrap();
        assert_eq!(m.n_faces(), 3);
        assert_eq!(m.n_vertices(), 6 + 4 - 2);
        assert_eq!(m.face_size_histogram(), BTreeMap::from([(4, 2), (5, 1)]));
        let pent = &m.faces()[2];
        assert!(pent.iter().any(|&v| m.vertices()[v] == [0.0, 0.5, 0.0]));
        // audit: 10 distinct edges, each interior one shared by two faces
        let em = m.edge_map();
        assert_eq!(em.len(), 10);
        assert_eq!(em.values().filter(|u| u.len() == 2).count(), 3);
        assert!(em.values().all(|u| u.len() <= 2));
    }

    #[test]
    fn matching_strips_stay_conforming() {
        let m = paste(&rect_grid(-1.0, 0.0, 2, 3), &rect_grid(0.0, 1.0, 2, 3), 1e-9).unwrap();
        assert!(m.faces().iter().all(|f| f.len() == 4));
        assert_eq!(m.n_vertices(), 12 + 12 - 4);
    }

    #[test]
    fn cylinder_halves_paste() {
        for n in 1..=4 {
            let g1 = cylinder_half::<f64>(CylinderHalf::Gamma1, n).unwrap();
            let g2 = cylinder_half::<f64>(CylinderHalf::Gamma2, n).unwrap();
            let m = paste(&g1, &g2, default_merge_tol(&g1, &g2)).unwrap();
            assert_eq!(m.n_faces(), 10 * n * n);
            let h = m.face_size_histogram();
            assert_eq!(h[&4], 2 * n * (5 * n - 1));
            assert_eq!(h[&5], 2 * n);
            // merged seam vertices: N+1 on each of the two seam lines
            assert_eq!(m.n_vertices(), g1.n_vertices() + g2.n_vertices() - 2 * (n + 1));
            let bnd = m.boundary_vertex_flags().iter().filter(|&&b| b).count();
            assert_eq!(bnd, 2 * 6 * n);
        }
    }

    #[test]
    fn paste_is_symmetric_in_face_geometry() {
        let g1 = cylinder_half::<f64>(CylinderHalf::Gamma1, 2).unwrap();
        let g2 = cylinder_half::<f64>(CylinderHalf::Gamma2, 2).unwrap();
        let ab = paste(&g1, &g2, 1e-9).unwrap();
        let ba = paste(&g2, &g1, 1e-9).unwrap();
        let cycles = |m: &SurfaceMesh<f64>| {
            let mut c: Vec<Vec<[u64; 3]>> = m
                .faces()
                .iter()
                .map(|f| f.iter().map(|&v| m.vertices()[v].map(f64::to_bits)).collect())
                .collect();
            c.sort();
            c
        };
        assert_eq!(cycles(&ab), cycles(&ba));
    }

    #[test]
    fn disjoint_meshes_are_rejected() {
        let err = paste(&rect_grid(-3.0, -2.0, 1, 1), &rect_grid(0.0, 1.0, 1, 1), 1e-9).unwrap_err();
        assert!(matches!(err, SvemError::SeamMismatch(_)));
    }

    #[test]
    fn partial_seam_is_rejected() {
        // right strip is taller than the left one
        let left = rect_grid(-1.0, 0.0, 1, 1);
        let mut v = vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 2.0, 0.0], [0.0, 2.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]];
        v.truncate(6);
        let right = SurfaceMesh::new(v, vec![vec![0, 1, 5, 4], vec![4, 5, 2, 3]]).unwrap();
        let err = paste(&left, &right, 1e-9).unwrap_err();
        assert!(matches!(err, SvemError::SeamMismatch(_)), "{err}");
    }

    #[test]
    fn ambiguous_tolerance_is_rejected() {
        let left = rect_grid(-1.0, 0.0, 1, 4);
        let right = rect_grid(0.0, 1.0, 1, 1);
        let err = paste(&left, &right, 0.3).unwrap_err();
        assert!(matches!(err, SvemError::ToleranceAmbiguity(_)));
    }

    #[test]
    fn bent_seam_is_rejected() {
        // two triangles fans meeting along a polyline with a kink
        let a = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.5, 0.0], [2.0, 0.0, 0.0], [1.0, -1.0, 0.0]],
            vec![vec![0, 3, 1], vec![1, 3, 2]],
        )
        .unwrap();
        let b = SurfaceMesh::new(
            vec![[0.0, 0.0, 0.0], [1.0, 0.5, 0.0], [2.0, 0.0, 0.0], [1.0, 2.0, 0.0]],
            vec![vec![0, 1, 3], vec![1, 2, 3]],
        )
        .unwrap();
        let err = paste(&a, &b, 1e-9).unwrap_err();
        assert!(matches!(err, SvemError::SeamMismatch(_)), "{err}");
    }
}
