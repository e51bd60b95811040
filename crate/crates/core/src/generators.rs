//! Benchmark mesh families: hybrid triangle/hexagon spheres and structured
//! half-cylinders.

use std::collections::{BTreeMap, HashMap};

use crate::error::{Result, SvemError};
use crate::geom::{self, Point3};
use crate::mesh::SurfaceMesh;
use crate::scalar::Real;

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

fn icosahedron<T: Real>() -> (Vec<Point3<T>>, Vec<[usize; 3]>) {
    let phi = (T::one() + T::lit(5.0).sqrt()) * T::lit(0.5);
    let (o, z) = (T::one(), T::zero());
    let raw = [
        [-o, phi, z],
        [o, phi, z],
        [-o, -phi, z],
        [o, -phi, z],
        [z, -o, phi],
        [z, o, phi],
        [z, -o, -phi],
        [z, o, -phi],
        [phi, z, -o],
        [phi, z, o],
        [-phi, z, -o],
        [-phi, z, o],
    ];
    let verts: Vec<Point3<T>> = raw.iter().map(|p| geom::normalize(p).unwrap()).collect();
    let faces = ICOSAHEDRON_FACES
        .iter()
        .map(|&[a, b, c]| {
            let n = geom::cross(&geom::sub(&verts[b], &verts[a]), &geom::sub(&verts[c], &verts[a]));
            if geom::dot(&n, &verts[a]) < T::zero() {
                [a, c, b]
            } else {
                [a, b, c]
            }
        })
        .collect();
    (verts, faces)
}

/// Triangle of the subdivided icosahedron together with the integer
/// barycentric coordinates of its corners inside its icosahedral macro face.
#[derive(Clone, Copy)]
struct LatticeTriangle {
    v: [usize; 3],
    macro_face: usize,
    lattice: [[i64; 3]; 3],
}

/// Triangle/hexagon mesh of the unit sphere.
///
/// The icosahedron is refined `level` times by 1-to-4 splitting with edge
/// midpoints projected onto the sphere. Afterwards, every vertex strictly
/// inside a macro face whose lattice coordinates `(a, b, c)` are all even
/// has its six-triangle fan merged into one hexagon and is removed. Such
/// vertices are two lattice steps apart, so the fans are disjoint; faces
/// touching macro edges and the triangles between fans stay triangles.
/// Levels 1 and 2 have no interior even vertex and are triangle-only.
pub fn sphere_hybrid<T: Real>(level: u32) -> SurfaceMesh<T> {
    let (mut verts, ico) = icosahedron::<T>();
    let mut tris: Vec<LatticeTriangle> = ico
        .iter()
        .enumerate()
        .map(|(f, &v)| LatticeTriangle { v, macro_face: f, lattice: [[1, 0, 0], [0, 1, 0], [0, 0, 1]] })
        .collect();

    for _ in 0..level {
        let mut cache: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            let mut mid = |a: usize, b: usize| -> usize {
                let key = (a.min(b), a.max(b));
                *cache.entry(key).or_insert_with(|| {
                    let m = geom::midpoint(&verts[a], &verts[b]);
                    verts.push(geom::normalize(&m).unwrap());
                    verts.len() - 1
                })
            };
            let [v0, v1, v2] = t.v;
            let (m01, m12, m20) = (mid(v0, v1), mid(v1, v2), mid(v2, v0));
            let l = t.lattice;
            let dbl = |x: [i64; 3]| [2 * x[0], 2 * x[1], 2 * x[2]];
            let sum = |x: [i64; 3], y: [i64; 3]| [x[0] + y[0], x[1] + y[1], x[2] + y[2]];
            let (l0, l1, l2) = (dbl(l[0]), dbl(l[1]), dbl(l[2]));
            let (l01, l12, l20) = (sum(l[0], l[1]), sum(l[1], l[2]), sum(l[2], l[0]));
            let mf = t.macro_face;
            next.push(LatticeTriangle { v: [v0, m01, m20], macro_face: mf, lattice: [l0, l01, l20] });
            next.push(LatticeTriangle { v: [m01, v1, m12], macro_face: mf, lattice: [l01, l1, l12] });
            next.push(LatticeTriangle { v: [m20, m12, v2], macro_face: mf, lattice: [l20, l12, l2] });
            next.push(LatticeTriangle { v: [m01, m12, m20], macro_face: mf, lattice: [l01, l12, l20] });
        }
        tris = next;
    }

    // Centers of the hexagons to build.
    let mut center = vec![false; verts.len()];
    for t in &tris {
        for k in 0..3 {
            let [a, b, c] = t.lattice[k];
            if a >= 1 && b >= 1 && c >= 1 && a % 2 == 0 && b % 2 == 0 {
                center[t.v[k]] = true;
            }
        }
    }

    // ring successor maps: center -> (p -> q) for fan triangles (center, p, q)
    let mut rings: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for t in &tris {
        for k in 0..3 {
            if center[t.v[k]] {
                rings.entry(t.v[k]).or_default().insert(t.v[(k + 1) % 3], t.v[(k + 2) % 3]);
            }
        }
    }

    let mut new_index = vec![usize::MAX; verts.len()];
    let mut kept = Vec::with_capacity(verts.len());
    for (i, v) in verts.iter().enumerate() {
        if !center[i] {
            new_index[i] = kept.len();
            kept.push(*v);
        }
    }

    let mut faces = Vec::with_capacity(tris.len());
    let mut emitted = vec![false; verts.len()];
    for t in &tris {
        match t.v.iter().find(|&&v| center[v]) {
            Some(&c) => {
                if emitted[c] {
                    continue;
                }
                emitted[c] = true;
                let ring = &rings[&c];
                debug_assert_eq!(ring.len(), 6);
                let start = *ring.keys().next().unwrap();
                let mut hex = Vec::with_capacity(6);
                let mut cur = start;
                loop {
                    hex.push(new_index[cur]);
                    cur = ring[&cur];
                    if cur == start {
                        break;
                    }
                }
                faces.push(hex);
            }
            None => faces.push(t.v.iter().map(|&v| new_index[v]).collect()),
        }
    }
    SurfaceMesh::new(kept, faces).expect("generated sphere mesh is well formed")
}

/// Which half of the benchmark cylinder to mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CylinderHalf {
    /// `y ≥ 0`, `8N²` rectangles on a `(4N+1)×(2N+1)` grid.
    Gamma1,
    /// `y ≤ 0`, `2N²` rectangles on a `(2N+1)×(N+1)` grid.
    Gamma2,
}

/// Structured rectangle mesh of one half of the cylinder
/// `x² + y² = 1, 0 ≤ z ≤ 2`.
pub fn cylinder_half<T: Real>(which: CylinderHalf, n: usize) -> Result<SurfaceMesh<T>> {
    if n < 1 {
        return Err(SvemError::InvalidParameter("cylinder resolution N must be at least 1".into()));
    }
    let nf = T::from_count(n);
    let pi = T::PI();
    let (ni, nj) = match which {
        CylinderHalf::Gamma1 => (4 * n, 2 * n),
        CylinderHalf::Gamma2 => (2 * n, n),
    };
    let mut verts = Vec::with_capacity((ni + 1) * (nj + 1));
    for j in 0..=nj {
        for i in 0..=ni {
            let (i, j) = (T::from_count(i), T::from_count(j));
            let (angle, z) = match which {
                CylinderHalf::Gamma1 => (i / (T::lit(4.0) * nf) * pi, j / nf),
                CylinderHalf::Gamma2 => ((i / (T::lit(2.0) * nf) + T::one()) * pi, T::lit(2.0) * j / nf),
            };
            verts.push([angle.cos(), angle.sin(), z]);
        }
    }
    let idx = |i: usize, j: usize| j * (ni + 1) + i;
    let mut faces = Vec::with_capacity(ni * nj);
    for j in 0..nj {
        for i in 0..ni {
            faces.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    SurfaceMesh::new(verts, faces)
}

/// Nominal mesh size `2 sin(π / 8N)` of the pasted cylinder family (the chord
/// subtended by one angular step of the finer half).
pub fn cylinder_nominal_h<T: Real>(n: usize) -> T {
    T::lit(2.0) * (T::PI() / (T::lit(8.0) * T::from_count(n))).sin()
}
