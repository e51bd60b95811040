//! Fixtures and independent reference computations shared by the
//! integration tests. Nothing here calls into the element code under test.

#![allow(dead_code)]

use std::f64::consts::PI;

use svem::{Mesh, SurfaceMesh};

pub type P3 = [f64; 3];
pub type P2 = [f64; 2];

pub fn sub(a: &P3, b: &P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn dot(a: &P3, b: &P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &P3, b: &P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub fn norm(a: &P3) -> f64 {
    dot(a, a).sqrt()
}

/// Rotation about `axis` by `angle` (Rodrigues).
pub fn rotation(axis: P3, angle: f64) -> [[f64; 3]; 3] {
    let n = norm(&axis);
    let [x, y, z] = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

pub fn apply(r: &[[f64; 3]; 3], p: &P3) -> P3 {
    [dot(&r[0], p), dot(&r[1], p), dot(&r[2], p)]
}

/// `s R p + t` for each point.
pub fn place(pts: &[P3], r: &[[f64; 3]; 3], s: f64, t: P3) -> Vec<P3> {
    pts.iter()
        .map(|p| {
            let q = apply(r, p);
            [s * q[0] + t[0], s * q[1] + t[1], s * q[2] + t[2]]
        })
        .collect()
}

pub fn regular_polygon(n: usize, radius: f64, phase: f64) -> Vec<P2> {
    (0..n)
        .map(|k| {
            let t = phase + 2.0 * PI * k as f64 / n as f64;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect()
}

pub fn flat(pts: &[P2]) -> Vec<P3> {
    pts.iter().map(|p| [p[0], p[1], 0.0]).collect()
}

/// Polygon fixtures: triangle, square, regular 6..12-gons, a pentagon with a
/// straight angle (hanging node) and a non-convex star-shaped hexagon.
pub fn polygon_fixtures() -> Vec<(String, Vec<P2>)> {
    let mut out = vec![
        ("triangle".to_string(), vec![[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]]),
        ("square".to_string(), vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]),
    ];
    for n in 6..=12 {
        out.push((format!("{n}-gon"), regular_polygon(n, 0.7, 0.1 * n as f64)));
    }
    out.push(("degenerate pentagon".to_string(), vec![[0.0, 0.0], [1.0, 0.0], [1.0, 0.5], [1.0, 1.0], [0.0, 1.0]]));
    out.push((
        "dented hexagon".to_string(),
        vec![[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [1.0, 0.6], [0.0, 1.0], [-0.4, 0.5]],
    ));
    out
}

/// Linear FEM stiffness and mass of a 3d triangle from barycentric gradients.
pub fn p1_triangle(t: [P3; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let n = cross(&sub(&t[1], &t[0]), &sub(&t[2], &t[0]));
    let area2 = norm(&n);
    let area = 0.5 * area2;
    let nu = [n[0] / area2, n[1] / area2, n[2] / area2];
    // ∇λ_i = ν × (x_{i+2} - x_{i+1}) / 2|T|
    let grads: Vec<P3> = (0..3)
        .map(|i| {
            let e = sub(&t[(i + 2) % 3], &t[(i + 1) % 3]);
            let g = cross(&nu, &e);
            [g[0] / area2, g[1] / area2, g[2] / area2]
        })
        .collect();
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * dot(&grads[i], &grads[j]);
            m[i][j] = area / 12.0 * if i == j { 2.0 } else { 1.0 };
        }
    }
    (k, m)
}

/// `∫_E p q` for affine `p, q` given as `[a, b, c]` meaning `a + b x + c y`.
/// The polygon is fanned from its vertex mean with signed areas (exact for
/// any simple polygon), and each fan triangle is refined `k × k` times and
/// integrated with the edge-midpoint rule.
pub fn integrate_affine_product(pts: &[P2], p: [f64; 3], q: [f64; 3], k: usize) -> f64 {
    let n = pts.len() as f64;
    let c = [pts.iter().map(|v| v[0]).sum::<f64>() / n, pts.iter().map(|v| v[1]).sum::<f64>() / n];
    let f = |x: &P2| (p[0] + p[1] * x[0] + p[2] * x[1]) * (q[0] + q[1] * x[0] + q[2] * x[1]);
    let mut total = 0.0;
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        let tri = [c, a, b];
        let lerp = |s: f64, t: f64| {
            [
                tri[0][0] + s * (tri[1][0] - tri[0][0]) + t * (tri[2][0] - tri[0][0]),
                tri[0][1] + s * (tri[1][1] - tri[0][1]) + t * (tri[2][1] - tri[0][1]),
            ]
        };
        let area = 0.5 * ((a[0] - c[0]) * (b[1] - c[1]) - (a[1] - c[1]) * (b[0] - c[0]));
        let h = 1.0 / k as f64;
        for u in 0..k {
            for v in 0..(k - u) {
                let (s, t) = (u as f64 * h, v as f64 * h);
                for corners in [[(s, t), (s + h, t), (s, t + h)], [(s + h, t), (s + h, t + h), (s, t + h)]] {
                    if corners[1].0 + corners[1].1 > 1.0 + 1e-12 {
                        continue;
                    }
                    let mids = [
                        lerp(0.5 * (corners[0].0 + corners[1].0), 0.5 * (corners[0].1 + corners[1].1)),
                        lerp(0.5 * (corners[1].0 + corners[2].0), 0.5 * (corners[1].1 + corners[2].1)),
                        lerp(0.5 * (corners[2].0 + corners[0].0), 0.5 * (corners[2].1 + corners[0].1)),
                    ];
                    total += area * h * h / 3.0 * (f(&mids[0]) + f(&mids[1]) + f(&mids[2]));
                }
            }
        }
    }
    total
}

/// Structured quad grid on `[x0, x1] × [y0, y1]`, counterclockwise faces.
pub fn grid(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Mesh {
    let idx = |i: usize, j: usize| j * (nx + 1) + i;
    let mut v = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            v.push([x0 + (x1 - x0) * i as f64 / nx as f64, y0 + (y1 - y0) * j as f64 / ny as f64, 0.0]);
        }
    }
    let mut f = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            f.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    SurfaceMesh::new(v, f).unwrap()
}

/// Unit square meshed with triangles, quads, a pentagon and a hexagon on the
/// left half, a finer quad grid on the right half, pasted along `x = 1/2`
/// with hanging nodes on both sides of the seam.
pub fn mixed_patch() -> Mesh {
    // left half: 3 × 4 grid on [0, 0.5] × [0, 1], then rework some cells
    let g = grid(0.0, 0.5, 3, 0.0, 1.0, 4);
    let mut faces: Vec<Vec<usize>> = Vec::new();
    let idx = |i: usize, j: usize| j * 4 + i;
    for j in 0..4 {
        for i in 0..3 {
            let q = vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
            match (i, j) {
                // two triangles
                (0, 0) => {
                    faces.push(vec![q[0], q[1], q[2]]);
                    faces.push(vec![q[0], q[2], q[3]]);
                }
                // cells (1,1) and (2,1) merge into a hexagon
                (1, 1) => faces.push(vec![idx(1, 1), idx(2, 1), idx(3, 1), idx(3, 2), idx(2, 2), idx(1, 2)]),
                (2, 1) => {}
                _ => faces.push(q),
            }
        }
    }
    let mut left = SurfaceMesh::new(g.vertices().to_vec(), faces).unwrap();
    // split the edge between the two top-left cells: both become pentagons
    let mut v = left.vertices().to_vec();
    let extra = v.len();
    v.push([0.5 / 6.0, 0.75, 0.0]);
    let mut f = left.faces().to_vec();
    for face in &mut f {
        if face == &vec![idx(0, 3), idx(1, 3), idx(1, 4), idx(0, 4)] {
            *face = vec![idx(0, 3), extra, idx(1, 3), idx(1, 4), idx(0, 4)];
        } else if face == &vec![idx(0, 2), idx(1, 2), idx(1, 3), idx(0, 3)] {
            *face = vec![idx(0, 2), idx(1, 2), idx(1, 3), extra, idx(0, 3)];
        }
    }
    left = SurfaceMesh::new(v, f).unwrap();
    let right = grid(0.5, 1.0, 2, 0.0, 1.0, 6);
    svem::pasting::paste(&left, &right, 1e-9).unwrap()
}

/// Quasi-random points from the R2 additive recurrence, mapped to `[0,1)²`.
pub fn r2_sequence(n: usize) -> Vec<P2> {
    let g = 1.324_717_957_244_746_f64;
    let (a1, a2) = (1.0 / g, 1.0 / (g * g));
    (1..=n).map(|k| [(0.5 + a1 * k as f64).fract(), (0.5 + a2 * k as f64).fract()]).collect()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
