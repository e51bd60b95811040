//! Fixed-size vector helpers for points in the plane and in space.

use crate::scalar::Real;

pub type Point3<T> = [T; 3];
pub type Point2<T> = [T; 2];

#[inline]
pub fn sub<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn add<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn scale<T: Real>(a: &Point3<T>, s: T) -> Point3<T> {
    [a[0] * s, a[1] * s, a[2] * s]
}

#[inline]
pub fn dot<T: Real>(a: &Point3<T>, b: &Point3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm<T: Real>(a: &Point3<T>) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist<T: Real>(a: &Point3<T>, b: &Point3<T>) -> T {
    norm(&sub(a, b))
}

#[inline]
pub fn midpoint<T: Real>(a: &Point3<T>, b: &Point3<T>) -> Point3<T> {
    let half = T::lit(0.5);
    [(a[0] + b[0]) * half, (a[1] + b[1]) * half, (a[2] + b[2]) * half]
}

/// Returns `None` for the zero vector.
#[inline]
pub fn normalize<T: Real>(a: &Point3<T>) -> Option<Point3<T>> {
    let n = norm(a);
    if n > T::zero() {
        Some(scale(a, T::one() / n))
    } else {
        None
    }
}

#[inline]
pub fn cross2<T: Real>(a: &Point2<T>, b: &Point2<T>) -> T {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dist2<T: Real>(a: &Point2<T>, b: &Point2<T>) -> T {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Distance from `p` to the segment `[a, b]` together with the parameter of
/// the orthogonal projection onto the supporting line (0 at `a`, 1 at `b`).
pub fn point_segment<T: Real>(p: &Point3<T>, a: &Point3<T>, b: &Point3<T>) -> (T, T) {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    if len2 == T::zero() {
        return (dist(p, a), T::zero());
    }
    let t = dot(&sub(p, a), &ab) / len2;
    let tc = t.max(T::zero()).min(T::one());
    let q = add(a, &scale(&ab, tc));
    (dist(p, &q), t)
}

/// Distance from `p` to the infinite line through `a` and `b`.
pub fn point_line<T: Real>(p: &Point3<T>, a: &Point3<T>, b: &Point3<T>) -> T {
    let ab = sub(b, a);
    let l = norm(&ab);
    if l == T::zero() {
        return dist(p, a);
    }
    norm(&cross(&sub(p, a), &ab)) / l
}

/// Eigen-decomposition of a symmetric 3x3 matrix by cyclic Jacobi sweeps.
///
/// Eigenvalues are returned in ascending order; eigenvector `k` is column `k`
/// of the returned matrix (`vecs[row][k]`).
pub fn symmetric_eigen3<T: Real>(m: [[T; 3]; 3]) -> ([T; 3], [[T; 3]; 3]) {
    let mut a = m;
    let mut v = [[T::zero(); 3]; 3];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }
    for _sweep in 0..64 {
        let off = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
        let diag = a[0][0].powi(2) + a[1][1].powi(2) + a[2][2].powi(2);
        if off <= T::epsilon() * T::epsilon() * diag || off == T::zero() {
            break;
        }
        for (p, q) in [(0usize, 1usize), (0, 2), (1, 2)] {
            if a[p][q] == T::zero() {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * a[p][q]);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            for k in 0..3 {
                let akp = a[k][p];
                let akq = a[k][q];
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let apk = a[p][k];
                let aqk = a[q][k];
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let vkp = row[p];
                let vkq = row[q];
                row[p] = c * vkp - s * vkq;
                row[q] = s * vkp + c * vkq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = [a[order[0]][order[0]], a[order[1]][order[1]], a[order[2]][order[2]]];
    let mut vecs = [[T::zero(); 3]; 3];
    for r in 0..3 {
        for (k, &o) in order.iter().enumerate() {
            vecs[r][k] = v[r][o];
        }
    }
    (vals, vecs)
}
