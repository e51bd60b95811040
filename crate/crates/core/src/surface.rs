//! Analytic smooth surfaces and the benchmark Laplace-Beltrami problems posed
//! on them.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SvemError};
use crate::geom::{self, Point3};
use crate::scalar::Real;

/// Smooth surface given through its closest-point decomposition
/// `p = a(p) + d(p) ν(a(p))`.
pub trait ImplicitSurface<T: Real> {
    /// Oriented distance, positive on the side the normal points to.
    fn signed_distance(&self, p: &Point3<T>) -> T;

    /// Unit normal at the closest point of `p`.
    fn normal(&self, p: &Point3<T>) -> Result<Point3<T>>;

    /// Closest point of `p` on the surface.
    fn closest_point(&self, p: &Point3<T>) -> Result<Point3<T>>;

    fn has_boundary(&self) -> bool;
}

/// The analytic surfaces used by the benchmarks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothSurface<T> {
    /// Sphere centered at the origin.
    Sphere { radius: T },
    /// Cylinder around the z axis, truncated to `z_min ≤ z ≤ z_max`.
    ///
    /// The signed distance is the radial one. Points projected from outside
    /// the height range are clamped onto the rim.
    Cylinder { radius: T, z_min: T, z_max: T },
    /// Plane through `point` with unit `normal`.
    Plane { point: Point3<T>, normal: Point3<T> },
}

fn degenerate<T: Real>(p: &Point3<T>) -> SvemError {
    SvemError::DegeneratePoint(format!("({}, {}, {})", p[0], p[1], p[2]))
}

impl<T: Real> SmoothSurface<T> {
    pub fn unit_sphere() -> Self {
        SmoothSurface::Sphere { radius: T::one() }
    }

    /// `x² + y² = 1`, `0 ≤ z ≤ 2`.
    pub fn benchmark_cylinder() -> Self {
        SmoothSurface::Cylinder { radius: T::one(), z_min: T::zero(), z_max: T::lit(2.0) }
    }

    /// The plane `z = 0` with normal `+e_z`.
    pub fn xy_plane() -> Self {
        SmoothSurface::Plane {
            point: [T::zero(); 3],
            normal: [T::zero(), T::zero(), T::one()],
        }
    }

    /// Direction from the projection singularity towards `p` (unnormalized),
    /// or an error at the singularity itself.
    fn radial(&self, p: &Point3<T>) -> Result<(Point3<T>, T)> {
        match *self {
            SmoothSurface::Sphere { .. } => {
                let r = geom::norm(p);
                if r <= T::min_positive_value() {
                    return Err(degenerate(p));
                }
                Ok((*p, r))
            }
            SmoothSurface::Cylinder { .. } => {
                let r = p[0].hypot(p[1]);
                if r <= T::min_positive_value() {
                    return Err(degenerate(p));
                }
                Ok(([p[0], p[1], T::zero()], r))
            }
            SmoothSurface::Plane { normal, .. } => Ok((normal, T::one())),
        }
    }
}

impl<T: Real> ImplicitSurface<T> for SmoothSurface<T> {
    fn signed_distance(&self, p: &Point3<T>) -> T {
        match *self {
            SmoothSurface::Sphere { radius } => geom::norm(p) - radius,
            SmoothSurface::Cylinder { radius, .. } => p[0].hypot(p[1]) - radius,
            SmoothSurface::Plane { point, normal } => geom::dot(&geom::sub(p, &point), &normal),
        }
    }

    fn normal(&self, p: &Point3<T>) -> Result<Point3<T>> {
        let (dir, r) = self.radial(p)?;
        Ok(geom::scale(&dir, T::one() / r))
    }

    fn closest_point(&self, p: &Point3<T>) -> Result<Point3<T>> {
        match *self {
            SmoothSurface::Sphere { radius } => {
                let (dir, r) = self.radial(p)?;
                Ok(geom::scale(&dir, radius / r))
            }
            SmoothSurface::Cylinder { radius, z_min, z_max } => {
                let (_, r) = self.radial(p)?;
                let s = radius / r;
                Ok([p[0] * s, p[1] * s, p[2].max(z_min).min(z_max)])
            }
            SmoothSurface::Plane { normal, .. } => {
                let d = self.signed_distance(p);
                Ok(geom::sub(p, &geom::scale(&normal, d)))
            }
        }
    }

    fn has_boundary(&self) -> bool {
        !matches!(self, SmoothSurface::Sphere { .. })
    }
}

/// Scalar field on points in space.
pub type ScalarField<T> = Arc<dyn Fn(&Point3<T>) -> T + Send + Sync>;

/// Named benchmark problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Benchmark {
    /// `-Δu = 6xy` on the unit sphere, zero mean, `u = xy`.
    SphereXy,
    /// `-Δu = (y - x²) eʸ` on the cylinder with Dirichlet data `u = eʸ + z`.
    CylinderExp,
}

impl Benchmark {
    pub fn slug(self) -> &'static str {
        match self {
            Benchmark::SphereXy => "sphere-xy",
            Benchmark::CylinderExp => "cylinder-exp",
        }
    }
}

impl std::str::FromStr for Benchmark {
    type Err = SvemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere-xy" | "sphere_xy" => Ok(Benchmark::SphereXy),
            "cylinder-exp" | "cylinder_exp" => Ok(Benchmark::CylinderExp),
            other => Err(SvemError::InvalidParameter(format!("unknown problem `{other}`"))),
        }
    }
}

/// A Laplace-Beltrami problem `-Δ_Γ u = f` with either a zero-mean side
/// condition (closed surfaces) or Dirichlet data on `∂Γ`.
#[derive(Clone)]
pub struct BenchmarkProblem<T> {
    pub surface: SmoothSurface<T>,
    pub exact_u: ScalarField<T>,
    pub load_f: ScalarField<T>,
    pub boundary_data: Option<ScalarField<T>>,
    pub zero_mean_constrained: bool,
}

impl<T> fmt::Debug for BenchmarkProblem<T>
where
    T: fmt::Debug,
{
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("surface", &self.surface)
            .field("has_boundary_data", &self.boundary_data.is_some())
            .field("zero_mean_constrained", &self.zero_mean_constrained)
            .finish()
    }
}

impl<T: Real> BenchmarkProblem<T> {
    pub fn exact_u(&self, p: &Point3<T>) -> T {
        (self.exact_u)(p)
    }

    pub fn load_f(&self, p: &Point3<T>) -> T {
        (self.load_f)(p)
    }

    /// Dirichlet problem on a surface with boundary; `u` supplies the
    /// boundary values and doubles as the exact solution.
    pub fn dirichlet(surface: SmoothSurface<T>, u: ScalarField<T>, f: ScalarField<T>) -> Self {
        Self {
            surface,
            exact_u: u.clone(),
            load_f: f,
            boundary_data: Some(u),
            zero_mean_constrained: false,
        }
    }
}

/// Builds one of the named benchmark problems.
pub fn benchmark<T: Real>(name: Benchmark) -> BenchmarkProblem<T> {
    match name {
        Benchmark::SphereXy => BenchmarkProblem {
            surface: SmoothSurface::unit_sphere(),
            exact_u: Arc::new(|p: &Point3<T>| p[0] * p[1]),
            load_f: Arc::new(|p: &Point3<T>| T::lit(6.0) * p[0] * p[1]),
            boundary_data: None,
            zero_mean_constrained: true,
        },
        Benchmark::CylinderExp => {
            let u: ScalarField<T> = Arc::new(|p: &Point3<T>| p[1].exp() + p[2]);
            BenchmarkProblem::dirichlet(
                SmoothSurface::benchmark_cylinder(),
                u,
                Arc::new(|p: &Point3<T>| (p[1] - p[0] * p[0]) * p[1].exp()),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Point3<f64>, b: &Point3<f64>, tol: f64) -> bool {
        geom::dist(a, b) <= tol
    }

    #[test]
    fn closest_point_examples() {
        let s = SmoothSurface::<f64>::unit_sphere();
        let p = [2.0, 0.0, 0.0];
        assert!(close(&s.closest_point(&p).unwrap(), &[1.0, 0.0, 0.0], 0.0));
        assert_eq!(s.signed_distance(&p), 1.0);
        let q = [0.6, 0.8, 0.0];
        assert!(close(&s.closest_point(&q).unwrap(), &q, 1e-15));

        let c = SmoothSurface::<f64>::benchmark_cylinder();
        assert!(close(&c.closest_point(&[2.0, 0.0, 1.0]).unwrap(), &[1.0, 0.0, 1.0], 0.0));
    }

    #[test]
    fn singular_points_are_rejected() {
        let s = SmoothSurface::<f64>::unit_sphere();
        assert!(matches!(s.closest_point(&[0.0; 3]), Err(SvemError::DegeneratePoint(_))));
        let c = SmoothSurface::<f64>::benchmark_cylinder();
        assert!(matches!(c.closest_point(&[0.0, 0.0, 1.3]), Err(SvemError::DegeneratePoint(_))));
        assert!(c.normal(&[0.0, 0.0, 0.2]).is_err());
    }

    #[test]
    fn benchmark_values() {
        let s = benchmark::<f64>(Benchmark::SphereXy);
        assert_eq!(s.load_f(&[1.0, 1.0, 0.0]), 6.0);
        assert_eq!(s.exact_u(&[1.0, 0.0, 0.0]), 0.0);
        assert!(s.zero_mean_constrained && s.boundary_data.is_none());

        let c = benchmark::<f64>(Benchmark::CylinderExp);
        assert_eq!(c.exact_u(&[1.0, 0.0, 2.0]), 3.0);
        assert!((c.load_f(&[0.0, 1.0, 0.0]) - std::f64::consts::E).abs() < 1e-15);
        assert!(!c.zero_mean_constrained && c.boundary_data.is_some());
        assert!(c.surface.has_boundary() && !s.surface.has_boundary());
    }

    #[test]
    fn plane_projection() {
        let p = SmoothSurface::<f64>::xy_plane();
        assert_eq!(p.signed_distance(&[0.3, 0.2, -0.5]), -0.5);
        assert_eq!(p.closest_point(&[0.3, 0.2, -0.5]).unwrap(), [0.3, 0.2, 0.0]);
    }

    #[test]
    fn problem_names_parse() {
        assert_eq!("sphere-xy".parse::<Benchmark>().unwrap(), Benchmark::SphereXy);
        assert_eq!("cylinder-exp".parse::<Benchmark>().unwrap(), Benchmark::CylinderExp);
        assert!("custom".parse::<Benchmark>().is_err());
    }
}
