mod common;

use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use svem::analysis::{eoc, log_log_slope};
use svem::io::off::{read_off, write_off};
use svem::sparse::SparseMatrix;
use svem::vem::LocalVem;
use svem::{ElementFrame, Mesh};

/// Star-shaped polygon: sorted angles with a minimum gap, radii in [0.5, 1].
fn star_polygon() -> impl Strategy<Value = Vec<P2>> {
    (3usize..=12).prop_flat_map(|n| {
        (prop::collection::vec(0.2f64..1.0, n), prop::collection::vec(0.5f64..1.0, n), 0.0f64..6.3).prop_map(move |(gaps, radii, phase)| {
            let total: f64 = gaps.iter().sum();
            let mut t = phase;
            gaps.iter()
                .zip(&radii)
                .map(|(g, r)| {
                    let p = [r * t.cos(), r * t.sin()];
                    t += g / total * std::f64::consts::TAU;
                    p
                })
                .collect()
        })
    })
}

fn placement() -> impl Strategy<Value = ([[f64; 3]; 3], f64, P3)> {
    ((-1.0f64..1.0, -1.0f64..1.0, 0.1f64..1.0), 0.0f64..6.3, -6.0f64..1.5, prop::array::uniform3(-10.0f64..10.0))
        .prop_map(|((x, y, z), angle, log_s, t)| (rotation([x, y, z], angle), 10f64.powf(log_s), t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn projector_reproduces_affine_functions(poly in star_polygon(), (r, s, t) in placement(), g in prop::array::uniform3(-3.0f64..3.0)) {
        let pts = place(&flat(&poly), &r, s, t);
        let fr = ElementFrame::from_points(&pts, 0).unwrap();
        let loc = LocalVem::new(&fr).unwrap();
        let vals: Vec<f64> = fr.coords2d.iter().map(|p| g[0] + g[1] * p[0] + g[2] * p[1]).collect();
        let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for (a, b) in loc.proj_dofs.matvec(&vals).iter().zip(&vals) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
        // the projector is idempotent
        let pp = loc.proj_dofs.matmul(&loc.proj_dofs);
        prop_assert!(pp.sub(&loc.proj_dofs).max_abs() <= 1e-10 * loc.proj_dofs.max_abs());
    }

    #[test]
    fn local_matrices_are_symmetric_with_the_right_kernel(poly in star_polygon(), (r, s, t) in placement(), v in prop::collection::vec(-1.0f64..1.0, 12)) {
        let pts = place(&flat(&poly), &r, s, t);
        let fr = ElementFrame::from_points(&pts, 0).unwrap();
        let loc = LocalVem::new(&fr).unwrap();
        let k = &loc.stiffness;
        let m = &loc.mass;
        prop_assert!(k.asymmetry() <= 1e-13 * k.max_abs());
        prop_assert!(m.asymmetry() <= 1e-13 * m.max_abs());
        for rs in k.row_sums() {
            prop_assert!(rs.abs() <= 1e-11 * k.max_abs());
        }
        // total mass of the constant function is the area
        let total: f64 = m.row_sums().iter().sum();
        prop_assert!((total - fr.area).abs() <= 1e-11 * fr.area);
        let x = &v[..fr.coords2d.len()];
        let xkx: f64 = k.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum();
        let xmx: f64 = m.matvec(x).iter().zip(x).map(|(a, b)| a * b).sum();
        prop_assert!(xkx >= -1e-12 * k.max_abs());
        prop_assert!(xmx > 0.0);
    }

    #[test]
    fn stiffness_is_placement_invariant_and_mass_scales(poly in star_polygon(), (r, s, t) in placement()) {
        let base = ElementFrame::from_points(&flat(&poly), 0).unwrap();
        let moved = ElementFrame::from_points(&place(&flat(&poly), &r, s, t), 0).unwrap();
        let (a, b) = (LocalVem::new(&base).unwrap(), LocalVem::new(&moved).unwrap());
        // rounding the placed coordinates alone costs about eps |t| / s relative
        let tol = 1e-11 * (1.0 + t.iter().fold(0.0f64, |m, x| m.max(x.abs())) / s);
        prop_assert!(b.stiffness.sub(&a.stiffness).max_abs() <= tol * a.stiffness.max_abs());
        prop_assert!(b.mass.scaled(1.0 / (s * s)).sub(&a.mass).max_abs() <= tol * a.mass.max_abs());
    }

    #[test]
    fn cyclic_relabelling_permutes_the_stiffness(poly in star_polygon(), shift in 0usize..12) {
        let n = poly.len();
        let shift = shift % n;
        let rolled: Vec<P2> = (0..n).map(|i| poly[(i + shift) % n]).collect();
        let a = LocalVem::new(&ElementFrame::from_points(&flat(&poly), 0).unwrap()).unwrap();
        let b = LocalVem::new(&ElementFrame::from_points(&flat(&rolled), 0).unwrap()).unwrap();
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (b.stiffness[(i, j)], a.stiffness[((i + shift) % n, (j + shift) % n)]);
                prop_assert!((x - y).abs() <= 1e-11 * a.stiffness.max_abs());
            }
        }
    }

    #[test]
    fn eoc_recovers_power_laws(c in 0.01f64..100.0, p in 0.5f64..4.0, h0 in 0.05f64..1.0, ratio in 1.2f64..3.0) {
        let h: Vec<f64> = (0..5).map(|k| h0 / ratio.powi(k)).collect();
        let e: Vec<f64> = h.iter().map(|x| c * x.powf(p)).collect();
        prop_assert!((eoc(h[0], e[0], h[1], e[1]) - p).abs() <= 1e-12 * p.max(1.0) * 10.0);
        prop_assert!((log_log_slope(&h, &e) - p).abs() <= 1e-10);
    }

    #[test]
    fn triplet_order_does_not_change_the_matrix(entries in prop::collection::vec((0usize..6, 0usize..6, -1.0f64..1.0), 1..40), seed in any::<u64>()) {
        let a = SparseMatrix::from_triplets(6, 6, entries.clone());
        let mut shuffled = entries.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = SparseMatrix::from_triplets(6, 6, shuffled);
        for i in 0..6 {
            for j in 0..6 {
                let want: f64 = entries.iter().filter(|e| e.0 == i && e.1 == j).map(|e| e.2).sum();
                prop_assert!((a.get(i, j) - want).abs() <= 1e-14);
                prop_assert!((b.get(i, j) - want).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn off_round_trip_is_exact(coords in prop::collection::vec(prop::array::uniform3(-1e3f64..1e3), 4..20)) {
        let n = coords.len();
        let faces: Vec<Vec<usize>> = (0..n - 2).map(|k| vec![0, k + 1, k + 2]).collect();
        let m = Mesh::new(coords, faces).unwrap();
        let mut buf = Vec::new();
        write_off(&m, &mut buf).unwrap();
        let back: Mesh = read_off(&buf[..]).unwrap();
        prop_assert_eq!(back, m);
    }
}
