mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use circle_pattern::curvature::{face_cone_angle, gauss_bonnet_report, jacobian, total_curvatures};
use circle_pattern::graph::{generate_torus_grid, parse_pattern, validate};
use circle_pattern::{CurvatureVector, FaceIndex};
use common::*;
use rand::Rng;

const T_SYM: f64 = 5.404_086_870_848_32;
const ALPHA_SYM: f64 = 7.642_532_944_996_074;
const AREA_SYM: f64 = 12.234_128_740_348_39;

#[test]
fn symmetric_torus_values() {
    let g = generate_torus_grid(3, FRAC_PI_2).unwrap();
    let k = CurvatureVector::uniform(&g, 1.0).unwrap();
    let c = 0.5f64.sqrt();
    // closed form 8c·arccot(c), evaluated independently
    assert!((8.0 * c * (1.0f64).atan2(c) - T_SYM).abs() < 1e-14);
    for t in total_curvatures(&g, &k) {
        assert!((t - T_SYM).abs() < 1e-13);
    }
    let alpha = face_cone_angle(&g, &k, FaceIndex(0)).unwrap();
    assert!((alpha - ALPHA_SYM).abs() < 1e-13);
    assert!((alpha * (PI / 4.0).cos() - T_SYM).abs() < 1e-13);
    let report = gauss_bonnet_report(&g, &k).unwrap();
    assert!((report.global.surface_area - AREA_SYM).abs() < 1e-12);
    assert!((report.global.surface_area_from_angles - (9.0 * ALPHA_SYM - 18.0 * PI)).abs() < 1e-12);
    // cross-check the bigon part with the integration oracle
    let lens = lens_area_integrated(1.0, 1.0, FRAC_PI_2);
    let from_disks: f64 = report.faces.iter().map(|f| f.area).sum::<f64>() - 18.0 * lens;
    assert!((from_disks - AREA_SYM).abs() < 1e-8);

    let j = jacobian(&g, &k).unwrap();
    for f in g.face_indices() {
        for &(col, v) in j.row(f) {
            if col != f {
                assert!((v + 2.0 / 3.0).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn double_edges_accumulate_in_the_jacobian() {
    // two faces sharing two edges on a sphere-like pattern
    let text = r#"{
      "vertices": ["a", "b"],
      "edges": [
        {"id": "e1", "v": ["a", "b"], "theta": 1.5707963267948966, "faces": ["f", "g"]},
        {"id": "e2", "v": ["a", "b"], "theta": 1.5707963267948966, "faces": ["g", "f"]}
      ],
      "faces": [{"id": "f", "edges": ["e1", "e2"]}, {"id": "g", "edges": ["e1", "e2"]}]
    }"#;
    let g = parse_pattern(text).unwrap();
    assert_eq!(g.euler_characteristic(), Some(2));
    let k = CurvatureVector::uniform(&g, 1.0).unwrap();
    let j = jacobian(&g, &k).unwrap();
    assert!((j.get(FaceIndex(0), FaceIndex(1)) + 4.0 / 3.0).abs() < 1e-14);
    let report = gauss_bonnet_report(&g, &k).unwrap();
    assert!(report.global.gauss_bonnet_residual.unwrap() < 1e-12);
}

#[test]
fn self_adjacent_face_cone_angle() {
    let text = r#"{
      "edges": [{"id": "e", "theta": 1.5707963267948966, "faces": ["f", "f"]}],
      "faces": [{"id": "f", "edges": ["e", "e"]}]
    }"#;
    let g = parse_pattern(text).unwrap();
    let k = CurvatureVector::uniform(&g, 1.0).unwrap();
    let alpha = face_cone_angle(&g, &k, FaceIndex(0)).unwrap();
    assert!((alpha - 2.0 * central_angle_3d(1.0, 1.0, FRAC_PI_2)).abs() < 1e-12);
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut rng = rng(21);
    for _ in 0..30 {
        let g = random_torus(&mut rng, 3, 0.2);
        let kv: Vec<f64> = (0..9).map(|_| log_uniform(&mut rng, 0.1, 10.0)).collect();
        let k = CurvatureVector::new(&g, kv.clone()).unwrap();
        let j = jacobian(&g, &k).unwrap();
        for col in 0..9 {
            let totals_at = |x: f64| {
                let mut v = kv.clone();
                v[col] = x;
                total_curvatures(&g, &CurvatureVector::new(&g, v).unwrap())
            };
            for row in 0..9 {
                let fd = fd_log_derivative(&|x| totals_at(x)[row], kv[col], 1e-3);
                let an = j.get(FaceIndex(row), FaceIndex(col));
                if an == 0.0 {
                    assert!(fd.abs() < 1e-12);
                } else {
                    assert!(rel_err(an, fd) < 1e-6, "({row},{col}) {an} vs {fd}");
                }
            }
        }
    }
}

#[test]
fn row_sums_positive_and_signs() {
    let mut rng = rng(22);
    for _ in 0..1000 {
        let n = rng.gen_range(3..=5);
        let g = random_torus(&mut rng, n, 0.01);
        let kv: Vec<f64> = (0..n * n).map(|_| log_uniform(&mut rng, 1e-3, 1e3)).collect();
        let k = CurvatureVector::new(&g, kv).unwrap();
        let j = jacobian(&g, &k).unwrap();
        for f in g.face_indices() {
            assert!(j.row_sum(f) > 0.0);
            for &(col, v) in j.row(f) {
                if col == f {
                    assert!(v > 0.0);
                } else {
                    assert!(v < 0.0);
                }
            }
        }
    }
}

#[test]
fn conservation_at_random_states() {
    let mut rng = rng(23);
    for _ in 0..200 {
        let n = rng.gen_range(3..=6);
        let g = random_torus(&mut rng, n, 0.05);
        let kv: Vec<f64> = (0..n * n).map(|_| log_uniform(&mut rng, 1e-2, 1e2)).collect();
        let k = CurvatureVector::new(&g, kv).unwrap();
        let r = gauss_bonnet_report(&g, &k).unwrap();
        assert!(r.global.bigon_identity_residual < 1e-10);
        assert!(r.global.surface_area_residual < 1e-9);
        assert!(r.global.gauss_bonnet_residual.unwrap() < 1e-9);
        assert!(r.min_bigon_area() > 0.0);
        for f in &r.faces {
            assert!(f.radius > 0.0 && f.radius < FRAC_PI_2);
            assert!((f.cone_angle * f.radius.cos() - f.total_curvature).abs() < 1e-10);
        }
        for (f, t) in g.face_indices().zip(total_curvatures(&g, &k)) {
            assert!(t > 0.0 && t < g.face_capacity(f));
        }
    }
}

#[test]
fn limits_of_face_totals() {
    let g = generate_torus_grid(3, 1.0).unwrap();
    let mut kv = vec![1e12; 9];
    kv[4] = 1.0;
    let t = total_curvatures(&g, &CurvatureVector::new(&g, kv.clone()).unwrap());
    assert!(t[4] < 1e-6);
    kv[4] = 1e12;
    kv.iter_mut().enumerate().for_each(|(i, x)| if i != 4 { *x = 1.0 });
    let t = total_curvatures(&g, &CurvatureVector::new(&g, kv).unwrap());
    assert!((t[4] - 8.0).abs() < 1e-6);
}

#[test]
fn generated_grid_vertex_angles() {
    let g = generate_torus_grid(5, 0.9).unwrap();
    assert!(validate(&g.to_doc()).ok);
    assert!((g.vertex_cone_angle(circle_pattern::VertexIndex(0)) - 4.0 * (PI - 0.9)).abs() < 1e-14);
}
