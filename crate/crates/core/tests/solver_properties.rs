mod common;

use std::f64::consts::FRAC_PI_2;

use circle_pattern::curvature::total_curvatures;
use circle_pattern::graph::{generate_torus_grid, parse_pattern};
use circle_pattern::solver::{
    adjust_face, estimate_contraction, initial_subpattern, is_subpattern, iterate_once,
    merge_max, solve, Init, SolveStatus, SolverConfig, StartKind, SweepMode,
};
use circle_pattern::{CurvatureVector, FaceIndex, PatternGraph, TargetVector};
use common::*;
use proptest::prelude::*;
use rand::Rng;

fn instance(seed: u64, n: usize) -> (PatternGraph, CurvatureVector, TargetVector) {
    let mut rng = rng(seed);
    let g = random_torus(&mut rng, n, 0.3);
    let k: Vec<f64> = (0..g.face_count())
        .map(|_| log_uniform(&mut rng, 0.1, 10.0))
        .collect();
    let k = CurvatureVector::new(&g, k).unwrap();
    let t = TargetVector::new(&g, total_curvatures(&g, &k)).unwrap();
    (g, k, t)
}

#[test]
fn modes_agree_on_fixtures() {
    for seed in 0..12 {
        let (g, k_true, t) = instance(seed, 3 + seed as usize % 3);
        let mut limits = Vec::new();
        for mode in [SweepMode::Jacobi, SweepMode::GaussSeidel] {
            let config = SolverConfig {
                mode,
                ..SolverConfig::default()
            };
            let (k, trace) = solve(&g, &t, &config).unwrap();
            assert_eq!(trace.status, SolveStatus::Converged);
            limits.push(k);
        }
        for f in g.face_indices() {
            assert!(rel_err(limits[0].get(f), limits[1].get(f)) < 1e-8);
            assert!(rel_err(limits[0].get(f), k_true.get(f)) < 1e-8);
        }
    }
}

#[test]
fn fixed_point_residual_at_solution() {
    let (g, _, t) = instance(40, 4);
    let (k, _) = solve(&g, &t, &SolverConfig::default()).unwrap();
    let next = iterate_once(&g, &k, &t, SweepMode::Jacobi).unwrap();
    let du = k
        .log_values()
        .iter()
        .zip(next.log_values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    // the converged iterate is within tol_T of the targets, so one more
    // sweep moves u by at most about tol_T / (diagonal margin)
    assert!(du < 1e-9, "{du}");

    let (k_exact, t_exact) = {
        let (g2, k2, t2) = instance(40, 4);
        assert_eq!(g2, g);
        (k2, t2)
    };
    let stay = iterate_once(&g, &k_exact, &t_exact, SweepMode::Jacobi).unwrap();
    let du = k_exact
        .log_values()
        .iter()
        .zip(stay.log_values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(du < 10.0 * 1e-13, "{du}");
}

#[test]
fn local_lipschitz_bound_holds() {
    let (g, k_hat, t) = instance(41, 3);
    let mut rng = rng(42);
    let u_hat = k_hat.log_values();
    let radius = 1e-2;
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| {
        let u: Vec<f64> = u_hat.iter().map(|x| x + rng.gen_range(-radius..=radius)).collect();
        CurvatureVector::from_log(&g, &u).unwrap()
    };
    let mut lambda_box = 0.0f64;
    let points: Vec<CurvatureVector> = (0..40).map(|_| sample(&mut rng)).collect();
    for p in &points {
        lambda_box = lambda_box.max(estimate_contraction(&g, p, &t).unwrap());
    }
    assert!(lambda_box < 1.0);
    for pair in points.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let pa = iterate_once(&g, a, &t, SweepMode::Jacobi).unwrap().log_values();
        let pb = iterate_once(&g, b, &t, SweepMode::Jacobi).unwrap().log_values();
        let lhs = pa.iter().zip(&pb).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let rhs = a
            .log_values()
            .iter()
            .zip(b.log_values())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        // the box estimate is sampled, so allow a small margin for the sup
        assert!(lhs <= (lambda_box + 0.02) * rhs, "{lhs} vs {lambda_box} * {rhs}");
    }
}

#[test]
fn monotone_from_above_with_user_superpattern() {
    let (g, k_true, t) = instance(43, 4);
    // exact solution for slightly larger targets is a superpattern
    let raised = t.scaled(1.0 + 1e-2).unwrap();
    let (k_super, _) = solve(&g, &raised, &SolverConfig::default()).unwrap();
    let config = SolverConfig {
        init: Init::Explicit(k_super),
        snapshots: true,
        ..SolverConfig::default()
    };
    let (k, trace) = solve(&g, &t, &config).unwrap();
    assert_eq!(trace.start, StartKind::Superpattern);
    assert!(trace.records.iter().all(|r| r.monotone_down));
    assert!(trace.records.iter().all(|r| {
        let snap = CurvatureVector::new(&g, r.snapshot.clone().unwrap()).unwrap();
        total_curvatures(&g, &snap)
            .iter()
            .zip(t.values())
            .all(|(a, b)| *a >= b - 1e-10)
    }));
    for f in g.face_indices() {
        assert!(rel_err(k.get(f), k_true.get(f)) < 1e-8);
    }
}

#[test]
fn mixed_start_still_converges() {
    let (g, k_true, t) = instance(44, 3);
    let start: Vec<f64> = (0..9).map(|i| if i % 2 == 0 { 0.01 } else { 50.0 }).collect();
    let config = SolverConfig {
        init: Init::Explicit(CurvatureVector::new(&g, start).unwrap()),
        ..SolverConfig::default()
    };
    let (k, trace) = solve(&g, &t, &config).unwrap();
    assert_eq!(trace.start, StartKind::Mixed);
    assert!(trace.status.is_converged());
    assert!(rel_err(k.get(FaceIndex(3)), k_true.get(FaceIndex(3))) < 1e-8);
}

#[test]
fn subpattern_near_the_boundary() {
    // one face with one self-adjacent edge: admissible iff T̂ < 2θ
    let text = r#"{
      "edges": [{"id": "e", "theta": 1.2, "faces": ["f", "f"]}],
      "faces": [{"id": "f", "edges": ["e", "e"]}]
    }"#;
    let g = parse_pattern(text).unwrap();
    let t = TargetVector::uniform(&g, 2.4 - 1e-3).unwrap();
    let k0 = initial_subpattern(&g, &t).unwrap();
    assert!(is_subpattern(&g, &k0, &t, 0.0));
    let (k, trace) = solve(&g, &t, &SolverConfig::default()).unwrap();
    assert!(trace.status.is_converged());
    let total = total_curvatures(&g, &k)[0];
    assert!((total - t.values()[0]).abs() < 1e-10);
    assert!(initial_subpattern(&g, &TargetVector::uniform(&g, 2.4).unwrap()).is_err());
}

#[test]
fn adjust_face_is_monotone_in_target() {
    let g = generate_torus_grid(3, FRAC_PI_2).unwrap();
    let k = CurvatureVector::uniform(&g, 1.0).unwrap();
    let mut prev = 0.0;
    for i in 1..60 {
        let target = 4.0 * std::f64::consts::PI * i as f64 / 60.0;
        let x = adjust_face(&g, &k, FaceIndex(0), target).unwrap();
        assert!(x > prev);
        prev = x;
    }
}

#[test]
fn contraction_may_exceed_one_far_away() {
    let (g, k_true, t) = instance(45, 3);
    let far: Vec<f64> = k_true.values().iter().map(|x| x * 1e3).collect();
    let far = CurvatureVector::new(&g, far).unwrap();
    let lambda = estimate_contraction(&g, &far, &t).unwrap();
    assert!(lambda.is_finite() && lambda > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn merge_of_subpatterns_is_subpattern(seed in any::<u64>(), s1 in 0.01f64..1.0, s2 in 0.01f64..1.0) {
        let (g, k_true, t) = instance(seed, 3);
        let mut rng = rng(seed ^ 0x5eed);
        let mut pick = |s: f64| {
            let mut k: Vec<f64> = k_true.values().iter().map(|x| x * s * rng.gen_range(0.5..1.0)).collect();
            while !is_subpattern(&g, &CurvatureVector::new(&g, k.clone()).unwrap(), &t, 0.0) {
                k.iter_mut().for_each(|x| *x *= 0.9);
            }
            CurvatureVector::new(&g, k).unwrap()
        };
        let (a, b) = (pick(s1), pick(s2));
        let m = merge_max(&a, &b).unwrap();
        prop_assert!(is_subpattern(&g, &m, &t, 1e-12));
        for f in g.face_indices() {
            prop_assert!(m.get(f) >= a.get(f) && m.get(f) >= b.get(f));
        }
    }

    #[test]
    fn sweep_from_subpattern_stays_below(seed in any::<u64>()) {
        let (g, _, t) = instance(seed, 3);
        let k0 = initial_subpattern(&g, &t).unwrap();
        let k1 = iterate_once(&g, &k0, &t, SweepMode::Jacobi).unwrap();
        prop_assert!(is_subpattern(&g, &k1, &t, 1e-12));
        for f in g.face_indices() {
            prop_assert!(k1.get(f) >= k0.get(f));
        }
    }
}
