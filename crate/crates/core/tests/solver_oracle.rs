//! Cross-pipeline agreement between the interval solver and the
//! argument-principle oracle, anchored on frozen reference values that the
//! oracle itself reproduces inside each test.

use halfspace_resonances::model::BoundaryCondition::{self, Dirichlet, Neumann};
use halfspace_resonances::model::{gamma, gamma_scale, ModelParams};
use halfspace_resonances::oracle::{bisect, half_disk_count, winding_count, Rectangle};
use halfspace_resonances::solver::{
    self, branch_interval, curve_im, find_all, find_branch, g_of_a, h_of_a, ResonanceKind,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn on_axis(bc: BoundaryCondition, alpha: f64, y3: f64) -> ModelParams {
    ModelParams::on_axis(bc, alpha, y3).unwrap()
}

/// 1D reduction residual used by the oracle-side recomputation.
fn reduction(p: &ModelParams, a: f64) -> f64 {
    h_of_a(p, a) - p.bc.gamma_sign() * g_of_a(p.y3(), a)
}

#[test]
fn dirichlet_first_branch_matches_frozen_oracle_value() {
    // frozen from the argument-principle + bisection pipeline
    let frozen = Complex64::new(3.79431558923626300, -1.03113886479914085);
    let p = on_axis(Dirichlet, 0.0, 1.0);
    // the oracle localizes exactly one zero in the rectangle
    let rect = Rectangle::new(PI, 1.5 * PI, -3.0, -1e-6).unwrap();
    assert_eq!(winding_count(&p, &rect).unwrap().count, 1);
    // oracle bisection on the shrunk interval reproduces the frozen value
    let a = bisect(|a| reduction(&p, a), PI + 1e-9, 1.5 * PI - 1e-9).unwrap();
    let b = curve_im(Dirichlet, 1.0, a);
    assert!((Complex64::new(a, b) - frozen).norm() < 1e-12);
    // solver pipeline agrees to the bisection tolerance
    let (_, root) = find_branch(&p, 1).unwrap();
    assert!((root.z - frozen).norm() < 1e-12, "solver {} vs frozen {frozen}", root.z);
    assert!((root.z.re - a).abs() <= 1e-12 * a, "cross-pipeline Re agreement");
}

#[test]
fn neumann_first_branch_matches_frozen_oracle_value() {
    let frozen = Complex64::new(2.18759257653094696, -0.766956659896787518);
    let p = on_axis(Neumann, 0.0, 1.0);
    let rect = Rectangle::new(0.5 * PI, PI, -3.0, -1e-6).unwrap();
    assert_eq!(winding_count(&p, &rect).unwrap().count, 1);
    let a = bisect(|a| reduction(&p, a), 0.5 * PI + 1e-9, PI - 1e-9).unwrap();
    assert!((Complex64::new(a, curve_im(Neumann, 1.0, a)) - frozen).norm() < 1e-12);
    let (_, root) = find_branch(&p, 0).unwrap();
    assert!((root.z - frozen).norm() < 1e-12);
}

#[test]
fn antibound_positions_match_frozen_bisection_values() {
    // f(b) = alpha + b/(4 pi) ± e^{-2 y3 b}/(8 pi y3), frozen roots
    let frozen_d = -1.67463640069641095;
    let p = on_axis(Dirichlet, -1.0, 1.0);
    let f = |b: f64| -1.0 + b / (4.0 * PI) + (-2.0 * b).exp() / (8.0 * PI);
    let b = bisect(f, -50.0, 0.0).unwrap();
    assert!((b - frozen_d).abs() < 1e-12);
    let ab = solver::find_antibound(&p).unwrap();
    assert!((ab.z.im - frozen_d).abs() < 1e-12);

    let frozen_n = -1.54642693667677578;
    let pn = on_axis(Neumann, 1.0, 1.0);
    let fn_ = |b: f64| 1.0 + b / (4.0 * PI) - (-2.0 * b).exp() / (8.0 * PI);
    assert!((bisect(fn_, -50.0, 0.0).unwrap() - frozen_n).abs() < 1e-12);
    let abn = solver::find_antibound(&pn).unwrap();
    assert!((abn.z.im - frozen_n).abs() < 1e-12);
}

#[test]
fn low_pair_matches_frozen_oracle_value() {
    let frozen = Complex64::new(0.668617850715342743, -0.159065752602381039);
    let p = on_axis(Dirichlet, 0.0, 1.0);
    let rect = Rectangle::new(1e-6, 0.5 * PI, -5.0, -1e-6).unwrap();
    assert_eq!(winding_count(&p, &rect).unwrap().count, 1);
    let (_, pos) = solver::find_low_pair(&p).unwrap().unwrap();
    assert!((pos.z - frozen).norm() < 1e-12, "{} vs {frozen}", pos.z);
}

#[test]
fn interval_uniqueness_and_gaps_randomized() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..2 {
        let alpha = rng.gen_range(-2.0..2.0);
        let y3 = rng.gen_range(0.2..5.0);
        let p = on_axis(Dirichlet, alpha, y3);
        for k in (1..=200).step_by(13) {
            let (lo, hi) = branch_interval(Dirichlet, y3, k).unwrap();
            let (_, root) = find_branch(&p, k).unwrap();
            let depth = -root.z.im + 2.0 / y3;
            let rect = Rectangle::new(lo, hi, -depth, -1e-6).unwrap();
            let w = winding_count(&p, &rect).unwrap();
            assert_eq!(w.count, 1, "k={k} alpha={alpha} y3={y3}");
            // the adjoining gap interval holds no zeros
            let gap = Rectangle::new(hi, (k + 1) as f64 * PI / y3, -depth, -1e-6).unwrap();
            assert_eq!(winding_count(&p, &gap).unwrap().count, 0, "gap after k={k}");
        }
    }
}

#[test]
fn no_resonances_on_half_integer_lines() {
    let p = on_axis(Dirichlet, 0.17, 1.3);
    for k in 1..20i64 {
        let re = k as f64 * PI / (2.0 * 1.3);
        // skip lines passing through exceptional closed-form points for
        // this alpha (none here: alpha is generic)
        for j in 1..20 {
            let z = Complex64::new(re, -0.1 * j as f64);
            let rel = gamma(&p, z).norm() / gamma_scale(&p, z);
            assert!(rel > 1e-6, "Γ nearly vanishes on the line Re z = {re}, z = {z}");
        }
    }
}

#[test]
fn branch_asymptotics_ratio() {
    for (alpha, y3) in [(0.0, 1.0), (-1.3, 0.7), (1.1, 2.9)] {
        let p = on_axis(Dirichlet, alpha, y3);
        let (_, root) = find_branch(&p, 200).unwrap();
        let ratio = root.z.re * 2.0 * y3 / ((2.0 * 200.0 + 0.5) * PI);
        assert!(
            (ratio - 1.0).abs() <= 0.01,
            "a_200 asymptotic ratio off: {ratio} (alpha={alpha}, y3={y3})"
        );
    }
}

#[test]
fn find_all_count_equals_winding_with_multiplicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let bc = if rng.gen_bool(0.5) { Dirichlet } else { Neumann };
        let alpha = rng.gen_range(-2.0..2.0);
        let y3 = rng.gen_range(0.2..2.0);
        let p = on_axis(bc, alpha, y3);
        let all = find_all(&p, 12.0).unwrap();
        let total: i64 = all.iter().map(|r| r.multiplicity as i64).sum();
        let oracle = half_disk_count(&p, 12.0).unwrap().count;
        assert_eq!(total, oracle, "bc={bc:?} alpha={alpha} y3={y3}");
    }
}

#[test]
fn count_reports_are_consistent_and_monotone() {
    let p = on_axis(Dirichlet, 0.4, 1.0);
    let mut prev = 0;
    for r in [5.0, 10.0, 20.0] {
        let rep = solver::count_exact(&p, r).unwrap();
        assert_eq!(rep.exact_count, rep.oracle_count);
        assert!(rep.exact_count >= prev);
        prev = rep.exact_count;
    }
}

#[test]
fn zero_bifurcation_around_critical_coupling() {
    // crossing the Dirichlet critical coupling: antibound below, zero at,
    // low pair above
    let y3 = 1.0;
    let crit = -1.0 / (8.0 * PI * y3);
    let below = on_axis(Dirichlet, crit - 0.01, y3);
    assert!(solver::find_antibound(&below).is_some());
    assert!(solver::find_low_pair(&below).unwrap().is_none());
    let at = on_axis(Dirichlet, crit, y3);
    let zero = solver::detect_zero(&at).unwrap();
    assert_eq!(zero.kind, ResonanceKind::ZeroEigenvalue);
    assert_eq!(zero.multiplicity, 2);
    let above = on_axis(Dirichlet, crit + 0.01, y3);
    assert!(solver::find_antibound(&above).is_none());
    let (_, pos) = solver::find_low_pair(&above).unwrap().unwrap();
    assert!(pos.z.re > 0.0 && pos.z.re < PI / (2.0 * y3));
}
