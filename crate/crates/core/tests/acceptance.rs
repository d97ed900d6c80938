//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! (visible with --nocapture) and failing the build if its tolerance is
//! missed. Tolerances are pinned here, not configurable.

use halfspace_resonances::expansion::{
    background_integral_with_ray, free_term, residue_closed_form_dirichlet, residue_gamma_inv,
    schrodinger_kernel, truncated_resolvent_decay, wave_coefficient_fj, TestFunction,
};
use halfspace_resonances::lambertw::{
    lambert_w, lambert_w_from_log, remainder_bound_from_log, series_l1, SignShift,
};
use halfspace_resonances::model::BoundaryCondition::{self, Dirichlet, Neumann};
use halfspace_resonances::model::{
    gamma, gamma_scale, green_halfspace, resolvent_kernel, BoxRegion, ModelParams, Point,
};
use halfspace_resonances::oracle::{
    circle, contour_integral, half_disk_count, schrodinger_direct, winding_count, Rectangle,
};
use halfspace_resonances::semiclassical::{
    direct_root, resonance_wk, verify_band_beta_lt1, verify_parabola_beta_gt1,
    SemiclassicalParams, Sign,
};
use halfspace_resonances::solver::{self, find_all, find_branch, find_exceptional};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

fn report(n: &str, pass: bool, detail: &str) {
    println!("ACCEPTANCE {n} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {n}: {detail}");
}

#[test]
fn criterion_01_figure_reproduction() {
    let start = Instant::now();
    let params = ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap();
    let mut count = 0;
    let mut worst_gamma = 0.0f64;
    let mut worst_curve = 0.0f64;
    for k in 1..=100 {
        let (_, root) = find_branch(&params, k).unwrap();
        assert!(root.z.re > PI, "branch {k} landed at Re z = {} <= pi", root.z.re);
        worst_gamma = worst_gamma.max(root.gamma_residual(&params));
        worst_curve = worst_curve.max(root.on_curve_error(&params).unwrap());
        count += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    let pass = count == 100 && worst_gamma <= 1e-12 && worst_curve <= 1e-10 && elapsed < 5.0;
    report(
        "1",
        pass,
        &format!(
            "100 branch resonances with Re z > pi: |Γ| residual {worst_gamma:.2e} (<=1e-12), \
             curve error {worst_curve:.2e} (<=1e-10), {elapsed:.2}s (<5s)"
        ),
    );
}

#[test]
fn criterion_02_oracle_equivalence_randomized() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    for _ in 0..20 {
        let bc = if rng.gen_bool(0.5) { Dirichlet } else { Neumann };
        let alpha = rng.gen_range(-2.0..2.0);
        let y3 = rng.gen_range(0.2..5.0);
        let p = ModelParams::on_axis(bc, alpha, y3).unwrap();
        let exact: i64 = find_all(&p, 30.0).unwrap().iter().map(|r| r.multiplicity as i64).sum();
        let zero: i64 = solver::detect_zero(&p).map(|z| z.multiplicity as i64).unwrap_or(0);
        let winding = half_disk_count(&p, 30.0).unwrap();
        assert!(winding.certified);
        assert_eq!(
            exact,
            winding.count + zero,
            "bc={bc:?} alpha={alpha:.4} y3={y3:.4}"
        );
        checked += 1;
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "2",
        checked == 20 && elapsed < 60.0,
        &format!("20 randomized parameter draws, exact integer agreement, {elapsed:.1}s (<60s)"),
    );
}

#[test]
fn criterion_03_counting_law() {
    let p = ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap();
    let mut detail = String::new();
    let mut pass = true;
    for r in [50.0, 100.0, 200.0, 400.0] {
        let rep = solver::count_exact(&p, r).unwrap();
        let gap = (rep.exact_count - rep.asymptotic_count).abs();
        pass &= gap <= 4;
        detail.push_str(&format!("R={r}: {} vs {} (gap {gap}); ", rep.exact_count, rep.asymptotic_count));
        if r == 400.0 {
            let ratio = rep.exact_count as f64 / (2.0 * r / PI);
            pass &= (ratio - 1.0).abs() <= 0.02;
            detail.push_str(&format!("ratio at R=400: {ratio:.4} (within 2%)"));
        }
    }
    report("3", pass, &detail);
}

#[test]
fn criterion_04_threshold_behavior() {
    let mut pass = true;
    for (bc, zero_kind, zero_mult) in [
        (Dirichlet, solver::ResonanceKind::ZeroEigenvalue, 2),
        (Neumann, solver::ResonanceKind::ZeroResonance, 1),
    ] {
        let y3 = 1.0;
        let crit = bc.critical_alpha(y3);
        for j in -5..=5i32 {
            let alpha = crit + 0.02 * j as f64;
            let p = ModelParams::on_axis(bc, alpha, y3).unwrap();
            let ab = solver::find_antibound(&p);
            let expected = match bc {
                Dirichlet => alpha < crit,
                Neumann => alpha > crit,
            };
            pass &= ab.is_some() == expected;
            if let Some(ab) = ab {
                pass &= ab.z.re == 0.0 && ab.z.im < 0.0;
            }
            let zero = solver::detect_zero(&p);
            if j == 0 {
                let z = zero.expect("critical coupling must yield the zero resonance");
                pass &= z.kind == zero_kind && z.multiplicity == zero_mult;
            } else {
                pass &= zero.is_none();
            }
        }
    }
    report("4", pass, "antibound iff strict threshold; zero classification with multiplicity");
}

#[test]
fn criterion_05_exceptional_lines() {
    let y3 = 1.0;
    let mut pass = true;
    let mut detail = String::new();
    for (bc, ks) in [(Dirichlet, [0i64, 2]), (Neumann, [1i64, 3])] {
        for k in ks {
            let arg = PI / 2.0 + k as f64 * PI;
            let alpha = arg.ln() / (8.0 * PI * y3);
            let p = ModelParams::on_axis(bc, alpha, y3).unwrap();
            let expect = Complex64::new(
                PI / (4.0 * y3) + k as f64 * PI / (2.0 * y3),
                -arg.ln() / (2.0 * y3),
            );
            let found = find_exceptional(&p);
            let hit = found.iter().find(|r| (r.z - expect).norm() < 1e-10);
            match hit {
                Some(r) => {
                    let resid = r.gamma_residual(&p);
                    pass &= resid <= 1e-11;
                    detail.push_str(&format!("{bc:?} k={k}: |Γ|/scale {resid:.2e}; "));
                }
                None => {
                    pass = false;
                    detail.push_str(&format!("{bc:?} k={k}: closed form missing; "));
                }
            }
        }
    }
    report("5", pass, &detail);
}

#[test]
fn criterion_06_lambert_engine() {
    // defining-identity residual across branches |k| <= 50 on 200 grid points
    let mut worst = 0.0f64;
    let mut points = 0;
    for i in 0..20 {
        let t = -25.0 + 50.0 * i as f64 / 19.0;
        for j in 0..10 {
            let phi = -3.0 + 6.0 * j as f64 / 9.0;
            let w = Complex64::from_polar(t.exp(), phi);
            points += 1;
            for k in -50..=50i64 {
                let res = lambert_w(k, w).unwrap();
                worst = worst.max(res.residual);
            }
        }
    }
    // Lemma tail bound, empirically, on the semiclassical sweep grid
    let mut tail_ok = true;
    for h in [1e-1, 1e-2, 1e-3f64] {
        for beta in [0.5, 1.5, 2.0] {
            for sign in [1.0, -1.0] {
                let ln_w = sign * 8.0 * PI * h.powf(-beta);
                for k in [-1000i64, -100, -10, -2, 2, 10, 100, 1000] {
                    let tail =
                        remainder_bound_from_log(k, Complex64::new(ln_w, 0.0), SignShift::Odd);
                    if !tail.valid {
                        tail_ok = false;
                        continue;
                    }
                    let l1 = series_l1(k, Complex64::new(ln_w, 0.0), SignShift::Odd);
                    let w_exact = lambert_w_from_log(k, ln_w, SignShift::Odd).unwrap().value;
                    let rk = w_exact - (l1 - l1.ln());
                    tail_ok &= (rk - tail.first_term).norm() <= tail.bound + 1e-14;
                }
            }
        }
    }
    let pass = worst <= 1e-13 && points == 200 && tail_ok;
    report(
        "6",
        pass,
        &format!(
            "residual max {worst:.2e} over 200 w-points x 101 branches (<=1e-13); \
             Lemma tail bound held on the sweep grid: {tail_ok}"
        ),
    );
}

#[test]
fn criterion_07_semiclassical_bounds() {
    let eps = 0.5;
    // beta = 1/2 band at h = 1e-3
    let p_band = SemiclassicalParams::new(1e-3, 0.5, Sign::Plus, Dirichlet, 1.0).unwrap();
    let checks = verify_band_beta_lt1(&p_band, eps).unwrap();
    let slack_cap = 72.0 * PI * PI * eps.powi(-2) * 1e-6;
    let max_slack = checks.iter().map(|c| c.slack).fold(0.0f64, f64::max);
    let band_ok = !checks.is_empty()
        && checks.iter().all(|c| c.passed())
        && max_slack <= slack_cap;
    // monotone sharpening across the h sweep
    let mut prev = f64::MAX;
    let mut monotone = true;
    for h in [1e-1, 1e-2, 1e-3] {
        let p = SemiclassicalParams::new(h, 0.5, Sign::Plus, Dirichlet, 1.0).unwrap();
        let m = verify_band_beta_lt1(&p, eps)
            .unwrap()
            .iter()
            .map(|c| c.slack)
            .fold(0.0f64, f64::max);
        monotone &= m <= prev;
        prev = m;
    }
    // beta = 2 parabolas, both signs
    let mut parabola_ok = true;
    for sign in [Sign::Plus, Sign::Minus] {
        let p = SemiclassicalParams::new(1e-3, 2.0, sign, Dirichlet, 1.0).unwrap();
        let ch = verify_parabola_beta_gt1(&p, eps).unwrap();
        parabola_ok &= !ch.is_empty() && ch.iter().all(|c| c.passed());
    }
    // Lambert-constructed roots against the direct interval solver
    let mut agree = true;
    let mut worst_rel = 0.0f64;
    for (beta, sign) in [(0.5, Sign::Plus), (2.0, Sign::Minus)] {
        let p = SemiclassicalParams::new(1e-3, beta, sign, Dirichlet, 1.0).unwrap();
        for k in [400i64, 700, -900, 1100] {
            let z = resonance_wk(&p, k).unwrap();
            if z.norm() < eps || z.norm() > 1.0 / eps {
                continue;
            }
            let d = direct_root(&p, z).unwrap();
            let rel = (z - d).norm() / z.norm();
            worst_rel = worst_rel.max(rel);
            agree &= rel <= 1e-9;
        }
    }
    let pass = band_ok && monotone && parabola_ok && agree;
    report(
        "7",
        pass,
        &format!(
            "band max slack {max_slack:.3e} (<= {slack_cap:.3e}), monotone in h: {monotone}, \
             beta=2 parabolas pass: {parabola_ok}, Lambert-vs-direct {worst_rel:.2e} (<=1e-9)"
        ),
    );
}

#[test]
fn criterion_08_residue_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst_closed = 0.0f64;
    let mut worst_contour = 0.0f64;
    let mut n = 0;
    while n < 50 {
        let alpha = rng.gen_range(-2.0..2.0);
        let y3 = rng.gen_range(0.3..3.0);
        let p = ModelParams::on_axis(Dirichlet, alpha, y3).unwrap();
        let k = rng.gen_range(1..8i64);
        let (_, root) = find_branch(&p, k).unwrap();
        let direct = residue_gamma_inv(&p, root.z).unwrap();
        let closed = residue_closed_form_dirichlet(&p, root.z);
        worst_closed = worst_closed.max((direct - closed).norm() / closed.norm());
        // numeric contour residue: (1/2pi i) \oint Γ^{-1} on a small circle
        let radius = 0.1f64.min(0.4 * PI / (2.0 * y3));
        let f = |z: Complex64| 1.0 / gamma(&p, z);
        let numeric = contour_integral(&f, &circle(root.z, radius)).unwrap()
            / Complex64::new(0.0, 2.0 * PI);
        worst_contour = worst_contour.max((numeric - closed).norm() / closed.norm());
        n += 1;
    }
    let pass = worst_closed <= 1e-10 && worst_contour <= 1e-8;
    report(
        "8",
        pass,
        &format!(
            "50 resonances: closed form vs 1/Γ' {worst_closed:.2e} (<=1e-10), \
             contour residues {worst_contour:.2e} (<=1e-8)"
        ),
    );
}

#[test]
fn criterion_09_schrodinger_expansion_consistency() {
    let start = Instant::now();
    let p = ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap();
    let x = Point::new(0.0, 0.0, 1.5);
    let xp = Point::new(0.0, 0.0, 2.0);
    let t = 2.0;
    let ke = schrodinger_kernel(&p, t, &x, &xp, 40).unwrap();
    let oracle_total = free_term(t, &x, &xp) + schrodinger_direct(&p, t, &x, &xp).unwrap();
    let rel = (ke.total - oracle_total).norm() / ke.total.norm();
    let ke60 = schrodinger_kernel(&p, t, &x, &xp, 60).unwrap();
    let stab_n = (ke.total - ke60.total).norm() / ke.total.norm();
    let b_ray = background_integral_with_ray(&p, t, &x, &xp, 1e-6).unwrap();
    let stab_ray = (ke.background - b_ray).norm() / ke.total.norm();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = rel <= 1e-6 && stab_n <= 1e-8 && stab_ray <= 1e-8 && elapsed < 120.0;
    report(
        "9",
        pass,
        &format!(
            "oracle delta {rel:.2e} (<=1e-6), n_max 40->60 {stab_n:.2e} (<=1e-8), \
             ray perturbation {stab_ray:.2e} (<=1e-8), {elapsed:.1}s (<120s)"
        ),
    );
}

#[test]
fn criterion_09b_growth_envelope_diagnostic() {
    // Lemma-style decay diagnostic standing in for the abstract wave-error
    // constants: kernel growth fits inside the (1+|z|)^{j-1} e^{T (Im z)_-}
    // envelope, the region holds finitely many resonances, and an invalid
    // delta is flagged.
    let p = ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap();
    let rho = BoxRegion::new(Point::new(0.5, -0.5, 0.5), Point::new(1.5, 0.5, 1.5)).unwrap();
    let mut samples = Vec::new();
    for j in 1..60 {
        let r = 1.0 + 0.7 * j as f64;
        samples.push(Complex64::new(r, -0.04));
        samples.push(Complex64::new(r, -0.3));
        samples.push(Complex64::new(-r, -0.04));
    }
    let rep = truncated_resolvent_decay(&p, &rho, &samples, 0.3, 1.0, 0).unwrap();
    let finite = rep.resonances_in_region < 40;
    let invalid = truncated_resolvent_decay(&p, &rho, &samples, 0.6, 1.0, 0).unwrap();
    let pass = rep.delta_valid && rep.poly_ok && rep.rate_ok && finite && !invalid.delta_valid;
    report(
        "9b",
        pass,
        &format!(
            "poly exponent {:.3} (<= -0.8), rate {:.3} (<= {:.3}), {} resonances in region, \
             invalid delta flagged: {}",
            rep.poly_exponent,
            rep.exp_rate,
            rep.distance_bound + 0.1,
            rep.resonances_in_region,
            !invalid.delta_valid
        ),
    );
}

#[test]
fn criterion_10_property_suites() {
    let mut pass = true;
    // conjugate-pair symmetry of Γ
    for bc in [Dirichlet, Neumann] {
        let p = ModelParams::on_axis(bc, -0.7, 1.7).unwrap();
        for z in [Complex64::new(4.0, -1.0), Complex64::new(-2.2, -3.0)] {
            pass &= (gamma(&p, -z.conj()) - gamma(&p, z).conj()).norm()
                <= 1e-14 * gamma_scale(&p, z);
        }
    }
    // Dirichlet boundary trace vanishes
    let pd = ModelParams::on_axis(Dirichlet, 0.3, 1.0).unwrap();
    let trace = green_halfspace(
        &pd,
        Complex64::new(1.1, -0.4),
        &Point::new(0.8, -0.2, 0.0),
        &Point::new(0.0, 0.0, 1.3),
    )
    .unwrap();
    pass &= trace.norm() <= 1e-12;
    // kernel symmetry is exact
    let x = Point::new(0.4, 0.1, 2.0);
    let xp = Point::new(-1.0, 0.3, 0.9);
    let z = Complex64::new(2.0, -0.3);
    pass &= resolvent_kernel(&pd, z, &x, &xp).unwrap()
        == resolvent_kernel(&pd, z, &xp, &x).unwrap();
    // f_j linearity: additivity and homogeneity
    let support = BoxRegion::new(Point::new(1.0, -0.5, 0.5), Point::new(2.0, 0.5, 1.5)).unwrap();
    let w = TestFunction::gaussian(Point::new(1.5, 0.0, 1.0), 0.25, support, &pd.y()).unwrap();
    let (_, root) = find_branch(&pd, 1).unwrap();
    let grid = [Point::new(0.3, 0.2, 2.0)];
    let f01 = wave_coefficient_fj(&pd, root.z, Some(&w), Some(&w), &grid).unwrap();
    let f0 = wave_coefficient_fj(&pd, root.z, Some(&w), None, &grid).unwrap();
    let f1 = wave_coefficient_fj(&pd, root.z, None, Some(&w), &grid).unwrap();
    pass &= (f01[0] - (f0[0] + f1[0])).norm() <= 1e-12 * f01[0].norm();
    let w2 = w.scaled(2.0);
    let f2 = wave_coefficient_fj(&pd, root.z, None, Some(&w2), &grid).unwrap();
    pass &= (f2[0] - 2.0 * f1[0]).norm() <= 1e-12 * f2[0].norm();
    // winding additivity over a 2x2 subdivision
    let rect = Rectangle::new(0.1, 8.0, -3.0, -1e-6).unwrap();
    let whole = winding_count(&pd, &rect).unwrap().count;
    let mut parts = 0;
    let (rm, im) = (0.5 * (rect.re_min + rect.re_max), 0.5 * (rect.im_min + rect.im_max));
    for (a, b, c, d) in [
        (rect.re_min, rm, rect.im_min, im),
        (rm, rect.re_max, rect.im_min, im),
        (rect.re_min, rm, im, rect.im_max),
        (rm, rect.re_max, im, rect.im_max),
    ] {
        parts += winding_count(&pd, &Rectangle::new(a, b, c, d).unwrap()).unwrap().count;
    }
    pass &= whole == parts;
    report("10", pass, "symmetry, boundary trace, kernel swap, f_j linearity, winding additivity");
}

/// Mirror pairing of residue contributions (checked on the full pre-filter
/// set, as the wedge filter keeps only Re z > 0 members): the residue
/// products pair up as complex conjugates, both time-free and under the
/// wave weight e^{−izt}, so each mirrored pair sums to a real quantity.
#[test]
fn residue_mirror_pairing() {
    let p = ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap();
    let x = Point::new(0.0, 0.0, 1.5);
    let xp = Point::new(0.0, 0.0, 2.0);
    let t = 2.0;
    let all = find_all(&p, 12.0).unwrap();
    let mut paired = 0;
    for r in all.iter().filter(|r| r.z.re > 0.0 && r.z.im < 0.0) {
        let mirror = all
            .iter()
            .find(|m| (m.z - (-r.z.conj())).norm() < 1e-10)
            .expect("mirror partner listed");
        let product = |zn: Complex64| -> Complex64 {
            let res = residue_gamma_inv(&p, zn).unwrap();
            let gx = halfspace_resonances::model::green_at_interaction(&p, zn, &x).unwrap();
            let gxp = halfspace_resonances::model::green_at_interaction(&p, zn, &xp).unwrap();
            2.0 * zn * res * gx * gxp
        };
        let a = product(r.z);
        let b = product(mirror.z);
        assert!(
            (b - a.conj()).norm() <= 1e-10 * a.norm().max(1e-300),
            "mirror residue products must be conjugate: {a} vs {b}"
        );
        let wave_a = (Complex64::new(0.0, -t) * r.z).exp() * a;
        let wave_b = (Complex64::new(0.0, -t) * mirror.z).exp() * b;
        assert!(
            (wave_a + wave_b).im.abs() <= 1e-10 * wave_a.norm().max(1e-300),
            "wave-weighted mirror pair must sum to a real value"
        );
        paired += 1;
    }
    assert!(paired >= 4, "expected several mirrored pairs inside |z| < 12");
}
