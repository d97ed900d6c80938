//! Gauss–Legendre rules and adaptive panel quadrature for complex-valued
//! integrands on real parameter intervals.

use num_complex::Complex64;
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre recurrence; exact to machine
/// precision for the orders used here.
pub(crate) fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2);
    let mut rule = Vec::with_capacity(n);
    let nf = n as f64;
    let m = n.div_ceil(2);
    for i in 1..=m {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let delta = p1 / dp;
            x -= delta;
            if delta.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((-x, w));
    }
    // mirror to the full rule
    for i in (0..n - m).rev() {
        let (x, w) = rule[i];
        rule.push((-x, w));
    }
    rule
}

fn gl16() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| legendre_rule(16))
}

pub(crate) fn gl32() -> &'static [(f64, f64)] {
    static R: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    R.get_or_init(|| legendre_rule(32))
}

/// Panel value plus the L1 mass used as the quadrature noise scale.
fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    for &(x, w) in gl16() {
        let v = f(c + h * x);
        acc += w * v;
        mass += w * v.norm();
    }
    (acc * h, mass * h.abs())
}

/// Adaptive Gauss–Legendre integration of `f` over [a, b].
///
/// Splits panels until the local two-half refinement estimate drops below the
/// allotted tolerance; returns the value and the accumulated error estimate.
pub(crate) fn adaptive<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
) -> (Complex64, f64) {
    fn rec<F: Fn(f64) -> Complex64>(
        f: &F,
        a: f64,
        b: f64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> (Complex64, f64) {
        let m = 0.5 * (a + b);
        let (left, mass_l) = panel(f, a, m);
        let (right, mass_r) = panel(f, m, b);
        let refined = left + right;
        let err = (refined - whole).norm();
        // floor the tolerance at the rounding noise of the panel sums, or
        // near-singular passes split forever chasing unreachable accuracy
        let tol_eff = tol.max(4e-16 * (mass_l + mass_r));
        if err <= tol_eff || depth >= 40 {
            return (refined, err.min(tol_eff.max(tol)));
        }
        let (vl, el) = rec(f, a, m, left, 0.5 * tol, depth + 1);
        let (vr, er) = rec(f, m, b, right, 0.5 * tol, depth + 1);
        (vl + vr, el + er)
    }
    let (whole, _) = panel(f, a, b);
    rec(f, a, b, whole, tol, 0)
}

/// Same as [`adaptive`] but starting from `n0` equal panels, for integrands
/// whose oscillation the single top-level panel would alias.
pub(crate) fn adaptive_panels<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    n0: usize,
    tol: f64,
) -> (Complex64, f64) {
    let n0 = n0.max(1);
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let h = (b - a) / n0 as f64;
    let tol_per = tol / n0 as f64;
    for i in 0..n0 {
        let lo = a + i as f64 * h;
        let hi = if i + 1 == n0 { b } else { lo + h };
        let (v, e) = adaptive(f, lo, hi, tol_per);
        value += v;
        err += e;
    }
    (value, err)
}
