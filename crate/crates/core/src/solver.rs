//! Locates and classifies every zero of Γ in the closed lower half-plane:
//! one complex-conjugate-mirrored pair per branch interval, the antibound
//! state on the negative imaginary axis, zero resonances/eigenvalues at the
//! critical couplings, the low Dirichlet pair near the origin, and the
//! closed-form exceptional parameter lines. Also provides counting functions
//! with the Weyl-type asymptotic 2⌊y₃R/π − 1/4⌋.
//!
//! Off the imaginary axis, zeros z = a + ib reduce to the real equation
//! g(a) = ±h(a) with
//!
//! ```text
//! g(a) = sin(2y₃a)/(2y₃a),    h(a) = exp(−8παy₃ − 2y₃a·cot(2y₃a)),
//! ```
//!
//! after which b = (1/2y₃)·ln(±g(a)) puts the root back on the curve. Each
//! 1D root is lifted to a complex seed and polished by Newton steps on Γ.

use crate::model::{
    gamma, gamma_derivative, gamma_scale, BoundaryCondition, ModelParams,
};
use crate::oracle::{self, OracleError, Rectangle};
use crate::model::ModelError;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

/// Classification of a zero of Γ in the closed lower half-plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResonanceKind {
    /// Member of the mirrored pair in a branch interval k ≥ 1 (Dirichlet)
    /// or k ≥ 0 (Neumann).
    ComplexPair,
    /// Purely imaginary zero below the origin.
    AntiBound,
    /// z = 0 at the Dirichlet critical coupling; the root is double.
    ZeroEigenvalue,
    /// z = 0 at the Neumann critical coupling; simple, not an eigenvalue.
    ZeroResonance,
    /// Member of the near-origin Dirichlet pair (|Re z| < π/(2y₃)).
    LowPair,
    /// Closed-form zero on an exceptional parameter line.
    Exceptional,
}

impl std::fmt::Display for ResonanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ResonanceKind::ComplexPair => "complex_pair",
            ResonanceKind::AntiBound => "antibound",
            ResonanceKind::ZeroEigenvalue => "zero_eigenvalue",
            ResonanceKind::ZeroResonance => "zero_resonance",
            ResonanceKind::LowPair => "low_pair",
            ResonanceKind::Exceptional => "exceptional",
        };
        write!(f, "{s}")
    }
}

/// A located zero of Γ with Im z ≤ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resonance {
    pub z: Complex64,
    /// Branch-interval index; 0 for antibound, zero, and low-pair kinds.
    pub branch: i64,
    pub kind: ResonanceKind,
    pub multiplicity: u32,
}

impl Resonance {
    /// |Γ(z)| relative to the magnitude scale of Γ at z.
    pub fn gamma_residual(&self, params: &ModelParams) -> f64 {
        gamma(params, self.z).norm() / gamma_scale(params, self.z)
    }

    /// Deviation of Im z from the on-curve value, relative to it; None for
    /// kinds that do not sit on the curve.
    pub fn on_curve_error(&self, params: &ModelParams) -> Option<f64> {
        match self.kind {
            ResonanceKind::ComplexPair | ResonanceKind::LowPair | ResonanceKind::Exceptional => {
                let expected = curve_im(params.bc, params.y3(), self.z.re);
                Some((self.z.im - expected).abs() / expected.abs().max(1e-300))
            }
            _ => None,
        }
    }
}

/// Counting data at radius R: solver count, Weyl-type asymptotic
/// 2⌊y₃R/π − 1/4⌋, and the argument-principle count.
#[derive(Debug, Clone, Copy)]
pub struct CountReport {
    pub radius: f64,
    pub exact_count: i64,
    pub asymptotic_count: i64,
    pub oracle_count: i64,
}

impl CountReport {
    pub fn within_slack(&self, slack: i64) -> bool {
        (self.exact_count - self.asymptotic_count).abs() <= slack
    }
}

/// Default allowance between exact and asymptotic counts (antibound, zero,
/// low pair, and edge-of-disk stragglers).
pub const DEFAULT_COUNT_SLACK: i64 = 4;

/// g(a) = sin(2y₃a)/(2y₃a), with the sinc limit g(0) = 1.
pub fn g_of_a(y3: f64, a: f64) -> f64 {
    let x = 2.0 * y3 * a;
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

/// h(a) = exp(−8παy₃ − 2y₃a·cot(2y₃a)); the cot form keeps the interior of
/// every branch interval smooth (poles of cot sit at the endpoints only).
pub fn h_of_a(params: &ModelParams, a: f64) -> f64 {
    let y3 = params.y3();
    let x = 2.0 * y3 * a;
    let cot = if x.abs() < 1e-4 {
        // x cot x = 1 - x^2/3 - x^4/45 + ...
        return (-8.0 * PI * params.alpha * y3 - (1.0 - x * x / 3.0)).exp();
    } else {
        x.cos() / x.sin()
    };
    (-8.0 * PI * params.alpha * y3 - x * cot).exp()
}

/// On-curve imaginary part: Im z = (1/2y₃)·ln(± sin(2y₃a)/(2y₃a)).
pub fn curve_im(bc: BoundaryCondition, y3: f64, a: f64) -> f64 {
    (bc.gamma_sign() * g_of_a(y3, a)).ln() / (2.0 * y3)
}

/// Open interval of Re z for branch k: (kπ/y₃, (2k+1)π/(2y₃)) for Dirichlet
/// (k ≥ 1), ((2k+1)π/(2y₃), (k+1)π/y₃) for Neumann (k ≥ 0).
pub fn branch_interval(bc: BoundaryCondition, y3: f64, k: i64) -> Result<(f64, f64), SolverError> {
    match bc {
        BoundaryCondition::Dirichlet if k >= 1 => {
            Ok((k as f64 * PI / y3, (2 * k + 1) as f64 * PI / (2.0 * y3)))
        }
        BoundaryCondition::Neumann if k >= 0 => {
            Ok(((2 * k + 1) as f64 * PI / (2.0 * y3), (k + 1) as f64 * PI / y3))
        }
        _ => Err(SolverError::InvalidBranchIndex { bc, k }),
    }
}

/// h(a) − (±g)(a): its unique zero in the branch interval is Re z.
fn branch_residual(params: &ModelParams, a: f64) -> f64 {
    h_of_a(params, a) - params.bc.gamma_sign() * g_of_a(params.y3(), a)
}

/// Newton refinement of a root seed on Γ itself; returns the polished z.
fn newton_polish(params: &ModelParams, z0: Complex64) -> Result<Complex64, SolverError> {
    let mut z = z0;
    let mut best = (z0, f64::MAX);
    for _ in 0..12 {
        let g = gamma(params, z);
        let rel = g.norm() / gamma_scale(params, z);
        if rel < best.1 {
            best = (z, rel);
        }
        if rel <= 1e-14 {
            break;
        }
        let d = gamma_derivative(params, z);
        if d.norm() == 0.0 {
            break;
        }
        z -= g / d;
        if !z.is_finite() {
            z = best.0;
            break;
        }
    }
    let (z, rel) = if gamma(params, z).norm() / gamma_scale(params, z) <= best.1 {
        (z, gamma(params, z).norm() / gamma_scale(params, z))
    } else {
        best
    };
    if rel > 1e-12 {
        return Err(SolverError::PolishFailed { z, residual: rel });
    }
    Ok(z)
}

/// The mirrored resonance pair of branch interval k, as (−conj z, z) with
/// Re z > 0.
pub fn find_branch(params: &ModelParams, k: i64) -> Result<(Resonance, Resonance), SolverError> {
    let (lo, hi) = branch_interval(params.bc, params.y3(), k)?;
    let width = hi - lo;
    let mut delta = 1e-9 * width;
    let a_root = loop {
        let (fl, fh) = (branch_residual(params, lo + delta), branch_residual(params, hi - delta));
        if fl < 0.0 && fh > 0.0 {
            break bisect_1d(|a| branch_residual(params, a), lo + delta, hi - delta);
        }
        delta *= 1e-2;
        if delta < 1e-15 * width {
            return Err(SolverError::Bracketing { k, lo, hi });
        }
    };
    let b = curve_im(params.bc, params.y3(), a_root);
    let z = newton_polish(params, Complex64::new(a_root, b))?;
    let kind = ResonanceKind::ComplexPair;
    Ok((
        Resonance { z: -z.conj(), branch: k, kind, multiplicity: 1 },
        Resonance { z, branch: k, kind, multiplicity: 1 },
    ))
}

/// Plain bisection on a bracketing interval; the complex Newton polish
/// restores full accuracy afterwards, so 1e−13 relative is plenty here.
fn bisect_1d<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-13 * mid.abs().max(1.0) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The antibound state z = ib (b < 0), present iff α < −1/(8πy₃)
/// (Dirichlet) or α > 1/(8πy₃) (Neumann). On the negative imaginary axis
/// Γ(ib) is real and strictly monotone, so presence and uniqueness reduce to
/// a sign check of f(b) = α + b/(4π) ± e^{−2y₃b}/(8πy₃).
pub fn find_antibound(params: &ModelParams) -> Option<Resonance> {
    let y3 = params.y3();
    let s = params.bc.gamma_sign();
    let f = |b: f64| params.alpha + b / (4.0 * PI) + s * (-2.0 * y3 * b).exp() / (8.0 * PI * y3);
    // strict threshold: f(0) = alpha - critical_alpha must have the right sign
    let f0 = f(0.0);
    match params.bc {
        BoundaryCondition::Dirichlet if f0 >= 0.0 => return None,
        BoundaryCondition::Neumann if f0 <= 0.0 => return None,
        _ => {}
    }
    // expand the bracket until the sign flips (monotone in b < 0)
    let mut lo = -1.0;
    for _ in 0..60 {
        if f(lo).signum() != f0.signum() {
            break;
        }
        lo *= 2.0;
    }
    let b = oracle::bisect(f, lo, 0.0).ok()?;
    Some(Resonance {
        z: Complex64::new(0.0, b),
        branch: 0,
        kind: ResonanceKind::AntiBound,
        multiplicity: 1,
    })
}

/// z = 0 as a resonance: Dirichlet critical coupling gives a double root
/// that is an eigenvalue; Neumann critical coupling a simple zero resonance.
pub fn detect_zero(params: &ModelParams) -> Option<Resonance> {
    if !params.is_critical() {
        return None;
    }
    let (kind, multiplicity) = match params.bc {
        BoundaryCondition::Dirichlet => (ResonanceKind::ZeroEigenvalue, 2),
        BoundaryCondition::Neumann => (ResonanceKind::ZeroResonance, 1),
    };
    Some(Resonance { z: Complex64::new(0.0, 0.0), branch: 0, kind, multiplicity })
}

/// The near-origin pair with |Re z| < π/(2y₃), present for Dirichlet iff
/// α > −1/(8πy₃). For Neumann the same strip supports no zeros (the curve
/// equation has no positive right side there); the oracle scan is still run
/// so the answer is observed rather than assumed.
pub fn find_low_pair(
    params: &ModelParams,
) -> Result<Option<(Resonance, Resonance)>, SolverError> {
    let y3 = params.y3();
    let hi = PI / (2.0 * y3);
    if params.bc == BoundaryCondition::Neumann {
        let rect = Rectangle::new(1e-9, hi * (1.0 - 1e-9), -low_pair_depth(params), -1e-6)?;
        let w = oracle::winding_count(params, &rect)?;
        if w.count == 0 {
            return Ok(None);
        }
        return isolate_in_rectangle(params, rect).map(Some);
    }
    if params.is_critical() || params.alpha < params.bc.critical_alpha(y3) {
        return Ok(None);
    }
    // r = h - g is increasing on (0, pi/2y3); scan probes toward 0 for the
    // sign change, falling back to oracle-guided subdivision if the root
    // hides below probe resolution.
    let delta = 1e-9 * hi;
    if branch_residual(params, hi - delta) <= 0.0 {
        return Err(SolverError::Bracketing { k: 0, lo: 0.0, hi });
    }
    let mut lo = None;
    let mut probe = 0.5 * hi;
    for _ in 0..80 {
        if branch_residual(params, probe) < 0.0 {
            lo = Some(probe);
            break;
        }
        probe *= 0.5;
    }
    let pair = match lo {
        Some(lo) => {
            let a = bisect_1d(|a| branch_residual(params, a), lo, hi - delta);
            let b = curve_im(params.bc, y3, a);
            let z = newton_polish(params, Complex64::new(a, b))?;
            (
                Resonance { z: -z.conj(), branch: 0, kind: ResonanceKind::LowPair, multiplicity: 1 },
                Resonance { z, branch: 0, kind: ResonanceKind::LowPair, multiplicity: 1 },
            )
        }
        None => {
            let rect = Rectangle::new(1e-12, hi * (1.0 - 1e-9), -low_pair_depth(params), -1e-6)?;
            if oracle::winding_count(params, &rect)?.count == 0 {
                return Ok(None);
            }
            isolate_in_rectangle(params, rect)?
        }
    };
    Ok(Some(pair))
}

/// Search depth for the low rectangle: the on-curve depth over the strip
/// plus a 2/y₃ margin.
fn low_pair_depth(params: &ModelParams) -> f64 {
    let y3 = params.y3();
    let hi = PI / (2.0 * y3);
    let mut deepest: f64 = 0.0;
    for j in 1..512 {
        let a = hi * j as f64 / 512.0;
        let g = params.bc.gamma_sign() * g_of_a(y3, a);
        if g > 0.0 {
            deepest = deepest.max(-g.ln() / (2.0 * y3));
        }
    }
    deepest + 2.0 / y3
}

/// Oracle-guided subdivision: halve the rectangle until one zero is
/// isolated, then polish from the center; returns the mirrored pair.
fn isolate_in_rectangle(
    params: &ModelParams,
    rect: Rectangle,
) -> Result<(Resonance, Resonance), SolverError> {
    let mut r = rect;
    for _ in 0..60 {
        if (r.re_max - r.re_min).max(r.im_max - r.im_min) < 1e-3 {
            break;
        }
        let halves = if r.re_max - r.re_min > r.im_max - r.im_min {
            let m = 0.5 * (r.re_min + r.re_max);
            [
                Rectangle::new(r.re_min, m, r.im_min, r.im_max)?,
                Rectangle::new(m, r.re_max, r.im_min, r.im_max)?,
            ]
        } else {
            let m = 0.5 * (r.im_min + r.im_max);
            [
                Rectangle::new(r.re_min, r.re_max, r.im_min, m)?,
                Rectangle::new(r.re_min, r.re_max, m, r.im_max)?,
            ]
        };
        let mut advanced = false;
        for half in halves {
            if oracle::winding_count(params, &half)?.count >= 1 {
                r = half;
                advanced = true;
                break;
            }
        }
        if !advanced {
            return Err(SolverError::Bracketing { k: 0, lo: r.re_min, hi: r.re_max });
        }
    }
    let seed = Complex64::new(0.5 * (r.re_min + r.re_max), 0.5 * (r.im_min + r.im_max));
    let z = newton_polish(params, seed)?;
    Ok((
        Resonance { z: -z.conj(), branch: 0, kind: ResonanceKind::LowPair, multiplicity: 1 },
        Resonance { z, branch: 0, kind: ResonanceKind::LowPair, multiplicity: 1 },
    ))
}

/// Closed-form zeros on the exceptional parameter lines
/// α = (1/(8πy₃))·ln(±(π/2 + kπ)), emitted when α matches one of them to
/// 1e−12 relative. These coincide with branch or low-pair roots, so
/// `find_all` does not duplicate them; this op exposes the closed forms.
pub fn find_exceptional(params: &ModelParams) -> Vec<Resonance> {
    let y3 = params.y3();
    let tol = 1e-12 * (1.0 + params.alpha.abs());
    let mut out = Vec::new();
    let exponent = 8.0 * PI * params.alpha * y3;
    if exponent > 690.0 {
        return out;
    }
    let target = exponent.exp(); // pi/2 + k pi (positive-line) or |k|pi - pi/2
    // positive line: k >= 0 even (Dirichlet) or k >= 1 odd (Neumann)
    let kv = ((target - PI / 2.0) / PI).round();
    for k in [kv - 2.0, kv - 1.0, kv, kv + 1.0, kv + 2.0] {
        if k < 0.0 || k > 1e6 {
            continue;
        }
        let ki = k as i64;
        let parity_ok = match params.bc {
            BoundaryCondition::Dirichlet => ki % 2 == 0,
            BoundaryCondition::Neumann => ki % 2 == 1,
        };
        if !parity_ok {
            continue;
        }
        let arg = PI / 2.0 + k * PI;
        let alpha_k = arg.ln() / (8.0 * PI * y3);
        if (params.alpha - alpha_k).abs() <= tol {
            push_exceptional(params, ki, arg, &mut out);
        }
    }
    // negative line: k odd <= -1 (Dirichlet) or k even <= -2 (Neumann)
    let kn = -((target + PI / 2.0) / PI).round();
    for k in [kn - 2.0, kn - 1.0, kn, kn + 1.0, kn + 2.0] {
        if k >= 0.0 || k < -1e6 {
            continue;
        }
        let ki = k as i64;
        let parity_ok = match params.bc {
            BoundaryCondition::Dirichlet => ki.rem_euclid(2) == 1,
            BoundaryCondition::Neumann => ki.rem_euclid(2) == 0,
        };
        if !parity_ok {
            continue;
        }
        let arg = -PI / 2.0 - k as f64 * PI;
        let alpha_k = arg.ln() / (8.0 * PI * y3);
        if (params.alpha - alpha_k).abs() <= tol {
            push_exceptional(params, ki, arg, &mut out);
        }
    }
    out.sort_by(|a, b| a.z.re.partial_cmp(&b.z.re).unwrap());
    out
}

fn push_exceptional(params: &ModelParams, k: i64, log_arg: f64, out: &mut Vec<Resonance>) {
    let y3 = params.y3();
    let z = Complex64::new(
        PI / (4.0 * y3) + k as f64 * PI / (2.0 * y3),
        -log_arg.ln() / (2.0 * y3),
    );
    debug_assert!(
        gamma(params, z).norm() <= 1e-11 * gamma_scale(params, z),
        "closed-form exceptional point must satisfy the characteristic equation"
    );
    out.push(Resonance { z, branch: k, kind: ResonanceKind::Exceptional, multiplicity: 1 });
}

/// All resonances with |z| < r_max, sorted by Re z (mirror partners listed
/// explicitly). Branch searches for distinct k run in parallel.
pub fn find_all(params: &ModelParams, r_max: f64) -> Result<Vec<Resonance>, SolverError> {
    if !(r_max > 0.0) {
        return Err(SolverError::InvalidRadius { r_max });
    }
    let y3 = params.y3();
    let mut out = Vec::new();
    if let Some(z0) = detect_zero(params) {
        out.push(z0);
    }
    if let Some(ab) = find_antibound(params) {
        if ab.z.norm() < r_max {
            out.push(ab);
        }
    }
    if let Some((m, p)) = find_low_pair(params)? {
        for r in [m, p] {
            if r.z.norm() < r_max {
                out.push(r);
            }
        }
    }
    let k_first: i64 = match params.bc {
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Neumann => 0,
    };
    let ks: Vec<i64> = (k_first..)
        .take_while(|&k| branch_interval(params.bc, y3, k).map(|(lo, _)| lo < r_max).unwrap_or(false))
        .collect();
    let pairs: Result<Vec<_>, SolverError> =
        ks.par_iter().map(|&k| find_branch(params, k)).collect();
    for (m, p) in pairs? {
        for r in [m, p] {
            if r.z.norm() < r_max {
                out.push(r);
            }
        }
    }
    out.sort_by(|a, b| {
        (a.z.re, a.z.im)
            .partial_cmp(&(b.z.re, b.z.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// Counting report at radius R; solver and argument-principle counts must
/// agree exactly (the zero at the origin is added to the winding count of
/// the open lower half-disk).
pub fn count_exact(params: &ModelParams, r: f64) -> Result<CountReport, SolverError> {
    let list = find_all(params, r)?;
    let exact_count: i64 = list.iter().map(|r| r.multiplicity as i64).sum();
    let asymptotic_count = 2 * (params.y3() * r / PI - 0.25).floor() as i64;
    let zero_mult: i64 = detect_zero(params).map(|z| z.multiplicity as i64).unwrap_or(0);
    let winding = oracle::half_disk_count(params, r)?;
    let oracle_count = winding.count + zero_mult;
    if exact_count != oracle_count {
        return Err(SolverError::CountMismatch { exact: exact_count, oracle: oracle_count });
    }
    Ok(CountReport { radius: r, exact_count, asymptotic_count, oracle_count })
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("branch index {k} invalid for {bc}")]
    InvalidBranchIndex { bc: BoundaryCondition, k: i64 },
    #[error("no sign change bracketing branch {k} root in ({lo}, {hi})")]
    Bracketing { k: i64, lo: f64, hi: f64 },
    #[error("Newton polish stalled at z = {z} with residual {residual:.3e}")]
    PolishFailed { z: Complex64, residual: f64 },
    #[error("solver count {exact} != argument-principle count {oracle}")]
    CountMismatch { exact: i64, oracle: i64 },
    #[error("radius must be positive, got {r_max}")]
    InvalidRadius { r_max: f64 },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Model(#[from] ModelError),
}
