//! Independent verification tools: argument-principle zero counting over
//! rectangles and half-disks, adaptive contour quadrature, and bracketed 1D
//! root-finding.
//!
//! Everything here is deliberately decoupled from the solver's search
//! strategy so that agreement between the two pipelines is a genuine
//! consistency check and not a tautology.

use crate::model::{
    gamma, gamma_derivative, gamma_log_derivative, gamma_scale, ModelParams, Point,
};
use crate::quad;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Axis-aligned rectangle in the z-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rectangle {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, OracleError> {
        if !(re_min < re_max && im_min < im_max) {
            return Err(OracleError::InvalidRectangle { re_min, re_max, im_min, im_max });
        }
        Ok(Rectangle { re_min, re_max, im_min, im_max })
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn translated(&self, d: Complex64) -> Rectangle {
        Rectangle {
            re_min: self.re_min + d.re,
            re_max: self.re_max + d.re,
            im_min: self.im_min + d.im,
            im_max: self.im_max + d.im,
        }
    }
}

/// Outcome of a winding-number count: rounded count, raw contour value of
/// (1/2πi)∮ Γ'/Γ, and whether the rounding is trustworthy.
#[derive(Debug, Clone, Copy)]
pub struct WindingResult {
    pub count: i64,
    pub raw: Complex64,
    pub certified: bool,
}

const BOUNDARY_SAMPLES: usize = 1024;
const NUDGE: f64 = 1e-5;
const MAX_NUDGES: usize = 5;
// panel tolerance: 1e-3 of the 0.1 certification budget, in winding units
const WINDING_TOL: f64 = 1e-4;

/// Minimum clearance between a simple zero and the integration contour.
/// Closer passes amplify the cancellation noise of Γ'/Γ beyond what the
/// panel subdivision can resolve.
const ZERO_CLEARANCE: f64 = 5e-6;

/// Newton refinement towards a zero of Γ from a boundary sample. Returns
/// its position when one is reached; the double zero at the origin under
/// critical coupling deliberately fails the convergence test (its winding
/// contribution is benign at the 1e−6 chord offset).
fn locate_zero_near(params: &ModelParams, seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..12 {
        let g = gamma(params, z);
        if !g.is_finite() {
            return None;
        }
        if g.norm() <= 1e-12 * gamma_scale(params, z) {
            return Some(z);
        }
        let d = gamma_derivative(params, z);
        if !d.is_finite() || d.norm() == 0.0 {
            return None;
        }
        z -= g / d;
        if !z.is_finite() {
            return None;
        }
    }
    (gamma(params, z).norm() <= 1e-11 * gamma_scale(params, z)).then_some(z)
}

fn dist_to_segment(z: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (z - a).norm();
    }
    let t = ((z - a).re * ab.re + (z - a).im * ab.im) / len2;
    (z - (a + ab * t.clamp(0.0, 1.0))).norm()
}

fn certify(raw: Complex64) -> WindingResult {
    let count = raw.re.round();
    let certified = (raw - Complex64::new(count, 0.0)).norm() < 0.1 && count >= 0.0;
    WindingResult { count: count as i64, raw, certified }
}

/// Number of zeros of Γ inside `rect`, counted with multiplicity via the
/// argument principle.
///
/// Boundary safety: 1024 boundary samples must keep |Γ| above 1e−8·scale,
/// otherwise the rectangle is nudged diagonally by 1e−5 (at most 5 times).
pub fn winding_count(params: &ModelParams, rect: &Rectangle) -> Result<WindingResult, OracleError> {
    let mut r = *rect;
    'nudge: for attempt in 0..=MAX_NUDGES {
        let corners = r.corners();
        let perimeter: f64 = (0..4).map(|i| (corners[(i + 1) % 4] - corners[i]).norm()).sum();
        let spacing = perimeter / BOUNDARY_SAMPLES as f64;
        for i in 0..4 {
            let a = corners[i];
            let b = corners[(i + 1) % 4];
            let n = ((b - a).norm() / spacing).ceil().max(2.0) as usize;
            for j in 0..=n {
                let z = a + (b - a) * (j as f64 / n as f64);
                let ld = gamma_log_derivative(params, z).norm();
                if !ld.is_finite() || 1.0 >= ld * (1.5 * spacing) {
                    continue;
                }
                // a zero may hide within a sample spacing: pin it down and
                // measure its true clearance from the boundary
                let Some(zero) = locate_zero_near(params, z) else { continue };
                let dist = (0..4)
                    .map(|e| dist_to_segment(zero, corners[e], corners[(e + 1) % 4]))
                    .fold(f64::MAX, f64::min);
                if dist < ZERO_CLEARANCE {
                    if attempt == MAX_NUDGES {
                        return Err(OracleError::BoundaryZero { z: zero });
                    }
                    r = r.translated(Complex64::new(NUDGE, NUDGE));
                    continue 'nudge;
                }
            }
        }
        let raw = winding_integral(params, &r)?;
        let res = certify(raw);
        if !res.certified {
            return Err(OracleError::NotCertified { raw });
        }
        return Ok(res);
    }
    unreachable!()
}

fn winding_integral(params: &ModelParams, r: &Rectangle) -> Result<Complex64, OracleError> {
    let corners = r.corners();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        let a = corners[i];
        let b = corners[(i + 1) % 4];
        total += edge_log_derivative(params, a, b)?;
    }
    Ok(total / Complex64::new(0.0, 2.0 * PI))
}

/// ∫ Γ'/Γ dz along the segment a → b, with panel density matched to the
/// e^{2i y₃ z} oscillation.
fn edge_log_derivative(
    params: &ModelParams,
    a: Complex64,
    b: Complex64,
) -> Result<Complex64, OracleError> {
    let len = (b - a).norm();
    let periods = params.y3() * len / PI;
    let n0 = (4.0 * periods).ceil().max(64.0) as usize;
    let f = |t: f64| {
        let z = a + (b - a) * t;
        gamma_log_derivative(params, z) * (b - a)
    };
    let (v, err) = quad::adaptive_panels(&f, 0.0, 1.0, n0, WINDING_TOL * 2.0 * PI / 4.0);
    if !v.is_finite() {
        return Err(OracleError::QuadratureBudget { err });
    }
    Ok(v)
}

/// Zeros of Γ with multiplicity in the open lower half-disk
/// { |z| < radius, Im z < −1e−6 }.
///
/// The contour is the chord at Im z = −1e−6 plus the lower circular arc, so
/// a zero at the origin (critical coupling) is never enclosed; combine with
/// `solver::detect_zero` for the full count.
pub fn half_disk_count(params: &ModelParams, radius: f64) -> Result<WindingResult, OracleError> {
    let eps = 1e-6;
    let mut rad = radius;
    'retry: for attempt in 0..=MAX_NUDGES {
        let xc = (rad * rad - eps * eps).sqrt();
        // positively oriented boundary: chord right-to-left, then the lower
        // arc from just above -pi up through -pi/2 to just below 0
        let th_a = (-eps).atan2(-xc);
        let th_b = (-eps).atan2(xc);
        let sweep = th_b - th_a;
        let chord_a = Complex64::new(xc, -eps);
        let chord_b = Complex64::new(-xc, -eps);
        let n = BOUNDARY_SAMPLES / 2;
        let spacing = (2.0 * xc + sweep.abs() * rad) / (2 * n) as f64;
        let clearance = |zero: Complex64| -> f64 {
            let to_chord = dist_to_segment(zero, chord_a, chord_b);
            let to_arc = if zero.im <= 0.0 { (zero.norm() - rad).abs() } else { f64::MAX };
            to_chord.min(to_arc)
        };
        for j in 0..=n {
            let z_chord = Complex64::new(xc - 2.0 * xc * j as f64 / n as f64, -eps);
            let z_arc = Complex64::from_polar(rad, th_a + sweep * j as f64 / n as f64);
            for z in [z_chord, z_arc] {
                let ld = gamma_log_derivative(params, z).norm();
                if !ld.is_finite() || 1.0 >= ld * (1.5 * spacing) {
                    continue;
                }
                let Some(zero) = locate_zero_near(params, z) else { continue };
                if clearance(zero) < ZERO_CLEARANCE {
                    if attempt == MAX_NUDGES {
                        return Err(OracleError::BoundaryZero { z: zero });
                    }
                    rad += NUDGE;
                    continue 'retry;
                }
            }
        }
        let chord = edge_log_derivative(
            params,
            Complex64::new(xc, -eps),
            Complex64::new(-xc, -eps),
        )?;
        let periods = params.y3() * rad; // arc length pi*rad over wavelength pi/y3
        let n0 = (4.0 * periods).ceil().max(128.0) as usize;
        let f = |t: f64| {
            let th = th_a + sweep * t;
            let z = Complex64::from_polar(rad, th);
            let dz = Complex64::new(0.0, sweep) * z;
            gamma_log_derivative(params, z) * dz
        };
        let (arc, err) = quad::adaptive_panels(&f, 0.0, 1.0, n0, WINDING_TOL * 2.0 * PI / 2.0);
        if !arc.is_finite() {
            return Err(OracleError::QuadratureBudget { err });
        }
        let raw = (chord + arc) / Complex64::new(0.0, 2.0 * PI);
        let res = certify(raw);
        if !res.certified {
            return Err(OracleError::NotCertified { raw });
        }
        return Ok(res);
    }
    unreachable!()
}

/// Bracketed bisection: root of `f` in [lo, hi] to 1e−14·max(1, |root|).
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64, OracleError> {
    let (mut lo, mut hi) = (lo, hi);
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(OracleError::NoSignChange { lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A contour made of straight segments and circular arcs.
#[derive(Debug, Clone)]
pub enum PathSegment {
    Line { from: Complex64, to: Complex64 },
    /// Arc of |z − center| = radius from angle_from to angle_to (radians,
    /// traversed monotonically).
    Arc { center: Complex64, radius: f64, angle_from: f64, angle_to: f64 },
}

/// Adaptive quadrature of an analytic `f` along the path; error estimate is
/// driven below 1e−11·(1 + |value|).
pub fn contour_integral<F: Fn(Complex64) -> Complex64>(
    f: &F,
    path: &[PathSegment],
) -> Result<Complex64, OracleError> {
    let mut tol_abs = 1e-11;
    for _ in 0..3 {
        let mut value = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for seg in path {
            let (v, e) = match *seg {
                PathSegment::Line { from, to } => {
                    let g = |t: f64| f(from + (to - from) * t) * (to - from);
                    quad::adaptive_panels(&g, 0.0, 1.0, 16, tol_abs / path.len() as f64)
                }
                PathSegment::Arc { center, radius, angle_from, angle_to } => {
                    let sweep = angle_to - angle_from;
                    let g = |t: f64| {
                        let th = angle_from + sweep * t;
                        let z = center + Complex64::from_polar(radius, th);
                        f(z) * Complex64::new(0.0, sweep) * Complex64::from_polar(radius, th)
                    };
                    let n0 = (8.0 * sweep.abs()).ceil().max(16.0) as usize;
                    quad::adaptive_panels(&g, 0.0, 1.0, n0, tol_abs / path.len() as f64)
                }
            };
            value += v;
            err += e;
        }
        if !value.is_finite() {
            return Err(OracleError::QuadratureBudget { err });
        }
        let target = 1e-11 * (1.0 + value.norm());
        if err <= target {
            return Ok(value);
        }
        tol_abs = 0.5 * target;
    }
    Err(OracleError::QuadratureBudget { err: f64::NAN })
}

/// Circle path around `center`, counterclockwise.
pub fn circle(center: Complex64, radius: f64) -> Vec<PathSegment> {
    vec![PathSegment::Arc { center, radius, angle_from: 0.0, angle_to: 2.0 * PI }]
}

/// Direct rotated-contour evaluation of the resolvent-difference part of the
/// Schrödinger propagator kernel:
///
/// (1/2πi) ∫₀^∞ e^{−itz²} (R̂(z) − R̂(−z))(x, x') 2z dz,
///
/// computed as real segment [0, R₀] plus the arc of radius R₀ swinging down
/// to −π/4 (by Cauchy's theorem the neglected ray tail and residues beyond
/// R₀ decay like e^{−tR₀²}). Shares no code with the residue expansion in
/// `expansion`: quadrature runs on raw Γ and Green evaluations only.
pub fn schrodinger_direct(
    params: &ModelParams,
    t: f64,
    x: &Point,
    xp: &Point,
) -> Result<Complex64, OracleError> {
    let y3 = params.y3();
    let y = params.y();
    let dists = [x.dist(&y), x.dist(&y.reflected()), xp.dist(&y), xp.dist(&y.reflected())];
    let rhat = |z: Complex64| -> Complex64 {
        let g = gamma(params, z);
        let s = params.bc.image_sign();
        let gx = (Complex64::new(0.0, dists[0]) * z).exp() / (4.0 * PI * dists[0])
            + s * (Complex64::new(0.0, dists[1]) * z).exp() / (4.0 * PI * dists[1]);
        let gxp = (Complex64::new(0.0, dists[2]) * z).exp() / (4.0 * PI * dists[2])
            + s * (Complex64::new(0.0, dists[3]) * z).exp() / (4.0 * PI * dists[3]);
        gx * gxp / g
    };
    let integrand = |z: Complex64| -> Complex64 {
        let mit = Complex64::new(0.0, -t);
        (mit * z * z).exp() * (rhat(z) - rhat(-z)) * 2.0 * z
    };
    // radius on a gap of the resonance ladder, scanned for margin from zeros
    let base = (14.0 * y3 / PI).ceil().max(4.0);
    let mut best = (f64::MIN, 0.0);
    for m in 0..4 {
        let r0 = (2.0 * (base + m as f64) + 1.5) * PI / (2.0 * y3);
        let mut min_rel = f64::MAX;
        for j in 0..256 {
            let th = -PI / 4.0 * j as f64 / 255.0;
            let z = Complex64::from_polar(r0, th);
            min_rel = min_rel.min(gamma(params, z).norm() / gamma_scale(params, z));
        }
        if min_rel > best.0 {
            best = (min_rel, r0);
        }
    }
    let r0 = best.1;
    if best.0 < 1e-6 {
        return Err(OracleError::BoundaryZero { z: Complex64::new(r0, 0.0) });
    }
    // oscillation scale: phase t z^2 + z * max distance
    let cycles = (t * r0 * r0 + r0 * (dists[0] + dists[2])) / (2.0 * PI) + 2.0 * y3 * r0;
    let n0 = (8.0 * cycles).ceil() as usize;
    let seg = |s: f64| integrand(Complex64::new(s, 0.0));
    let (real_part, e1) = quad::adaptive_panels(&seg, 0.0, r0, n0.max(64), 1e-12);
    let arc = |u: f64| {
        let th = -PI / 4.0 * u;
        let z = Complex64::from_polar(r0, th);
        integrand(z) * Complex64::new(0.0, -PI / 4.0) * z
    };
    let (arc_part, e2) = quad::adaptive_panels(&arc, 0.0, 1.0, n0.max(64), 1e-12);
    let total = (real_part + arc_part) / Complex64::new(0.0, 2.0 * PI);
    if !total.is_finite() || e1 + e2 > 1e-8 {
        return Err(OracleError::QuadratureBudget { err: e1 + e2 });
    }
    Ok(total)
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("invalid rectangle [{re_min},{re_max}]x[{im_min},{im_max}]")]
    InvalidRectangle { re_min: f64, re_max: f64, im_min: f64, im_max: f64 },
    #[error("zero of Γ too close to the contour near z = {z}")]
    BoundaryZero { z: Complex64 },
    #[error("winding value {raw} not within certification margin of an integer")]
    NotCertified { raw: Complex64 },
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("quadrature failed to meet its error budget (estimate {err:.3e})")]
    QuadratureBudget { err: f64 },
}
