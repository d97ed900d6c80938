//! Multi-branch Lambert W evaluation together with the two-logarithm
//! asymptotic series whose coefficients are unsigned Stirling cycle numbers,
//! and the certified tail bound that controls its truncation error.
//!
//! Branch k follows the standard strip convention Im W ∈ ((2k−1)π, (2k+1)π]
//! away from the branch point. The series is exposed in two argument
//! conventions: `Odd` builds L₁ = ln w + (2k+1)iπ (solutions of x eˣ = −w)
//! and `Even` builds L₁ = ln w + 2kiπ (solutions of x eˣ = w). Log-domain
//! entry points accept ln w directly so the semiclassical scalings, where w
//! itself overflows f64, stay fully in range.

use num_bigint::BigUint;
use num_complex::Complex64;
use std::f64::consts::{E, PI};
use std::sync::OnceLock;
use thiserror::Error;

/// Hard cap on |k|; far beyond anything the resonance sweeps request.
pub const BRANCH_CAP: i64 = 1_000_000;

/// Largest index for which exact Stirling cycle numbers are tabulated.
pub const STIRLING_MAX: u32 = 64;

const MAX_SERIES_ORDER: usize = 24;

/// A branch value together with the defining-identity residual
/// |W eᵂ − w| / max(1, |w|).
#[derive(Debug, Clone, Copy)]
pub struct WValue {
    pub value: Complex64,
    pub residual: f64,
}

/// Which iπ multiples enter the series head: (2k+1)iπ (`Odd`, argument −w)
/// or 2kiπ (`Even`, argument +w).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignShift {
    Odd,
    Even,
}

/// First series term L₂/L₁ and the tail bound 2|L₂/L₁|², with the validity
/// flag |L₂/L₁| ≤ 1/2.
#[derive(Debug, Clone, Copy)]
pub struct SeriesTail {
    pub first_term: Complex64,
    pub bound: f64,
    pub valid: bool,
}

fn stirling_table() -> &'static Vec<Vec<BigUint>> {
    static TABLE: OnceLock<Vec<Vec<BigUint>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = STIRLING_MAX as usize + 1;
        let mut s = vec![vec![BigUint::ZERO; n + 1]; n + 1];
        s[0][0] = BigUint::from(1u32);
        for p in 0..n {
            for q in 0..=p + 1 {
                // s(p+1, q) = p s(p, q) + s(p, q-1)
                let mut v = BigUint::from(p) * &s[p][q];
                if q > 0 {
                    v += &s[p][q - 1];
                }
                s[p + 1][q] = v;
            }
        }
        s
    })
}

/// Unsigned Stirling number of the first kind: permutations of p objects
/// with q cycles, via s(p+1, q) = p·s(p, q) + s(p, q−1).
pub fn stirling_cycle(p: u32, q: u32) -> Result<BigUint, LambertError> {
    if p > STIRLING_MAX || q > STIRLING_MAX {
        return Err(LambertError::StirlingOutOfRange { p, q });
    }
    Ok(stirling_table()[p as usize][q as usize].clone())
}

/// c_{j,m} = (−1)ʲ/m! · s(j+m, j+1) for the two-logarithm series.
fn series_coefficient(j: usize, m: usize) -> f64 {
    static COEFFS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let c = COEFFS.get_or_init(|| {
        let table = stirling_table();
        let mut c = vec![vec![0.0; MAX_SERIES_ORDER + 1]; MAX_SERIES_ORDER + 1];
        let mut mfact = 1.0;
        for m in 1..=MAX_SERIES_ORDER {
            mfact *= m as f64;
            for j in 0..=MAX_SERIES_ORDER - m {
                let s: f64 = big_to_f64(&table[j + m][j + 1]);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                c[j][m] = sign * s / mfact;
            }
        }
        c
    });
    c[j][m]
}

fn big_to_f64(b: &BigUint) -> f64 {
    let mut v = 0.0f64;
    for d in b.to_u64_digits().iter().rev() {
        v = v * 2.0f64.powi(64) + *d as f64;
    }
    v
}

/// L₁ = ln w + (2k+1)iπ or ln w + 2kiπ, from the log of w.
pub fn series_l1(k: i64, ln_w: Complex64, shift: SignShift) -> Complex64 {
    let mult = match shift {
        SignShift::Odd => 2 * k + 1,
        SignShift::Even => 2 * k,
    };
    ln_w + Complex64::new(0.0, mult as f64 * PI)
}

/// The correction series R_k = Σ c_{j,m} L₂ᵐ / L₁^{j+m} over j + m ≤ terms.
fn series_tail(l1: Complex64, terms: usize) -> Complex64 {
    let l2 = l1.ln();
    let inv_l1 = 1.0 / l1;
    let ratio = l2 * inv_l1;
    let mut acc = Complex64::new(0.0, 0.0);
    for total in 1..=terms.min(MAX_SERIES_ORDER) {
        // sum over j + m = total of c_{j,m} (L2/L1)^m (1/L1)^j, ascending m
        let mut term = Complex64::new(0.0, 0.0);
        let mut ratio_pow = Complex64::new(1.0, 0.0);
        for m in 1..=total {
            ratio_pow *= ratio;
            let j = total - m;
            term += series_coefficient(j, m) * ratio_pow * pow_int(inv_l1, j);
        }
        acc += term;
    }
    acc
}

fn pow_int(base: Complex64, n: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut b = base;
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc *= b;
        }
        b *= b;
        n >>= 1;
    }
    acc
}

/// −L₂ + R_k(terms): the series with its leading L₁ removed, for callers
/// that need the offset W − ln w without forming the cancellation.
pub(crate) fn correction_from_l1(l1: Complex64, terms: usize) -> Complex64 {
    -l1.ln() + series_tail(l1, terms)
}

/// Two-logarithm series for the k-branch solution: L₁ − L₂ + R_k(terms).
/// `Odd` approximates W_k(−w), `Even` approximates W_k(w).
pub fn w_series(
    k: i64,
    w: Complex64,
    shift: SignShift,
    terms: usize,
) -> Result<Complex64, LambertError> {
    check_branch(k)?;
    w_series_from_log(k, w.ln(), shift, terms)
}

/// Same as [`w_series`] but taking ln w directly (w itself may overflow).
pub fn w_series_from_log(
    k: i64,
    ln_w: Complex64,
    shift: SignShift,
    terms: usize,
) -> Result<Complex64, LambertError> {
    check_branch(k)?;
    let l1 = series_l1(k, ln_w, shift);
    let l2 = l1.ln();
    let q = (l2 / l1).norm();
    if q > 0.5 {
        return Err(LambertError::OutsideValidity { ratio: q });
    }
    Ok(l1 - l2 + series_tail(l1, terms))
}

/// First tail term and Lemma-grade bound 2|L₂/L₁|² for the series remainder
/// past the (0,1) term, with the |L₂/L₁| ≤ 1/2 validity flag.
pub fn remainder_bound(k: i64, w: Complex64, shift: SignShift) -> SeriesTail {
    remainder_bound_from_log(k, w.ln(), shift)
}

/// Log-domain variant of [`remainder_bound`].
pub fn remainder_bound_from_log(k: i64, ln_w: Complex64, shift: SignShift) -> SeriesTail {
    let l1 = series_l1(k, ln_w, shift);
    let ratio = l1.ln() / l1;
    let q = ratio.norm();
    SeriesTail { first_term: ratio, bound: 2.0 * q * q, valid: q <= 0.5 }
}

/// Numeric majorant for the series tail past total order `terms`:
/// Σ_{j+m > terms} |c_{j,m}| |L₂|ᵐ/|L₁|^{j+m}, summed explicitly up to
/// order 24 with a geometric estimate beyond.
pub fn series_tail_majorant(l1: Complex64, terms: usize) -> f64 {
    let l2n = l1.ln().norm();
    let inv = 1.0 / l1.norm();
    let mut orders = Vec::new();
    for total in terms + 1..=MAX_SERIES_ORDER {
        let mut t = 0.0;
        for m in 1..=total {
            let j = total - m;
            t += series_coefficient(j, m).abs() * l2n.powi(m as i32) * inv.powi(total as i32);
        }
        orders.push(t);
    }
    let sum: f64 = orders.iter().sum();
    let tail_ratio = match orders.len() {
        0 | 1 => 0.5,
        n => (orders[n - 1] / orders[n - 2]).min(0.9),
    };
    sum + orders.last().copied().unwrap_or(0.0) * tail_ratio / (1.0 - tail_ratio)
}

fn check_branch(k: i64) -> Result<(), LambertError> {
    if k.abs() > BRANCH_CAP {
        return Err(LambertError::BranchOutOfRange { k });
    }
    Ok(())
}

/// Lambert W on branch k at complex argument w: W eᵂ = w with the standard
/// branch labeling. Halley iteration from a region-matched initial guess.
pub fn lambert_w(k: i64, w: Complex64) -> Result<WValue, LambertError> {
    check_branch(k)?;
    if w == Complex64::new(0.0, 0.0) {
        if k == 0 {
            return Ok(WValue { value: w, residual: 0.0 });
        }
        return Err(LambertError::ZeroArgument { k });
    }
    let guess = initial_guess(k, w);
    refine(k, w, guess)
}

/// Branch-k solution of x eˣ = −e^{ln_w} (`Odd`) or x eˣ = e^{ln_w} (`Even`)
/// for real ln_w of any magnitude, via Newton on W + ln W = L₁.
///
/// Requires |Im L₁| ≥ π/2 (all k for `Odd`; k ≠ 0 for `Even`) so the branch
/// anchor is unambiguous, plus the Lemma-validity |L₂/L₁| ≤ 1/2.
pub fn lambert_w_from_log(k: i64, ln_w: f64, shift: SignShift) -> Result<WValue, LambertError> {
    check_branch(k)?;
    let l1 = series_l1(k, Complex64::new(ln_w, 0.0), shift);
    if l1.im.abs() < PI / 2.0 {
        return Err(LambertError::AmbiguousBranchAnchor { k });
    }
    let l2 = l1.ln();
    if (l2 / l1).norm() > 0.5 {
        return Err(LambertError::OutsideValidity { ratio: (l2 / l1).norm() });
    }
    let mut w_val = l1 - l2 + series_tail(l1, 8);
    // at the root ln W sits on the branch of ln(L1); anchoring by the head's
    // own argument can land on the wrong side of the ±π seam
    let anchor = l1.arg();
    let mut res = f64::MAX;
    for _ in 0..60 {
        let lnw_anchored = Complex64::new(w_val.norm().ln(), arg_near(w_val, anchor));
        let g = w_val + lnw_anchored - l1;
        res = ((g.exp()) - 1.0).norm();
        if res <= 1e-15 {
            break;
        }
        // Newton on g(W) = W + ln W − L₁, g' = 1 + 1/W
        let step = g * w_val / (w_val + 1.0);
        w_val -= step;
    }
    if res > 1e-13 {
        return Err(LambertError::NonConvergence { k, residual: res });
    }
    Ok(WValue { value: w_val, residual: res })
}

/// Principal argument shifted by whole turns to land within π of `anchor`.
fn arg_near(z: Complex64, anchor: f64) -> f64 {
    let mut a = z.arg();
    while a - anchor > PI {
        a -= 2.0 * PI;
    }
    while anchor - a > PI {
        a += 2.0 * PI;
    }
    a
}

fn initial_guess(k: i64, w: Complex64) -> Complex64 {
    let branch_dist = (w + 1.0 / E).norm();
    // disk radius 0.25 keeps the origin out: near w = 0 the k = -1 branch
    // runs off to -infinity and the p-series would seed the wrong root
    if (k == 0 || k == -1) && branch_dist < 0.25 {
        // expansion around the branch point w = -1/e
        let p = (2.0 * (E * w + 1.0)).sqrt();
        let p = if k == 0 { p } else { -p };
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    if k == 0 && w.norm() < 0.35 {
        // principal branch is tangent to the identity at the origin
        return w * (1.0 - w);
    }
    if k == -1 && w.im == 0.0 && w.re < 0.0 && w.re > -1.0 / E {
        // real branch W_{-1} on (-1/e, 0)
        let l = w.re.abs().ln();
        return Complex64::new(l - (-l).max(1e-10).ln(), 0.0);
    }
    let l1 = w.ln() + Complex64::new(0.0, 2.0 * PI * k as f64);
    if k == 0 && l1.norm() < 2.0 {
        // moderate principal region; w stays away from -1 here
        return (1.0 + w).ln();
    }
    l1 - l1.ln()
}

fn refine(k: i64, w: Complex64, guess: Complex64) -> Result<WValue, LambertError> {
    let mut w_val = guess;
    let big = w.norm() > 1e300;
    // far from the origin the log-form Newton is immune to the flat
    // e^W ≈ 0 region where Halley limit-cycles
    let prefer_log = guess.norm() >= 4.0;
    let mut best = (w_val, f64::MAX);
    for _ in 0..50 {
        let res = residual(k, w, w_val);
        if res < best.1 {
            best = (w_val, res);
        }
        if res <= 1e-15 {
            break;
        }
        let step = if !big && w_val.re.abs() < 600.0 && !(prefer_log && w_val.norm() > 2.0) {
            // Halley on f(W) = W e^W − w
            let ew = w_val.exp();
            let f = w_val * ew - w;
            let w1 = w_val + 1.0;
            let denom = ew * w1 - (w_val + 2.0) * f / (2.0 * w1);
            if denom.norm() == 0.0 {
                break;
            }
            f / denom
        } else {
            // log-domain Newton, anchored at the current argument
            let lnw_anchored = Complex64::new(w_val.norm().ln(), w_val.arg());
            let delta = w_val + lnw_anchored - w.ln();
            let k_eff = (delta.im / (2.0 * PI)).round();
            let g = delta - Complex64::new(0.0, 2.0 * PI * k_eff);
            g * w_val / (w_val + 1.0)
        };
        // damp runaway steps (e^W underflow makes the raw Halley step blow up)
        let cap = 0.5 * (1.0 + w_val.norm());
        w_val -= if step.norm() > cap { step * (cap / step.norm()) } else { step };
        if !w_val.is_finite() {
            w_val = best.0;
            break;
        }
    }
    let res = residual(k, w, w_val).min(best.1);
    let w_val = if residual(k, w, w_val) <= best.1 { w_val } else { best.0 };
    if res > 1e-13 {
        return Err(LambertError::NonConvergence { k, residual: res });
    }
    Ok(WValue { value: w_val, residual: res })
}

/// Defining-identity residual |W eᵂ − w| / max(1, |w|), computed in the log
/// domain when the direct product would overflow.
fn residual(_k: i64, w: Complex64, w_val: Complex64) -> f64 {
    if w_val.re.abs() < 600.0 && w.norm() < 1e300 {
        (w_val * w_val.exp() - w).norm() / w.norm().max(1.0)
    } else {
        let delta = w_val + w_val.ln() - w.ln();
        let k_eff = (delta.im / (2.0 * PI)).round();
        let d = delta - Complex64::new(0.0, 2.0 * PI * k_eff);
        let rel = (d.exp() - 1.0).norm();
        if w.norm() >= 1.0 {
            rel
        } else {
            rel * w.norm()
        }
    }
}

#[derive(Debug, Error)]
pub enum LambertError {
    #[error("branch index {k} beyond cap")]
    BranchOutOfRange { k: i64 },
    #[error("Stirling index out of range: ({p}, {q})")]
    StirlingOutOfRange { p: u32, q: u32 },
    #[error("w = 0 has no finite value on branch {k}")]
    ZeroArgument { k: i64 },
    #[error("outside series validity region: |L2/L1| = {ratio:.3}")]
    OutsideValidity { ratio: f64 },
    #[error("branch anchor ambiguous for k = {k} (Im L1 too small)")]
    AmbiguousBranchAnchor { k: i64 },
    #[error("no convergence on branch {k}, residual {residual:.3e}")]
    NonConvergence { k: i64, residual: f64 },
}
