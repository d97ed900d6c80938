//! Residue calculus at resonances and the resonance expansions: the
//! wave-equation coefficients f_j and the Schrödinger propagator kernel as
//! free term + residue sum over the wedge −π/4 < Arg z < 0 + background
//! Laplace-type integral along the rotated ray.
//!
//! The residue sum enters the kernel with the sign fixed by the contour
//! orientation of the wedge (right-to-left along the real axis bounds the
//! region positively), which an independent rotated-contour quadrature
//! confirms numerically; see `oracle::schrodinger_direct`.

use crate::model::{
    gamma, gamma_derivative, gamma_scale, green_at_interaction, BoxRegion, ModelError,
    ModelParams, Point,
};
use crate::oracle::OracleError;
use crate::quad;
use crate::solver::{self, SolverError};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Compactly supported smooth bump used as wave-equation data.
#[derive(Debug, Clone, Copy)]
pub struct TestFunction {
    pub center: Point,
    pub width: f64,
    pub amplitude: f64,
    pub support: BoxRegion,
}

impl TestFunction {
    /// Gaussian bump exp(−|x−center|²/(2 width²)) restricted to `support`.
    ///
    /// The support box must sit strictly inside the open half-space and keep
    /// a ball of radius 10% of its diagonal clear around the interaction
    /// point, so the Green-function integrand stays smooth.
    pub fn gaussian(
        center: Point,
        width: f64,
        support: BoxRegion,
        y: &Point,
    ) -> Result<Self, ExpansionError> {
        if !(width > 0.0) {
            return Err(ExpansionError::InvalidTestFunction("width must be positive".into()));
        }
        if support.lo.x3() <= 0.0 {
            return Err(ExpansionError::InvalidTestFunction(
                "support box must satisfy x3 > 0".into(),
            ));
        }
        let r_excl = 0.1 * support.diagonal();
        if support.distance_to(y) < r_excl {
            return Err(ExpansionError::InvalidTestFunction(format!(
                "support box comes within {r_excl:.3} of the interaction point"
            )));
        }
        Ok(TestFunction { center, width, amplitude: 1.0, support })
    }

    /// The same bump rescaled by `c`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    pub fn value(&self, x: &Point) -> f64 {
        let d = x.dist(&self.center);
        self.amplitude * (-d * d / (2.0 * self.width * self.width)).exp()
    }
}

/// ⟨G_{z,y}, w⟩ = ∫ G_{z,y}(x') w(x') dx' by tensor Gauss–Legendre over the
/// support box (32³ nodes, Richardson error estimate against 16³).
pub fn green_inner_product(
    params: &ModelParams,
    z: Complex64,
    w: &TestFunction,
) -> Result<Complex64, ExpansionError> {
    let fine = tensor_integral(params, z, w, quad::gl32());
    let coarse = tensor_integral(params, z, w, &crate::quad::legendre_rule(16));
    let err = (fine - coarse).norm();
    if err > 1e-9 * (1.0 + fine.norm()) {
        return Err(ExpansionError::QuadratureNonConvergence { estimate: err });
    }
    Ok(fine)
}

fn tensor_integral(
    params: &ModelParams,
    z: Complex64,
    w: &TestFunction,
    rule: &[(f64, f64)],
) -> Complex64 {
    let (lo, hi) = (w.support.lo, w.support.hi);
    let mid = [0.5 * (lo.0[0] + hi.0[0]), 0.5 * (lo.0[1] + hi.0[1]), 0.5 * (lo.0[2] + hi.0[2])];
    let half = [0.5 * (hi.0[0] - lo.0[0]), 0.5 * (hi.0[1] - lo.0[1]), 0.5 * (hi.0[2] - lo.0[2])];
    let jac = half[0] * half[1] * half[2];
    let mut acc = Complex64::new(0.0, 0.0);
    for &(xi, wi) in rule {
        let x1 = mid[0] + half[0] * xi;
        for &(xj, wj) in rule {
            let x2 = mid[1] + half[1] * xj;
            let mut inner = Complex64::new(0.0, 0.0);
            for &(xk, wk) in rule {
                let x3 = mid[2] + half[2] * xk;
                let p = Point::new(x1, x2, x3);
                let g = green_at_interaction(params, z, &p).expect("support excludes y");
                inner += wk * g * w.value(&p);
            }
            acc += wi * wj * inner;
        }
    }
    acc * jac
}

/// Residue of Γ⁻¹ at a simple zero: 1/Γ'(z_n).
pub fn residue_gamma_inv(params: &ModelParams, z_n: Complex64) -> Result<Complex64, ExpansionError> {
    if gamma(params, z_n).norm() > 1e-10 * gamma_scale(params, z_n) {
        return Err(ExpansionError::NotAZero { z: z_n });
    }
    let d = gamma_derivative(params, z_n);
    let dscale = (1.0 + (-2.0 * params.y3() * z_n.im).exp()) / (4.0 * PI);
    if d.norm() < 1e-8 * dscale {
        return Err(ExpansionError::NonSimpleZero { z: z_n });
    }
    Ok(1.0 / d)
}

/// Dirichlet closed form for the residue: 4πi/(1 − e^{2i y₃ z_n}); equal to
/// 1/Γ'(z_n) by direct differentiation.
pub fn residue_closed_form_dirichlet(params: &ModelParams, z_n: Complex64) -> Complex64 {
    let e = (Complex64::new(0.0, 2.0 * params.y3()) * z_n).exp();
    Complex64::new(0.0, 4.0 * PI) / (1.0 - e)
}

/// Wave-expansion coefficient f_j sampled on `grid`:
/// f_j(x) = −Res(Γ⁻¹; z_j) · [i⟨G_{z_j,y}, w₁⟩ + z_j⟨G_{z_j,y}, w₀⟩] · G_{z_j,y}(x).
/// The free-resolvent part is entire in z and contributes no residue.
pub fn wave_coefficient_fj(
    params: &ModelParams,
    z_j: Complex64,
    w0: Option<&TestFunction>,
    w1: Option<&TestFunction>,
    grid: &[Point],
) -> Result<Vec<Complex64>, ExpansionError> {
    let res = residue_gamma_inv(params, z_j)?;
    let mut data = Complex64::new(0.0, 0.0);
    if let Some(w1) = w1 {
        data += Complex64::new(0.0, 1.0) * green_inner_product(params, z_j, w1)?;
    }
    if let Some(w0) = w0 {
        data += z_j * green_inner_product(params, z_j, w0)?;
    }
    let coeff = -res * data;
    grid.iter()
        .map(|x| Ok(coeff * green_at_interaction(params, z_j, x)?))
        .collect()
}

/// One residue-sum term of the kernel expansion.
#[derive(Debug, Clone, Copy)]
pub struct ExpansionTerm {
    pub z_n: Complex64,
    pub residue: Complex64,
    pub green_x: Complex64,
    pub green_xp: Complex64,
}

/// The assembled kernel expansion: total = free_term + residue_sum
/// + background, each stored with the sign it contributes.
#[derive(Debug, Clone, Copy)]
pub struct KernelExpansion {
    pub free_term: Complex64,
    pub residue_sum: Complex64,
    pub background: Complex64,
    pub total: Complex64,
}

/// Free propagator term (2πit)^{−3/2} e^{i|x−x'|²/(2t)}.
pub fn free_term(t: f64, x: &Point, xp: &Point) -> Complex64 {
    let r = x.dist(xp);
    Complex64::new(0.0, 2.0 * PI * t).powf(-1.5) * Complex64::new(0.0, r * r / (2.0 * t)).exp()
}

/// Resonances entering the wedge sum (−π/4 < Arg z < 0, up to the branch
/// n_max radius), with their residues and Green factors. Terms whose
/// argument sits within 1e−9 of the wedge boundary are excluded.
pub fn expansion_terms(
    params: &ModelParams,
    x: &Point,
    xp: &Point,
    n_max: usize,
) -> Result<Vec<ExpansionTerm>, ExpansionError> {
    let radius = (n_max as f64 + 1.0) * PI / params.y3();
    let mut terms = Vec::new();
    for r in solver::find_all(params, radius)? {
        let arg = r.z.arg();
        if (arg + PI / 4.0).abs() < 1e-9 || arg.abs() < 1e-12 {
            continue;
        }
        if arg <= -PI / 4.0 || arg >= 0.0 {
            continue;
        }
        let residue = residue_gamma_inv(params, r.z)?;
        terms.push(ExpansionTerm {
            z_n: r.z,
            residue,
            green_x: green_at_interaction(params, r.z, x)?,
            green_xp: green_at_interaction(params, r.z, xp)?,
        });
    }
    // deterministic summation order: by modulus, then by sign of Re z
    terms.sort_by(|a, b| {
        (a.z_n.norm(), a.z_n.re)
            .partial_cmp(&(b.z_n.norm(), b.z_n.re))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(terms)
}

/// Residue expansion of the Schrödinger propagator kernel at time t.
///
/// Valid for t > t₀ = (√2/2)(|x−y| + |x'−y|)/r_min with r_min the smallest
/// resonance modulus in the wedge, and away from the critical coupling.
pub fn schrodinger_kernel(
    params: &ModelParams,
    t: f64,
    x: &Point,
    xp: &Point,
    n_max: usize,
) -> Result<KernelExpansion, ExpansionError> {
    if params.is_critical() {
        return Err(ExpansionError::CriticalAlpha { alpha: params.alpha });
    }
    let terms = expansion_terms(params, x, xp, n_max)?;
    let y = params.y();
    if let Some(r_min) = terms.iter().map(|t| t.z_n.norm()).reduce(f64::min) {
        let t0 = (0.5f64).sqrt() * (x.dist(&y) + xp.dist(&y)) / r_min;
        if t <= t0 {
            return Err(ExpansionError::TimeTooSmall { t, t0 });
        }
    }
    // wedge orientation: the residue sum contributes with a minus sign
    let mut residue_sum = Complex64::new(0.0, 0.0);
    for term in &terms {
        let phase = (Complex64::new(0.0, -t) * term.z_n * term.z_n).exp();
        residue_sum -= 2.0 * term.z_n * phase * term.residue * term.green_x * term.green_xp;
    }
    let background = background_integral(params, t, x, xp)?;
    let free = free_term(t, x, xp);
    Ok(KernelExpansion {
        free_term: free,
        residue_sum,
        background,
        total: free + residue_sum + background,
    })
}

/// Background Laplace-type integral along the rotated ray,
/// −(1/2π)∫₀^∞ (R̂(e^{−iπ/4}√s) − R̂(−e^{−iπ/4}√s)) e^{−ts} ds,
/// with R̂(z) = Γ⁻¹(z) G_{z,y}(x) G_{z,y}(x').
pub fn background_integral(
    params: &ModelParams,
    t: f64,
    x: &Point,
    xp: &Point,
) -> Result<Complex64, ExpansionError> {
    background_integral_with_ray(params, t, x, xp, 0.0)
}

/// [`background_integral`] with the ray rotated by `angle_offset` from
/// −π/4. If a resonance sits within ~1e−9 of the requested ray the angle is
/// perturbed by 1e−6 once before giving up.
pub fn background_integral_with_ray(
    params: &ModelParams,
    t: f64,
    x: &Point,
    xp: &Point,
    angle_offset: f64,
) -> Result<Complex64, ExpansionError> {
    if !(t > 0.0) {
        return Err(ExpansionError::TimeTooSmall { t, t0: 0.0 });
    }
    let y = params.y();
    let dists = [x.dist(&y), x.dist(&y.reflected()), xp.dist(&y), xp.dist(&y.reflected())];
    let dmax = dists[0].max(dists[1]) + dists[2].max(dists[3]);
    // decay cutoff: e^{-ts + sqrt(s) dmax/sqrt(2)} below 1e-18 of peak
    let mut s_max = 50.0 / t;
    while t * s_max - s_max.sqrt() * dmax / (2.0f64).sqrt() < 45.0 {
        s_max *= 1.5;
    }
    let mut theta = -PI / 4.0 + angle_offset;
    for attempt in 0..2 {
        let mut clear = true;
        for j in 1..=512 {
            let sigma = s_max.sqrt() * j as f64 / 512.0;
            let z = Complex64::from_polar(sigma, theta);
            if gamma(params, z).norm() < 1e-9 * gamma_scale(params, z) {
                clear = false;
                break;
            }
        }
        if clear {
            break;
        }
        if attempt == 1 {
            return Err(ExpansionError::RayPoleCollision { theta });
        }
        theta += 1e-6;
    }
    let ray = Complex64::from_polar(1.0, theta);
    let rhat_diff = |z: Complex64| -> Complex64 {
        let f = |w: Complex64| {
            let gx = green_at_interaction(params, w, x).expect("x != y");
            let gxp = green_at_interaction(params, w, xp).expect("xp != y");
            gx * gxp / gamma(params, w)
        };
        f(z) - f(-z)
    };
    // substitute s = sigma^2: the integrand becomes analytic through 0,
    // e^{-itz^2} with z = sigma e^{i theta} reducing to e^{-t sigma^2} on
    // the exact -pi/4 ray
    let integrand = |sigma: f64| -> Complex64 {
        let z = ray * sigma;
        let phase = (Complex64::new(0.0, -t) * z * z).exp();
        rhat_diff(z) * phase * 2.0 * sigma
    };
    let sigma_max = s_max.sqrt();
    let (value, err) = quad::adaptive_panels(&integrand, 0.0, sigma_max, 64, 1e-13);
    // ray Jacobian relative to the −π/4 reference; unity when unperturbed
    let jacobian = (Complex64::new(0.0, 2.0) * (theta + PI / 4.0)).exp();
    let value = -value * jacobian / (2.0 * PI);
    if err > 1e-10 * (1.0 + value.norm()) {
        return Err(ExpansionError::QuadratureNonConvergence { estimate: err });
    }
    // tail truncation sanity: integrand is negligible at the cutoff
    if integrand(sigma_max).norm() > 1e-16 {
        return Err(ExpansionError::QuadratureNonConvergence {
            estimate: integrand(sigma_max).norm(),
        });
    }
    Ok(value)
}

/// Growth-envelope diagnostic for the rank-one kernel factor
/// |Γ⁻¹(z)|·|G_{z,y}(x) G_{z,y}(x')| in the region
/// Im z ≥ −A − δ·ln(1+|z|).
#[derive(Debug, Clone)]
pub struct DecayReport {
    /// δ < 1/(2y₃) is required by the envelope statement.
    pub delta_valid: bool,
    /// Fitted exponent p in (1+|z|)^p.
    pub poly_exponent: f64,
    /// Fitted exponential rate in e^{rate·(Im z)_−}.
    pub exp_rate: f64,
    /// Largest |x−y| + |x'−y| over the sampled pairs.
    pub distance_bound: f64,
    pub poly_ok: bool,
    pub rate_ok: bool,
    /// Zeros of Γ inside the region (finitely many when δ is valid).
    pub resonances_in_region: usize,
    pub samples_used: usize,
}

/// Fits ln K ≈ c + p·ln(1+|z|) + rate·(Im z)_− over the admissible samples
/// and checks p ≤ j−1+0.2, rate ≤ T+0.1 with T the sampled distance bound.
pub fn truncated_resolvent_decay(
    params: &ModelParams,
    rho_box: &BoxRegion,
    z_samples: &[Complex64],
    delta: f64,
    a_param: f64,
    j: u32,
) -> Result<DecayReport, ExpansionError> {
    let delta_valid = delta < 1.0 / (2.0 * params.y3());
    // corner/center pairs of the box
    let mut pts = Vec::new();
    for ix in [0, 1] {
        for iy in [0, 1] {
            for iz in [0, 1] {
                pts.push(Point::new(
                    if ix == 0 { rho_box.lo.0[0] } else { rho_box.hi.0[0] },
                    if iy == 0 { rho_box.lo.0[1] } else { rho_box.hi.0[1] },
                    if iz == 0 { rho_box.lo.0[2] } else { rho_box.hi.0[2] },
                ));
            }
        }
    }
    let y = params.y();
    let distance_bound = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| a.dist(&y) + b.dist(&y)))
        .fold(0.0f64, f64::max);
    let mut rows: Vec<[f64; 3]> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for &z in z_samples {
        let in_region = z.im >= -a_param - delta * (1.0 + z.norm()).ln();
        if !in_region {
            continue;
        }
        // stay off resonances by a margin
        if gamma(params, z).norm() < 1e-3 * gamma_scale(params, z) {
            continue;
        }
        let mut kmax = 0.0f64;
        for a in &pts {
            for b in &pts {
                let gx = green_at_interaction(params, z, a)?;
                let gxp = green_at_interaction(params, z, b)?;
                kmax = kmax.max((gx * gxp / gamma(params, z)).norm());
            }
        }
        rows.push([1.0, (1.0 + z.norm()).ln(), (-z.im).max(0.0)]);
        rhs.push(kmax.ln());
    }
    if rows.len() < 4 {
        return Err(ExpansionError::QuadratureNonConvergence { estimate: rows.len() as f64 });
    }
    let sol = least_squares_3(&rows, &rhs);
    let poly_exponent = sol[1];
    let exp_rate = sol[2];
    let radius = z_samples.iter().map(|z| z.norm()).fold(0.0f64, f64::max) + 1.0;
    let resonances_in_region = solver::find_all(params, radius)?
        .iter()
        .filter(|r| r.z.im >= -a_param - delta * (1.0 + r.z.norm()).ln())
        .map(|r| r.multiplicity as usize)
        .sum();
    Ok(DecayReport {
        delta_valid,
        poly_exponent,
        exp_rate,
        distance_bound,
        poly_ok: poly_exponent <= j as f64 - 1.0 + 0.2,
        rate_ok: exp_rate <= distance_bound + 0.1,
        resonances_in_region,
        samples_used: rows.len(),
    })
}

/// Normal-equation solve for the 3-parameter linear fit.
fn least_squares_3(rows: &[[f64; 3]], rhs: &[f64]) -> [f64; 3] {
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (r, &b) in rows.iter().zip(rhs) {
        for i in 0..3 {
            for k in 0..3 {
                ata[i][k] += r[i] * r[k];
            }
            atb[i] += r[i] * b;
        }
    }
    // Gaussian elimination with partial pivoting
    let mut m = [[0.0f64; 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&ata[i]);
        m[i][3] = atb[i];
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut s = m[i][3];
        for k in i + 1..3 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    x
}

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("z = {z} is not a zero of Γ")]
    NotAZero { z: Complex64 },
    #[error("Γ'({z}) below floor: non-simple zero, handle via the Laurent data")]
    NonSimpleZero { z: Complex64 },
    #[error("quadrature failed to converge (estimate {estimate:.3e})")]
    QuadratureNonConvergence { estimate: f64 },
    #[error("expansion requires a non-critical coupling (alpha = {alpha})")]
    CriticalAlpha { alpha: f64 },
    #[error("t = {t} at or below the convergence threshold t0 = {t0:.6}")]
    TimeTooSmall { t: f64, t0: f64 },
    #[error("resonance on the background ray (theta = {theta})")]
    RayPoleCollision { theta: f64 },
    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
