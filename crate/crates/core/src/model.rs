//! Characteristic functions, half-space Green's functions, and the resolvent
//! kernel of the Laplacian with one point interaction on the half-space.
//!
//! The perturbed resolvent is a rank-one update of the free half-space
//! resolvent, with scalar denominator
//!
//! ```text
//! Γ(z) = α − iz/(4π) ± e^{2i y₃ z} / (8π y₃)    (+ Dirichlet, − Neumann)
//! ```
//!
//! Γ is entire, so it can be evaluated on all of ℂ; its zeros in the closed
//! lower half-plane are the resonances the rest of the crate computes. This
//! module also carries the zero-energy Laurent data of Γ⁻¹ at the critical
//! couplings α = ∓1/(8π y₃).

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Boundary condition imposed on the plane x₃ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

impl BoundaryCondition {
    /// Sign of the oscillatory term in Γ: +1 for Dirichlet, −1 for Neumann.
    pub fn gamma_sign(self) -> f64 {
        match self {
            BoundaryCondition::Dirichlet => 1.0,
            BoundaryCondition::Neumann => -1.0,
        }
    }

    /// Sign of the image charge in the half-space Green's function.
    pub fn image_sign(self) -> f64 {
        -self.gamma_sign()
    }

    /// The coupling at which z = 0 becomes a resonance: ∓1/(8π y₃).
    pub fn critical_alpha(self, y3: f64) -> f64 {
        -self.gamma_sign() / (8.0 * PI * y3)
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryCondition::Dirichlet => write!(f, "dirichlet"),
            BoundaryCondition::Neumann => write!(f, "neumann"),
        }
    }
}

/// A point of the closed half-space x₃ ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Point([x1, x2, x3])
    }

    pub fn x3(&self) -> f64 {
        self.0[2]
    }

    /// Reflection through the boundary plane x₃ = 0.
    pub fn reflected(&self) -> Self {
        Point([self.0[0], self.0[1], -self.0[2]])
    }

    pub fn dist(&self, other: &Point) -> f64 {
        let dx = self.0[0] - other.0[0];
        let dy = self.0[1] - other.0[1];
        let dz = self.0[2] - other.0[2];
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Axis-aligned box, used for quadrature supports and decay diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct BoxRegion {
    pub lo: Point,
    pub hi: Point,
}

impl BoxRegion {
    pub fn new(lo: Point, hi: Point) -> Result<Self, ModelError> {
        for i in 0..3 {
            if !(lo.0[i] < hi.0[i]) {
                return Err(ModelError::InvalidParams(format!(
                    "box must have lo < hi per axis, got axis {i}: {} >= {}",
                    lo.0[i], hi.0[i]
                )));
            }
        }
        Ok(BoxRegion { lo, hi })
    }

    pub fn diagonal(&self) -> f64 {
        self.lo.dist(&self.hi)
    }

    /// Euclidean distance from `p` to the closed box (0 if inside).
    pub fn distance_to(&self, p: &Point) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let c = p.0[i].clamp(self.lo.0[i], self.hi.0[i]);
            d2 += (p.0[i] - c) * (p.0[i] - c);
        }
        d2.sqrt()
    }
}

/// Interaction data: boundary condition, coupling strength α, and the
/// interaction point y strictly inside the half-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub bc: BoundaryCondition,
    pub alpha: f64,
    y: Point,
}

impl ModelParams {
    pub fn new(bc: BoundaryCondition, alpha: f64, y: Point) -> Result<Self, ModelError> {
        if !(y.x3() > 0.0) || !y.x3().is_finite() || !alpha.is_finite() {
            return Err(ModelError::InvalidParams(format!(
                "need finite alpha and y3 > 0, got alpha={alpha}, y3={}",
                y.x3()
            )));
        }
        Ok(ModelParams { bc, alpha, y })
    }

    /// Interaction on the x₃ axis at height y₃.
    pub fn on_axis(bc: BoundaryCondition, alpha: f64, y3: f64) -> Result<Self, ModelError> {
        Self::new(bc, alpha, Point::new(0.0, 0.0, y3))
    }

    pub fn y(&self) -> Point {
        self.y
    }

    pub fn y3(&self) -> f64 {
        self.y.x3()
    }

    /// True when α sits on the critical coupling ∓1/(8π y₃) to the tolerance
    /// used by zero-resonance detection.
    pub fn is_critical(&self) -> bool {
        let z0 = Complex64::new(0.0, 0.0);
        gamma(self, z0).norm() <= 1e-13 * gamma_scale(self, z0)
    }
}

/// Complex wavenumber; the spectral parameter is its square z².
pub type Wavenumber = Complex64;

/// Magnitude scale of Γ at z, used for relative tolerances:
/// |α| + |z|/(4π) + 1/(8π y₃).
pub fn gamma_scale(params: &ModelParams, z: Complex64) -> f64 {
    params.alpha.abs() + z.norm() / (4.0 * PI) + 1.0 / (8.0 * PI * params.y3())
}

/// e^w − 1 by Horner series for small |w|, avoiding the cancellation that
/// otherwise wrecks Γ near its critical double zero at the origin.
fn expm1_complex(w: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (2..=13u32).rev() {
        acc = (acc + 1.0) * w / n as f64;
    }
    (acc + 1.0) * w
}

/// Characteristic function Γ(z) = α − iz/(4π) ± e^{2i y₃ z}/(8π y₃).
pub fn gamma(params: &ModelParams, z: Complex64) -> Complex64 {
    let y3 = params.y3();
    let s = params.bc.gamma_sign();
    let w = Complex64::new(0.0, 2.0 * y3) * z;
    let linear = -Complex64::new(0.0, 1.0) * z / (4.0 * PI);
    if w.norm() < 0.25 {
        // regroup as (α ± 1/(8πy₃)) − iz/(4π) ± (e^w − 1)/(8πy₃): near the
        // critical coupling every term is O(z) or the exact offset
        let offset = params.alpha + s / (8.0 * PI * y3);
        return offset + linear + s * expm1_complex(w) / (8.0 * PI * y3);
    }
    params.alpha + linear + s * w.exp() / (8.0 * PI * y3)
}

/// Γ with an overflow guard on the exponential: |e^{2i y₃ z}| blows past f64
/// range once Im z < −350/y₃, far below any region of interest.
pub fn gamma_checked(params: &ModelParams, z: Complex64) -> Result<Complex64, ModelError> {
    if -2.0 * params.y3() * z.im > 700.0 {
        return Err(ModelError::ExponentOverflow { z });
    }
    Ok(gamma(params, z))
}

/// Analytic derivative Γ'(z) = −i/(4π) ± i e^{2i y₃ z}/(4π).
pub fn gamma_derivative(params: &ModelParams, z: Complex64) -> Complex64 {
    let y3 = params.y3();
    let s = params.bc.gamma_sign();
    let w = Complex64::new(0.0, 2.0 * y3) * z;
    let i4pi = Complex64::new(0.0, 1.0 / (4.0 * PI));
    if w.norm() < 0.25 {
        // Dirichlet: i(e^w − 1)/(4π); Neumann: −i(2 + (e^w − 1))/(4π)
        return match params.bc {
            BoundaryCondition::Dirichlet => i4pi * expm1_complex(w),
            BoundaryCondition::Neumann => -i4pi * (2.0 + expm1_complex(w)),
        };
    }
    -i4pi + s * i4pi * w.exp()
}

/// Logarithmic derivative Γ'/Γ, stable for deep Im z where Γ itself
/// overflows: both sides are rescaled by e^{−2i y₃ z} so the ratio stays
/// finite (it tends to 2i y₃ as Im z → −∞).
pub fn gamma_log_derivative(params: &ModelParams, z: Complex64) -> Complex64 {
    let y3 = params.y3();
    let s = params.bc.gamma_sign();
    if -2.0 * y3 * z.im > 600.0 {
        let damp = (Complex64::new(0.0, -2.0 * y3) * z).exp(); // e^{-2i y3 z}, tiny
        let num = Complex64::new(0.0, -1.0 / (4.0 * PI)) * damp + Complex64::new(0.0, s / (4.0 * PI));
        let den = (params.alpha - Complex64::new(0.0, 1.0) * z / (4.0 * PI)) * damp
            + s / (8.0 * PI * y3);
        num / den
    } else {
        gamma_derivative(params, z) / gamma(params, z)
    }
}

/// Free-space Green's function e^{iz|x−x'|}/(4π|x−x'|).
pub fn green_free(z: Complex64, x: &Point, xp: &Point) -> Result<Complex64, ModelError> {
    let r = x.dist(xp);
    if r == 0.0 {
        return Err(ModelError::CoincidentPoints);
    }
    Ok((Complex64::new(0.0, r) * z).exp() / (4.0 * PI * r))
}

/// Half-space Green's function by the method of images:
/// G = G⁰(x, x') ∓ G⁰(x, x̄') with − for Dirichlet, + for Neumann.
pub fn green_halfspace(
    params: &ModelParams,
    z: Complex64,
    x: &Point,
    xp: &Point,
) -> Result<Complex64, ModelError> {
    let direct = green_free(z, x, xp)?;
    let image = green_free(z, x, &xp.reflected()).map_err(|_| ModelError::ImageCoincidentPoints)?;
    Ok(direct + params.bc.image_sign() * image)
}

/// Green's function centered at the interaction point, G_{z,y}(x).
pub fn green_at_interaction(
    params: &ModelParams,
    z: Complex64,
    x: &Point,
) -> Result<Complex64, ModelError> {
    green_halfspace(params, z, x, &params.y())
}

/// Relative floor below which |Γ(z)| is treated as a pole of the resolvent.
pub const POLE_FLOOR_REL: f64 = 1e-13;

/// Full resolvent kernel of the point-interaction operator,
/// G(z; x, x') + Γ(z)⁻¹ G_{z,y}(x) G_{z,y}(x').
///
/// The rank-one product is grouped so the formula is bitwise symmetric under
/// swapping x and x'.
pub fn resolvent_kernel(
    params: &ModelParams,
    z: Complex64,
    x: &Point,
    xp: &Point,
) -> Result<Complex64, ModelError> {
    let g = gamma_checked(params, z)?;
    let floor = POLE_FLOOR_REL * gamma_scale(params, z);
    if g.norm() < floor {
        return Err(ModelError::PoleAtZ { z, gamma_abs: g.norm(), floor });
    }
    let background = green_halfspace(params, z, x, xp)?;
    let gx = green_at_interaction(params, z, x)?;
    let gxp = green_at_interaction(params, z, xp)?;
    Ok(background + (gx * gxp) / g)
}

/// Laurent data of Γ⁻¹ at z = 0: pole order and coefficients for
/// z^{−order}, …, z⁰.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentExpansion {
    pub order: usize,
    pub coefficients: Vec<Complex64>,
}

impl LaurentExpansion {
    /// Partial Laurent sum Σ cⱼ z^{j−order}.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coefficients.iter().enumerate() {
            acc += c * z.powi(j as i32 - self.order as i32);
        }
        acc
    }
}

/// Zero-energy expansion of Γ⁻¹.
///
/// At the Dirichlet critical coupling Γ⁻¹ = −(4π/y₃) z⁻² + (8/3)πi z⁻¹
/// + (4π y₃/9) + O(z); at the Neumann critical coupling Γ⁻¹ = 2πi z⁻¹
/// + π y₃ + O(z). Away from criticality Γ⁻¹ is regular and the expansion
/// reduces to the single value Γ(0)⁻¹.
pub fn laurent_at_zero(params: &ModelParams) -> LaurentExpansion {
    let y3 = params.y3();
    if !params.is_critical() {
        let g0 = gamma(params, Complex64::new(0.0, 0.0));
        return LaurentExpansion { order: 0, coefficients: vec![1.0 / g0] };
    }
    match params.bc {
        BoundaryCondition::Dirichlet => LaurentExpansion {
            order: 2,
            coefficients: vec![
                Complex64::new(-4.0 * PI / y3, 0.0),
                Complex64::new(0.0, 8.0 * PI / 3.0),
                Complex64::new(4.0 * PI * y3 / 9.0, 0.0),
            ],
        },
        BoundaryCondition::Neumann => LaurentExpansion {
            order: 1,
            coefficients: vec![Complex64::new(0.0, 2.0 * PI), Complex64::new(PI * y3, 0.0)],
        },
    }
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("coincident evaluation points")]
    CoincidentPoints,
    #[error("evaluation point coincides with an image point")]
    ImageCoincidentPoints,
    #[error("|Γ({z})| = {gamma_abs:.3e} below pole floor {floor:.3e}")]
    PoleAtZ { z: Complex64, gamma_abs: f64, floor: f64 },
    #[error("e^(2i y3 z) overflows at z = {z}")]
    ExponentOverflow { z: Complex64 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
