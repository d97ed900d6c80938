//! Resonances of the Laplacian with a single point (δ) interaction on the
//! half-space x₃ > 0, under Dirichlet or Neumann boundary conditions.
//!
//! The perturbed resolvent is a rank-one update of the free half-space
//! resolvent, so every eigenvalue and resonance is a zero of a scalar entire
//! function Γ(z). Building on that reduction, the crate provides
//!
//! - [`model`]: Γ, its derivative, half-space Green's functions, the full
//!   resolvent kernel, and the zero-energy Laurent data of Γ⁻¹;
//! - [`solver`]: localization and classification of every zero of Γ in the
//!   closed lower half-plane (complex pairs per branch interval, antibound
//!   states, zero resonances/eigenvalues, the low Dirichlet pair, exceptional
//!   closed-form lines), plus counting functions with Weyl-type asymptotics;
//! - [`lambertw`]: multi-branch Lambert W evaluation and the two-logarithm
//!   series with Stirling-cycle coefficients and a certified tail bound;
//! - [`semiclassical`]: the h-scaled resonance families produced by Lambert W
//!   branches and verification of the band/parabola localization bounds;
//! - [`expansion`]: residues of Γ⁻¹ at resonances, wave-equation expansion
//!   coefficients, and the residue expansion of the Schrödinger propagator
//!   kernel with its background contour integral;
//! - [`oracle`]: an independent argument-principle zero counter, adaptive
//!   contour quadrature, and bracketed bisection used to cross-check all of
//!   the above.

pub mod expansion;
pub mod lambertw;
pub mod model;
pub mod oracle;
mod quad;
pub mod semiclassical;
pub mod solver;

pub use model::{
    BoundaryCondition, BoxRegion, LaurentExpansion, ModelParams, Point, Wavenumber,
};
pub use solver::{CountReport, Resonance, ResonanceKind};
