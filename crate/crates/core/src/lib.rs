//! Numerical verification toolkit for compact conformally flat manifolds with
//! constant positive scalar curvature.
//!
//! The crate is `no_std` (it needs `alloc`) and is organised bottom-up:
//!
//! * [`tensor`]: pointwise algebra on symmetric 2-tensors and 4-tensors with
//!   Riemann symmetries: traces, the trace-free Ricci tensor, Schouten and Weyl
//!   parts, the cubic trace-free inequality and eigenvalue pattern detection.
//! * [`chart`]: metrics on coordinate boxes, Christoffel symbols, curvature,
//!   covariant derivatives of tensor fields and the differential identities
//!   (Codazzi, Cotton, divergence of Weyl, elliptic system, Weitzenböck, Kato),
//!   all by fourth-order central differences.
//! * [`models`]: the round sphere, the round product `S¹ × S^{n-1}`, warped
//!   products over the round sphere and conformally flat test charts.
//! * [`derdzinski`]: non-constant periodic warping functions with constant
//!   scalar curvature, built from the first integral of the warping ODE.
//! * [`pinching`]: the integral pinching functional, its ε-regularised
//!   companion and the pointwise equality-case scan.
//!
//! # Curvature convention
//!
//! A [`tensor::Curv4`] stores `R[i][k][j][l]` so that the unit sphere has
//! `R[i][k][j][l] = g_ij g_kl - g_il g_jk` and `Ric_ij = g^{kl} R[i][k][j][l]`.
//! Equivalently `R[a][b][a][b]` is the sectional curvature of an orthonormal
//! pair. Every module uses this convention.
#![no_std]
// `f64::sqrt` and friends are std-only; modules import `num_traits::Float`
// (backed by libm) instead, which is shadowed when std is linked for tests.

extern crate alloc;

pub mod chart;
pub mod derdzinski;
mod error;
pub mod models;
pub mod ode;
pub mod pinching;
pub mod quad;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
