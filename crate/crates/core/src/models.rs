//! The model geometries as [`MetricChart`]s.
//!
//! * Sphere of radius `ρ`: stereographic chart `g = 4ρ⁴/(ρ² + |x|²)² δ` on
//!   `[-2ρ, 2ρ]^n`, sampled inside the ball of radius `1.8ρ`.
//! * Warped products `dt² + F(t)² g_{S^{n-1}}`: coordinates `(t, y)` with `t`
//!   periodic and the fiber charted stereographically,
//!   `g_{S^{n-1}} = 4/(1 + |y|²)² δ` on `[-2, 2]^{n-1}`, sampled inside
//!   `|y| ≤ 1.8`. The round product `S¹(L) × S^{n-1}(r)` is `F ≡ r`.
//! * Conformal charts `e^{2φ} δ` on a box, `φ` a combination of fixed basis
//!   functions.
//!
//! Every chart carries closed-form Christoffel symbols.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::boxed::Box;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::chart::{Axis, BallLimit, Christoffel, ChristoffelFn, Domain, MetricChart, MetricFn, Tensor3};
use crate::derdzinski::WarpSolution;
use crate::tensor::{Dim, Sym2};
use crate::{Error, Result};

/// Finite-difference step relative to the chart scale. With closed-form
/// Christoffel symbols the curvature needs only one differentiation, so the
/// outer derivatives use the same step.
pub const FD_STEP: f64 = 3e-3;
/// Stereographic charts are sampled within this fraction of the box.
const BALL_FRACTION: f64 = 0.9;

/// One of the model families together with its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub dim: Dim,
    pub kind: ModelKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    Sphere { radius: f64 },
    /// `S¹` of length `length` times `S^{n-1}` of radius `radius`.
    Product { length: f64, radius: f64 },
    Warped(WarpProfile),
    Conformal(ConformalSpec),
}

/// Warping function of a warped product over the round sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpProfile {
    /// A solution of the constant-scalar-curvature warping equation.
    Solution(WarpSolution),
    /// `F(t) = Σ_k a_k cos(2πkt/period)`.
    Cosine { period: f64, coeffs: Vec<f64> },
}

impl WarpProfile {
    pub fn period(&self) -> f64 {
        match self {
            WarpProfile::Solution(s) => s.period(),
            WarpProfile::Cosine { period, .. } => *period,
        }
    }

    /// `(F, F', F'')` at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        match self {
            WarpProfile::Solution(s) => s.eval(t),
            WarpProfile::Cosine { period, coeffs } => {
                let w = 2.0 * PI / period;
                let mut out = (0.0, 0.0, 0.0);
                for (k, a) in coeffs.iter().enumerate() {
                    let kw = k as f64 * w;
                    let (s, c) = (kw * t).sin_cos();
                    out.0 += a * c;
                    out.1 -= a * kw * s;
                    out.2 -= a * kw * kw * c;
                }
                out
            }
        }
    }

    /// Smallest value of `F` over a fine scan of one period.
    pub fn min_value(&self) -> f64 {
        match self {
            WarpProfile::Solution(s) => s.fmin(),
            WarpProfile::Cosine { period, .. } => (0..1024)
                .map(|k| self.eval(k as f64 * period / 1024.0).0)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// `φ = Σ coeff · basis(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalSpec {
    /// The chart is `[-half_width, half_width]^n`.
    pub half_width: f64,
    pub terms: Vec<PhiTerm>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiTerm {
    pub basis: Basis,
    pub coeff: f64,
}

/// Basis functions of a coordinate (or a pair of coordinates).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Linear(usize),
    Square(usize),
    Cross(usize, usize),
    Sin(usize),
    Cos(usize),
}

impl Basis {
    fn axes(&self) -> (usize, usize) {
        match *self {
            Basis::Linear(i) | Basis::Square(i) | Basis::Sin(i) | Basis::Cos(i) => (i, i),
            Basis::Cross(i, j) => (i, j),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match *self {
            Basis::Linear(i) => x[i],
            Basis::Square(i) => x[i] * x[i],
            Basis::Cross(i, j) => x[i] * x[j],
            Basis::Sin(i) => x[i].sin(),
            Basis::Cos(i) => x[i].cos(),
        }
    }

    fn add_gradient(&self, x: &[f64], coeff: f64, grad: &mut [f64]) {
        match *self {
            Basis::Linear(i) => grad[i] += coeff,
            Basis::Square(i) => grad[i] += 2.0 * coeff * x[i],
            Basis::Cross(i, j) => {
                grad[i] += coeff * x[j];
                grad[j] += coeff * x[i];
            }
            Basis::Sin(i) => grad[i] += coeff * x[i].cos(),
            Basis::Cos(i) => grad[i] -= coeff * x[i].sin(),
        }
    }
}

impl ConformalSpec {
    pub fn phi(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|t| t.coeff * t.basis.value(x)).sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        for t in &self.terms {
            t.basis.add_gradient(x, t.coeff, &mut g);
        }
        g
    }
}

impl ModelSpec {
    pub fn new(dim: Dim, kind: ModelKind) -> Result<Self> {
        let spec = ModelSpec { dim, kind };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{name} must be positive, got {v}")))
            }
        };
        match &self.kind {
            ModelKind::Sphere { radius } => positive("radius", *radius),
            ModelKind::Product { length, radius } => {
                positive("length", *length)?;
                positive("radius", *radius)
            }
            ModelKind::Warped(profile) => {
                positive("period", profile.period())?;
                if let WarpProfile::Solution(s) = profile {
                    if s.ode().dim() != self.dim {
                        return Err(Error::DimensionMismatch(s.ode().dim().get(), self.dim.get()));
                    }
                }
                positive("warping function minimum", profile.min_value())
            }
            ModelKind::Conformal(spec) => {
                positive("half_width", spec.half_width)?;
                for t in &spec.terms {
                    let (i, j) = t.basis.axes();
                    if i.max(j) >= self.dim.get() {
                        return Err(Error::InvalidModel(format!(
                            "basis axis {} out of range for n = {}",
                            i.max(j),
                            self.dim.get()
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

/// `Γ^k_ij = δ^k_j ∂_iφ + δ^k_i ∂_jφ - δ_ij ∂_kφ` for `g = e^{2φ} δ`.
fn conformal_christoffel(dphi: &[f64]) -> Christoffel {
    let n = dphi.len();
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    Tensor3::from_fn(n, |k, i, j| d(k, j) * dphi[i] + d(k, i) * dphi[j] - d(i, j) * dphi[k])
}

fn sphere_chart(dim: Dim, rho: f64) -> Result<MetricChart> {
    let n = dim.get();
    let axes = vec![Axis::interval(-2.0 * rho, 2.0 * rho); n];
    let domain = Domain {
        axes,
        ball: Some(BallLimit {
            first_axis: 0,
            radius: BALL_FRACTION * 2.0 * rho,
        }),
    };
    let rho2 = rho * rho;
    let metric = move |x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let f = 2.0 * rho2 / (rho2 + r2);
        Sym2::identity(n).scale(f * f)
    };
    let christoffel = move |x: &[f64]| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let dphi: Vec<f64> = x.iter().map(|v| -2.0 * v / (rho2 + r2)).collect();
        conformal_christoffel(&dphi)
    };
    analytic_chart(dim, domain, Box::new(metric), Box::new(christoffel), FD_STEP * rho, FD_STEP * rho)
}

fn analytic_chart(
    dim: Dim,
    domain: Domain,
    metric: MetricFn,
    christoffel: ChristoffelFn,
    step: f64,
    outer_step: f64,
) -> Result<MetricChart> {
    Ok(MetricChart::new(dim, domain, metric, step)?
        .with_christoffel(christoffel)
        .with_outer_step(outer_step))
}

fn warped_chart(dim: Dim, profile: WarpProfile) -> Result<MetricChart> {
    let n = dim.get();
    let period = profile.period();
    // Near its minimum the profile varies on the scale F_min. Curvature
    // derivatives keep the unscaled step: with a small F_min they are
    // roundoff-limited well before truncation matters.
    let step = FD_STEP * profile.min_value().min(1.0);
    let mut axes = vec![Axis::circle(0.0, period)];
    axes.extend(core::iter::repeat(Axis::interval(-2.0, 2.0)).take(n - 1));
    let domain = Domain {
        axes,
        ball: Some(BallLimit {
            first_axis: 1,
            radius: BALL_FRACTION * 2.0,
        }),
    };
    let profile = Arc::new(profile);
    let p = Arc::clone(&profile);
    let metric = move |x: &[f64]| {
        let (f, _, _) = p.eval(x[0]);
        let s = 2.0 / (1.0 + x[1..].iter().map(|v| v * v).sum::<f64>());
        let fiber = f * f * s * s;
        Sym2::from_fn(n, |i, j| match (i, j) {
            (0, 0) => 1.0,
            _ if i == j => fiber,
            _ => 0.0,
        })
    };
    let christoffel = move |x: &[f64]| {
        let (f, df, _) = profile.eval(x[0]);
        let y2: f64 = x[1..].iter().map(|v| v * v).sum();
        let s = 2.0 / (1.0 + y2);
        // ∂_a ψ for the fiber conformal factor e^{2ψ} = s².
        let dpsi = |a: usize| -2.0 * x[a] / (1.0 + y2);
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Tensor3::from_fn(n, |k, i, j| match (k, i, j) {
            (0, 0, _) | (0, _, 0) => 0.0,
            (0, a, b) => -f * df * s * s * d(a, b),
            (_, 0, 0) => 0.0,
            (c, 0, b) | (c, b, 0) => df / f * d(c, b),
            (c, a, b) => d(c, b) * dpsi(a) + d(c, a) * dpsi(b) - d(a, b) * dpsi(c),
        })
    };
    analytic_chart(dim, domain, Box::new(metric), Box::new(christoffel), step, FD_STEP)
}

fn conformal_chart(dim: Dim, spec: ConformalSpec) -> Result<MetricChart> {
    let n = dim.get();
    let w = spec.half_width;
    let domain = Domain::boxed(vec![Axis::interval(-w, w); n]);
    let spec = Arc::new(spec);
    let s = Arc::clone(&spec);
    let metric = move |x: &[f64]| Sym2::identity(n).scale((2.0 * s.phi(x)).exp());
    let christoffel = move |x: &[f64]| conformal_christoffel(&spec.gradient(x));
    let step = FD_STEP * w.min(1.0);
    analytic_chart(dim, domain, Box::new(metric), Box::new(christoffel), step, step)
}

/// Builds the chart of a model.
pub fn build_chart(spec: &ModelSpec) -> Result<MetricChart> {
    spec.validate()?;
    match &spec.kind {
        ModelKind::Sphere { radius } => sphere_chart(spec.dim, *radius),
        ModelKind::Product { length, radius } => warped_chart(
            spec.dim,
            WarpProfile::Cosine {
                period: *length,
                coeffs: vec![*radius],
            },
        ),
        ModelKind::Warped(profile) => warped_chart(spec.dim, profile.clone()),
        ModelKind::Conformal(c) => conformal_chart(spec.dim, c.clone()),
    }
}

/// Ricci eigenvalues and scalar curvature of a warped product at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpCurvature {
    pub f: f64,
    /// `Ric(∂_t, ∂_t) = -(n-1) F''/F`.
    pub ricci_t: f64,
    /// Fiber eigenvalue `((n-2)(1 - F'²) - F F'')/F²`, multiplicity `n-1`.
    pub ricci_fiber: f64,
    pub scalar: f64,
}

impl WarpCurvature {
    /// The trace-free Ricci tensor has eigenvalue `λ` on the fiber
    /// (multiplicity `n-1`) and `-(n-1)λ` on `∂_t`.
    pub fn fiber_lambda(&self, dim: Dim) -> f64 {
        self.ricci_fiber - self.scalar / dim.as_f64()
    }
}

/// Closed-form curvature of a product or warped model.
pub fn closed_form_curvature(spec: &ModelSpec, t: f64) -> Result<WarpCurvature> {
    let (f, df, ddf) = match &spec.kind {
        ModelKind::Product { radius, .. } => (*radius, 0.0, 0.0),
        ModelKind::Warped(p) => p.eval(t),
        _ => return Err(Error::WrongKind),
    };
    let n = spec.dim.as_f64();
    let ricci_t = -(n - 1.0) * ddf / f;
    let ricci_fiber = ((n - 2.0) * (1.0 - df * df) - f * ddf) / (f * f);
    Ok(WarpCurvature {
        f,
        ricci_t,
        ricci_fiber,
        scalar: ricci_t + (n - 1.0) * ricci_fiber,
    })
}

/// Period of the `t` axis for product and warped models.
pub fn circle_length(spec: &ModelSpec) -> Result<f64> {
    match &spec.kind {
        ModelKind::Product { length, .. } => Ok(*length),
        ModelKind::Warped(p) => Ok(p.period()),
        _ => Err(Error::WrongKind),
    }
}
