//! The integral pinching functional
//!
//! ```text
//! P = ∫ |E|^{(n-2)/n} (R - √(n(n-1)) |E|) dV
//! ```
//!
//! its ε-regularised companion `∫ Q f_ε^{-(n+2)/n} dV` with
//! `Q = -R_{ikjl} E_ij E_kl + R_jk E_ij E_ik` and `f_ε = max(|E|, ε)`, and the
//! pointwise classification of the trace-free Ricci tensor.
//!
//! On the sphere `E ≡ 0`, so both integrals vanish identically. On warped
//! products the integrands depend on `t` only and
//! `∫ h dV = ω_{n-1} ∫_0^Λ h(t) F(t)^{n-1} dt`, evaluated with the periodic
//! trapezoidal rule.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;

use crate::chart::MetricChart;
use crate::models::{self, ModelKind, ModelSpec};
use crate::quad::{self, Estimate};
use crate::tensor::{self, Dim, EigenPattern, Sym2};
use crate::{Error, Result};

/// Largest accepted standard deviation of the sampled scalar curvature.
pub const SCALAR_SPREAD_LIMIT: f64 = 1e-6;
/// Relative clustering tolerance for eigenvalue patterns.
pub const PATTERN_TOL: f64 = 1e-8;

/// A chart whose scalar curvature was audited to be constant.
#[derive(Debug)]
pub struct ConstantScalar<'a> {
    chart: &'a MetricChart,
    scalar: f64,
    spread: f64,
}

impl<'a> ConstantScalar<'a> {
    /// Samples `R` at `samples` points; fails if its standard deviation
    /// exceeds [`SCALAR_SPREAD_LIMIT`].
    pub fn audit(chart: &'a MetricChart, samples: usize) -> Result<Self> {
        let values = chart
            .sample_points(samples.max(2))
            .iter()
            .map(|x| chart.scalar_at(x))
            .collect::<Result<Vec<_>>>()?;
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
        let spread = var.sqrt();
        if !(spread <= SCALAR_SPREAD_LIMIT) {
            return Err(Error::HypothesisViolated { spread });
        }
        Ok(ConstantScalar {
            chart,
            scalar: mean,
            spread,
        })
    }

    pub fn chart(&self) -> &MetricChart {
        self.chart
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// `|E|^{(n-2)/n}(R - √(n(n-1))|E|)` at `x` from the chart's curvature.
    pub fn integrand_at(&self, x: &[f64]) -> Result<f64> {
        let geo = self.chart.geometry_at(x)?;
        let e = geo.trace_free_ricci();
        let norm_e = tensor::norm(&geo.g, &e)?;
        Ok(pinch_integrand(Dim::new(self.chart.dim())?, norm_e, geo.scalar))
    }
}

/// `|E|^{(n-2)/n}(R - √(n(n-1))|E|)`, with `0^{(n-2)/n} = 0`.
pub fn pinch_integrand(dim: Dim, norm_e: f64, scalar: f64) -> f64 {
    let n = dim.as_f64();
    if norm_e == 0.0 {
        return 0.0;
    }
    norm_e.powf((n - 2.0) / n) * (scalar - (n * (n - 1.0)).sqrt() * norm_e)
}

/// `f_ε^{-(n+2)/n}` with `f_ε = max(|E|, ε)`.
pub fn regularized_weight(dim: Dim, norm_e: f64, eps: f64) -> f64 {
    let n = dim.as_f64();
    norm_e.max(eps).powf(-(n + 2.0) / n)
}

/// Pointwise data of a warped model at time `t`, in an orthonormal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
struct WarpPoint {
    f: f64,
    scalar: f64,
    lambda: f64,
    norm_e: f64,
}

fn warp_point(spec: &ModelSpec, t: f64) -> Result<WarpPoint> {
    let cf = models::closed_form_curvature(spec, t)?;
    let n = spec.dim.as_f64();
    let lambda = cf.fiber_lambda(spec.dim);
    Ok(WarpPoint {
        f: cf.f,
        scalar: cf.scalar,
        lambda,
        norm_e: (n * (n - 1.0)).sqrt() * lambda.abs(),
    })
}

/// `Q = -R_{ikjl} E_ij E_kl + R_jk E_ij E_ik` in an orthonormal frame where
/// `E = diag(-(n-1)λ, λ, …, λ)`, using the conformally flat Riemann tensor.
fn warp_q(dim: Dim, p: &WarpPoint) -> Result<f64> {
    let n = dim.get();
    let mut diag = alloc::vec![p.lambda; n];
    diag[0] = -(n as f64 - 1.0) * p.lambda;
    let g = Sym2::identity(n);
    let e = Sym2::from_diag(&diag);
    let ric = &e + &g.scale(p.scalar / n as f64);
    let riem = tensor::cf_riemann_from_ricci(&g, &e, p.scalar)?;
    Ok(tensor::q_invariant(&g, &riem, &ric, &e)?.direct)
}

/// Value of the pinching functional with its audit data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinchValue {
    pub value: f64,
    /// Change under doubling the quadrature nodes.
    pub error: f64,
    /// `∫ |E|^{(n-2)/n} R dV`, the size of the cancelling terms.
    pub scale: f64,
    /// `max |integrand|` over the quadrature nodes.
    pub max_integrand: f64,
    pub volume: f64,
    /// `min |E|` over the quadrature nodes (zero for the sphere).
    pub min_norm_e: f64,
}

fn audited_chart(spec: &ModelSpec, audit_samples: usize) -> Result<(MetricChart, f64)> {
    let chart = models::build_chart(spec)?;
    let scalar = ConstantScalar::audit(&chart, audit_samples)?.scalar();
    Ok((chart, scalar))
}

fn sphere_volume(spec: &ModelSpec) -> Option<f64> {
    match spec.kind {
        ModelKind::Sphere { radius } => {
            let n = spec.dim.get();
            Some(quad::unit_sphere_area(n) * radius.powi(n as i32))
        }
        _ => None,
    }
}

fn fiber_area(dim: Dim) -> f64 {
    quad::unit_sphere_area(dim.get() - 1)
}

/// `P` for a model with constant scalar curvature.
///
/// `nodes` is the coarse trapezoidal grid on the circle; the value is taken
/// from `2 · nodes` and the difference is reported as the error.
pub fn pinch_functional(spec: &ModelSpec, nodes: usize, audit_samples: usize) -> Result<PinchValue> {
    audited_chart(spec, audit_samples)?;
    if let Some(volume) = sphere_volume(spec) {
        return Ok(PinchValue {
            value: 0.0,
            error: 0.0,
            scale: 0.0,
            max_integrand: 0.0,
            volume,
            min_norm_e: 0.0,
        });
    }
    if matches!(spec.kind, ModelKind::Conformal(_)) {
        return Err(Error::WrongKind);
    }
    let period = models::circle_length(spec)?;
    let omega = fiber_area(spec.dim);
    let points = (0..2 * nodes)
        .map(|k| warp_point(spec, k as f64 * period / (2 * nodes) as f64))
        .collect::<Result<Vec<_>>>()?;
    let n1 = spec.dim.get() as i32 - 1;
    let integrate = |h: &dyn Fn(&WarpPoint) -> f64| -> Estimate {
        let fine = points.iter().map(|p| h(p) * p.f.powi(n1)).sum::<f64>() * period / (2 * nodes) as f64;
        let coarse = points.iter().step_by(2).map(|p| h(p) * p.f.powi(n1)).sum::<f64>() * period / nodes as f64;
        Estimate {
            value: omega * fine,
            error: omega * (fine - coarse).abs(),
        }
    };
    let dim = spec.dim;
    let p = integrate(&|w| pinch_integrand(dim, w.norm_e, w.scalar));
    let n = dim.as_f64();
    let scale = integrate(&|w| w.norm_e.powf((n - 2.0) / n) * w.scalar);
    let volume = integrate(&|_| 1.0).value;
    Ok(PinchValue {
        value: p.value,
        error: p.error,
        scale: scale.value,
        max_integrand: points
            .iter()
            .map(|w| pinch_integrand(dim, w.norm_e, w.scalar).abs())
            .fold(0.0, f64::max),
        volume,
        min_norm_e: points.iter().map(|w| w.norm_e).fold(f64::INFINITY, f64::min),
    })
}

/// `∫ Q f_ε^{-(n+2)/n} dV` with an order-doubling error estimate.
pub fn regularized_prop_integral(
    spec: &ModelSpec,
    eps: f64,
    nodes: usize,
    audit_samples: usize,
) -> Result<Estimate> {
    if !(eps > 0.0) {
        return Err(Error::NonPositiveEpsilon(eps));
    }
    audited_chart(spec, audit_samples)?;
    if sphere_volume(spec).is_some() {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if matches!(spec.kind, ModelKind::Conformal(_)) {
        return Err(Error::WrongKind);
    }
    let period = models::circle_length(spec)?;
    let n1 = spec.dim.get() as i32 - 1;
    let mut failure = None;
    let est = quad::periodic_trapezoid_doubled(
        |t| match warp_point(spec, t).and_then(|w| Ok((w, warp_q(spec.dim, &w)?))) {
            Ok((w, q)) => q * regularized_weight(spec.dim, w.norm_e, eps) * w.f.powi(n1),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        0.0,
        period,
        nodes,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let omega = fiber_area(spec.dim);
    Ok(Estimate {
        value: omega * est.value,
        error: omega * est.error,
    })
}

/// Pointwise classification of `E` over chart sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualityScan {
    pub samples: usize,
    pub null: usize,
    pub pattern: usize,
    /// `(null + pattern) / samples`.
    pub pattern_fraction: f64,
    /// Smallest pattern eigenvalue `λ` seen (`+∞` if none).
    pub min_lambda: f64,
    /// Largest `|okumura_gap| / max(1, |E|³)`.
    pub max_okumura_gap: f64,
}

/// Classifies `E` at `samples` chart points with finite-difference curvature.
pub fn equality_case_scan(spec: &ModelSpec, samples: usize, audit_samples: usize) -> Result<EqualityScan> {
    let (chart, _) = audited_chart(spec, audit_samples)?;
    let mut scan = EqualityScan {
        samples,
        null: 0,
        pattern: 0,
        pattern_fraction: 0.0,
        min_lambda: f64::INFINITY,
        max_okumura_gap: 0.0,
    };
    for x in chart.sample_points(samples) {
        let geo = chart.geometry_at(&x)?;
        let e = geo.trace_free_ricci();
        match tensor::eigen_pattern(&geo.g, &e, PATTERN_TOL)? {
            EigenPattern::Null => scan.null += 1,
            EigenPattern::Pattern { lambda } => {
                scan.pattern += 1;
                scan.min_lambda = scan.min_lambda.min(lambda);
            }
            EigenPattern::Other => {}
        }
        let norm = tensor::norm(&geo.g, &e)?;
        let gap = tensor::okumura_gap(&geo.g, &e)?;
        scan.max_okumura_gap = scan.max_okumura_gap.max(gap.abs() / norm.powi(3).max(1.0));
    }
    scan.pattern_fraction = (scan.null + scan.pattern) as f64 / samples.max(1) as f64;
    Ok(scan)
}

/// `P` from finite-difference curvature of the chart along the fiber point
/// `y = 0`, as an independent check of the closed-form path.
pub fn pinch_functional_fd(spec: &ModelSpec, nodes: usize, audit_samples: usize) -> Result<f64> {
    let chart = models::build_chart(spec)?;
    let audited = ConstantScalar::audit(&chart, audit_samples)?;
    if sphere_volume(spec).is_some() {
        return Ok(0.0);
    }
    let period = models::circle_length(spec)?;
    let n = spec.dim.get();
    let mut failure = None;
    let value = quad::periodic_trapezoid(
        |t| {
            let mut x = alloc::vec![0.0; n];
            x[0] = t;
            // F² is the fiber metric coefficient at y = 0 divided by 4.
            let f = (chart.metric_at(&x).get(1, 1) / 4.0).sqrt();
            match audited.integrand_at(&x) {
                Ok(v) => v * f.powi(n as i32 - 1),
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        period,
        nodes,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(fiber_area(spec.dim) * value)
}
