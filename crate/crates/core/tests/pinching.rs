mod common;

use cfpinch_core::chart::MetricChart;
use cfpinch_core::models::{self, ModelSpec};
use cfpinch_core::pinching::{self, ConstantScalar};
use cfpinch_core::tensor::{self, Sym2};
use cfpinch_core::Error;
use common::*;
use gauss_quad::GaussLegendre;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

const NODES: usize = 256;
const AUDIT: usize = 20;

#[test]
fn sphere_pinching_is_exactly_zero() {
    for n in [3, 4, 5] {
        for radius in [0.5, 1.0, 3.0] {
            let spec = sphere(n, radius);
            let p = pinching::pinch_functional(&spec, NODES, AUDIT).unwrap();
            assert_eq!(p.value, 0.0);
            for eps in [1e-1, 1e-2, 1e-3] {
                assert_eq!(pinching::regularized_prop_integral(&spec, eps, NODES, AUDIT).unwrap().value, 0.0);
            }
            // E vanishes on the chart as well, up to FD error.
            let chart = models::build_chart(&spec).unwrap();
            let audited = ConstantScalar::audit(&chart, AUDIT).unwrap();
            assert!((audited.scalar() - (n * (n - 1)) as f64 / (radius * radius)).abs() <= 1e-6);
            for x in chart.sample_points(10) {
                let geo = chart.geometry_at(&x).unwrap();
                assert!(tensor::norm(&geo.g, &geo.trace_free_ricci()).unwrap() <= 1e-6);
            }
        }
    }
}

#[test]
fn product_pinching_vanishes_pointwise() {
    for n in [3, 4, 5] {
        for (length, r) in [(2.0 * PI, 1.0), (3.0, 0.7)] {
            let spec = product(n, length, r);
            let p = pinching::pinch_functional(&spec, NODES, AUDIT).unwrap();
            // Rounding in the pointwise integrand accumulates with the volume.
            assert!(p.value.abs() <= 1e-12 * p.scale.max(1.0) && p.max_integrand <= 1e-10, "{n}: {p:?}");
            let omega = 2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n);
            assert!((p.volume - length * omega * r.powi(n as i32 - 1)).abs() <= 1e-10 * p.volume);
            let fd = pinching::pinch_functional_fd(&spec, 64, AUDIT).unwrap();
            assert!(fd.abs() <= 1e-6 * p.scale, "{fd:e}");
            let scan = pinching::equality_case_scan(&spec, 20, AUDIT).unwrap();
            let expected = (n as f64 - 2.0) / (n as f64 * r * r);
            assert_eq!(scan.pattern, 20);
            assert!((scan.min_lambda - expected).abs() <= 1e-6, "{} {expected}", scan.min_lambda);
        }
    }
}

/// `Γ(n/2)` by the recurrence, kept separate from the library's.
fn gamma_half(n: usize) -> f64 {
    let (mut g, mut k) = if n % 2 == 0 { (1.0, 2) } else { (PI.sqrt(), 1) };
    while k + 2 <= n {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

#[test]
fn derdzinski_pinching_cancels_nontrivially() {
    for (n, r, frac) in [(3, 2.0, 0.5), (4, 6.0, 0.6), (5, 12.0, 0.7), (4, 2.0, 0.3)] {
        let spec = derdzinski_frac(n, r, frac);
        let p = pinching::pinch_functional(&spec, NODES, AUDIT).unwrap();
        assert!(p.value.abs() <= 1e-6 * p.scale, "{n} {r} {frac}: {p:?}");
        assert!(p.error <= 1e-8 * p.scale);
        assert!(p.max_integrand >= 0.01 * p.scale, "{n} {r} {frac}: {p:?}");
        let fd = pinching::pinch_functional_fd(&spec, NODES, AUDIT).unwrap();
        assert!(fd.abs() <= 1e-6 * p.scale, "{n} {r} {frac}: {fd:e}");
    }
}

#[test]
fn perturbed_profile_breaks_the_cancellation() {
    // A cosine profile is rejected by the constant-R audit; the same audit
    // guards the theorem's hypothesis.
    let err = pinching::pinch_functional(&cosine_warp(4), NODES, AUDIT).unwrap_err();
    assert!(matches!(err, Error::HypothesisViolated { .. }));
    for spec in conformal_corpus(4) {
        assert!(matches!(
            pinching::pinch_functional(&spec, NODES, AUDIT),
            Err(Error::HypothesisViolated { .. })
        ));
    }
}

/// Inversion `y ↦ y/|y|²` on the fiber chart, with its Jacobian.
fn invert(x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = x.len();
    let y2: f64 = x[1..].iter().map(|v| v * v).sum();
    let mut out = x.to_vec();
    for v in &mut out[1..] {
        *v /= y2;
    }
    let jac = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| match (a, b) {
                    (0, 0) => 1.0,
                    (0, _) | (_, 0) => 0.0,
                    _ => ((a == b) as u8 as f64 - 2.0 * x[a] * x[b] / y2) / y2,
                })
                .collect()
        })
        .collect();
    (out, jac)
}

#[test]
fn fiber_inversion_is_an_isometry() {
    let chart = models::build_chart(&derdzinski_frac(3, 2.0, 0.5)).unwrap();
    let audited = ConstantScalar::audit(&chart, AUDIT).unwrap();
    for x in [[0.3, 0.9, 0.4], [1.7, -0.6, 0.8], [2.9, 0.7, -0.7]] {
        let (y, jac) = invert(&x);
        let g = chart.metric_at(&x);
        let gy = chart.metric_at(&y);
        let pulled = Sym2::from_fn(3, |a, b| {
            (0..3).flat_map(|c| (0..3).map(move |d| (c, d))).map(|(c, d)| jac[c][a] * gy.get(c, d) * jac[d][b]).sum()
        });
        assert!((&pulled - &g).max_abs() <= 1e-12);
        let (u, v) = (audited.integrand_at(&x).unwrap(), audited.integrand_at(&y).unwrap());
        assert!((u - v).abs() <= 1e-6 * u.abs().max(1.0), "{u} {v}");
    }
}

/// `(∫ integrand dV, ∫ |E|^{1/3} R dV, ∫ dV)` over the whole n = 3 chart from
/// FD curvature. The fiber disk `|y| ≤ 1` is parametrized by the polar angle
/// `θ` of `S²` (`|y| = tan(θ/2)`) and doubled by the inversion isometry.
fn brute_force_n3(chart: &MetricChart, t_nodes: usize, theta_nodes: usize, phi_nodes: usize) -> [f64; 3] {
    let audited = ConstantScalar::audit(chart, AUDIT).unwrap();
    let period = chart.domain().axes[0].hi - chart.domain().axes[0].lo;
    let gl = GaussLegendre::new(NonZeroUsize::new(theta_nodes).unwrap());
    let mut acc = [0.0; 3];
    for k in 0..t_nodes {
        let t = k as f64 * period / t_nodes as f64;
        for m in 0..phi_nodes {
            let phi = (m as f64 + 0.5) * 2.0 * PI / phi_nodes as f64;
            let mut cell = [0.0; 3];
            for i in 0..3 {
                cell[i] = gl.integrate(0.0, PI / 2.0, |theta| {
                    let rho = (theta / 2.0).tan();
                    let x = [t, rho * phi.cos(), rho * phi.sin()];
                    let g = chart.metric_at(&x);
                    let vol = (g.get(0, 0) * g.get(1, 1) * g.get(2, 2)).sqrt();
                    let jac = rho * 0.5 * (1.0 + rho * rho);
                    let f = match i {
                        0 => audited.integrand_at(&x).unwrap(),
                        1 => {
                            let geo = chart.geometry_at(&x).unwrap();
                            let e = tensor::norm(&geo.g, &geo.trace_free_ricci()).unwrap();
                            e.powf(1.0 / 3.0) * geo.scalar
                        }
                        _ => 1.0,
                    };
                    f * vol * jac
                });
            }
            for i in 0..3 {
                acc[i] += 2.0 * cell[i] * (period / t_nodes as f64) * (2.0 * PI / phi_nodes as f64);
            }
        }
    }
    acc
}

#[test]
fn brute_force_volume_quadrature_matches_reduced_integral() {
    let spec = derdzinski_frac(3, 2.0, 0.5);
    let chart = models::build_chart(&spec).unwrap();
    assert_eq!(chart.domain().axes[0].lo, 0.0);
    let p = pinching::pinch_functional(&spec, NODES, AUDIT).unwrap();
    let [value, scale, volume] = brute_force_n3(&chart, 96, 16, 3);
    assert!((volume - p.volume).abs() <= 1e-9 * p.volume, "{volume} {}", p.volume);
    assert!((scale - p.scale).abs() <= 1e-6 * p.scale, "{scale} {}", p.scale);
    assert!(value.abs() <= 1e-6 * p.scale, "{value:e}");
}

#[test]
fn regularized_integrals_form_a_cauchy_series() {
    for spec in [sphere(4, 1.0), product(4, 2.0 * PI, 1.0), derdzinski_frac(3, 2.0, 0.5), derdzinski_frac(4, 6.0, 0.6), derdzinski_frac(5, 12.0, 0.7)] {
        let series: Vec<f64> = [1e-1, 1e-2, 1e-3]
            .into_iter()
            .map(|eps| pinching::regularized_prop_integral(&spec, eps, NODES, AUDIT).unwrap().value)
            .collect();
        for v in &series {
            assert!(v.abs() <= 1e-6, "{series:?}");
        }
        assert!((series[2] - series[1]).abs() <= (series[1] - series[0]).abs() + 1e-12, "{series:?}");
    }
}

#[test]
fn regularized_integrand_matches_chart_curvature() {
    // Q from the orthonormal-frame closed form against Q from the FD chart.
    let spec = derdzinski_frac(4, 6.0, 0.6);
    let chart = models::build_chart(&spec).unwrap();
    for x in chart.sample_points(10) {
        let geo = chart.geometry_at(&x).unwrap();
        let e = geo.trace_free_ricci();
        let q = tensor::q_invariant(&geo.g, &geo.riemann, &geo.ricci, &e).unwrap();
        let norm = tensor::norm(&geo.g, &e).unwrap();
        assert!(q.defect() <= 1e-6 * norm.powi(3).max(1.0), "{q:?}");
        // tr E³ for E = diag(-(n-1)λ, λ, λ, λ).
        let cf = models::closed_form_curvature(&spec, x[0]).unwrap();
        let lambda = cf.fiber_lambda(spec.dim);
        let (n, r) = (4.0, cf.scalar);
        let cubic = lambda.powi(3) * ((n - 1.0) - (n - 1.0f64).powi(3));
        let expected = r * norm * norm / (n - 1.0) + n / (n - 2.0) * cubic;
        assert!((q.direct - expected).abs() <= 1e-6 * norm.powi(3).max(1.0), "{} {expected}", q.direct);
    }
}

#[test]
fn equality_scan_finds_the_pattern_on_every_model() {
    let specs: Vec<ModelSpec> = [3, 4, 5]
        .into_iter()
        .flat_map(|n| [sphere(n, 1.0), product(n, 2.0 * PI, 1.0), derdzinski_frac(n, 6.0, 0.6)])
        .collect();
    for spec in specs {
        let scan = pinching::equality_case_scan(&spec, 50, AUDIT).unwrap();
        assert_eq!(scan.pattern_fraction, 1.0, "{scan:?}");
        assert!(scan.max_okumura_gap <= 1e-8, "{scan:?}");
        if scan.pattern > 0 {
            assert!(scan.min_lambda > 0.0, "{scan:?}");
        }
    }
}
