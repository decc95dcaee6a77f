mod common;

use cfpinch_core::derdzinski::{self, WarpOde, WarpSolution, CLOSURE_BUDGET, CONSERVED_BUDGET};
use cfpinch_core::models::{self, ModelKind, ModelSpec, WarpProfile};
use cfpinch_core::pinching;
use cfpinch_core::tensor::{self, EigenPattern};
use common::dim;
use std::f64::consts::PI;

const SWEEP_N: [usize; 3] = [3, 4, 5];
const SWEEP_R: [f64; 3] = [2.0, 6.0, 12.0];
const SWEEP_FRAC: [f64; 3] = [0.25, 0.5, 0.75];

fn sweep() -> impl Iterator<Item = (usize, f64, f64)> {
    SWEEP_N
        .into_iter()
        .flat_map(|n| SWEEP_R.into_iter().flat_map(move |r| SWEEP_FRAC.into_iter().map(move |f| (n, r, f))))
}

fn ode(n: usize, r: f64, frac: f64) -> WarpOde {
    let (_, c_max) = derdzinski::admissible_range(dim(n), r).unwrap();
    WarpOde::new(dim(n), r, frac * c_max).unwrap()
}

/// Classical fixed-step RK4, independent of the adaptive integrator.
fn rk4(ode: &WarpOde, y0: [f64; 2], t_end: f64, steps: usize) -> Vec<[f64; 2]> {
    let f = |y: [f64; 2]| [y[1], ode.acceleration(y[0], y[1])];
    let h = t_end / steps as f64;
    let mut out = vec![y0];
    let mut y = y0;
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        out.push(y);
    }
    out
}

#[test]
fn sweep_meets_budgets_and_closes_under_rk4() {
    for (n, r, frac) in sweep() {
        let ode = ode(n, r, frac);
        let sol = derdzinski::solve(&ode, derdzinski::CHART_GRID).unwrap();
        let d = sol.defects();
        assert!(d.conserved <= CONSERVED_BUDGET, "{n} {r} {frac}: {d:?}");
        assert!(d.closure <= CLOSURE_BUDGET && d.symmetry <= CLOSURE_BUDGET, "{n} {r} {frac}: {d:?}");
        assert!(d.period_agreement <= 1e-9, "{n} {r} {frac}: {d:?}");
        assert!(ode.potential(sol.fmin()).abs() <= 1e-12 && ode.potential(sol.fmax()).abs() <= 1e-12);

        // 16 RK4 steps per grid cell.
        let per_cell = 16;
        let grid = sol.grid_len();
        let path = rk4(&ode, [sol.fmin(), 0.0], sol.period(), per_cell * grid);
        let (f, df) = sol.samples();
        for k in 0..grid {
            let y = path[k * per_cell];
            assert!((y[0] - f[k]).abs() <= 1e-9 && (y[1] - df[k]).abs() <= 1e-9, "{n} {r} {frac} k={k}");
        }
        let end = path.last().unwrap();
        assert!((end[0] - sol.fmin()).abs() <= 1e-8 && end[1].abs() <= 1e-8, "{n} {r} {frac}: {end:?}");
    }
}

#[test]
fn built_chart_has_constant_scalar_curvature() {
    for (n, r, frac) in sweep() {
        let sol = derdzinski::solve(&ode(n, r, frac), derdzinski::CHART_GRID).unwrap();
        let spec = ModelSpec::new(dim(n), ModelKind::Warped(WarpProfile::Solution(sol))).unwrap();
        let chart = models::build_chart(&spec).unwrap();
        for x in chart.sample_points(20) {
            let s = chart.scalar_at(&x).unwrap();
            assert!((s - r).abs() <= 1e-6, "{n} {r} {frac}: R = {s}");
            // Off-grid closed form from the interpolated profile.
            let cf = models::closed_form_curvature(&spec, x[0]).unwrap();
            assert!((cf.scalar - r).abs() <= 1e-7, "{n} {r} {frac}: {}", cf.scalar);
            let geo = chart.geometry_at(&x).unwrap();
            match tensor::eigen_pattern(&geo.g, &geo.trace_free_ricci(), pinching::PATTERN_TOL).unwrap() {
                EigenPattern::Pattern { lambda } => {
                    assert!(lambda >= -1e-8, "{n} {r} {frac}: {lambda}");
                    let expected = cf.fiber_lambda(dim(n));
                    assert!((lambda - expected).abs() <= 1e-6 * expected.abs().max(1.0), "{lambda} {expected}");
                }
                other => panic!("{n} {r} {frac}: {other:?}"),
            }
        }
    }
}

#[test]
fn small_oscillations_approach_linearized_period() {
    for (n, r) in [(3, 2.0), (4, 6.0), (5, 12.0)] {
        let ode = ode(n, r, 1.0 - 1e-6);
        let linear = 2.0 * PI / ode.small_oscillation_frequency();
        let period = derdzinski::period(&ode).unwrap();
        assert!((period - linear).abs() <= 1e-4 * linear, "{period} {linear}");
        assert!((ode.small_oscillation_frequency().powi(2) - r / (n as f64 - 1.0)).abs() <= 1e-12);
    }
}

#[test]
fn quadrature_and_time_integration_periods_agree() {
    for n in [3, 4, 5, 6] {
        for frac in [0.999, 0.9, 0.6, 0.3, 0.1, 0.01] {
            let ode = ode(n, 6.0, frac);
            let q = derdzinski::period(&ode).unwrap();
            let t = derdzinski::period_by_integration(&ode).unwrap();
            assert!((q - t).abs() <= 1e-9 * q, "{n} {frac}: {q} {t}");
        }
    }
}

#[test]
fn table_samples_rebuild_the_same_solution() {
    let ode = ode(4, 6.0, 0.5);
    let sol = derdzinski::solve(&ode, 256).unwrap();
    let (f, df) = sol.samples();
    let back = WarpSolution::from_samples(ode, sol.period(), f.to_vec(), df.to_vec()).unwrap();
    for t in [0.1, 1.3, 2.7] {
        assert_eq!(sol.eval(t), back.eval(t));
    }
}

#[test]
fn inadmissible_constants_are_rejected() {
    let (_, c_max) = derdzinski::admissible_range(dim(4), 6.0).unwrap();
    assert!(WarpOde::new(dim(4), 6.0, c_max).is_err());
    assert!(WarpOde::new(dim(4), 6.0, 0.0).is_err());
    assert!(WarpOde::new(dim(4), -1.0, 0.1).is_err());
    assert!(derdzinski::solve(&ode(4, 6.0, 0.5), 16).is_err());
}
