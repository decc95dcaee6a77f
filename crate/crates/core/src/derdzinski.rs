//! Periodic warping functions for warped products `S¹ × S^{n-1}` with
//! constant scalar curvature.
//!
//! For `g = dt² + F(t)² g_{S^{n-1}}` the scalar curvature is
//!
//! ```text
//! R = -2(n-1) F''/F + (n-1)(n-2)(1 - F'²)/F²
//! ```
//!
//! Holding `R` constant gives the warping equation
//!
//! ```text
//! F'' = ½ [ (n-2)(1 - F'²)/F - R F/(n-1) ]
//! ```
//!
//! with first integral `F^{n-2}(1 - F'²) - R F^n/(n(n-1)) = C`. Writing
//! `F'² = V(F) = 1 - C F^{2-n} - R F²/(n(n-1))`, the equilibrium is
//! `F₀ = √((n-1)(n-2)/R)` with `C_max = (2/n) F₀^{n-2}`; every `C` in
//! `(0, C_max)` gives a non-constant positive periodic orbit oscillating
//! between the two roots `F_min < F₀ < F_max` of `V`.
//!
//! The period comes from quadrature of `dF/√V` and the profile from ODE
//! integration started at the lower turning point. The two are
//! cross-checked.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::ode::{self, Flow, Options};
use crate::quad;
use crate::tensor::Dim;
use crate::{Error, Result};

/// Conserved-quantity budget on the sampled grid.
pub const CONSERVED_BUDGET: f64 = 1e-9;
/// Periodicity and time-reversal budget.
pub const CLOSURE_BUDGET: f64 = 1e-8;
/// Trigonometric interpolation budget.
pub const INTERPOLATION_BUDGET: f64 = 1e-9;
/// Smallest accepted grid.
pub const MIN_GRID: usize = 64;
/// Grid used when the solution feeds a chart: curvature takes two
/// derivatives of the interpolant, so it needs more nodes than the budgets do.
pub const CHART_GRID: usize = 1024;

/// Parameters of the warping equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpOde {
    dim: Dim,
    scalar: f64,
    c: f64,
}

/// `F₀ = √((n-1)(n-2)/R)`, the constant solution.
pub fn static_solution(dim: Dim, scalar: f64) -> Result<f64> {
    if !(scalar > 0.0) {
        return Err(Error::NonPositiveCurvature(scalar));
    }
    let n = dim.as_f64();
    Ok(((n - 1.0) * (n - 2.0) / scalar).sqrt())
}

/// Upper end `C_max = (2/n) F₀^{n-2}` of the open window `(0, C_max)`.
pub fn admissible_range(dim: Dim, scalar: f64) -> Result<(f64, f64)> {
    let f0 = static_solution(dim, scalar)?;
    let n = dim.as_f64();
    Ok((0.0, 2.0 / n * f0.powf(n - 2.0)))
}

impl WarpOde {
    /// Fails unless `R > 0` and `0 < C < C_max`.
    pub fn new(dim: Dim, scalar: f64, c: f64) -> Result<Self> {
        let (_, c_max) = admissible_range(dim, scalar)?;
        if !(c > 0.0 && c < c_max) {
            return Err(Error::NoPeriodicOrbit { c, c_max });
        }
        Ok(WarpOde { dim, scalar, c })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c_max(&self) -> f64 {
        admissible_range(self.dim, self.scalar).map(|r| r.1).unwrap_or(f64::NAN)
    }

    fn kappa(&self) -> f64 {
        let n = self.dim.as_f64();
        self.scalar / (n * (n - 1.0))
    }

    /// `V(F) = 1 - C F^{2-n} - R F²/(n(n-1))`, equal to `F'²` along orbits.
    pub fn potential(&self, f: f64) -> f64 {
        let n = self.dim.as_f64();
        1.0 - self.c * f.powf(2.0 - n) - self.kappa() * f * f
    }

    fn potential_derivative(&self, f: f64) -> f64 {
        let n = self.dim.as_f64();
        (n - 2.0) * self.c * f.powf(1.0 - n) - 2.0 * self.kappa() * f
    }

    /// `F^{n-2}(1 - F'²) - R F^n/(n(n-1))`.
    pub fn first_integral(&self, f: f64, df: f64) -> f64 {
        let n = self.dim.as_f64();
        f.powf(n - 2.0) * (1.0 - df * df) - self.kappa() * f.powf(n)
    }

    /// `F''` from the warping equation.
    pub fn acceleration(&self, f: f64, df: f64) -> f64 {
        let n = self.dim.as_f64();
        0.5 * ((n - 2.0) * (1.0 - df * df) / f - self.scalar * f / (n - 1.0))
    }

    /// Angular frequency `√(R/(n-1))` of small oscillations about `F₀`.
    pub fn small_oscillation_frequency(&self) -> f64 {
        (self.scalar / (self.dim.as_f64() - 1.0)).sqrt()
    }
}

/// The two positive roots `F_min < F_max` of the potential.
pub fn turning_points(ode: &WarpOde) -> Result<(f64, f64)> {
    let f0 = static_solution(ode.dim, ode.scalar)?;
    let outer = (1.0 / ode.kappa()).sqrt();
    let lo = root(ode, 0.0, f0)?;
    let hi = root(ode, f0, outer)?;
    Ok((lo, hi))
}

/// Bisection on a sign change of `V` followed by Newton polishing.
fn root(ode: &WarpOde, a: f64, b: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let va = if a > 0.0 { ode.potential(a) } else { f64::NEG_INFINITY };
    let increasing = va < 0.0;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if (ode.potential(m) < 0.0) == increasing {
            a = m;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    for _ in 0..4 {
        let d = ode.potential_derivative(x);
        if d == 0.0 {
            break;
        }
        let next = x - ode.potential(x) / d;
        if !(next > 0.0) || (next - x).abs() > (b - a).max(1e-14 * x) * 4.0 {
            break;
        }
        x = next;
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Integrator {
            quantity: "turning point",
            defect: ode.potential(x).abs(),
        });
    }
    Ok(x)
}

/// Coefficients (constant term first) of `W(F) F^{n-2}` where
/// `W = V/((F - F_min)(F_max - F))`.
///
/// `F^{n-2} V(F) = F^{n-2} - C - κ F^n` is a polynomial vanishing at both
/// turning points; dividing the roots out exactly avoids the cancellation in
/// `V` when the orbit is close to `F₀`.
fn deflated_potential(ode: &WarpOde, fmin: f64, fmax: f64) -> Vec<f64> {
    let n = ode.dim.get();
    let mut p = alloc::vec![0.0; n + 1];
    p[0] = -ode.c;
    p[n - 2] += 1.0;
    p[n] = -ode.kappa();
    for r in [fmax, fmin] {
        let mut q = alloc::vec![0.0; p.len() - 1];
        let mut carry = 0.0;
        for i in (1..p.len()).rev() {
            carry = p[i] + r * carry;
            q[i - 1] = carry;
        }
        p = q;
    }
    // (F - F_min)(F - F_max) = -(F - F_min)(F_max - F)
    p.iter().map(|v| -v).collect()
}

fn period_with(ode: &WarpOde, fmin: f64, fmax: f64, nodes: usize) -> f64 {
    // F = a - b cos θ absorbs both square-root endpoint singularities:
    // dF/√V = dθ/√W, smooth and even in θ.
    let a = 0.5 * (fmax + fmin);
    let b = 0.5 * (fmax - fmin);
    let q = deflated_potential(ode, fmin, fmax);
    let n = ode.dim.get() as i32;
    let integrand = |theta: f64| {
        let f = a - b * theta.cos();
        let wq = q.iter().rev().fold(0.0, |acc, c| acc * f + c);
        (f.powi(n - 2) / wq).sqrt()
    };
    2.0 * quad::midpoint(integrand, 0.0, PI, nodes)
}

/// `Λ = 2∫ dF/√V(F)` over `[F_min, F_max]` with an order-doubling estimate.
pub fn period_estimate(ode: &WarpOde) -> Result<quad::Estimate> {
    let (fmin, fmax) = turning_points(ode)?;
    let mut nodes = 64;
    let mut prev = period_with(ode, fmin, fmax, nodes);
    loop {
        nodes *= 2;
        let next = period_with(ode, fmin, fmax, nodes);
        let err = (next - prev).abs();
        if err <= 1e-13 * next || nodes >= 1 << 16 {
            if !(err <= 1e-8 * next) {
                return Err(Error::Integrator {
                    quantity: "period",
                    defect: err / next,
                });
            }
            return Ok(quad::Estimate { value: next, error: err });
        }
        prev = next;
    }
}

pub fn period(ode: &WarpOde) -> Result<f64> {
    Ok(period_estimate(ode)?.value)
}

/// Period from direct time integration: twice the time from `F_min` to the
/// next turning point, located on the dense output.
pub fn period_by_integration(ode: &WarpOde) -> Result<f64> {
    let (fmin, _) = turning_points(ode)?;
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], ode.acceleration(y[0], y[1])];
    let horizon = 4.0 * PI / ode.small_oscillation_frequency() * 10.0;
    let mut half = None;
    ode::dopri5(rhs, 0.0, [fmin, 0.0], horizon, &Options::default(), |step| {
        let a = step.eval(step.t_start())[1];
        let b = step.eval(step.t_end())[1];
        if step.t_start() > 0.0 && a > 0.0 && b <= 0.0 {
            let (mut lo, mut hi) = (step.t_start(), step.t_end());
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                if step.eval(mid)[1] > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            half = Some(0.5 * (lo + hi));
            return Flow::Stop;
        }
        Flow::Continue
    })?;
    half.map(|h| 2.0 * h).ok_or(Error::Integrator {
        quantity: "turning time",
        defect: f64::INFINITY,
    })
}

/// Coefficients within this factor of the spectral noise floor are dropped.
const NOISE_MARGIN: f64 = 10.0;

/// Real trigonometric interpolant of `N` equispaced samples over a period.
#[derive(Debug, Clone, PartialEq)]
struct TrigInterpolant {
    period: f64,
    /// `(a_k, b_k)` for `k = 0..=N/2`, already halved where appropriate.
    coeffs: Vec<(f64, f64)>,
}

impl TrigInterpolant {
    fn new(period: f64, samples: &[f64]) -> Self {
        let n = samples.len();
        let half = n / 2;
        let mut coeffs = Vec::with_capacity(half + 1);
        for k in 0..=half {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, v) in samples.iter().enumerate() {
                let ang = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
                let (s, c) = ang.sin_cos();
                a += v * c;
                b += v * s;
            }
            let w = if k == 0 || (n % 2 == 0 && k == half) { 1.0 } else { 2.0 };
            coeffs.push((w * a / n as f64, w * b / n as f64));
        }
        if n % 2 == 0 {
            // The Nyquist sine mode vanishes at every node.
            coeffs[half].1 = 0.0;
        }
        // Integrator noise leaves a flat tail in the spectrum; derivatives
        // would amplify it by k^m, so the series stops where it meets the
        // plateau measured on the top quarter of the modes.
        let mag = |c: &(f64, f64)| c.0.hypot(c.1);
        let floor = coeffs[3 * half / 4..].iter().map(mag).fold(0.0f64, f64::max);
        let keep = coeffs.iter().rposition(|c| mag(c) > NOISE_MARGIN * floor).map_or(1, |k| k + 1);
        coeffs.truncate(keep.max(1));
        TrigInterpolant { period, coeffs }
    }

    /// Value and first derivative at `t`.
    fn eval(&self, t: f64) -> (f64, f64) {
        let w = 2.0 * PI / self.period;
        let (s1, c1) = (w * t).sin_cos();
        let (mut s, mut c) = (0.0, 1.0);
        let (mut v, mut d) = (0.0, 0.0);
        for (k, &(a, b)) in self.coeffs.iter().enumerate() {
            v += a * c + b * s;
            d += k as f64 * w * (b * c - a * s);
            let next_c = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = next_c;
        }
        (v, d)
    }
}

/// A periodic warping function sampled on a uniform grid over one period.
///
/// `F(0) = F_min` and `F'(0) = 0`. Between grid points `F` and `F'` are
/// evaluated by trigonometric interpolation of their own samples; `F''` is the
/// derivative of the `F'` interpolant.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpSolution {
    ode: WarpOde,
    period: f64,
    fmin: f64,
    fmax: f64,
    f: Vec<f64>,
    df: Vec<f64>,
    f_interp: TrigInterpolant,
    df_interp: TrigInterpolant,
    defects: SolutionDefects,
}

/// Audited errors of a [`WarpSolution`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionDefects {
    /// `max |I(F, F') - C|` over the grid.
    pub conserved: f64,
    /// `max(|F(Λ) - F(0)|, |F'(Λ) - F'(0)|)`.
    pub closure: f64,
    /// `max |F(Λ - t) - F(t)|` over the grid.
    pub symmetry: f64,
    /// Half-grid interpolation error at the odd nodes (an upper bound for
    /// the full-grid interpolant).
    pub interpolation: f64,
    /// `|Λ_quadrature - Λ_integration|`.
    pub period_agreement: f64,
}

impl SolutionDefects {
    pub fn within_budget(&self) -> bool {
        self.conserved <= CONSERVED_BUDGET
            && self.closure <= CLOSURE_BUDGET
            && self.symmetry <= CLOSURE_BUDGET
            && self.interpolation <= INTERPOLATION_BUDGET
    }
}

/// Integrates one period from `(F_min, 0)` and resamples on `grid_n` points.
pub fn solve(ode: &WarpOde, grid_n: usize) -> Result<WarpSolution> {
    if grid_n < MIN_GRID {
        return Err(Error::GridTooSmall(grid_n));
    }
    let (fmin, fmax) = turning_points(ode)?;
    let period = period(ode)?;
    let rhs = |_t: f64, y: &[f64; 2]| [y[1], ode.acceleration(y[0], y[1])];
    let dt = period / grid_n as f64;
    let mut f = Vec::with_capacity(grid_n);
    let mut df = Vec::with_capacity(grid_n);
    f.push(fmin);
    df.push(0.0);
    let opts = Options {
        max_step: dt,
        ..Options::default()
    };
    let end = ode::dopri5(rhs, 0.0, [fmin, 0.0], period, &opts, |step| {
        while f.len() < grid_n {
            let t = f.len() as f64 * dt;
            if t > step.t_end() {
                break;
            }
            let y = step.eval(t);
            f.push(y[0]);
            df.push(y[1]);
        }
        Flow::Continue
    })?;
    if f.len() != grid_n {
        return Err(Error::Integrator {
            quantity: "grid fill",
            defect: (grid_n - f.len()) as f64,
        });
    }
    let closure = (end.y[0] - fmin).abs().max(end.y[1].abs());
    let time_oracle = period_by_integration(ode)?;
    let mut sol = WarpSolution::assemble(*ode, period, fmin, fmax, f, df, closure)?;
    sol.defects.period_agreement = (time_oracle - period).abs();
    check_budget(&sol.defects)?;
    Ok(sol)
}

fn check_budget(d: &SolutionDefects) -> Result<()> {
    let checks = [
        ("conserved quantity", d.conserved, CONSERVED_BUDGET),
        ("periodicity", d.closure, CLOSURE_BUDGET),
        ("time reversal", d.symmetry, CLOSURE_BUDGET),
        ("interpolation", d.interpolation, INTERPOLATION_BUDGET),
    ];
    for (quantity, defect, budget) in checks {
        if !(defect <= budget) {
            return Err(Error::Integrator { quantity, defect });
        }
    }
    Ok(())
}

impl WarpSolution {
    fn assemble(
        ode: WarpOde,
        period: f64,
        fmin: f64,
        fmax: f64,
        f: Vec<f64>,
        df: Vec<f64>,
        closure: f64,
    ) -> Result<Self> {
        let n = f.len();
        if f.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::InvalidModel("warping function must stay positive".into()));
        }
        let conserved = f
            .iter()
            .zip(&df)
            .fold(0.0f64, |m, (&a, &b)| m.max((ode.first_integral(a, b) - ode.c).abs()));
        let symmetry = (1..n).fold(0.0f64, |m, j| m.max((f[n - j] - f[j]).abs()));
        let interpolation = half_grid_error(period, &f).max(half_grid_error(period, &df));
        Ok(WarpSolution {
            f_interp: TrigInterpolant::new(period, &f),
            df_interp: TrigInterpolant::new(period, &df),
            ode,
            period,
            fmin,
            fmax,
            f,
            df,
            defects: SolutionDefects {
                conserved,
                closure,
                symmetry,
                interpolation,
                period_agreement: 0.0,
            },
        })
    }

    /// Rebuilds a solution from grid samples (for example a stored table).
    ///
    /// The samples must start at the lower turning point; the defects are
    /// recomputed and must meet the same budgets as [`solve`]. Closure is
    /// measured by the interpolant's wrap-around continuity.
    pub fn from_samples(ode: WarpOde, period: f64, f: Vec<f64>, df: Vec<f64>) -> Result<Self> {
        if f.len() != df.len() {
            return Err(Error::DimensionMismatch(f.len(), df.len()));
        }
        if f.len() < MIN_GRID {
            return Err(Error::GridTooSmall(f.len()));
        }
        if !(period > 0.0) {
            return Err(Error::InvalidModel("period must be positive".into()));
        }
        let (fmin, fmax) = turning_points(&ode)?;
        let closure = (f[0] - fmin).abs().max(df[0].abs());
        let sol = Self::assemble(ode, period, fmin, fmax, f, df, closure)?;
        check_budget(&sol.defects)?;
        Ok(sol)
    }

    pub fn ode(&self) -> &WarpOde {
        &self.ode
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn fmin(&self) -> f64 {
        self.fmin
    }

    pub fn fmax(&self) -> f64 {
        self.fmax
    }

    pub fn grid_len(&self) -> usize {
        self.f.len()
    }

    /// `(t, F, F')` at grid point `k`.
    pub fn grid_point(&self, k: usize) -> (f64, f64, f64) {
        (k as f64 * self.period / self.f.len() as f64, self.f[k], self.df[k])
    }

    pub fn samples(&self) -> (&[f64], &[f64]) {
        (&self.f, &self.df)
    }

    pub fn defects(&self) -> &SolutionDefects {
        &self.defects
    }

    /// `(F, F', F'')` at any `t`; periodic in `t`.
    pub fn eval(&self, t: f64) -> (f64, f64, f64) {
        let (f, _) = self.f_interp.eval(t);
        let (df, ddf) = self.df_interp.eval(t);
        (f, df, ddf)
    }
}

/// Error of the interpolant built on the even nodes, measured at the odd ones.
fn half_grid_error(period: f64, samples: &[f64]) -> f64 {
    let even: Vec<f64> = samples.iter().step_by(2).copied().collect();
    let coarse = TrigInterpolant::new(period, &even);
    let h = period / samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .skip(1)
        .step_by(2)
        .fold(0.0f64, |m, (j, &v)| m.max((coarse.eval(j as f64 * h).0 - v).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ode(n: usize, r: f64, frac: f64) -> WarpOde {
        let d = Dim::new(n).unwrap();
        let (_, c_max) = admissible_range(d, r).unwrap();
        WarpOde::new(d, r, frac * c_max).unwrap()
    }

    #[test]
    fn static_solution_values() {
        let f = |n, r| static_solution(Dim::new(n).unwrap(), r).unwrap();
        assert!((f(3, 6.0) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((f(4, 6.0) - 1.0).abs() < 1e-15);
        assert!((f(10, 72.0) - 1.0).abs() < 1e-15);
        assert_eq!(static_solution(Dim::new(4).unwrap(), 0.0), Err(Error::NonPositiveCurvature(0.0)));
    }

    #[test]
    fn admissible_window() {
        let c = |n, r| admissible_range(Dim::new(n).unwrap(), r).unwrap().1;
        assert!((c(3, 6.0) - 2.0 / 3.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((c(4, 6.0) - 0.5).abs() < 1e-15);
        let d = Dim::new(4).unwrap();
        assert!(matches!(WarpOde::new(d, 6.0, 0.5), Err(Error::NoPeriodicOrbit { .. })));
        assert!(matches!(WarpOde::new(d, 6.0, 0.0), Err(Error::NoPeriodicOrbit { .. })));
    }

    #[test]
    fn turning_points_for_quartic_case() {
        // n = 4, R = 6: V = 1 - C/F² - F²/2, so F² = 1 ± √(1 - 2C).
        let o = WarpOde::new(Dim::new(4).unwrap(), 6.0, 0.4).unwrap();
        let (lo, hi) = turning_points(&o).unwrap();
        let disc = (1.0f64 - 0.8).sqrt();
        assert!((lo - (1.0 - disc).sqrt()).abs() < 1e-14);
        assert!((hi - (1.0 + disc).sqrt()).abs() < 1e-14);
        assert!(o.potential(lo).abs() < 1e-12 && o.potential(hi).abs() < 1e-12);
    }

    #[test]
    fn turning_points_limits() {
        let o = ode(4, 6.0, 1e-6);
        let (lo, hi) = turning_points(&o).unwrap();
        assert!(lo < 1e-2);
        assert!((hi - 2f64.sqrt()).abs() < 1e-5);
        let o = ode(4, 6.0, 1.0 - 1e-8);
        let (lo, hi) = turning_points(&o).unwrap();
        assert!((lo - 1.0).abs() < 1e-3 && (hi - 1.0).abs() < 1e-3);
    }

    #[test]
    fn period_quadrature_matches_time_integration() {
        let o = WarpOde::new(Dim::new(4).unwrap(), 6.0, 0.45).unwrap();
        let est = period_estimate(&o).unwrap();
        assert!(est.error <= 1e-8 * est.value);
        let t = period_by_integration(&o).unwrap();
        assert!((t - est.value).abs() < 1e-7, "{} vs {}", t, est.value);
    }

    #[test]
    fn period_small_oscillation_limit() {
        let o = ode(5, 12.0, 0.999);
        let lam = period(&o).unwrap();
        let harmonic = 2.0 * PI / o.small_oscillation_frequency();
        assert!((lam / harmonic - 1.0).abs() < 0.01);
    }

    #[test]
    fn interpolant_reproduces_trig_polynomial() {
        let p = 3.0;
        let w = 2.0 * PI / p;
        let g = |t: f64| 1.0 + 0.3 * (w * t).cos() - 0.2 * (3.0 * w * t).sin();
        let samples: Vec<f64> = (0..16).map(|j| g(j as f64 * p / 16.0)).collect();
        let it = TrigInterpolant::new(p, &samples);
        for &t in &[0.1, 1.37, 2.9] {
            let (v, d) = it.eval(t);
            assert!((v - g(t)).abs() < 1e-14);
            let dg = -0.3 * w * (w * t).sin() - 0.6 * w * (3.0 * w * t).cos();
            assert!((d - dg).abs() < 1e-13);
        }
    }

    #[test]
    fn solution_meets_budgets() {
        let o = WarpOde::new(Dim::new(4).unwrap(), 6.0, 0.45).unwrap();
        let sol = solve(&o, 256).unwrap();
        let d = sol.defects();
        assert!(d.within_budget(), "{d:?}");
        assert!(d.period_agreement < 1e-7);
        let max = sol.samples().0.iter().fold(0.0f64, |m, &v| m.max(v));
        let min = sol.samples().0.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        assert!((min - sol.fmin()).abs() < 1e-8);
        // The maximum sits on the grid at t = Λ/2.
        assert!((max - sol.fmax()).abs() < 1e-8);
        // Interpolated F'' agrees with the equation.
        for k in 0..7 {
            let t = 0.13 * k as f64 * sol.period();
            let (f, df, ddf) = sol.eval(t);
            assert!((ddf - o.acceleration(f, df)).abs() < 1e-8);
        }
        assert_eq!(solve(&o, 32).unwrap_err(), Error::GridTooSmall(32));
    }

    #[test]
    fn samples_round_trip() {
        let o = ode(3, 2.0, 0.5);
        let sol = solve(&o, 256).unwrap();
        let (f, df) = sol.samples();
        let back = WarpSolution::from_samples(o, sol.period(), f.to_vec(), df.to_vec()).unwrap();
        assert_eq!(back.eval(0.77), sol.eval(0.77));
    }
}
