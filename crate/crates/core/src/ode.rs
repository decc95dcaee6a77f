//! Adaptive Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! Each accepted step hands the observer a [`DenseStep`], a fourth-order
//! interpolant valid on that step, so callers can resample on a fixed grid or
//! locate events without restricting the step size.

#[allow(unused_imports)]
use num_traits::Float;
use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Upper bound on the step length; `f64::INFINITY` for none.
    pub max_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            rtol: 1e-11,
            atol: 1e-13,
            max_steps: 1_000_000,
            max_step: f64::INFINITY,
        }
    }
}

/// Interpolant over one accepted step `[t0, t0 + h]`.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const D: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; D]; 5],
}

impl<const D: usize> DenseStep<D> {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    /// State at `t`; intended for `t` inside the step.
    pub fn eval(&self, t: f64) -> [f64; D] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        core::array::from_fn(|i| {
            r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])))
        })
    }
}

/// Whether integration should continue after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

/// Final state of an integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const D: usize> {
    pub t: f64,
    pub y: [f64; D],
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const D: usize>(y: &[f64; D], h: f64, terms: &[(f64, &[f64; D])]) -> [f64; D] {
    core::array::from_fn(|i| {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        y[i] + h * s
    })
}

fn weighted_rms<const D: usize>(v: &[f64; D], y0: &[f64; D], y1: &[f64; D], opts: &Options) -> f64 {
    let mut s = 0.0;
    for i in 0..D {
        let sc = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
        s += (v[i] / sc).powi(2);
    }
    (s / D as f64).sqrt()
}

fn initial_step<const D: usize>(
    rhs: &mut impl FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: &[f64; D],
    f0: &[f64; D],
    dir: f64,
    opts: &Options,
) -> f64 {
    let d0 = weighted_rms(y0, y0, y0, opts);
    let d1 = weighted_rms(f0, y0, y0, opts);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = axpy(y0, dir * h0, &[(1.0, f0)]);
    let f1 = rhs(t0 + dir * h0, &y1);
    let diff: [f64; D] = core::array::from_fn(|i| f1[i] - f0[i]);
    let d2 = weighted_rms(&diff, y0, y0, opts) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(opts.max_step)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t_end`.
///
/// `observer` sees every accepted step and may stop the run early, in which
/// case the returned outcome is the state at the end of that step.
pub fn dopri5<const D: usize>(
    mut rhs: impl FnMut(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    opts: &Options,
    mut observer: impl FnMut(&DenseStep<D>) -> Flow,
) -> Result<Outcome<D>> {
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    let mut h = dir * initial_step(&mut rhs, t0, &y0, &k1, dir, opts);
    let mut accepted = 0;
    let mut rejected = 0;
    let mut last_rejected = false;

    while dir * (t_end - t) > 0.0 {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::Integrator {
                quantity: "step count",
                defect: (t_end - t).abs(),
            });
        }
        if h.abs() > opts.max_step {
            h = dir * opts.max_step;
        }
        if dir * (t + 1.01 * h - t_end) > 0.0 {
            h = t_end - t;
        }
        if h.abs() <= 16.0 * f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::Integrator {
                quantity: "step size",
                defect: h.abs(),
            });
        }

        let k2 = rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = rhs(t + h, &y1);

        let err_vec = axpy(
            &[0.0; D],
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = weighted_rms(&err_vec, &y, &y1, opts);

        if err <= 1.0 {
            let r2: [f64; D] = core::array::from_fn(|i| y1[i] - y[i]);
            let r3: [f64; D] = core::array::from_fn(|i| h * k1[i] - r2[i]);
            let r4: [f64; D] = core::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
            let r5 = axpy(
                &[0.0; D],
                h,
                &[(D1, &k1), (D3, &k3), (D4, &k4), (D5, &k5), (D6, &k6), (D7, &k7)],
            );
            let step = DenseStep {
                t0: t,
                h,
                rcont: [y, r2, r3, r4, r5],
            };
            accepted += 1;
            t += h;
            y = y1;
            k1 = k7;
            if observer(&step) == Flow::Stop {
                break;
            }
            let mut fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
            if last_rejected {
                fac = fac.min(1.0);
            }
            last_rejected = false;
            h *= fac;
        } else {
            rejected += 1;
            last_rejected = true;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
        }
    }

    Ok(Outcome {
        t,
        y,
        accepted,
        rejected,
    })
}
