//! Metrics on coordinate boxes and the differential operators built on them.
//!
//! Derivatives are fourth-order central differences. Two step lengths are
//! used: `fd_step` for the metric-level derivatives (Christoffel symbols and
//! their first derivatives) and `outer_step` for derivatives of curvature-level
//! quantities (covariant derivatives of Ricci, Weyl and tensor fields built from
//! them). The outer step is larger because the differentiated quantity already
//! carries finite-difference round-off.
//!
//! Periodic axes wrap coordinates modulo their period; on other axes a point
//! must keep the whole stencil inside the box or the operation fails with
//! [`Error::StencilMargin`].

#[allow(unused_imports)]
use num_traits::Float;
use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::sampling;
use crate::tensor::{self, Curv4, Dim, Sym2};
use crate::{Error, Result};

/// Ratio between the outer and inner finite-difference steps.
pub const OUTER_STEP_RATIO: f64 = 10.0;

/// Codazzi defect accepted by [`MetricChart::elliptic_residual_at`].
const CODAZZI_PRECONDITION: f64 = 1e-6;
/// Trace accepted by [`MetricChart::elliptic_residual_at`].
const TRACE_PRECONDITION: f64 = 1e-8;
/// Smallest `|T|` at which the Kato gap is evaluated.
const KATO_VANISHING: f64 = 1e-8;

/// Fourth-order central difference weights at offsets `-2, -1, 1, 2` (÷ 12h).
const STENCIL: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Coordinate axis of a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// When set the axis is a circle of length `hi - lo`.
    pub periodic: bool,
}

impl Axis {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Axis {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn circle(lo: f64, period: f64) -> Self {
        Axis {
            lo,
            hi: lo + period,
            periodic: true,
        }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Sample points must satisfy `|x[first_axis..]| <= radius`.
///
/// Used for stereographic charts, where the far part of the coordinate box
/// approaches the projection pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallLimit {
    pub first_axis: usize,
    pub radius: f64,
}

/// Coordinate box of a chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub axes: Vec<Axis>,
    pub ball: Option<BallLimit>,
}

impl Domain {
    pub fn boxed(axes: Vec<Axis>) -> Self {
        Domain { axes, ball: None }
    }
}

/// Dense `n × n × n` array; `get(a, b, c)`.
///
/// Holds Christoffel symbols `Γ^a_{bc}`, covariant derivatives `∇_a T_bc`
/// and the Cotton tensor `C_abc`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    n: usize,
    comps: Vec<f64>,
}

/// `Γ^k_{ij}` stored at `get(k, i, j)`.
pub type Christoffel = Tensor3;
/// `∇_k T_ij` stored at `get(k, i, j)`.
pub type Deriv3 = Tensor3;

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 {
            n,
            comps: vec![0.0; n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut comps = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    comps.push(f(a, b, c));
                }
            }
        }
        Tensor3 { n, comps }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.comps[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.comps[(a * self.n + b) * self.n + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub type MetricFn = Box<dyn Fn(&[f64]) -> Sym2 + Send + Sync>;
pub type ChristoffelFn = Box<dyn Fn(&[f64]) -> Christoffel + Send + Sync>;

/// Metric, Christoffel symbols and curvature at one point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub g: Sym2,
    pub g_inv: Sym2,
    pub christoffel: Christoffel,
    pub riemann: Curv4,
    pub ricci: Sym2,
    pub scalar: f64,
}

impl PointGeometry {
    pub fn trace_free_ricci(&self) -> Sym2 {
        let n = self.g.dim() as f64;
        &self.ricci - &(&self.g * (self.scalar / n))
    }

    pub fn weyl(&self) -> Result<Curv4> {
        tensor::weyl_from(&self.g, &self.riemann, &self.ricci, self.scalar)
    }
}

/// An identity residual with the magnitude of its largest term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    /// `value / max(1, scale)`: absolute for small terms, relative for large.
    pub fn normalized(&self) -> f64 {
        self.value / self.scale.max(1.0)
    }
}

/// A Riemannian metric on a coordinate box.
pub struct MetricChart {
    dim: Dim,
    domain: Domain,
    metric: MetricFn,
    christoffel: Option<ChristoffelFn>,
    fd_step: f64,
    outer_step: f64,
}

impl fmt::Debug for MetricChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricChart")
            .field("dim", &self.dim.get())
            .field("domain", &self.domain)
            .field("analytic_christoffel", &self.christoffel.is_some())
            .field("fd_step", &self.fd_step)
            .field("outer_step", &self.outer_step)
            .finish()
    }
}

fn fd_combine(h: f64, samples: [Vec<f64>; 4]) -> Vec<f64> {
    let len = samples[0].len();
    let mut out = vec![0.0; len];
    for (s, &(_, w)) in samples.iter().zip(STENCIL.iter()) {
        for (o, v) in out.iter_mut().zip(s) {
            *o += w * v;
        }
    }
    let scale = 1.0 / (12.0 * h);
    out.iter_mut().for_each(|o| *o *= scale);
    out
}

/// Partial derivatives of a vector-valued function along every axis.
fn partials(
    x: &[f64],
    h: f64,
    mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(x.len());
    let mut y = x.to_vec();
    for axis in 0..x.len() {
        let mut samples: [Vec<f64>; 4] = Default::default();
        for (slot, &(off, _)) in samples.iter_mut().zip(STENCIL.iter()) {
            y[axis] = x[axis] + off * h;
            *slot = f(&y)?;
        }
        y[axis] = x[axis];
        out.push(fd_combine(h, samples));
    }
    Ok(out)
}

impl MetricChart {
    /// Creates a chart; `fd_step` must be positive.
    pub fn new(dim: Dim, domain: Domain, metric: MetricFn, fd_step: f64) -> Result<Self> {
        if domain.axes.len() != dim.get() {
            return Err(Error::DimensionMismatch(domain.axes.len(), dim.get()));
        }
        if !(fd_step > 0.0) {
            return Err(Error::NonPositiveTolerance(fd_step));
        }
        Ok(MetricChart {
            dim,
            domain,
            metric,
            christoffel: None,
            fd_step,
            outer_step: OUTER_STEP_RATIO * fd_step,
        })
    }

    /// Attaches closed-form Christoffel symbols.
    pub fn with_christoffel(mut self, christoffel: ChristoffelFn) -> Self {
        self.christoffel = Some(christoffel);
        self
    }

    pub fn with_outer_step(mut self, outer_step: f64) -> Self {
        self.outer_step = outer_step;
        self
    }

    /// Same metric with another inner step; the outer step keeps its ratio.
    pub fn with_fd_step(mut self, fd_step: f64) -> Self {
        let ratio = self.outer_step / self.fd_step;
        self.fd_step = fd_step;
        self.outer_step = ratio * fd_step;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim.get()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn outer_step(&self) -> f64 {
        self.outer_step
    }

    pub fn has_analytic_christoffel(&self) -> bool {
        self.christoffel.is_some()
    }

    fn wrap(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.domain.axes)
            .map(|(&v, axis)| {
                if axis.periodic {
                    let r = (v - axis.lo) % axis.length();
                    axis.lo + if r < 0.0 { r + axis.length() } else { r }
                } else {
                    v
                }
            })
            .collect()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(x.len(), self.dim()));
        }
        Ok(())
    }

    /// Fails unless `[x - reach, x + reach]` lies in the box on every
    /// non-periodic axis.
    pub fn check_margin(&self, x: &[f64], reach: f64) -> Result<()> {
        self.check_point(x)?;
        for (axis, (&v, a)) in x.iter().zip(&self.domain.axes).enumerate() {
            if !a.periodic && (v - reach < a.lo || v + reach > a.hi) {
                return Err(Error::StencilMargin { axis });
            }
        }
        Ok(())
    }

    pub fn metric_at(&self, x: &[f64]) -> Sym2 {
        (self.metric)(&self.wrap(x))
    }

    fn christoffel_reach(&self) -> f64 {
        if self.christoffel.is_some() {
            0.0
        } else {
            2.0 * self.fd_step
        }
    }

    /// Stencil reach of [`MetricChart::geometry_at`].
    pub fn geometry_reach(&self) -> f64 {
        self.christoffel_reach() + 2.0 * self.fd_step
    }

    /// Christoffel symbols from finite differences of the metric.
    pub fn fd_christoffel_at(&self, x: &[f64]) -> Result<Christoffel> {
        self.check_margin(x, 2.0 * self.fd_step)?;
        let n = self.dim();
        let g = self.metric_at(x);
        let g_inv = tensor::inverse(&g)?;
        let dg = partials(x, self.fd_step, |y| Ok(self.metric_at(y).as_slice().to_vec()))?;
        let dgc = |m: usize, i: usize, j: usize| dg[m][i * n + j];
        let mut lowered = Tensor3::zeros(n);
        for l in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v = 0.5 * (dgc(i, j, l) + dgc(j, i, l) - dgc(l, i, j));
                    lowered.set(l, i, j, v);
                    lowered.set(l, j, i, v);
                }
            }
        }
        Ok(Tensor3::from_fn(n, |k, i, j| {
            (0..n).map(|l| g_inv.get(k, l) * lowered.get(l, i, j)).sum()
        }))
    }

    /// `Γ^k_{ij}`, closed form when available, otherwise finite differences.
    pub fn christoffel_at(&self, x: &[f64]) -> Result<Christoffel> {
        self.check_point(x)?;
        match &self.christoffel {
            Some(f) => Ok(f(&self.wrap(x))),
            None => self.fd_christoffel_at(x),
        }
    }

    /// Metric, connection and curvature at `x`.
    ///
    /// `R[a][b][c][d] = g_ae (∂_c Γ^e_{db} - ∂_d Γ^e_{cb} + Γ^e_{cf} Γ^f_{db} - Γ^e_{df} Γ^f_{cb})`,
    /// which gives the unit sphere `R[i][k][j][l] = g_ij g_kl - g_il g_jk`.
    pub fn geometry_at(&self, x: &[f64]) -> Result<PointGeometry> {
        self.check_margin(x, self.geometry_reach())?;
        let n = self.dim();
        let g = self.metric_at(x);
        let g_inv = tensor::inverse(&g)?;
        let gamma = self.christoffel_at(x)?;
        let dgamma = partials(x, self.fd_step, |y| {
            Ok(self.christoffel_at(y)?.as_slice().to_vec())
        })?;
        let dg = |m: usize, a: usize, b: usize, c: usize| dgamma[m][(a * n + b) * n + c];

        let mut upper = vec![0.0; n * n * n * n];
        for e in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut v = dg(c, e, d, b) - dg(d, e, c, b);
                        for f in 0..n {
                            v += gamma.get(e, c, f) * gamma.get(f, d, b)
                                - gamma.get(e, d, f) * gamma.get(f, c, b);
                        }
                        upper[((e * n + b) * n + c) * n + d] = v;
                    }
                }
            }
        }
        let mut lower = vec![0.0; n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        lower[((a * n + b) * n + c) * n + d] = (0..n)
                            .map(|e| g.get(a, e) * upper[((e * n + b) * n + c) * n + d])
                            .sum();
                    }
                }
            }
        }
        let riemann = Curv4::from_vec(n, lower);
        let mut ric = vec![0.0; n * n];
        for a in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for b in 0..n {
                    for d in 0..n {
                        s += g_inv.get(b, d) * riemann.get(a, b, c, d);
                    }
                }
                ric[a * n + c] = s;
            }
        }
        let ricci = Sym2::symmetrize(n, &ric);
        let scalar = g_inv
            .as_slice()
            .iter()
            .zip(ricci.as_slice())
            .map(|(a, b)| a * b)
            .sum();
        Ok(PointGeometry {
            g,
            g_inv,
            christoffel: gamma,
            riemann,
            ricci,
            scalar,
        })
    }

    pub fn riemann_at(&self, x: &[f64]) -> Result<Curv4> {
        Ok(self.geometry_at(x)?.riemann)
    }

    pub fn ricci_at(&self, x: &[f64]) -> Result<Sym2> {
        Ok(self.geometry_at(x)?.ricci)
    }

    pub fn scalar_at(&self, x: &[f64]) -> Result<f64> {
        Ok(self.geometry_at(x)?.scalar)
    }

    /// Geometry at the `4n` outer-stencil points around `x`, axis-major.
    fn geometry_stencil(&self, x: &[f64]) -> Result<Vec<PointGeometry>> {
        let mut out = Vec::with_capacity(4 * x.len());
        let mut y = x.to_vec();
        for axis in 0..x.len() {
            for &(off, _) in STENCIL.iter() {
                y[axis] = x[axis] + off * self.outer_step;
                out.push(self.geometry_at(&y)?);
            }
            y[axis] = x[axis];
        }
        Ok(out)
    }

    fn stencil_partials(&self, values: &[Vec<f64>]) -> Vec<Vec<f64>> {
        values
            .chunks(4)
            .map(|c| fd_combine(self.outer_step, [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]))
            .collect()
    }

    /// `∇_k T_ij` of a field at `x`.
    pub fn covariant_derivative(&self, field: &Sym2Field<'_>, x: &[f64]) -> Result<Deriv3> {
        self.check_margin(x, field.reach + 2.0 * self.outer_step + self.christoffel_reach())?;
        let gamma = self.christoffel_at(x)?;
        let t = field.eval(x)?;
        let dt = partials(x, self.outer_step, |y| Ok(field.eval(y)?.as_slice().to_vec()))?;
        Ok(covariant_from_partials(&gamma, &t, &dt))
    }

    /// `∇_l ∇_k T_ij` at `x`, indexed `[((l n + k) n + i) n + j]`.
    fn second_covariant_derivative(&self, field: &Sym2Field<'_>, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        self.check_margin(x, field.reach + 4.0 * self.outer_step + self.christoffel_reach())?;
        let gamma = self.christoffel_at(x)?;
        let first = self.covariant_derivative(field, x)?;
        let d_first = partials(x, self.outer_step, |y| {
            Ok(self.covariant_derivative(field, y)?.as_slice().to_vec())
        })?;
        let mut out = vec![0.0; n * n * n * n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut v = d_first[l][(k * n + i) * n + j];
                        for m in 0..n {
                            v -= gamma.get(m, l, k) * first.get(m, i, j)
                                + gamma.get(m, l, i) * first.get(k, m, j)
                                + gamma.get(m, l, j) * first.get(k, i, m);
                        }
                        out[((l * n + k) * n + i) * n + j] = v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Cotton tensor
    /// `C_ijk = ∇_k R_ij - ∇_j R_ik - (∇_k R g_ij - ∇_j R g_ik) / (2(n-1))`.
    pub fn cotton_at(&self, x: &[f64]) -> Result<Tensor3> {
        self.check_margin(x, self.geometry_reach() + 2.0 * self.outer_step)?;
        let center = self.geometry_at(x)?;
        let stencil = self.geometry_stencil(x)?;
        Ok(self.cotton_from(&center, &stencil))
    }

    fn cotton_from(&self, center: &PointGeometry, stencil: &[PointGeometry]) -> Tensor3 {
        let n = self.dim();
        let ricci_vals: Vec<Vec<f64>> = stencil.iter().map(|p| p.ricci.as_slice().to_vec()).collect();
        let scalar_vals: Vec<Vec<f64>> = stencil.iter().map(|p| vec![p.scalar]).collect();
        let d_ric = covariant_from_partials(
            &center.christoffel,
            &center.ricci,
            &self.stencil_partials(&ricci_vals),
        );
        let d_scalar: Vec<f64> = self.stencil_partials(&scalar_vals).iter().map(|v| v[0]).collect();
        let c = 1.0 / (2.0 * (n as f64 - 1.0));
        let g = &center.g;
        Tensor3::from_fn(n, |i, j, k| {
            d_ric.get(k, i, j) - d_ric.get(j, i, k)
                - c * (d_scalar[k] * g.get(i, j) - d_scalar[j] * g.get(i, k))
        })
    }

    /// Divergence `g^{ml} ∇_m W_{ikjl}` of the Weyl tensor, indexed `(i, k, j)`.
    pub fn weyl_divergence_at(&self, x: &[f64]) -> Result<Tensor3> {
        self.check_margin(x, self.geometry_reach() + 2.0 * self.outer_step)?;
        let center = self.geometry_at(x)?;
        let stencil = self.geometry_stencil(x)?;
        self.weyl_divergence_from(&center, &stencil)
    }

    fn weyl_divergence_from(&self, center: &PointGeometry, stencil: &[PointGeometry]) -> Result<Tensor3> {
        let n = self.dim();
        let w = center.weyl()?;
        let weyl_vals = stencil
            .iter()
            .map(|p| Ok(p.weyl()?.as_slice().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let dw = self.stencil_partials(&weyl_vals);
        let gamma = &center.christoffel;
        let at = |i: usize, k: usize, j: usize, l: usize| ((i * n + k) * n + j) * n + l;
        let mut out = Tensor3::zeros(n);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for m in 0..n {
                        for l in 0..n {
                            let gml = center.g_inv.get(m, l);
                            if gml == 0.0 {
                                continue;
                            }
                            let mut v = dw[m][at(i, k, j, l)];
                            for p in 0..n {
                                v -= gamma.get(p, m, i) * w.get(p, k, j, l)
                                    + gamma.get(p, m, k) * w.get(i, p, j, l)
                                    + gamma.get(p, m, j) * w.get(i, k, p, l)
                                    + gamma.get(p, m, l) * w.get(i, k, j, p);
                            }
                            s += gml * v;
                        }
                    }
                    out.set(i, k, j, s);
                }
            }
        }
        Ok(out)
    }

    /// Max-norm of `∇^l W_{ikjl} - (n-3)/(n-2) C_jik`.
    ///
    /// With the curvature convention of this crate the contracted second
    /// Bianchi identity pairs the divergence slot `(i, k, j)` with the Cotton
    /// component `C_jik`.
    pub fn weyl_divergence_defect_at(&self, x: &[f64]) -> Result<f64> {
        let n = self.dim();
        if n < 4 {
            return Err(Error::NeedsDimensionFour);
        }
        self.check_margin(x, self.geometry_reach() + 2.0 * self.outer_step)?;
        let center = self.geometry_at(x)?;
        let stencil = self.geometry_stencil(x)?;
        let div = self.weyl_divergence_from(&center, &stencil)?;
        let cotton = self.cotton_from(&center, &stencil);
        let factor = (n as f64 - 3.0) / (n as f64 - 2.0);
        let mut worst = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    worst = worst.max((div.get(i, k, j) - factor * cotton.get(j, i, k)).abs());
                }
            }
        }
        Ok(worst)
    }

    /// Max over `(i, j, k)` of `|∇_k T_ij - ∇_j T_ik|`.
    pub fn codazzi_defect_at(&self, field: &Sym2Field<'_>, x: &[f64]) -> Result<f64> {
        let d = self.covariant_derivative(field, x)?;
        Ok(codazzi_defect(&d))
    }

    /// Max-norm of `ΔT_ij + R_{ikjl} T^{kl} - R_jk T_i^k` for a trace-free
    /// Codazzi field, with `Δ` the rough Laplacian `g^{lk} ∇_l ∇_k`.
    pub fn elliptic_residual_at(&self, field: &Sym2Field<'_>, x: &[f64]) -> Result<Residual> {
        let n = self.dim();
        let geo = self.geometry_at(x)?;
        let t = field.eval(x)?;
        let tr = tensor::trace(&geo.g, &t)?;
        let scale = tensor::norm(&geo.g, &t)?.max(1.0);
        let codazzi = self.codazzi_defect_at(field, x)?;
        if tr.abs() > TRACE_PRECONDITION * scale || codazzi > CODAZZI_PRECONDITION * scale {
            return Err(Error::NotTraceFreeCodazzi {
                trace: tr,
                codazzi,
            });
        }
        let hess = self.second_covariant_derivative(field, x)?;
        let t_up = tensor::raise_both(&geo.g_inv, &t);
        let mut out = Residual { value: 0.0, scale: 0.0 };
        for i in 0..n {
            for j in 0..n {
                let mut lap = 0.0;
                for l in 0..n {
                    for k in 0..n {
                        lap += geo.g_inv.get(l, k) * hess[((l * n + k) * n + i) * n + j];
                    }
                }
                let mut curv = 0.0;
                let mut ric = 0.0;
                for k in 0..n {
                    for l in 0..n {
                        curv += geo.riemann.get(i, k, j, l) * t_up.get(k, l);
                        ric += t.get(i, k) * geo.g_inv.get(k, l) * geo.ricci.get(l, j);
                    }
                }
                out.value = out.value.max((lap + curv - ric).abs());
                out.scale = out.scale.max(lap.abs()).max(curv.abs()).max(ric.abs());
            }
        }
        Ok(out)
    }

    /// `|∇T|² - (n+2)/n |∇|T||²`, non-negative for trace-free Codazzi fields.
    /// The value is signed; the scale is `|∇T|²`.
    pub fn kato_gap_at(&self, field: &Sym2Field<'_>, x: &[f64]) -> Result<Residual> {
        let n = self.dim();
        let g = self.metric_at(x);
        let g_inv = tensor::inverse(&g)?;
        let t = field.eval(x)?;
        let norm_t = tensor::inner(&g_inv, &t, &t).max(0.0).sqrt();
        if norm_t <= KATO_VANISHING {
            return Err(Error::VanishingLocus(norm_t));
        }
        let d = self.covariant_derivative(field, x)?;
        let t_up = tensor::raise_both(&g_inv, &t);
        let grad_norm: Vec<f64> = (0..n)
            .map(|k| {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        s += d.get(k, i, j) * t_up.get(i, j);
                    }
                }
                s / norm_t
            })
            .collect();
        let mut grad_sq = 0.0;
        for a in 0..n {
            for b in 0..n {
                grad_sq += g_inv.get(a, b) * grad_norm[a] * grad_norm[b];
            }
        }
        let full = deriv_norm_sq(&g_inv, &d);
        Ok(Residual {
            value: full - (n as f64 + 2.0) / n as f64 * grad_sq,
            scale: full,
        })
    }

    /// `|½Δ|T|² - (|∇T|² - R_{ikjl} T^{ij} T^{kl} + R_jk T^{ij} T_i^k)|`.
    ///
    /// The Laplacian of the scalar `|T|²` is taken from finite differences of
    /// `|T|²` itself (five-point second differences on the diagonal, nested
    /// first differences for mixed partials), independently of the tensor
    /// Laplacian used by the elliptic residual.
    pub fn weitzenbock_residual_at(&self, field: &Sym2Field<'_>, x: &[f64]) -> Result<Residual> {
        let n = self.dim();
        self.check_margin(x, field.reach + 4.0 * self.outer_step + self.christoffel_reach())?;
        let geo = self.geometry_at(x)?;
        let h = self.outer_step;
        let sq = |y: &[f64]| -> Result<f64> {
            let g_inv = tensor::inverse(&self.metric_at(y))?;
            let t = field.eval(y)?;
            Ok(tensor::inner(&g_inv, &t, &t))
        };
        let sq_vec = |y: &[f64]| Ok(vec![sq(y)?]);
        let center = sq(x)?;
        let grad: Vec<f64> = partials(x, h, sq_vec)?.into_iter().map(|v| v[0]).collect();
        let mut lap = 0.0;
        let mut y = x.to_vec();
        for a in 0..n {
            for b in 0..n {
                let gab = geo.g_inv.get(a, b);
                if gab == 0.0 {
                    continue;
                }
                let mut v = if a == b {
                    let mut s = -30.0 * center;
                    for (off, w) in [(-2.0, -1.0), (-1.0, 16.0), (1.0, 16.0), (2.0, -1.0)] {
                        y[a] = x[a] + off * h;
                        s += w * sq(&y)?;
                    }
                    y[a] = x[a];
                    s / (12.0 * h * h)
                } else {
                    let mut samples: [Vec<f64>; 4] = Default::default();
                    for (slot, &(off, _)) in samples.iter_mut().zip(STENCIL.iter()) {
                        y[a] = x[a] + off * h;
                        *slot = partials(&y, h, sq_vec)?.into_iter().map(|v| v[0]).collect();
                    }
                    y[a] = x[a];
                    fd_combine(h, samples)[b]
                };
                for c in 0..n {
                    v -= geo.christoffel.get(c, a, b) * grad[c];
                }
                lap += gab * v;
            }
        }

        let t = field.eval(x)?;
        let d = self.covariant_derivative(field, x)?;
        let t_up = tensor::raise_both(&geo.g_inv, &t);
        let mut curv = 0.0;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        curv += geo.riemann.get(i, k, j, l) * t_up.get(i, j) * t_up.get(k, l);
                    }
                }
            }
        }
        // R_jk T^{ij} T_i^k = tr(g⁻¹ Ric g⁻¹ T g⁻¹ T)
        let ric_term = tensor::inner(&geo.g_inv, &geo.ricci, &mat_product(&geo.g_inv, &t, &t));
        let grad_sq = deriv_norm_sq(&geo.g_inv, &d);
        Ok(Residual {
            value: (0.5 * lap - (grad_sq - curv + ric_term)).abs(),
            scale: (0.5 * lap).abs().max(grad_sq).max(curv.abs()).max(ric_term.abs()),
        })
    }

    /// A deterministic interior sample point for `u` in the unit cube.
    ///
    /// Non-periodic axes are inset so that every operation's stencil fits;
    /// ball-limited axes are mapped radially onto the ball.
    pub fn sample_point(&self, u: &[f64]) -> Vec<f64> {
        let inset = self.sample_inset();
        let n = self.dim();
        let mut x: Vec<f64> = self
            .domain
            .axes
            .iter()
            .zip(u)
            .map(|(a, &ui)| {
                if a.periodic {
                    a.lo + ui * a.length()
                } else {
                    a.lo + inset + ui * (a.length() - 2.0 * inset)
                }
            })
            .collect();
        if let Some(ball) = self.domain.ball {
            let axes = ball.first_axis..n;
            let p: Vec<f64> = axes.clone().map(|i| 2.0 * u[i] - 1.0).collect();
            let two = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            let inf = p.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let room = axes
                .clone()
                .map(|i| {
                    let a = &self.domain.axes[i];
                    (a.hi - inset).min(-(a.lo + inset))
                })
                .fold(f64::INFINITY, f64::min);
            let radius = ball.radius.min(room);
            for (slot, pi) in axes.zip(&p) {
                x[slot] = if two > 0.0 { radius * pi * inf / two } else { 0.0 };
            }
        }
        x
    }

    /// The first `count` points of the chart's low-discrepancy sample.
    pub fn sample_points(&self, count: usize) -> Vec<Vec<f64>> {
        sampling::unit_points(self.dim(), count)
            .iter()
            .map(|u| self.sample_point(u))
            .collect()
    }

    /// Inset from non-periodic box faces used for sampling.
    pub fn sample_inset(&self) -> f64 {
        self.christoffel_reach() + 2.0 * self.fd_step + 4.0 * self.outer_step + 4.0 * self.outer_step
    }

    /// Checks positive definiteness (Cholesky) at `count` sample points.
    pub fn audit_positive_definite(&self, count: usize) -> Result<()> {
        for x in self.sample_points(count) {
            if !tensor::is_positive_definite(&self.metric_at(&x)) {
                return Err(Error::DegenerateMetric);
            }
        }
        Ok(())
    }

    /// Max difference between closed-form and finite-difference Christoffel
    /// symbols over `count` sample points (zero without a closed form).
    pub fn christoffel_audit(&self, count: usize) -> Result<f64> {
        let Some(f) = &self.christoffel else {
            return Ok(0.0);
        };
        let mut worst = 0.0f64;
        for x in self.sample_points(count) {
            let analytic = f(&self.wrap(&x));
            worst = worst.max(analytic.max_abs_diff(&self.fd_christoffel_at(&x)?));
        }
        Ok(worst)
    }
}

fn covariant_from_partials(gamma: &Christoffel, t: &Sym2, dt: &[Vec<f64>]) -> Deriv3 {
    let n = t.dim();
    Tensor3::from_fn(n, |k, i, j| {
        let mut v = dt[k][i * n + j];
        for m in 0..n {
            v -= gamma.get(m, k, i) * t.get(m, j) + gamma.get(m, k, j) * t.get(i, m);
        }
        v
    })
}

fn codazzi_defect(d: &Deriv3) -> f64 {
    let n = d.dim();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                worst = worst.max((d.get(k, i, j) - d.get(j, i, k)).abs());
            }
        }
    }
    worst
}

/// `|∇T|² = g^{ab} g^{ic} g^{jd} ∇_a T_ij ∇_b T_cd`.
fn deriv_norm_sq(g_inv: &Sym2, d: &Deriv3) -> f64 {
    let n = d.dim();
    // Raise all three indices first, then contract.
    let mut raised = Tensor3::zeros(n);
    for a in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for b in 0..n {
                    for c in 0..n {
                        for e in 0..n {
                            s += g_inv.get(a, b) * g_inv.get(i, c) * g_inv.get(j, e) * d.get(b, c, e);
                        }
                    }
                }
                raised.set(a, i, j, s);
            }
        }
    }
    raised
        .as_slice()
        .iter()
        .zip(d.as_slice())
        .map(|(a, b)| a * b)
        .sum()
}

/// `(S g⁻¹ T)` symmetrised.
fn mat_product(g_inv: &Sym2, s: &Sym2, t: &Sym2) -> Sym2 {
    let n = s.dim();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for a in 0..n {
                for b in 0..n {
                    v += s.get(i, a) * g_inv.get(a, b) * t.get(b, j);
                }
            }
            out[i * n + j] = v;
        }
    }
    Sym2::symmetrize(n, &out)
}

type FieldFn<'a> = Box<dyn Fn(&[f64]) -> Result<Sym2> + Send + Sync + 'a>;

/// A symmetric 2-tensor field on a chart.
///
/// `reach` is the stencil radius the field itself needs around a point (zero
/// for closed-form fields, the geometry reach for curvature fields).
pub struct Sym2Field<'a> {
    eval: FieldFn<'a>,
    reach: f64,
}

impl fmt::Debug for Sym2Field<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sym2Field").field("reach", &self.reach).finish()
    }
}

impl<'a> Sym2Field<'a> {
    pub fn new(reach: f64, eval: impl Fn(&[f64]) -> Result<Sym2> + Send + Sync + 'a) -> Self {
        Sym2Field {
            eval: Box::new(eval),
            reach,
        }
    }

    pub fn constant(value: Sym2) -> Self {
        Self::new(0.0, move |_| Ok(value.clone()))
    }

    pub fn ricci(chart: &'a MetricChart) -> Self {
        Self::new(chart.geometry_reach(), move |x| chart.ricci_at(x))
    }

    pub fn trace_free_ricci(chart: &'a MetricChart) -> Self {
        Self::new(chart.geometry_reach(), move |x| {
            Ok(chart.geometry_at(x)?.trace_free_ricci())
        })
    }

    pub fn schouten(chart: &'a MetricChart) -> Self {
        Self::new(chart.geometry_reach(), move |x| {
            let geo = chart.geometry_at(x)?;
            tensor::schouten(&geo.g, &geo.ricci, geo.scalar)
        })
    }

    /// `A - tr(A)/n g`, i.e. `E/(n-2)`.
    pub fn trace_free_schouten(chart: &'a MetricChart) -> Self {
        Self::new(chart.geometry_reach(), move |x| {
            let geo = chart.geometry_at(x)?;
            let a = tensor::schouten(&geo.g, &geo.ricci, geo.scalar)?;
            let tr = tensor::trace(&geo.g, &a)?;
            Ok(&a - &(&geo.g * (tr / geo.g.dim() as f64)))
        })
    }

    pub fn eval(&self, x: &[f64]) -> Result<Sym2> {
        (self.eval)(x)
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }
}
