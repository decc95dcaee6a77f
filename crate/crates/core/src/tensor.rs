//! Pointwise multilinear algebra on curvature-type tensors.
//!
//! Components are coordinate components with all indices down; contractions
//! raise indices with the inverse of the supplied metric, so none of the
//! routines assume an orthonormal frame.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result};

/// Relative tolerance for `R` against `trace(Ric)` in [`trace_free_part`].
const TRACE_MATCH_TOL: f64 = 1e-10;
/// Relative tolerance for the trace-free precondition of the cubic bound and
/// the curvature reconstruction.
const TRACE_FREE_TOL: f64 = 1e-10;

/// A manifold dimension, `n >= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dim(usize);

impl Dim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension(n));
        }
        Ok(Dim(n))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }
}

/// Symmetric 2-tensor at a point (metric, Ricci, trace-free Ricci, Schouten).
///
/// Storage is a dense row-major `n × n` array kept exactly symmetric: every
/// setter writes both `(i, j)` and `(j, i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym2 {
    n: usize,
    comps: Vec<f64>,
}

impl Sym2 {
    pub fn zeros(n: usize) -> Self {
        Sym2 {
            n,
            comps: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n {
            s.comps[i * n + i] = 1.0;
        }
        s
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut s = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            s.set(i, i, d);
        }
        s
    }

    /// Builds a tensor from `f(i, j)` evaluated on the upper triangle only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                s.set(i, j, f(i, j));
            }
        }
        s
    }

    /// Symmetric part of a row-major `n × n` array.
    pub fn symmetrize(n: usize, data: &[f64]) -> Self {
        debug_assert_eq!(data.len(), n * n);
        Self::from_fn(n, |i, j| 0.5 * (data[i * n + j] + data[j * n + i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.comps[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.comps[i * self.n + j] = v;
        self.comps[j * self.n + i] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, s: f64) -> Sym2 {
        Sym2 {
            n: self.n,
            comps: self.comps.iter().map(|v| v * s).collect(),
        }
    }

    pub(crate) fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.comps)
    }

    pub(crate) fn from_matrix(m: &DMatrix<f64>) -> Self {
        let n = m.nrows();
        Self::from_fn(n, |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }
}

impl Add for &Sym2 {
    type Output = Sym2;
    fn add(self, rhs: &Sym2) -> Sym2 {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Sym2 {
            n: self.n,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Sym2 {
    type Output = Sym2;
    fn sub(self, rhs: &Sym2) -> Sym2 {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Sym2 {
            n: self.n,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul<f64> for &Sym2 {
    type Output = Sym2;
    fn mul(self, rhs: f64) -> Sym2 {
        self.scale(rhs)
    }
}

/// 4-index tensor with Riemann symmetries, stored densely as `R[i][k][j][l]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curv4 {
    n: usize,
    comps: Vec<f64>,
}

impl Curv4 {
    pub fn zeros(n: usize) -> Self {
        Curv4 {
            n,
            comps: vec![0.0; n * n * n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut comps = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        comps.push(f(i, k, j, l));
                    }
                }
            }
        }
        Curv4 { n, comps }
    }

    #[inline]
    fn idx(&self, i: usize, k: usize, j: usize, l: usize) -> usize {
        ((i * self.n + k) * self.n + j) * self.n + l
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize, j: usize, l: usize) -> f64 {
        self.comps[self.idx(i, k, j, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, k: usize, j: usize, l: usize, v: f64) {
        let at = self.idx(i, k, j, l);
        self.comps[at] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.comps
    }

    pub(crate) fn from_vec(n: usize, comps: Vec<f64>) -> Self {
        debug_assert_eq!(comps.len(), n * n * n * n);
        Curv4 { n, comps }
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Linear combination `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &Curv4, b: f64) -> Curv4 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        Curv4 {
            n: self.n,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        }
    }

    /// `Ric_ij = g^{kl} R[i][k][j][l]`.
    pub fn ricci_contraction(&self, g: &Sym2) -> Result<Sym2> {
        same_dim(self.n, g.dim())?;
        let ginv = inverse(g)?;
        let n = self.n;
        Ok(Sym2::from_fn(n, |i, j| {
            let mut s = 0.0;
            for k in 0..n {
                for l in 0..n {
                    s += ginv.get(k, l) * self.get(i, k, j, l);
                }
            }
            s
        }))
    }

    /// Max of `|R[i][k][j][l] + R[k][i][j][l]|` and `|R[i][k][j][l] + R[i][k][l][j]|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        self.max_over(|i, k, j, l| {
            (self.get(i, k, j, l) + self.get(k, i, j, l))
                .abs()
                .max((self.get(i, k, j, l) + self.get(i, k, l, j)).abs())
        })
    }

    /// Max of `|R[i][k][j][l] - R[j][l][i][k]|`.
    pub fn pair_symmetry_defect(&self) -> f64 {
        self.max_over(|i, k, j, l| (self.get(i, k, j, l) - self.get(j, l, i, k)).abs())
    }

    /// Max of `|R[i][k][j][l] + R[k][j][i][l] + R[j][i][k][l]|`.
    pub fn bianchi_defect(&self) -> f64 {
        self.max_over(|i, k, j, l| {
            (self.get(i, k, j, l) + self.get(k, j, i, l) + self.get(j, i, k, l)).abs()
        })
    }

    fn max_over(&self, f: impl Fn(usize, usize, usize, usize) -> f64) -> f64 {
        let n = self.n;
        let mut m = 0.0f64;
        for i in 0..n {
            for k in 0..n {
                for j in 0..n {
                    for l in 0..n {
                        m = m.max(f(i, k, j, l));
                    }
                }
            }
        }
        m
    }
}

/// Scalar invariants of a Ricci tensor: `R`, `|E|` and `E_ij E_jk E_ki`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarQuantities {
    pub scalar: f64,
    pub norm_e: f64,
    pub cubic_e: f64,
}

impl ScalarQuantities {
    pub fn new(g: &Sym2, ricci: &Sym2) -> Result<Self> {
        let r = trace(g, ricci)?;
        let e = trace_free_part(g, ricci, r)?;
        let m = mixed(&inverse(g)?, &e);
        let m2 = &m * &m;
        Ok(ScalarQuantities {
            scalar: r,
            norm_e: m2.trace().max(0.0).sqrt(),
            cubic_e: (&m2 * &m).trace(),
        })
    }
}

/// Inverse metric via Cholesky; fails unless `g` is positive definite.
pub fn inverse(g: &Sym2) -> Result<Sym2> {
    if g.comps.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateMetric);
    }
    let chol = g.to_matrix().cholesky().ok_or(Error::DegenerateMetric)?;
    let inv = chol.inverse();
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateMetric);
    }
    Ok(Sym2::from_matrix(&inv))
}

/// `true` iff `g` admits a Cholesky factorisation.
pub fn is_positive_definite(g: &Sym2) -> bool {
    g.comps.iter().all(|v| v.is_finite()) && g.to_matrix().cholesky().is_some()
}

/// Mixed tensor `g^{ik} T_kj` as a general matrix.
fn mixed(ginv: &Sym2, t: &Sym2) -> DMatrix<f64> {
    ginv.to_matrix() * t.to_matrix()
}

/// `T^{ij} = g^{ia} g^{jb} T_ab`.
pub fn raise_both(ginv: &Sym2, t: &Sym2) -> Sym2 {
    let gi = ginv.to_matrix();
    Sym2::from_matrix(&(&gi * t.to_matrix() * &gi))
}

/// Full contraction `g^{ia} g^{jb} S_ij T_ab`.
pub fn inner(ginv: &Sym2, s: &Sym2, t: &Sym2) -> f64 {
    (mixed(ginv, s) * mixed(ginv, t)).trace()
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// `g^{ij} T_ij`.
pub fn trace(g: &Sym2, t: &Sym2) -> Result<f64> {
    same_dim(g.dim(), t.dim())?;
    let ginv = inverse(g)?;
    Ok(trace_with(&ginv, t))
}

fn trace_with(ginv: &Sym2, t: &Sym2) -> f64 {
    ginv.comps.iter().zip(&t.comps).map(|(a, b)| a * b).sum()
}

/// `|T| = sqrt(g^{ia} g^{jb} T_ij T_ab)`.
pub fn norm(g: &Sym2, t: &Sym2) -> Result<f64> {
    same_dim(g.dim(), t.dim())?;
    let ginv = inverse(g)?;
    Ok(inner(&ginv, t, t).max(0.0).sqrt())
}

/// Trace-free Ricci tensor `E = Ric - (R/n) g`.
pub fn trace_free_part(g: &Sym2, ricci: &Sym2, r: f64) -> Result<Sym2> {
    same_dim(g.dim(), ricci.dim())?;
    let tr = trace(g, ricci)?;
    if (r - tr).abs() > TRACE_MATCH_TOL * 1f64.max(r.abs()).max(tr.abs()) {
        return Err(Error::TraceMismatch {
            given: r,
            computed: tr,
        });
    }
    let n = g.dim() as f64;
    Ok(ricci - &(g * (r / n)))
}

fn require_trace_free(ginv: &Sym2, e: &Sym2) -> Result<()> {
    let tr = trace_with(ginv, e);
    let scale = 1f64.max(inner(ginv, e, e).max(0.0).sqrt());
    if tr.abs() > TRACE_FREE_TOL * scale {
        return Err(Error::NotTraceFree(tr));
    }
    Ok(())
}

/// `E_ij E_jk E_ki + (n-2)/sqrt(n(n-1)) |E|^3`, non-negative for trace-free `E`.
///
/// Vanishes exactly when `E` has eigenvalues `λ` (n-1 times) and `-(n-1)λ`
/// with `λ >= 0`.
pub fn okumura_gap(g: &Sym2, e: &Sym2) -> Result<f64> {
    same_dim(g.dim(), e.dim())?;
    let n = Dim::new(g.dim())?.as_f64();
    let ginv = inverse(g)?;
    require_trace_free(&ginv, e)?;
    let m = mixed(&ginv, e);
    let m2 = &m * &m;
    let norm = m2.trace().max(0.0).sqrt();
    let cubic = (&m2 * &m).trace();
    Ok(cubic + (n - 2.0) / (n * (n - 1.0)).sqrt() * norm.powi(3))
}

/// Schouten tensor `A = (Ric - R/(2(n-1)) g) / (n-2)`.
pub fn schouten(g: &Sym2, ricci: &Sym2, r: f64) -> Result<Sym2> {
    same_dim(g.dim(), ricci.dim())?;
    let n = Dim::new(g.dim())?.as_f64();
    let shifted = ricci - &(g * (r / (2.0 * (n - 1.0))));
    Ok(&shifted * (1.0 / (n - 2.0)))
}

/// Kulkarni–Nomizu product
/// `(h ⊙ k)[i][k][j][l] = h_ij k_kl - h_il k_kj + h_kl k_ij - h_kj k_il`.
pub fn kulkarni_nomizu(h: &Sym2, k: &Sym2) -> Curv4 {
    assert_eq!(h.dim(), k.dim(), "dimension mismatch");
    Curv4::from_fn(h.dim(), |i, a, j, l| {
        h.get(i, j) * k.get(a, l) - h.get(i, l) * k.get(a, j) + h.get(a, l) * k.get(i, j)
            - h.get(a, j) * k.get(i, l)
    })
}

/// Riemann tensor of a conformally flat metric recovered from `E` and `R`.
pub fn cf_riemann_from_ricci(g: &Sym2, e: &Sym2, r: f64) -> Result<Curv4> {
    same_dim(g.dim(), e.dim())?;
    let n = Dim::new(g.dim())?.as_f64();
    let ginv = inverse(g)?;
    require_trace_free(&ginv, e)?;
    let traceless = kulkarni_nomizu(e, g);
    let constant = kulkarni_nomizu(g, g);
    Ok(traceless.combine(
        1.0 / (n - 2.0),
        &constant,
        r / (2.0 * n * (n - 1.0)),
    ))
}

/// Weyl part `W = Riem - Ric ⊙ g/(n-2) + R/(2(n-1)(n-2)) g ⊙ g`.
pub fn weyl_from(g: &Sym2, riemann: &Curv4, ricci: &Sym2, r: f64) -> Result<Curv4> {
    same_dim(g.dim(), riemann.dim())?;
    same_dim(g.dim(), ricci.dim())?;
    let n = Dim::new(g.dim())?.as_f64();
    let ric_part = kulkarni_nomizu(ricci, g);
    let gg = kulkarni_nomizu(g, g);
    let out = riemann
        .combine(1.0, &ric_part, -1.0 / (n - 2.0))
        .combine(1.0, &gg, r / (2.0 * (n - 1.0) * (n - 2.0)));
    Ok(out)
}

/// Inverse of [`weyl_from`]: adds the Ricci and scalar parts back onto `W`.
pub fn reassemble(g: &Sym2, weyl: &Curv4, ricci: &Sym2, r: f64) -> Result<Curv4> {
    same_dim(g.dim(), weyl.dim())?;
    same_dim(g.dim(), ricci.dim())?;
    let n = Dim::new(g.dim())?.as_f64();
    let ric_part = kulkarni_nomizu(ricci, g);
    let gg = kulkarni_nomizu(g, g);
    Ok(weyl
        .combine(1.0, &ric_part, 1.0 / (n - 2.0))
        .combine(1.0, &gg, -r / (2.0 * (n - 1.0) * (n - 2.0))))
}

/// Both sides of the quadratic curvature identity for a trace-free `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QInvariant {
    /// `-R_{ikjl} E^{ij} E^{kl} + R_{jk} E^{ij} E_i^k` by full contraction.
    pub direct: f64,
    /// `R |E|^2/(n-1) + n/(n-2) E_ij E_jk E_ki`.
    pub formula: f64,
}

impl QInvariant {
    pub fn defect(&self) -> f64 {
        (self.direct - self.formula).abs()
    }
}

pub fn q_invariant(g: &Sym2, riemann: &Curv4, ricci: &Sym2, e: &Sym2) -> Result<QInvariant> {
    let n = Dim::new(g.dim())?;
    same_dim(n.get(), riemann.dim())?;
    same_dim(n.get(), ricci.dim())?;
    same_dim(n.get(), e.dim())?;
    let ginv = inverse(g)?;
    let e_up = raise_both(&ginv, e);
    let nn = n.get();
    let mut curv_term = 0.0;
    for i in 0..nn {
        for k in 0..nn {
            for j in 0..nn {
                for l in 0..nn {
                    curv_term += riemann.get(i, k, j, l) * e_up.get(i, j) * e_up.get(k, l);
                }
            }
        }
    }
    let me = mixed(&ginv, e);
    let mr = mixed(&ginv, ricci);
    let ricci_term = (&mr * &me * &me).trace();
    let direct = -curv_term + ricci_term;

    let nf = n.as_f64();
    let r = trace_with(&ginv, ricci);
    let me2 = &me * &me;
    let formula = r * me2.trace() / (nf - 1.0) + nf / (nf - 2.0) * (&me2 * &me).trace();
    Ok(QInvariant { direct, formula })
}

/// Eigenvalue structure of a trace-free tensor relative to the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EigenPattern {
    /// All eigenvalues vanish within tolerance.
    Null,
    /// `λ` with multiplicity `n-1` and `-(n-1)λ` with multiplicity one.
    Pattern { lambda: f64 },
    Other,
}

impl EigenPattern {
    pub fn is_equality_pattern(&self) -> bool {
        !matches!(self, EigenPattern::Other)
    }
}

/// Generalised eigenvalues of `E` relative to `g`, ascending.
///
/// Solved as the ordinary eigenproblem of `g^{-1/2} E g^{-1/2}` with the
/// symmetric square root of `g`.
pub fn generalized_eigenvalues(g: &Sym2, e: &Sym2) -> Result<Vec<f64>> {
    same_dim(g.dim(), e.dim())?;
    if !is_positive_definite(g) {
        return Err(Error::DegenerateMetric);
    }
    let eig = SymmetricEigen::new(g.to_matrix());
    let inv_sqrt_diag = eig.eigenvalues.map(|d| 1.0 / d.sqrt());
    let q = &eig.eigenvectors;
    let g_inv_sqrt = q * DMatrix::from_diagonal(&inv_sqrt_diag) * q.transpose();
    let s = &g_inv_sqrt * e.to_matrix() * &g_inv_sqrt;
    let s = Sym2::from_matrix(&s).to_matrix();
    let mut vals: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

/// Classifies `E` as null, the `(n-1, 1)` pattern, or neither.
///
/// `tol` is relative: eigenvalues are compared within `tol * max(1, max|λ_i|)`.
pub fn eigen_pattern(g: &Sym2, e: &Sym2, tol: f64) -> Result<EigenPattern> {
    if !(tol > 0.0) {
        return Err(Error::NonPositiveTolerance(tol));
    }
    let n = Dim::new(g.dim())?.get();
    let vals = generalized_eigenvalues(g, e)?;
    let largest = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scaled = tol * largest.max(1.0);
    if largest <= scaled {
        return Ok(EigenPattern::Null);
    }
    // Positive λ puts the single eigenvalue at the bottom, negative λ at the top.
    for (cluster, single) in [(&vals[1..], vals[0]), (&vals[..n - 1], vals[n - 1])] {
        let lambda = cluster.iter().sum::<f64>() / (n - 1) as f64;
        let clustered = cluster.iter().all(|v| (v - lambda).abs() <= scaled);
        let matches_single = (single + (n - 1) as f64 * lambda).abs() <= scaled;
        if clustered && matches_single {
            return Ok(EigenPattern::Pattern { lambda });
        }
    }
    Ok(EigenPattern::Other)
}
