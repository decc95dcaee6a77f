#![allow(dead_code)]

use cfpinch_core::derdzinski::{self, WarpOde};
use cfpinch_core::models::{Basis, ConformalSpec, ModelKind, ModelSpec, PhiTerm, WarpProfile};
use cfpinch_core::tensor::Dim;
use std::f64::consts::PI;

pub fn dim(n: usize) -> Dim {
    Dim::new(n).unwrap()
}

pub fn sphere(n: usize, radius: f64) -> ModelSpec {
    ModelSpec::new(dim(n), ModelKind::Sphere { radius }).unwrap()
}

pub fn product(n: usize, length: f64, radius: f64) -> ModelSpec {
    ModelSpec::new(dim(n), ModelKind::Product { length, radius }).unwrap()
}

pub fn derdzinski(n: usize, r: f64, c: f64) -> ModelSpec {
    let ode = WarpOde::new(dim(n), r, c).unwrap();
    let sol = derdzinski::solve(&ode, derdzinski::CHART_GRID).unwrap();
    ModelSpec::new(dim(n), ModelKind::Warped(WarpProfile::Solution(sol))).unwrap()
}

/// Derdziński model with `C` a fraction of the admissible maximum.
pub fn derdzinski_frac(n: usize, r: f64, frac: f64) -> ModelSpec {
    let (_, c_max) = derdzinski::admissible_range(dim(n), r).unwrap();
    derdzinski(n, r, frac * c_max)
}

/// Five conformal factors mixing polynomial and trigonometric terms.
pub fn conformal_corpus(n: usize) -> Vec<ModelSpec> {
    let t = |basis, coeff| PhiTerm { basis, coeff };
    let last = n - 1;
    let sets = vec![
        vec![t(Basis::Linear(0), 0.4), t(Basis::Linear(last), -0.3)],
        vec![t(Basis::Square(0), 0.3), t(Basis::Square(1), -0.2)],
        vec![t(Basis::Cross(0, 1), 0.5), t(Basis::Linear(2), 0.1)],
        vec![t(Basis::Sin(0), 0.4), t(Basis::Cos(1), -0.3), t(Basis::Sin(last), 0.2)],
        vec![
            t(Basis::Square(last), 0.2),
            t(Basis::Cross(1, last), -0.3),
            t(Basis::Cos(0), 0.25),
            t(Basis::Linear(1), 0.15),
        ],
    ];
    sets.into_iter()
        .map(|terms| ModelSpec::new(dim(n), ModelKind::Conformal(ConformalSpec { half_width: 1.0, terms })).unwrap())
        .collect()
}

/// A warped product with non-constant scalar curvature.
pub fn cosine_warp(n: usize) -> ModelSpec {
    ModelSpec::new(
        dim(n),
        ModelKind::Warped(WarpProfile::Cosine {
            period: 2.0 * PI,
            coeffs: vec![1.0, 0.25, 0.05],
        }),
    )
    .unwrap()
}
