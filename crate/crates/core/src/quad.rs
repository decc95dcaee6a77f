//! Quadrature rules for smooth periodic integrands.

#[allow(unused_imports)]
use num_traits::Float;
use core::f64::consts::PI;

/// A quadrature value together with an order-doubling error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Trapezoidal rule over one period with `n` equispaced nodes starting at `a`.
///
/// Spectrally accurate for smooth periodic integrands. Nodes are summed in
/// index order so results are reproducible bit for bit.
pub fn periodic_trapezoid(mut f: impl FnMut(f64) -> f64, a: f64, period: f64, n: usize) -> f64 {
    let h = period / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        sum += f(a + k as f64 * h);
    }
    sum * h
}

/// [`periodic_trapezoid`] with `n` and `2n` nodes; the finer value is returned.
pub fn periodic_trapezoid_doubled(
    mut f: impl FnMut(f64) -> f64,
    a: f64,
    period: f64,
    n: usize,
) -> Estimate {
    let coarse = periodic_trapezoid(&mut f, a, period, n);
    let fine = periodic_trapezoid(&mut f, a, period, 2 * n);
    Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    }
}

/// Midpoint rule on `[a, b]` with `n` cells.
pub fn midpoint(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        sum += f(a + (k as f64 + 0.5) * h);
    }
    sum * h
}

/// `Γ(m/2)` for a positive integer `m`, by the half-integer recurrence.
pub fn gamma_half(m: usize) -> f64 {
    assert!(m > 0, "gamma_half needs m >= 1");
    let (mut value, mut x) = if m % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Area of the unit sphere `S^m ⊂ R^{m+1}`: `2 π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn unit_sphere_area(m: usize) -> f64 {
    2.0 * PI.powf((m as f64 + 1.0) / 2.0) / gamma_half(m + 1)
}
