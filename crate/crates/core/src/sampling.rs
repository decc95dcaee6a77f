//! Deterministic low-discrepancy points in the unit cube.
//!
//! Uses the additive recurrence `u_k = frac(1/2 + k α)` with `α_i = φ_d^{-(i+1)}`,
//! where `φ_d` is the unique positive root of `x^{d+1} = x + 1`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

/// The `k`-th point of the `dim`-dimensional sequence.
pub fn unit_point(dim: usize, k: usize) -> Vec<f64> {
    let alphas = alphas(dim);
    alphas
        .iter()
        .map(|a| (0.5 + k as f64 * a).fract())
        .collect()
}

/// The first `count` points of the sequence.
pub fn unit_points(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let alphas = alphas(dim);
    (0..count)
        .map(|k| alphas.iter().map(|a| (0.5 + k as f64 * a).fract()).collect())
        .collect()
}

fn alphas(dim: usize) -> Vec<f64> {
    let phi = generalized_golden(dim);
    (0..dim).map(|i| phi.powi(-(i as i32 + 1))).collect()
}

fn generalized_golden(dim: usize) -> f64 {
    let mut x: f64 = 2.0;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (dim as f64 + 1.0));
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_ratio_in_one_dimension() {
        assert!((generalized_golden(1) - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn points_stay_in_cube_and_spread() {
        let pts = unit_points(3, 200);
        assert!(pts.iter().flatten().all(|&u| (0.0..1.0).contains(&u)));
        // Every octant is visited.
        let mut seen = [false; 8];
        for p in &pts {
            let o = (p[0] > 0.5) as usize | ((p[1] > 0.5) as usize) << 1 | ((p[2] > 0.5) as usize) << 2;
            seen[o] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(unit_point(3, 17), pts[17]);
    }
}
