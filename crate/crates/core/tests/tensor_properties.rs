use cfpinch_core::tensor::{self, Curv4, EigenPattern, Sym2};
use proptest::prelude::*;

/// Symmetric matrix from a flat list of at least `n * n` entries.
fn sym(n: usize, raw: &[f64]) -> Sym2 {
    Sym2::from_fn(n, |i, j| 0.5 * (raw[i * n + j] + raw[j * n + i]))
}

/// `identity + small symmetric perturbation`, always positive definite.
fn metric(n: usize, raw: &[f64]) -> Sym2 {
    let p = sym(n, raw);
    &Sym2::identity(n) + &(&p * (0.2 / n as f64))
}

fn trace_free(g: &Sym2, s: &Sym2) -> Sym2 {
    let n = g.dim() as f64;
    let tr = tensor::trace(g, s).unwrap();
    s - &(g * (tr / n))
}

/// Orthogonal matrix as a product of Givens rotations.
fn rotation(n: usize, angles: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }
    let mut a = angles.iter().cycle();
    for p in 0..n {
        for r in p + 1..n {
            let (s, c) = a.next().unwrap().sin_cos();
            for k in 0..n {
                let (x, y) = (q[k * n + p], q[k * n + r]);
                q[k * n + p] = c * x - s * y;
                q[k * n + r] = s * x + c * y;
            }
        }
    }
    q
}

/// `Q diag(d) Qᵀ`.
fn conjugate(q: &[f64], d: &[f64]) -> Sym2 {
    let n = d.len();
    Sym2::from_fn(n, |i, j| (0..n).map(|k| q[i * n + k] * d[k] * q[j * n + k]).sum())
}

fn dims() -> impl Strategy<Value = usize> {
    3usize..=6
}

fn raw(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cf_riemann_has_curvature_symmetries(n in dims(), a in raw(36), b in raw(36), r in -20.0f64..20.0) {
        let g = metric(n, &a);
        let e = trace_free(&g, &sym(n, &b));
        let riem = tensor::cf_riemann_from_ricci(&g, &e, r).unwrap();
        let scale = 1.0 + riem.max_abs();
        prop_assert!(riem.antisymmetry_defect() <= 1e-12 * scale);
        prop_assert!(riem.pair_symmetry_defect() <= 1e-12 * scale);
        prop_assert!(riem.bianchi_defect() <= 1e-12 * scale);
        let ric = riem.ricci_contraction(&g).unwrap();
        let expected = &e + &(&g * (r / n as f64));
        prop_assert!((&ric - &expected).max_abs() <= 1e-12 * scale);
        let w = tensor::weyl_from(&g, &riem, &ric, r).unwrap();
        prop_assert!(w.max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn weyl_and_reassemble_are_inverse(n in dims(), a in raw(36), b in raw(36), c in raw(36), d in raw(36)) {
        // A sum of Kulkarni–Nomizu products has every algebraic curvature symmetry.
        let g = metric(n, &a);
        let riem = tensor::kulkarni_nomizu(&sym(n, &b), &sym(n, &c))
            .combine(1.0, &tensor::kulkarni_nomizu(&sym(n, &d), &sym(n, &d)), 0.5);
        let ric = riem.ricci_contraction(&g).unwrap();
        let r = tensor::trace(&g, &ric).unwrap();
        let w = tensor::weyl_from(&g, &riem, &ric, r).unwrap();
        let back = tensor::reassemble(&g, &w, &ric, r).unwrap();
        let scale = 1.0 + riem.max_abs();
        prop_assert!(back.combine(1.0, &riem, -1.0).max_abs() <= 1e-14 * scale * 16.0);
        // W is totally trace-free.
        let tr = w.ricci_contraction(&g).unwrap();
        prop_assert!(tr.max_abs() <= 1e-10 * scale);
    }

    #[test]
    fn q_identity_on_conformally_flat_input(n in dims(), a in raw(36), b in raw(36), r in -20.0f64..20.0) {
        let g = metric(n, &a);
        let e = trace_free(&g, &sym(n, &b));
        let riem = tensor::cf_riemann_from_ricci(&g, &e, r).unwrap();
        let ric = &e + &(&g * (r / n as f64));
        let q = tensor::q_invariant(&g, &riem, &ric, &e).unwrap();
        prop_assert!(q.defect() <= 1e-10 * q.direct.abs().max(1.0), "{q:?}");
    }

    #[test]
    fn okumura_gap_is_non_negative(n in dims(), a in raw(36), b in raw(36), s in 0.01f64..50.0) {
        let g = metric(n, &a);
        let e = &trace_free(&g, &sym(n, &b)) * s;
        let norm = tensor::norm(&g, &e).unwrap();
        let gap = tensor::okumura_gap(&g, &e).unwrap();
        prop_assert!(gap >= -1e-12 * norm.powi(3).max(1.0), "gap {gap:e}");
    }

    #[test]
    fn okumura_equality_exactly_on_pattern(n in dims(), angles in raw(15), lambda in -3.0f64..3.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let mut d = vec![lambda; n];
        d[n - 1] = -(n as f64 - 1.0) * lambda;
        let q = rotation(n, &angles);
        let e = conjugate(&q, &d);
        let g = Sym2::identity(n);
        let norm3 = tensor::norm(&g, &e).unwrap().powi(3);
        let gap = tensor::okumura_gap(&g, &e).unwrap();
        if lambda > 0.0 {
            prop_assert!(gap.abs() <= 1e-10 * norm3.max(1.0));
        } else {
            prop_assert!(gap > 1e-3 * norm3);
        }
        match tensor::eigen_pattern(&g, &e, 1e-9).unwrap() {
            EigenPattern::Pattern { lambda: l } => prop_assert!((l - lambda).abs() < 1e-9 * lambda.abs().max(1.0)),
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn schouten_trace_law(n in dims(), a in raw(36), b in raw(36)) {
        let g = metric(n, &a);
        let ric = sym(n, &b);
        let r = tensor::trace(&g, &ric).unwrap();
        let s = tensor::schouten(&g, &ric, r).unwrap();
        let tr = tensor::trace(&g, &s).unwrap();
        prop_assert!((tr - r / (2.0 * (n as f64 - 1.0))).abs() <= 1e-12 * r.abs().max(1.0));
    }

    #[test]
    fn trace_free_part_is_trace_free(n in dims(), a in raw(36), b in raw(36)) {
        let g = metric(n, &a);
        let ric = sym(n, &b);
        let r = tensor::trace(&g, &ric).unwrap();
        let e = tensor::trace_free_part(&g, &ric, r).unwrap();
        prop_assert!(tensor::trace(&g, &e).unwrap().abs() <= 1e-12 * r.abs().max(1.0));
        let sq = tensor::ScalarQuantities::new(&g, &ric).unwrap();
        let direct = tensor::norm(&g, &e).unwrap();
        prop_assert!((sq.norm_e.powi(2) - direct.powi(2)).abs() <= 1e-12 * direct.powi(2).max(1e-300));
    }
}

#[test]
fn generalized_eigenvalues_respect_metric() {
    // Relative to g = diag(4, 1, 1), E = diag(4, 1, -2) has eigenvalues 1, 1, -2.
    let g = Sym2::from_diag(&[4.0, 1.0, 1.0]);
    let e = Sym2::from_diag(&[4.0, 1.0, -2.0]);
    let vals = tensor::generalized_eigenvalues(&g, &e).unwrap();
    assert!((vals[0] + 2.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14 && (vals[2] - 1.0).abs() < 1e-14);
    assert_eq!(tensor::eigen_pattern(&g, &e, 1e-10).unwrap(), EigenPattern::Pattern { lambda: 1.0 });
}

#[test]
fn curv4_zero_has_no_defects() {
    let z = Curv4::zeros(4);
    assert_eq!(z.bianchi_defect(), 0.0);
}
