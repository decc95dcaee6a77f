//! Verification suites. Each returns report sections; none of them panics on
//! a numerical failure.

use std::path::Path;

use cfpinch_core::chart::{MetricChart, Sym2Field};
use cfpinch_core::derdzinski::{self, WarpSolution};
use cfpinch_core::models::{self, ModelKind, ModelSpec, WarpProfile};
use cfpinch_core::pinching::{self, PATTERN_TOL};
use cfpinch_core::tensor::{self, Dim, EigenPattern};
use rand::Rng;

use crate::corpus::{ChartEntry, Corpus};
use crate::random;
use crate::report::Section;
use crate::tolerances::Tolerances;
use crate::Result;

pub const IDENTITY_DIMS: [usize; 4] = [3, 4, 5, 6];
pub const EPSILONS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Q identity and Okumura inequality on `samples` random inputs per dimension.
pub fn identities(seed: u64, samples: usize, tol: &Tolerances) -> Vec<Section> {
    let mut rng = random::rng(seed);
    let mut out = Vec::new();
    for n in IDENTITY_DIMS {
        out.push(q_identity(n, samples, &mut rng, tol));
        out.push(okumura(n, samples, &mut rng, tol));
    }
    out
}

fn q_identity(n: usize, samples: usize, rng: &mut impl Rng, tol: &Tolerances) -> Section {
    let mut s = Section::new(format!("Q identity n={n}"));
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let (g, _) = random::metric(n, rng);
        let e = random::trace_free(&g, rng);
        let r = rng.random_range(-50.0..50.0);
        let computed = (|| {
            let riem = tensor::cf_riemann_from_ricci(&g, &e, r)?;
            let ric = &e + &g.scale(r / n as f64);
            let norm = tensor::norm(&g, &e)?;
            let q = tensor::q_invariant(&g, &riem, &ric, &e)?;
            Ok::<_, cfpinch_core::Error>(q.defect() / (r.abs() * norm * norm).max(norm.powi(3)).max(1.0))
        })();
        match computed {
            Ok(d) => worst = worst.max(d),
            Err(e) => {
                s.failure("Q identity", e);
                return s;
            }
        }
    }
    s.at_most("max relative defect", worst, tol.q_identity).info("samples", samples);
    s
}

fn okumura(n: usize, samples: usize, rng: &mut impl Rng, tol: &Tolerances) -> Section {
    let mut s = Section::new(format!("Okumura inequality n={n}"));
    let (mut min_gap, mut max_equality, mut strict_min) = (f64::INFINITY, 0.0f64, f64::INFINITY);
    let mut recovered = 0usize;
    for _ in 0..samples {
        let (g, l) = random::metric(n, rng);
        let e = random::trace_free(&g, rng);
        let lambda = random::magnitude(rng);
        let result = (|| {
            let norm = tensor::norm(&g, &e)?;
            let gap = tensor::okumura_gap(&g, &e)? / norm.powi(3);
            let p = random::pattern(&l, lambda, rng);
            let p_norm3 = tensor::norm(&g, &p)?.powi(3);
            let eq = tensor::okumura_gap(&g, &p)?.abs() / p_norm3.max(1.0);
            let hit = matches!(tensor::eigen_pattern(&g, &p, PATTERN_TOL)?,
                EigenPattern::Pattern { lambda: got } if (got - lambda).abs() <= 1e-8 * lambda);
            // The negative branch of the same pattern is strictly inside.
            let neg = random::pattern(&l, -lambda, rng);
            let strict = tensor::okumura_gap(&g, &neg)? / tensor::norm(&g, &neg)?.powi(3);
            Ok::<_, cfpinch_core::Error>((gap, eq, hit, strict))
        })();
        match result {
            Ok((gap, eq, hit, strict)) => {
                min_gap = min_gap.min(gap);
                max_equality = max_equality.max(eq);
                strict_min = strict_min.min(strict);
                recovered += hit as usize;
            }
            Err(e) => {
                s.failure("Okumura", e);
                return s;
            }
        }
    }
    s.at_least("min gap / |E|^3", min_gap, -tol.okumura_gap)
        .at_most("max |gap| / max(1,|E|^3) on patterns", max_equality, tol.okumura_equality)
        .equal("pattern recovery fraction", recovered as f64 / samples.max(1) as f64, 1.0)
        .info("min gap / |E|^3 on negative patterns", strict_min)
        .info("samples", samples);
    s
}

/// Conformal flatness audit and, on constant-R charts, the Codazzi suite.
pub fn models(corpus: &Corpus, base: &Path, points: usize, codazzi_points: usize, tol: &Tolerances) -> Vec<Section> {
    let mut out = Vec::new();
    for entry in &corpus.charts {
        let built = entry.model(base).and_then(|spec| Ok((entry.chart(&spec)?, spec)));
        match built {
            Ok((chart, _)) => {
                out.push(flatness(&entry.name, &chart, points, tol));
                if entry.constant_scalar() {
                    out.push(codazzi(&entry.name, &chart, codazzi_points, tol));
                }
            }
            Err(e) => {
                let mut s = Section::new(format!("chart {}", entry.name));
                s.failure("build", e);
                out.push(s);
            }
        }
    }
    out
}

pub fn flatness(name: &str, chart: &MetricChart, points: usize, tol: &Tolerances) -> Section {
    let mut s = Section::new(format!("conformal flatness {name}"));
    let n = chart.dim();
    let (mut weyl, mut cotton, mut div, mut sym) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for x in chart.sample_points(points) {
        let r = (|| {
            let geo = chart.geometry_at(&x)?;
            let scale = 1.0 + geo.riemann.max_abs();
            let sym = geo.riemann.pair_symmetry_defect().max(geo.riemann.bianchi_defect()) / scale;
            let w = geo.weyl()?.max_abs();
            let c = chart.cotton_at(&x)?.max_abs();
            let d = if n >= 4 { chart.weyl_divergence_defect_at(&x)? } else { 0.0 };
            Ok::<_, cfpinch_core::Error>((w, c, d, sym))
        })();
        match r {
            Ok((w, c, d, y)) => {
                weyl = weyl.max(w);
                cotton = cotton.max(c);
                div = div.max(d);
                sym = sym.max(y);
            }
            Err(e) => {
                s.failure("curvature", e);
                return s;
            }
        }
    }
    s.at_most("max |W|", weyl, tol.weyl).at_most("max |C|", cotton, tol.cotton);
    if n >= 4 {
        s.at_most("max Weyl divergence defect", div, tol.weyl_divergence);
    }
    s.info("points", points).info("curvature symmetry defect", sym);
    s
}

pub fn codazzi(name: &str, chart: &MetricChart, points: usize, tol: &Tolerances) -> Section {
    let mut s = Section::new(format!("Codazzi suite {name}"));
    let samples = chart.sample_points(points);
    let schouten = Sym2Field::schouten(chart);
    let worst = samples
        .iter()
        .map(|x| chart.codazzi_defect_at(&schouten, x))
        .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)));
    match worst {
        Ok(w) => s.at_most("Schouten Codazzi defect", w, tol.codazzi),
        Err(e) => s.failure("Schouten Codazzi defect", e),
    };
    for (label, field) in [
        ("trace-free Schouten", Sym2Field::trace_free_schouten(chart)),
        ("E", Sym2Field::trace_free_ricci(chart)),
    ] {
        let (mut cod, mut ell, mut wz, mut kato, mut kato_abs) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
        let mut vanishing = 0usize;
        for x in &samples {
            let r = (|| {
                let c = chart.codazzi_defect_at(&field, x)?;
                let e = chart.elliptic_residual_at(&field, x)?.normalized();
                let w = chart.weitzenbock_residual_at(&field, x)?.normalized();
                let k = match chart.kato_gap_at(&field, x) {
                    Ok(k) => Some(k.normalized()),
                    Err(cfpinch_core::Error::VanishingLocus(_)) => None,
                    Err(e) => return Err(e),
                };
                Ok::<_, cfpinch_core::Error>((c, e, w, k))
            })();
            match r {
                Ok((c, e, w, k)) => {
                    cod = cod.max(c);
                    ell = ell.max(e);
                    wz = wz.max(w);
                    match k {
                        Some(k) => {
                            kato = kato.min(k);
                            kato_abs = kato_abs.max(k.abs());
                        }
                        None => vanishing += 1,
                    }
                }
                Err(e) => {
                    s.failure(format!("{label} identities"), e);
                    return s;
                }
            }
        }
        s.at_most(format!("{label} Codazzi defect"), cod, tol.codazzi)
            .at_most(format!("{label} elliptic residual"), ell, tol.elliptic)
            .at_most(format!("{label} Weitzenbock residual"), wz, tol.weitzenbock);
        if vanishing < samples.len() {
            s.at_least(format!("{label} Kato gap"), kato, -tol.kato)
                .info(format!("{label} max |Kato gap|"), kato_abs);
        }
        s.info(format!("{label} points on the vanishing locus"), vanishing);
    }
    s.info("points", points);
    s
}

pub fn derdzinski_model(sol: WarpSolution) -> cfpinch_core::Result<ModelSpec> {
    ModelSpec::new(sol.ode().dim(), ModelKind::Warped(WarpProfile::Solution(sol)))
}

/// Budgets of a warp solution and the curvature of the chart built from it.
pub fn derdzinski(sol: &WarpSolution, points: usize, tol: &Tolerances) -> Section {
    let ode = sol.ode();
    let n = ode.dim().get();
    let mut s = Section::new(format!("Derdzinski n={n} R={} C={}", ode.scalar(), ode.c()));
    let d = sol.defects();
    s.at_most("conserved-quantity defect", d.conserved, tol.conserved)
        .at_most("periodicity closure", d.closure, tol.closure)
        .at_most("time-reversal symmetry", d.symmetry, tol.closure)
        .info("interpolation defect", d.interpolation)
        .info("period", sol.period())
        .info("period agreement", d.period_agreement)
        .info("fmin", sol.fmin())
        .info("fmax", sol.fmax())
        .info("C / C_max", ode.c() / ode.c_max())
        .info("grid", sol.grid_len());
    let checked = (|| {
        let spec = derdzinski_model(sol.clone())?;
        let chart = models::build_chart(&spec)?;
        let (mut scalar, mut min_lambda, mut pattern) = (0.0f64, f64::INFINITY, 0usize);
        let samples = chart.sample_points(points);
        for x in &samples {
            let geo = chart.geometry_at(x)?;
            scalar = scalar.max((geo.scalar - ode.scalar()).abs());
            if let EigenPattern::Pattern { lambda } = tensor::eigen_pattern(&geo.g, &geo.trace_free_ricci(), PATTERN_TOL)? {
                pattern += 1;
                min_lambda = min_lambda.min(lambda);
            }
        }
        Ok::<_, cfpinch_core::Error>((scalar, min_lambda, pattern as f64 / samples.len().max(1) as f64))
    })();
    match checked {
        Ok((scalar, min_lambda, fraction)) => {
            s.at_most("max |R_chart - R|", scalar, tol.scalar_curvature)
                .equal("E pattern fraction", fraction, 1.0)
                .at_least("min pattern eigenvalue", min_lambda, -tol.pattern_lambda);
        }
        Err(e) => {
            s.failure("built chart", e);
        }
    }
    s
}

/// The (n, R, C/C_max) sweep of the warping equation.
pub fn derdzinski_sweep(dims: &[usize], scalars: &[f64], fractions: &[f64], points: usize, tol: &Tolerances) -> Vec<Section> {
    let mut out = Vec::new();
    for &n in dims {
        for &r in scalars {
            for &frac in fractions {
                let sol = Dim::new(n)
                    .and_then(|d| derdzinski::admissible_range(d, r).map(|(_, c_max)| (d, c_max)))
                    .and_then(|(d, c_max)| derdzinski::WarpOde::new(d, r, frac * c_max))
                    .and_then(|ode| derdzinski::solve(&ode, derdzinski::CHART_GRID));
                match sol {
                    Ok(sol) => out.push(derdzinski(&sol, points, tol)),
                    Err(e) => {
                        let mut s = Section::new(format!("Derdzinski n={n} R={r} C/C_max={frac}"));
                        s.failure("solve", e);
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

/// Sample counts of the pinching suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PinchCounts {
    pub nodes: usize,
    pub audit: usize,
    pub scan: usize,
}

impl Default for PinchCounts {
    fn default() -> Self {
        PinchCounts {
            nodes: 256,
            audit: 20,
            scan: 50,
        }
    }
}

/// Pinching functional, regularized integrals and equality scan for a model.
pub fn pinch(label: &str, spec: &ModelSpec, counts: PinchCounts, tol: &Tolerances) -> Section {
    let mut s = Section::new(format!("pinching {label}"));
    match pinching::pinch_functional(spec, counts.nodes, counts.audit) {
        Ok(p) => {
            s.info("P", p.value)
                .info("scale", p.scale)
                .info("volume", p.volume)
                .info("max integrand", p.max_integrand)
                .info("min |E|", p.min_norm_e);
            match spec.kind {
                ModelKind::Sphere { .. } => {
                    s.equal("P", p.value, 0.0);
                }
                ModelKind::Product { .. } => {
                    s.at_most("|P| / max(1, scale)", p.value.abs() / p.scale.max(1.0), tol.pinch_product)
                        .at_most("max |integrand|", p.max_integrand, tol.product_integrand);
                }
                _ => {
                    s.at_most("|P| / scale", p.value.abs() / p.scale, tol.pinch_relative)
                        .at_least("max integrand / scale", p.max_integrand / p.scale, tol.cancellation_fraction)
                        .at_most("quadrature doubling / scale", p.error / p.scale, tol.quadrature_doubling);
                    match pinching::pinch_functional_fd(spec, counts.nodes, counts.audit) {
                        Ok(fd) => s.at_most("|P from chart curvature| / scale", fd.abs() / p.scale, tol.pinch_relative),
                        Err(e) => s.failure("P from chart curvature", e),
                    };
                }
            }
        }
        Err(e) => {
            s.failure("P", e);
        }
    }
    let mut series = Vec::new();
    for eps in EPSILONS {
        match pinching::regularized_prop_integral(spec, eps, counts.nodes, counts.audit) {
            Ok(v) => {
                s.at_most(format!("|regularized integral| eps={eps:e}"), v.value.abs(), tol.regularized);
                series.push(v.value);
            }
            Err(e) => {
                s.failure(format!("regularized integral eps={eps:e}"), e);
            }
        }
    }
    if series.len() == EPSILONS.len() {
        let steps: Vec<f64> = series.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        s.at_most("Cauchy step growth", steps[1] - steps[0], 1e-12)
            .info("regularized series", series.clone())
            .info(
                "regularized series monotone",
                series.windows(2).all(|w| w[1] <= w[0]) || series.windows(2).all(|w| w[1] >= w[0]),
            );
    }
    match pinching::equality_case_scan(spec, counts.scan, counts.audit) {
        Ok(scan) => {
            s.equal("pattern fraction", scan.pattern_fraction, 1.0)
                .info("null points", scan.null)
                .info("pattern points", scan.pattern)
                .info("max Okumura gap", scan.max_okumura_gap);
            if scan.pattern > 0 {
                s.info("min pattern eigenvalue", scan.min_lambda);
            }
        }
        Err(e) => {
            s.failure("equality scan", e);
        }
    }
    s
}

/// The three model families at dimension `n`.
pub fn standard_models(n: usize) -> Result<Vec<(String, ModelSpec)>> {
    let dim = Dim::new(n)?;
    let (_, c_max) = derdzinski::admissible_range(dim, 6.0)?;
    let sol = derdzinski::solve(&derdzinski::WarpOde::new(dim, 6.0, 0.6 * c_max)?, derdzinski::CHART_GRID)?;
    Ok(vec![
        (format!("sphere n={n}"), ModelSpec::new(dim, ModelKind::Sphere { radius: 1.0 })?),
        (
            format!("product n={n}"),
            ModelSpec::new(
                dim,
                ModelKind::Product {
                    length: std::f64::consts::TAU,
                    radius: 1.0,
                },
            )?,
        ),
        (format!("Derdzinski n={n}"), derdzinski_model(sol)?),
    ])
}

/// A corpus entry resolved to its model, for callers that need both.
pub fn resolve(entry: &ChartEntry, base: &Path) -> Result<(ModelSpec, MetricChart)> {
    let spec = entry.model(base)?;
    let chart = entry.chart(&spec)?;
    Ok((spec, chart))
}
