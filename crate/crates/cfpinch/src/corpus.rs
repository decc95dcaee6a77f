//! Chart corpus files.
//!
//! A corpus is a TOML document with an optional `[tolerances]` table and a
//! list of `[[chart]]` tables. Every chart has a `name`, a `kind` and the
//! dimension `n`; `fd_step` and `outer_step` optionally override the
//! finite-difference steps of the built chart.
//!
//! ```toml
//! [[chart]]
//! name = "sphere-3"
//! kind = "sphere"
//! n = 3
//! radius = 1.0
//!
//! [[chart]]
//! name = "product-4"
//! kind = "product"
//! n = 4
//! length = 6.283185307179586
//! radius = 1.0
//!
//! [[chart]]
//! name = "derdzinski-4"
//! kind = "derdzinski"
//! n = 4
//! scalar = 6.0
//! c_fraction = 0.6        # or `c = 0.45`, or `table = "warp.txt"`
//!
//! [[chart]]
//! name = "conformal-3a"
//! kind = "conformal"
//! n = 3
//! half_width = 1.0
//! terms = [{ basis = "sin", i = 0, coeff = 0.4 }, { basis = "cross", i = 0, j = 1, coeff = 0.5 }]
//! ```
//!
//! `basis` is one of `linear`, `square`, `sin`, `cos` (coordinate `i`) or
//! `cross` (`x_i x_j`). Relative `table` paths are resolved against the
//! corpus file's directory. Writing a parsed corpus back with
//! [`Corpus::to_toml`] reproduces the same document.

use std::path::{Path, PathBuf};

use cfpinch_core::chart::MetricChart;
use cfpinch_core::derdzinski::{self, WarpOde};
use cfpinch_core::models::{self, Basis, ConformalSpec, ModelKind, ModelSpec, PhiTerm, WarpProfile};
use cfpinch_core::tensor::Dim;
use serde::{Deserialize, Serialize};

use crate::table;
use crate::tolerances::Tolerances;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Corpus {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    #[serde(default, rename = "chart")]
    pub charts: Vec<ChartEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartEntry {
    pub name: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_step: Option<f64>,
    #[serde(flatten)]
    pub kind: ChartKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChartKind {
    Sphere {
        radius: f64,
    },
    Product {
        length: f64,
        radius: f64,
    },
    Derdzinski {
        scalar: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        c_fraction: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        table: Option<PathBuf>,
    },
    Conformal {
        half_width: f64,
        terms: Vec<TermEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermEntry {
    pub basis: BasisName,
    pub i: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisName {
    Linear,
    Square,
    Cross,
    Sin,
    Cos,
}

impl TermEntry {
    fn to_term(&self) -> Result<PhiTerm> {
        let basis = match (self.basis, self.j) {
            (BasisName::Cross, Some(j)) => Basis::Cross(self.i, j),
            (BasisName::Cross, None) => return Err(Error::Config("cross term needs both i and j".into())),
            (_, Some(_)) => return Err(Error::Config(format!("{:?} term takes only i", self.basis))),
            (BasisName::Linear, None) => Basis::Linear(self.i),
            (BasisName::Square, None) => Basis::Square(self.i),
            (BasisName::Sin, None) => Basis::Sin(self.i),
            (BasisName::Cos, None) => Basis::Cos(self.i),
        };
        Ok(PhiTerm {
            basis,
            coeff: self.coeff,
        })
    }
}

impl Corpus {
    pub fn parse(text: &str) -> Result<Self> {
        let corpus: Corpus = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut seen = std::collections::BTreeSet::new();
        for c in &corpus.charts {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Config(format!("duplicate chart name {}", c.name)));
            }
        }
        Ok(corpus)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }
}

impl ChartEntry {
    /// Resolves the entry into a model; `base` anchors relative table paths.
    pub fn model(&self, base: &Path) -> Result<ModelSpec> {
        let dim = Dim::new(self.n)?;
        let kind = match &self.kind {
            ChartKind::Sphere { radius } => ModelKind::Sphere { radius: *radius },
            ChartKind::Product { length, radius } => ModelKind::Product {
                length: *length,
                radius: *radius,
            },
            ChartKind::Derdzinski {
                scalar,
                c,
                c_fraction,
                grid,
                table: path,
            } => {
                let sol = match (c, c_fraction, path) {
                    (None, None, Some(path)) => {
                        let sol = table::load(&base.join(path))?;
                        if sol.ode().dim() != dim || sol.ode().scalar() != *scalar {
                            return Err(Error::Config(format!("{}: table header disagrees with n/scalar", self.name)));
                        }
                        sol
                    }
                    (Some(c), None, None) => solve(dim, *scalar, *c, *grid)?,
                    (None, Some(frac), None) => {
                        let (_, c_max) = derdzinski::admissible_range(dim, *scalar)?;
                        solve(dim, *scalar, frac * c_max, *grid)?
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "{}: give exactly one of c, c_fraction, table",
                            self.name
                        )))
                    }
                };
                ModelKind::Warped(WarpProfile::Solution(sol))
            }
            ChartKind::Conformal { half_width, terms } => ModelKind::Conformal(ConformalSpec {
                half_width: *half_width,
                terms: terms.iter().map(TermEntry::to_term).collect::<Result<_>>()?,
            }),
        };
        Ok(ModelSpec::new(dim, kind)?)
    }

    /// The model's chart with the entry's step overrides applied.
    pub fn chart(&self, spec: &ModelSpec) -> Result<MetricChart> {
        let mut chart = models::build_chart(spec)?;
        if let Some(h) = self.fd_step {
            chart = chart.with_fd_step(h);
        }
        if let Some(h) = self.outer_step {
            chart = chart.with_outer_step(h);
        }
        Ok(chart)
    }

    /// Sphere, product and Derdziński charts have constant scalar curvature.
    pub fn constant_scalar(&self) -> bool {
        !matches!(self.kind, ChartKind::Conformal { .. })
    }
}

fn solve(dim: Dim, scalar: f64, c: f64, grid: Option<usize>) -> Result<derdzinski::WarpSolution> {
    let ode = WarpOde::new(dim, scalar, c)?;
    Ok(derdzinski::solve(&ode, grid.unwrap_or(derdzinski::CHART_GRID))?)
}
