use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cfpinch::corpus::Corpus;
use cfpinch::report::Report;
use cfpinch::suites::{self, PinchCounts};
use cfpinch::{table, Error, Result};
use cfpinch_core::derdzinski::{self, WarpOde};
use cfpinch_core::models::{ModelKind, ModelSpec};
use cfpinch_core::tensor::Dim;
use clap::{Parser, Subcommand, ValueEnum};

const DEFAULT_CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/default.toml");

#[derive(Debug, Parser)]
#[command(name = "cfpinch", version, about = "Numerical checks for conformally flat manifolds with constant scalar curvature")]
struct Cli {
    /// Chart corpus (TOML).
    #[arg(long, global = true, env = "CFPINCH_CORPUS", default_value = DEFAULT_CORPUS)]
    corpus: PathBuf,
    /// JSON report path [default: <command>.json]
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Seed for random sampling.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Tolerance override, `name=value`; repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE", value_parser = parse_tol)]
    tol: Vec<(String, f64)>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Q identity and Okumura inequality on random tensors.
    VerifyIdentities {
        /// Random inputs per dimension.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Curvature identities over the chart corpus.
    VerifyModels {
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Sample points of the Codazzi/Weitzenböck/Kato suite.
        #[arg(long, default_value_t = 20)]
        codazzi_points: usize,
        /// Restrict to the named charts; repeatable.
        #[arg(long = "chart")]
        charts: Vec<String>,
    },
    /// Solve the warping equation, write its table and validate it.
    Derdzinski {
        #[arg(long)]
        n: usize,
        #[arg(long = "R")]
        scalar: f64,
        #[arg(long = "C")]
        c: f64,
        #[arg(long, default_value_t = derdzinski::CHART_GRID)]
        grid: usize,
        /// Where to write the table [default: warp-n<n>.txt].
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Pinching functional, regularized integrals and equality scan.
    Pinch {
        #[arg(long, value_enum)]
        model: ModelName,
        #[arg(long)]
        n: usize,
        /// Circle length of the product.
        #[arg(long = "L", default_value_t = std::f64::consts::TAU)]
        length: f64,
        /// Radius of the sphere or of the product's sphere factor.
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        #[arg(long = "R", default_value_t = 6.0)]
        scalar: f64,
        #[arg(long = "C", conflicts_with_all = ["c_fraction", "warp_table"])]
        c: Option<f64>,
        /// `C / C_max` [default: 0.6].
        #[arg(long, conflicts_with = "warp_table")]
        c_fraction: Option<f64>,
        /// Read the warping function from a table instead of solving.
        #[arg(long)]
        warp_table: Option<PathBuf>,
        #[arg(long, default_value_t = PinchCounts::default().nodes)]
        nodes: usize,
        #[arg(long, default_value_t = PinchCounts::default().audit)]
        audit: usize,
        #[arg(long, default_value_t = PinchCounts::default().scan)]
        scan: usize,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelName {
    Sphere,
    Product,
    Derdzinski,
}

fn parse_tol(s: &str) -> std::result::Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value = value.trim().parse::<f64>().map_err(|e| format!("{value}: {e}"))?;
    Ok((name.trim().to_string(), value))
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifyIdentities { .. } => "verify-identities",
            Command::VerifyModels { .. } => "verify-models",
            Command::Derdzinski { .. } => "derdzinski",
            Command::Pinch { .. } => "pinch",
        }
    }
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

/// Builds the report; errors here are usage or configuration errors.
fn run(cli: &Cli) -> Result<Report> {
    let corpus = Corpus::load(&cli.corpus)?;
    let mut tol = corpus.tolerances.unwrap_or_default();
    for (name, value) in &cli.tol {
        tol.set(name, *value)?;
    }
    let command = cli.command.name();
    match &cli.command {
        Command::VerifyIdentities { samples } => {
            Ok(Report::new(command, Some(cli.seed), suites::identities(cli.seed, *samples, &tol)))
        }
        Command::VerifyModels {
            points,
            codazzi_points,
            charts,
        } => {
            let mut corpus = corpus;
            if !charts.is_empty() {
                for name in charts {
                    if !corpus.charts.iter().any(|c| &c.name == name) {
                        return Err(Error::Config(format!("no chart named {name} in {}", cli.corpus.display())));
                    }
                }
                corpus.charts.retain(|c| charts.contains(&c.name));
            }
            let sections = suites::models(&corpus, base_dir(&cli.corpus), *points, *codazzi_points, &tol);
            Ok(Report::new(command, None, sections))
        }
        Command::Derdzinski {
            n,
            scalar,
            c,
            grid,
            table: path,
            points,
        } => {
            let ode = WarpOde::new(Dim::new(*n)?, *scalar, *c)?;
            let sol = derdzinski::solve(&ode, *grid)?;
            let path = path.clone().unwrap_or_else(|| PathBuf::from(format!("warp-n{n}.txt")));
            std::fs::write(&path, table::write(&sol)).map_err(|e| Error::io(&path, e))?;
            let mut section = suites::derdzinski(&sol, *points, &tol);
            section.info("table", path.display().to_string());
            Ok(Report::new(command, None, vec![section]))
        }
        Command::Pinch {
            model,
            n,
            length,
            r,
            scalar,
            c,
            c_fraction,
            warp_table,
            nodes,
            audit,
            scan,
        } => {
            let dim = Dim::new(*n)?;
            let spec = match model {
                ModelName::Sphere => ModelSpec::new(dim, ModelKind::Sphere { radius: *r })?,
                ModelName::Product => ModelSpec::new(
                    dim,
                    ModelKind::Product {
                        length: *length,
                        radius: *r,
                    },
                )?,
                ModelName::Derdzinski => {
                    let sol = match (warp_table, c) {
                        (Some(path), _) => {
                            let sol = table::load(path)?;
                            if sol.ode().dim() != dim {
                                return Err(Error::Config(format!("{}: table is for another n", path.display())));
                            }
                            sol
                        }
                        (None, Some(c)) => derdzinski::solve(&WarpOde::new(dim, *scalar, *c)?, derdzinski::CHART_GRID)?,
                        (None, None) => {
                            let (_, c_max) = derdzinski::admissible_range(dim, *scalar)?;
                            let c = c_fraction.unwrap_or(0.6) * c_max;
                            derdzinski::solve(&WarpOde::new(dim, *scalar, c)?, derdzinski::CHART_GRID)?
                        }
                    };
                    suites::derdzinski_model(sol)?
                }
            };
            let counts = PinchCounts {
                nodes: *nodes,
                audit: *audit,
                scan: *scan,
            };
            let label = format!("{model:?} n={n}").to_lowercase();
            Ok(Report::new(command, None, vec![suites::pinch(&label, &spec, counts, &tol)]))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cfpinch: {e}");
            return ExitCode::from(2);
        }
    };
    let output = cli
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", cli.command.name())));
    if let Err(e) = std::fs::write(&output, report.to_json()) {
        eprintln!("cfpinch: {}", Error::io(&output, e));
        return ExitCode::from(2);
    }
    // A closed pipe on stdout must not turn a verdict into a panic.
    let mut stdout = std::io::stdout().lock();
    let _ = write!(stdout, "{}", report.summary());
    let _ = writeln!(stdout, "report written to {}", output.display());
    if report.passed {
        ExitCode::SUCCESS
    } else {
        for (section, check) in report.failures() {
            eprintln!("cfpinch: {}: {} failed ({:e})", section.name, check.name, check.value);
        }
        ExitCode::from(1)
    }
}
