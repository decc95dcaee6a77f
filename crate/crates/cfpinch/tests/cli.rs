use std::path::Path;
use std::process::{Command, Output};

use cfpinch::corpus::Corpus;
use cfpinch::report::{Report, SCHEMA_VERSION};
use cfpinch::table;
use cfpinch_core::derdzinski::{self, WarpOde};
use cfpinch_core::tensor::Dim;

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/default.toml");

fn cfpinch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfpinch"))
        .current_dir(dir)
        .env_remove("CFPINCH_CORPUS")
        .args(args)
        .output()
        .expect("run cfpinch")
}

fn report(dir: &Path, name: &str) -> Report {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn product_pinch_passes_and_writes_a_versioned_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfpinch(dir.path(), &["pinch", "--model", "product", "--n", "4", "--L", "6.2832", "--r", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("PASS pinching product n=4"));
    let r = report(dir.path(), "pinch.json");
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    assert!(r.passed);
    assert!(r.sections[0].info["P"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn derdzinski_table_feeds_pinch() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfpinch(dir.path(), &["derdzinski", "--n", "4", "--R", "6", "--C", "0.45", "--table", "w.txt"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let r = report(dir.path(), "derdzinski.json");
    let conserved = r.sections[0].checks.iter().find(|c| c.name == "conserved-quantity defect").unwrap();
    assert!(conserved.passed && conserved.value <= 1e-9);

    let loaded = table::load(&dir.path().join("w.txt")).unwrap();
    let direct = derdzinski::solve(&WarpOde::new(Dim::new(4).unwrap(), 6.0, 0.45).unwrap(), derdzinski::CHART_GRID).unwrap();
    assert_eq!(loaded.samples(), direct.samples());
    assert_eq!(loaded.period(), direct.period());

    let out = cfpinch(dir.path(), &["pinch", "--model", "derdzinski", "--n", "4", "--warp-table", "w.txt", "-o", "p.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(report(dir.path(), "p.json").passed);
}

#[test]
fn tolerance_failure_exits_one_and_names_the_residual() {
    let dir = tempfile::tempdir().unwrap();
    let out = cfpinch(dir.path(), &["pinch", "--model", "derdzinski", "--n", "3", "--tol", "pinch_relative=0"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("|P| / scale"), "{stderr}");
    assert!(!report(dir.path(), "pinch.json").passed);
}

#[test]
fn usage_and_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        &["verify-identities", "--tol", "nonsense=1"][..],
        &["verify-identities", "--tol", "weyl"],
        &["verify-identities", "--corpus", "/no/such/corpus.toml"],
        &["pinch", "--model", "torus", "--n", "4"],
        &["pinch", "--model", "sphere", "--n", "2"],
        &["derdzinski", "--n", "4", "--R", "6", "--C", "0.9"],
        &["verify-models", "--chart", "no-such-chart"],
        &["frobnicate"],
    ] {
        assert_eq!(cfpinch(d, args).status.code(), Some(2), "{args:?}");
    }
    std::fs::write(d.join("bad.toml"), "[[chart]]\nname = 1\n").unwrap();
    assert_eq!(cfpinch(d, &["verify-identities", "--corpus", "bad.toml"]).status.code(), Some(2));
}

#[test]
fn corpus_from_environment_and_its_tolerances_apply() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = "[tolerances]\nweyl = 0.0\n\n[[chart]]\nname = \"c\"\nkind = \"conformal\"\nn = 3\nhalf_width = 1.0\nterms = [{ basis = \"sin\", i = 0, coeff = 0.4 }]\n";
    std::fs::write(dir.path().join("c.toml"), corpus).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cfpinch"))
        .current_dir(dir.path())
        .env("CFPINCH_CORPUS", "c.toml")
        .args(["verify-models", "--points", "5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let r = report(dir.path(), "verify-models.json");
    assert_eq!(r.sections.len(), 1);
    let failed: Vec<_> = r.failures().map(|(_, c)| c.name.as_str()).collect();
    assert_eq!(failed, ["max |W|"]);
}

#[test]
fn default_corpus_round_trips() {
    let corpus = Corpus::load(Path::new(CORPUS)).unwrap();
    assert_eq!(corpus.charts.len(), 24);
    let text = corpus.to_toml().unwrap();
    assert_eq!(Corpus::parse(&text).unwrap(), corpus);
}
