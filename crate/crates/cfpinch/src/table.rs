//! Plain-text warp tables.
//!
//! ```text
//! # cfpinch warp table
//! # n = 4
//! # R = 6e0
//! # C = 4.5e-1
//! # period = 2.6...e0
//! # fmin = ...
//! # fmax = ...
//! # t F dF
//! 0e0 8.1...e-1 0e0
//! ...
//! ```
//!
//! Numbers are written in the shortest form that parses back to the same
//! `f64`, so a table reproduces its solution exactly.

use std::fmt::Write as _;
use std::path::Path;

use cfpinch_core::derdzinski::{WarpOde, WarpSolution};
use cfpinch_core::tensor::Dim;

use crate::{Error, Result};

const MAGIC: &str = "# cfpinch warp table";

pub fn write(sol: &WarpSolution) -> String {
    let ode = sol.ode();
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "# n = {}", ode.dim().get());
    let _ = writeln!(out, "# R = {:e}", ode.scalar());
    let _ = writeln!(out, "# C = {:e}", ode.c());
    let _ = writeln!(out, "# period = {:e}", sol.period());
    let _ = writeln!(out, "# fmin = {:e}", sol.fmin());
    let _ = writeln!(out, "# fmax = {:e}", sol.fmax());
    let _ = writeln!(out, "# t F dF");
    for k in 0..sol.grid_len() {
        let (t, f, df) = sol.grid_point(k);
        let _ = writeln!(out, "{t:e} {f:e} {df:e}");
    }
    out
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Table {
        line,
        msg: msg.into(),
    }
}

pub fn parse(text: &str) -> Result<WarpSolution> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, MAGIC)) => {}
        _ => return Err(bad(1, "missing table header")),
    }
    let mut header = std::collections::BTreeMap::new();
    let (mut t, mut f, mut df) = (Vec::new(), Vec::new(), Vec::new());
    for (no, line) in lines {
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once('=') {
                header.insert(k.trim().to_string(), (no, v.trim().to_string()));
            }
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(bad(no, format!("expected 3 columns, found {}", cols.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(no, format!("{s}: {e}")));
        t.push(num(cols[0])?);
        f.push(num(cols[1])?);
        df.push(num(cols[2])?);
    }
    let get = |key: &str| -> Result<f64> {
        let (no, v) = header.get(key).ok_or_else(|| bad(0, format!("header lacks {key}")))?;
        v.parse::<f64>().map_err(|e| bad(*no, format!("{key}: {e}")))
    };
    let n = get("n")?;
    if n.fract() != 0.0 || n < 0.0 {
        return Err(bad(0, format!("n = {n} is not a dimension")));
    }
    let ode = WarpOde::new(Dim::new(n as usize)?, get("R")?, get("C")?)?;
    let period = get("period")?;
    for (k, &tk) in t.iter().enumerate() {
        let expected = k as f64 * period / t.len() as f64;
        if (tk - expected).abs() > 1e-12 * period {
            return Err(bad(0, format!("row {k}: t = {tk} is off the uniform grid ({expected})")));
        }
    }
    let sol = WarpSolution::from_samples(ode, period, f, df)?;
    for (key, value) in [("fmin", sol.fmin()), ("fmax", sol.fmax())] {
        let stored = get(key)?;
        if (stored - value).abs() > 1e-12 * value {
            return Err(bad(0, format!("{key} = {stored} disagrees with the turning point {value}")));
        }
    }
    Ok(sol)
}

pub fn load(path: &Path) -> Result<WarpSolution> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text)
}
