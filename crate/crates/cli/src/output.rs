//! Artifact writers. Floats in CSV use 17 significant digits in scientific
//! notation; Rust formatting is locale-free so '.' is always the separator.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use entroloss_core::sequence::{Relation, RowBasis};
use entroloss_core::{BoundDirection, DjEstimate, ExtendedReal, SuiteReport};
use serde::Serialize;

use crate::CliError;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x > 0.0 {
        "+inf".into()
    } else if x < 0.0 {
        "-inf".into()
    } else {
        "nan".into()
    }
}

pub fn ext(x: ExtendedReal) -> String {
    match x {
        ExtendedReal::Finite(v) => num(v),
        ExtendedReal::PosInfinity => "+inf".into(),
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Short human form for terminal tables.
pub fn short(x: Option<f64>) -> String {
    // `+ 0.0` folds a negative zero
    x.map(|v| format!("{:.3e}", v + 0.0)).unwrap_or_else(|| "-".into())
}

pub fn direction(d: Option<BoundDirection>) -> &'static str {
    match d {
        Some(BoundDirection::UpperBound) => "UPPER_BOUND",
        Some(BoundDirection::LowerBound) => "LOWER_BOUND",
        None => "",
    }
}

fn relation(r: &Relation) -> String {
    match r {
        Relation::Le => "le".into(),
        Relation::Eq => "eq".into(),
        Relation::Band { lo, hi } => format!("band[{lo},{hi}]"),
    }
}

fn basis(b: RowBasis) -> &'static str {
    match b {
        RowBasis::Measured => "measured",
        RowBasis::Pointwise => "pointwise",
        RowBasis::Asymptotic => "asymptotic",
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e.to_string()))
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// `sequence, functional, n, value, limit, dj, bound` per grid point.
pub fn series_rows(estimates: &[DjEstimate]) -> (Vec<String>, Vec<Vec<String>>) {
    let header = strings(&["sequence", "functional", "n", "value", "limit", "dj", "bound"]);
    let mut rows = Vec::new();
    for e in estimates {
        for (n, v) in e.grid.iter().zip(&e.values) {
            rows.push(vec![
                e.sequence.clone(),
                e.functional.clone(),
                n.to_string(),
                ext(*v),
                ext(e.limit_value),
                ext(e.dj),
                direction(e.bound_direction).to_string(),
            ]);
        }
    }
    (header, rows)
}

/// Wide plot data: `n` and one column per `sequence/functional`.
pub fn plot_rows(estimates: &[DjEstimate]) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header = vec!["n".to_string()];
    let mut ns = BTreeSet::new();
    let mut cols: Vec<BTreeMap<usize, String>> = Vec::new();
    for e in estimates {
        header.push(format!("{}/{}", e.sequence, e.functional));
        ns.extend(e.grid.iter().copied());
        cols.push(e.grid.iter().zip(&e.values).map(|(n, v)| (*n, ext(*v))).collect());
    }
    let rows = ns
        .into_iter()
        .map(|n| {
            let mut r = vec![n.to_string()];
            r.extend(cols.iter().map(|c| c.get(&n).cloned().unwrap_or_default()));
            r
        })
        .collect();
    (header, rows)
}

/// Check rows with one extra column per key appearing in any row's extras.
pub fn check_rows(report: &SuiteReport) -> (Vec<String>, Vec<Vec<String>>) {
    let extras: BTreeSet<&String> = report.checks.iter().flat_map(|c| c.extras.keys()).collect();
    let mut header = strings(&[
        "family", "check", "relation", "lhs", "rhs", "tolerance", "slack", "pass", "basis", "note",
    ]);
    header.extend(extras.iter().map(|k| k.to_string()));
    let rows = report
        .checks
        .iter()
        .map(|c| {
            let mut r = vec![
                c.family.clone(),
                c.check.clone(),
                relation(&c.relation),
                ext(c.lhs),
                ext(c.rhs),
                num(c.tolerance),
                opt(c.slack),
                c.pass.to_string(),
                basis(c.basis).to_string(),
                c.note.clone(),
            ];
            r.extend(extras.iter().map(|k| c.extras.get(*k).map(|v| num(*v)).unwrap_or_default()));
            r
        })
        .collect();
    (header, rows)
}

/// Writes `<id>.json`, `<id>.checks.csv`, `<id>.series.csv`, `<id>.plot.csv`.
pub fn write_suite(dir: &Path, report: &SuiteReport, json: bool, csv: bool) -> Result<Vec<PathBuf>, CliError> {
    let mut written = Vec::new();
    let id = &report.suite;
    if json {
        let p = dir.join(format!("{id}.json"));
        write_json(&p, report)?;
        written.push(p);
    }
    if csv {
        for (suffix, (h, r)) in [
            ("checks", check_rows(report)),
            ("series", series_rows(&report.estimates)),
            ("plot", plot_rows(&report.estimates)),
        ] {
            let p = dir.join(format!("{id}.{suffix}.csv"));
            write_csv(&p, &h, &r)?;
            written.push(p);
        }
    }
    Ok(written)
}
