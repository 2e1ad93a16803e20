use std::fs;
use std::path::{Path, PathBuf};

use entroloss_core::energy::Hamiltonian;
use entroloss_core::sequence::families::{builtin_families, family, log_hamiltonian};
use entroloss_core::sequence::{Functional, DEFAULT_WINDOW};
use entroloss_core::{dj_estimate, suite_claim, suite_ids, suite_run, OptimizerBudget, SuiteParams};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::output::{self, ext, num, short};
use crate::quantity::{self, Inputs, QUANTITIES};
use crate::{CliError, Globals};

fn budget(cfg: &RunConfig, base: OptimizerBudget) -> OptimizerBudget {
    cfg.budget.map_or(base, |b| b.apply(base))
}

fn hamiltonian(cfg: &RunConfig) -> Result<Option<Hamiltonian>, CliError> {
    cfg.hamiltonian.as_ref().map(|h| h.build()).transpose()
}

pub fn list() -> Result<(), CliError> {
    println!("families:");
    for f in builtin_families() {
        println!("  {:<22} {:<9} {}", f.name, f.kind, f.description);
    }
    println!("suites:");
    for id in suite_ids() {
        println!("  {:<22} {}", id, suite_claim(id).unwrap_or_default());
    }
    println!("quantities:");
    for (name, needs, desc) in QUANTITIES {
        println!("  {name:<28} [{needs}] {desc}");
    }
    println!("sequence functionals:");
    println!("  {}", FUNCTIONALS.join(", "));
    Ok(())
}

pub fn quantity(cfg: &RunConfig, g: &Globals) -> Result<(), CliError> {
    let spec = cfg
        .quantity
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [quantity] section".into()))?;
    let state = cfg.state.as_ref().map(|s| s.build("state")).transpose()?;
    let sigma = cfg.sigma.as_ref().map(|s| s.build("sigma")).transpose()?;
    let channel = cfg.channel.as_ref().map(|c| c.build()).transpose()?;
    let h = hamiltonian(cfg)?;
    let inputs = Inputs {
        state: state.as_ref(),
        sigma: sigma.as_ref(),
        channel: channel.as_ref(),
        hamiltonian: h.as_ref(),
        budget: budget(cfg, OptimizerBudget::default().with_seed(g.seed)),
        k: spec.k.map(|k| k.usize()),
        members: spec.members.map(|m| m.usize()),
    };
    let rec = quantity::evaluate(&spec.name, &inputs)?;
    let value = match rec.value.finite() {
        Some(v) => format!("{v:.6}"),
        None => "+inf".into(),
    };
    let mut line = format!("{} = {value} ({:?}", rec.quantity, rec.provenance).to_lowercase();
    if let Some(d) = rec.direction {
        line.push_str(&format!(", {}", output::direction(Some(d))));
        line.push_str(&format!(", converged={}, gap={:.1e}", rec.converged, rec.gap));
    }
    line.push(')');
    println!("{line}");

    output::ensure_dir(&g.out)?;
    if g.format.json() {
        output::write_json(&g.out.join("quantity.json"), &rec)?;
    }
    if g.format.csv() {
        let header: Vec<String> = ["quantity", "value", "provenance", "direction", "converged", "gap", "seed", "k", "members"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let prov = serde_json::to_value(rec.provenance).ok().and_then(|v| v.as_str().map(String::from));
        let row = vec![
            rec.quantity.clone(),
            ext(rec.value),
            prov.unwrap_or_default(),
            output::direction(rec.direction).to_string(),
            rec.converged.to_string(),
            num(rec.gap),
            rec.seed.to_string(),
            rec.k.map(|k| k.to_string()).unwrap_or_default(),
            rec.members.map(|m| m.to_string()).unwrap_or_default(),
        ];
        output::write_csv(&g.out.join("quantity.csv"), &header, &[row])?;
    }
    Ok(())
}

const FUNCTIONALS: &[&str] = &[
    "entropy",
    "marginal_entropy_a",
    "marginal_entropy_b",
    "marginal_entropy_c",
    "mutual_information",
    "conditional_entropy",
    "cmi",
    "pinched_entropy",
    "delta_<k>",
    "energy",
    "rearranged_energy",
    "output_entropy",
    "exchange_entropy",
    "channel_mutual_information",
    "coherent_information",
    "entropy_gain",
    "constrained_holevo",
    "entanglement_of_formation",
    "csq_entanglement_<k>",
    "squashed_entanglement_<k>",
    "classical_correlations",
    "discord",
];

fn suffix_k(name: &str, prefix: &str) -> Option<Result<usize, CliError>> {
    let rest = name.strip_prefix(prefix)?;
    Some(
        rest.parse::<usize>()
            .ok()
            .filter(|&k| k > 0)
            .ok_or_else(|| CliError::Config(format!("`{name}`: expected a positive integer after `{prefix}`"))),
    )
}

fn functional(name: &str, h: &Hamiltonian, b: OptimizerBudget) -> Result<Functional, CliError> {
    if let Some(k) = suffix_k(name, "delta_") {
        return Ok(Functional::delta_anchored(k?));
    }
    if let Some(k) = suffix_k(name, "csq_entanglement_") {
        return Ok(Functional::csq_entanglement(k?, b));
    }
    if let Some(k) = suffix_k(name, "squashed_entanglement_") {
        return Ok(Functional::squashed_entanglement(k?, b));
    }
    let f = match name {
        "entropy" => Functional::entropy(),
        "marginal_entropy_a" => Functional::marginal_entropy(&[0]),
        "marginal_entropy_b" => Functional::marginal_entropy(&[1]),
        "marginal_entropy_c" => Functional::marginal_entropy(&[2]),
        "mutual_information" => Functional::mutual_information(),
        "conditional_entropy" => Functional::conditional_entropy(),
        "cmi" => Functional::conditional_mutual_information(),
        "pinched_entropy" => Functional::pinched_entropy(),
        "energy" => Functional::energy(h.clone()),
        "rearranged_energy" => Functional::rearranged_energy(h.clone()),
        "output_entropy" => Functional::output_entropy(),
        "exchange_entropy" => Functional::exchange_entropy(),
        "channel_mutual_information" => Functional::channel_mutual_information(),
        "coherent_information" => Functional::coherent_information(),
        "entropy_gain" => Functional::entropy_gain(),
        "constrained_holevo" => Functional::constrained_holevo(b),
        "entanglement_of_formation" => Functional::entanglement_of_formation(b),
        "classical_correlations" => Functional::classical_correlations(b),
        "discord" => Functional::discord(b),
        _ => {
            return Err(CliError::Config(format!(
                "unknown functional `{name}`; known: {}",
                FUNCTIONALS.join(", ")
            )))
        }
    };
    Ok(f)
}

#[derive(Serialize)]
struct SequenceRun<'a> {
    family: &'a str,
    seed: u64,
    window: usize,
    convergence: entroloss_core::sequence::ConvergenceReport,
    estimates: &'a [entroloss_core::DjEstimate],
}

pub fn sequence(cfg: &RunConfig, g: &Globals) -> Result<(), CliError> {
    let spec = cfg
        .sequence
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [sequence] section".into()))?;
    if spec.functionals.is_empty() {
        return Err(CliError::Config("[sequence]: `functionals` is empty".into()));
    }
    let mut seq = family(&spec.family).map_err(|e| CliError::Config(format!("[sequence]: {e}")))?;
    if let Some(grid) = &spec.grid {
        seq = seq
            .with_grid(grid.iter().map(|n| n.usize()).collect())
            .map_err(|e| CliError::Config(format!("[sequence]: {e}")))?;
    }
    let window = spec.window.map_or(DEFAULT_WINDOW, |w| w.usize());
    if window == 0 || window > seq.n_grid.len() {
        return Err(CliError::Config(format!(
            "[sequence]: window {window} must lie in 1..={}",
            seq.n_grid.len()
        )));
    }
    let h = match hamiltonian(cfg)? {
        Some(h) => h,
        None => log_hamiltonian(1.0)?,
    };
    let b = budget(cfg, OptimizerBudget::default().with_seed(g.seed));
    let fs = spec
        .functionals
        .iter()
        .map(|n| functional(n, &h, b))
        .collect::<Result<Vec<_>, _>>()?;
    let convergence = seq.validate()?;
    let estimates = fs
        .iter()
        .map(|f| dj_estimate(&seq, f, window))
        .collect::<Result<Vec<_>, _>>()?;

    println!("{:<28} {:>12} {:>12} {:>12}", "functional", "limit", "tail sup", "dj");
    for e in &estimates {
        let f = |x: entroloss_core::ExtendedReal| x.finite().map_or("+inf".into(), |v| format!("{:.6}", v + 0.0));
        println!(
            "{:<28} {:>12} {:>12} {:>12}",
            e.functional,
            f(e.limit_value),
            f(e.tail_sup),
            f(e.dj)
        );
    }

    output::ensure_dir(&g.out)?;
    let stem = &spec.family;
    if g.format.json() {
        let run = SequenceRun {
            family: stem,
            seed: g.seed,
            window,
            convergence,
            estimates: &estimates,
        };
        output::write_json(&g.out.join(format!("{stem}.sequence.json")), &run)?;
    }
    if g.format.csv() {
        let (h, r) = output::series_rows(&estimates);
        output::write_csv(&g.out.join(format!("{stem}.sequence.csv")), &h, &r)?;
        let (h, r) = output::plot_rows(&estimates);
        output::write_csv(&g.out.join(format!("{stem}.plot.csv")), &h, &r)?;
    }
    Ok(())
}

fn selected_suites(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let known = suite_ids();
    let ids = match &cfg.suite {
        None => return Ok(known.iter().map(|s| s.to_string()).collect()),
        Some(s) => &s.ids,
    };
    if ids.is_empty() {
        return Err(CliError::Config("[suite]: `ids` is empty".into()));
    }
    if ids.iter().any(|i| i == "all") {
        if ids.len() > 1 {
            return Err(CliError::Config("[suite]: `all` cannot be combined with other ids".into()));
        }
        return Ok(known.iter().map(|s| s.to_string()).collect());
    }
    for id in ids {
        if !known.contains(&id.as_str()) {
            return Err(CliError::Config(format!(
                "[suite]: unknown suite `{id}`; known: {}",
                known.join(", ")
            )));
        }
    }
    Ok(ids.clone())
}

pub fn suite(cfg: &RunConfig, g: &Globals) -> Result<(), CliError> {
    let ids = selected_suites(cfg)?;
    let base = SuiteParams::default();
    let params = SuiteParams {
        seed: g.seed,
        window: cfg.suite.as_ref().and_then(|s| s.window).map_or(base.window, |w| w.usize()),
        budget: budget(cfg, base.budget),
    };
    if params.window == 0 {
        return Err(CliError::Config("[suite]: window must be positive".into()));
    }
    output::ensure_dir(&g.out)?;
    let mut failed = 0;
    for id in &ids {
        let report = suite_run(id, &params)?;
        output::write_suite(&g.out, &report, g.format.json(), g.format.csv())?;
        let bad = report.failed_checks().count();
        println!(
            "{:<20} {}  {}/{} checks  min slack {}",
            id,
            if report.passed { "PASS" } else { "FAIL" },
            report.checks.len() - bad,
            report.checks.len(),
            short(report.min_slack)
        );
        for c in report.failed_checks() {
            println!("    failed: [{}] {} (slack {})", c.family, c.check, short(c.slack));
        }
        if !report.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::SuiteFailure(failed));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    suite: String,
    claim: String,
    passed: bool,
    checks: usize,
    failed: usize,
    max_slack: Option<f64>,
    min_slack: Option<f64>,
}

fn summary_row(v: &Value) -> Option<SummaryRow> {
    let o = v.as_object()?;
    let checks = o.get("checks")?.as_array()?;
    Some(SummaryRow {
        suite: o.get("suite")?.as_str()?.to_string(),
        claim: o.get("claim")?.as_str()?.to_string(),
        passed: o.get("passed")?.as_bool()?,
        checks: checks.len(),
        failed: checks
            .iter()
            .filter(|c| c.get("pass").and_then(Value::as_bool) == Some(false))
            .count(),
        max_slack: o.get("max_slack").and_then(Value::as_f64),
        min_slack: o.get("min_slack").and_then(Value::as_f64),
    })
}

fn report_dir(cfg: &RunConfig, g: &Globals) -> PathBuf {
    cfg.report
        .as_ref()
        .and_then(|r| r.dir.as_ref())
        .map_or_else(|| g.out.clone(), PathBuf::from)
}

fn collect_reports(dir: &Path) -> Result<Vec<SummaryRow>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::MissingArtifacts(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p)?;
        // other artifacts (quantity records, summaries) share the directory
        if let Some(r) = serde_json::from_str::<Value>(&text).ok().as_ref().and_then(summary_row) {
            rows.push(r);
        }
    }
    if rows.is_empty() {
        return Err(CliError::MissingArtifacts(format!("no suite reports in {}", dir.display())));
    }
    Ok(rows)
}

pub fn report(cfg: &RunConfig, g: &Globals) -> Result<(), CliError> {
    let dir = report_dir(cfg, g);
    let rows = collect_reports(&dir)?;
    println!(
        "{:<20} {:<6} {:>7} {:>10} {:>10}  claim",
        "suite", "status", "checks", "max slack", "min slack"
    );
    for r in &rows {
        println!(
            "{:<20} {:<6} {:>7} {:>10} {:>10}  {}",
            r.suite,
            if r.passed { "PASS" } else { "FAIL" },
            format!("{}/{}", r.checks - r.failed, r.checks),
            short(r.max_slack),
            short(r.min_slack),
            r.claim
        );
    }
    if g.format.json() {
        output::write_json(&dir.join("summary.json"), &rows)?;
    }
    if g.format.csv() {
        let header: Vec<String> = ["suite", "claim", "status", "checks", "failed", "max_slack", "min_slack"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let body: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.suite.clone(),
                    r.claim.clone(),
                    if r.passed { "PASS" } else { "FAIL" }.to_string(),
                    r.checks.to_string(),
                    r.failed.to_string(),
                    output::opt(r.max_slack),
                    output::opt(r.min_slack),
                ]
            })
            .collect();
        output::write_csv(&dir.join("summary.csv"), &header, &body)?;
    }
    let failed = rows.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::SuiteFailure(failed));
    }
    Ok(())
}
