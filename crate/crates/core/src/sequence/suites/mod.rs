//! Claim-checking suites. Each suite runs a handful of families through
//! [`dj_estimate`] and records one row per inequality or identity.
//!
//! A row is `Measured` only when the relation is forced on every finite
//! window, either because it is an identity or because a pointwise
//! inequality holds with matching limit values. Relations that hold only
//! in the limit are `Asymptotic`: their rows pass when the finite-n
//! remainder shrinks along the trailing half of the grid and is within the
//! stated tolerance at the last grid point.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::ExtendedReal;
use crate::roof::OptimizerBudget;

use super::estimate::{dj_estimate, DjEstimate, StateSequence};
use super::families::family;
use super::functional::Functional;
use super::DEFAULT_WINDOW;

mod channel;
mod correlation;
mod state;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Relation {
    Le,
    Eq,
    /// `lo·rhs ≤ lhs ≤ hi·rhs`.
    Band { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowBasis {
    Measured,
    /// Checked at every grid point and at the limit; `lhs` is the worst residual.
    Pointwise,
    Asymptotic,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub family: String,
    pub check: String,
    pub relation: Relation,
    pub lhs: ExtendedReal,
    pub rhs: ExtendedReal,
    pub tolerance: f64,
    /// Signed margin; negative values beyond `-tolerance` fail. `None` when
    /// a side is infinite.
    pub slack: Option<f64>,
    pub pass: bool,
    pub basis: RowBasis,
    pub note: String,
    pub extras: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SuiteParams {
    pub seed: u64,
    pub window: usize,
    pub budget: OptimizerBudget,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            seed: 0,
            window: DEFAULT_WINDOW,
            budget: OptimizerBudget {
                restarts: 4,
                iterations: 600,
                ..Default::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub claim: String,
    pub seed: u64,
    pub window: usize,
    pub families: Vec<String>,
    pub estimates: Vec<DjEstimate>,
    pub checks: Vec<CheckRow>,
    pub passed: bool,
    pub max_slack: Option<f64>,
    pub min_slack: Option<f64>,
}

impl SuiteReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

struct SuiteInfo {
    id: &'static str,
    claim: &'static str,
    run: fn(&mut Ctx) -> Result<()>,
}

fn registry() -> Vec<SuiteInfo> {
    vec![
        SuiteInfo {
            id: "gen-ub",
            claim: "the entropy loss is at most the loss of the cross entropy against any converging reference, with equality for the sequence itself",
            run: state::gen_ub,
        },
        SuiteInfo {
            id: "pinching",
            claim: "the entropy loss is at most the loss of the pinched entropy, with equality for diagonal sequences",
            run: state::pinching,
        },
        SuiteInfo {
            id: "subadditivity",
            claim: "losses of joint and marginal entropies are subadditive and obey a triangle inequality",
            run: state::subadditivity,
        },
        SuiteInfo {
            id: "majorization",
            claim: "a majorizing sequence loses no more entropy than the majorized one, less the relative-entropy and tail corrections",
            run: state::majorization,
        },
        SuiteInfo {
            id: "separable",
            claim: "for separable sequences the joint loss sits between the larger marginal loss and their sum",
            run: state::separable,
        },
        SuiteInfo {
            id: "energy",
            claim: "under an energy bound the entropy loss is at most g(H)(E - E0), attained by the sharp sequence",
            run: state::energy,
        },
        SuiteInfo {
            id: "mi-local-ops",
            claim: "mutual information loses at most twice the smaller marginal loss and local operations do not increase the loss",
            run: correlation::mi_local_ops,
        },
        SuiteInfo {
            id: "conditional-entropy",
            claim: "upward and downward losses of conditional entropy are bounded by marginal and joint losses",
            run: correlation::conditional_entropy,
        },
        SuiteInfo {
            id: "holevo",
            claim: "the Holevo quantity loses at most the loss of the average state and twice the loss of the weights",
            run: correlation::holevo,
        },
        SuiteInfo {
            id: "cmi",
            claim: "conditional mutual information loss is bounded by twice the smallest relevant marginal loss",
            run: correlation::cmi,
        },
        SuiteInfo {
            id: "entanglement",
            claim: "entanglement measures lose at most the smaller marginal loss, and half the mutual-information loss",
            run: correlation::entanglement,
        },
        SuiteInfo {
            id: "discord",
            claim: "classical correlations and discord losses are bounded by marginal and joint losses",
            run: correlation::discord,
        },
        SuiteInfo {
            id: "sums",
            claim: "for finitely many summands the loss of the sum equals the summed losses",
            run: correlation::sums,
        },
        SuiteInfo {
            id: "channels",
            claim: "output, exchange and information quantities of converging channel-input pairs lose boundedly",
            run: channel::channels,
        },
    ]
}

pub fn suite_ids() -> Vec<&'static str> {
    registry().into_iter().map(|s| s.id).collect()
}

pub fn suite_claim(id: &str) -> Option<&'static str> {
    registry().into_iter().find(|s| s.id == id).map(|s| s.claim)
}

pub fn suite_run(id: &str, params: &SuiteParams) -> Result<SuiteReport> {
    let info = registry()
        .into_iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownSuite(id.to_string()))?;
    if params.window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let mut ctx = Ctx::new(*params);
    (info.run)(&mut ctx)?;
    let slacks = ctx.checks.iter().filter_map(|c| c.slack);
    let max_slack = slacks.clone().reduce(f64::max);
    let min_slack = slacks.reduce(f64::min);
    Ok(SuiteReport {
        suite: info.id.to_string(),
        claim: info.claim.to_string(),
        seed: params.seed,
        window: params.window,
        families: ctx.families,
        passed: ctx.checks.iter().all(|c| c.pass),
        estimates: ctx.estimates,
        checks: ctx.checks,
        max_slack,
        min_slack,
    })
}

pub(crate) fn emin(xs: &[ExtendedReal]) -> ExtendedReal {
    xs.iter().copied().fold(ExtendedReal::PosInfinity, |a, b| if b < a { b } else { a })
}

fn slack_of(relation: Relation, lhs: ExtendedReal, rhs: ExtendedReal) -> (Option<f64>, Option<bool>) {
    use ExtendedReal::*;
    match (lhs, rhs) {
        (Finite(l), Finite(r)) => (
            Some(match relation {
                Relation::Le => r - l,
                Relation::Eq => -(l - r).abs(),
                Relation::Band { lo, hi } => (l - lo * r).min(hi * r - l),
            }),
            None,
        ),
        (PosInfinity, PosInfinity) => (None, Some(true)),
        (Finite(_), PosInfinity) => (None, Some(matches!(relation, Relation::Le))),
        (PosInfinity, Finite(_)) => (None, Some(false)),
    }
}

/// Shared state of one suite run.
pub(crate) struct Ctx {
    params: SuiteParams,
    estimates: Vec<DjEstimate>,
    index: HashMap<(String, String), usize>,
    checks: Vec<CheckRow>,
    families: Vec<String>,
}

impl Ctx {
    fn new(params: SuiteParams) -> Self {
        Self {
            params,
            estimates: Vec::new(),
            index: HashMap::new(),
            checks: Vec::new(),
            families: Vec::new(),
        }
    }

    pub(crate) fn budget(&self) -> OptimizerBudget {
        self.params.budget.with_seed(self.params.seed)
    }

    /// A built-in family, named by its registry name.
    pub(crate) fn family(&mut self, name: &str) -> Result<StateSequence> {
        let mut seq = family(name)?;
        seq.name = name.to_string();
        if !self.families.iter().any(|f| f == name) {
            self.families.push(name.to_string());
        }
        Ok(seq)
    }

    pub(crate) fn est(&mut self, seq: &StateSequence, f: &Functional) -> Result<DjEstimate> {
        let key = (seq.name.clone(), f.name().to_string());
        if let Some(&i) = self.index.get(&key) {
            return Ok(self.estimates[i].clone());
        }
        let e = dj_estimate(seq, f, self.params.window)?;
        self.index.insert(key, self.estimates.len());
        self.estimates.push(e.clone());
        Ok(e)
    }

    pub(crate) fn dj(&mut self, seq: &StateSequence, f: &Functional) -> Result<ExtendedReal> {
        Ok(self.est(seq, f)?.dj)
    }

    /// The liminf counterpart `f(ρ_0) − liminf f(ρ_n)`.
    pub(crate) fn gain(&mut self, seq: &StateSequence, f: &Functional) -> Result<ExtendedReal> {
        Ok(self.est(seq, f)?.gain)
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn row(
        &mut self,
        family: &str,
        check: impl Into<String>,
        relation: Relation,
        lhs: ExtendedReal,
        rhs: ExtendedReal,
        tolerance: f64,
        basis: RowBasis,
    ) -> &mut CheckRow {
        let (slack, forced) = slack_of(relation, lhs, rhs);
        let pass = forced.unwrap_or_else(|| slack.is_some_and(|s| s >= -tolerance));
        self.checks.push(CheckRow {
            family: family.to_string(),
            check: check.into(),
            relation,
            lhs,
            rhs,
            tolerance,
            slack,
            pass,
            basis,
            note: String::new(),
            extras: BTreeMap::new(),
        });
        self.checks.last_mut().expect("just pushed")
    }

    pub(crate) fn le(
        &mut self,
        family: &str,
        check: impl Into<String>,
        lhs: ExtendedReal,
        rhs: ExtendedReal,
        tolerance: f64,
    ) -> &mut CheckRow {
        self.row(family, check, Relation::Le, lhs, rhs, tolerance, RowBasis::Measured)
    }

    pub(crate) fn eq(
        &mut self,
        family: &str,
        check: impl Into<String>,
        lhs: ExtendedReal,
        rhs: ExtendedReal,
        tolerance: f64,
    ) -> &mut CheckRow {
        self.row(family, check, Relation::Eq, lhs, rhs, tolerance, RowBasis::Measured)
    }

    /// `max residual ≤ 0` over the grid and the limit.
    pub(crate) fn pointwise(
        &mut self,
        seq: &StateSequence,
        check: impl Into<String>,
        residual: &Functional,
        tolerance: f64,
    ) -> Result<&mut CheckRow> {
        let mut values: Vec<f64> = seq
            .n_grid
            .par_iter()
            .map(|&n| residual.eval(&seq.at(n)?).map(ExtendedReal::to_f64))
            .collect::<Result<_>>()?;
        values.push(residual.eval(&seq.limit)?.to_f64());
        let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let worst = if worst.is_nan() { f64::INFINITY } else { worst };
        let points = values.len() as f64;
        let name = seq.name.clone();
        let row = self.row(
            &name,
            check,
            Relation::Le,
            ExtendedReal::Finite(worst),
            ExtendedReal::ZERO,
            tolerance,
            RowBasis::Pointwise,
        );
        row.extras.insert("points".into(), points);
        Ok(row)
    }

    /// Per-grid-point increments `Σ c (f(ρ_n) − f(ρ_0))`.
    fn increments(&mut self, seq: &StateSequence, terms: &[(f64, Functional)]) -> Result<Vec<f64>> {
        let mut acc = vec![0.0; seq.n_grid.len()];
        for (c, f) in terms {
            let e = self.est(seq, f)?;
            let l = e.limit_value.to_f64();
            for (a, v) in acc.iter_mut().zip(&e.values) {
                *a += c * (v.to_f64() - l);
            }
        }
        Ok(acc)
    }

    /// A relation between loss combinations that holds in the limit only.
    ///
    /// `lhs`/`rhs` are the summed window losses. The row passes when the
    /// excess `r_n` of the lhs increment over the rhs increment (its absolute
    /// value for `Eq`) is nonincreasing along the trailing half of the grid
    /// and at most `tolerance` at the last grid point.
    pub(crate) fn asymptotic(
        &mut self,
        seq: &StateSequence,
        check: impl Into<String>,
        relation: Relation,
        lhs: &[(f64, Functional)],
        rhs: &[(f64, Functional)],
        tolerance: f64,
    ) -> Result<&mut CheckRow> {
        let mut l_dj = ExtendedReal::ZERO;
        for (c, f) in lhs {
            l_dj = l_dj + *c * self.dj(seq, f)?;
        }
        let mut r_dj = ExtendedReal::ZERO;
        for (c, f) in rhs {
            r_dj = r_dj + *c * self.dj(seq, f)?;
        }
        let a = self.increments(seq, lhs)?;
        let b = self.increments(seq, rhs)?;
        let excess: Vec<f64> = a
            .iter()
            .zip(&b)
            .map(|(x, y)| match relation {
                Relation::Eq => (x - y).abs(),
                _ => (x - y).max(0.0),
            })
            .collect();
        let tail = &excess[excess.len() / 2..];
        let shrinking = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let last = *excess.last().expect("nonempty grid");
        let name = seq.name.clone();
        let row = self.row(&name, check, relation, l_dj, r_dj, tolerance, RowBasis::Asymptotic);
        row.pass = shrinking && last <= tolerance;
        row.slack = Some(-last);
        row.extras.insert("excess_last".into(), last);
        row.extras.insert("excess_first_tail".into(), tail[0]);
        row.extras.insert("shrinking".into(), f64::from(u8::from(shrinking)));
        Ok(row)
    }
}

pub(crate) fn note(row: &mut CheckRow, text: &str) {
    row.note = text.to_string();
}

#[cfg(test)]
mod tests;
