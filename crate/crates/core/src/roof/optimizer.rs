//! Derivative-free multi-restart search over isometries.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::{self, cr, CMatrix};
use crate::random::{ginibre, random_isometry, substream};

/// Step-size control for the random-direction search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSchedule {
    /// Grow on success, shrink on failure (1/5th success rule).
    OneFifth { initial: f64, floor: f64 },
    /// `initial · ratio^iteration`.
    Geometric { initial: f64, ratio: f64 },
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule::OneFifth {
            initial: 0.3,
            floor: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerBudget {
    pub restarts: usize,
    pub iterations: usize,
    pub step_schedule: StepSchedule,
    pub seed: u64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            restarts: 16,
            iterations: 2000,
            step_schedule: StepSchedule::default(),
            seed: 0,
        }
    }
}

impl OptimizerBudget {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Spread among the best quarter of restarts below which a search counts as converged.
pub const CONVERGED_GAP: f64 = 1e-5;

#[derive(Debug, Clone)]
pub(crate) struct Search {
    pub value: f64,
    pub point: CMatrix,
    pub gap: f64,
    pub converged: bool,
}

fn sanitize(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

fn one_run<F>(rows: usize, cols: usize, budget: &OptimizerBudget, restart: usize, f: &F) -> (f64, CMatrix)
where
    F: Fn(&CMatrix) -> f64,
{
    let mut g = substream(budget.seed, restart as u64);
    let mut w = random_isometry(&mut g, rows, cols);
    let mut fw = sanitize(f(&w));
    let norm = 1.0 / ((rows * cols) as f64).sqrt();
    let (mut sigma, floor) = match budget.step_schedule {
        StepSchedule::OneFifth { initial, floor } => (initial, floor),
        StepSchedule::Geometric { initial, .. } => (initial, 0.0),
    };
    for it in 0..budget.iterations {
        if let StepSchedule::Geometric { initial, ratio } = budget.step_schedule {
            sigma = initial * ratio.powi(it as i32);
        }
        let step = ginibre(&mut g, rows, cols) * cr(sigma * norm);
        let cand = linalg::qr_orthonormalize(&(&w + step));
        let fc = sanitize(f(&cand));
        let better = fc < fw;
        if better {
            w = cand;
            fw = fc;
        }
        if let StepSchedule::OneFifth { .. } = budget.step_schedule {
            sigma = if better { (sigma * 1.5).min(2.0) } else { (sigma * 1.5f64.powf(-0.25)).max(floor) };
        }
    }
    (fw, w)
}

/// Minimize `f` over `rows × cols` isometries; restarts run in parallel and
/// are reduced in restart order, so the result depends only on the seed.
pub(crate) fn minimize_isometry<F>(rows: usize, cols: usize, budget: &OptimizerBudget, f: F) -> Search
where
    F: Fn(&CMatrix) -> f64 + Sync,
{
    let restarts = budget.restarts.max(1);
    let runs: Vec<(f64, CMatrix)> = (0..restarts)
        .into_par_iter()
        .map(|r| one_run(rows, cols, budget, r, &f))
        .collect();
    let mut best = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.0 < runs[best].0 {
            best = i;
        }
    }
    let mut finals: Vec<f64> = runs.iter().map(|r| r.0).collect();
    finals.sort_by(|a, b| a.total_cmp(b));
    let q = (restarts - 1) / 4;
    let gap = (finals[q] - finals[0]).max(0.0);
    let (value, point) = runs.into_iter().nth(best).expect("at least one restart");
    Search {
        value,
        point,
        gap,
        converged: gap <= CONVERGED_GAP * (1.0 + value.abs()),
    }
}
