use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::ExtendedReal;
use crate::roof::BoundDirection;

use super::functional::Functional;
use super::sample::Sample;

pub type Generator = Arc<dyn Fn(usize) -> Result<Sample> + Send + Sync>;

/// `n ↦ ρ_n` on a grid together with the declared limit `ρ_0`.
#[derive(Clone)]
pub struct StateSequence {
    pub name: String,
    generator: Generator,
    pub limit: Sample,
    pub n_grid: Vec<usize>,
    pub tags: BTreeMap<String, String>,
}

impl fmt::Debug for StateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StateSequence")
            .field("name", &self.name)
            .field("n_grid", &self.n_grid)
            .field("tags", &self.tags)
            .finish()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub grid: Vec<usize>,
    pub distances: Vec<f64>,
    /// Distances are nonincreasing over the trailing half of the grid.
    pub converging: bool,
}

impl StateSequence {
    pub fn new(
        name: impl Into<String>,
        generator: impl Fn(usize) -> Result<Sample> + Send + Sync + 'static,
        limit: Sample,
        n_grid: Vec<usize>,
    ) -> Result<Self> {
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid must be nonempty and increasing".into()));
        }
        Ok(Self {
            name: name.into(),
            generator: Arc::new(generator),
            limit,
            n_grid,
            tags: BTreeMap::new(),
        })
    }

    pub fn with_tag(mut self, key: &str, value: impl Into<String>) -> Self {
        self.tags.insert(key.into(), value.into());
        self
    }

    pub fn with_grid(mut self, n_grid: Vec<usize>) -> Result<Self> {
        if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid must be nonempty and increasing".into()));
        }
        self.n_grid = n_grid;
        Ok(self)
    }

    pub fn at(&self, n: usize) -> Result<Sample> {
        (self.generator)(n)
    }

    pub fn generator(&self) -> Generator {
        self.generator.clone()
    }

    /// Same grid and tags, each sample (and the limit) passed through `f`.
    pub fn map(
        &self,
        name: impl Into<String>,
        f: impl Fn(Sample) -> Result<Sample> + Send + Sync + 'static,
    ) -> Result<Self> {
        let f = Arc::new(f);
        let g = self.generator.clone();
        let f2 = f.clone();
        let mut out = Self::new(name, move |n| f2(g(n)?), f(self.limit.clone())?, self.n_grid.clone())?;
        out.tags = self.tags.clone();
        Ok(out)
    }

    /// Trace distance to the zero-padded limit along the grid.
    pub fn validate(&self) -> Result<ConvergenceReport> {
        let distances: Vec<f64> = self
            .n_grid
            .par_iter()
            .map(|&n| self.at(n)?.distance(&self.limit))
            .collect::<Result<_>>()?;
        let tail = &distances[distances.len() / 2..];
        let converging = tail.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        Ok(ConvergenceReport {
            grid: self.n_grid.clone(),
            distances,
            converging,
        })
    }
}

/// Finite-grid estimate of `dj{f} = limsup f(ρ_n) − f(ρ_0)`.
///
/// `tail_sup` and `tail_inf` run over the last `window` grid points; `dj`
/// and `gain` (the liminf counterpart `f(ρ_0) − liminf f(ρ_n)`) are clamped
/// at zero. A limit value of `+∞` makes `dj = +∞`.
#[derive(Debug, Clone, Serialize)]
pub struct DjEstimate {
    pub sequence: String,
    pub functional: String,
    pub grid: Vec<usize>,
    pub values: Vec<ExtendedReal>,
    pub window: usize,
    pub tail_sup: ExtendedReal,
    pub tail_inf: ExtendedReal,
    pub limit_value: ExtendedReal,
    pub dj: ExtendedReal,
    pub gain: ExtendedReal,
    pub monotone_flag: bool,
    pub bound_direction: Option<BoundDirection>,
}

fn ext_le(a: ExtendedReal, b: ExtendedReal) -> bool {
    match (a, b) {
        (_, ExtendedReal::PosInfinity) => true,
        (ExtendedReal::PosInfinity, _) => false,
        (ExtendedReal::Finite(x), ExtendedReal::Finite(y)) => x <= y,
    }
}

fn clamped_gap(hi: ExtendedReal, lo: ExtendedReal) -> ExtendedReal {
    match (hi, lo) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite((a - b).max(0.0)),
        (ExtendedReal::PosInfinity, ExtendedReal::Finite(_)) => ExtendedReal::PosInfinity,
        (_, ExtendedReal::PosInfinity) => ExtendedReal::ZERO,
    }
}

pub fn dj_estimate(seq: &StateSequence, f: &Functional, window: usize) -> Result<DjEstimate> {
    if window == 0 || seq.n_grid.len() < 2 * window {
        return Err(Error::InvalidArgument(format!(
            "grid of {} points is too short for window {window}",
            seq.n_grid.len()
        )));
    }
    let undefined = |n: Option<usize>, e: Error| {
        let at = n.map_or("the limit".to_string(), |n| format!("n = {n}"));
        Error::FunctionalUndefined(format!("{} on {} at {at}: {e}", f.name(), seq.name))
    };
    let values: Vec<ExtendedReal> = seq
        .n_grid
        .par_iter()
        .map(|&n| seq.at(n).and_then(|s| f.eval(&s)).map_err(|e| undefined(Some(n), e)))
        .collect::<Result<_>>()?;
    let limit_value = f.eval(&seq.limit).map_err(|e| undefined(None, e))?;
    let tail = &values[values.len() - window..];
    let mut tail_sup = tail[0];
    let mut tail_inf = tail[0];
    for &v in &tail[1..] {
        if ext_le(tail_sup, v) {
            tail_sup = v;
        }
        if ext_le(v, tail_inf) {
            tail_inf = v;
        }
    }
    let monotone_flag = tail.windows(2).all(|w| ext_le(w[0], w[1]))
        || tail.windows(2).all(|w| ext_le(w[1], w[0]));
    let dj = match limit_value {
        ExtendedReal::PosInfinity => ExtendedReal::PosInfinity,
        _ => clamped_gap(tail_sup, limit_value),
    };
    Ok(DjEstimate {
        sequence: seq.name.clone(),
        functional: f.name().to_string(),
        grid: seq.n_grid.clone(),
        values,
        window,
        tail_sup,
        tail_inf,
        limit_value,
        dj,
        gain: clamped_gap(limit_value, tail_inf),
        monotone_flag,
        bound_direction: f.bound(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::DensityState;

    fn constant() -> StateSequence {
        let s = DensityState::diagonal_single(vec![0.6, 0.4]).unwrap();
        let l = Sample::State(s.clone());
        StateSequence::new("const", move |_| Ok(Sample::State(s.clone())), l, vec![1, 2, 3, 4, 5, 6])
            .unwrap()
    }

    #[test]
    fn constant_sequence_has_no_jump() {
        let e = dj_estimate(&constant(), &Functional::entropy(), 3).unwrap();
        assert_eq!(e.dj, ExtendedReal::ZERO);
        assert_eq!(e.gain, ExtendedReal::ZERO);
        assert!(e.monotone_flag);
        assert!(constant().validate().unwrap().converging);
    }

    #[test]
    fn window_precondition() {
        assert!(matches!(
            dj_estimate(&constant(), &Functional::entropy(), 4),
            Err(Error::InvalidArgument(_))
        ));
        assert!(dj_estimate(&constant(), &Functional::entropy(), 0).is_err());
    }

    #[test]
    fn infinite_limit_gives_infinite_jump() {
        let inf = Functional::new("inf at limit", |s| {
            Ok(if s.state()?.dim() == 1 { ExtendedReal::PosInfinity } else { ExtendedReal::ZERO })
        });
        let seq = StateSequence::new(
            "to scalar",
            |n| Ok(Sample::State(DensityState::maximally_mixed(n + 1))),
            Sample::State(DensityState::basis(1, 0)),
            vec![1, 2, 3, 4],
        )
        .unwrap();
        let e = dj_estimate(&seq, &inf, 2).unwrap();
        assert_eq!(e.dj, ExtendedReal::PosInfinity);
        assert_eq!(e.gain, ExtendedReal::PosInfinity);
    }

    #[test]
    fn evaluation_errors_name_the_grid_point() {
        let bad = Functional::new("bad", |s| {
            if s.state()?.dim() > 3 {
                Err(Error::InvalidArgument("too big".into()))
            } else {
                Ok(ExtendedReal::ZERO)
            }
        });
        let seq = StateSequence::new(
            "grow",
            |n| Ok(Sample::State(DensityState::maximally_mixed(n))),
            Sample::State(DensityState::basis(1, 0)),
            vec![1, 2, 3, 4],
        )
        .unwrap();
        match dj_estimate(&seq, &bad, 2) {
            Err(Error::FunctionalUndefined(m)) => assert!(m.contains("n = 4"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
