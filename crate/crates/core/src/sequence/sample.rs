use std::sync::Arc;

use crate::channels::QuantumOperation;
use crate::error::{Error, Result};
use crate::info::{entropy_of_spectrum, shannon_entropy};
use crate::linalg::{cr, CVector};
use crate::operator::{trace_distance, DensityState, TraceClassElement, DENSE_DIM_CAP};

const PROB_TOL: f64 = 1e-12;

/// Perfectly correlated state over `parties` copies of the label `k`.
///
/// Coherent: `Σ_k √p_k |k…k⟩`. Classical: `Σ_k p_k |k…k⟩⟨k…k|`. Both are
/// evaluated through subset entropies, so no `d^parties` matrix is formed.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlated {
    probs: Vec<f64>,
    parties: usize,
    coherent: bool,
}

impl Correlated {
    pub fn new(probs: Vec<f64>, parties: usize, coherent: bool) -> Result<Self> {
        if !(2..=3).contains(&parties) {
            return Err(Error::InvalidArgument(format!(
                "correlated states have 2 or 3 parties, got {parties}"
            )));
        }
        if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidArgument("probabilities must be nonnegative".into()));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > PROB_TOL.max(1e-13 * probs.len() as f64) {
            return Err(Error::NotNormalized { trace: s });
        }
        Ok(Self {
            probs,
            parties,
            coherent,
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn is_coherent(&self) -> bool {
        self.coherent
    }

    pub fn local_dim(&self) -> usize {
        self.probs.len()
    }

    /// Entropy of the marginal on `keep`. Every nonempty proper marginal is
    /// the classical distribution; the full state is pure when coherent.
    pub fn subset_entropy(&self, keep: &[usize]) -> Result<f64> {
        if keep.iter().any(|&k| k >= self.parties) {
            return Err(Error::BadFactorization(format!(
                "party index out of range in {keep:?}"
            )));
        }
        if keep.is_empty() {
            return Ok(0.0);
        }
        let mut k = keep.to_vec();
        k.sort_unstable();
        k.dedup();
        if self.coherent && k.len() == self.parties {
            return Ok(0.0);
        }
        Ok(shannon_entropy(&self.probs).unwrap())
    }

    /// Distribution of the computational-basis outcome on any party.
    pub fn pinched(&self) -> &[f64] {
        &self.probs
    }

    pub fn dephased(&self) -> Self {
        Self {
            coherent: false,
            ..self.clone()
        }
    }

    /// Same state with the label alphabet zero-padded to `d`.
    pub fn padded(&self, d: usize) -> Self {
        let mut p = self.probs.clone();
        if d > p.len() {
            p.resize(d, 0.0);
        }
        Self { probs: p, ..self.clone() }
    }

    pub fn to_state(&self) -> Result<DensityState> {
        let d = self.local_dim();
        let dims = vec![d; self.parties];
        let total = d.checked_pow(self.parties as u32).unwrap_or(usize::MAX);
        let index = |k: usize| (0..self.parties).fold(0, |acc, _| acc * d + k);
        if self.coherent {
            if total > DENSE_DIM_CAP {
                return Err(Error::DimensionOverflow {
                    dim: total,
                    cap: DENSE_DIM_CAP,
                });
            }
            let mut v = CVector::zeros(total);
            for (k, &p) in self.probs.iter().enumerate() {
                v[index(k)] = cr(p.sqrt());
            }
            DensityState::pure(&v, dims)
        } else {
            let mut p = vec![0.0; total];
            for (k, &x) in self.probs.iter().enumerate() {
                p[index(k)] = x;
            }
            DensityState::diagonal(p, dims)
        }
    }

    /// Trace distance `‖ω − ω'‖₁` in the common padded dimension.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        if self.parties != other.parties || self.coherent != other.coherent {
            return Err(Error::DimensionMismatch(
                "correlated states of different kinds".into(),
            ));
        }
        let d = self.local_dim().max(other.local_dim());
        let a = self.padded(d);
        let b = other.padded(d);
        if self.coherent {
            let overlap: f64 = a.probs.iter().zip(&b.probs).map(|(x, y)| (x * y).sqrt()).sum();
            Ok(2.0 * (1.0 - (overlap * overlap).min(1.0)).sqrt())
        } else {
            Ok(a.probs.iter().zip(&b.probs).map(|(x, y)| (x - y).abs()).sum())
        }
    }
}

/// One point of a sequence: a state, a structured correlated state, or a
/// channel together with its input.
#[derive(Debug, Clone)]
pub enum Sample {
    State(DensityState),
    Correlated(Correlated),
    ChannelInput {
        channel: Arc<QuantumOperation>,
        input: DensityState,
    },
}

impl From<DensityState> for Sample {
    fn from(s: DensityState) -> Self {
        Sample::State(s)
    }
}

impl From<Correlated> for Sample {
    fn from(c: Correlated) -> Self {
        Sample::Correlated(c)
    }
}

fn common_dims(a: &[usize], b: &[usize]) -> Result<Vec<usize>> {
    if a.len() != b.len() {
        return Err(Error::BadFactorization(format!(
            "factorizations {a:?} and {b:?} differ in length"
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| *x.max(y)).collect())
}

/// `‖a − b‖₁` after zero-padding every factor to the larger dimension.
pub fn padded_distance(a: &TraceClassElement, b: &TraceClassElement) -> Result<f64> {
    let dims = common_dims(a.factor_dims(), b.factor_dims())?;
    trace_distance(&a.embed_factors(&dims)?, &b.embed_factors(&dims)?)
}

impl Sample {
    /// Number of tensor factors.
    pub fn parties(&self) -> usize {
        match self {
            Sample::State(s) => s.factor_dims().len(),
            Sample::Correlated(c) => c.parties(),
            Sample::ChannelInput { input, .. } => input.factor_dims().len(),
        }
    }

    /// The sample as an explicit density operator (channel samples give the input).
    pub fn state(&self) -> Result<DensityState> {
        match self {
            Sample::State(s) => Ok(s.clone()),
            Sample::Correlated(c) => c.to_state(),
            Sample::ChannelInput { input, .. } => Ok(input.clone()),
        }
    }

    pub fn channel(&self) -> Option<(&QuantumOperation, &DensityState)> {
        match self {
            Sample::ChannelInput { channel, input } => Some((channel.as_ref(), input)),
            _ => None,
        }
    }

    /// Trace distance to `limit` in the common dimension. For channel
    /// samples the output distance is added to the input distance.
    pub fn distance(&self, limit: &Sample) -> Result<f64> {
        match (self, limit) {
            (Sample::State(a), Sample::State(b)) => padded_distance(a, b),
            (Sample::Correlated(a), Sample::Correlated(b)) => a.distance(b),
            (
                Sample::ChannelInput { channel: pa, input: ra },
                Sample::ChannelInput { channel: pb, input: rb },
            ) => {
                let d_in = padded_distance(ra, rb)?;
                let d_out = padded_distance(&pa.apply(ra)?, &pb.apply(rb)?)?;
                Ok(d_in + d_out)
            }
            (Sample::Correlated(c), Sample::State(s)) | (Sample::State(s), Sample::Correlated(c)) => {
                padded_distance(&*c.to_state()?, s)
            }
            _ => Err(Error::InvalidArgument(
                "sample and limit are of different kinds".into(),
            )),
        }
    }

    /// Entropy of the marginal on the factors in `keep` (all factors for the
    /// full state). Pure states are detected and use the smaller side.
    pub fn subset_entropy(&self, keep: &[usize]) -> Result<f64> {
        match self {
            Sample::Correlated(c) => c.subset_entropy(keep),
            Sample::State(s) => state_subset_entropy(s, keep),
            Sample::ChannelInput { input, .. } => state_subset_entropy(input, keep),
        }
    }
}

/// `Tr ρ²` without an eigensolve.
pub(crate) fn purity(s: &TraceClassElement) -> f64 {
    if let Some(p) = s.diagonal_entries() {
        return p.iter().map(|x| x * x).sum();
    }
    s.dense_ref().iter().map(|z| z.norm_sqr()).sum()
}

pub(crate) fn is_pure_state(s: &TraceClassElement) -> bool {
    (purity(s) - 1.0).abs() < 1e-10
}

fn state_subset_entropy(s: &DensityState, keep: &[usize]) -> Result<f64> {
    let nf = s.factor_dims().len();
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.iter().any(|&i| i >= nf) {
        return Err(Error::BadFactorization(format!("factor index out of range in {keep:?}")));
    }
    if k.is_empty() {
        return Ok(0.0);
    }
    let full = k.len() == nf;
    if !s.is_diagonal() && is_pure_state(s) {
        if full {
            return Ok(0.0);
        }
        // H(keep) = H(complement) for a pure state: trace out the larger side
        let rest: Vec<usize> = (0..nf).filter(|i| !k.contains(i)).collect();
        let dk: usize = k.iter().map(|&i| s.factor_dims()[i]).product();
        let dr: usize = rest.iter().map(|&i| s.factor_dims()[i]).product();
        let side = if dr < dk { rest } else { k };
        return Ok(entropy_of_spectrum(&s.partial_trace(&side)?.spectrum()));
    }
    if full {
        return Ok(entropy_of_spectrum(&s.spectrum()));
    }
    Ok(entropy_of_spectrum(&s.partial_trace(&k)?.spectrum()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::{mutual_information, von_neumann_entropy};

    #[test]
    fn correlated_entropies_match_dense() {
        let p = vec![0.5, 0.3, 0.2];
        for coherent in [true, false] {
            for parties in [2, 3] {
                let c = Correlated::new(p.clone(), parties, coherent).unwrap();
                let s = c.to_state().unwrap();
                let subsets: Vec<Vec<usize>> = if parties == 2 {
                    vec![vec![0], vec![1], vec![0, 1]]
                } else {
                    vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2], vec![0, 2], vec![0, 1, 2]]
                };
                for keep in subsets {
                    let dense = if keep.len() == parties {
                        von_neumann_entropy(&s).unwrap()
                    } else {
                        von_neumann_entropy(&s.partial_trace(&keep).unwrap()).unwrap()
                    };
                    let fast = c.subset_entropy(&keep).unwrap();
                    assert!((dense - fast).abs() < 1e-12, "{keep:?} {coherent}: {dense} vs {fast}");
                }
            }
        }
    }

    #[test]
    fn rank_aware_mi_matches_relative_entropy_form() {
        for n in [2usize, 4, 8] {
            let mut p = vec![0.5 / n as f64; n + 1];
            p[0] = 0.5;
            let c = Correlated::new(p, 2, true).unwrap();
            let s = c.to_state().unwrap();
            let dense = mutual_information(&s).unwrap().unwrap();
            let fast = c.subset_entropy(&[0]).unwrap() + c.subset_entropy(&[1]).unwrap()
                - c.subset_entropy(&[0, 1]).unwrap();
            assert!((dense - fast).abs() < 1e-10);
            let via_state = Sample::State(s.clone());
            let h = via_state.subset_entropy(&[0]).unwrap();
            assert!((2.0 * h - dense).abs() < 1e-10);
        }
    }

    #[test]
    fn correlated_distance_matches_dense() {
        let a = Correlated::new(vec![0.6, 0.4], 2, true).unwrap();
        let b = Correlated::new(vec![0.5, 0.25, 0.25], 2, true).unwrap();
        let fast = a.distance(&b).unwrap();
        let d = 3;
        let sa = a.padded(d).to_state().unwrap();
        let sb = b.to_state().unwrap();
        assert!((trace_distance(&sa, &sb).unwrap() - fast).abs() < 1e-10);
        let (ca, cb) = (a.dephased(), b.dephased());
        let dense = trace_distance(&ca.padded(d).to_state().unwrap(), &cb.to_state().unwrap()).unwrap();
        assert!((ca.distance(&cb).unwrap() - dense).abs() < 1e-14);
    }

    #[test]
    fn padded_distance_embeds_factors() {
        let a = DensityState::diagonal(vec![0.5, 0.0, 0.5, 0.0], vec![2, 2]).unwrap();
        let b = DensityState::diagonal(vec![0.5, 0.5], vec![2, 1]).unwrap();
        assert!(padded_distance(&a, &b).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Correlated::new(vec![0.5, 0.4], 2, true).is_err());
        assert!(Correlated::new(vec![1.0], 4, true).is_err());
    }
}
