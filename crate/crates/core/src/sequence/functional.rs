use std::fmt;
use std::sync::Arc;

use crate::channels::{complementary_output_entropy, output_entropy, QuantumOperation};
use crate::energy::{mean_energy, Hamiltonian};
use crate::error::{Error, Result};
use crate::info::{eta, von_neumann_entropy, ExtendedReal};
use crate::majorization::DescendingSpectrum;
use crate::operator::{op_log_on_support, DensityState, TraceClassElement};
use crate::roof::{
    classical_correlations_cb, constrained_holevo, csq_entanglement_k, default_members,
    delta_k_anchored_upper_bound, entanglement_of_formation, squashed_entanglement_k,
    BoundDirection, OptimizerBudget,
};

use super::sample::{is_pure_state, Sample};

pub type EvalFn = dyn Fn(&Sample) -> Result<ExtendedReal> + Send + Sync;

/// A named real (or `+∞`) valued function of a sample.
///
/// `bound` records the direction in which an optimizer-backed value may
/// err; `None` means the value is computed exactly.
#[derive(Clone)]
pub struct Functional {
    name: String,
    eval: Arc<EvalFn>,
    bound: Option<BoundDirection>,
}

impl fmt::Debug for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Functional")
            .field("name", &self.name)
            .field("bound", &self.bound)
            .finish()
    }
}

fn letters(keep: &[usize]) -> String {
    keep.iter().map(|&i| (b'A' + i as u8) as char).collect()
}

fn fin(x: f64) -> Result<ExtendedReal> {
    Ok(ExtendedReal::Finite(x))
}

fn channel_of(s: &Sample) -> Result<(&QuantumOperation, &DensityState)> {
    s.channel()
        .ok_or_else(|| Error::InvalidArgument("channel functional on a state sample".into()))
}

/// `H(X) + H(Y) − H(XY)` from subset entropies.
fn mi_between(s: &Sample, x: &[usize], y: &[usize]) -> Result<f64> {
    let xy: Vec<usize> = x.iter().chain(y).copied().collect();
    Ok((s.subset_entropy(x)? + s.subset_entropy(y)? - s.subset_entropy(&xy)?).max(0.0))
}

/// Diagonal entries in the product computational basis.
fn diagonal_of(el: &TraceClassElement) -> Vec<f64> {
    match el.diagonal_entries() {
        Some(p) => p.to_vec(),
        None => (0..el.dim()).map(|k| el.entry(k, k).re).collect(),
    }
}

/// Blocks `⟨i|ω|i⟩_B` of a state on `A ⊗ B`, as cone elements on A.
fn cq_blocks(w: &TraceClassElement) -> Result<Vec<TraceClassElement>> {
    let (da, m) = match w.factor_dims() {
        [a, b] => (*a, *b),
        fd => return Err(Error::BadFactorization(format!("expected [d, m], got {fd:?}"))),
    };
    (0..m)
        .map(|i| match w.diagonal_entries() {
            Some(p) => TraceClassElement::diagonal((0..da).map(|a| p[a * m + i]).collect(), vec![da]),
            None => {
                let d = w.dense_ref();
                let block = crate::CMatrix::from_fn(da, da, |a, b| d[(a * m + i, b * m + i)]);
                TraceClassElement::from_matrix(block, vec![da])
            }
        })
        .collect()
}

impl Functional {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(&Sample) -> Result<ExtendedReal> + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            bound: None,
        }
    }

    pub fn with_bound(mut self, bound: BoundDirection) -> Self {
        self.bound = Some(bound);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bound(&self) -> Option<BoundDirection> {
        self.bound
    }

    pub fn eval(&self, s: &Sample) -> Result<ExtendedReal> {
        (self.eval)(s)
    }

    // -- entropic quantities of states ------------------------------------

    /// `H(ω)` of the whole sample (the input, for channel samples).
    pub fn entropy() -> Self {
        Self::new("H", |s| {
            let all: Vec<usize> = (0..s.parties()).collect();
            fin(s.subset_entropy(&all)?)
        })
    }

    /// Entropy of the marginal on `keep`.
    pub fn marginal_entropy(keep: &[usize]) -> Self {
        let keep = keep.to_vec();
        Self::new(format!("H({})", letters(&keep)), move |s| fin(s.subset_entropy(&keep)?))
    }

    /// `I(A:B)`, rank-aware on pure and structured samples.
    pub fn mutual_information() -> Self {
        Self::new("I(A:B)", |s| {
            if s.parties() != 2 {
                return Err(Error::BadFactorization("bipartite sample expected".into()));
            }
            fin(mi_between(s, &[0], &[1])?)
        })
    }

    /// `I(X:Y)` for disjoint party sets.
    pub fn mutual_information_between(x: &[usize], y: &[usize]) -> Self {
        let (x, y) = (x.to_vec(), y.to_vec());
        Self::new(format!("I({}:{})", letters(&x), letters(&y)), move |s| {
            fin(mi_between(s, &x, &y)?)
        })
    }

    /// `H(A|B) = H(AB) − H(B)`.
    pub fn conditional_entropy() -> Self {
        Self::new("H(A|B)", |s| fin(s.subset_entropy(&[0, 1])? - s.subset_entropy(&[1])?))
    }

    /// `I(A:C|B)` with parties ordered `A, B, C`.
    pub fn conditional_mutual_information() -> Self {
        Self::new("I(A:C|B)", |s| {
            if s.parties() != 3 {
                return Err(Error::BadFactorization("tripartite sample expected".into()));
            }
            let v = s.subset_entropy(&[0, 1])? + s.subset_entropy(&[1, 2])?
                - s.subset_entropy(&[0, 1, 2])?
                - s.subset_entropy(&[1])?;
            fin(v.max(0.0))
        })
    }

    /// Shannon entropy of the computational-basis distribution.
    pub fn pinched_entropy() -> Self {
        Self::new("S(pi)", |s| match s {
            Sample::Correlated(c) => fin(c.pinched().iter().map(|&x| eta(x)).sum()),
            _ => {
                let st = s.state()?;
                fin(diagonal_of(&st).iter().map(|&x| eta(x.max(0.0))).sum())
            }
        })
    }

    /// `Tr ρ(−log ρ)` evaluated through the operator logarithm, the
    /// `σ = ρ` instance of the cross-entropy bound.
    pub fn self_cross_entropy() -> Self {
        Self::new("Tr rho(-log rho)", |s| {
            let st = s.state()?;
            if let Some(p) = st.diagonal_entries() {
                return fin(p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum());
            }
            let (log, _) = op_log_on_support(&st);
            let r = st.dense_ref();
            let tr: f64 = (&*r * log.matrix()).trace().re;
            fin(-tr)
        })
    }

    /// `Tr ρ(−log σ)` for a diagonal σ given by `−log σ_k = levels[k]`;
    /// weight outside `levels` gives `+∞`.
    pub fn cross_entropy_diagonal(name: impl Into<String>, neg_log_sigma: Arc<Vec<f64>>) -> Self {
        Self::new(name, move |s| {
            let st = s.state()?;
            let p = diagonal_of(&st);
            let mut acc = 0.0;
            for (k, &x) in p.iter().enumerate() {
                if x <= 0.0 {
                    continue;
                }
                match neg_log_sigma.get(k) {
                    Some(l) if l.is_finite() => acc += x * l,
                    _ => return Ok(ExtendedReal::PosInfinity),
                }
            }
            fin(acc)
        })
    }

    pub fn energy(h: Hamiltonian) -> Self {
        Self::new("E_H", move |s| fin(mean_energy(&*s.state()?, &h)?))
    }

    /// Energy of the rearrangement: descending spectrum on ascending levels.
    pub fn rearranged_energy(h: Hamiltonian) -> Self {
        Self::new("E_H(down)", move |s| {
            let st = s.state()?;
            let spec = DescendingSpectrum::of(&st);
            let levels = h.levels(st.dim())?;
            fin(spec.values().iter().zip(&levels).map(|(p, e)| p * e).sum())
        })
    }

    /// Upper bound on `Δ_k(ρ)` from the anchored rank-`k` ensemble.
    pub fn delta_anchored(k: usize) -> Self {
        Self::new(format!("Delta_{k}"), move |s| {
            fin(delta_k_anchored_upper_bound(&*s.state()?, k)?.value)
        })
        .with_bound(BoundDirection::UpperBound)
    }

    /// `Σ_i H(⟨i|ω|i⟩_B)` for a cq state `Σ ρ_i ⊗ |i⟩⟨i|` (cone entropies).
    pub fn block_entropy_sum() -> Self {
        Self::new("sum_i H(rho_i)", |s| {
            if let Some(v) = classical_block_entropy(s)? {
                return fin(v);
            }
            let st = s.state()?;
            let mut acc = 0.0;
            for b in cq_blocks(&st)? {
                acc += von_neumann_entropy(&b)?;
            }
            fin(acc)
        })
    }

    /// Entropy of one cq block `⟨i|ω|i⟩_B`.
    pub fn block_entropy(i: usize) -> Self {
        Self::new(format!("H(rho_{i})"), move |s| {
            if let Some(v) = classical_block_entropy(s)? {
                return fin(v);
            }
            let st = s.state()?;
            let blocks = cq_blocks(&st)?;
            let b = blocks
                .get(i)
                .ok_or_else(|| Error::InvalidArgument(format!("no block {i}")))?;
            fin(von_neumann_entropy(b)?)
        })
    }

    /// `f(ρ, σ)` on the normalized blocks of `½ρ ⊗ |0⟩⟨0| + ½σ ⊗ |1⟩⟨1|`.
    pub fn on_pair(
        name: impl Into<String>,
        f: impl Fn(&DensityState, &DensityState) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self::new(name, move |s| {
            let blocks = cq_blocks(&*s.state()?)?;
            if blocks.len() != 2 {
                return Err(Error::BadFactorization("pair sample needs two blocks".into()));
            }
            let a = DensityState::normalized(&blocks[0])?;
            let b = DensityState::normalized(&blocks[1])?;
            fin(f(&a, &b)?)
        })
    }

    /// `self` evaluated after transforming the sample.
    pub fn after(
        self,
        name: impl Into<String>,
        map: impl Fn(&Sample) -> Result<Sample> + Send + Sync + 'static,
    ) -> Self {
        let inner = self.eval.clone();
        Self {
            name: name.into(),
            eval: Arc::new(move |s| inner(&map(s)?)),
            bound: self.bound,
        }
    }

    /// `Σ c_i f_i`; `+∞` terms need a positive coefficient.
    pub fn combination(name: impl Into<String>, terms: Vec<(f64, Functional)>) -> Self {
        Self::new(name, move |s| {
            let mut acc = ExtendedReal::ZERO;
            for (c, f) in &terms {
                match f.eval(s)? {
                    ExtendedReal::Finite(x) => acc = acc + ExtendedReal::Finite(c * x),
                    ExtendedReal::PosInfinity if *c > 0.0 => acc = ExtendedReal::PosInfinity,
                    ExtendedReal::PosInfinity if *c == 0.0 => {}
                    ExtendedReal::PosInfinity => {
                        return Err(Error::FunctionalUndefined(format!(
                            "{} enters with a negative coefficient and is +inf",
                            f.name()
                        )))
                    }
                }
            }
            Ok(acc)
        })
    }

    // -- channel quantities -------------------------------------------------

    pub fn output_entropy() -> Self {
        Self::new("H(Phi(rho))", |s| {
            let (phi, rho) = channel_of(s)?;
            fin(output_entropy(phi, rho)?)
        })
    }

    /// Entropy exchange `H(Φ̂(ρ))`.
    pub fn exchange_entropy() -> Self {
        Self::new("H(Phi^(rho))", |s| {
            let (phi, rho) = channel_of(s)?;
            fin(complementary_output_entropy(phi, rho)?)
        })
    }

    /// `I(Φ,ρ) = H(ρ) + H(Φ(ρ)) − H(Φ̂(ρ))`.
    pub fn channel_mutual_information() -> Self {
        Self::new("I(Phi,rho)", |s| {
            let (phi, rho) = channel_of(s)?;
            fin(crate::channels::channel_mutual_information(phi, rho)?)
        })
    }

    pub fn coherent_information() -> Self {
        Self::new("I_c(Phi,rho)", |s| {
            let (phi, rho) = channel_of(s)?;
            fin(crate::channels::coherent_information(phi, rho)?)
        })
    }

    pub fn entropy_gain() -> Self {
        Self::new("EG(Phi,rho)", |s| {
            let (phi, rho) = channel_of(s)?;
            fin(crate::channels::entropy_gain(phi, rho)?)
        })
    }

    /// `C̄(Φ,ρ)`; exact `H(Φ(ρ))` for isometric channels, whose outputs on
    /// pure inputs are pure, otherwise the optimizer lower bound.
    pub fn constrained_holevo(budget: OptimizerBudget) -> Self {
        Self::new("Cbar(Phi,rho)", move |s| {
            let (phi, rho) = channel_of(s)?;
            if phi.env_dim() == 1 {
                return fin(output_entropy(phi, rho)?);
            }
            let m = (rho.dim() * rho.dim()).max(2);
            fin(constrained_holevo(phi, rho, m, &budget)?.value)
        })
        .with_bound(BoundDirection::LowerBound)
    }

    // -- correlation measures -----------------------------------------------

    /// `E_F`: exact on pure, classical and diagonal samples, optimizer otherwise.
    pub fn entanglement_of_formation(budget: OptimizerBudget) -> Self {
        Self::new("E_F", move |s| {
            if let Some(v) = entanglement_anchor(s)? {
                return fin(v);
            }
            let st = s.state()?;
            fin(entanglement_of_formation(&st, default_members(st.rank()), &budget)?.value)
        })
        .with_bound(BoundDirection::UpperBound)
    }

    /// `E_csq` restricted to `k`-member decompositions.
    pub fn csq_entanglement(k: usize, budget: OptimizerBudget) -> Self {
        Self::new(format!("E_csq^{k}"), move |s| {
            if let Some(v) = entanglement_anchor(s)? {
                return fin(v);
            }
            fin(csq_entanglement_k(&s.state()?, k, &budget)?.value)
        })
        .with_bound(BoundDirection::UpperBound)
    }

    /// `E_sq` restricted to extensions of dimension `k`.
    pub fn squashed_entanglement(k: usize, budget: OptimizerBudget) -> Self {
        Self::new(format!("E_sq^{k}"), move |s| {
            if let Some(v) = entanglement_anchor(s)? {
                return fin(v);
            }
            fin(squashed_entanglement_k(&s.state()?, k, &budget)?.value)
        })
        .with_bound(BoundDirection::UpperBound)
    }

    /// Regularized `E_F`, known only where it is additive: pure states
    /// (equal to `H(A)`) and separable structured samples (zero).
    pub fn regularized_entanglement_of_formation() -> Self {
        Self::new("E_F^inf", |s| {
            entanglement_anchor(s)?.map(ExtendedReal::Finite).ok_or_else(|| {
                Error::FunctionalUndefined("regularized E_F needs a pure or separable sample".into())
            })
        })
    }

    /// Henderson–Vedral `C_B`.
    pub fn classical_correlations(budget: OptimizerBudget) -> Self {
        Self::new("C_B", move |s| {
            if let Some((cb, _)) = correlation_anchor(s)? {
                return fin(cb);
            }
            let st = s.state()?;
            let db = st.factor_dims()[1];
            fin(classical_correlations_cb(&st, (db * db).max(2), &budget)?.value)
        })
        .with_bound(BoundDirection::LowerBound)
    }

    /// Quantum discord `D_B = I(A:B) − C_B`.
    pub fn discord(budget: OptimizerBudget) -> Self {
        Self::new("D_B", move |s| {
            if let Some((_, d)) = correlation_anchor(s)? {
                return fin(d);
            }
            let st = s.state()?;
            fin(crate::roof::quantum_discord(&st, &budget)?.value)
        })
        .with_bound(BoundDirection::UpperBound)
    }
}

/// Entanglement measures where they are known in closed form: pure states
/// give `H(A)`, classically correlated and diagonal states give zero.
fn entanglement_anchor(s: &Sample) -> Result<Option<f64>> {
    require_bipartite(s)?;
    match s {
        Sample::Correlated(c) if c.is_coherent() => Ok(Some(c.subset_entropy(&[0])?)),
        Sample::Correlated(_) => Ok(Some(0.0)),
        Sample::State(st) if st.is_diagonal() => Ok(Some(0.0)),
        Sample::State(st) if is_pure_state(st) => Ok(Some(s.subset_entropy(&[0])?)),
        Sample::State(_) => Ok(None),
        Sample::ChannelInput { .. } => Err(Error::InvalidArgument("state sample expected".into())),
    }
}

/// `(C_B, D_B)` where known exactly: pure states give `(H(A), H(A))`;
/// states diagonal in a product basis are classical on B, so a basis
/// measurement attains `C_B = I` and `D_B = 0`.
fn correlation_anchor(s: &Sample) -> Result<Option<(f64, f64)>> {
    require_bipartite(s)?;
    match s {
        Sample::Correlated(c) if c.is_coherent() => {
            let h = c.subset_entropy(&[0])?;
            Ok(Some((h, h)))
        }
        Sample::Correlated(_) | Sample::State(_) if is_classical(s) => {
            Ok(Some((mi_between(s, &[0], &[1])?, 0.0)))
        }
        Sample::State(st) if is_pure_state(st) => {
            let h = s.subset_entropy(&[0])?;
            Ok(Some((h, h)))
        }
        Sample::State(_) => Ok(None),
        _ => Err(Error::InvalidArgument("state sample expected".into())),
    }
}

/// Blocks of a classically correlated sample are rank one.
fn classical_block_entropy(s: &Sample) -> Result<Option<f64>> {
    match s {
        Sample::Correlated(c) if !c.is_coherent() && c.parties() == 2 => Ok(Some(0.0)),
        Sample::Correlated(_) => Err(Error::BadFactorization("cq blocks need a classical B".into())),
        _ => Ok(None),
    }
}

fn is_classical(s: &Sample) -> bool {
    match s {
        Sample::Correlated(c) => !c.is_coherent(),
        Sample::State(st) => st.is_diagonal(),
        _ => false,
    }
}

fn require_bipartite(s: &Sample) -> Result<()> {
    if s.parties() != 2 {
        return Err(Error::BadFactorization("bipartite sample expected".into()));
    }
    Ok(())
}
