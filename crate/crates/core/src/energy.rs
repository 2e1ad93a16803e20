//! Hamiltonians with parametric level laws, `g(H)`, Gibbs states and the
//! sharp energy-constrained sequence.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info::{relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::operator::{DensityState, TraceClassElement};

/// Default relative tail allowed by [`gibbs_state`].
pub const GIBBS_TAIL_TOL: f64 = 1e-8;
/// Slack on `Tr Hρ ≤ E`.
pub const KHE_TOL: f64 = 1e-10;

/// Closed-form energy level law `k ↦ E_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevelLaw {
    /// `E_k = e0 + slope·k`
    Linear { e0: f64, slope: f64 },
    /// `E_k = a·log(k+1) + c`
    Log { a: f64, c: f64 },
    /// `E_k = c`, declared divergent (`g = +∞`)
    Constant { c: f64 },
    /// Finite table, ascending.
    Table { levels: Vec<f64> },
}

impl LevelLaw {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidLevelLaw(m.to_string()));
        match self {
            LevelLaw::Linear { e0, slope } => {
                if !(*e0 >= 0.0) || !(*slope > 0.0) {
                    return bad("linear law needs e0 >= 0 and slope > 0");
                }
            }
            LevelLaw::Log { a, c } => {
                if !(*a > 0.0) || !(*c >= 0.0) {
                    return bad("log law needs a > 0 and c >= 0");
                }
            }
            LevelLaw::Constant { c } => {
                if !(*c >= 0.0) {
                    return bad("constant law needs c >= 0");
                }
            }
            LevelLaw::Table { levels } => {
                if levels.is_empty() || !(levels[0] >= 0.0) {
                    return bad("table needs at least one nonnegative level");
                }
                if levels.windows(2).any(|w| !(w[1] >= w[0])) {
                    return bad("table levels must be nondecreasing");
                }
            }
        }
        Ok(())
    }

    /// `E_k`, `None` past the end of a table.
    pub fn level(&self, k: usize) -> Option<f64> {
        match self {
            LevelLaw::Linear { e0, slope } => Some(e0 + slope * k as f64),
            LevelLaw::Log { a, c } => Some(a * ((k + 1) as f64).ln() + c),
            LevelLaw::Constant { c } => Some(*c),
            LevelLaw::Table { levels } => levels.get(k).copied(),
        }
    }

    pub fn is_parametric(&self) -> bool {
        !matches!(self, LevelLaw::Table { .. })
    }
}

/// Diagonal Hamiltonian `Σ E_k |k⟩⟨k|` truncated to `truncation_dim` levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hamiltonian {
    pub law: LevelLaw,
    pub truncation_dim: usize,
}

impl Hamiltonian {
    pub fn new(law: LevelLaw, truncation_dim: usize) -> Result<Self> {
        law.validate()?;
        if truncation_dim == 0 {
            return Err(Error::InvalidLevelLaw("truncation_dim must be positive".into()));
        }
        if let LevelLaw::Table { levels } = &law {
            if truncation_dim > levels.len() {
                return Err(Error::InvalidLevelLaw(format!(
                    "table has {} levels, truncation {truncation_dim}",
                    levels.len()
                )));
            }
        }
        Ok(Self { law, truncation_dim })
    }

    /// `E_k = log(k+1)` truncated at `d`.
    pub fn log_law(a: f64, c: f64, d: usize) -> Result<Self> {
        Self::new(LevelLaw::Log { a, c }, d)
    }

    pub fn table(levels: Vec<f64>) -> Result<Self> {
        let d = levels.len();
        Self::new(LevelLaw::Table { levels }, d)
    }

    pub fn e0(&self) -> f64 {
        self.law.level(0).expect("level 0 exists")
    }

    pub fn level(&self, k: usize) -> f64 {
        self.law.level(k).expect("level inside the table")
    }

    /// First `d` levels; fails past the truncation.
    pub fn levels(&self, d: usize) -> Result<Vec<f64>> {
        if d > self.truncation_dim {
            return Err(Error::SupportEscapesTruncation(format!(
                "{d} levels requested, truncation {}",
                self.truncation_dim
            )));
        }
        Ok((0..d).map(|k| self.level(k)).collect())
    }

    /// Same law with another truncation.
    pub fn truncated(&self, d: usize) -> Result<Self> {
        Self::new(self.law.clone(), d)
    }
}

/// `g(H) = inf{λ > 0 : Tr e^{−λH} < ∞}`, from the level law in closed form.
pub fn g_parameter(h: &Hamiltonian) -> Result<ExtendedReal> {
    match &h.law {
        LevelLaw::Log { a, .. } => Ok(ExtendedReal::Finite(1.0 / a)),
        LevelLaw::Linear { .. } => Ok(ExtendedReal::Finite(0.0)),
        LevelLaw::Constant { .. } => Ok(ExtendedReal::PosInfinity),
        LevelLaw::Table { .. } => Err(Error::FiniteTableLaw),
    }
}

/// Integral-test bound on `Σ_{k≥d} e^{−λE_k}` (zero for a fully used table).
pub fn partition_tail_bound(h: &Hamiltonian, lambda: f64, d: usize) -> f64 {
    match &h.law {
        LevelLaw::Log { a, c } => {
            let s = lambda * a;
            if s <= 1.0 {
                return f64::INFINITY;
            }
            // (k+1)^{-s} ≤ ∫_k^{k+1} x^{-s} dx
            (-lambda * c).exp() * (d as f64).powf(1.0 - s) / (s - 1.0)
        }
        LevelLaw::Linear { e0, slope } => {
            let r = (-lambda * slope).exp();
            (-lambda * e0).exp() * r.powf(d as f64) / (1.0 - r)
        }
        LevelLaw::Constant { .. } => f64::INFINITY,
        LevelLaw::Table { levels } => {
            levels[d.min(levels.len())..]
                .iter()
                .map(|e| (-lambda * e).exp())
                .sum()
        }
    }
}

/// Truncated Gibbs state `σ_λ ∝ e^{−λH}` on `d` levels.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub lambda: f64,
    pub state: DensityState,
    pub log_partition: f64,
    /// Upper bound on the discarded part of the partition sum.
    pub tail_bound: f64,
}

/// Gibbs state with the default truncation policy ([`GIBBS_TAIL_TOL`]).
pub fn gibbs_state(h: &Hamiltonian, lambda: f64, d: usize) -> Result<GibbsState> {
    gibbs_state_with_tail_tolerance(h, lambda, d, GIBBS_TAIL_TOL)
}

pub fn gibbs_state_with_tail_tolerance(
    h: &Hamiltonian,
    lambda: f64,
    d: usize,
    tail_tol: f64,
) -> Result<GibbsState> {
    if h.law.is_parametric() {
        let g = g_parameter(h)?;
        let ok = match g {
            ExtendedReal::Finite(g) => lambda > g,
            ExtendedReal::PosInfinity => false,
        };
        if !ok {
            return Err(Error::LambdaBelowG {
                lambda,
                g: g.to_f64(),
            });
        }
    } else if !(lambda > 0.0) {
        return Err(Error::LambdaBelowG { lambda, g: 0.0 });
    }
    let (state, log_z) = truncated_gibbs(h, lambda, d)?;
    let tail = partition_tail_bound(h, lambda, d);
    let rel = tail / log_z.exp();
    if rel > tail_tol {
        return Err(Error::TruncationTail {
            tail: rel,
            tolerance: tail_tol,
        });
    }
    Ok(GibbsState {
        lambda,
        state,
        log_partition: log_z,
        tail_bound: tail,
    })
}

/// Normalized `e^{−λH}` on `d` levels and `log Σ_{k<d} e^{−λE_k}`, without tail policy.
pub fn truncated_gibbs(h: &Hamiltonian, lambda: f64, d: usize) -> Result<(DensityState, f64)> {
    let levels = h.levels(d)?;
    let e0 = levels[0];
    let w: Vec<f64> = levels.iter().map(|e| (-lambda * (e - e0)).exp()).collect();
    let s: f64 = w.iter().sum();
    let p: Vec<f64> = w.iter().map(|x| x / s).collect();
    let log_z = -lambda * e0 + s.ln();
    Ok((DensityState::diagonal_single(p)?, log_z))
}

/// `Tr Hρ` over the truncation.
pub fn mean_energy(rho: &TraceClassElement, h: &Hamiltonian) -> Result<f64> {
    let d = rho.dim();
    let avail = d.min(h.truncation_dim);
    let mut e = 0.0;
    for k in 0..d {
        let p = rho.entry(k, k).re;
        if k >= avail {
            if p.abs() > 1e-14 {
                return Err(Error::SupportEscapesTruncation(format!(
                    "weight {p} on level {k} beyond truncation {}",
                    h.truncation_dim
                )));
            }
            continue;
        }
        e += h.level(k) * p;
    }
    Ok(e)
}

/// `Tr Hρ ≤ E` with [`KHE_TOL`] slack.
pub fn in_khe(rho: &TraceClassElement, h: &Hamiltonian, energy: f64) -> Result<bool> {
    Ok(mean_energy(rho, h)? <= energy + KHE_TOL)
}

/// `|H(ρ) + H(ρ‖σ_λ) − λ Tr Hρ − log Z|` against the Gibbs state truncated at `d`.
pub fn gibbs_identity_residual(
    rho: &TraceClassElement,
    h: &Hamiltonian,
    lambda: f64,
    d: usize,
) -> Result<f64> {
    if rho.dim() > d {
        for k in d..rho.dim() {
            if rho.entry(k, k).re.abs() > 1e-14 {
                return Err(Error::SupportEscapesTruncation(format!(
                    "state has weight on level {k}, truncation {d}"
                )));
            }
        }
    }
    let (sigma, log_z) = truncated_gibbs(h, lambda, d)?;
    let sigma = if rho.dim() > d {
        sigma.embed(rho.dim())?
    } else {
        sigma
    };
    let rho = if rho.dim() < d {
        rho.embed(d)?
    } else {
        rho.clone()
    };
    let rel = relative_entropy(&rho, &sigma)?;
    let rel = rel.finite().ok_or_else(|| {
        Error::SupportEscapesTruncation("state not supported by the truncated Gibbs state".into())
    })?;
    let lhs = von_neumann_entropy(&rho)? + rel;
    let levels = h.levels(d)?;
    let energy: f64 = (0..d).map(|k| levels[k] * rho.entry(k, k).re).sum();
    let rhs = lambda * energy + log_z;
    Ok((lhs - rhs).abs())
}

/// `q_n = (E − E_0)/(n^{−1}Σ_{k=1}^n E_k − E_0)`.
pub fn sharp_q(h: &Hamiltonian, energy: f64, n: usize) -> Result<f64> {
    let e0 = h.e0();
    if !(energy > e0) {
        return Err(Error::InvalidArgument(format!(
            "energy {energy} must exceed E_0 = {e0}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let mut mean = 0.0;
    for k in 1..=n {
        mean += h
            .law
            .level(k)
            .ok_or_else(|| Error::SupportEscapesTruncation(format!("no level {k} in table")))?;
    }
    mean /= n as f64;
    let q = (energy - e0) / (mean - e0);
    if !(q <= 1.0) || !(mean > e0) {
        return Err(Error::QExceedsOne { q, n });
    }
    Ok(q)
}

/// `ρ_n = (1−q_n)|0⟩⟨0| + (q_n/n) Σ_{k=1}^n |k⟩⟨k|` with `Tr Hρ_n = E`.
pub fn sharp_sequence(h: &Hamiltonian, energy: f64, n: usize) -> Result<DensityState> {
    let q = sharp_q(h, energy, n)?;
    let mut p = vec![q / n as f64; n + 1];
    p[0] = 1.0 - q;
    DensityState::diagonal_single(p)
}

/// `f(ρ) = Tr Hρ − Tr Hρ↓`.
pub fn energy_rearrangement_gap(rho: &TraceClassElement, h: &Hamiltonian) -> Result<f64> {
    let levels = h.levels(rho.dim())?;
    Ok(gap_with_levels(rho, &levels))
}

/// `f_m(ρ) = Tr H_m(ρ − ρ↓)` with `H_m` capping levels at `E_m`.
pub fn energy_rearrangement_gap_approximant(
    rho: &TraceClassElement,
    h: &Hamiltonian,
    m: usize,
) -> Result<f64> {
    let levels = h.levels(rho.dim())?;
    let cap = h.law.level(m).unwrap_or(f64::INFINITY);
    let capped: Vec<f64> = levels.iter().map(|&e| e.min(cap)).collect();
    Ok(gap_with_levels(rho, &capped))
}

fn gap_with_levels(rho: &TraceClassElement, levels: &[f64]) -> f64 {
    let spec = rho.spectrum();
    let direct: f64 = (0..rho.dim()).map(|k| levels[k] * rho.entry(k, k).re).sum();
    let rearranged: f64 = spec.iter().zip(levels).map(|(p, e)| p * e).sum();
    direct - rearranged
}
