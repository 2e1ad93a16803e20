//! Majorization of spectra, rearrangement along an energy basis, and the
//! entropy-gap decomposition `H(σ) = H(ρ) + D(ρ↓‖σ↓) + f(ρ,σ)`.

use serde::Serialize;

use crate::energy::Hamiltonian;
use crate::error::{Error, Result};
use crate::info::{eta, von_neumann_entropy};
use crate::operator::{trace_distance, DensityState, TraceClassElement};

/// Absolute slack on partial-sum comparisons.
pub const MAJORIZATION_TOL: f64 = 1e-10;
const DECOMPOSITION_TOL: f64 = 1e-8;

/// Nonincreasing nonnegative spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DescendingSpectrum {
    values: Vec<f64>,
}

impl DescendingSpectrum {
    pub fn of(el: &TraceClassElement) -> Self {
        Self::from_values(el.spectrum())
    }

    /// Sorts and clamps tiny negative eigenvalues to zero.
    pub fn from_values(mut v: Vec<f64>) -> Self {
        v.iter_mut().for_each(|x| *x = x.max(0.0));
        v.sort_by(|a, b| b.total_cmp(a));
        Self { values: v }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn padded(&self, len: usize) -> Vec<f64> {
        let mut v = self.values.clone();
        if v.len() < len {
            v.resize(len, 0.0);
        }
        v
    }
}

/// Partial-sum test on descending spectra, zero-padding the shorter one.
pub fn majorizes_spectra(lambda: &[f64], mu: &[f64]) -> bool {
    let n = lambda.len().max(mu.len());
    let l = DescendingSpectrum::from_values(lambda.to_vec()).padded(n);
    let m = DescendingSpectrum::from_values(mu.to_vec()).padded(n);
    let (mut sl, mut sm) = (0.0, 0.0);
    for k in 0..n {
        sl += l[k];
        sm += m[k];
        if sl < sm - MAJORIZATION_TOL {
            return false;
        }
    }
    true
}

/// `ρ ≻ σ`.
pub fn majorizes(rho: &TraceClassElement, sigma: &TraceClassElement) -> Result<bool> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(majorizes_spectra(&rho.spectrum(), &sigma.spectrum()))
}

/// Terms of `H(σ) − H(ρ) = D(ρ↓‖σ↓) + f(ρ,σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapDecomposition {
    pub d_term: f64,
    pub f_term: f64,
}

fn majorized_pair(rho: &TraceClassElement, sigma: &TraceClassElement) -> Result<(Vec<f64>, Vec<f64>)> {
    if !majorizes(rho, sigma)? {
        return Err(Error::NotMajorized("rho does not majorize sigma".into()));
    }
    let n = rho.dim();
    Ok((
        DescendingSpectrum::of(rho).padded(n),
        DescendingSpectrum::of(sigma).padded(n),
    ))
}

pub fn entropy_gap_decomposition(
    rho: &TraceClassElement,
    sigma: &TraceClassElement,
) -> Result<GapDecomposition> {
    let (l, m) = majorized_pair(rho, sigma)?;
    let mut d = 0.0;
    let mut f = 0.0;
    for (&lk, &mk) in l.iter().zip(&m) {
        if mk > 0.0 {
            if lk > 0.0 {
                d += lk * (lk.ln() - mk.ln());
            }
            f += (mk - lk) * (-mk.ln());
        }
    }
    let hs = von_neumann_entropy(sigma)?;
    let hr = von_neumann_entropy(rho)?;
    if (hs - hr - d - f).abs() > DECOMPOSITION_TOL {
        return Err(Error::Inconsistent(format!(
            "H(sigma) = {hs}, H(rho) + D + f = {}",
            hr + d + f
        )));
    }
    Ok(GapDecomposition { d_term: d, f_term: f })
}

/// `f_n = Σ (μ_k − λ_k) min{n, −log μ_k}`, nondecreasing in `n`.
pub fn f_gap_approximant(rho: &TraceClassElement, sigma: &TraceClassElement, n: f64) -> Result<f64> {
    let (l, m) = majorized_pair(rho, sigma)?;
    Ok(l.iter()
        .zip(&m)
        .map(|(&lk, &mk)| {
            let h = if mk > 0.0 { (-mk.ln()).min(n) } else { n };
            (mk - lk) * h
        })
        .sum())
}

/// Diagonal state with ρ's spectrum descending along ascending energy levels.
pub fn rearrangement(rho: &DensityState, h: &Hamiltonian) -> Result<DensityState> {
    // levels are nondecreasing in k, so the computational order is the energy order
    h.levels(rho.dim())?;
    DensityState::diagonal(
        DescendingSpectrum::of(rho).padded(rho.dim()),
        vec![rho.dim()],
    )
}

/// Explicit separable decomposition `Σ π_i α_i ⊗ β_i`.
#[derive(Debug, Clone)]
pub struct ProductEnsemble {
    pub weights: Vec<f64>,
    pub a_members: Vec<DensityState>,
    pub b_members: Vec<DensityState>,
}

impl ProductEnsemble {
    pub fn state(&self) -> Result<DensityState> {
        if self.weights.len() != self.a_members.len() || self.weights.len() != self.b_members.len() {
            return Err(Error::InconsistentEnsemble("length mismatch".into()));
        }
        let mut acc: Option<TraceClassElement> = None;
        for ((w, a), b) in self.weights.iter().zip(&self.a_members).zip(&self.b_members) {
            let t = a.tensor(b)?.into_element().scale(*w);
            acc = Some(match acc {
                None => t,
                Some(x) => x.add(&t)?,
            });
        }
        DensityState::new(acc.ok_or_else(|| Error::InconsistentEnsemble("empty".into()))?)
    }
}

/// `(ω_A ≻ ω_AB, ω_B ≻ ω_AB)` for any bipartite state.
pub fn marginal_majorization(w: &TraceClassElement) -> Result<(bool, bool)> {
    if w.factor_dims().len() != 2 {
        return Err(Error::BadFactorization("bipartite state expected".into()));
    }
    let joint = w.spectrum();
    let a = w.partial_trace(&[0])?.spectrum();
    let b = w.partial_trace(&[1])?.spectrum();
    Ok((majorizes_spectra(&a, &joint), majorizes_spectra(&b, &joint)))
}

/// Both marginal majorizations for ω with a supplied separable construction.
pub fn separable_majorization_check(w: &DensityState, construction: &ProductEnsemble) -> Result<bool> {
    let built = construction.state()?;
    let defect = trace_distance(&built, w)?;
    if defect > 1e-9 {
        return Err(Error::InconsistentEnsemble(format!(
            "construction differs from the state by {defect:.3e}"
        )));
    }
    let (a, b) = marginal_majorization(w)?;
    Ok(a && b)
}

/// `H(σ) − H(ρ) − ½‖σ↓ − ρ↓‖₁²`, nonnegative when `ρ ≻ σ`.
pub fn pinsker_margin(rho: &TraceClassElement, sigma: &TraceClassElement) -> Result<f64> {
    let n = rho.dim().max(sigma.dim());
    let l = DescendingSpectrum::of(rho).padded(n);
    let m = DescendingSpectrum::of(sigma).padded(n);
    let dist: f64 = l.iter().zip(&m).map(|(a, b)| (a - b).abs()).sum();
    let hs: f64 = m.iter().map(|&x| eta(x)).sum();
    let hr: f64 = l.iter().map(|&x| eta(x)).sum();
    Ok(hs - hr - 0.5 * dist * dist)
}
