use super::{relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::operator::{trace_distance, DensityState, TraceClassElement};

const WEIGHT_SUM_TOL: f64 = 1e-12;
const HOLEVO_FORM_TOL: f64 = 1e-9;

/// Finite ensemble `{π_i, ρ_i}` with its average.
#[derive(Debug, Clone)]
pub struct Ensemble {
    weights: Vec<f64>,
    members: Vec<TraceClassElement>,
    average: TraceClassElement,
}

impl Ensemble {
    pub fn new(weights: Vec<f64>, members: Vec<TraceClassElement>) -> Result<Self> {
        if weights.len() != members.len() || members.is_empty() {
            return Err(Error::InconsistentEnsemble(format!(
                "{} weights for {} members",
                weights.len(),
                members.len()
            )));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InconsistentEnsemble("negative weight".into()));
        }
        let d = members[0].dim();
        if members.iter().any(|m| m.dim() != d) {
            return Err(Error::InconsistentEnsemble("members differ in dimension".into()));
        }
        let mut avg = members[0].scale(weights[0]);
        for (w, m) in weights.iter().zip(&members).skip(1) {
            avg = avg.add(&m.scale(*w))?;
        }
        Ok(Self {
            weights,
            members,
            average: avg,
        })
    }

    /// Ensemble of states: weights sum to one and every member has unit trace.
    pub fn of_states(weights: Vec<f64>, members: Vec<DensityState>) -> Result<Self> {
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InconsistentEnsemble(format!("weights sum to {s}")));
        }
        Self::new(weights, members.into_iter().map(|m| m.into_element()).collect())
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn members(&self) -> &[TraceClassElement] {
        &self.members
    }

    pub fn average(&self) -> &TraceClassElement {
        &self.average
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_state_ensemble(&self) -> bool {
        let s: f64 = self.weights.iter().sum();
        (s - 1.0).abs() <= WEIGHT_SUM_TOL
            && self.members.iter().all(|m| (m.trace() - 1.0).abs() <= 1e-10)
    }

    /// `‖ρ̄ − Σ π_i ρ_i‖₁` recomputed from scratch.
    pub fn average_defect(&self, claimed: &TraceClassElement) -> Result<f64> {
        trace_distance(claimed, &self.average)
    }

    /// `Σ π_i H(ρ_i)`.
    pub fn mean_entropy(&self) -> Result<f64> {
        let mut s = 0.0;
        for (w, m) in self.weights.iter().zip(&self.members) {
            if *w > 0.0 {
                s += w * von_neumann_entropy(m)?;
            }
        }
        Ok(s)
    }
}

/// `χ = Σ π_i H(ρ_i‖ρ̄)`, asserted equal to `H(ρ̄) − Σ π_i H(ρ_i)`.
pub fn holevo_quantity(e: &Ensemble) -> Result<ExtendedReal> {
    if !e.is_state_ensemble() {
        return Err(Error::InconsistentEnsemble(
            "Holevo quantity needs an ensemble of states".into(),
        ));
    }
    let mut rel = ExtendedReal::ZERO;
    for (w, m) in e.weights.iter().zip(&e.members) {
        if *w > 0.0 {
            rel = rel + *w * relative_entropy(m, &e.average)?;
        }
    }
    let ent = von_neumann_entropy(&e.average)? - e.mean_entropy()?;
    match rel {
        ExtendedReal::Finite(r) if (r - ent).abs() <= HOLEVO_FORM_TOL * (1.0 + ent.abs()) => {
            Ok(ExtendedReal::Finite(r))
        }
        _ => Err(Error::Inconsistent(format!(
            "Holevo forms disagree: {rel} vs {ent}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, CVector};

    #[test]
    fn orthogonal_pair() {
        let e = Ensemble::of_states(
            vec![0.5, 0.5],
            vec![DensityState::basis(2, 0), DensityState::basis(2, 1)],
        )
        .unwrap();
        assert!((holevo_quantity(&e).unwrap().unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn singleton_is_zero() {
        let e = Ensemble::of_states(vec![1.0], vec![DensityState::maximally_mixed(3)]).unwrap();
        assert!(holevo_quantity(&e).unwrap().unwrap().abs() < 1e-14);
    }

    #[test]
    fn zero_and_plus() {
        let mut v = CVector::zeros(2);
        v[0] = cr(1.0);
        v[1] = cr(1.0);
        let plus = DensityState::pure(&v, vec![2]).unwrap();
        let zero = DensityState::from_matrix(DensityState::basis(2, 0).to_dense(), vec![2]).unwrap();
        let e = Ensemble::of_states(vec![0.5, 0.5], vec![zero, plus]).unwrap();
        let c2 = (std::f64::consts::PI / 8.0).cos().powi(2);
        let oracle = -c2 * c2.ln() - (1.0 - c2) * (1.0 - c2).ln();
        assert!((holevo_quantity(&e).unwrap().unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(Ensemble::of_states(vec![0.5, 0.4], vec![DensityState::basis(2, 0), DensityState::basis(2, 1)]).is_err());
        assert!(Ensemble::new(vec![-0.1], vec![DensityState::basis(2, 0).into_element()]).is_err());
    }
}
