use serde::Serialize;

use super::entanglement::{default_members, entanglement_of_formation};
use super::optimizer::{minimize_isometry, OptimizerBudget};
use super::{cone_entropy, is_pure, BoundDirection, BoundedValue};
use crate::error::{Error, Result};
use crate::info::{mutual_information, von_neumann_entropy};
use crate::linalg::CMatrix;
use crate::operator::{tensor, trace_distance, DensityState};

/// `(I ⊗ ⟨u|) ω (I ⊗ |u⟩)` with `u` given as the conjugated row `row` of `w`.
fn post_measurement_a(omega: &CMatrix, w: &CMatrix, row: usize, da: usize, db: usize) -> CMatrix {
    // POVM element |u⟩⟨u| with u_b = conj(w[row, b]); ⟨u|·|u⟩ contracts B
    CMatrix::from_fn(da, da, |a, a2| {
        let mut s = num_complex::Complex64::new(0.0, 0.0);
        for b in 0..db {
            for b2 in 0..db {
                s += w[(row, b)] * omega[(a * db + b, a2 * db + b2)] * w[(row, b2)].conj();
            }
        }
        s
    })
}

/// Lower bound on `C_B(ω) = sup_M [H(ω_A) − Σ π_i H(ω^i_A)]` over rank-one
/// POVMs on B with `povm_size` outcomes.
pub fn classical_correlations_cb(
    w: &DensityState,
    povm_size: usize,
    budget: &OptimizerBudget,
) -> Result<BoundedValue> {
    let (da, db) = match w.factor_dims() {
        [a, b] => (*a, *b),
        fd => return Err(Error::BadFactorization(format!("bipartite state expected, got {fd:?}"))),
    };
    if povm_size < 2 || povm_size < db {
        return Err(Error::InvalidPOVM(format!(
            "{povm_size} rank-one outcomes cannot resolve the identity on dimension {db}"
        )));
    }
    let wa = w.partial_trace(&[0])?;
    let ha = von_neumann_entropy(&wa)?;
    if is_pure(w) {
        return Ok(BoundedValue::exact(ha, BoundDirection::LowerBound));
    }
    let wb = w.partial_trace(&[1])?;
    if trace_distance(w, &tensor(&wa, &wb)?)? <= 1e-12 {
        return Ok(BoundedValue::exact(0.0, BoundDirection::LowerBound));
    }
    let omega = w.to_dense();
    let s = minimize_isometry(povm_size, db, budget, |u| {
        (0..povm_size)
            .map(|i| cone_entropy(&post_measurement_a(&omega, u, i, da, db)))
            .sum()
    });
    Ok(BoundedValue::from_search(ha - s.value, BoundDirection::LowerBound, &s))
}

/// `D_B = I(A:B) − C_B`, an upper bound since `C_B` is a lower estimate.
pub fn quantum_discord(w: &DensityState, budget: &OptimizerBudget) -> Result<BoundedValue> {
    let db = *w
        .factor_dims()
        .get(1)
        .ok_or_else(|| Error::BadFactorization("bipartite state expected".into()))?;
    let cb = classical_correlations_cb(w, (db * db).max(2), budget)?;
    let i = mutual_information(w)?.unwrap();
    Ok(BoundedValue {
        value: (i - cb.value).max(0.0),
        direction: BoundDirection::UpperBound,
        ..cb
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct KoashiWinter {
    pub c_b: BoundedValue,
    pub e_f: BoundedValue,
    pub h_a: f64,
    /// `C_B(ω_AB) + E_F(ω_AC) − H(ω_A)`; no fixed sign since the two
    /// estimates err in opposite directions.
    pub signed_residual: f64,
    pub converged: bool,
}

impl KoashiWinter {
    pub fn residual(&self) -> f64 {
        self.signed_residual.abs()
    }
}

/// `C_B(ω_AB) + E_F(ω_AC) = H(ω_A)` on a pure tripartite state (order A, B, C).
pub fn koashi_winter_residual(w: &DensityState, budget: &OptimizerBudget) -> Result<KoashiWinter> {
    if w.factor_dims().len() != 3 {
        return Err(Error::BadFactorization("tripartite state expected".into()));
    }
    if !is_pure(w) {
        let spec = w.spectrum();
        return Err(Error::NotPure { purity: spec.iter().map(|x| x * x).sum() });
    }
    let wab = w.partial_trace(&[0, 1])?;
    let wac = w.partial_trace(&[0, 2])?;
    let db = w.factor_dims()[1];
    let c_b = classical_correlations_cb(&wab, (db * db).max(2), budget)?;
    let e_f = entanglement_of_formation(&wac, default_members(wac.rank()), budget)?;
    let h_a = von_neumann_entropy(w.partial_trace(&[0])?.element())?;
    Ok(KoashiWinter {
        c_b,
        e_f,
        h_a,
        signed_residual: c_b.value + e_f.value - h_a,
        converged: c_b.converged && e_f.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, CVector};
    use crate::random::{random_density, random_pure, rng};

    fn quick() -> OptimizerBudget {
        OptimizerBudget {
            restarts: 6,
            iterations: 1000,
            ..Default::default()
        }
    }

    fn ghz() -> DensityState {
        let mut v = CVector::zeros(8);
        v[0] = cr(1.0);
        v[7] = cr(1.0);
        DensityState::pure(&v, vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn cb_anchors() {
        let b = quick();
        let pure = random_pure(&mut rng(1), &[2, 2]);
        let ha = von_neumann_entropy(&pure.partial_trace(&[0]).unwrap()).unwrap();
        let cb = classical_correlations_cb(&pure, 4, &b).unwrap();
        assert!(cb.is_exact() && (cb.value - ha).abs() < 1e-15);
        let prod = random_density(&mut rng(2), &[2]).tensor(&random_density(&mut rng(3), &[2])).unwrap();
        assert_eq!(classical_correlations_cb(&prod, 4, &b).unwrap().value, 0.0);
        assert!(quantum_discord(&prod, &b).unwrap().value.abs() < 1e-12);
    }

    #[test]
    fn cb_on_quantum_classical_state() {
        // Σ π_i ρ_i ⊗ |i⟩⟨i|_B: C_B = I(A:B), discord 0
        let r0 = random_density(&mut rng(4), &[2]);
        let r1 = random_density(&mut rng(5), &[2]);
        let w = r0
            .tensor(&DensityState::basis(2, 0))
            .unwrap()
            .mix(&r1.tensor(&DensityState::basis(2, 1)).unwrap(), 0.3)
            .unwrap();
        let i = mutual_information(&w).unwrap().unwrap();
        let cb = classical_correlations_cb(&w, 4, &quick()).unwrap();
        assert_eq!(cb.direction, BoundDirection::LowerBound);
        assert!(cb.value <= i + 1e-9 && cb.value > i - 1e-5, "{} vs {i}", cb.value);
        assert!(quantum_discord(&w, &quick()).unwrap().value < 1e-5);
    }

    #[test]
    fn discord_bell() {
        let mut v = CVector::zeros(4);
        v[0] = cr(1.0);
        v[3] = cr(1.0);
        let bell = DensityState::pure(&v, vec![2, 2]).unwrap();
        assert!((quantum_discord(&bell, &quick()).unwrap().value - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn kw_examples() {
        let b = quick();
        let kw = koashi_winter_residual(&ghz(), &b).unwrap();
        assert!((kw.c_b.value - 2f64.ln()).abs() < 1e-4, "{kw:?}");
        assert!(kw.e_f.value < 1e-4);
        assert!(kw.residual() < 5e-3);

        let mut v = CVector::zeros(4);
        v[0] = cr(1.0);
        v[3] = cr(1.0);
        let bell = DensityState::pure(&v, vec![2, 2]).unwrap();
        let w = random_pure(&mut rng(6), &[2]).tensor(&bell).unwrap();
        let kw = koashi_winter_residual(&w, &b).unwrap();
        assert!(kw.c_b.value.abs() < 1e-12 && kw.e_f.value.abs() < 1e-12 && kw.h_a.abs() < 1e-12);

        assert!(matches!(
            koashi_winter_residual(&random_density(&mut rng(7), &[2, 2, 2]), &b),
            Err(Error::NotPure { .. })
        ));
    }
}
