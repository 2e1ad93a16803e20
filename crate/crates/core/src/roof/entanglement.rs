use serde::{Deserialize, Serialize};

use super::optimizer::{minimize_isometry, OptimizerBudget};
use super::{block_entropy, cone_entropy, hermitize, is_pure, BoundDirection, BoundedValue, Purifier};
use crate::error::{Error, Result};
use crate::info::{mutual_information, von_neumann_entropy};
use crate::linalg::CMatrix;
use crate::operator::{tensor, trace_distance, DensityState, TraceClassElement};

const PRODUCT_TOL: f64 = 1e-12;

fn bipartite_dims(w: &TraceClassElement) -> Result<(usize, usize)> {
    match w.factor_dims() {
        [a, b] => Ok((*a, *b)),
        fd => Err(Error::BadFactorization(format!("bipartite state expected, got {fd:?}"))),
    }
}

fn is_product(w: &TraceClassElement) -> Result<bool> {
    let a = w.partial_trace(&[0])?;
    let b = w.partial_trace(&[1])?;
    Ok(trace_distance(w, &tensor(&a, &b)?)? <= PRODUCT_TOL)
}

/// `Tr_B |ψ⟩⟨ψ|` for `ψ` stored as row `j` of `psi`.
fn reduced_a(psi: &CMatrix, j: usize, da: usize, db: usize) -> CMatrix {
    let m = CMatrix::from_fn(da, db, |a, b| psi[(j, a * db + b)]);
    &m * m.adjoint()
}

fn marginals(block: &CMatrix, da: usize, db: usize) -> (CMatrix, CMatrix) {
    let ra = CMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| block[(a * db + b, a2 * db + b)]).sum());
    let rb = CMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| block[(a * db + b, a * db + b2)]).sum());
    (ra, rb)
}

/// Members used when the caller does not specify: `min(r², 2r)`.
pub fn default_members(rank: usize) -> usize {
    (rank * rank).min(2 * rank).max(1)
}

/// Upper bound on `E_F(ω) = inf Σ π_i H(ω^i_A)` over pure-state ensembles of
/// size `m` (at least the rank of ω).
pub fn entanglement_of_formation(w: &DensityState, m: usize, budget: &OptimizerBudget) -> Result<BoundedValue> {
    let (da, db) = bipartite_dims(w)?;
    if is_pure(w) {
        return Ok(BoundedValue::exact(
            von_neumann_entropy(w.partial_trace(&[0])?.element())?,
            BoundDirection::UpperBound,
        ));
    }
    if is_product(w)? {
        return Ok(BoundedValue::exact(0.0, BoundDirection::UpperBound));
    }
    let p = Purifier::of(w);
    let m = m.max(p.rank);
    let s = minimize_isometry(m, p.rank, budget, |u| {
        let psi = p.vectors(u);
        (0..m).map(|j| cone_entropy(&reduced_a(&psi, j, da, db))).sum()
    });
    Ok(BoundedValue::from_search(s.value, BoundDirection::UpperBound, &s))
}

fn cone_mi(block: &CMatrix, da: usize, db: usize, psi: &CMatrix, start: usize, g: usize) -> f64 {
    let (ra, rb) = marginals(block, da, db);
    (cone_entropy(&ra) + cone_entropy(&rb) - block_entropy(psi, start, g)).max(0.0)
}

/// Upper bound on `inf Σ_{i≤k} π_i I(A:B)_{ω^i}` (the mixed convex roof of the
/// mutual information restricted to `k` members).
pub fn mixed_roof_mutual_information_k(
    w: &DensityState,
    k: usize,
    budget: &OptimizerBudget,
) -> Result<BoundedValue> {
    let (da, db) = bipartite_dims(w)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if is_product(w)? {
        return Ok(BoundedValue::exact(0.0, BoundDirection::UpperBound));
    }
    if k == 1 || is_pure(w) {
        // a pure state has no other decomposition; k = 1 leaves only ω itself
        return Ok(BoundedValue::exact(
            mutual_information(w)?.unwrap(),
            BoundDirection::UpperBound,
        ));
    }
    let p = Purifier::of(w);
    let g = p.rank;
    let s = minimize_isometry(k * g, p.rank, budget, |u| {
        let psi = p.vectors(u);
        (0..k)
            .map(|b| {
                let rows = psi.rows(b * g, g);
                let block = rows.transpose() * rows.conjugate();
                cone_mi(&block, da, db, &psi, b * g, g)
            })
            .sum()
    });
    Ok(BoundedValue::from_search(s.value, BoundDirection::UpperBound, &s))
}

/// Upper bound on `E_csq^k(ω) = ½ inf_{k members} Σ π_i I(A:B)_{ω^i}`.
pub fn csq_entanglement_k(w: &DensityState, k: usize, budget: &OptimizerBudget) -> Result<BoundedValue> {
    let v = mixed_roof_mutual_information_k(w, k, budget)?;
    Ok(BoundedValue {
        value: 0.5 * v.value,
        gap_estimate: 0.5 * v.gap_estimate,
        ..v
    })
}

/// `I(A:B|E)` of a state on `A ⊗ B ⊗ E`.
pub(crate) fn cmi_abe(w: &TraceClassElement) -> Result<f64> {
    let hae = von_neumann_entropy(&w.partial_trace(&[0, 2])?)?;
    let hbe = von_neumann_entropy(&w.partial_trace(&[1, 2])?)?;
    let he = von_neumann_entropy(&w.partial_trace(&[2])?)?;
    let habe = von_neumann_entropy(w)?;
    Ok(hae + hbe - habe - he)
}

/// Upper bound on `E_sq^k(ω) = ½ inf I(A:B|E)` over extensions with
/// `dim E = k`.
///
/// Extensions are `(Id_AB ⊗ Λ)(|ψ⟩⟨ψ|)` with ψ the canonical purification on
/// `A ⊗ B ⊗ R` and Λ : R → E given by a Stinespring isometry with `rank(ω)`
/// Kraus operators.
pub fn squashed_entanglement_k(w: &DensityState, k: usize, budget: &OptimizerBudget) -> Result<BoundedValue> {
    let (da, db) = bipartite_dims(w)?;
    if k == 0 {
        return Err(Error::InvalidArgument("extension dimension must be at least 1".into()));
    }
    if is_product(w)? {
        return Ok(BoundedValue::exact(0.0, BoundDirection::UpperBound));
    }
    if k == 1 {
        return Ok(BoundedValue::exact(
            0.5 * mutual_information(w)?.unwrap(),
            BoundDirection::UpperBound,
        ));
    }
    let p = Purifier::of(w);
    let r = p.rank;
    let f = r;
    let dab = da * db;
    let s = minimize_isometry(k * f, r, budget, |v| {
        // X[(ab, e), x] = Σ_i S[ab, i] V[(e f + x), i]
        let x = CMatrix::from_fn(dab * k, f, |row, xi| {
            let (ab, e) = (row / k, row % k);
            (0..r).map(|i| p.s[(ab, i)] * v[(e * f + xi, i)]).sum()
        });
        let rho = hermitize(&(&x * x.adjoint()));
        let el = TraceClassElement::dense_unchecked(rho, vec![da, db, k]);
        cmi_abe(&el).unwrap_or(f64::INFINITY)
    });
    let mut v = BoundedValue::from_search(0.5 * s.value, BoundDirection::UpperBound, &s);
    v.gap_estimate *= 0.5;
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizedMeasure {
    EntanglementOfFormation,
    CSquashed,
}

/// `½ E(ω ⊗ ω)` across the cut `A₁A₂ : B₁B₂`, for ω of dimension at most 2×2.
pub fn regularized_k2(
    measure: RegularizedMeasure,
    w: &DensityState,
    budget: &OptimizerBudget,
) -> Result<BoundedValue> {
    let (da, db) = bipartite_dims(w)?;
    if da * db > 4 {
        return Err(Error::DimensionOverflow { dim: da * db, cap: 4 });
    }
    let sq = w
        .tensor(w)?
        .permute_factors(&[0, 2, 1, 3])?
        .with_factor_dims(vec![da * da, db * db])?;
    let v = match measure {
        RegularizedMeasure::EntanglementOfFormation => {
            let r = sq.rank();
            entanglement_of_formation(&sq, default_members(r), budget)?
        }
        RegularizedMeasure::CSquashed => csq_entanglement_k(&sq, 2, budget)?,
    };
    Ok(BoundedValue {
        value: 0.5 * v.value,
        gap_estimate: 0.5 * v.gap_estimate,
        ..v
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

    fn bell() -> DensityState {
        let mut v = CVector::zeros(4);
        v[0] = cr(1.0);
        v[3] = cr(1.0);
        DensityState::pure(&v, vec![2, 2]).unwrap()
    }

    fn classical_mix() -> DensityState {
        DensityState::diagonal(vec![0.5, 0.0, 0.0, 0.5], vec![2, 2]).unwrap()
    }

    #[test]
    fn ef_anchors() {
        let b = quick();
        let ef = entanglement_of_formation(&bell(), 4, &b).unwrap();
        assert!((ef.value - 2f64.ln()).abs() < 1e-12);
        assert!(ef.is_exact() && ef.direction == BoundDirection::UpperBound);
        let pure = random_pure(&mut rng(1), &[2, 3]);
        let ha = von_neumann_entropy(&pure.partial_trace(&[0]).unwrap()).unwrap();
        assert!((entanglement_of_formation(&pure, 2, &b).unwrap().value - ha).abs() < 1e-12);
        let prod = random_density(&mut rng(2), &[2]).tensor(&random_density(&mut rng(3), &[2])).unwrap();
        assert_eq!(entanglement_of_formation(&prod, 4, &b).unwrap().value, 0.0);
    }

    #[test]
    fn ef_separable_mixture_reaches_zero() {
        let ef = entanglement_of_formation(&classical_mix(), 4, &quick()).unwrap();
        assert!(ef.value < 1e-4, "{ef:?}");
    }

    #[test]
    fn csq_examples() {
        let b = quick();
        let v = mixed_roof_mutual_information_k(&bell(), 1, &b).unwrap();
        assert!((v.value - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!((csq_entanglement_k(&bell(), 1, &b).unwrap().value - 2f64.ln()).abs() < 1e-12);
        let c = csq_entanglement_k(&classical_mix(), 2, &b).unwrap();
        assert!(c.value < 1e-4, "{c:?}");
        // k = 1 on the classical mixture is ½ I = ½ log 2
        let c1 = csq_entanglement_k(&classical_mix(), 1, &b).unwrap();
        assert!((c1.value - 0.5 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sq_examples() {
        let b = quick();
        let w = random_density(&mut rng(4), &[2, 2]);
        let i = mutual_information(&w).unwrap().unwrap();
        let s1 = squashed_entanglement_k(&w, 1, &b).unwrap();
        assert!((s1.value - 0.5 * i).abs() < 1e-12);
        // classical flag extension gives I(A:B|E) = 0
        let s2 = squashed_entanglement_k(&classical_mix(), 2, &b).unwrap();
        assert!(s2.value < 1e-4, "{s2:?}");
        let s2w = squashed_entanglement_k(&w, 2, &b).unwrap();
        assert!(s2w.value <= s1.value + 1e-9);
        let prod = random_density(&mut rng(5), &[2]).tensor(&random_density(&mut rng(6), &[3])).unwrap();
        assert_eq!(squashed_entanglement_k(&prod, 3, &b).unwrap().value, 0.0);
    }

    #[test]
    fn regularized_examples() {
        let b = quick();
        let v = regularized_k2(RegularizedMeasure::EntanglementOfFormation, &bell(), &b).unwrap();
        assert!((v.value - 2f64.ln()).abs() < 1e-12);
        let prod = random_density(&mut rng(7), &[2]).tensor(&random_density(&mut rng(8), &[2])).unwrap();
        for m in [RegularizedMeasure::EntanglementOfFormation, RegularizedMeasure::CSquashed] {
            assert_eq!(regularized_k2(m, &prod, &b).unwrap().value, 0.0);
        }
        let big = random_density(&mut rng(9), &[2, 3]);
        assert!(matches!(
            regularized_k2(RegularizedMeasure::CSquashed, &big, &b),
            Err(Error::DimensionOverflow { .. })
        ));
    }
}
