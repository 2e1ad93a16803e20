use serde::Serialize;

use super::optimizer::{minimize_isometry, OptimizerBudget};
use super::{cone_entropy, hermitize, is_pure, BoundDirection, BoundedValue, Purifier};
use crate::channels::QuantumOperation;
use crate::error::{Error, Result};
use crate::info::{relative_entropy, von_neumann_entropy};
use crate::linalg::{cr, CMatrix};
use crate::operator::{DensityState, TraceClassElement};

const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConvexClosureEstimate {
    /// Upper bound on the convex closure of the output entropy at ρ.
    pub closure: BoundedValue,
    /// Lower bound on the constrained Holevo capacity at ρ.
    pub holevo: BoundedValue,
    pub output_entropy: f64,
    /// `|χ + Σπ H(Φ(ρ_i)) − H(Φ(ρ))|` on the optimizing ensemble.
    pub identity_residual: f64,
}

/// `Φ(ρ̃)` for `ρ̃ = Σ_{j∈J} ψ̃_j ψ̃_j†`, as the factor `A` with `Φ(ρ̃) = AA†`.
fn output_factor(kraus: &[CMatrix], rows: &CMatrix) -> CMatrix {
    let g = rows.nrows();
    let d_out = kraus[0].nrows();
    let cols = rows.transpose();
    let mut a = CMatrix::zeros(d_out, kraus.len() * g);
    for (e, k) in kraus.iter().enumerate() {
        let kc = k * &cols;
        a.columns_mut(e * g, g).copy_from(&kc);
    }
    a
}

fn factor_entropy(a: &CMatrix) -> f64 {
    if a.nrows() <= a.ncols() {
        cone_entropy(&(a * a.adjoint()))
    } else {
        cone_entropy(&(a.adjoint() * a))
    }
}

/// Best found `Σ π_i H(Φ(ρ_i))` over ensembles of at most `m` members averaging
/// to ρ, together with the constrained Holevo capacity `H(Φ(ρ)) − that`.
pub fn convex_closure_output_entropy(
    phi: &QuantumOperation,
    rho: &DensityState,
    m: usize,
    budget: &OptimizerBudget,
) -> Result<ConvexClosureEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("ensemble size must be at least 1".into()));
    }
    if rho.dim() != phi.d_in() {
        return Err(Error::DimensionMismatch(format!(
            "operation on dimension {}, state of dimension {}",
            phi.d_in(),
            rho.dim()
        )));
    }
    let out = phi.apply(rho)?;
    let h_out = von_neumann_entropy(&out)?;
    if m == 1 || is_pure(rho) {
        return Ok(ConvexClosureEstimate {
            closure: BoundedValue::exact(h_out, BoundDirection::UpperBound),
            holevo: BoundedValue::exact(0.0, BoundDirection::LowerBound),
            output_entropy: h_out,
            identity_residual: 0.0,
        });
    }
    let kraus = phi.kraus()?;
    let p = Purifier::of(rho);
    let g = p.rank.div_ceil(m);
    let s = minimize_isometry(m * g, p.rank, budget, |w| {
        let psi = p.vectors(w);
        (0..m)
            .map(|b| factor_entropy(&output_factor(&kraus, &psi.rows(b * g, g).into_owned())))
            .sum()
    });

    // identity check on the optimizing ensemble
    let mut chi = 0.0;
    let mut mean = 0.0;
    for block in p.blocks(&s.point, g) {
        let w = block.trace().re;
        if w <= 0.0 {
            continue;
        }
        let member = TraceClassElement::dense_unchecked(hermitize(&(block * cr(1.0 / w))), vec![rho.dim()]);
        let o = phi.apply(&member)?;
        chi += w * relative_entropy(&o, &out)?.to_f64();
        mean += w * von_neumann_entropy(&o)?;
    }
    let residual = (chi + mean - h_out).abs();
    if residual > IDENTITY_TOL * (1.0 + h_out) || (mean - s.value).abs() > IDENTITY_TOL * (1.0 + h_out) {
        return Err(Error::Inconsistent(format!(
            "χ = {chi}, mean output entropy {mean} (search {}) against H(Φ(ρ)) = {h_out}",
            s.value
        )));
    }
    let closure = BoundedValue::from_search(s.value, BoundDirection::UpperBound, &s);
    Ok(ConvexClosureEstimate {
        closure,
        holevo: BoundedValue {
            value: h_out - s.value,
            direction: BoundDirection::LowerBound,
            ..closure
        },
        output_entropy: h_out,
        identity_residual: residual,
    })
}

/// Lower bound on `C̄(Φ, ρ) = sup Σ π_i H(Φ(ρ_i)‖Φ(ρ))` over `m`-member ensembles.
pub fn constrained_holevo(
    phi: &QuantumOperation,
    rho: &DensityState,
    m: usize,
    budget: &OptimizerBudget,
) -> Result<BoundedValue> {
    Ok(convex_closure_output_entropy(phi, rho, m, budget)?.holevo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, rng};
    use crate::roof::entanglement_of_formation;

    fn quick() -> OptimizerBudget {
        OptimizerBudget {
            restarts: 6,
            iterations: 1000,
            ..Default::default()
        }
    }

    #[test]
    fn identity_channel() {
        let b = quick();
        let mm = DensityState::maximally_mixed(2);
        let est = convex_closure_output_entropy(&QuantumOperation::identity(2), &mm, 2, &b).unwrap();
        assert!(est.closure.value < 1e-4, "{est:?}");
        assert!((est.holevo.value - 2f64.ln()).abs() < 1e-4);
        assert!(est.identity_residual < 1e-9);
        let one = constrained_holevo(&QuantumOperation::identity(2), &mm, 1, &b).unwrap();
        assert_eq!(one.value, 0.0);
    }

    #[test]
    fn depolarizing_is_flat() {
        let r = random_density(&mut rng(1), &[2]);
        let dep = QuantumOperation::depolarizing(2, 1.0).unwrap();
        let est = convex_closure_output_entropy(&dep, &r, 3, &quick()).unwrap();
        assert!((est.closure.value - 2f64.ln()).abs() < 1e-12);
        assert!(est.holevo.value.abs() < 1e-12);
    }

    #[test]
    fn partial_trace_gives_ef() {
        let b = quick();
        let w = crate::random::random_density_rank(&mut rng(2), &[2, 2], 2);
        let tr = QuantumOperation::partial_trace(2, 2, true).unwrap();
        let cc = convex_closure_output_entropy(&tr, &w, 4, &b).unwrap();
        let ef = entanglement_of_formation(&w, 4, &b).unwrap();
        assert!((cc.closure.value - ef.value).abs() < 1e-3, "{} vs {}", cc.closure.value, ef.value);
    }
}
