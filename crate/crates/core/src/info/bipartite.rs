use serde::Serialize;

use super::{relative_entropy, von_neumann_entropy, ExtendedReal};
use crate::error::{Error, Result};
use crate::operator::{tensor, TraceClassElement};

/// Agreement required between the primary CMI formula and each variant.
pub const CMI_VARIANT_TOL: f64 = 1e-8;
const CROSS_CHECK_TOL: f64 = 1e-9;

fn require_parts(w: &TraceClassElement, parts: usize) -> Result<()> {
    if w.factor_dims().len() != parts {
        return Err(Error::BadFactorization(format!(
            "expected {parts} factors, got {:?}",
            w.factor_dims()
        )));
    }
    Ok(())
}

/// `I(A:B) = H(ω_AB ‖ ω_A ⊗ ω_B)` scaled homogeneously on the cone.
pub fn mutual_information(w: &TraceClassElement) -> Result<ExtendedReal> {
    require_parts(w, 2)?;
    let t = w.trace();
    if t <= 0.0 {
        return Ok(ExtendedReal::ZERO);
    }
    let wn = w.scale(1.0 / t);
    let a = wn.partial_trace(&[0])?;
    let b = wn.partial_trace(&[1])?;
    let prod = tensor(&a, &b)?;
    Ok(t * relative_entropy(&wn, &prod)?)
}

/// `H(ω_A) + H(ω_B) − H(ω_AB)`; equals [`mutual_information`] in finite dims.
pub fn mutual_information_entropic(w: &TraceClassElement) -> Result<f64> {
    require_parts(w, 2)?;
    let ha = von_neumann_entropy(&w.partial_trace(&[0])?)?;
    let hb = von_neumann_entropy(&w.partial_trace(&[1])?)?;
    let hab = von_neumann_entropy(w)?;
    Ok((ha + hb - hab).max(0.0))
}

/// `H(A|B) = H(ω_AB) − H(ω_B)`, cross-checked against `H(ω_A) − I(A:B)`.
pub fn conditional_entropy(w: &TraceClassElement) -> Result<f64> {
    require_parts(w, 2)?;
    let ha = von_neumann_entropy(&w.partial_trace(&[0])?)?;
    let hb = von_neumann_entropy(&w.partial_trace(&[1])?)?;
    let hab = von_neumann_entropy(w)?;
    let ce = hab - hb;
    let alt = ha - mutual_information(w)?.unwrap();
    let scale = 1.0 + ha.abs() + hb.abs();
    if (ce - alt).abs() > CROSS_CHECK_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "conditional entropy {ce} vs H(A) - I(A:B) = {alt}"
        )));
    }
    if ce < -ha - CROSS_CHECK_TOL * scale || ce > ha + CROSS_CHECK_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "conditional entropy {ce} outside [-{ha}, {ha}]"
        )));
    }
    Ok(ce)
}

/// The four finite-dimensional expressions for `I(A:C|B)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CmiVariants {
    /// `H(AB) + H(BC) − H(ABC) − H(B)`
    pub entropic: f64,
    /// `I(A:BC) − I(A:B)`
    pub via_a: f64,
    /// `I(AB:C) − I(B:C)`
    pub via_c: f64,
    /// `I(A:C) − I(A:B) − I(B:C) + I(AC:B)`
    pub symmetric: f64,
}

impl CmiVariants {
    pub fn max_disagreement(&self) -> f64 {
        [self.via_a, self.via_c, self.symmetric]
            .iter()
            .map(|v| (v - self.entropic).abs())
            .fold(0.0, f64::max)
    }
}

fn mi(w: &TraceClassElement) -> Result<f64> {
    Ok(mutual_information(w)?.unwrap())
}

pub fn cmi_variants(w: &TraceClassElement) -> Result<CmiVariants> {
    require_parts(w, 3)?;
    let fd = w.factor_dims().to_vec();
    let (da, db, dc) = (fd[0], fd[1], fd[2]);
    let wab = w.partial_trace(&[0, 1])?;
    let wbc = w.partial_trace(&[1, 2])?;
    let wac = w.partial_trace(&[0, 2])?;
    let wb = w.partial_trace(&[1])?;
    let entropic = von_neumann_entropy(&wab)? + von_neumann_entropy(&wbc)?
        - von_neumann_entropy(w)?
        - von_neumann_entropy(&wb)?;

    let a_bc = w.with_factor_dims(vec![da, db * dc])?;
    let ab_c = w.with_factor_dims(vec![da * db, dc])?;
    let ac_b = w.permute_factors(&[0, 2, 1])?.with_factor_dims(vec![da * dc, db])?;
    let i_ab = mi(&wab)?;
    let i_bc = mi(&wbc)?;
    let i_ac = mi(&wac)?;
    Ok(CmiVariants {
        entropic,
        via_a: mi(&a_bc)? - i_ab,
        via_c: mi(&ab_c)? - i_bc,
        symmetric: i_ac - i_ab - i_bc + mi(&ac_b)?,
    })
}

/// `I(A:C|B)` for factors ordered `A, B, C`; all four forms must agree.
pub fn conditional_mutual_information(w: &TraceClassElement) -> Result<f64> {
    let v = cmi_variants(w)?;
    let scale = 1.0 + v.entropic.abs();
    if v.max_disagreement() > CMI_VARIANT_TOL * scale {
        return Err(Error::Inconsistent(format!("CMI variants disagree: {v:?}")));
    }
    Ok(v.entropic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, CVector};
    use crate::operator::DensityState;

    fn ghz() -> DensityState {
        let mut v = CVector::zeros(8);
        v[0] = cr(1.0);
        v[7] = cr(1.0);
        DensityState::pure(&v, vec![2, 2, 2]).unwrap()
    }

    fn bell() -> DensityState {
        let mut v = CVector::zeros(4);
        v[0] = cr(1.0);
        v[3] = cr(1.0);
        DensityState::pure(&v, vec![2, 2]).unwrap()
    }

    #[test]
    fn mi_examples() {
        let p = DensityState::diagonal_single(vec![0.6, 0.4])
            .unwrap()
            .tensor(&DensityState::diagonal_single(vec![0.1, 0.9]).unwrap())
            .unwrap();
        assert!(mutual_information(&p).unwrap().unwrap().abs() < 1e-14);
        let i = mutual_information(&bell()).unwrap().unwrap();
        assert!((i - 4f64.ln()).abs() < 1e-12);
        assert!(mutual_information(&ghz()).is_err());
    }

    #[test]
    fn mi_cone_scaling() {
        let w = bell().scale(0.5);
        let i = mutual_information(&w).unwrap().unwrap();
        assert!((i - 0.5 * 4f64.ln()).abs() < 1e-12);
        assert!((mutual_information_entropic(&w).unwrap() - i).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropy_examples() {
        assert!((conditional_entropy(&bell()).unwrap() + 2f64.ln()).abs() < 1e-12);
        let ra = DensityState::diagonal_single(vec![0.3, 0.7]).unwrap();
        let p = ra.tensor(&DensityState::maximally_mixed(3)).unwrap();
        let h = von_neumann_entropy(&ra).unwrap();
        assert!((conditional_entropy(&p).unwrap() - h).abs() < 1e-14);
        // joint-distribution oracle for a classical pair
        let joint = [0.1, 0.2, 0.3, 0.4];
        let w = DensityState::diagonal(joint.to_vec(), vec![2, 2]).unwrap();
        let pb = [0.4, 0.6];
        let oracle: f64 = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| -joint[2 * a + b] * (joint[2 * a + b] / pb[b]).ln())
            .sum();
        assert!((conditional_entropy(&w).unwrap() - oracle).abs() < 1e-14);
    }

    #[test]
    fn cmi_examples() {
        let prod = DensityState::diagonal_single(vec![0.2, 0.8])
            .unwrap()
            .tensor(&DensityState::maximally_mixed(2))
            .unwrap()
            .tensor(&DensityState::diagonal_single(vec![0.5, 0.3, 0.2]).unwrap())
            .unwrap();
        assert!(conditional_mutual_information(&prod).unwrap().abs() < 1e-12);
        // GHZ marginals: H(AB) = H(BC) = H(B) = log 2, H(ABC) = 0, so the
        // combination is log 2 + log 2 - 0 - log 2
        let v = conditional_mutual_information(&ghz()).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-12);
    }
}
