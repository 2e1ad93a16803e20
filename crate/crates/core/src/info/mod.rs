//! Entropy-like functionals of states and cone elements.
//!
//! Entropies use the homogeneous extension `Tr η(ρ) − η(Tr ρ)` with
//! `η(x) = −x log x`, natural logarithm throughout.

mod bipartite;
mod ensemble;
mod extended;

pub use bipartite::{
    cmi_variants, conditional_entropy, conditional_mutual_information, mutual_information,
    mutual_information_entropic, CmiVariants,
};
pub use ensemble::{holevo_quantity, Ensemble};
pub use extended::ExtendedReal;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::operator::{TraceClassElement, PSD_TOL, SUPPORT_CUTOFF};

/// Absolute leakage `Tr[(I − P_σ)ρ]` above which `H(ρ‖σ) = +∞`.
pub const SUPPORT_LEAK_TOL: f64 = 1e-10;

#[inline]
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

/// Homogeneous entropy of a nonnegative spectrum.
pub fn entropy_of_spectrum(spec: &[f64]) -> f64 {
    let mut s = 0.0;
    let mut t = 0.0;
    for &x in spec {
        if x > 0.0 {
            s += eta(x);
            t += x;
        }
    }
    (s - eta(t)).max(0.0)
}

fn check_spectrum(spec: &[f64]) -> Result<()> {
    let max = spec.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    if let Some(&min) = spec.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < -PSD_TOL * max.max(1.0) {
            return Err(Error::NotPositive { min_eig: min });
        }
    }
    Ok(())
}

/// `H(ρ) = Tr η(ρ) − η(Tr ρ)`; zero for the zero operator.
pub fn von_neumann_entropy(rho: &TraceClassElement) -> Result<f64> {
    let spec = rho.spectrum();
    check_spectrum(&spec)?;
    Ok(entropy_of_spectrum(&spec))
}

/// Shannon entropy `Σ η(p_k)` of a nonnegative vector.
pub fn shannon_entropy(p: &[f64]) -> ExtendedReal {
    ExtendedReal::Finite(p.iter().map(|&x| eta(x)).sum())
}

/// `{⟨u_k|ρ|u_k⟩}` for the columns `u_k` of `basis`.
pub fn pinching_distribution(rho: &TraceClassElement, basis: &CMatrix) -> Result<Vec<f64>> {
    if basis.nrows() != rho.dim() || basis.ncols() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "basis {}x{} for dimension {}",
            basis.nrows(),
            basis.ncols(),
            rho.dim()
        )));
    }
    let dev = linalg::isometry_defect(basis);
    if dev > 1e-10 {
        return Err(Error::NotUnitary { deviation: dev });
    }
    let r = rho.dense_ref();
    let m = basis.adjoint() * r.as_ref() * basis;
    Ok((0..rho.dim()).map(|k| m[(k, k)].re.max(0.0)).collect())
}

/// Classical relative entropy with the cone terms `Σ(q − p)`.
///
/// `q` holds stored diagonal weights, which are exact, so its support is
/// every strictly positive entry. No relative cutoff applies.
fn classical_relative_entropy(p: &[f64], q: &[f64]) -> ExtendedReal {
    let mut leak = 0.0;
    let mut s = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if b <= 0.0 {
            leak += a.max(0.0);
            continue;
        }
        if a > 0.0 {
            s += a * (a.ln() - b.ln());
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return ExtendedReal::PosInfinity;
    }
    let tp: f64 = p.iter().sum();
    let tq: f64 = q.iter().sum();
    ExtendedReal::Finite(s + tq - tp)
}

/// Relative entropy of cone elements, `+∞` on support violation.
///
/// Evaluated as `Tr ρ log ρ − Tr ρ log σ + Tr σ − Tr ρ` with `log σ` taken on
/// the support of σ.
pub fn relative_entropy(rho: &TraceClassElement, sigma: &TraceClassElement) -> Result<ExtendedReal> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    if let (Some(p), Some(q)) = (rho.diagonal_entries(), sigma.diagonal_entries()) {
        check_spectrum(p)?;
        check_spectrum(q)?;
        return Ok(classical_relative_entropy(p, q));
    }
    if let Some(q) = sigma.diagonal_entries() {
        // σ diagonal in the standard basis: exact support, no eigensolver
        check_spectrum(q)?;
        let r = rho.dense_ref();
        let mut leak = 0.0;
        let mut cross = 0.0;
        for (j, &mu) in q.iter().enumerate() {
            let rjj = r[(j, j)].re;
            if mu <= 0.0 {
                leak += rjj;
            } else {
                cross += rjj * mu.ln();
            }
        }
        if leak > SUPPORT_LEAK_TOL {
            return Ok(ExtendedReal::PosInfinity);
        }
        let spec_rho = rho.spectrum();
        check_spectrum(&spec_rho)?;
        let rlogr: f64 = spec_rho.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum();
        let tr_rho: f64 = spec_rho.iter().sum();
        let tr_sigma: f64 = q.iter().sum();
        return Ok(ExtendedReal::Finite(rlogr - cross + tr_sigma - tr_rho));
    }
    let sd_sigma = sigma.eig();
    check_spectrum(&sd_sigma.eigenvalues)?;
    let smax = sd_sigma.eigenvalues.first().copied().unwrap_or(0.0);
    let cut = SUPPORT_CUTOFF * smax;

    // ρ in the eigenbasis of σ
    let r = rho.dense_ref();
    let v = &sd_sigma.eigenvectors;
    let rs = v.adjoint() * r.as_ref() * v;
    let mut leak = 0.0;
    let mut cross = 0.0;
    for (j, &mu) in sd_sigma.eigenvalues.iter().enumerate() {
        let rjj = rs[(j, j)].re;
        if mu <= cut || mu <= 0.0 {
            leak += rjj;
        } else {
            cross += rjj * mu.ln();
        }
    }
    if leak > SUPPORT_LEAK_TOL {
        return Ok(ExtendedReal::PosInfinity);
    }
    let spec_rho = rho.spectrum();
    check_spectrum(&spec_rho)?;
    let rlogr: f64 = spec_rho.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum();
    let tr_rho: f64 = spec_rho.iter().sum();
    let tr_sigma: f64 = sd_sigma.eigenvalues.iter().sum();
    Ok(ExtendedReal::Finite(rlogr - cross + tr_sigma - tr_rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, cr, CVector};
    use crate::operator::DensityState;

    #[test]
    fn entropy_examples() {
        let h = von_neumann_entropy(&DensityState::maximally_mixed(2)).unwrap();
        assert!((h - 2f64.ln()).abs() < 1e-15);

        let mut v = CVector::zeros(3);
        v[0] = c(0.3, 0.1);
        v[2] = c(-0.2, 0.5);
        let pure = TraceClassElement::pure(&(&v / cr(v.norm())), vec![3]).unwrap().scale(0.3);
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);

        let q: f64 = 0.4;
        let n = 4;
        let mut p = vec![1.0 - q];
        p.extend(std::iter::repeat(q / n as f64).take(n));
        let oracle = -(0.6f64) * 0.6f64.ln() + 0.4 * (4.0f64 / 0.4).ln();
        let h = von_neumann_entropy(&DensityState::diagonal_single(p).unwrap()).unwrap();
        assert!((h - oracle).abs() < 1e-14);
    }

    #[test]
    fn cone_entropy_is_homogeneous() {
        let rho = DensityState::diagonal_single(vec![0.2, 0.3, 0.5]).unwrap();
        let h = von_neumann_entropy(&rho).unwrap();
        let h2 = von_neumann_entropy(&rho.scale(0.25)).unwrap();
        assert!((h2 - 0.25 * h).abs() < 1e-15);
        assert_eq!(von_neumann_entropy(&rho.scale(0.0)).unwrap(), 0.0);
    }

    #[test]
    fn relative_entropy_examples() {
        let r = DensityState::diagonal_single(vec![0.7, 0.3]).unwrap();
        assert!(relative_entropy(&r, &r).unwrap().unwrap().abs() < 1e-15);
        let s = DensityState::maximally_mixed(2);
        let oracle = 0.7 * 1.4f64.ln() + 0.3 * 0.6f64.ln();
        let d = relative_entropy(&r, &s).unwrap().unwrap();
        assert!((d - oracle).abs() < 1e-15);
        // same pair through the dense path
        let rd = TraceClassElement::from_matrix_single(r.to_dense()).unwrap();
        let sd = TraceClassElement::from_matrix_single(s.to_dense()).unwrap();
        assert!((relative_entropy(&rd, &sd).unwrap().unwrap() - oracle).abs() < 1e-14);

        let a = DensityState::basis(2, 0);
        let b = DensityState::basis(2, 1);
        assert_eq!(relative_entropy(&a, &b).unwrap(), ExtendedReal::PosInfinity);
        let bd = TraceClassElement::from_matrix_single(b.to_dense()).unwrap();
        assert_eq!(relative_entropy(&a, &bd).unwrap(), ExtendedReal::PosInfinity);
    }

    #[test]
    fn tiny_diagonal_weights_are_support() {
        // Gibbs-like σ whose smallest weight sits far below any relative cutoff
        let q = vec![1.0 - 2e-14, 1e-14, 1e-14];
        let p = [0.5f64, 0.3, 0.2];
        let oracle: f64 = p.iter().zip(&q).map(|(a, b)| a * (a / b).ln()).sum();
        let s = DensityState::diagonal_single(q.clone()).unwrap();
        let r = DensityState::diagonal_single(p.to_vec()).unwrap();
        let rd = TraceClassElement::from_matrix_single(r.to_dense()).unwrap();
        for x in [&*r, &rd] {
            let d = relative_entropy(x, &s).unwrap().unwrap();
            assert!((d - oracle).abs() < 1e-12 * oracle, "{d} vs {oracle}");
        }
        // an exact zero weight is still off support for a dense ρ
        let z = DensityState::diagonal_single(vec![0.5, 0.5, 0.0]).unwrap();
        assert_eq!(relative_entropy(&rd, &z).unwrap(), ExtendedReal::PosInfinity);
    }

    #[test]
    fn pinching_examples() {
        let mut v = CVector::zeros(2);
        v[0] = cr(1.0);
        v[1] = cr(1.0);
        let plus = DensityState::pure(&v, vec![2]).unwrap();
        let p = pinching_distribution(&plus, &CMatrix::identity(2, 2)).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert!((shannon_entropy(&p).unwrap() - 2f64.ln()).abs() < 1e-15);
        let bad = CMatrix::identity(2, 2) * cr(2.0);
        assert!(matches!(
            pinching_distribution(&plus, &bad),
            Err(Error::NotUnitary { .. })
        ));
    }
}
