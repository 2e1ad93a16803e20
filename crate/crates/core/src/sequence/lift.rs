use crate::error::{Error, Result};
use crate::linalg::{cr, CMatrix, CVector};
use crate::operator::{DensityState, TraceClassElement};

use super::estimate::StateSequence;
use super::sample::{is_pure_state, Correlated, Sample};

/// Total dimension `d_A · d_K` allowed for dense lifted states.
pub const LIFT_DENSE_CAP: usize = 1024;

const MARGINAL_TOL: f64 = 1e-10;

/// Pure states `ω_n` on `A ⊗ K` with `Tr_K ω_n = ρ_n` converging to `ω_0`.
///
/// Diagonal sequences with a coherent correlated `ω_0` lift to the Schmidt
/// form `Σ √p_k |kk⟩` without forming matrices. Otherwise `ω_0 = vec(√ρ_0 W)`
/// for a unitary `W` read off its SVD, and `ω_n = vec(√ρ_n (W ⊕ I))`.
pub fn lift_by_purification(seq: &StateSequence, omega0: &Sample) -> Result<StateSequence> {
    let limit = match &seq.limit {
        Sample::State(s) if s.factor_dims().len() == 1 => s.clone(),
        _ => {
            return Err(Error::IncompatiblePurification(
                "the sequence must consist of single-factor states".into(),
            ))
        }
    };
    let name = format!("lift({})", seq.name);
    match omega0 {
        Sample::Correlated(c) if c.is_coherent() && c.parties() == 2 => {
            let p0 = limit.diagonal_entries().ok_or_else(|| {
                Error::IncompatiblePurification("Schmidt-form lift needs a diagonal limit".into())
            })?;
            let len = p0.len().max(c.probs().len());
            let pad = |v: &[f64]| {
                let mut v = v.to_vec();
                v.resize(len, 0.0);
                v
            };
            let dev = pad(p0)
                .iter()
                .zip(pad(c.probs()))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dev > MARGINAL_TOL {
                return Err(Error::IncompatiblePurification(format!(
                    "marginal of the purification differs from the limit by {dev:.3e}"
                )));
            }
            let g = seq.generator();
            let lifted = StateSequence::new(
                name,
                move |n| {
                    let s = g(n)?.state()?;
                    let p = s.diagonal_entries().ok_or_else(|| {
                        Error::IncompatiblePurification(format!("state at n = {n} is not diagonal"))
                    })?;
                    Ok(Sample::Correlated(Correlated::new(p.to_vec(), 2, true)?))
                },
                omega0.clone(),
                seq.n_grid.clone(),
            )?;
            Ok(with_tags(lifted, seq))
        }
        Sample::State(w) => dense_lift(seq, &limit, w, name),
        _ => Err(Error::IncompatiblePurification(
            "the purification must be a pure bipartite state".into(),
        )),
    }
}

fn with_tags(mut out: StateSequence, seq: &StateSequence) -> StateSequence {
    out.tags = seq.tags.clone();
    out.tags.insert("lifted".into(), "purification".into());
    out
}

/// Amplitude matrix `M[a, k] = ⟨a k|ψ⟩` of a rank-one state.
fn amplitudes(w: &TraceClassElement, da: usize, dk: usize) -> CMatrix {
    let m = w.to_dense();
    // rank one: the column with the largest diagonal entry is ψ·conj(ψ_j)
    let j = (0..m.nrows())
        .max_by(|&a, &b| m[(a, a)].re.total_cmp(&m[(b, b)].re))
        .unwrap_or(0);
    let scale = m[(j, j)].re.sqrt();
    CMatrix::from_fn(da, dk, |a, k| m[(a * dk + k, j)] / cr(scale))
}

fn sqrt_state(s: &DensityState) -> CMatrix {
    match s.diagonal_entries() {
        Some(p) => crate::linalg::real_diag(&p.iter().map(|x| x.max(0.0).sqrt()).collect::<Vec<_>>()),
        None => s.eig().map(|x| x.max(0.0).sqrt()),
    }
}

fn dense_lift(
    seq: &StateSequence,
    limit: &DensityState,
    w: &DensityState,
    name: String,
) -> Result<StateSequence> {
    let (da0, dk0) = match w.factor_dims() {
        [a, k] => (*a, *k),
        fd => {
            return Err(Error::IncompatiblePurification(format!(
                "purification must be bipartite, got {fd:?}"
            )))
        }
    };
    if !is_pure_state(w) {
        return Err(Error::NotPure { purity: super::sample::purity(w) });
    }
    if limit.dim() > da0 {
        return Err(Error::IncompatiblePurification(format!(
            "limit dimension {} exceeds the purified factor {da0}",
            limit.dim()
        )));
    }
    let d0 = da0.max(dk0);
    let m0 = {
        let m = amplitudes(w, da0, dk0);
        let mut sq = CMatrix::zeros(d0, d0);
        sq.view_mut((0, 0), (da0, dk0)).copy_from(&m);
        sq
    };
    let marg = w.partial_trace(&[0])?.embed_factors(&[d0])?;
    let dev = (marg.to_dense() - limit.embed(d0)?.to_dense()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > MARGINAL_TOL {
        return Err(Error::IncompatiblePurification(format!(
            "marginal of the purification differs from the limit by {dev:.3e}"
        )));
    }
    // M₀ = U Σ V†, √ρ₀ = U Σ U†, so M₀ = √ρ₀ · U V†
    let svd = m0.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Inconsistent("SVD without U".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::Inconsistent("SVD without V".into()))?;
    let wmat = u * v_t;
    let g = seq.generator();
    let build = move |rho: &DensityState| -> Result<Sample> {
        let d = rho.dim().max(d0);
        if d * d > LIFT_DENSE_CAP {
            return Err(Error::DimensionOverflow { dim: d * d, cap: LIFT_DENSE_CAP });
        }
        let rho = rho.embed(d)?;
        let mut wd = CMatrix::identity(d, d);
        wd.view_mut((0, 0), (d0, d0)).copy_from(&wmat);
        let m = sqrt_state(&rho) * wd;
        let psi = CVector::from_fn(d * d, |i, _| m[(i / d, i % d)]);
        let el = TraceClassElement::pure(&psi, vec![d, d])?;
        Ok(Sample::State(DensityState::normalized(&el)?))
    };
    let limit_lift = build(limit)?;
    if let (Sample::State(a), true) = (&limit_lift, d0 * d0 <= LIFT_DENSE_CAP) {
        let target = w.embed_factors(&[d0, d0])?;
        let err = (a.to_dense() - target.to_dense()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if err > 1e-8 {
            return Err(Error::Inconsistent(format!("lift of the limit misses ω₀ by {err:.3e}")));
        }
    }
    let lifted = StateSequence::new(
        name,
        move |n| build(&g(n)?.state()?),
        Sample::State(w.embed_factors(&[d0, d0])?),
        seq.n_grid.clone(),
    )?;
    Ok(with_tags(lifted, seq))
}
