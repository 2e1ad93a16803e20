//! Built-in converging sequences with declared limits.
//!
//! Growing-dimension families are diagonal or structured so that the
//! diagonal grid up to `2¹⁶` stays cheap. Fixed-dimension ramps approach
//! their limit at rate `n⁻²`, so that on the ramp grid every finite-n
//! deviation is far below the fixed-dimension tolerance.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::channels::{make_pseudo_diagonal, spanning_probes, ChannelSequence, QuantumOperation};
use crate::energy::{sharp_sequence, Hamiltonian};
use crate::error::{Error, Result};
use crate::linalg::{c, cr, CMatrix, CVector};
use crate::operator::DensityState;
use crate::random::{random_density, random_pure, rng};

use super::estimate::StateSequence;
use super::lift::lift_by_purification;
use super::sample::{Correlated, Sample};
use super::{dense_grid, diagonal_grid, ramp_grid};

/// Truncation used for log-law Hamiltonians; far beyond any grid.
pub const LOG_LAW_TRUNCATION: usize = 1 << 24;

const FAMILY_SEED: u64 = 0x5eed_f00d;

pub fn log_hamiltonian(a: f64) -> Result<Hamiltonian> {
    Hamiltonian::log_law(a, 0.0, LOG_LAW_TRUNCATION)
}

fn state(s: DensityState) -> Sample {
    Sample::State(s)
}

fn pure_zero() -> DensityState {
    DensityState::basis(1, 0)
}

fn sharp_probs(a: f64, energy: f64, n: usize) -> Result<Vec<f64>> {
    let h = log_hamiltonian(a)?;
    Ok(sharp_sequence(&h, energy, n)?
        .diagonal_entries()
        .expect("sharp states are diagonal")
        .to_vec())
}

/// `(1 − q_n)|0⟩⟨0| + (q_n/n)Σ_{k=1}^n |k⟩⟨k|` for `E_k = a·log(k+1)`.
pub fn sharp(a: f64, energy: f64, grid: Vec<usize>) -> Result<StateSequence> {
    let h = log_hamiltonian(a)?;
    sharp_probs(a, energy, grid[0])?;
    Ok(StateSequence::new(
        format!("sharp(a={a},E={energy})"),
        move |n| Ok(state(sharp_sequence(&h, energy, n)?)),
        state(pure_zero()),
        grid,
    )?
    .with_tag("dimension", "n+1")
    .with_tag("limit", "|0><0|"))
}

/// `(1 − t)·diag(.5,.3,.2) ⊕ t·uniform(n)` with `t = 1/(2 log n)`; the
/// entropy loss is exactly `t log n = 1/2` in the limit.
pub fn classical_tail(grid: Vec<usize>) -> Result<StateSequence> {
    let base = [0.5, 0.3, 0.2];
    StateSequence::new(
        "classical_tail",
        move |n| {
            if n < 2 {
                return Err(Error::InvalidArgument("classical_tail needs n >= 2".into()));
            }
            let t = 0.5 / (n as f64).ln();
            let mut p: Vec<f64> = base.iter().map(|x| (1.0 - t) * x).collect();
            p.extend(std::iter::repeat(t / n as f64).take(n));
            Ok(state(DensityState::diagonal_single(p)?))
        },
        state(DensityState::diagonal_single(base.to_vec())?),
        grid,
    )
}

/// `ρ_n = ε_n σ + (1 − ε_n)|0⟩⟨0|` on `C³` with a fixed dense `σ`.
pub fn mix_to_pure(grid: Vec<usize>) -> Result<StateSequence> {
    let sigma = random_density(&mut rng(FAMILY_SEED), &[3]);
    let zero = DensityState::basis(3, 0);
    let z = zero.clone();
    Ok(StateSequence::new(
        "mix_to_pure",
        move |n| Ok(state(z.mix(&sigma, ramp(n))?)),
        state(zero),
        grid,
    )?
    .with_tag("rate", "n^-2"))
}

/// `ρ_n = (1 − 1/n)ρ_0 + σ/n` on `C³`.
pub fn fixed_mix(grid: Vec<usize>) -> Result<StateSequence> {
    let rho0 = random_density(&mut rng(FAMILY_SEED + 1), &[3]);
    let sigma = random_density(&mut rng(FAMILY_SEED + 2), &[3]);
    let r = rho0.clone();
    Ok(StateSequence::new(
        "fixed_mix",
        move |n| Ok(state(r.mix(&sigma, 1.0 / n as f64)?)),
        state(rho0),
        grid,
    )?
    .with_tag("rate", "n^-1"))
}

/// Purification of the sharp sequence in Schmidt form.
pub fn lifted_sharp(grid: Vec<usize>) -> Result<StateSequence> {
    let w0 = Sample::Correlated(Correlated::new(vec![1.0], 2, true)?);
    let mut s = lift_by_purification(&sharp(1.0, 1.0, grid)?, &w0)?;
    s.name = "lifted_sharp".into();
    Ok(s)
}

fn correlated(name: &str, parties: usize, coherent: bool, grid: Vec<usize>) -> Result<StateSequence> {
    StateSequence::new(
        name,
        move |n| Ok(Sample::Correlated(Correlated::new(sharp_probs(1.0, 1.0, n)?, parties, coherent)?)),
        Sample::Correlated(Correlated::new(vec![1.0], parties, coherent)?),
        grid,
    )
}

/// `Σ_k p_k |kk⟩⟨kk|` with the sharp distribution.
pub fn correlated_sharp(grid: Vec<usize>) -> Result<StateSequence> {
    correlated("correlated_sharp", 2, false, grid)
}

/// `Σ_k √p_k |kkk⟩` with the sharp distribution.
pub fn ghz_sharp(grid: Vec<usize>) -> Result<StateSequence> {
    correlated("ghz_sharp", 3, true, grid)
}

/// `ρ_n ⊗ diag(.7, .3)`.
pub fn product_sharp(grid: Vec<usize>) -> Result<StateSequence> {
    let b = [0.7, 0.3];
    StateSequence::new(
        "product_sharp",
        move |n| {
            let p = sharp_probs(1.0, 1.0, n)?;
            let w: Vec<f64> = p.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
            Ok(state(DensityState::diagonal(w, vec![n + 1, 2])?))
        },
        state(DensityState::diagonal(b.to_vec(), vec![1, 2])?),
        grid,
    )
}

/// A = k drawn from the sharp distribution, B an independent fair bit,
/// C = [k > 0]; parties ordered A, B, C.
pub fn classical_cmi(grid: Vec<usize>) -> Result<StateSequence> {
    let build = |p: &[f64]| -> Result<DensityState> {
        let d = p.len();
        let mut w = vec![0.0; d * 4];
        for (k, &pk) in p.iter().enumerate() {
            let cbit = usize::from(k > 0);
            for b in 0..2 {
                w[k * 4 + b * 2 + cbit] = 0.5 * pk;
            }
        }
        DensityState::diagonal(w, vec![d, 2, 2])
    };
    StateSequence::new(
        "classical_cmi",
        move |n| Ok(state(build(&sharp_probs(1.0, 1.0, n)?)?)),
        state(build(&[1.0])?),
        grid,
    )
}

fn coherent_block_state(theta: f64, tail: &[f64]) -> Result<DensityState> {
    let d = 2 + tail.len();
    let (cs, sn) = (theta.cos(), theta.sin());
    let mut m = CMatrix::zeros(d, d);
    m[(0, 0)] = cr(0.5 * cs * cs);
    m[(0, 1)] = cr(0.5 * cs * sn);
    m[(1, 0)] = cr(0.5 * cs * sn);
    m[(1, 1)] = cr(0.5 * sn * sn);
    for (k, &p) in tail.iter().enumerate() {
        m[(2 + k, 2 + k)] = cr(0.5 * p);
    }
    DensityState::from_matrix(m, vec![d])
}

/// `½|ψ_θ⟩⟨ψ_θ| ⊕ ½ρ_n` with `ψ_θ = cos θ|0⟩ + sin θ|1⟩`, `θ_n = π/8 + 1/n`
/// on levels {0, 1} and the sharp state on the levels above; not diagonal.
pub fn coherent_block(grid: Vec<usize>) -> Result<StateSequence> {
    StateSequence::new(
        "coherent_block",
        |n| Ok(state(coherent_block_state(PI / 8.0 + 1.0 / n as f64, &sharp_probs(1.0, 1.0, n)?)?)),
        state(coherent_block_state(PI / 8.0, &[1.0])?),
        grid,
    )
}

pub(crate) fn ramp(n: usize) -> f64 {
    let n = n as f64;
    1.0 / (n * n)
}

fn bell() -> DensityState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = CVector::from_vec(vec![cr(s), cr(0.0), cr(0.0), cr(s)]);
    DensityState::pure(&v, vec![2, 2]).expect("unit vector")
}

/// `(1 − ε_n)Φ⁺ + ε_n I/4`.
pub fn bell_ramp(grid: Vec<usize>) -> Result<StateSequence> {
    let mixed = DensityState::maximally_mixed(4).with_factor_dims(vec![2, 2])?;
    Ok(StateSequence::new(
        "bell_ramp",
        move |n| Ok(state(bell().mix(&mixed, ramp(n))?)),
        state(bell()),
        grid,
    )?
    .with_tag("rate", "n^-2"))
}

/// `(1 − ε_n)ω_0 + ε_n I/4` with `ω_0 = ½Φ⁺ + ½|01⟩⟨01|`.
pub fn mixed_pair_ramp(grid: Vec<usize>) -> Result<StateSequence> {
    let w0 = bell().mix(&DensityState::basis(4, 1).with_factor_dims(vec![2, 2])?, 0.5)?;
    let mixed = DensityState::maximally_mixed(4).with_factor_dims(vec![2, 2])?;
    let w = w0.clone();
    Ok(StateSequence::new(
        "mixed_pair_ramp",
        move |n| Ok(state(w.mix(&mixed, ramp(n))?)),
        state(w0),
        grid,
    )?
    .with_tag("rate", "n^-2"))
}

fn channel_sample(op: QuantumOperation, input: DensityState) -> Sample {
    Sample::ChannelInput {
        channel: Arc::new(op),
        input,
    }
}

/// Identity channel on `n + 1` levels fed the sharp state.
pub fn identity_sharp(grid: Vec<usize>) -> Result<StateSequence> {
    let h = log_hamiltonian(1.0)?;
    StateSequence::new(
        "identity_sharp",
        move |n| Ok(channel_sample(QuantumOperation::identity(n + 1), sharp_sequence(&h, 1.0, n)?)),
        channel_sample(QuantumOperation::identity(1), pure_zero()),
        grid,
    )
}

fn pair_swap(d: usize) -> Vec<usize> {
    (0..d).map(|k| k ^ 1).collect()
}

fn even_sharp(n: usize) -> Result<DensityState> {
    let h = log_hamiltonian(1.0)?;
    let s = sharp_sequence(&h, 1.0, n)?;
    s.embed((n + 1).next_multiple_of(2))
}

/// The unitary `|2j⟩ ↔ |2j+1⟩` fed the sharp state.
pub fn pairswap_sharp(grid: Vec<usize>) -> Result<StateSequence> {
    StateSequence::new(
        "pairswap_sharp",
        |n| {
            let rho = even_sharp(n)?;
            Ok(channel_sample(QuantumOperation::permutation(pair_swap(rho.dim()))?, rho))
        },
        channel_sample(QuantumOperation::permutation(vec![1, 0])?, DensityState::basis(2, 0)),
        grid,
    )
}

/// `(1 − p)ρ + p PρP†` with the pair swap `P`, Choi rank 2. On inputs
/// diagonal in the computational basis `Tr ρP = 0`, so the exchange entropy
/// is exactly `h₂(p)` along the whole sequence.
pub fn swapmix_sharp(p: f64, grid: Vec<usize>) -> Result<StateSequence> {
    StateSequence::new(
        format!("swapmix_sharp(p={p})"),
        move |n| {
            let rho = even_sharp(n)?;
            Ok(channel_sample(QuantumOperation::permutation_mix(pair_swap(rho.dim()), p)?, rho))
        },
        channel_sample(QuantumOperation::permutation_mix(vec![1, 0], p)?, DensityState::basis(2, 0)),
        grid,
    )
}

fn depolarizing_input() -> DensityState {
    random_pure(&mut rng(FAMILY_SEED + 3), &[3])
}

/// `Φ_n = depolarizing(3, 0.3 + ε_n)` with input `(1 − ε_n)|ψ⟩⟨ψ| + ε_n I/3`.
pub fn depolarizing_ramp(grid: Vec<usize>) -> Result<StateSequence> {
    let psi = depolarizing_input();
    let mixed = DensityState::maximally_mixed(3);
    let p0 = psi.clone();
    Ok(StateSequence::new(
        "depolarizing_ramp",
        move |n| {
            let e = ramp(n);
            Ok(channel_sample(QuantumOperation::depolarizing(3, 0.3 + e)?, p0.mix(&mixed, e)?))
        },
        channel_sample(QuantumOperation::depolarizing(3, 0.3)?, psi),
        grid,
    )?
    .with_tag("rate", "n^-2"))
}

/// The channel part of [`depolarizing_ramp`] with spanning probes.
pub fn depolarizing_channels() -> Result<ChannelSequence> {
    Ok(ChannelSequence::new(
        "depolarizing(3, 0.3 + n^-2)",
        |n| QuantumOperation::depolarizing(3, 0.3 + ramp(n)),
        QuantumOperation::depolarizing(3, 0.3)?,
        spanning_probes(3),
    ))
}

fn pseudo_diagonal_channel() -> Result<QuantumOperation> {
    // basis measurement on C³ with pure qubit preparations
    let povm: Vec<CMatrix> = (0..3)
        .map(|k| {
            let mut m = CMatrix::zeros(3, 3);
            m[(k, k)] = cr(1.0);
            m
        })
        .collect();
    let preps: Vec<DensityState> = (0..3)
        .map(|k| {
            let t = k as f64 * PI / 3.0;
            let v = CVector::from_vec(vec![cr(t.cos()), c(0.0, t.sin())]);
            DensityState::pure(&v, vec![2])
        })
        .collect::<Result<_>>()?;
    make_pseudo_diagonal(&povm, &preps)
}

/// A fixed pseudo-diagonal channel with a dense input ramp.
pub fn pseudo_diagonal_ramp(grid: Vec<usize>) -> Result<StateSequence> {
    let phi = Arc::new(pseudo_diagonal_channel()?);
    let rho0 = random_density(&mut rng(FAMILY_SEED + 4), &[3]);
    let sigma = random_pure(&mut rng(FAMILY_SEED + 5), &[3]);
    let (f, r) = (phi.clone(), rho0.clone());
    Ok(StateSequence::new(
        "pseudo_diagonal_ramp",
        move |n| {
            Ok(Sample::ChannelInput {
                channel: f.clone(),
                input: r.mix(&sigma, ramp(n))?,
            })
        },
        Sample::ChannelInput {
            channel: phi,
            input: rho0,
        },
        grid,
    )?
    .with_tag("rate", "n^-2"))
}

/// `Σ_i A_i ⊗ |i⟩⟨i|` as a diagonal cq operator on `[d, blocks]`.
fn cq_diagonal(blocks: &[Vec<f64>]) -> Result<DensityState> {
    let d = blocks.iter().map(Vec::len).max().unwrap_or(1);
    let m = blocks.len();
    let mut w = vec![0.0; d * m];
    for (i, b) in blocks.iter().enumerate() {
        for (a, &x) in b.iter().enumerate() {
            w[a * m + i] = x;
        }
    }
    DensityState::diagonal(w, vec![d, m])
}

/// `p` placed on the levels `2k + offset`, scaled by `weight`.
fn interleaved(p: &[f64], offset: usize, weight: f64) -> Vec<f64> {
    let mut v = vec![0.0; 2 * p.len()];
    for (k, &x) in p.iter().enumerate() {
        v[2 * k + offset] = weight * x;
    }
    v
}

/// `½ρ_n ⊗|0⟩⟨0| + ½ρ'_n ⊗|1⟩⟨1|` with the sharp state on even levels and
/// its copy on odd levels: orthogonal members, constant weights.
pub fn ensemble_orthogonal(grid: Vec<usize>) -> Result<StateSequence> {
    let build = |p: &[f64]| cq_diagonal(&[interleaved(p, 0, 0.5), interleaved(p, 1, 0.5)]);
    StateSequence::new(
        "ensemble_orthogonal",
        move |n| Ok(state(build(&sharp_probs(1.0, 1.0, n)?)?)),
        state(build(&[1.0])?),
        grid,
    )
}

/// `½ρ_n ⊗|0⟩⟨0| + ½|1⟩⟨1| ⊗|1⟩⟨1|`: the members overlap on level 1.
pub fn ensemble_overlap(grid: Vec<usize>) -> Result<StateSequence> {
    let build = |p: &[f64]| {
        let a: Vec<f64> = p.iter().map(|x| 0.5 * x).collect();
        let mut b = vec![0.0; p.len().max(2)];
        b[1] = 0.5;
        cq_diagonal(&[a, b])
    };
    StateSequence::new(
        "ensemble_overlap",
        move |n| Ok(state(build(&sharp_probs(1.0, 1.0, n)?)?)),
        state(build(&[1.0])?),
        grid,
    )
}

/// Orthogonal members with weights `½ ± 1/n`: the sharp state on even
/// levels and `|1⟩`.
pub fn ensemble_varying(grid: Vec<usize>) -> Result<StateSequence> {
    let build = |p: &[f64], w: f64| {
        let mut b = vec![0.0; 2 * p.len()];
        b[1] = 1.0 - w;
        cq_diagonal(&[interleaved(p, 0, w), b])
    };
    StateSequence::new(
        "ensemble_varying",
        move |n| Ok(state(build(&sharp_probs(1.0, 1.0, n)?, 0.5 + 1.0 / n as f64)?)),
        state(build(&[1.0], 0.5)?),
        grid,
    )
}

/// Two summands on disjoint levels: `½` the sharp state for `a = 1` on even
/// levels and `½` the sharp state for `a = 2` on odd levels.
pub fn sum_orthogonal(grid: Vec<usize>) -> Result<StateSequence> {
    let build = |p: &[f64], q: &[f64]| cq_diagonal(&[interleaved(p, 0, 0.5), interleaved(q, 1, 0.5)]);
    StateSequence::new(
        "sum_orthogonal",
        move |n| Ok(state(build(&sharp_probs(1.0, 1.0, n)?, &sharp_probs(2.0, 1.0, n)?)?)),
        state(build(&[1.0], &[1.0])?),
        grid,
    )
}

/// `½ρ_n ⊗ |0⟩⟨0| + ½σ_n ⊗ |1⟩⟨1|` with `ρ_n` sharp and `σ_n` spreading
/// the same tail weight over `2n` levels, so `ρ_n ≻ σ_n`.
pub fn majorized_pair(grid: Vec<usize>) -> Result<StateSequence> {
    let build = |p: &[f64]| {
        let n = p.len() - 1;
        let a: Vec<f64> = p.iter().map(|x| 0.5 * x).collect();
        let mut b = vec![0.5 * p[0]];
        if n > 0 {
            let q = 1.0 - p[0];
            b.extend(std::iter::repeat(0.5 * q / (2 * n) as f64).take(2 * n));
        }
        cq_diagonal(&[a, b])
    };
    StateSequence::new(
        "majorized_pair",
        move |n| Ok(state(build(&sharp_probs(1.0, 1.0, n)?)?)),
        state(build(&[1.0])?),
        grid,
    )
}

/// Registry entry for a built-in family.
#[derive(Clone, Copy)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub description: &'static str,
    pub build: fn() -> Result<StateSequence>,
}

impl std::fmt::Debug for FamilyInfo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FamilyInfo").field("name", &self.name).finish()
    }
}

macro_rules! fam {
    ($name:expr, $kind:expr, $desc:expr, $build:expr) => {
        FamilyInfo {
            name: $name,
            kind: $kind,
            description: $desc,
            build: $build,
        }
    };
}

pub fn builtin_families() -> Vec<FamilyInfo> {
    vec![
        fam!("sharp", "state", "sharp energy sequence, E_k = log(k+1), E = 1", || sharp(1.0, 1.0, diagonal_grid())),
        fam!("sharp_half", "state", "sharp energy sequence, E_k = 2 log(k+1), E = 1", || sharp(2.0, 1.0, diagonal_grid())),
        fam!("classical_tail", "state", "fixed distribution plus a uniform tail of weight 1/(2 log n)", || classical_tail(diagonal_grid())),
        fam!("mix_to_pure", "state", "dense qutrit state mixed into |0> with weight n^-2", || mix_to_pure(ramp_grid())),
        fam!("fixed_mix", "state", "(1 - 1/n) rho_0 + sigma/n on a qutrit", || fixed_mix(ramp_grid())),
        fam!("lifted_sharp", "state", "Schmidt-form purification of the sharp sequence", || lifted_sharp(diagonal_grid())),
        fam!("correlated_sharp", "state", "classically correlated copy of the sharp distribution", || correlated_sharp(diagonal_grid())),
        fam!("product_sharp", "state", "sharp state tensored with diag(.7, .3)", || product_sharp(diagonal_grid())),
        fam!("ghz_sharp", "state", "three-party coherent copy of the sharp distribution", || ghz_sharp(diagonal_grid())),
        fam!("classical_cmi", "state", "A = k, B an independent bit, C = [k > 0]", || classical_cmi(diagonal_grid())),
        fam!("coherent_block", "state", "rotating coherent qubit block beside the sharp tail", || coherent_block(dense_grid())),
        fam!("bell_ramp", "state", "Bell state with white noise of weight n^-2", || bell_ramp(ramp_grid())),
        fam!("mixed_pair_ramp", "state", "rank-2 two-qubit state with white noise of weight n^-2", || mixed_pair_ramp(ramp_grid())),
        fam!("ensemble_orthogonal", "ensemble", "sharp copies on even and odd levels, weights 1/2", || ensemble_orthogonal(diagonal_grid())),
        fam!("ensemble_overlap", "ensemble", "sharp state and |1>, weights 1/2", || ensemble_overlap(diagonal_grid())),
        fam!("ensemble_varying", "ensemble", "orthogonal pair with weights 1/2 +- 1/n", || ensemble_varying(diagonal_grid())),
        fam!("sum_orthogonal", "ensemble", "halves of the a = 1 and a = 2 sharp states on disjoint levels", || sum_orthogonal(diagonal_grid())),
        fam!("majorized_pair", "pair", "sharp state and its two-fold spread", || majorized_pair(diagonal_grid())),
        fam!("identity_sharp", "channel", "identity channel on the sharp sequence", || identity_sharp(diagonal_grid())),
        fam!("pairswap_sharp", "channel", "pair-swap unitary on the sharp sequence", || pairswap_sharp(diagonal_grid())),
        fam!("swapmix_sharp", "channel", "pair swap applied with probability 1/4", || swapmix_sharp(0.25, diagonal_grid())),
        fam!("depolarizing_ramp", "channel", "qutrit depolarizing ramp with a near-pure input ramp", || depolarizing_ramp(ramp_grid())),
        fam!("pseudo_diagonal_ramp", "channel", "fixed pseudo-diagonal qutrit channel, dense input ramp", || pseudo_diagonal_ramp(ramp_grid())),
    ]
}

pub fn family(name: &str) -> Result<StateSequence> {
    builtin_families()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown family `{name}`")))
        .and_then(|f| (f.build)())
}
