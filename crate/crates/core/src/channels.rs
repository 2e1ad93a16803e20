//! Quantum operations in Kraus form, their dilations and complementary
//! operations, and channel information quantities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{mutual_information, von_neumann_entropy};
use crate::linalg::{self, c, cr, CMatrix, CVector};
use crate::operator::{trace_distance, DensityState, TraceClassElement, DENSE_DIM_CAP, SUPPORT_CUTOFF};

/// Slack on `ΣK†K ≤ I` and on trace preservation.
pub const CHANNEL_TOL: f64 = 1e-10;
const IDENTITY_CHECK_TOL: f64 = 1e-8;
/// Entries below this are dropped when building Kraus operators.
const KRAUS_ZERO: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Kraus(Vec<CMatrix>),
    Identity,
    /// `|k⟩ ↦ |perm[k]⟩`
    Permutation(Vec<usize>),
    /// `(1 − p)ρ + p PρP†` with the permutation unitary `P|k⟩ = |perm[k]⟩`.
    PermutationMix(Vec<usize>, f64),
}

/// Completely positive trace non-increasing map `d_in → d_out`.
///
/// Identity, permutation and shift-mix maps are kept structured so they act
/// on diagonal states of large dimension without dense storage.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumOperation {
    d_in: usize,
    d_out: usize,
    repr: Repr,
    trace_preserving: bool,
}

fn kraus_defect(kraus: &[CMatrix], d_in: usize) -> Result<(f64, f64)> {
    let mut s = CMatrix::zeros(d_in, d_in);
    for k in kraus {
        s += k.adjoint() * k;
    }
    let ev = linalg::eigvalsh(&s)?;
    // (max eigenvalue − 1, max |eig − 1|)
    let top = ev.first().copied().unwrap_or(0.0) - 1.0;
    let dev = ev.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
    Ok((top, dev))
}

impl QuantumOperation {
    pub fn from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (d_out, d_in) = first.shape();
        if kraus.iter().any(|k| k.shape() != (d_out, d_in)) {
            return Err(Error::DimensionMismatch("Kraus operators differ in shape".into()));
        }
        let (top, dev) = kraus_defect(&kraus, d_in)?;
        if top > CHANNEL_TOL {
            return Err(Error::TraceIncreasing { excess: top });
        }
        Ok(Self {
            d_in,
            d_out,
            repr: Repr::Kraus(kraus),
            trace_preserving: dev <= CHANNEL_TOL,
        })
    }

    /// Like [`Self::from_kraus`] but requires `ΣK†K = I`.
    pub fn channel_from_kraus(kraus: Vec<CMatrix>) -> Result<Self> {
        let op = Self::from_kraus(kraus)?;
        if !op.trace_preserving {
            let (_, dev) = kraus_defect(op.kraus_ref().unwrap(), op.d_in)?;
            return Err(Error::NotAChannel { deviation: dev });
        }
        Ok(op)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            repr: Repr::Identity,
            trace_preserving: true,
        }
    }

    pub fn unitary(u: &CMatrix) -> Result<Self> {
        let dev = linalg::isometry_defect(u);
        if u.nrows() != u.ncols() || dev > CHANNEL_TOL {
            return Err(Error::NotUnitary { deviation: dev });
        }
        Self::from_kraus(vec![u.clone()])
    }

    /// Permutation unitary `|k⟩ ↦ |perm[k]⟩`.
    pub fn permutation(perm: Vec<usize>) -> Result<Self> {
        Self::check_permutation(&perm)?;
        let d = perm.len();
        Ok(Self {
            d_in: d,
            d_out: d,
            repr: Repr::Permutation(perm),
            trace_preserving: true,
        })
    }

    fn check_permutation(perm: &[usize]) -> Result<()> {
        let d = perm.len();
        let mut seen = vec![false; d];
        for &p in perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        Ok(())
    }

    /// Reversal `|k⟩ ↦ |d−1−k⟩`.
    pub fn reversal(d: usize) -> Self {
        Self::permutation((0..d).rev().collect()).expect("reversal is a permutation")
    }

    /// `(1 − p)ρ + p SρS†` with the cyclic shift `S|k⟩ = |k+1 mod d⟩`.
    pub fn shift_mix(d: usize, p: f64) -> Result<Self> {
        Self::permutation_mix((0..d).map(|k| (k + 1) % d).collect(), p)
    }

    /// `(1 − p)ρ + p PρP†`, Choi rank 2 for `0 < p < 1` and `P ≠ I`.
    pub fn permutation_mix(perm: Vec<usize>, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("mixing weight {p}")));
        }
        Self::check_permutation(&perm)?;
        Ok(Self {
            d_in: perm.len(),
            d_out: perm.len(),
            repr: Repr::PermutationMix(perm, p),
            trace_preserving: true,
        })
    }

    /// `ρ ↦ (1 − p)ρ + p Tr(ρ) I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("depolarizing parameter {p}")));
        }
        let mut kraus = Vec::with_capacity(d * d + 1);
        if p < 1.0 {
            kraus.push(CMatrix::identity(d, d) * cr((1.0 - p).sqrt()));
        }
        if p > 0.0 {
            let w = (p / d as f64).sqrt();
            for i in 0..d {
                for j in 0..d {
                    let mut k = CMatrix::zeros(d, d);
                    k[(i, j)] = cr(w);
                    kraus.push(k);
                }
            }
        }
        Self::from_kraus(kraus)
    }

    /// Off-diagonal entries scaled by `1 − p`.
    pub fn dephasing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("dephasing parameter {p}")));
        }
        // ρ ↦ G ∘ ρ with G = (1 − p)J + pI; a Gram factor G = BB† gives
        // Kraus operators diag(B[:, e])
        let g = CMatrix::from_fn(d, d, |i, j| cr(if i == j { 1.0 } else { 1.0 - p }));
        let sd = linalg::eig_hermitian(&g)?;
        let mut kraus = Vec::new();
        for (e, &lam) in sd.eigenvalues.iter().enumerate() {
            if lam <= KRAUS_ZERO {
                continue;
            }
            let s = lam.sqrt();
            let mut k = CMatrix::zeros(d, d);
            for i in 0..d {
                k[(i, i)] = sd.eigenvectors[(i, e)] * cr(s);
            }
            kraus.push(k);
        }
        Self::from_kraus(kraus)
    }

    /// `Tr_B : AB → A` (`keep_first`) or `Tr_A : AB → B`.
    pub fn partial_trace(da: usize, db: usize, keep_first: bool) -> Result<Self> {
        let mut kraus = Vec::new();
        if keep_first {
            for j in 0..db {
                kraus.push(CMatrix::from_fn(da, da * db, |a, col| {
                    cr(if col == a * db + j { 1.0 } else { 0.0 })
                }));
            }
        } else {
            for i in 0..da {
                kraus.push(CMatrix::from_fn(db, da * db, |b, col| {
                    cr(if col == i * db + b { 1.0 } else { 0.0 })
                }));
            }
        }
        Self::from_kraus(kraus)
    }

    /// Entanglement-breaking `ρ ↦ Σ_i Tr(M_i ρ) σ_i`.
    pub fn measure_prepare(povm: &[CMatrix], preps: &[DensityState]) -> Result<Self> {
        if povm.is_empty() || povm.len() != preps.len() {
            return Err(Error::InvalidPOVM(format!(
                "{} effects for {} preparations",
                povm.len(),
                preps.len()
            )));
        }
        let d_in = povm[0].nrows();
        let d_out = preps[0].dim();
        let mut total = CMatrix::zeros(d_in, d_in);
        let mut kraus = Vec::new();
        for (m, s) in povm.iter().zip(preps) {
            if m.shape() != (d_in, d_in) || s.dim() != d_out {
                return Err(Error::InvalidPOVM("inconsistent dimensions".into()));
            }
            let sdm = linalg::eig_hermitian(m).map_err(|e| Error::InvalidPOVM(e.to_string()))?;
            if sdm.eigenvalues.iter().any(|&x| x < -CHANNEL_TOL) {
                return Err(Error::InvalidPOVM("effect is not positive".into()));
            }
            total += m;
            let sds = s.eig();
            for (l, &ml) in sdm.eigenvalues.iter().enumerate() {
                if ml <= KRAUS_ZERO {
                    continue;
                }
                let mv: CVector = sdm.eigenvectors.column(l) * cr(ml.sqrt());
                for (j, &sj) in sds.eigenvalues.iter().enumerate() {
                    if sj <= KRAUS_ZERO {
                        continue;
                    }
                    let sv: CVector = sds.eigenvectors.column(j) * cr(sj.sqrt());
                    kraus.push(&sv * mv.adjoint());
                }
            }
        }
        let dev = linalg::max_abs(&(total - CMatrix::identity(d_in, d_in)));
        if dev > CHANNEL_TOL {
            return Err(Error::InvalidPOVM(format!("effects sum to I within {dev:.3e}")));
        }
        Self::channel_from_kraus(kraus)
    }

    /// Computational-basis measurement followed by basis repreparation.
    pub fn basis_measure_prepare(d: usize) -> Result<Self> {
        let povm: Vec<CMatrix> = (0..d)
            .map(|k| {
                let mut m = CMatrix::zeros(d, d);
                m[(k, k)] = cr(1.0);
                m
            })
            .collect();
        let preps: Vec<DensityState> = (0..d).map(|k| DensityState::basis(d, k)).collect();
        Self::measure_prepare(&povm, &preps)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    fn kraus_ref(&self) -> Option<&[CMatrix]> {
        match &self.repr {
            Repr::Kraus(k) => Some(k),
            _ => None,
        }
    }

    /// Kraus operators, materialized for structured maps.
    pub fn kraus(&self) -> Result<Vec<CMatrix>> {
        let d = self.d_in;
        if !matches!(self.repr, Repr::Kraus(_)) && d > DENSE_DIM_CAP {
            return Err(Error::DimensionOverflow { dim: d, cap: DENSE_DIM_CAP });
        }
        Ok(match &self.repr {
            Repr::Kraus(k) => k.clone(),
            Repr::Identity => vec![CMatrix::identity(d, d)],
            Repr::Permutation(p) => vec![perm_matrix(p)],
            Repr::PermutationMix(perm, p) => {
                let mut out = Vec::new();
                if *p < 1.0 {
                    out.push(CMatrix::identity(d, d) * cr((1.0 - p).sqrt()));
                }
                if *p > 0.0 {
                    out.push(perm_matrix(perm) * cr(p.sqrt()));
                }
                out
            }
        })
    }

    /// Number of Kraus operators, i.e. the dilation's environment dimension.
    pub fn env_dim(&self) -> usize {
        match &self.repr {
            Repr::Kraus(k) => k.len(),
            Repr::Identity | Repr::Permutation(_) => 1,
            Repr::PermutationMix(_, p) => {
                if *p > 0.0 && *p < 1.0 {
                    2
                } else {
                    1
                }
            }
        }
    }

    fn check_input(&self, rho: &TraceClassElement) -> Result<()> {
        if rho.dim() != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "operation on dimension {}, input of dimension {}",
                self.d_in,
                rho.dim()
            )));
        }
        Ok(())
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &TraceClassElement) -> Result<TraceClassElement> {
        self.check_input(rho)?;
        let d = self.d_in;
        match &self.repr {
            Repr::Identity => rho.with_factor_dims(vec![d]),
            Repr::Permutation(perm) => {
                if let Some(p) = rho.diagonal_entries() {
                    let mut q = vec![0.0; d];
                    for (k, &x) in p.iter().enumerate() {
                        q[perm[k]] = x;
                    }
                    return TraceClassElement::diagonal(q, vec![d]);
                }
                let r = rho.dense_ref();
                let mut out = CMatrix::zeros(d, d);
                for i in 0..d {
                    for j in 0..d {
                        out[(perm[i], perm[j])] = r[(i, j)];
                    }
                }
                Ok(TraceClassElement::dense_unchecked(out, vec![d]))
            }
            Repr::PermutationMix(perm, p) => {
                let inv = inverse_permutation(perm);
                if let Some(x) = rho.diagonal_entries() {
                    let q = (0..d).map(|k| (1.0 - p) * x[k] + p * x[inv[k]]).collect();
                    return TraceClassElement::diagonal(q, vec![d]);
                }
                let r = rho.dense_ref();
                let out = CMatrix::from_fn(d, d, |i, j| {
                    r[(i, j)] * cr(1.0 - p) + r[(inv[i], inv[j])] * cr(*p)
                });
                Ok(TraceClassElement::dense_unchecked(out, vec![d]))
            }
            Repr::Kraus(kraus) => {
                let r = rho.dense_ref();
                let mut out = CMatrix::zeros(self.d_out, self.d_out);
                for k in kraus {
                    out += k * r.as_ref() * k.adjoint();
                }
                Ok(TraceClassElement::dense_unchecked(hermitize(out), vec![self.d_out]))
            }
        }
    }

    /// `(Φ ⊗ Id_R)(ω)` for ω on `A ⊗ R` with `dim A = d_in`.
    pub fn apply_to_first(&self, w: &TraceClassElement) -> Result<TraceClassElement> {
        let fd = w.factor_dims();
        if fd.len() != 2 || fd[0] != self.d_in {
            return Err(Error::BadFactorization(format!(
                "expected [{}, _], got {fd:?}",
                self.d_in
            )));
        }
        let dr = fd[1];
        if let Repr::Identity = self.repr {
            return Ok(w.clone());
        }
        let dim = self.d_out * dr;
        if dim > DENSE_DIM_CAP {
            return Err(Error::DimensionOverflow { dim, cap: DENSE_DIM_CAP });
        }
        let r = w.dense_ref();
        let id = CMatrix::identity(dr, dr);
        let mut out = CMatrix::zeros(dim, dim);
        for k in self.kraus()? {
            let big = linalg::kron(&k, &id);
            out += &big * r.as_ref() * big.adjoint();
        }
        Ok(TraceClassElement::dense_unchecked(hermitize(out), vec![self.d_out, dr]))
    }

    pub fn stinespring(&self) -> Result<StinespringDilation> {
        let kraus = self.kraus()?;
        let e = kraus.len();
        let v = CMatrix::from_fn(self.d_out * e, self.d_in, |row, a| {
            kraus[row % e][(row / e, a)]
        });
        Ok(StinespringDilation {
            isometry: v,
            d_out: self.d_out,
            env_dim: e,
        })
    }

    /// `ρ ↦ Tr_B VρV†` with Kraus operators `L_b[e, a] = K_e[b, a]`.
    pub fn complementary(&self) -> Result<QuantumOperation> {
        let kraus = self.kraus()?;
        let e = kraus.len();
        let comp: Vec<CMatrix> = (0..self.d_out)
            .map(|b| CMatrix::from_fn(e, self.d_in, |ei, a| kraus[ei][(b, a)]))
            .collect();
        let mut op = Self::from_kraus(comp)?;
        op.trace_preserving = self.trace_preserving;
        Ok(op)
    }

    /// `Φ̂(ρ)` evaluated as `[Tr K_e ρ K_f†]_{ef}` without building Φ̂.
    pub fn complementary_apply(&self, rho: &TraceClassElement) -> Result<TraceClassElement> {
        self.check_input(rho)?;
        let d = self.d_in;
        match &self.repr {
            Repr::Identity | Repr::Permutation(_) => {
                TraceClassElement::diagonal(vec![rho.trace()], vec![1])
            }
            Repr::PermutationMix(perm, p) => {
                if self.env_dim() == 1 {
                    return TraceClassElement::diagonal(vec![rho.trace()], vec![1]);
                }
                let t = rho.trace();
                // Tr(ρ P†) = Σ_k ρ_{k, perm⁻¹[k]}
                let inv = inverse_permutation(perm);
                let cross: num_complex::Complex64 = match rho.diagonal_entries() {
                    Some(x) => cr((0..d).filter(|&k| inv[k] == k).map(|k| x[k]).sum()),
                    None => (0..d).map(|k| rho.entry(k, inv[k])).sum(),
                };
                let s = (p * (1.0 - p)).sqrt();
                let m = CMatrix::from_row_slice(
                    2,
                    2,
                    &[cr((1.0 - p) * t), cross * cr(s), cross.conj() * cr(s), cr(p * t)],
                );
                Ok(TraceClassElement::dense_unchecked(hermitize(m), vec![2]))
            }
            Repr::Kraus(kraus) => {
                let r = rho.dense_ref();
                let e = kraus.len();
                let kr: Vec<CMatrix> = kraus.iter().map(|k| k * r.as_ref()).collect();
                let m = CMatrix::from_fn(e, e, |i, j| {
                    // Tr K_i ρ K_j† = Σ_{b,a} (K_i ρ)[b,a] conj(K_j[b,a])
                    kr[i].iter().zip(kraus[j].iter()).map(|(x, y)| x * y.conj()).sum()
                });
                Ok(TraceClassElement::dense_unchecked(hermitize(m), vec![e]))
            }
        }
    }

    /// Composition `self ∘ first`.
    pub fn compose(&self, first: &QuantumOperation) -> Result<QuantumOperation> {
        if first.d_out != self.d_in {
            return Err(Error::DimensionMismatch(format!(
                "{} → {} then {} → {}",
                first.d_in, first.d_out, self.d_in, self.d_out
            )));
        }
        let mut kraus = Vec::new();
        for a in self.kraus()? {
            for b in first.kraus()? {
                kraus.push(&a * &b);
            }
        }
        Self::from_kraus(kraus)
    }

    /// Rank of the Choi matrix, computed from the Gram matrix of the Kraus set.
    pub fn choi_rank(&self) -> Result<usize> {
        match &self.repr {
            Repr::Kraus(kraus) => {
                let e = kraus.len();
                let g = CMatrix::from_fn(e, e, |i, j| {
                    kraus[i].iter().zip(kraus[j].iter()).map(|(x, y)| x.conj() * y).sum()
                });
                let ev = linalg::eigvalsh(&hermitize(g))?;
                let top = ev.first().copied().unwrap_or(0.0);
                Ok(ev.iter().filter(|&&x| x > SUPPORT_CUTOFF * top.max(1.0)).count())
            }
            _ => Ok(self.env_dim()),
        }
    }

    /// The Choi matrix `Σ_{ij} Φ(|i⟩⟨j|) ⊗ |i⟩⟨j|` on output ⊗ input.
    pub fn choi_matrix(&self) -> Result<CMatrix> {
        let kraus = self.kraus()?;
        let (dout, din) = (self.d_out, self.d_in);
        let mut out = CMatrix::zeros(dout * din, dout * din);
        for k in &kraus {
            let v = CVector::from_fn(dout * din, |row, _| k[(row / din, row % din)]);
            out += &v * v.adjoint();
        }
        Ok(out)
    }
}

fn hermitize(m: CMatrix) -> CMatrix {
    let a = m.adjoint();
    (m + a) * cr(0.5)
}

fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

fn perm_matrix(perm: &[usize]) -> CMatrix {
    let d = perm.len();
    let mut m = CMatrix::zeros(d, d);
    for (k, &p) in perm.iter().enumerate() {
        m[(p, k)] = cr(1.0);
    }
    m
}

/// `V : A → B ⊗ E` with row index `b·env_dim + e`.
#[derive(Debug, Clone)]
pub struct StinespringDilation {
    pub isometry: CMatrix,
    pub d_out: usize,
    pub env_dim: usize,
}

impl StinespringDilation {
    /// `VρV†` on `B ⊗ E`.
    pub fn dilate(&self, rho: &TraceClassElement) -> Result<TraceClassElement> {
        if rho.dim() != self.isometry.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "dilation on dimension {}, input {}",
                self.isometry.ncols(),
                rho.dim()
            )));
        }
        let r = rho.dense_ref();
        let out = &self.isometry * r.as_ref() * self.isometry.adjoint();
        Ok(TraceClassElement::dense_unchecked(hermitize(out), vec![self.d_out, self.env_dim]))
    }

    pub fn isometry_defect(&self) -> f64 {
        linalg::isometry_defect(&self.isometry)
    }
}

fn require_channel(phi: &QuantumOperation) -> Result<()> {
    if !phi.is_trace_preserving() {
        let dev = match phi.kraus_ref() {
            Some(k) => kraus_defect(k, phi.d_in)?.1,
            None => 0.0,
        };
        return Err(Error::NotAChannel { deviation: dev });
    }
    Ok(())
}

/// `H_Φ(ρ) = H(Φ(ρ))`, homogeneous when `Tr Φ(ρ) < 1`.
pub fn output_entropy(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    von_neumann_entropy(&phi.apply(rho)?)
}

/// `H(Φ̂(ρ))`.
pub fn complementary_output_entropy(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    von_neumann_entropy(&phi.complementary_apply(rho)?)
}

/// `|H_Φ(ρ) + H_Φ̂(ρ) − H(ρ) − I(B:E)_{VρV†}|`.
pub fn ext2_residual(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    require_channel(phi)?;
    let w = phi.stinespring()?.dilate(rho)?;
    let ibe = mutual_information(&w)?.unwrap();
    let lhs = output_entropy(phi, rho)? + complementary_output_entropy(phi, rho)?;
    Ok((lhs - von_neumann_entropy(rho)? - ibe).abs())
}

/// Purification `Σ √λ_i v_i ⊗ w_i` on `A ⊗ R` with `w_i = U e_i`.
fn purification_vector(rho: &TraceClassElement, u: Option<&CMatrix>) -> CVector {
    let d = rho.dim();
    let sd = rho.eig();
    let mut psi = CVector::zeros(d * d);
    for (i, &lam) in sd.eigenvalues.iter().enumerate() {
        if lam <= 0.0 {
            continue;
        }
        let s = lam.sqrt();
        for a in 0..d {
            let va = sd.eigenvectors[(a, i)];
            if va.norm() == 0.0 {
                continue;
            }
            for r in 0..d {
                let wr = match u {
                    Some(u) => u[(r, i)],
                    None => cr(if r == i { 1.0 } else { 0.0 }),
                };
                psi[a * d + r] += va * wr * cr(s);
            }
        }
    }
    psi
}

fn channel_mi_with(phi: &QuantumOperation, rho: &TraceClassElement, u: Option<&CMatrix>) -> Result<f64> {
    let d = rho.dim();
    let psi = purification_vector(rho, u);
    let w = TraceClassElement::pure(&psi, vec![d, d])?;
    Ok(mutual_information(&phi.apply_to_first(&w)?)?.unwrap())
}

/// Largest purified-output dimension for which `I(Φ,ρ)` is evaluated from
/// the definition; each evaluation diagonalizes several matrices of this size.
pub const DEFINITION_CHECK_DIM: usize = 256;

/// `I(Φ,ρ) = H(ρ) + H_Φ(ρ) − H_Φ̂(ρ)`; needs no purification.
pub fn channel_mutual_information_entropic(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    require_channel(phi)?;
    Ok(von_neumann_entropy(rho)? + output_entropy(phi, rho)? - complementary_output_entropy(phi, rho)?)
}

/// `I(Φ,ρ) = H(Φ⊗Id(ρ̂) ‖ Φ(ρ) ⊗ ϱ)` from the definition, checked against a
/// second purification and against the entropic identity.
///
/// Falls back to the entropic form when the purified output would exceed
/// [`DEFINITION_CHECK_DIM`].
pub fn channel_mutual_information(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    require_channel(phi)?;
    phi.check_input(rho)?;
    let d = rho.dim();
    if d * phi.d_out().max(d) > DEFINITION_CHECK_DIM {
        return channel_mutual_information_entropic(phi, rho);
    }
    let v1 = channel_mi_with(phi, rho, None)?;
    // a fixed non-trivial unitary on the purifying system
    let u = CMatrix::from_fn(d, d, |r, i| {
        let th = std::f64::consts::PI * ((r * i) as f64 + 0.5 * r as f64) / d as f64;
        c(th.cos(), th.sin()) * cr(1.0 / (d as f64).sqrt())
    });
    let u = linalg::qr_orthonormalize(&u);
    let v2 = channel_mi_with(phi, rho, Some(&u))?;
    let v3 = channel_mutual_information_entropic(phi, rho)?;
    let scale = 1.0 + v1.abs();
    if (v1 - v2).abs() > IDENTITY_CHECK_TOL * scale || (v1 - v3).abs() > IDENTITY_CHECK_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "channel mutual information {v1} vs {v2} (second purification) vs {v3} (entropic)"
        )));
    }
    Ok(v1)
}

/// `I_c(Φ,ρ) = I(Φ,ρ) − H(ρ)`, cross-checked against `H(Φ(ρ)) − H(Φ̂(ρ))`
/// and range-checked in `[−H(ρ), H(ρ)]`.
pub fn coherent_information(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    let h = von_neumann_entropy(rho)?;
    let ic = channel_mutual_information(phi, rho)? - h;
    let alt = output_entropy(phi, rho)? - complementary_output_entropy(phi, rho)?;
    let scale = 1.0 + h;
    if (ic - alt).abs() > IDENTITY_CHECK_TOL * scale {
        return Err(Error::Inconsistent(format!(
            "coherent information {ic} vs H(Φ(ρ)) − H(Φ̂(ρ)) = {alt}"
        )));
    }
    if ic < -h - IDENTITY_CHECK_TOL * scale || ic > h + IDENTITY_CHECK_TOL * scale {
        return Err(Error::Inconsistent(format!("coherent information {ic} outside ±{h}")));
    }
    Ok(ic)
}

/// Entropy gain `H(Φ(ρ)) − H(ρ)`.
pub fn entropy_gain(phi: &QuantumOperation, rho: &TraceClassElement) -> Result<f64> {
    Ok(output_entropy(phi, rho)? - von_neumann_entropy(rho)?)
}

/// The complementary of a measure-and-prepare channel.
pub fn make_pseudo_diagonal(povm: &[CMatrix], preps: &[DensityState]) -> Result<QuantumOperation> {
    QuantumOperation::measure_prepare(povm, preps)?.complementary()
}

/// `d²` pure states whose projectors span all `d × d` matrices.
pub fn spanning_probes(d: usize) -> Vec<DensityState> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        out.push(DensityState::basis(d, k));
    }
    for k in 0..d {
        for l in (k + 1)..d {
            for phase in [cr(1.0), c(0.0, 1.0)] {
                let mut v = CVector::zeros(d);
                v[k] = cr(1.0);
                v[l] = phase;
                out.push(DensityState::pure(&v, vec![d]).expect("nonzero vector"));
            }
        }
    }
    out
}

type OperationGenerator = Box<dyn Fn(usize) -> Result<QuantumOperation> + Send + Sync>;

/// `n ↦ Φ_n` with a declared limit and probe set.
pub struct ChannelSequence {
    pub name: String,
    generator: OperationGenerator,
    pub limit: QuantumOperation,
    pub probes: Vec<DensityState>,
}

/// Probe distances along a grid.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceCheck {
    pub grid: Vec<usize>,
    pub distances: Vec<f64>,
    /// Distances are nonincreasing from the first grid point `≥ n0` on.
    pub nonincreasing_after_n0: bool,
}

impl ChannelSequence {
    pub fn new(
        name: impl Into<String>,
        generator: impl Fn(usize) -> Result<QuantumOperation> + Send + Sync + 'static,
        limit: QuantumOperation,
        probes: Vec<DensityState>,
    ) -> Self {
        Self {
            name: name.into(),
            generator: Box::new(generator),
            limit,
            probes,
        }
    }

    pub fn at(&self, n: usize) -> Result<QuantumOperation> {
        (self.generator)(n)
    }

    /// `max_probes ‖Φ_n(ρ) − Φ_0(ρ)‖₁`.
    pub fn probe_distance(&self, n: usize) -> Result<f64> {
        let phi = self.at(n)?;
        let mut m: f64 = 0.0;
        for p in &self.probes {
            m = m.max(trace_distance(&phi.apply(p)?, &self.limit.apply(p)?)?);
        }
        Ok(m)
    }

    pub fn validate(&self, grid: &[usize], n0: usize) -> Result<ConvergenceCheck> {
        let distances = grid
            .iter()
            .map(|&n| self.probe_distance(n))
            .collect::<Result<Vec<_>>>()?;
        let tail: Vec<f64> = grid
            .iter()
            .zip(&distances)
            .filter(|(&n, _)| n >= n0)
            .map(|(_, &x)| x)
            .collect();
        let ok = tail.windows(2).all(|w| w[1] <= w[0] + 1e-15);
        Ok(ConvergenceCheck {
            grid: grid.to_vec(),
            distances,
            nonincreasing_after_n0: ok,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_kraus, rng};

    fn plus() -> DensityState {
        let mut v = CVector::zeros(2);
        v[0] = cr(1.0);
        v[1] = cr(1.0);
        DensityState::pure(&v, vec![2]).unwrap()
    }

    #[test]
    fn apply_examples() {
        let r = random_density(&mut rng(1), &[3]);
        let out = QuantumOperation::identity(3).apply(&r).unwrap();
        assert!(trace_distance(&out, &r).unwrap() < 1e-15);
        let dep = QuantumOperation::depolarizing(2, 1.0).unwrap();
        let out = dep.apply(&random_density(&mut rng(2), &[2])).unwrap();
        assert!(trace_distance(&out, &DensityState::maximally_mixed(2)).unwrap() < 1e-14);
        let deph = QuantumOperation::dephasing(2, 1.0).unwrap();
        let out = deph.apply(&plus()).unwrap();
        assert!(trace_distance(&out, &DensityState::maximally_mixed(2)).unwrap() < 1e-14);
        // partial dephasing scales coherences by 1 − p
        let deph = QuantumOperation::dephasing(3, 0.3).unwrap();
        let r = random_density(&mut rng(3), &[3]);
        let out = deph.apply(&r).unwrap().to_dense();
        let rd = r.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                let f = if i == j { 1.0 } else { 0.7 };
                assert!((out[(i, j)] - rd[(i, j)] * cr(f)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_trace_increasing() {
        let k = CMatrix::identity(2, 2) * cr(1.1);
        assert!(matches!(
            QuantumOperation::from_kraus(vec![k]),
            Err(Error::TraceIncreasing { .. })
        ));
        let half = CMatrix::identity(2, 2) * cr(0.5f64.sqrt());
        let op = QuantumOperation::from_kraus(vec![half]).unwrap();
        assert!(!op.is_trace_preserving());
        assert!(ext2_residual(&op, &DensityState::maximally_mixed(2)).is_err());
    }

    #[test]
    fn structured_match_kraus() {
        let mut g = rng(4);
        let r = random_density(&mut g, &[4]);
        let diag = DensityState::diagonal_single(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        for op in [
            QuantumOperation::reversal(4),
            QuantumOperation::permutation(vec![2, 0, 3, 1]).unwrap(),
            QuantumOperation::shift_mix(4, 0.3).unwrap(),
            QuantumOperation::permutation_mix(vec![0, 2, 3, 1], 0.4).unwrap(),
        ] {
            let dense = QuantumOperation::from_kraus(op.kraus().unwrap()).unwrap();
            for s in [&r, &diag] {
                let a = op.apply(s).unwrap();
                let b = dense.apply(s).unwrap();
                assert!(trace_distance(&a, &b).unwrap() < 1e-14);
                let ca = op.complementary_apply(s).unwrap();
                let cb = dense.complementary_apply(s).unwrap();
                assert!(linalg::max_abs(&(ca.to_dense() - cb.to_dense())) < 1e-14);
            }
            assert_eq!(op.choi_rank().unwrap(), dense.choi_rank().unwrap());
        }
    }

    #[test]
    fn complementary_examples() {
        let r = random_density(&mut rng(5), &[2]);
        let id = QuantumOperation::identity(2);
        let comp = id.complementary().unwrap();
        assert_eq!(comp.d_out(), 1);
        assert!(output_entropy(&comp, &r).unwrap().abs() < 1e-15);

        let deph = QuantumOperation::dephasing(2, 1.0).unwrap();
        assert_eq!(deph.env_dim(), 2);
        let out = deph.complementary_apply(&plus()).unwrap().to_dense();
        assert!(out[(0, 1)].norm() < 1e-14);

        // Tr_B on a pure ω_AB: the environment holds B
        let w = crate::random::random_pure(&mut rng(6), &[2, 3]);
        let tr = QuantumOperation::partial_trace(2, 3, true).unwrap();
        let hb = von_neumann_entropy(&w.partial_trace(&[1]).unwrap()).unwrap();
        assert!((complementary_output_entropy(&tr, &w).unwrap() - hb).abs() < 1e-12);
        let mixed = random_density(&mut rng(7), &[2, 3]);
        let hb = von_neumann_entropy(&mixed.partial_trace(&[1]).unwrap()).unwrap();
        let ha = von_neumann_entropy(&mixed.partial_trace(&[0]).unwrap()).unwrap();
        assert!((complementary_output_entropy(&tr, &mixed).unwrap() - hb).abs() < 1e-12);
        assert!((output_entropy(&tr, &mixed).unwrap() - ha).abs() < 1e-12);
        assert!(ext2_residual(&tr, &mixed).unwrap() < 1e-10);

        // double complementary preserves output entropy
        let phi = QuantumOperation::from_kraus(random_kraus(&mut rng(8), 2, 3, 2)).unwrap();
        let cc = phi.complementary().unwrap().complementary().unwrap();
        for s in spanning_probes(2) {
            let a = output_entropy(&phi, &s).unwrap();
            let b = output_entropy(&cc, &s).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn choi_ranks() {
        assert_eq!(QuantumOperation::identity(2).choi_rank().unwrap(), 1);
        assert_eq!(QuantumOperation::depolarizing(2, 1.0).unwrap().choi_rank().unwrap(), 4);
        assert_eq!(QuantumOperation::dephasing(2, 0.5).unwrap().choi_rank().unwrap(), 2);
        // Choi spectrum oracle for full depolarizing: Φ(|i⟩⟨j|) = δ_ij I/2
        let ch = QuantumOperation::depolarizing(2, 1.0).unwrap().choi_matrix().unwrap();
        let ev = linalg::eigvalsh(&ch).unwrap();
        assert!(ev.iter().all(|x| (x - 0.5).abs() < 1e-14));
    }

    #[test]
    fn output_entropy_examples() {
        let mut g = rng(9);
        let dep = QuantumOperation::depolarizing(2, 1.0).unwrap();
        for _ in 0..5 {
            let r = random_density(&mut g, &[2]);
            assert!((output_entropy(&dep, &r).unwrap() - 2f64.ln()).abs() < 1e-13);
            let h = von_neumann_entropy(&r).unwrap();
            assert!((output_entropy(&QuantumOperation::identity(2), &r).unwrap() - h).abs() < 1e-15);
        }
        let half = CMatrix::identity(2, 2) * cr(0.5f64.sqrt());
        let op = QuantumOperation::from_kraus(vec![half]).unwrap();
        let r = random_density(&mut g, &[2]);
        let h = von_neumann_entropy(&r).unwrap();
        assert!((output_entropy(&op, &r).unwrap() - 0.5 * h).abs() < 1e-13);
    }

    #[test]
    fn ext2_and_information() {
        let mut g = rng(10);
        let deph = QuantumOperation::dephasing(2, 0.4).unwrap();
        for _ in 0..5 {
            let r = random_density(&mut g, &[2]);
            assert!(ext2_residual(&deph, &r).unwrap() < 1e-10);
            let phi = QuantumOperation::from_kraus(random_kraus(&mut g, 2, 2, 3)).unwrap();
            assert!(ext2_residual(&phi, &r).unwrap() < 1e-10);
            let i = channel_mutual_information(&phi, &r).unwrap();
            let ic = coherent_information(&phi, &r).unwrap();
            assert!((i - von_neumann_entropy(&r).unwrap() - ic).abs() < 1e-12);
        }
        let r = random_density(&mut g, &[3]);
        let h = von_neumann_entropy(&r).unwrap();
        let id = QuantumOperation::identity(3);
        assert!((channel_mutual_information(&id, &r).unwrap() - 2.0 * h).abs() < 1e-10);
        assert!((coherent_information(&id, &r).unwrap() - h).abs() < 1e-10);
        let dep = QuantumOperation::depolarizing(3, 1.0).unwrap();
        assert!(channel_mutual_information(&dep, &r).unwrap().abs() < 1e-10);
        assert!((coherent_information(&dep, &r).unwrap() + h).abs() < 1e-10);
        let full = QuantumOperation::dephasing(2, 1.0).unwrap();
        assert!(coherent_information(&full, &DensityState::maximally_mixed(2)).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pseudo_diagonal_family() {
        let mut g = rng(11);
        let phi = make_pseudo_diagonal(
            &QuantumOperation::basis_measure_prepare(3).unwrap().kraus().unwrap().iter().map(|k| k.adjoint() * k).collect::<Vec<_>>(),
            &(0..3).map(|k| DensityState::basis(3, k)).collect::<Vec<_>>(),
        )
        .unwrap();
        // complementary of basis measure-prepare acts as full dephasing
        let deph = QuantumOperation::dephasing(3, 1.0).unwrap();
        for _ in 0..5 {
            let r = random_density(&mut g, &[3]);
            let a = phi.apply(&r).unwrap();
            let b = deph.apply(&r).unwrap();
            assert!((von_neumann_entropy(&a).unwrap() - von_neumann_entropy(&b).unwrap()).abs() < 1e-12);
            assert!(coherent_information(&phi, &r).unwrap() >= -1e-9);
            assert!(entropy_gain(&phi, &r).unwrap() >= -1e-9);
        }
        let bad = vec![CMatrix::identity(2, 2) * cr(0.5)];
        assert!(matches!(
            QuantumOperation::measure_prepare(&bad, &[DensityState::basis(2, 0)]),
            Err(Error::InvalidPOVM(_))
        ));
    }

    #[test]
    fn channel_sequence_ramp() {
        let seq = ChannelSequence::new(
            "depolarizing ramp",
            |n| QuantumOperation::depolarizing(2, 0.5 + 0.5 / n as f64),
            QuantumOperation::depolarizing(2, 0.5).unwrap(),
            spanning_probes(2),
        );
        let chk = seq.validate(&[1, 2, 4, 8, 16], 1).unwrap();
        assert!(chk.nonincreasing_after_n0);
        assert!(chk.distances[4] < 0.05);
    }
}
