//! Hermitian operators, positive cone elements and density states.
//!
//! A [`TraceClassElement`] is stored either densely or as a diagonal in the
//! computational basis. The diagonal form never touches the eigensolver and
//! is what lets sequence runs reach dimension 2^16.

use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMatrix, CVector, SpectralDecomposition};

/// Smallest eigenvalue allowed before an operator counts as non-positive.
pub const PSD_TOL: f64 = 1e-10;
/// `|Tr ρ − 1|` allowed for a density state.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues at or below this fraction of the largest one are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Default cap on dense dimensions.
pub const DENSE_DIM_CAP: usize = 4096;
/// Default cap on diagonal dimensions.
pub const DIAGONAL_DIM_CAP: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() == 0 {
            return Err(Error::DimensionMismatch("empty operator".into()));
        }
        linalg::check_hermitian(&m)?;
        let n = m.nrows();
        let mut m = m;
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
            m[(i, i)].im = 0.0;
        }
        Ok(Self { m })
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        Self {
            m: linalg::real_diag(d),
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn eig(&self) -> Result<SpectralDecomposition> {
        linalg::eig_hermitian(&self.m)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Dense(CMatrix),
    Diagonal(Vec<f64>),
}

/// Positive semidefinite operator with finite trace and a tensor factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceClassElement {
    repr: Repr,
    factor_dims: Vec<usize>,
}

fn check_factors(dim: usize, factor_dims: &[usize]) -> Result<()> {
    if factor_dims.is_empty() || factor_dims.iter().any(|&d| d == 0) {
        return Err(Error::BadFactorization(format!(
            "factor dims {factor_dims:?} invalid"
        )));
    }
    let prod: usize = factor_dims.iter().product();
    if prod != dim {
        return Err(Error::BadFactorization(format!(
            "factor dims {factor_dims:?} multiply to {prod}, dimension is {dim}"
        )));
    }
    Ok(())
}

impl TraceClassElement {
    /// Validated dense element. Eigenvalues below `-PSD_TOL` are rejected.
    pub fn new(op: HermitianOperator, factor_dims: Vec<usize>) -> Result<Self> {
        check_factors(op.dim(), &factor_dims)?;
        let ev = linalg::eigvalsh(op.matrix())?;
        let min = ev.last().copied().unwrap_or(0.0);
        let scale = ev.first().copied().unwrap_or(0.0).abs().max(1.0);
        if min < -PSD_TOL * scale {
            return Err(Error::NotPositive { min_eig: min });
        }
        Ok(Self {
            repr: Repr::Dense(op.into_matrix()),
            factor_dims,
        })
    }

    pub fn from_matrix(m: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?, factor_dims)
    }

    /// Single-factor convenience for [`Self::from_matrix`].
    pub fn from_matrix_single(m: CMatrix) -> Result<Self> {
        let d = m.nrows();
        Self::from_matrix(m, vec![d])
    }

    /// Diagonal element flagged for the fast path.
    pub fn diagonal(p: Vec<f64>, factor_dims: Vec<usize>) -> Result<Self> {
        check_factors(p.len(), &factor_dims)?;
        if p.len() > DIAGONAL_DIM_CAP {
            return Err(Error::DimensionOverflow {
                dim: p.len(),
                cap: DIAGONAL_DIM_CAP,
            });
        }
        if let Some(&min) = p.iter().min_by(|a, b| a.total_cmp(b)) {
            if min < -PSD_TOL || !min.is_finite() {
                return Err(Error::NotPositive { min_eig: min });
            }
        }
        Ok(Self {
            repr: Repr::Diagonal(p),
            factor_dims,
        })
    }

    pub fn diagonal_single(p: Vec<f64>) -> Result<Self> {
        let d = p.len();
        Self::diagonal(p, vec![d])
    }

    /// `|ψ⟩⟨ψ|` (not normalized).
    pub fn pure(psi: &CVector, factor_dims: Vec<usize>) -> Result<Self> {
        check_factors(psi.len(), &factor_dims)?;
        Ok(Self {
            repr: Repr::Dense(linalg::outer(psi)),
            factor_dims,
        })
    }

    pub(crate) fn dense_unchecked(m: CMatrix, factor_dims: Vec<usize>) -> Self {
        debug_assert_eq!(m.nrows(), factor_dims.iter().product::<usize>());
        Self {
            repr: Repr::Dense(m),
            factor_dims,
        }
    }

    pub(crate) fn diagonal_unchecked(p: Vec<f64>, factor_dims: Vec<usize>) -> Self {
        debug_assert_eq!(p.len(), factor_dims.iter().product::<usize>());
        Self {
            repr: Repr::Diagonal(p),
            factor_dims,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Dense(m) => m.nrows(),
            Repr::Diagonal(p) => p.len(),
        }
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.repr, Repr::Diagonal(_))
    }

    /// Diagonal entries when the element is flagged diagonal.
    pub fn diagonal_entries(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Diagonal(p) => Some(p),
            Repr::Dense(_) => None,
        }
    }

    pub fn trace(&self) -> f64 {
        match &self.repr {
            Repr::Dense(m) => linalg::trace(m).re,
            Repr::Diagonal(p) => p.iter().sum(),
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        match &self.repr {
            Repr::Dense(m) => m.clone(),
            Repr::Diagonal(p) => linalg::real_diag(p),
        }
    }

    /// Dense view without copying when already dense.
    pub fn dense_ref(&self) -> std::borrow::Cow<'_, CMatrix> {
        match &self.repr {
            Repr::Dense(m) => std::borrow::Cow::Borrowed(m),
            Repr::Diagonal(p) => std::borrow::Cow::Owned(linalg::real_diag(p)),
        }
    }

    /// Matrix element `⟨i|A|j⟩`.
    pub fn entry(&self, i: usize, j: usize) -> num_complex::Complex64 {
        match &self.repr {
            Repr::Dense(m) => m[(i, j)],
            Repr::Diagonal(p) => {
                if i == j {
                    cr(p[i])
                } else {
                    cr(0.0)
                }
            }
        }
    }

    /// Eigenvalues, descending.
    pub fn spectrum(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(m) => linalg::eigvalsh(m).expect("validated Hermitian element"),
            Repr::Diagonal(p) => {
                let mut v = p.clone();
                v.sort_by(|a, b| b.total_cmp(a));
                v
            }
        }
    }

    pub fn eig(&self) -> SpectralDecomposition {
        match &self.repr {
            Repr::Dense(m) => linalg::eig_hermitian(m).expect("validated Hermitian element"),
            Repr::Diagonal(p) => {
                let n = p.len();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| p[j].total_cmp(&p[i]).then(i.cmp(&j)));
                let mut v = CMatrix::zeros(n, n);
                for (col, &k) in order.iter().enumerate() {
                    v[(k, col)] = cr(1.0);
                }
                SpectralDecomposition {
                    eigenvalues: order.iter().map(|&k| p[k]).collect(),
                    eigenvectors: v,
                }
            }
        }
    }

    /// Number of eigenvalues above the relative support cutoff.
    pub fn rank(&self) -> usize {
        support_count(&self.spectrum())
    }

    pub fn scale(&self, lambda: f64) -> Self {
        let repr = match &self.repr {
            Repr::Dense(m) => Repr::Dense(m * cr(lambda)),
            Repr::Diagonal(p) => Repr::Diagonal(p.iter().map(|x| x * lambda).collect()),
        };
        Self {
            repr,
            factor_dims: self.factor_dims.clone(),
        }
    }

    /// Sum of two elements on the same space.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        let repr = match (&self.repr, &other.repr) {
            (Repr::Diagonal(a), Repr::Diagonal(b)) => {
                Repr::Diagonal(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => Repr::Dense(self.to_dense() + other.to_dense()),
        };
        Ok(Self {
            repr,
            factor_dims: self.factor_dims.clone(),
        })
    }

    /// Same operator with a different factorization of the same dimension.
    pub fn with_factor_dims(&self, factor_dims: Vec<usize>) -> Result<Self> {
        check_factors(self.dim(), &factor_dims)?;
        Ok(Self {
            repr: self.repr.clone(),
            factor_dims,
        })
    }

    /// Zero-pad a single-factor element into a larger dimension.
    pub fn embed(&self, dim: usize) -> Result<Self> {
        let d = self.dim();
        if dim < d {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed dimension {d} into {dim}"
            )));
        }
        if self.factor_dims.len() != 1 {
            return Err(Error::BadFactorization(
                "zero-padding is defined for single-factor elements".into(),
            ));
        }
        let repr = match &self.repr {
            Repr::Diagonal(p) => {
                let mut q = p.clone();
                q.resize(dim, 0.0);
                Repr::Diagonal(q)
            }
            Repr::Dense(m) => {
                let mut out = CMatrix::zeros(dim, dim);
                out.view_mut((0, 0), (d, d)).copy_from(m);
                Repr::Dense(out)
            }
        };
        Ok(Self {
            repr,
            factor_dims: vec![dim],
        })
    }

    /// Zero-pad every tensor factor: factor `f` of dimension `d_f` becomes
    /// `new_dims[f] ≥ d_f`, old basis vectors keeping their labels.
    pub fn embed_factors(&self, new_dims: &[usize]) -> Result<Self> {
        let old = &self.factor_dims;
        if new_dims.len() != old.len() || new_dims.iter().zip(old).any(|(n, o)| n < o) {
            return Err(Error::DimensionMismatch(format!(
                "cannot embed factors {old:?} into {new_dims:?}"
            )));
        }
        if new_dims == old.as_slice() {
            return Ok(self.clone());
        }
        let total: usize = new_dims.iter().product();
        let map: Vec<usize> = (0..self.dim())
            .map(|idx| {
                let mut r = idx;
                let mut digits = vec![0usize; old.len()];
                for f in (0..old.len()).rev() {
                    digits[f] = r % old[f];
                    r /= old[f];
                }
                digits.iter().zip(new_dims).fold(0, |acc, (d, n)| acc * n + d)
            })
            .collect();
        let repr = match &self.repr {
            Repr::Diagonal(p) => {
                if total > DIAGONAL_DIM_CAP {
                    return Err(Error::DimensionOverflow { dim: total, cap: DIAGONAL_DIM_CAP });
                }
                let mut q = vec![0.0; total];
                for (i, &x) in p.iter().enumerate() {
                    q[map[i]] = x;
                }
                Repr::Diagonal(q)
            }
            Repr::Dense(m) => {
                if total > DENSE_DIM_CAP {
                    return Err(Error::DimensionOverflow { dim: total, cap: DENSE_DIM_CAP });
                }
                let mut out = CMatrix::zeros(total, total);
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        out[(map[i], map[j])] = m[(i, j)];
                    }
                }
                Repr::Dense(out)
            }
        };
        Ok(Self {
            repr,
            factor_dims: new_dims.to_vec(),
        })
    }

    /// Conjugation `U A U†` (result is dense).
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "unitary has {} columns, element dimension {}",
                u.ncols(),
                self.dim()
            )));
        }
        let m = u * self.dense_ref().as_ref() * u.adjoint();
        let m = (&m + m.adjoint()) * cr(0.5);
        let fd = if u.nrows() == self.dim() {
            self.factor_dims.clone()
        } else {
            vec![u.nrows()]
        };
        Ok(Self::dense_unchecked(m, fd))
    }

    /// Reorder the tensor factors: new factor `i` is old factor `order[i]`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        let nf = self.factor_dims.len();
        let mut seen = vec![false; nf];
        if order.len() != nf {
            return Err(Error::BadFactorization(format!("permutation {order:?} has wrong length")));
        }
        for &o in order {
            if o >= nf || seen[o] {
                return Err(Error::BadFactorization(format!("{order:?} is not a permutation")));
            }
            seen[o] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&o| self.factor_dims[o]).collect();
        let map = permutation_map(&self.factor_dims, order);
        let repr = match &self.repr {
            Repr::Diagonal(p) => {
                let mut q = vec![0.0; p.len()];
                for (old, &new) in map.iter().enumerate() {
                    q[new] = p[old];
                }
                Repr::Diagonal(q)
            }
            Repr::Dense(m) => {
                let n = m.nrows();
                let mut out = CMatrix::zeros(n, n);
                for i in 0..n {
                    for j in 0..n {
                        out[(map[i], map[j])] = m[(i, j)];
                    }
                }
                Repr::Dense(out)
            }
        };
        Ok(Self {
            repr,
            factor_dims: new_dims,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    /// Marginal on factors `keep`, normalized as a state when the trace is positive.
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        self.partial_trace(keep)
    }
}

/// Count of entries above `SUPPORT_CUTOFF · max`.
pub fn support_count(spectrum_desc: &[f64]) -> usize {
    let max = spectrum_desc.first().copied().unwrap_or(0.0);
    if max <= 0.0 {
        return 0;
    }
    spectrum_desc
        .iter()
        .filter(|&&x| x > SUPPORT_CUTOFF * max)
        .count()
}

/// Old flat index → new flat index for a factor permutation.
fn permutation_map(dims: &[usize], order: &[usize]) -> Vec<usize> {
    let total: usize = dims.iter().product();
    let nf = dims.len();
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; nf];
    for (idx, slot) in map.iter_mut().enumerate() {
        let mut r = idx;
        for f in (0..nf).rev() {
            digits[f] = r % dims[f];
            r /= dims[f];
        }
        let mut new = 0;
        for (pos, &o) in order.iter().enumerate() {
            new = new * new_dims[pos] + digits[o];
        }
        *slot = new;
    }
    map
}

/// Element with trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState(TraceClassElement);

impl DensityState {
    pub fn new(el: TraceClassElement) -> Result<Self> {
        let t = el.trace();
        if (t - 1.0).abs() > TRACE_TOL.max(1e-12 * el.dim() as f64) {
            return Err(Error::NotNormalized { trace: t });
        }
        Ok(Self(el))
    }

    /// Divides by the trace.
    pub fn normalized(el: &TraceClassElement) -> Result<Self> {
        let t = el.trace();
        if t <= 0.0 {
            return Err(Error::NotNormalized { trace: t });
        }
        Ok(Self(el.scale(1.0 / t)))
    }

    pub fn from_matrix(m: CMatrix, factor_dims: Vec<usize>) -> Result<Self> {
        Self::new(TraceClassElement::from_matrix(m, factor_dims)?)
    }

    pub fn diagonal(p: Vec<f64>, factor_dims: Vec<usize>) -> Result<Self> {
        Self::new(TraceClassElement::diagonal(p, factor_dims)?)
    }

    pub fn diagonal_single(p: Vec<f64>) -> Result<Self> {
        Self::new(TraceClassElement::diagonal_single(p)?)
    }

    /// Pure state from a (not necessarily normalized) vector.
    pub fn pure(psi: &CVector, factor_dims: Vec<usize>) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 {
            return Err(Error::NotNormalized { trace: 0.0 });
        }
        Self::new(TraceClassElement::pure(&(psi / cr(n)), factor_dims)?)
    }

    /// `|k⟩⟨k|` in dimension `d`, diagonal-flagged.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut p = vec![0.0; d];
        p[k] = 1.0;
        Self(TraceClassElement::diagonal_unchecked(p, vec![d]))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(TraceClassElement::diagonal_unchecked(
            vec![1.0 / d as f64; d],
            vec![d],
        ))
    }

    pub fn embed_factors(&self, new_dims: &[usize]) -> Result<Self> {
        Ok(Self(self.0.embed_factors(new_dims)?))
    }

    pub fn element(&self) -> &TraceClassElement {
        &self.0
    }

    pub fn into_element(self) -> TraceClassElement {
        self.0
    }

    pub fn with_factor_dims(&self, factor_dims: Vec<usize>) -> Result<Self> {
        Ok(Self(self.0.with_factor_dims(factor_dims)?))
    }

    pub fn embed(&self, dim: usize) -> Result<Self> {
        Ok(Self(self.0.embed(dim)?))
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self(partial_trace(&self.0, keep)?))
    }

    pub fn permute_factors(&self, order: &[usize]) -> Result<Self> {
        Ok(Self(self.0.permute_factors(order)?))
    }

    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        Ok(Self(self.0.conjugate(u)?))
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self(tensor(&self.0, &other.0)?))
    }

    /// Convex mixture `(1−t) self + t other`.
    pub fn mix(&self, other: &Self, t: f64) -> Result<Self> {
        Ok(Self(self.0.scale(1.0 - t).add(&other.0.scale(t))?))
    }
}

impl Deref for DensityState {
    type Target = TraceClassElement;
    fn deref(&self) -> &TraceClassElement {
        &self.0
    }
}

impl AsRef<TraceClassElement> for DensityState {
    fn as_ref(&self) -> &TraceClassElement {
        &self.0
    }
}

impl AsRef<TraceClassElement> for TraceClassElement {
    fn as_ref(&self) -> &TraceClassElement {
        self
    }
}

pub fn tensor(a: &TraceClassElement, b: &TraceClassElement) -> Result<TraceClassElement> {
    tensor_with_cap(a, b, DENSE_DIM_CAP)
}

pub fn tensor_with_cap(
    a: &TraceClassElement,
    b: &TraceClassElement,
    dense_cap: usize,
) -> Result<TraceClassElement> {
    let dim = a.dim().checked_mul(b.dim()).ok_or(Error::DimensionOverflow {
        dim: usize::MAX,
        cap: dense_cap,
    })?;
    let mut fd = a.factor_dims.clone();
    fd.extend_from_slice(&b.factor_dims);
    match (&a.repr, &b.repr) {
        (Repr::Diagonal(p), Repr::Diagonal(q)) => {
            if dim > DIAGONAL_DIM_CAP {
                return Err(Error::DimensionOverflow {
                    dim,
                    cap: DIAGONAL_DIM_CAP,
                });
            }
            let mut out = Vec::with_capacity(dim);
            for x in p {
                for y in q {
                    out.push(x * y);
                }
            }
            Ok(TraceClassElement::diagonal_unchecked(out, fd))
        }
        _ => {
            if dim > dense_cap {
                return Err(Error::DimensionOverflow { dim, cap: dense_cap });
            }
            Ok(TraceClassElement::dense_unchecked(
                linalg::kron(&a.dense_ref(), &b.dense_ref()),
                fd,
            ))
        }
    }
}

/// Partial trace keeping the factors listed in `keep` (in their original order).
pub fn partial_trace(w: &TraceClassElement, keep: &[usize]) -> Result<TraceClassElement> {
    let dims = &w.factor_dims;
    let nf = dims.len();
    if keep.is_empty() {
        return Err(Error::BadFactorization("keep set is empty".into()));
    }
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= nf) {
        return Err(Error::BadFactorization(format!(
            "keep set {keep:?} invalid for {nf} factors"
        )));
    }
    if keep_sorted.len() == nf {
        return Ok(w.clone());
    }
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..nf).filter(|f| !keep_sorted.contains(f)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let dt: usize = traced_dims.iter().product();
    let total = w.dim();

    // split every flat index into (kept, traced) parts
    let mut kept_idx = vec![0usize; total];
    let mut traced_idx = vec![0usize; total];
    let mut digits = vec![0usize; nf];
    for idx in 0..total {
        let mut r = idx;
        for f in (0..nf).rev() {
            digits[f] = r % dims[f];
            r /= dims[f];
        }
        let mut a = 0;
        for &f in &keep_sorted {
            a = a * dims[f] + digits[f];
        }
        let mut b = 0;
        for &f in &traced {
            b = b * dims[f] + digits[f];
        }
        kept_idx[idx] = a;
        traced_idx[idx] = b;
    }

    match &w.repr {
        Repr::Diagonal(p) => {
            let mut out = vec![0.0; dk];
            for idx in 0..total {
                out[kept_idx[idx]] += p[idx];
            }
            Ok(TraceClassElement::diagonal_unchecked(out, kept_dims))
        }
        Repr::Dense(m) => {
            // groups[t][a] = flat index with traced part t and kept part a
            let mut groups = vec![vec![0usize; dk]; dt];
            for idx in 0..total {
                groups[traced_idx[idx]][kept_idx[idx]] = idx;
            }
            let mut out = CMatrix::zeros(dk, dk);
            for g in &groups {
                for a in 0..dk {
                    for b in 0..dk {
                        out[(a, b)] += m[(g[a], g[b])];
                    }
                }
            }
            let out = (&out + out.adjoint()) * cr(0.5);
            Ok(TraceClassElement::dense_unchecked(out, kept_dims))
        }
    }
}

/// `‖A − B‖₁`.
pub fn trace_distance(a: &TraceClassElement, b: &TraceClassElement) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    match (&a.repr, &b.repr) {
        (Repr::Diagonal(p), Repr::Diagonal(q)) => {
            Ok(p.iter().zip(q).map(|(x, y)| (x - y).abs()).sum())
        }
        _ => {
            let d = a.to_dense() - b.to_dense();
            // summing in a sign-independent order makes the distance exactly symmetric
            let mut ev: Vec<f64> = linalg::eigvalsh(&d)?.iter().map(|x| x.abs()).collect();
            ev.sort_by(f64::total_cmp);
            Ok(ev.iter().sum())
        }
    }
}

/// `log A` on the support of `A` together with the support projector.
pub fn op_log_on_support(a: &TraceClassElement) -> (HermitianOperator, CMatrix) {
    let sd = a.eig();
    let cut = SUPPORT_CUTOFF * sd.eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    let inside = |x: f64| x > cut && x > 0.0;
    let log = sd.map(|x| if inside(x) { x.ln() } else { 0.0 });
    let proj = sd.map(|x| if inside(x) { 1.0 } else { 0.0 });
    (
        HermitianOperator::new((&log + log.adjoint()) * cr(0.5)).expect("Hermitian by construction"),
        proj,
    )
}

/// Serializable description of a dense matrix as row-major `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ComplexRows(pub Vec<Vec<[f64; 2]>>);

impl ComplexRows {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.0.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty matrix literal".into()));
        }
        let cols = self.0[0].len();
        if self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix literal".into()));
        }
        Ok(CMatrix::from_fn(n, cols, |i, j| {
            num_complex::Complex64::new(self.0[i][j][0], self.0[i][j][1])
        }))
    }
}
