//! Dense complex matrix helpers on top of `nalgebra`.

mod jacobi;

pub use jacobi::{
    check_hermitian, eig_hermitian, eigvalsh, hermiticity_deviation, SpectralDecomposition,
    HERMITICITY_TOL,
};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn adjoint(a: &CMatrix) -> CMatrix {
    a.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn real_diag(p: &[f64]) -> CMatrix {
    let n = p.len();
    let mut m = CMatrix::zeros(n, n);
    for (i, &x) in p.iter().enumerate() {
        m[(i, i)] = cr(x);
    }
    m
}

/// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
pub fn trace_norm_dense(a: &CMatrix) -> f64 {
    let h = (a + a.adjoint()) * cr(0.5);
    eigvalsh(&h)
        .map(|ev| ev.iter().map(|x| x.abs()).sum())
        .unwrap_or(f64::NAN)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// `|ψ⟩⟨ψ|`.
pub fn outer(psi: &CVector) -> CMatrix {
    psi * psi.adjoint()
}

/// `max |V†V − I|`.
pub fn isometry_defect(v: &CMatrix) -> f64 {
    let g = v.adjoint() * v;
    let n = g.nrows();
    let mut d: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            d = d.max((g[(i, j)] - cr(target)).norm());
        }
    }
    d
}

/// Column-stacking vectorization.
pub fn vec(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.nrows() * m.ncols(), m.iter().copied())
}

/// Inverse of [`vec`] for a `rows × cols` matrix.
pub fn unvec(v: &CVector, rows: usize, cols: usize) -> Result<CMatrix> {
    if rows * cols != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "cannot unvec length {} into {}x{}",
            v.len(),
            rows,
            cols
        )));
    }
    Ok(CMatrix::from_iterator(rows, cols, v.iter().copied()))
}

/// Orthonormalize the columns of `a` (modified Gram-Schmidt, applied twice),
/// fixing phases so that the implied R has a positive real diagonal.
/// Columns that collapse numerically are replaced by unit vectors completing
/// the basis, so the result is always an isometry when `cols ≤ rows`.
pub fn qr_orthonormalize(a: &CMatrix) -> CMatrix {
    let (m, n) = a.shape();
    let mut q = a.clone();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    dot += q[(i, k)].conj() * q[(i, j)];
                }
                for i in 0..m {
                    let qik = q[(i, k)];
                    q[(i, j)] -= qik * dot;
                }
            }
        }
        let mut nrm: f64 = (0..m).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if nrm < 1e-12 {
            // rank-deficient column: complete with the first usable basis vector
            for e in 0..m {
                let mut cand = CVector::zeros(m);
                cand[e] = cr(1.0);
                for _pass in 0..2 {
                    for k in 0..j {
                        let mut dot = Complex64::new(0.0, 0.0);
                        for i in 0..m {
                            dot += q[(i, k)].conj() * cand[i];
                        }
                        for i in 0..m {
                            cand[i] -= q[(i, k)] * dot;
                        }
                    }
                }
                let cn = cand.norm();
                if cn > 1e-6 {
                    for i in 0..m {
                        q[(i, j)] = cand[i];
                    }
                    nrm = cn;
                    break;
                }
            }
        }
        let mut pivot = Complex64::new(0.0, 0.0);
        for i in 0..m {
            if q[(i, j)].norm() > 1e-14 {
                pivot = q[(i, j)];
                break;
            }
        }
        // phase fix keeps the retraction a smooth, deterministic function of its input
        let r_jj = {
            let mut d = Complex64::new(0.0, 0.0);
            for i in 0..m {
                d += a[(i, j)].conj() * q[(i, j)];
            }
            d
        };
        let ph = if r_jj.norm() > 1e-300 {
            r_jj.conj() / r_jj.norm()
        } else if pivot.norm() > 0.0 {
            pivot.conj() / pivot.norm()
        } else {
            cr(1.0)
        };
        for i in 0..m {
            q[(i, j)] = q[(i, j)] * ph / nrm;
        }
    }
    q
}
