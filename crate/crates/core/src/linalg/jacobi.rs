//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Rotations are applied in fixed row-cyclic order (p < q, row by row), so
//! identical inputs always produce bit-identical outputs.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Relative hermiticity tolerance.
pub const HERMITICITY_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues sorted descending with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let fl: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            if fl[k] == 0.0 {
                continue;
            }
            for i in 0..n {
                let a = v[(i, k)] * fl[k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// Largest entrywise deviation `max |A_ij − conj(A_ji)|`.
pub fn hermiticity_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn check_hermitian(a: &CMatrix) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let scale = a.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let dev = hermiticity_deviation(a);
    if dev > HERMITICITY_TOL * scale {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok(())
}

/// Full spectral decomposition of a Hermitian matrix.
pub fn eig_hermitian(a: &CMatrix) -> Result<SpectralDecomposition> {
    check_hermitian(a)?;
    let n = a.nrows();
    // row-major working copy, symmetrized
    let mut m = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
        }
        m[i * n + i].im = 0.0;
    }
    let mut v = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::new(1.0, 0.0);
    }

    let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = 1e-15 * frob;
    let mut sweeps = 0;
    loop {
        let off = off_norm(&m, n);
        if off <= target || frob == 0.0 {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { sweeps, off_norm: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[j * n + j]
            .re
            .partial_cmp(&m[i * n + i].re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let eigenvalues = order.iter().map(|&k| m[k * n + k].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, c| v[i * n + order[c]]);
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Eigenvalues only, sorted descending.
pub fn eigvalsh(a: &CMatrix) -> Result<Vec<f64>> {
    Ok(eig_hermitian(a)?.eigenvalues)
}

fn off_norm(m: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(m: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let b = m[p * n + q];
    let abs_b = b.norm();
    if abs_b == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    // negligible relative to both diagonal entries: drop without rotating
    if abs_b < 1e-18 * (app.abs() + aqq.abs()) {
        m[p * n + q] = Complex64::new(0.0, 0.0);
        m[q * n + p] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = b / abs_b;
    let theta = (aqq - app) / (2.0 * abs_b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let ph_c = phase.conj();

    // columns: A ← A J
    for k in 0..n {
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        m[k * n + p] = akp * c - ph_c * akq * s;
        m[k * n + q] = akp * s + ph_c * akq * c;
    }
    // rows: A ← J† A
    for k in 0..n {
        let apk = m[p * n + k];
        let aqk = m[q * n + k];
        m[p * n + k] = apk * c - phase * aqk * s;
        m[q * n + k] = apk * s + phase * aqk * c;
    }
    m[p * n + q] = Complex64::new(0.0, 0.0);
    m[q * n + p] = Complex64::new(0.0, 0.0);
    m[p * n + p] = Complex64::new(app - t * abs_b, 0.0);
    m[q * n + q] = Complex64::new(aqq + t * abs_b, 0.0);

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c - ph_c * vkq * s;
        v[k * n + q] = vkp * s + ph_c * vkq * c;
    }
}
