//! Seeded random instances: Ginibre matrices, Haar unitaries, states, channels.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, cr, CMatrix, CVector};
use crate::operator::DensityState;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream derived from a base seed and a label.
pub fn substream(seed: u64, label: u64) -> Rng64 {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(label);
    r
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> num_complex::Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    num_complex::Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    // fill row by row so the sample does not depend on storage order
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    linalg::qr_orthonormalize(&ginibre(rng, rows, cols))
}

/// Haar-distributed unitary.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    random_isometry(rng, d, d)
}

pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| complex_normal(rng));
    let n = v.norm();
    v / cr(n)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> CMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()) * cr(0.5)
}

/// Induced-measure random state of the given rank.
pub fn random_state_matrix<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> CMatrix {
    let g = ginibre(rng, d, rank.max(1));
    let m = &g * g.adjoint();
    let t = linalg::trace(&m).re;
    let m = m / cr(t);
    (&m + m.adjoint()) * cr(0.5)
}

pub fn random_density<R: Rng + ?Sized>(rng: &mut R, factor_dims: &[usize]) -> DensityState {
    let d: usize = factor_dims.iter().product();
    random_density_rank(rng, factor_dims, d)
}

pub fn random_density_rank<R: Rng + ?Sized>(
    rng: &mut R,
    factor_dims: &[usize],
    rank: usize,
) -> DensityState {
    let d: usize = factor_dims.iter().product();
    DensityState::from_matrix(random_state_matrix(rng, d, rank), factor_dims.to_vec())
        .expect("Ginibre construction is a state")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, factor_dims: &[usize]) -> DensityState {
    let d: usize = factor_dims.iter().product();
    DensityState::pure(&random_pure_vector(rng, d), factor_dims.to_vec())
        .expect("nonzero vector")
}

/// Uniform point of the probability simplex.
pub fn random_probability<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..d)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

pub fn random_diagonal_state<R: Rng + ?Sized>(rng: &mut R, factor_dims: &[usize]) -> DensityState {
    let d: usize = factor_dims.iter().product();
    DensityState::diagonal(random_probability(rng, d), factor_dims.to_vec())
        .expect("simplex point")
}

/// Kraus operators of a random channel `d_in → d_out` with `k` operators.
pub fn random_kraus<R: Rng + ?Sized>(
    rng: &mut R,
    d_in: usize,
    d_out: usize,
    k: usize,
) -> Vec<CMatrix> {
    let v = random_isometry(rng, d_out * k, d_in);
    (0..k)
        .map(|e| CMatrix::from_fn(d_out, d_in, |b, a| v[(b * k + e, a)]))
        .collect()
}
