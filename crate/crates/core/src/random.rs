//! Seeded random instances: Haar unitaries, Hermitian matrices, density
//! matrices of prescribed rank, and points on the probability simplex.
//!
//! All generators draw from a caller-supplied RNG. [`rng`] gives the
//! portable ChaCha stream used throughout the crate so outputs are stable
//! across platforms for a given seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::matrix::{inner, norm_sqr, Matrix};
use crate::linalg::state::DensityMatrix;
use crate::scalar::{c, Real, C};
use crate::tolerance::Tolerances;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::lit(x)
}

/// Vector of i.i.d. standard complex Gaussians.
pub fn complex_gaussian_vec<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C<T>> {
    (0..n).map(|_| c(gaussian(rng), gaussian(rng))).collect()
}

/// Haar-distributed unitary: Gram–Schmidt QR of a complex Gaussian matrix.
///
/// Gram–Schmidt yields a positive real diagonal in R, which is exactly the
/// phase convention that makes Q Haar distributed.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix<T> {
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(d);
    while cols.len() < d {
        let mut v = complex_gaussian_vec::<T, _>(d, rng);
        // two passes keep the columns orthonormal to working precision
        for _ in 0..2 {
            for q in &cols {
                let proj = inner(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let n = norm_sqr(&v).sqrt();
        if n <= T::epsilon() {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    Matrix::from_columns(&cols)
}

/// Random Hermitian matrix with i.i.d. Gaussian entries (GUE up to scale).
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(d: usize, rng: &mut R) -> Matrix<T> {
    let g = Matrix::from_fn(d, d, |_, _| c(gaussian(rng), gaussian(rng)));
    g.hermitian_part()
}

/// Uniform point on the probability simplex of dimension `k`
/// (Dirichlet(1, ..., 1) via normalised exponentials).
pub fn dirichlet_flat<T: Real, R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<T> {
    loop {
        let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            return draws.into_iter().map(|x| T::lit(x / total)).collect();
        }
    }
}

/// Uniform split of `total` into `k` non-negative parts by sorted uniform
/// spacings.
pub fn uniform_spacings<T: Real, R: Rng + ?Sized>(k: usize, total: T, rng: &mut R) -> Vec<T> {
    if k == 0 {
        return Vec::new();
    }
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.random::<f64>()).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
    let mut prev = 0.0;
    let mut parts = Vec::with_capacity(k);
    for cut in cuts.into_iter().chain(std::iter::once(1.0)) {
        parts.push(total * T::lit(cut - prev));
        prev = cut;
    }
    parts
}

/// Density matrix of exact rank `rank`: Haar eigenbasis and a flat
/// Dirichlet spectrum on `rank` entries (zeros elsewhere).
pub fn random_density<T: Real, R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    if rank == 0 || rank > d {
        return Err(Error::RankOutOfRange { rank, dim: d });
    }
    let u = haar_unitary::<T, _>(d, rng);
    let mut values = dirichlet_flat::<T, _>(rank, rng);
    values.resize(d, T::zero());
    let vectors = (0..d).map(|j| u.column(j)).collect();
    DensityMatrix::from_eigenpairs(values, vectors, tol)
}

/// Random density matrix with a prescribed spectrum in a Haar basis.
pub fn random_basis_state<T: Real, R: Rng + ?Sized>(
    spectrum: &[T],
    rng: &mut R,
    tol: &Tolerances<T>,
) -> Result<DensityMatrix<T>> {
    let u = haar_unitary::<T, _>(spectrum.len(), rng);
    let vectors = (0..spectrum.len()).map(|j| u.column(j)).collect();
    DensityMatrix::from_eigenpairs(spectrum.to_vec(), vectors, tol)
}

/// Normalised Gaussian state vector.
pub fn random_pure_vector<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C<T>> {
    loop {
        let v = complex_gaussian_vec::<T, _>(n, rng);
        let norm = norm_sqr(&v).sqrt();
        if norm > T::zero() {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}
