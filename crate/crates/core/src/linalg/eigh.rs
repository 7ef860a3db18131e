//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, reducing the
//! 2x2 block to a real symmetric one, then applies the classical Jacobi
//! rotation. Jacobi is slow for large matrices but accurate to a few ulps on
//! the small dense operators this crate targets.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::matrix::{inner, Matrix};
use crate::scalar::{c_re, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in non-increasing order with their orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    values: Vec<T>,
    vectors: Vec<Vec<C<T>>>,
}

impl<T: Real> Spectrum<T> {
    /// Assembles a spectrum from already-orthonormal eigenpairs. Pairs are
    /// stably sorted into non-increasing eigenvalue order.
    pub fn from_pairs(values: Vec<T>, vectors: Vec<Vec<C<T>>>) -> Result<Self> {
        if values.len() != vectors.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: vectors.len(),
            });
        }
        let d = values.len();
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimMismatch {
                left: d,
                right: v.len(),
            });
        }
        let mut order: Vec<usize> = (0..d).collect();
        // `sort_by` is stable: exact ties keep the incoming order.
        order.sort_by(|&a, &b| {
            values[b]
                .partial_cmp(&values[a])
                .expect("finite eigenvalues")
        });
        Ok(Self {
            values: order.iter().map(|&i| values[i]).collect(),
            vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn vectors(&self) -> &[Vec<C<T>>] {
        &self.vectors
    }

    pub fn vector(&self, i: usize) -> &[C<T>] {
        &self.vectors[i]
    }

    /// Number of eigenvalues strictly above `tol`.
    pub fn rank(&self, tol: T) -> usize {
        self.values.iter().filter(|&&v| v > tol).count()
    }

    /// `sum_i values[i] v_i v_i^dagger`.
    pub fn reconstruct(&self) -> Matrix<T> {
        weighted_outer_sum(&self.values, &self.vectors)
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn basis_matrix(&self) -> Matrix<T> {
        Matrix::from_columns(&self.vectors)
    }

    /// Max |<v_i, v_j> - delta_ij|.
    pub fn orthonormality_error(&self) -> T {
        let mut worst = T::zero();
        for (i, vi) in self.vectors.iter().enumerate() {
            for (j, vj) in self.vectors.iter().enumerate() {
                let target = if i == j { C::one() } else { C::zero() };
                worst = worst.max((inner(vi, vj) - target).norm());
            }
        }
        worst
    }

    /// Projector onto the eigenvectors at `indices` (in the given order).
    pub fn projector(&self, indices: &[usize]) -> Result<Projector<T>> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim()) {
            return Err(Error::RankOutOfRange {
                rank: bad + 1,
                dim: self.dim(),
            });
        }
        Ok(Projector {
            dim: self.dim(),
            indices: indices.to_vec(),
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
        })
    }

    /// Projector onto the `r` leading eigenvectors.
    pub fn top_projector(&self, r: usize) -> Result<Projector<T>> {
        if r == 0 || r > self.dim() {
            return Err(Error::RankOutOfRange {
                rank: r,
                dim: self.dim(),
            });
        }
        self.projector(&(0..r).collect::<Vec<_>>())
    }

    /// Diagonal of `m` in this eigenbasis, `<v_i| m |v_i>` (real parts).
    pub fn diagonal_of(&self, m: &Matrix<T>) -> Result<Vec<T>> {
        self.vectors
            .iter()
            .map(|v| Ok(inner(v, &m.mat_vec(v)?).re))
            .collect()
    }

    /// `m` expressed in this eigenbasis: `V^dagger m V`.
    pub fn rotate_into(&self, m: &Matrix<T>) -> Result<Matrix<T>> {
        let v = self.basis_matrix();
        v.adjoint().matmul(m)?.matmul(&v)
    }
}

/// Orthogonal projector onto a subset of a spectrum's eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T> {
    dim: usize,
    indices: Vec<usize>,
    vectors: Vec<Vec<C<T>>>,
}

impl<T: Real> Projector<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Indices into the originating spectrum.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn rank(&self) -> usize {
        self.indices.len()
    }

    pub fn matrix(&self) -> Matrix<T> {
        let ones = vec![T::one(); self.vectors.len()];
        let mut m = weighted_outer_sum(&ones, &self.vectors);
        if self.vectors.is_empty() {
            m = Matrix::zeros(self.dim, self.dim);
        }
        m
    }
}

/// `sum_i w_i v_i v_i^dagger`.
pub(crate) fn weighted_outer_sum<T: Real>(weights: &[T], vectors: &[Vec<C<T>>]) -> Matrix<T> {
    let d = vectors.first().map_or(0, Vec::len);
    let mut m = Matrix::zeros(d, d);
    for (&w, v) in weights.iter().zip(vectors) {
        if w.is_zero() {
            continue;
        }
        for i in 0..d {
            let vi = v[i] * w;
            for j in 0..d {
                m[(i, j)] += vi * v[j].conj();
            }
        }
    }
    m
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Only the Hermitian part of `a` is used. Eigenvalues come back in
/// non-increasing order; exact ties keep the solver's output order.
pub fn eigh<T: Real>(a: &Matrix<T>) -> Result<Spectrum<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = Matrix::identity(n);

    let scale = m.frobenius_sqr().sqrt();
    let target = T::epsilon() * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= target || scale.is_zero() {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                iterations: sweeps,
                residual: off.to_f64_lossy(),
            });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let values = m.diagonal_re();
    let vectors = (0..n).map(|j| v.column(j)).collect();
    Spectrum::from_pairs(values, vectors)
}

/// Eigenvalues only, non-increasing.
pub fn eigvalsh<T: Real>(a: &Matrix<T>) -> Result<Vec<T>> {
    Ok(eigh(a)?.values)
}

fn off_diagonal_norm<T: Real>(m: &Matrix<T>) -> T {
    let n = m.rows();
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate<T: Real>(m: &mut Matrix<T>, v: &mut Matrix<T>, p: usize, q: usize) {
    let b = m[(p, q)];
    let abs_b = b.norm();
    if abs_b <= T::min_positive_value() {
        return;
    }
    let phase = b / abs_b;
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;

    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * abs_b);
    let t = if theta.abs() > T::max_value().sqrt() {
        T::one() / (two * theta)
    } else {
        let sign = if theta < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let cos = T::one() / (t * t + T::one()).sqrt();
    let sin = t * cos;

    // J restricted to (p, q): [[c, s], [-s e^{-i phi}, c e^{-i phi}]].
    let j_pp = c_re(cos);
    let j_pq = c_re(sin);
    let j_qp = phase.conj() * (-sin);
    let j_qq = phase.conj() * cos;

    let n = m.rows();
    for k in 0..n {
        let (akp, akq) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = akp * j_pp + akq * j_qp;
        m[(k, q)] = akp * j_pq + akq * j_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        m[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    m[(p, q)] = C::zero();
    m[(q, p)] = C::zero();
    m[(p, p)] = c_re(m[(p, p)].re);
    m[(q, q)] = c_re(m[(q, q)].re);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}
