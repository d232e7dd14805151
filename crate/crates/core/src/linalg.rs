//! Dense helpers shared by the analysis modules: vectorization, sorted SVD,
//! numerical rank and orthonormal ranges.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::subspace::{Field, Mat, Tolerances};

/// Column-major vectorization of an `n x n` matrix into a length-`n²` vector.
pub fn vectorize<T: Real>(m: &Mat<T>) -> DVector<C<T>> {
    DVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn unvectorize<T: Real>(v: &[C<T>], n: usize) -> Mat<T> {
    debug_assert_eq!(v.len(), n * n);
    DMatrix::from_column_slice(n, n, v)
}

/// Stacks vectorized matrices as the columns of an `n² x len` matrix.
pub(crate) fn stack<T: Real>(mats: &[Mat<T>], n: usize) -> DMatrix<C<T>> {
    let mut out = DMatrix::zeros(n * n, mats.len());
    for (j, m) in mats.iter().enumerate() {
        out.column_mut(j).copy_from_slice(m.as_slice());
    }
    out
}

pub(crate) fn frobenius<T: Real>(m: &DMatrix<C<T>>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

pub(crate) fn identity<T: Real>(n: usize) -> Mat<T> {
    DMatrix::identity(n, n)
}

/// Thin SVD with singular values sorted in decreasing order.
///
/// `u` is `m x p` and `v` is `k x p` (right singular vectors as columns) with
/// `p = min(m, k)`. Over the reals the decomposition is computed in real
/// arithmetic so that the factors stay real.
pub(crate) struct Svd<T: Real> {
    pub sigma: Vec<T>,
    pub u: DMatrix<C<T>>,
    pub v: DMatrix<C<T>>,
}

pub(crate) fn svd<T: Real>(a: &DMatrix<C<T>>, field: Field) -> Svd<T> {
    let (sigma, u, v) = match field {
        Field::Real => {
            let real = a.map(|z| z.re);
            let s = real.svd(true, true);
            let u = s.u.expect("u requested").map(|x| C::new(x, T::zero()));
            let v = s
                .v_t
                .expect("v_t requested")
                .transpose()
                .map(|x| C::new(x, T::zero()));
            (s.singular_values.as_slice().to_vec(), u, v)
        }
        Field::Complex => {
            let s = a.clone().svd(true, true);
            let u = s.u.expect("u requested");
            let v = s.v_t.expect("v_t requested").adjoint();
            (s.singular_values.as_slice().to_vec(), u, v)
        }
    };
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| {
        sigma[j]
            .partial_cmp(&sigma[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Svd {
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        u: u.select_columns(order.iter()),
        v: v.select_columns(order.iter()),
    }
}

/// Full set of right singular vectors: pads with zero rows when the matrix
/// is wide so that `v` is square. Singular values of the padding are zero.
pub(crate) fn svd_full_right<T: Real>(a: &DMatrix<C<T>>, field: Field) -> Svd<T> {
    if a.nrows() >= a.ncols() {
        return svd(a, field);
    }
    let mut padded = DMatrix::zeros(a.ncols(), a.ncols());
    padded.rows_mut(0, a.nrows()).copy_from(a);
    svd(&padded, field)
}

/// Count of singular values above the relative threshold.
pub(crate) fn rank_of_sigma<T: Real>(sigma: &[T], tols: &Tolerances) -> usize {
    let smax = sigma.iter().copied().fold(T::zero(), |a, b| a.max(b));
    if smax < T::lit(tols.abs_floor) || smax.is_zero() {
        return 0;
    }
    let cut = T::lit(tols.rel_rank_tol) * smax;
    sigma.iter().filter(|&&s| s > cut).count()
}

/// Orthonormal basis (as columns) of the numerical range of `a`.
pub(crate) fn orthonormal_range<T: Real>(
    a: &DMatrix<C<T>>,
    field: Field,
    tols: &Tolerances,
) -> DMatrix<C<T>> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let s = svd(a, field);
    let r = rank_of_sigma(&s.sigma, tols);
    s.u.columns(0, r).into_owned()
}

/// Numerical rank of a square or rectangular complex matrix.
pub fn matrix_rank<T: Real>(a: &DMatrix<C<T>>, tols: &Tolerances) -> usize {
    if a.is_empty() {
        return 0;
    }
    rank_of_sigma(&svd(a, Field::Complex).sigma, tols)
}

/// Numerical rank of a set of equal-length vectors.
///
/// Counts singular values of the stacked matrix above `rel_rank_tol * σ_max`,
/// and returns zero when `σ_max < abs_floor`.
pub fn numerical_rank<T: Real>(vectors: &[Vec<C<T>>], tols: &Tolerances) -> Result<usize> {
    let first = vectors.first().ok_or(Error::EmptyInput)?;
    let m = first.len();
    if m == 0 {
        return Err(Error::EmptyInput);
    }
    let mut a = DMatrix::zeros(m, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        if v.len() != m {
            return Err(Error::SizeMismatch {
                left: m,
                right: v.len(),
            });
        }
        if !v.iter().all(crate::scalar::is_finite) {
            return Err(Error::NonFinite { what: "vector" });
        }
        a.column_mut(j).copy_from_slice(v);
    }
    Ok(rank_of_sigma(&svd(&a, Field::Complex).sigma, tols))
}

/// Ratio `σ_min / σ_max` of a square matrix, zero for the zero matrix.
pub(crate) fn rcond<T: Real>(a: &Mat<T>) -> T {
    let s = svd(a, Field::Complex).sigma;
    let smax = s.first().copied().unwrap_or_else(T::zero);
    if smax.is_zero() {
        return T::zero();
    }
    *s.last().unwrap() / smax
}

/// Inverse when `σ_min > rel_rank_tol * σ_max`.
pub(crate) fn checked_inverse<T: Real>(a: &Mat<T>, tols: &Tolerances) -> Option<Mat<T>> {
    if rcond(a) <= T::lit(tols.rel_rank_tol) {
        return None;
    }
    a.clone().try_inverse()
}

/// `⟨a, b⟩ = tr(b^* a)`; the real part is taken over the reals.
pub fn inner<T: Real>(a: &Mat<T>, b: &Mat<T>, field: Field) -> C<T> {
    let z = a
        .iter()
        .zip(b.iter())
        .fold(C::zero(), |acc, (x, y)| acc + y.conj() * x);
    match field {
        Field::Real => C::new(z.re, T::zero()),
        Field::Complex => z,
    }
}
