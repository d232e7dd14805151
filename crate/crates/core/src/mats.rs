//! Small constructors for concrete matrices.

use crate::scalar::{cf64, Real, C};
use crate::subspace::Mat;

pub fn eye<T: Real>(n: usize) -> Mat<T> {
    Mat::identity(n, n)
}

/// The unit matrix `E_ij` (zero-based indices).
pub fn unit<T: Real>(n: usize, i: usize, j: usize) -> Mat<T> {
    let mut m = Mat::zeros(n, n);
    m[(i, j)] = C::new(T::one(), T::zero());
    m
}

pub fn diag<T: Real>(d: &[f64]) -> Mat<T> {
    let n = d.len();
    let mut m = Mat::zeros(n, n);
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = cf64(x, 0.0);
    }
    m
}

/// Real matrix from rows.
pub fn from_rows<T: Real>(rows: &[&[f64]]) -> Mat<T> {
    let n = rows.len();
    Mat::from_fn(n, rows[0].len(), |i, j| cf64(rows[i][j], 0.0))
}

/// Antidiagonal permutation `J`.
pub fn exchange<T: Real>(n: usize) -> Mat<T> {
    Mat::from_fn(n, n, |i, j| {
        if i + j + 1 == n {
            C::new(T::one(), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

/// Cyclic down-shift `P e_j = e_{j+1 mod n}`.
pub fn cyclic_shift<T: Real>(n: usize) -> Mat<T> {
    Mat::from_fn(n, n, |i, j| {
        if i == (j + 1) % n {
            C::new(T::one(), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}

/// Nilpotent shift with ones on the first superdiagonal.
pub fn upper_shift<T: Real>(n: usize) -> Mat<T> {
    Mat::from_fn(n, n, |i, j| {
        if j == i + 1 {
            C::new(T::one(), T::zero())
        } else {
            C::new(T::zero(), T::zero())
        }
    })
}
