//! Matrix subspaces of `n x n` matrices over the reals or the complex numbers.
//!
//! A [`MatrixSubspace`] keeps the matrices it was built from together with an
//! orthonormal basis of their numerical span. Matrices are vectorized in
//! column-major order; inner products are `tr(B^* A)`, with the real part
//! taken for subspaces over the reals.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, orthonormal_range, stack, unvectorize, vectorize};
use crate::scalar::{is_finite, Real, C};

/// Dense `n x n` matrix with complex entries.
pub type Mat<T> = DMatrix<C<T>>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Field of a product or sum: real only when both operands are real.
    pub fn join(self, other: Field) -> Field {
        if self == Field::Real && other == Field::Real {
            Field::Real
        } else {
            Field::Complex
        }
    }
}

/// Rank thresholds shared by one analysis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative to the largest singular value.
    pub rel_rank_tol: f64,
    /// Below this the largest singular value counts as zero.
    pub abs_floor: f64,
}

impl Tolerances {
    pub fn new(rel_rank_tol: f64, abs_floor: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(rel_rank_tol) || !ok(abs_floor) {
            return Err(Error::BadParameters(format!(
                "tolerances must be positive, got rel_rank_tol={rel_rank_tol}, abs_floor={abs_floor}"
            )));
        }
        Ok(Self {
            rel_rank_tol,
            abs_floor,
        })
    }

    /// Defaults suited to the precision of `T`.
    pub fn for_scalar<T: Real>() -> Self {
        Self {
            rel_rank_tol: T::DEFAULT_REL_RANK_TOL,
            abs_floor: T::DEFAULT_ABS_FLOOR,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::for_scalar::<f64>()
    }
}

/// Result of a membership query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Membership<T> {
    pub inside: bool,
    /// Frobenius norm of the component orthogonal to the subspace.
    pub residual: T,
}

#[derive(Clone, Debug)]
pub struct MatrixSubspace<T: Real> {
    n: usize,
    field: Field,
    raw_basis: Vec<Mat<T>>,
    /// `n² x dim`, orthonormal columns.
    ortho: DMatrix<C<T>>,
    tols: Tolerances,
}

impl<T: Real> MatrixSubspace<T> {
    /// Span of `mats`, with dimension equal to the numerical rank of the
    /// vectorized stack.
    pub fn from_matrices(mats: Vec<Mat<T>>, field: Field, tols: Tolerances) -> Result<Self> {
        let first = mats.first().ok_or(Error::EmptyInput)?;
        let n = first.nrows();
        if n == 0 {
            return Err(Error::BadParameters("matrices must be at least 1x1".into()));
        }
        for (i, m) in mats.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::MixedSizes {
                    expected: n,
                    found: if m.nrows() != n { m.nrows() } else { m.ncols() },
                });
            }
            if !m.iter().all(is_finite) {
                return Err(Error::NonFinite { what: "basis matrix" });
            }
            if field == Field::Real && m.iter().any(|z| z.im != T::zero()) {
                return Err(Error::RealFieldViolation { index: i });
            }
        }
        let ortho = orthonormal_range(&stack(&mats, n), field, &tols);
        Ok(Self {
            n,
            field,
            raw_basis: mats,
            ortho,
            tols,
        })
    }

    /// The zero subspace `{0}`.
    pub fn zero(n: usize, field: Field, tols: Tolerances) -> Self {
        Self {
            n,
            field,
            raw_basis: Vec::new(),
            ortho: DMatrix::zeros(n * n, 0),
            tols,
        }
    }

    /// All of `C^{n x n}` (or `R^{n x n}`), spanned by the unit matrices.
    pub fn full(n: usize, field: Field, tols: Tolerances) -> Self {
        let mut mats = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let mut m = Mat::<T>::zeros(n, n);
                m[(i, j)] = C::new(T::one(), T::zero());
                mats.push(m);
            }
        }
        Self::from_matrices(mats, field, tols).expect("unit matrices are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.ortho.ncols()
    }

    pub fn raw_basis(&self) -> &[Mat<T>] {
        &self.raw_basis
    }

    /// Orthonormal basis as the columns of an `n² x dim` matrix.
    pub fn ortho_basis(&self) -> &DMatrix<C<T>> {
        &self.ortho
    }

    /// Orthonormal basis reshaped into matrices.
    pub fn ortho_matrices(&self) -> Vec<Mat<T>> {
        self.ortho
            .column_iter()
            .map(|c| unvectorize(c.as_slice(), self.n))
            .collect()
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tols
    }

    /// Relative threshold used for rank and membership decisions.
    pub fn tol(&self) -> f64 {
        self.tols.rel_rank_tol
    }

    pub(crate) fn check_size(&self, a: &Mat<T>) -> Result<()> {
        if a.nrows() != self.n || a.ncols() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: a.nrows().max(a.ncols()),
            });
        }
        Ok(())
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Coordinates of the orthogonal projection of `a` in the orthonormal basis.
    pub fn coordinates(&self, a: &Mat<T>) -> Result<DVector<C<T>>> {
        self.check_size(a)?;
        let mut c = self.ortho.ad_mul(&vectorize(a));
        if self.field == Field::Real {
            c.iter_mut().for_each(|z| z.im = T::zero());
        }
        Ok(c)
    }

    /// Element with the given coordinates in the orthonormal basis.
    pub fn element(&self, coords: &DVector<C<T>>) -> Result<Mat<T>> {
        if coords.len() != self.dim() {
            return Err(Error::SizeMismatch {
                left: self.dim(),
                right: coords.len(),
            });
        }
        Ok(unvectorize((&self.ortho * coords).as_slice(), self.n))
    }

    /// Orthogonal projection of `a` onto the subspace.
    pub fn project(&self, a: &Mat<T>) -> Result<Mat<T>> {
        let c = self.coordinates(a)?;
        self.element(&c)
    }

    /// Distance from `a` to the subspace; `a` is inside when the residual is
    /// below `tol * max(1, ‖a‖_F)`.
    pub fn membership(&self, a: &Mat<T>) -> Result<Membership<T>> {
        let p = self.project(a)?;
        let residual = frobenius(&(a - p));
        let scale = frobenius(a).max(T::one());
        Ok(Membership {
            inside: residual < T::lit(self.tol()) * scale,
            residual,
        })
    }

    pub fn contains(&self, a: &Mat<T>) -> bool {
        self.membership(a).map(|m| m.inside).unwrap_or(false)
    }

    /// Mutual containment of orthonormal bases.
    pub fn same_span(&self, other: &Self) -> bool {
        self.n == other.n
            && self.dim() == other.dim()
            && other.ortho_matrices().iter().all(|m| self.contains(m))
            && self.ortho_matrices().iter().all(|m| other.contains(m))
    }

    /// `X · S · Y⁻¹`, built from the transformed raw basis.
    pub fn equivalence_transform(&self, x: &Mat<T>, y: &Mat<T>) -> Result<Self> {
        self.check_size(x)?;
        self.check_size(y)?;
        let tol = T::lit(self.tol());
        let rx = linalg::rcond(x);
        if rx <= tol {
            return Err(Error::SingularTransform {
                ratio: rx.to_f64_lossy(),
            });
        }
        let ry = linalg::rcond(y);
        let y_inv = match y.clone().try_inverse() {
            Some(inv) if ry > tol => inv,
            _ => {
                return Err(Error::SingularTransform {
                    ratio: ry.to_f64_lossy(),
                })
            }
        };
        if self.dim() == 0 {
            return Ok(Self::zero(self.n, self.field, self.tols));
        }
        let field = if self.field == Field::Real
            && x.iter().chain(y.iter()).all(|z| z.im == T::zero())
        {
            Field::Real
        } else {
            Field::Complex
        };
        let mut mats: Vec<Mat<T>> = self.raw_basis.iter().map(|b| x * b * &y_inv).collect();
        if field == Field::Real {
            // round-off in the inverse can leave tiny imaginary parts
            mats.iter_mut()
                .for_each(|m| m.iter_mut().for_each(|z| z.im = T::zero()));
        }
        Self::from_matrices(mats, field, self.tols)
    }

    /// Gaussian combination of the orthonormal basis, deterministic in `seed`.
    pub fn random_element(&self, seed: u64) -> Result<Mat<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_element_with(&mut rng)
    }

    pub(crate) fn random_element_with(&self, rng: &mut ChaCha8Rng) -> Result<Mat<T>> {
        let c = self.random_coordinates(rng)?;
        self.element(&c)
    }

    pub(crate) fn random_coordinates(&self, rng: &mut ChaCha8Rng) -> Result<DVector<C<T>>> {
        if self.dim() == 0 {
            return Err(Error::ZeroSubspace);
        }
        Ok(gaussian_vector(self.dim(), self.field, rng))
    }

    /// Span of the union of both bases.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mats: Vec<Mat<T>> = self
            .ortho_matrices()
            .into_iter()
            .chain(other.ortho_matrices())
            .collect();
        if mats.is_empty() {
            return Ok(Self::zero(self.n, self.field, self.tols));
        }
        Self::from_matrices(mats, self.field, self.tols)
    }

    /// Re-span with different tolerances.
    pub fn with_tolerances(&self, tols: Tolerances) -> Result<Self> {
        if self.raw_basis.is_empty() {
            return Ok(Self::zero(self.n, self.field, tols));
        }
        Self::from_matrices(self.raw_basis.clone(), self.field, tols)
    }
}

pub(crate) fn gaussian_vector<T: Real>(
    len: usize,
    field: Field,
    rng: &mut ChaCha8Rng,
) -> DVector<C<T>> {
    DVector::from_iterator(
        len,
        (0..len).map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = match field {
                Field::Real => 0.0,
                Field::Complex => StandardNormal.sample(rng),
            };
            C::new(T::lit(re), T::lit(im))
        }),
    )
}

/// Gaussian `n x n` matrix, real or complex.
pub fn random_matrix<T: Real>(n: usize, field: Field, seed: u64) -> Mat<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_matrix_with(n, field, &mut rng)
}

pub(crate) fn random_matrix_with<T: Real>(n: usize, field: Field, rng: &mut ChaCha8Rng) -> Mat<T> {
    let v = gaussian_vector::<T>(n * n, field, rng);
    unvectorize(v.as_slice(), n)
}
