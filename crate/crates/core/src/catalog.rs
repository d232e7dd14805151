//! Structured matrix subspaces: triangular, band, Toeplitz, circulant,
//! symmetric, rank-limited, Hurwitz–Radon and Krylov families.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mats::{cyclic_shift, exchange, eye, unit, upper_shift};
use crate::scalar::{cf64, Real};
use crate::subspace::{Field, Mat, MatrixSubspace, Tolerances};

#[derive(Clone, Debug, PartialEq)]
pub enum CatalogKind<T: Real> {
    Diagonal,
    Circulant,
    LowerTriangular,
    UpperTriangular,
    /// Upper triangular with a constant diagonal.
    UnitUpperConstantDiagonal,
    /// Lower triangular with a constant diagonal.
    UnitLowerConstantDiagonal,
    /// Lower bandwidth `p`, nothing above the diagonal.
    BandLower(usize),
    /// Upper bandwidth `q`, nothing below the diagonal.
    BandUpper(usize),
    ToeplitzUpperTriangular,
    ToeplitzLowerTriangular,
    Symmetric,
    /// Symmetric matrices whose antidiagonal is constant.
    PersymmetricConstantAntidiagonal,
    /// Last `n - k` columns zero.
    RankCols(usize),
    /// Last `n - k` rows zero.
    RankRows(usize),
    /// `span{I, [[0,-1],[1,0]]}` over the reals, `n = 2` only.
    HurwitzRadon2,
    /// `span{I, A, A², ...}` up to the numerical degree of `A`, at most
    /// `max_power` elements.
    Krylov { a: Mat<T>, max_power: usize },
}

impl<T: Real> CatalogKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            CatalogKind::Diagonal => "diagonal",
            CatalogKind::Circulant => "circulant",
            CatalogKind::LowerTriangular => "lower_triangular",
            CatalogKind::UpperTriangular => "upper_triangular",
            CatalogKind::UnitUpperConstantDiagonal => "unit_upper_constant_diagonal",
            CatalogKind::UnitLowerConstantDiagonal => "unit_lower_constant_diagonal",
            CatalogKind::BandLower(_) => "band_lower",
            CatalogKind::BandUpper(_) => "band_upper",
            CatalogKind::ToeplitzUpperTriangular => "toeplitz_upper_triangular",
            CatalogKind::ToeplitzLowerTriangular => "toeplitz_lower_triangular",
            CatalogKind::Symmetric => "symmetric",
            CatalogKind::PersymmetricConstantAntidiagonal => "persymmetric_constant_antidiagonal",
            CatalogKind::RankCols(_) => "rank_cols",
            CatalogKind::RankRows(_) => "rank_rows",
            CatalogKind::HurwitzRadon2 => "hurwitz_radon_2",
            CatalogKind::Krylov { .. } => "krylov",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogSpec<T: Real> {
    pub kind: CatalogKind<T>,
    pub n: usize,
    pub field: Field,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CatalogFlags {
    /// Inverses of invertible members stay in the subspace.
    pub inverse_closed: bool,
    pub contains_identity: bool,
}

impl<T: Real> CatalogSpec<T> {
    pub fn new(kind: CatalogKind<T>, n: usize, field: Field) -> Self {
        Self { kind, n, field }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let bad = |msg: String| Err(Error::BadParameters(msg));
        if n == 0 {
            return bad("n must be positive".into());
        }
        match &self.kind {
            CatalogKind::BandLower(p) | CatalogKind::BandUpper(p) if *p > n - 1 => {
                bad(format!("bandwidth {p} exceeds n-1 = {}", n - 1))
            }
            CatalogKind::RankCols(k) | CatalogKind::RankRows(k) if *k == 0 || *k > n => {
                bad(format!("rank parameter k = {k} outside 1..={n}"))
            }
            CatalogKind::HurwitzRadon2 if n != 2 || self.field != Field::Real => {
                bad("hurwitz_radon_2 requires n = 2 over the reals".into())
            }
            CatalogKind::Krylov { a, max_power } => {
                if *max_power == 0 {
                    return bad("max_power must be at least 1".into());
                }
                if a.nrows() != n || a.ncols() != n {
                    return bad(format!("Krylov matrix must be {n}x{n}"));
                }
                if self.field == Field::Real && a.iter().any(|z| z.im != T::zero()) {
                    return bad("Krylov matrix must be real over the reals".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Builds the subspace named by `spec` together with its structural flags.
pub fn make_subspace<T: Real>(
    spec: &CatalogSpec<T>,
    tols: Tolerances,
) -> Result<(MatrixSubspace<T>, CatalogFlags)> {
    spec.validate()?;
    let (n, field) = (spec.n, spec.field);
    let s = match &spec.kind {
        CatalogKind::Diagonal => diagonal(n, field, tols),
        CatalogKind::Circulant => circulant(n, field, tols),
        CatalogKind::LowerTriangular => lower_triangular(n, field, tols),
        CatalogKind::UpperTriangular => upper_triangular(n, field, tols),
        CatalogKind::UnitUpperConstantDiagonal => unit_upper_constant_diagonal(n, field, tols),
        CatalogKind::UnitLowerConstantDiagonal => unit_lower_constant_diagonal(n, field, tols),
        CatalogKind::BandLower(p) => band(n, *p, 0, field, tols),
        CatalogKind::BandUpper(q) => band(n, 0, *q, field, tols),
        CatalogKind::ToeplitzUpperTriangular => toeplitz_upper_triangular(n, field, tols),
        CatalogKind::ToeplitzLowerTriangular => toeplitz_lower_triangular(n, field, tols),
        CatalogKind::Symmetric => symmetric(n, field, tols),
        CatalogKind::PersymmetricConstantAntidiagonal => {
            symmetric_constant_antidiagonal(n, field, tols)
        }
        CatalogKind::RankCols(k) => rank_cols(n, *k, field, tols),
        CatalogKind::RankRows(k) => rank_rows(n, *k, field, tols),
        CatalogKind::HurwitzRadon2 => hurwitz_radon_2(tols),
        CatalogKind::Krylov { a, max_power } => krylov(a, *max_power, field, tols)?,
    };
    let inverse_closed = match &spec.kind {
        CatalogKind::Diagonal
        | CatalogKind::Circulant
        | CatalogKind::LowerTriangular
        | CatalogKind::UpperTriangular
        | CatalogKind::UnitUpperConstantDiagonal
        | CatalogKind::UnitLowerConstantDiagonal
        | CatalogKind::ToeplitzUpperTriangular
        | CatalogKind::ToeplitzLowerTriangular
        | CatalogKind::Symmetric
        | CatalogKind::HurwitzRadon2 => true,
        // a band of full width is a triangular subspace
        CatalogKind::BandLower(p) | CatalogKind::BandUpper(p) => *p + 1 >= n,
        CatalogKind::RankCols(k) | CatalogKind::RankRows(k) => *k == n,
        CatalogKind::PersymmetricConstantAntidiagonal => n <= 2,
        // polynomials in A contain the inverse once the full degree is reached
        CatalogKind::Krylov { a, .. } => s.dim() == krylov_degree(a, field, tols),
    };
    let contains_identity = s.contains(&eye(n));
    Ok((
        s,
        CatalogFlags {
            inverse_closed,
            contains_identity,
        },
    ))
}

fn span<T: Real>(mats: Vec<Mat<T>>, n: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    if mats.is_empty() {
        return MatrixSubspace::zero(n, field, tols);
    }
    MatrixSubspace::from_matrices(mats, field, tols).expect("catalog bases are well formed")
}

fn units_where<T: Real>(n: usize, keep: impl Fn(usize, usize) -> bool) -> Vec<Mat<T>> {
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            if keep(i, j) {
                out.push(unit(n, i, j));
            }
        }
    }
    out
}

pub fn diagonal<T: Real>(n: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    span(units_where(n, |i, j| i == j), n, field, tols)
}

pub fn circulant<T: Real>(n: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    let p = cyclic_shift::<T>(n);
    let mut mats = vec![eye::<T>(n)];
    for k in 1..n {
        let next = &p * &mats[k - 1];
        mats.push(next);
    }
    span(mats, n, field, tols)
}

pub fn lower_triangular<T: Real>(n: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    span(units_where(n, |i, j| i >= j), n, field, tols)
}

pub fn upper_triangular<T: Real>(n: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    span(units_where(n, |i, j| i <= j), n, field, tols)
}

pub fn unit_upper_constant_diagonal<T: Real>(
    n: usize,
    field: Field,
    tols: Tolerances,
) -> MatrixSubspace<T> {
    let mut mats = vec![eye(n)];
    mats.extend(units_where(n, |i, j| i < j));
    span(mats, n, field, tols)
}

pub fn unit_lower_constant_diagonal<T: Real>(
    n: usize,
    field: Field,
    tols: Tolerances,
) -> MatrixSubspace<T> {
    let mut mats = vec![eye(n)];
    mats.extend(units_where(n, |i, j| i > j));
    span(mats, n, field, tols)
}

/// `(p, q)`-band matrices: `-p <= j - i <= q`.
pub fn band<T: Real>(
    n: usize,
    p: usize,
    q: usize,
    field: Field,
    tols: Tolerances,
) -> MatrixSubspace<T> {
    span(
        units_where(n, |i, j| i <= j + p && j <= i + q),
        n,
        field,
        tols,
    )
}

pub fn toeplitz_upper_triangular<T: Real>(
    n: usize,
    field: Field,
    tols: Tolerances,
) -> MatrixSubspace<T> {
    let s = upper_shift::<T>(n);
    let mut mats = vec![eye::<T>(n)];
    for k in 1..n {
        let next = &mats[k - 1] * &s;
        mats.push(next);
    }
    span(mats, n, field, tols)
}

pub fn toeplitz_lower_triangular<T: Real>(
    n: usize,
    field: Field,
    tols: Tolerances,
) -> MatrixSubspace<T> {
    let s = upper_shift::<T>(n).transpose();
    let mut mats = vec![eye::<T>(n)];
    for k in 1..n {
        let next = &mats[k - 1] * &s;
        mats.push(next);
    }
    span(mats, n, field, tols)
}

fn sym_unit<T: Real>(n: usize, i: usize, j: usize) -> Mat<T> {
    if i == j {
        unit(n, i, i)
    } else {
        unit::<T>(n, i, j) + unit::<T>(n, j, i)
    }
}

pub fn symmetric<T: Real>(n: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    let mut mats = Vec::new();
    for j in 0..n {
        for i in 0..=j {
            mats.push(sym_unit(n, i, j));
        }
    }
    span(mats, n, field, tols)
}

/// Symmetric matrices with a constant antidiagonal.
pub fn symmetric_constant_antidiagonal<T: Real>(
    n: usize,
    field: Field,
    tols: Tolerances,
) -> MatrixSubspace<T> {
    let mut mats = vec![exchange(n)];
    for j in 0..n {
        for i in 0..=j {
            if i + j + 1 != n {
                mats.push(sym_unit(n, i, j));
            }
        }
    }
    span(mats, n, field, tols)
}

pub fn rank_cols<T: Real>(n: usize, k: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    span(units_where(n, |_, j| j < k), n, field, tols)
}

pub fn rank_rows<T: Real>(n: usize, k: usize, field: Field, tols: Tolerances) -> MatrixSubspace<T> {
    span(units_where(n, |i, _| i < k), n, field, tols)
}

pub fn hurwitz_radon_2<T: Real>(tols: Tolerances) -> MatrixSubspace<T> {
    let mut rot = Mat::<T>::zeros(2, 2);
    rot[(0, 1)] = cf64(-1.0, 0.0);
    rot[(1, 0)] = cf64(1.0, 0.0);
    span(vec![eye(2), rot], 2, Field::Real, tols)
}

/// Krylov subspace `span{I, A, A², ...}`: powers are appended until one lies
/// in the span of its predecessors, or `max_power` elements are collected.
pub fn krylov<T: Real>(
    a: &Mat<T>,
    max_power: usize,
    field: Field,
    tols: Tolerances,
) -> Result<MatrixSubspace<T>> {
    let n = a.nrows();
    let mut mats = vec![eye::<T>(n)];
    let mut current = MatrixSubspace::from_matrices(mats.clone(), field, tols)?;
    while mats.len() < max_power {
        let next = a * mats.last().unwrap();
        if current.contains(&next) {
            break;
        }
        mats.push(next);
        current = MatrixSubspace::from_matrices(mats.clone(), field, tols)?;
    }
    Ok(current)
}

/// Numerical degree of the minimal polynomial of `a`.
pub fn krylov_degree<T: Real>(a: &Mat<T>, field: Field, tols: Tolerances) -> usize {
    krylov(a, a.nrows() + 1, field, tols)
        .map(|s| s.dim())
        .unwrap_or(0)
}

/// Genericity of `D = diag(d)` for the symmetric × constant-antidiagonal
/// product: every `d_j` nonzero and the products `d_j d_{n-j+1}` pairwise
/// distinct for `j != k`, `k != n-j+1` (relative tolerance `1e-10`).
pub fn persym_genericity_check(d: &[f64]) -> bool {
    const REL: f64 = 1e-10;
    let n = d.len();
    let scale = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || d.iter().any(|x| x.abs() <= REL * scale) {
        return false;
    }
    let prod = |j: usize| d[j] * d[n - 1 - j];
    for j in 0..n {
        for k in 0..n {
            if k == j || k == n - 1 - j {
                continue;
            }
            let (a, b) = (prod(j), prod(k));
            if (a - b).abs() <= REL * a.abs().max(b.abs()) {
                return false;
            }
        }
    }
    true
}
