//! Two-dimensional subspaces and zero-divisor structure.
//!
//! A nonsingular pencil `span{A, B}` is equivalent to `span{I, W1}` with
//! `W1 = B·Y⁻¹` for an invertible member `Y`; its minrank is read off the
//! geometric multiplicities of the eigenvalues of `W1`. For pairs of
//! normalized pencils `span{I, X1}`, `span{I, X2}` the product closes up to a
//! subspace exactly when `X1(cX2 − dI) = aX2 − bI` for some nontrivial
//! `(a, b, c, d)`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, checked_inverse, frobenius, identity, matrix_rank, rcond, stack, svd, svd_full_right, vectorize};
use crate::scalar::{modulus, re, Real, C};
use crate::subspace::{gaussian_vector, Field, Mat, MatrixSubspace, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PencilOptions {
    /// Random members tried when no basis matrix is invertible.
    pub max_tries: usize,
    pub seed: u64,
}

impl Default for PencilOptions {
    fn default() -> Self {
        Self {
            max_tries: 50,
            seed: 0,
        }
    }
}

/// Invertible member: the first invertible raw basis matrix, otherwise the
/// best conditioned of up to `max_tries` random members.
fn find_invertible<T: Real>(
    s: &MatrixSubspace<T>,
    opts: &PencilOptions,
    what: &'static str,
) -> Result<Mat<T>> {
    let tol = T::lit(s.tol());
    if let Some(b) = s.raw_basis().iter().find(|b| rcond(*b) > tol) {
        return Ok(b.clone());
    }
    let good_enough = tol.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(T, Mat<T>)> = None;
    for _ in 0..opts.max_tries {
        let y = s.random_element_with(&mut rng)?;
        let r = rcond(&y);
        if r > good_enough {
            return Ok(y);
        }
        if r > tol && best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, y));
        }
    }
    best.map(|(_, y)| y).ok_or(Error::NoInvertibleElementFound {
        what,
        tries: opts.max_tries,
    })
}

/// The basis matrix farthest (relatively) from `span{y}`.
fn complement_member<T: Real>(s: &MatrixSubspace<T>, y: &Mat<T>) -> Mat<T> {
    let line = MatrixSubspace::from_matrices(vec![y.clone()], s.field(), *s.tolerances())
        .expect("invertible matrix spans a line");
    let mut best = (T::zero(), s.raw_basis()[0].clone());
    for b in s.raw_basis().iter().chain(s.ortho_matrices().iter()) {
        let nb = frobenius(b);
        if nb.is_zero() {
            continue;
        }
        let r = line.membership(b).map(|m| m.residual).unwrap_or_else(|_| T::zero()) / nb;
        if r > best.0 {
            best = (r, b.clone());
        }
    }
    best.1
}

/// `S·Y⁻¹ = span{I, W1}`.
#[derive(Clone, Debug)]
pub struct PencilNormalForm<T: Real> {
    pub w1: Mat<T>,
    /// Invertible member used for the normalization.
    pub y: Mat<T>,
}

pub fn normalize_pencil<T: Real>(
    s: &MatrixSubspace<T>,
    opts: &PencilOptions,
) -> Result<PencilNormalForm<T>> {
    if s.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: s.dim(),
        });
    }
    let y = find_invertible(s, opts, "pencil")?;
    let y_inv = checked_inverse(&y, s.tolerances()).ok_or(Error::NoInvertibleElementFound {
        what: "pencil",
        tries: opts.max_tries,
    })?;
    let b = complement_member(s, &y);
    Ok(PencilNormalForm { w1: b * y_inv, y })
}

/// `X·S1 = span{I, X1}` and `S2·Y⁻¹ = span{I, X2}`.
#[derive(Clone, Debug)]
pub struct PairNormalForm<T: Real> {
    pub x1: Mat<T>,
    pub x2: Mat<T>,
    /// Left transform applied to `S1`.
    pub x: Mat<T>,
    /// Invertible member of `S2` whose inverse is applied on the right.
    pub y: Mat<T>,
}

pub fn normalize_pair<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    opts: &PencilOptions,
) -> Result<PairNormalForm<T>> {
    for s in [s1, s2] {
        if s.dim() != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                found: s.dim(),
            });
        }
    }
    let y1 = find_invertible(s1, opts, "S1")?;
    let y2 = find_invertible(s2, opts, "S2")?;
    let x = checked_inverse(&y1, s1.tolerances()).ok_or(Error::NoInvertibleElementFound {
        what: "S1",
        tries: opts.max_tries,
    })?;
    let y2_inv = checked_inverse(&y2, s2.tolerances()).ok_or(Error::NoInvertibleElementFound {
        what: "S2",
        tries: opts.max_tries,
    })?;
    let x1 = &x * complement_member(s1, &y1);
    let x2 = complement_member(s2, &y2) * &y2_inv;
    Ok(PairNormalForm { x1, x2, x, y: y2 })
}

/// Nontrivial `(a, b, c, d)` with `X1(cX2 − dI) = aX2 − bI`.
#[derive(Clone, Debug, PartialEq)]
pub struct LftWitness<T: Real> {
    pub a: C<T>,
    pub b: C<T>,
    pub c: C<T>,
    pub d: C<T>,
    /// `‖X1(cX2 − dI) − (aX2 − bI)‖_F`.
    pub residual: T,
}

impl<T: Real> LftWitness<T> {
    pub fn coefficients(&self) -> [C<T>; 4] {
        [self.a, self.b, self.c, self.d]
    }
}

impl<T: Real> Serialize for LftWitness<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let pair = |z: C<T>| [z.re.to_f64_lossy(), z.im.to_f64_lossy()];
        let mut st = serializer.serialize_struct("LftWitness", 5)?;
        st.serialize_field("a", &pair(self.a))?;
        st.serialize_field("b", &pair(self.b))?;
        st.serialize_field("c", &pair(self.c))?;
        st.serialize_field("d", &pair(self.d))?;
        st.serialize_field("residual", &self.residual.to_f64_lossy())?;
        st.end()
    }
}

/// `X1(cX2 − dI) − (aX2 − bI)`.
pub fn lft_residual<T: Real>(x1: &Mat<T>, x2: &Mat<T>, coef: [C<T>; 4]) -> T {
    let [a, b, c, d] = coef;
    let id = identity::<T>(x1.nrows());
    let lhs = x1 * (x2 * c - &id * d);
    let rhs = x2 * a - &id * b;
    frobenius(&(lhs - rhs))
}

/// Scales a null vector to unit norm with its first nonzero entry real and
/// positive.
fn normalize_witness<T: Real>(v: &DVector<C<T>>) -> DVector<C<T>> {
    let norm = v.norm();
    let mut v = v.unscale(norm);
    let cut = T::lit(1e-8);
    if let Some(z) = v.iter().find(|z| modulus(**z) > cut).copied() {
        let phase = z.conj().unscale(modulus(z));
        v.iter_mut().for_each(|x| *x *= phase);
    }
    v
}

/// Checks whether `{−X2, I, X1·X2, −X1}` is linearly dependent and returns
/// a normalized null vector `(a, b, c, d)` if it is.
///
/// When the null space has dimension above one the sparsest null vector is
/// returned, ties going to the lexicographically first support; with
/// `X1·X2 = 0` this is `(0, 0, 1, 0)`.
pub fn glft_check<T: Real>(x1: &Mat<T>, x2: &Mat<T>, tols: &Tolerances) -> Result<Option<LftWitness<T>>> {
    if x1.shape() != x2.shape() || x1.nrows() != x1.ncols() {
        return Err(Error::SizeMismatch {
            left: x1.nrows(),
            right: x2.nrows(),
        });
    }
    let n = x1.nrows();
    let cols = [-x2.clone(), identity::<T>(n), x1 * x2, -x1.clone()];
    let k = stack(&cols, n);
    let full = svd_full_right(&k, Field::Complex);
    if linalg::rank_of_sigma(&full.sigma, tols) > 3 {
        return Ok(None);
    }
    let cut = T::lit(tols.rel_rank_tol) * full.sigma[0];
    for size in 1..=4usize {
        for mask in 1u8..16 {
            if mask.count_ones() as usize != size {
                continue;
            }
            let support: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
            let sub = svd_full_right(&k.select_columns(support.iter()), Field::Complex);
            let last = size - 1;
            if sub.sigma[last] > cut {
                continue;
            }
            let mut v = DVector::zeros(4);
            for (slot, &i) in support.iter().enumerate() {
                v[i] = sub.v[(slot, last)];
            }
            // vanishing entries mean the true support is smaller
            if size < 4 && support.iter().any(|&i| modulus(v[i]) <= T::lit(1e-8)) {
                continue;
            }
            let v = normalize_witness(&v);
            let coef = [v[0], v[1], v[2], v[3]];
            return Ok(Some(LftWitness {
                a: coef[0],
                b: coef[1],
                c: coef[2],
                d: coef[3],
                residual: lft_residual(x1, x2, coef),
            }));
        }
    }
    unreachable!("rank <= 3 leaves a null vector on the full support")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CraigSakamoto {
    /// `‖X1·X2‖_F <= tol·‖X1‖_F·‖X2‖_F`.
    pub zero_product: bool,
    /// `det(I − tX1 − sX2) = det(I − tX1)·det(I − sX2)` on the whole grid.
    pub det_identity: bool,
    /// Largest scaled discrepancy of the determinant identity.
    pub max_gap: f64,
}

/// Relative tolerance for the determinant identity.
pub const DET_IDENTITY_TOL: f64 = 1e-8;

fn require_real_symmetric<T: Real>(x: &Mat<T>, tol: T, what: &'static str) -> Result<()> {
    let scale = frobenius(x).max(T::one());
    let asym = frobenius(&(x - x.transpose()));
    let imag = x.iter().fold(T::zero(), |m, z| m.max(z.im.abs()));
    if asym > tol * scale || imag > tol * scale {
        return Err(Error::NotSymmetric { what });
    }
    Ok(())
}

/// Compares the zero-product condition with the determinant factorization
/// on a `grid × grid` lattice of `(t, s) ∈ [−1, 1]²`.
///
/// A grid with more than `n` points per axis cannot miss a nonzero
/// discrepancy polynomial.
pub fn craig_sakamoto_check<T: Real>(
    x1: &Mat<T>,
    x2: &Mat<T>,
    grid: usize,
    tols: &Tolerances,
) -> Result<CraigSakamoto> {
    if x1.shape() != x2.shape() || x1.nrows() != x1.ncols() {
        return Err(Error::SizeMismatch {
            left: x1.nrows(),
            right: x2.nrows(),
        });
    }
    if grid == 0 {
        return Err(Error::BadParameters("grid must be at least 1".into()));
    }
    let tol = T::lit(tols.rel_rank_tol);
    require_real_symmetric(x1, tol, "X1")?;
    require_real_symmetric(x2, tol, "X2")?;
    let (n1, n2) = (frobenius(x1), frobenius(x2));
    let zero_product = frobenius(&(x1 * x2)) <= tol * n1 * n2;

    let n = x1.nrows();
    let r1 = x1.map(|z| z.re);
    let r2 = x2.map(|z| z.re);
    let id = DMatrix::<T>::identity(n, n);
    let pts: Vec<T> = if grid == 1 {
        vec![T::zero()]
    } else {
        (0..grid)
            .map(|i| T::lit(-1.0 + 2.0 * i as f64 / (grid - 1) as f64))
            .collect()
    };
    let mut max_gap = T::zero();
    for &t in &pts {
        let lt = (&id - &r1 * t).determinant();
        for &s in &pts {
            let lhs = (&id - &r1 * t - &r2 * s).determinant();
            let rhs = lt * (&id - &r2 * s).determinant();
            // Hadamard-type bound on |det(I − tX1 − sX2)|
            let scale = (T::one() + t.abs() * n1 + s.abs() * n2).powi(n as i32);
            max_gap = max_gap.max((lhs - rhs).abs() / scale);
        }
    }
    Ok(CraigSakamoto {
        zero_product,
        det_identity: max_gap <= T::lit(DET_IDENTITY_TOL),
        max_gap: max_gap.to_f64_lossy(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinrankMethod {
    Dim1Exact,
    Dim2Eigen,
    SampledUpperBound,
}

#[derive(Clone, Debug)]
pub struct MinrankReport<T: Real> {
    pub value: usize,
    pub certified: bool,
    /// Member of the subspace with rank `value`.
    pub witness: Mat<T>,
    pub method: MinrankMethod,
}

impl<T: Real> Serialize for MinrankReport<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("MinrankReport", 4)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("certified", &self.certified)?;
        st.serialize_field("method", &self.method)?;
        st.serialize_field("witness", &crate::io::MatrixFile::from_mat(&self.witness))?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinrankOptions {
    /// Random starts per target rank in the sampled search.
    pub starts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub pencil: PencilOptions,
}

impl Default for MinrankOptions {
    fn default() -> Self {
        Self {
            starts: 10,
            max_iter: 300,
            seed: 0,
            pencil: PencilOptions::default(),
        }
    }
}

/// Eigenvalues closer than this (relative) are merged before counting
/// geometric multiplicities.
pub const EIGEN_CLUSTER_GAP: f64 = 1e-6;

/// Schur eigenvalues. The default deflation threshold (machine epsilon)
/// can stall on derogatory matrices, so it is relaxed step by step.
fn eigenvalues<T: Real>(a: &Mat<T>) -> Result<Vec<C<T>>> {
    let max_niter = 200 * a.nrows().max(1);
    [16.0, 1e3, 1e5]
        .iter()
        .find_map(|&k| a.clone().try_schur(T::default_epsilon() * T::lit(k), max_niter))
        .map(|schur| {
            let (_, t) = schur.unpack();
            (0..a.nrows()).map(|i| t[(i, i)]).collect()
        })
        .ok_or(Error::NoConvergence { what: "Schur decomposition" })
}

fn cluster_eigenvalues<T: Real>(eigs: &[C<T>]) -> Vec<C<T>> {
    let gap = T::lit(EIGEN_CLUSTER_GAP);
    let mut clusters: Vec<(C<T>, usize)> = Vec::new();
    for &lambda in eigs {
        let hit = clusters.iter_mut().find(|(center, k)| {
            let c = *center / re(T::lit(*k as f64));
            modulus(lambda - c) < gap * T::one().max(modulus(lambda)).max(modulus(c))
        });
        match hit {
            Some((sum, k)) => {
                *sum += lambda;
                *k += 1;
            }
            None => clusters.push((lambda, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(sum, k)| sum / re(T::lit(k as f64)))
        .collect()
}

fn minrank_pencil<T: Real>(
    s: &MatrixSubspace<T>,
    opts: &MinrankOptions,
) -> Result<MinrankReport<T>> {
    let nf = normalize_pencil(s, &opts.pencil)?;
    let n = s.n();
    let tols = s.tolerances();
    let id = identity::<T>(n);
    let mut best: (usize, Mat<T>) = (n, nf.y.clone());
    for lambda in cluster_eigenvalues(&eigenvalues(&nf.w1)?) {
        let lambda = match s.field() {
            Field::Complex => lambda,
            Field::Real => {
                if lambda.im.abs() > T::lit(s.tol()) * T::one().max(modulus(lambda)) {
                    continue;
                }
                re(lambda.re)
            }
        };
        let shifted = &nf.w1 - &id * lambda;
        let r = matrix_rank(&shifted, tols);
        if r < best.0 && r > 0 {
            best = (r, shifted * &nf.y);
        }
    }
    Ok(MinrankReport {
        value: best.0,
        certified: true,
        witness: best.1,
        method: MinrankMethod::Dim2Eigen,
    })
}

/// Rank-`r` truncation by SVD.
fn truncate<T: Real>(a: &Mat<T>, r: usize, field: Field) -> Mat<T> {
    let s = svd(a, field);
    let mut out = Mat::<T>::zeros(a.nrows(), a.ncols());
    for k in 0..r.min(s.sigma.len()) {
        out += s.u.column(k) * s.v.column(k).adjoint() * re(s.sigma[k]);
    }
    out
}

/// Alternating projections between the rank-`r` matrices and the subspace.
fn low_rank_member<T: Real>(
    s: &MatrixSubspace<T>,
    r: usize,
    rng: &mut ChaCha8Rng,
    max_iter: usize,
) -> Result<Option<Mat<T>>> {
    let tols = s.tolerances();
    let stop = T::lit(tols.rel_rank_tol * 1e-2);
    let mut v = s.random_element_with(rng)?;
    for _ in 0..max_iter {
        let sigma = svd(&v, s.field()).sigma;
        let top = sigma[0];
        if top.is_zero() {
            return Ok(None);
        }
        if sigma.get(r).is_none_or(|&x| x <= stop * top) {
            break;
        }
        let l = truncate(&v, r, s.field());
        v = s.project(&l)?;
        let nv = frobenius(&v);
        if nv.is_zero() {
            return Ok(None);
        }
        v = v.unscale(nv);
    }
    let rank = matrix_rank(&v, tols);
    Ok((rank <= r && rank > 0).then_some(v))
}

fn minrank_sampled<T: Real>(
    s: &MatrixSubspace<T>,
    opts: &MinrankOptions,
) -> Result<MinrankReport<T>> {
    let tols = s.tolerances();
    let mut best: Option<(usize, Mat<T>)> = None;
    for b in s.raw_basis().iter().chain(s.ortho_matrices().iter()) {
        let r = matrix_rank(b, tols);
        if r > 0 && best.as_ref().is_none_or(|(v, _)| r < *v) {
            best = Some((r, b.clone()));
        }
    }
    let (mut value, mut witness) = best.ok_or(Error::ZeroSubspace)?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let upper = value;
    'targets: for r in 1..upper {
        for _ in 0..opts.starts {
            if let Some(v) = low_rank_member(s, r, &mut rng, opts.max_iter)? {
                value = matrix_rank(&v, tols);
                witness = v;
                break 'targets;
            }
        }
    }
    Ok(MinrankReport {
        value,
        certified: false,
        witness,
        method: MinrankMethod::SampledUpperBound,
    })
}

/// `min rank(V)` over nonzero members `V`.
///
/// Exact for dimension one, certified through the normal form `span{I, W1}`
/// for nonsingular pencils, and an uncertified upper bound otherwise.
pub fn minrank<T: Real>(s: &MatrixSubspace<T>, opts: &MinrankOptions) -> Result<MinrankReport<T>> {
    match s.dim() {
        0 => Err(Error::ZeroSubspace),
        1 => {
            let w = s.ortho_matrices().remove(0);
            Ok(MinrankReport {
                value: matrix_rank(&w, s.tolerances()),
                certified: true,
                witness: w,
                method: MinrankMethod::Dim1Exact,
            })
        }
        2 => match minrank_pencil(s, opts) {
            Err(Error::NoInvertibleElementFound { .. } | Error::NoConvergence { .. }) => {
                minrank_sampled(s, opts)
            }
            other => other,
        },
        _ => minrank_sampled(s, opts),
    }
}

/// Best pair found by the zero-product search.
#[derive(Clone, Debug)]
pub struct ZeroProductProbe<T: Real> {
    /// Smallest `‖V1·V2‖_F` over unit-Frobenius members found.
    pub min_product_norm: T,
    pub v1: Mat<T>,
    pub v2: Mat<T>,
    pub budget: usize,
    pub seed: u64,
}

/// Smallest right singular pair of `k` (coefficient space).
fn smallest_right<T: Real>(k: &DMatrix<C<T>>, field: Field) -> (T, DVector<C<T>>) {
    let s = svd_full_right(k, field);
    let last = s.v.ncols() - 1;
    (s.sigma[last], s.v.column(last).into_owned())
}

fn unit_coordinates<T: Real>(d: usize, field: Field, rng: &mut ChaCha8Rng) -> DVector<C<T>> {
    let v = gaussian_vector::<T>(d, field, rng);
    let n = v.norm();
    v.unscale(n)
}

/// Minimizes `‖V1·V2‖_F` over unit members by alternating smallest singular
/// vector steps, from `budget` random starts (start `i` seeded `seed + i`).
pub fn zero_product_probe<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    budget: usize,
    seed: u64,
) -> Result<ZeroProductProbe<T>> {
    s1.check_compatible(s2)?;
    if s1.dim() == 0 || s2.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    if budget == 0 {
        return Err(Error::BadParameters("budget must be at least 1".into()));
    }
    const SWEEPS: usize = 60;
    let n = s1.n();
    let field = s1.field();
    let (b1, b2) = (s1.ortho_matrices(), s2.ortho_matrices());
    let mut best: Option<ZeroProductProbe<T>> = None;
    for start in 0..budget as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(start));
        let mut a = unit_coordinates::<T>(b1.len(), field, &mut rng);
        let mut b = unit_coordinates::<T>(b2.len(), field, &mut rng);
        let mut value = T::max_value().unwrap_or_else(T::one);
        for _ in 0..SWEEPS {
            let v1 = s1.element(&a)?;
            let k2: Vec<Mat<T>> = b2.iter().map(|c| &v1 * c).collect();
            (_, b) = smallest_right(&stack(&k2, n), field);
            let v2 = s2.element(&b)?;
            let k1: Vec<Mat<T>> = b1.iter().map(|m| m * &v2).collect();
            let (sigma, next) = smallest_right(&stack(&k1, n), field);
            a = next;
            let improved = value - sigma;
            value = sigma;
            if value <= T::lit(1e-15) || improved <= T::lit(1e-13) * value {
                break;
            }
        }
        let (v1, v2) = (s1.element(&a)?, s2.element(&b)?);
        let norm = frobenius(&(&v1 * &v2));
        if best.as_ref().is_none_or(|p| norm < p.min_product_norm) {
            best = Some(ZeroProductProbe {
                min_product_norm: norm,
                v1,
                v2,
                budget,
                seed,
            });
        }
    }
    Ok(best.expect("budget >= 1"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ClosednessStatus {
    ClosedByMinrankSum,
    ClosedByZeroProductProbe,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MinrankSummary {
    pub value: usize,
    pub certified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProbeSummary {
    pub min_product_norm: f64,
    pub budget: usize,
    pub seed: u64,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosednessCertificate {
    pub status: ClosednessStatus,
    pub minrank1: MinrankSummary,
    pub minrank2: MinrankSummary,
    pub probe: Option<ProbeSummary>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClosednessOptions {
    pub budget: usize,
    pub seed: u64,
    /// Probe minima above this count as "no zero divisors found".
    pub zero_threshold: f64,
    pub minrank: MinrankOptions,
}

impl Default for ClosednessOptions {
    fn default() -> Self {
        Self {
            budget: 100,
            seed: 0,
            zero_threshold: 1e-6,
            minrank: MinrankOptions::default(),
        }
    }
}

/// Sufficient conditions for closedness of `S1·S2`. `Unknown` does not
/// assert that the product set fails to be closed.
pub fn closedness_certificate<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    opts: &ClosednessOptions,
) -> Result<ClosednessCertificate> {
    s1.check_compatible(s2)?;
    let summary = |r: MinrankReport<T>| MinrankSummary {
        value: r.value,
        certified: r.certified,
    };
    let m1 = summary(minrank(s1, &opts.minrank)?);
    let m2 = summary(minrank(s2, &opts.minrank)?);
    if m1.certified && m2.certified && m1.value + m2.value > s1.n() {
        return Ok(ClosednessCertificate {
            status: ClosednessStatus::ClosedByMinrankSum,
            minrank1: m1,
            minrank2: m2,
            probe: None,
        });
    }
    let probe = zero_product_probe(s1, s2, opts.budget, opts.seed)?;
    let min = probe.min_product_norm.to_f64_lossy();
    let status = if min > opts.zero_threshold {
        ClosednessStatus::ClosedByZeroProductProbe
    } else {
        ClosednessStatus::Unknown
    };
    Ok(ClosednessCertificate {
        status,
        minrank1: m1,
        minrank2: m2,
        probe: Some(ProbeSummary {
            min_product_norm: min,
            budget: opts.budget,
            seed: opts.seed,
            threshold: opts.zero_threshold,
        }),
    })
}

/// Factors `tI + X1 + ... + Xk` as `(tI + X1)(I + X2/t)···(I + Xk/t)` when
/// `Xj·Xl = 0` for `j < l`.
pub fn chain_factor<T: Real>(t: C<T>, xs: &[Mat<T>], tols: &Tolerances) -> Result<Vec<Mat<T>>> {
    if modulus(t) <= T::lit(tols.abs_floor) {
        return Err(Error::ZeroT);
    }
    let Some(first) = xs.first() else {
        return Err(Error::EmptyInput);
    };
    let n = first.nrows();
    for x in xs {
        if x.nrows() != n || x.ncols() != n {
            return Err(Error::SizeMismatch {
                left: n,
                right: x.nrows().max(x.ncols()),
            });
        }
    }
    let tol = T::lit(tols.rel_rank_tol);
    for j in 0..xs.len() {
        for l in j + 1..xs.len() {
            let scale = frobenius(&xs[j]) * frobenius(&xs[l]);
            if scale.is_zero() {
                continue;
            }
            let ratio = frobenius(&(&xs[j] * &xs[l])) / scale;
            if ratio >= tol {
                return Err(Error::ChainConditionViolated {
                    j: j + 1,
                    l: l + 1,
                    ratio: ratio.to_f64_lossy(),
                });
            }
        }
    }
    let id = identity::<T>(n);
    let mut out = vec![&id * t + first];
    out.extend(xs[1..].iter().map(|x| &id + x.unscale(T::one()) / t));
    Ok(out)
}

/// `vec` of `V1·V2` for coordinate vectors, used by the oracle tests.
#[doc(hidden)]
pub fn product_norm<T: Real>(s1: &MatrixSubspace<T>, s2: &MatrixSubspace<T>, a: &DVector<C<T>>, b: &DVector<C<T>>) -> Result<T> {
    Ok(vectorize(&(s1.element(a)? * s2.element(b)?)).norm())
}
