//! Structure constants of the product map and the bilinear system
//! `M(z)w = b` they define.
//!
//! With bases `V^s` of `S1`, `V^t` of `S2` and `W^r` of the linearization,
//! `V^s·V^t = Σ_r (M_r)_{s,t} W^r`, so the product of `Σ z_s V^s` and
//! `Σ w_t V^t` has coordinates `zᵀ M_r w`.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::linearization;
use crate::io::{MatrixFile, SubspaceFile};
use crate::linalg::{frobenius, inner, rcond, stack, svd, svd_full_right, vectorize};
use crate::scalar::{re, Real, C};
use crate::subspace::{gaussian_vector, Field, Mat, MatrixSubspace, Tolerances};

#[derive(Clone, Debug)]
pub struct BilinearModel<T: Real> {
    /// `dim S1`.
    pub j: usize,
    /// `dim S2`.
    pub kmj: usize,
    /// Dimension of the linearization.
    pub l: usize,
    /// `l` matrices of shape `j x kmj`.
    pub m: Vec<DMatrix<C<T>>>,
    pub basis1: Vec<Mat<T>>,
    pub basis2: Vec<Mat<T>>,
    pub lin_basis: Vec<Mat<T>>,
    pub field: Field,
    /// Matrix size of the bases, zero for models built from constants.
    pub n: usize,
}

/// Model in the orthonormal bases of `S1`, `S2` and their linearization.
pub fn extract_bilinear<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
) -> Result<BilinearModel<T>> {
    s1.check_compatible(s2)?;
    let lin = linearization(s1, s2)?;
    let (b1, b2, w) = (s1.ortho_matrices(), s2.ortho_matrices(), lin.ortho_matrices());
    let field = s1.field();
    let m = w
        .iter()
        .map(|wr| {
            DMatrix::from_fn(b1.len(), b2.len(), |s, t| inner(&(&b1[s] * &b2[t]), wr, field))
        })
        .collect();
    Ok(BilinearModel {
        j: b1.len(),
        kmj: b2.len(),
        l: w.len(),
        m,
        basis1: b1,
        basis2: b2,
        lin_basis: w,
        field,
        n: s1.n(),
    })
}

/// Model in caller-chosen bases; `lin_basis` must be linearly independent
/// and span every product `basis1[s]·basis2[t]`.
pub fn extract_bilinear_in_bases<T: Real>(
    basis1: &[Mat<T>],
    basis2: &[Mat<T>],
    lin_basis: &[Mat<T>],
    field: Field,
    tols: &Tolerances,
) -> Result<BilinearModel<T>> {
    let n = lin_basis.first().ok_or(Error::EmptyInput)?.nrows();
    if basis1.is_empty() || basis2.is_empty() {
        return Err(Error::EmptyInput);
    }
    for m in basis1.iter().chain(basis2).chain(lin_basis) {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::MixedSizes {
                expected: n,
                found: m.nrows().max(m.ncols()),
            });
        }
    }
    let w = stack(lin_basis, n);
    let dec = svd(&w, field);
    let l = lin_basis.len();
    let independent = crate::linalg::rank_of_sigma(&dec.sigma, tols);
    if independent != l {
        return Err(Error::WrongDimension {
            expected: l,
            found: independent,
        });
    }
    let tol = T::lit(tols.rel_rank_tol);
    let mut m = vec![DMatrix::zeros(basis1.len(), basis2.len()); l];
    for (s, v1) in basis1.iter().enumerate() {
        for (t, v2) in basis2.iter().enumerate() {
            let p = vectorize(&(v1 * v2));
            // least squares through the thin SVD
            let mut coef = dec.v.clone() * DVector::from_fn(l, |k, _| {
                dec.u.column(k).dotc(&p) / re(dec.sigma[k])
            });
            if field == Field::Real {
                coef.iter_mut().for_each(|z| z.im = T::zero());
            }
            let residual = (&w * &coef - &p).norm();
            if residual > tol * p.norm().max(T::one()) {
                return Err(Error::NotMember {
                    what: "basis product",
                    residual: residual.to_f64_lossy(),
                });
            }
            for (r, mr) in m.iter_mut().enumerate() {
                mr[(s, t)] = coef[r];
            }
        }
    }
    Ok(BilinearModel {
        j: basis1.len(),
        kmj: basis2.len(),
        l,
        m,
        basis1: basis1.to_vec(),
        basis2: basis2.to_vec(),
        lin_basis: lin_basis.to_vec(),
        field,
        n,
    })
}

impl<T: Real> BilinearModel<T> {
    /// Model from structure constants alone; the bases stay empty.
    pub fn from_constants(m: Vec<DMatrix<C<T>>>, field: Field) -> Result<Self> {
        let first = m.first().ok_or(Error::EmptyInput)?;
        let (j, kmj) = first.shape();
        if j == 0 || kmj == 0 {
            return Err(Error::EmptyInput);
        }
        if let Some(bad) = m.iter().find(|x| x.shape() != (j, kmj)) {
            return Err(Error::SizeMismatch {
                left: j * kmj,
                right: bad.nrows() * bad.ncols(),
            });
        }
        if field == Field::Real && m.iter().flatten().any(|z| !z.im.is_zero()) {
            return Err(Error::RealFieldViolation {
                index: m.iter().position(|x| x.iter().any(|z| !z.im.is_zero())).unwrap_or(0),
            });
        }
        Ok(Self {
            j,
            kmj,
            l: m.len(),
            m,
            basis1: Vec::new(),
            basis2: Vec::new(),
            lin_basis: Vec::new(),
            field,
            n: 0,
        })
    }

    /// `Σ_r c_r W^r`.
    pub fn lin_element(&self, coords: &DVector<C<T>>) -> Result<Mat<T>> {
        if coords.len() != self.l || self.lin_basis.is_empty() {
            return Err(Error::SizeMismatch {
                left: self.lin_basis.len(),
                right: coords.len(),
            });
        }
        Ok(self
            .lin_basis
            .iter()
            .zip(coords.iter())
            .fold(Mat::zeros(self.n, self.n), |acc, (w, c)| acc + w * *c))
    }

    /// Coordinates of `zᵀM_r w` for every `r`.
    pub fn apply(&self, z: &DVector<C<T>>, w: &DVector<C<T>>) -> Result<DVector<C<T>>> {
        if w.len() != self.kmj {
            return Err(Error::SizeMismatch {
                left: self.kmj,
                right: w.len(),
            });
        }
        Ok(eval_m(self, z)? * w)
    }
}

impl<T: Real> Serialize for BilinearModel<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<Vec<Vec<[f64; 2]>>> = self
            .m
            .iter()
            .map(|mr| {
                (0..mr.nrows())
                    .map(|s| {
                        (0..mr.ncols())
                            .map(|t| [mr[(s, t)].re.to_f64_lossy(), mr[(s, t)].im.to_f64_lossy()])
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut st = serializer.serialize_struct("BilinearModel", 7)?;
        st.serialize_field("j", &self.j)?;
        st.serialize_field("kmj", &self.kmj)?;
        st.serialize_field("l", &self.l)?;
        st.serialize_field("M", &pairs)?;
        st.serialize_field("basis1", &SubspaceFile::from_matrices(self.n, self.field, &self.basis1))?;
        st.serialize_field("basis2", &SubspaceFile::from_matrices(self.n, self.field, &self.basis2))?;
        st.serialize_field(
            "lin_basis",
            &SubspaceFile::from_matrices(self.n, self.field, &self.lin_basis),
        )?;
        st.end()
    }
}

/// `M(z)`: the `l x kmj` matrix whose row `r` is `zᵀM_r`.
pub fn eval_m<T: Real>(model: &BilinearModel<T>, z: &DVector<C<T>>) -> Result<DMatrix<C<T>>> {
    if z.len() != model.j {
        return Err(Error::SizeMismatch {
            left: model.j,
            right: z.len(),
        });
    }
    let mut out = DMatrix::zeros(model.l, model.kmj);
    for (r, mr) in model.m.iter().enumerate() {
        out.row_mut(r).copy_from(&(z.transpose() * mr));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    /// Success means `residual < tol_solve·(1 + ‖b‖)`.
    pub tol_solve: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iter: 200,
            seed: 0,
            tol_solve: 1e-10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport<T: Real> {
    pub z: DVector<C<T>>,
    pub w: DVector<C<T>>,
    /// `‖M(z)w − b‖₂`.
    pub residual: T,
    /// Iterations of the restart that produced this report.
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
    /// `b = 0`, answered by `w = 0` without iterating.
    pub trivial: bool,
}

impl<T: Real> Serialize for SolveReport<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs = |v: &DVector<C<T>>| -> Vec<[f64; 2]> {
            v.iter().map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()]).collect()
        };
        let mut st = serializer.serialize_struct("SolveReport", 7)?;
        st.serialize_field("z", &pairs(&self.z))?;
        st.serialize_field("w", &pairs(&self.w))?;
        st.serialize_field("residual", &self.residual.to_f64_lossy())?;
        st.serialize_field("iterations", &self.iterations)?;
        st.serialize_field("restarts_used", &self.restarts_used)?;
        st.serialize_field("converged", &self.converged)?;
        st.serialize_field("trivial", &self.trivial)?;
        st.end()
    }
}

struct Run<T: Real> {
    z: DVector<C<T>>,
    w: DVector<C<T>>,
    residual: T,
    iterations: usize,
}

/// Jacobian `[∂/∂z | ∂/∂w]` of `M(z)w`; the map is holomorphic so this is
/// the complex Jacobian.
fn jacobian<T: Real>(model: &BilinearModel<T>, mz: &DMatrix<C<T>>, w: &DVector<C<T>>) -> DMatrix<C<T>> {
    let mut jac = DMatrix::zeros(model.l, model.j + model.kmj);
    for (r, mr) in model.m.iter().enumerate() {
        let dz = mr * w;
        for s in 0..model.j {
            jac[(r, s)] = dz[s];
        }
    }
    jac.columns_mut(model.j, model.kmj).copy_from(mz);
    jac
}

/// Rescales `(z, w) -> (tz, w/t)` so that `‖z‖ = ‖w‖`; the product is
/// unchanged. Returns false when either factor vanishes.
fn balance<T: Real>(z: &mut DVector<C<T>>, w: &mut DVector<C<T>>) -> bool {
    let (nz, nw) = (z.norm(), w.norm());
    if nz.is_zero() || nw.is_zero() {
        return false;
    }
    let t = (nw / nz).sqrt();
    z.scale_mut(t);
    w.unscale_mut(t);
    true
}

fn levenberg_marquardt<T: Real>(
    model: &BilinearModel<T>,
    b: &DVector<C<T>>,
    mut z: DVector<C<T>>,
    mut w: DVector<C<T>>,
    max_iter: usize,
    target: T,
) -> Run<T> {
    balance(&mut z, &mut w);
    let residual_of = |z: &DVector<C<T>>, w: &DVector<C<T>>| {
        let mz = eval_m(model, z).expect("length checked");
        let r = &mz * w - b;
        (mz, r)
    };
    let (mut mz, mut r) = residual_of(&z, &w);
    let mut cost = r.norm();
    let mut lambda: Option<T> = None;
    let mut iterations = 0;
    let ten = T::lit(10.0);
    while iterations < max_iter && cost >= target {
        iterations += 1;
        let jac = jacobian(model, &mz, &w);
        let normal = jac.ad_mul(&jac);
        let grad = jac.ad_mul(&r);
        let lam = *lambda.get_or_insert_with(|| {
            let d = normal.diagonal().iter().fold(T::zero(), |m, x| m.max(x.re));
            T::lit(1e-3) * d.max(T::lit(1e-12))
        });
        let mut damped = normal;
        for i in 0..damped.nrows() {
            damped[(i, i)] += re(lam);
        }
        let Some(chol) = damped.cholesky() else {
            lambda = Some(lam * ten);
            continue;
        };
        let step = chol.solve(&(-grad));
        let dz = step.rows(0, model.j).into_owned();
        let dw = step.rows(model.j, model.kmj).into_owned();
        let (mut z_new, mut w_new) = (&z + dz, &w + dw);
        if !balance(&mut z_new, &mut w_new) {
            lambda = Some(lam * ten);
            continue;
        }
        let (mz_new, r_new) = residual_of(&z_new, &w_new);
        let cost_new = r_new.norm();
        if cost_new < cost {
            let gain = cost - cost_new;
            (z, w, mz, r, cost) = (z_new, w_new, mz_new, r_new, cost_new);
            lambda = Some((lam / ten).max(T::lit(1e-30)));
            if gain <= T::lit(1e-15) * cost && step.norm() <= T::lit(1e-15) {
                break;
            }
        } else {
            let next = lam * ten;
            if next > T::lit(1e30) {
                break;
            }
            lambda = Some(next);
        }
    }
    // report in the unit-z gauge
    let nz = z.norm();
    z.unscale_mut(nz);
    w.scale_mut(nz);
    Run {
        z,
        w,
        residual: cost,
        iterations,
    }
}

/// Multi-start damped Gauss–Newton for `M(z)w = b`. Restart `i` starts from
/// a Gaussian point seeded `seed + i`; the search stops at the first
/// successful restart. Always returns the best report found.
pub fn solve_bilinear<T: Real>(
    model: &BilinearModel<T>,
    b: &DVector<C<T>>,
    opts: &SolveOptions,
) -> Result<SolveReport<T>> {
    if b.len() != model.l {
        return Err(Error::SizeMismatch {
            left: model.l,
            right: b.len(),
        });
    }
    if opts.restarts == 0 || opts.tol_solve <= 0.0 {
        return Err(Error::BadParameters(
            "restarts must be positive and tol_solve > 0".into(),
        ));
    }
    let mut z0 = DVector::zeros(model.j);
    z0[0] = re(T::one());
    if b.iter().all(|x| x.re.is_zero() && x.im.is_zero()) {
        return Ok(SolveReport {
            z: z0,
            w: DVector::zeros(model.kmj),
            residual: T::zero(),
            iterations: 0,
            restarts_used: 0,
            converged: true,
            trivial: true,
        });
    }
    let target = T::lit(opts.tol_solve) * (T::one() + b.norm());
    let mut best: Option<(Run<T>, usize)> = None;
    for i in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        let z = gaussian_vector::<T>(model.j, model.field, &mut rng);
        let w = gaussian_vector::<T>(model.kmj, model.field, &mut rng);
        let run = levenberg_marquardt(model, b, z, w, opts.max_iter, target);
        let done = run.residual < target;
        if best.as_ref().is_none_or(|(r, _)| run.residual < r.residual) {
            best = Some((run, i + 1));
        }
        if done {
            let (run, _) = best.expect("just set");
            return Ok(SolveReport {
                z: run.z,
                w: run.w,
                residual: run.residual,
                iterations: run.iterations,
                restarts_used: i + 1,
                converged: true,
                trivial: false,
            });
        }
    }
    let (run, _) = best.expect("restarts >= 1");
    Ok(SolveReport {
        converged: run.residual < target,
        z: run.z,
        w: run.w,
        residual: run.residual,
        iterations: run.iterations,
        restarts_used: opts.restarts,
        trivial: false,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FactorOptions {
    /// Random nullspace combinations tried for an invertible witness.
    pub samples: usize,
    pub seed: u64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            samples: 25,
            seed: 0,
        }
    }
}

/// `A = V1·V2` with `V1 ∈ S1`, `V2 ∈ S2`.
#[derive(Clone, Debug)]
pub struct Factorization<T: Real> {
    pub v1: Mat<T>,
    pub v2: Mat<T>,
    /// Membership residual of `V1` in `S1`.
    pub v1_residual: T,
    /// Membership residual of `V2` in `S2`.
    pub v2_residual: T,
    /// `‖A − V1·V2‖_F / ‖A‖_F`.
    pub relative_error: T,
    /// Dimension of `{Y ∈ S2 : A·Y ∈ S1}`.
    pub nullity: usize,
}

impl<T: Real> Serialize for Factorization<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Factorization", 6)?;
        st.serialize_field("v1", &MatrixFile::from_mat(&self.v1))?;
        st.serialize_field("v2", &MatrixFile::from_mat(&self.v2))?;
        st.serialize_field("v1_residual", &self.v1_residual.to_f64_lossy())?;
        st.serialize_field("v2_residual", &self.v2_residual.to_f64_lossy())?;
        st.serialize_field("relative_error", &self.relative_error.to_f64_lossy())?;
        st.serialize_field("nullity", &self.nullity)?;
        st.end()
    }
}

/// Factors `A` over `S1 x S2` when `S2` is inverse-closed: any invertible
/// `Y ∈ S2` with `A·Y ∈ S1` gives `A = (A·Y)·Y⁻¹`.
pub fn factor_via_inverse_closed<T: Real>(
    a: &Mat<T>,
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    opts: &FactorOptions,
) -> Result<Factorization<T>> {
    s1.check_compatible(s2)?;
    s1.check_size(a)?;
    if s2.dim() == 0 {
        return Err(Error::NoFactorization);
    }
    let n = s1.n();
    let field = s2.field();
    let tols = s1.tolerances();
    let a_norm = frobenius(a);
    if a_norm.is_zero() {
        return Err(Error::SingularWitness { rcond: 0.0 });
    }
    let basis2 = s2.ortho_matrices();
    let images = basis2
        .iter()
        .map(|c| {
            let ac = a * c;
            Ok(&ac - s1.project(&ac)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let k = stack(&images, n);
    let dec = svd_full_right(&k, field);
    let cut = T::lit(tols.rel_rank_tol) * a_norm;
    let rank = dec.sigma.iter().filter(|&&s| s > cut).count();
    let nullity = basis2.len() - rank;
    if nullity == 0 {
        return Err(Error::NoFactorization);
    }
    let null = dec.v.columns(rank, nullity).into_owned();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(T, Mat<T>)> = None;
    for _ in 0..opts.samples.max(1) {
        let coef = &null * gaussian_vector::<T>(nullity, field, &mut rng);
        let y = s2.element(&coef)?;
        let r = rcond(&y);
        if best.as_ref().is_none_or(|(b, _)| r > *b) {
            best = Some((r, y));
        }
    }
    let (r, y) = best.expect("at least one sample");
    if r <= T::lit(tols.rel_rank_tol) {
        return Err(Error::SingularWitness {
            rcond: r.to_f64_lossy(),
        });
    }
    let y_inv = y.clone().try_inverse().ok_or(Error::SingularWitness {
        rcond: r.to_f64_lossy(),
    })?;
    let m2 = s2.membership(&y_inv)?;
    if !m2.inside {
        return Err(Error::NotInverseClosed {
            residual: m2.residual.to_f64_lossy(),
        });
    }
    let v1 = a * &y;
    let v1_residual = s1.membership(&v1)?.residual;
    let relative_error = frobenius(&(a - &v1 * &y_inv)) / a_norm;
    Ok(Factorization {
        v1,
        v2: y_inv,
        v1_residual,
        v2_residual: m2.residual,
        relative_error,
        nullity,
    })
}

/// Degree bound for the polynomial multipliers of an effective
/// Nullstellensatz with `k` polynomials of degree at most `degree` in `n`
/// variables: `D^n` for `D >= 3`, `2^min(n, k)` for `D = 2`.
pub fn nullstellensatz_degree_bound(degree: u32, n: u32, k: u32) -> Result<u128> {
    if degree < 2 {
        return Err(Error::UnsupportedDegree(degree));
    }
    if n == 0 || k == 0 {
        return Err(Error::BadParameters("n and k must be positive".into()));
    }
    let (base, exp) = if degree == 2 {
        (2u128, n.min(k))
    } else {
        (u128::from(degree), n)
    };
    base.checked_pow(exp).ok_or(Error::Overflow)
}
