//! Independent oracles for the integration and acceptance tests. Nothing in
//! here calls the library's rank, projection or factorization code.
#![allow(dead_code)]

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subprod_core::subspace::random_matrix;
use subprod_core::{Field, Mat64, C};

/// Square integer matrix, row-major.
pub type IMat = Vec<Vec<i64>>;

pub fn izeros(n: usize) -> IMat {
    vec![vec![0; n]; n]
}

pub fn iunit(n: usize, i: usize, j: usize) -> IMat {
    let mut m = izeros(n);
    m[i][j] = 1;
    m
}

pub fn imul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let mut out = izeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn iadd(a: &IMat, b: &IMat) -> IMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn iscale(a: &IMat, c: i64) -> IMat {
    a.iter().map(|r| r.iter().map(|x| x * c).collect()).collect()
}

/// Column-major flattening, same order as the library's vectorization.
pub fn ivec(a: &IMat) -> Vec<i64> {
    let n = a.len();
    (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| a[i][j]).collect()
}

pub fn to_mat(a: &IMat) -> Mat64 {
    let n = a.len();
    Mat64::from_fn(n, n, |i, j| C::new(a[i][j] as f64, 0.0))
}

/// Exact rank of a set of integer vectors by elimination over the rationals.
pub fn exact_rank(vectors: &[Vec<i64>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut rows: Vec<Vec<BigRational>> = vectors
        .iter()
        .map(|v| v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = BigRational::one() / rows[rank][col].clone();
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let f = row[col].clone() * inv.clone();
                for (x, p) in row.iter_mut().zip(&pivot).skip(col) {
                    *x -= p.clone() * f.clone();
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Exact dimension of `V1·S2 + S1·V2` from integer spanning sets.
pub fn exact_tangent_rank(basis1: &[IMat], basis2: &[IMat], v1: &IMat, v2: &IMat) -> usize {
    let mut gens: Vec<Vec<i64>> = basis2.iter().map(|c| ivec(&imul(v1, c))).collect();
    gens.extend(basis1.iter().map(|b| ivec(&imul(b, v2))));
    exact_rank(&gens)
}

/// Exact dimension of the span of all pairwise products.
pub fn exact_lin_dim(basis1: &[IMat], basis2: &[IMat]) -> usize {
    let gens: Vec<Vec<i64>> = basis1
        .iter()
        .flat_map(|b| basis2.iter().map(move |c| ivec(&imul(b, c))))
        .collect();
    exact_rank(&gens)
}

/// Random integer combination with entries in `-r..=r`.
pub fn icombination(basis: &[IMat], r: i64, rng: &mut ChaCha8Rng) -> IMat {
    let n = basis[0].len();
    basis.iter().fold(izeros(n), |acc, b| {
        iadd(&acc, &iscale(b, rng.random_range(-r..=r)))
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// integer bases of the structured families, written out independently of
// the catalog module

pub fn ib_rank_cols(n: usize, k: usize) -> Vec<IMat> {
    (0..n).flat_map(|i| (0..k).map(move |j| iunit(n, i, j))).collect()
}

pub fn ib_rank_rows(n: usize, k: usize) -> Vec<IMat> {
    (0..k).flat_map(|i| (0..n).map(move |j| iunit(n, i, j))).collect()
}

pub fn ib_diagonal(n: usize) -> Vec<IMat> {
    (0..n).map(|i| iunit(n, i, i)).collect()
}

pub fn ib_circulant(n: usize) -> Vec<IMat> {
    (0..n)
        .map(|s| {
            let mut m = izeros(n);
            for j in 0..n {
                m[(j + s) % n][j] = 1;
            }
            m
        })
        .collect()
}

pub fn ib_symmetric(n: usize) -> Vec<IMat> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut m = iunit(n, i, j);
            m[j][i] = 1;
            out.push(m);
        }
    }
    out
}

pub fn iexchange(n: usize) -> IMat {
    let mut m = izeros(n);
    for i in 0..n {
        m[i][n - 1 - i] = 1;
    }
    m
}

/// Symmetric with constant antidiagonal.
pub fn ib_persymmetric(n: usize) -> Vec<IMat> {
    let mut out = vec![iexchange(n)];
    for i in 0..n {
        for j in i..n {
            if i + j + 1 != n {
                let mut m = iunit(n, i, j);
                m[j][i] = 1;
                out.push(m);
            }
        }
    }
    out
}

pub fn ib_lower(n: usize) -> Vec<IMat> {
    (0..n).flat_map(|j| (j..n).map(move |i| iunit(n, i, j))).collect()
}

pub fn ib_unit_upper_constant_diagonal(n: usize) -> Vec<IMat> {
    let mut out = vec![(0..n).fold(izeros(n), |a, i| iadd(&a, &iunit(n, i, i)))];
    for j in 0..n {
        for i in 0..j {
            out.push(iunit(n, i, j));
        }
    }
    out
}

pub type Rows = Vec<Vec<f64>>;

/// Doolittle elimination without pivoting: `A = L·U`, `L` unit lower.
/// Returns `None` when a pivot vanishes (relative to the column scale).
pub fn doolittle(a: &[Vec<f64>]) -> Option<(Rows, Rows)> {
    let n = a.len();
    let mut u = a.to_vec();
    let mut l = vec![vec![0.0; n]; n];
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    for k in 0..n {
        l[k][k] = 1.0;
        if u[k][k].abs() <= 1e-8 * scale {
            return None;
        }
        let pivot = u[k].clone();
        for i in k + 1..n {
            let f = u[i][k] / pivot[k];
            l[i][k] = f;
            for (x, p) in u[i].iter_mut().zip(&pivot).skip(k) {
                *x -= f * p;
            }
        }
    }
    Some((l, u))
}

/// Real parts of a matrix as rows.
pub fn real_rows(m: &Mat64) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
        .collect()
}

pub fn fro(m: &Mat64) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Smallest `‖V1·V2‖_F` over unit-Frobenius members of two real
/// two-dimensional spans, by an angle grid on both coefficient circles.
pub fn grid_min_product(a: &[Mat64; 2], b: &[Mat64; 2], steps: usize) -> f64 {
    let unit = |m: &[Mat64; 2], t: f64| {
        let v = &m[0] * C::new(t.cos(), 0.0) + &m[1] * C::new(t.sin(), 0.0);
        let n = fro(&v);
        v / C::new(n, 0.0)
    };
    let mut best = f64::INFINITY;
    for i in 0..steps {
        let v1 = unit(a, std::f64::consts::PI * i as f64 / steps as f64);
        for j in 0..steps {
            let v2 = unit(b, std::f64::consts::PI * j as f64 / steps as f64);
            best = best.min(fro(&(&v1 * &v2)));
        }
    }
    best
}

/// `X1 = Q1·D1·Q1ᵀ`, `X2 = Q2·D2·Q2ᵀ` with `Q = [Q1 Q2]` orthogonal, so
/// `X1·X2 = 0`. `Q` is a Householder reflector.
pub fn orthogonal_symmetric_pair(n: usize, split: usize, seed: u64) -> (Mat64, Mat64) {
    let v = random_matrix(n, Field::Real, seed).column(0).into_owned();
    let vv = v.dot(&v).re;
    let q = Mat64::identity(n, n) - &v * v.transpose() * C::new(2.0 / vv, 0.0);
    let mut r = rng(seed ^ 99);
    let mut pick = |cols: std::ops::Range<usize>| {
        cols.fold(Mat64::zeros(n, n), |acc, j| {
            let col = q.column(j);
            acc + col * col.transpose() * C::new(r.random_range(0.5..2.0) * if r.random_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
        })
    };
    let x1 = pick(0..split);
    let x2 = pick(split..n);
    (x1, x2)
}
