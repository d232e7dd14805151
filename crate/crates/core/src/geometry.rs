//! The product map `Ψ(V1, V2) = V1·V2` on `S1 × S2`.
//!
//! The tangent space of the image at `Ψ(V1, V2)` is `V1·S2 + S1·V2`; its
//! dimension is the rank of `Ψ` there. The product set is flat (its closure
//! is a subspace) exactly when the rank reaches the dimension of the
//! linearization `span{B·C : B ∈ S1, C ∈ S2}` at some point, and the
//! curvature measure `Q(W1, W2) = 2(I − P)W1·W2` vanishes there.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::frobenius;
use crate::scalar::{re, Real};
use crate::subspace::{Mat, MatrixSubspace};

/// `Ψ(V1, V2) = V1·V2`.
pub fn psi<T: Real>(v1: &Mat<T>, v2: &Mat<T>) -> Result<Mat<T>> {
    if v1.shape() != v2.shape() || v1.nrows() != v1.ncols() {
        return Err(Error::SizeMismatch {
            left: v1.nrows(),
            right: v2.nrows(),
        });
    }
    Ok(v1 * v2)
}

/// Smallest subspace containing every product `B·C`, spanned by the
/// pairwise products of the two orthonormal bases.
pub fn linearization<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
) -> Result<MatrixSubspace<T>> {
    s1.check_compatible(s2)?;
    let (b1, b2) = (s1.ortho_matrices(), s2.ortho_matrices());
    let mut prods = Vec::with_capacity(b1.len() * b2.len());
    for b in &b1 {
        for c in &b2 {
            prods.push(b * c);
        }
    }
    if prods.is_empty() {
        return Ok(MatrixSubspace::zero(s1.n(), s1.field(), *s1.tolerances()));
    }
    MatrixSubspace::from_matrices(prods, s1.field(), *s1.tolerances())
}

fn require_member<T: Real>(s: &MatrixSubspace<T>, a: &Mat<T>, what: &'static str) -> Result<()> {
    let m = s.membership(a)?;
    if !m.inside {
        return Err(Error::NotMember {
            what,
            residual: m.residual.to_f64_lossy(),
        });
    }
    Ok(())
}

/// `V1·S2 + S1·V2`.
pub fn tangent_space<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    v1: &Mat<T>,
    v2: &Mat<T>,
) -> Result<MatrixSubspace<T>> {
    s1.check_compatible(s2)?;
    require_member(s1, v1, "V1")?;
    require_member(s2, v2, "V2")?;
    let mut gens: Vec<Mat<T>> = s2.ortho_matrices().iter().map(|c| v1 * c).collect();
    gens.extend(s1.ortho_matrices().iter().map(|b| b * v2));
    if gens.is_empty() {
        return Ok(MatrixSubspace::zero(s1.n(), s1.field(), *s1.tolerances()));
    }
    MatrixSubspace::from_matrices(gens, s1.field(), *s1.tolerances())
}

/// Rank of `Ψ` at `(V1, V2)`.
pub fn psi_rank<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    v1: &Mat<T>,
    v2: &Mat<T>,
) -> Result<usize> {
    Ok(tangent_space(s1, s2, v1, v2)?.dim())
}

/// `Q` evaluated at one base point and one direction pair.
#[derive(Clone, Debug)]
pub struct CurvatureSample<T: Real> {
    pub v1: Mat<T>,
    pub v2: Mat<T>,
    pub tangent_dim: usize,
    pub q_value: Mat<T>,
    pub q_norm: T,
}

/// `Q_{(V1,V2)}(W1, W2) = 2(I − P)W1·W2`, with `P` the orthogonal projector
/// onto the tangent space at `(V1, V2)`.
pub fn curvature_q<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    v1: &Mat<T>,
    v2: &Mat<T>,
    w1: &Mat<T>,
    w2: &Mat<T>,
) -> Result<CurvatureSample<T>> {
    let tangent = tangent_space(s1, s2, v1, v2)?;
    require_member(s1, w1, "W1")?;
    require_member(s2, w2, "W2")?;
    let ww = w1 * w2;
    let q_value = (&ww - tangent.project(&ww)?) * re(T::lit(2.0));
    let q_norm = frobenius(&q_value);
    Ok(CurvatureSample {
        v1: v1.clone(),
        v2: v2.clone(),
        tangent_dim: tangent.dim(),
        q_value,
        q_norm,
    })
}

/// `II = (I − P)(W1·W̃2 + W̃1·W2)`, the polarization of `Q`.
#[allow(clippy::too_many_arguments)]
pub fn second_fundamental_form<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    v1: &Mat<T>,
    v2: &Mat<T>,
    w1: &Mat<T>,
    w2: &Mat<T>,
    w1t: &Mat<T>,
    w2t: &Mat<T>,
) -> Result<Mat<T>> {
    let tangent = tangent_space(s1, s2, v1, v2)?;
    require_member(s1, w1, "W1")?;
    require_member(s2, w2, "W2")?;
    require_member(s1, w1t, "W1~")?;
    require_member(s2, w2t, "W2~")?;
    let m = w1 * w2t + w1t * w2;
    Ok(&m - tangent.project(&m)?)
}

/// Generic point of `S1 × S2` drawn from one seeded stream.
pub fn sample_point<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    seed: u64,
) -> Result<(Mat<T>, Mat<T>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v1 = s1.random_element_with(&mut rng)?;
    let v2 = s2.random_element_with(&mut rng)?;
    Ok((v1, v2))
}

/// Minimum number of trials that must agree on the maximal rank before a
/// product is reported curved.
pub const CURVED_MIN_AGREEMENT: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FlatnessVerdict {
    /// Some sampled rank equals the linearization dimension.
    Flat,
    /// No sample reached it and at least three samples agree on the maximum.
    Curved,
    /// Too few agreeing samples to call it curved.
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct ProductAnalysis<T: Real> {
    pub lin_dim: usize,
    pub linearization: MatrixSubspace<T>,
    /// `(seed, rank)` per trial.
    pub sampled_ranks: Vec<(u64, usize)>,
    pub generic_rank: usize,
    pub flat: bool,
    pub verdict: FlatnessVerdict,
    pub trials: usize,
    pub seed: u64,
    pub tol_used: f64,
}

impl<T: Real> ProductAnalysis<T> {
    /// Seed of the first trial that reached the linearization dimension.
    pub fn flat_seed(&self) -> Option<u64> {
        self.sampled_ranks
            .iter()
            .find(|(_, r)| *r == self.lin_dim)
            .map(|(s, _)| *s)
    }
}

impl<T: Real> Serialize for ProductAnalysis<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ProductAnalysis", 8)?;
        st.serialize_field("lin_dim", &self.lin_dim)?;
        st.serialize_field("generic_rank", &self.generic_rank)?;
        st.serialize_field("flat", &self.flat)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("sampled_ranks", &self.sampled_ranks)?;
        st.serialize_field("trials", &self.trials)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("tol_used", &self.tol_used)?;
        st.end()
    }
}

/// Samples `trials` generic points (trial `i` uses seed `seed + i`) and
/// compares the rank of `Ψ` with the dimension of the linearization.
pub fn flatness_test<T: Real>(
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    trials: usize,
    seed: u64,
) -> Result<ProductAnalysis<T>> {
    s1.check_compatible(s2)?;
    if s1.dim() == 0 || s2.dim() == 0 {
        return Err(Error::ZeroSubspace);
    }
    if trials == 0 {
        return Err(Error::BadParameters("trials must be at least 1".into()));
    }
    let lin = linearization(s1, s2)?;
    let lin_dim = lin.dim();
    let sampled_ranks = (0..trials as u64)
        .map(|i| {
            let s = seed.wrapping_add(i);
            let (v1, v2) = sample_point(s1, s2, s)?;
            Ok((s, psi_rank(s1, s2, &v1, &v2)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let generic_rank = sampled_ranks.iter().map(|&(_, r)| r).max().unwrap_or(0);
    let agreeing = sampled_ranks
        .iter()
        .filter(|&&(_, r)| r == generic_rank)
        .count();
    let verdict = if generic_rank == lin_dim {
        FlatnessVerdict::Flat
    } else if agreeing >= CURVED_MIN_AGREEMENT {
        FlatnessVerdict::Curved
    } else {
        FlatnessVerdict::Inconclusive
    };
    Ok(ProductAnalysis {
        lin_dim,
        linearization: lin,
        sampled_ranks,
        generic_rank,
        flat: verdict == FlatnessVerdict::Flat,
        verdict,
        trials,
        seed,
        tol_used: s1.tol(),
    })
}

#[derive(Clone, Debug)]
pub struct Factorizability<T: Real> {
    pub verdict: bool,
    /// The linearization of `S1·S2` equals `W`.
    pub linearization_matches: bool,
    pub flat: bool,
    /// `1 < min(dim S1, dim S2)` and `max(dim S1, dim S2) < dim W`.
    pub dimension_condition: bool,
    pub analysis: ProductAnalysis<T>,
}

impl<T: Real> Serialize for Factorizability<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("Factorizability", 5)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("linearization_matches", &self.linearization_matches)?;
        st.serialize_field("flat", &self.flat)?;
        st.serialize_field("dimension_condition", &self.dimension_condition)?;
        st.serialize_field("analysis", &self.analysis)?;
        st.end()
    }
}

/// Decides whether `W` is the closure of `S1·S2` with nontrivial factors.
pub fn factorizability_check<T: Real>(
    w: &MatrixSubspace<T>,
    s1: &MatrixSubspace<T>,
    s2: &MatrixSubspace<T>,
    trials: usize,
    seed: u64,
) -> Result<Factorizability<T>> {
    w.check_compatible(s1)?;
    w.check_compatible(s2)?;
    let analysis = flatness_test(s1, s2, trials, seed)?;
    let linearization_matches = analysis.linearization.same_span(w);
    let (d1, d2) = (s1.dim(), s2.dim());
    let dimension_condition = 1 < d1.min(d2) && d1.max(d2) < w.dim();
    Ok(Factorizability {
        verdict: linearization_matches && analysis.flat && dimension_condition,
        linearization_matches,
        flat: analysis.flat,
        dimension_condition,
        analysis,
    })
}
