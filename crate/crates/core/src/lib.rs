//! Analysis of the set of products `V1·V2` of two matrix subspaces.
//!
//! The crate computes the linearization of a product set, the rank of the
//! product map at sampled points, the curvature measure `Q` and second
//! fundamental form, flatness and factorizability verdicts, normal forms of
//! two-dimensional subspaces (generalized linear-fractional relations and
//! Craig–Sakamoto checks), minrank, closedness certificates and bilinear
//! factorization `A = V1·V2`.
//!
//! Everything is generic over a [`Real`] scalar (`f32` or `f64`). The `*64`
//! aliases below fix the common double precision instantiation.

pub mod bilinear;
pub mod catalog;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod mats;
pub mod pencil;
pub mod scalar;
pub mod subspace;

#[cfg(test)]
pub(crate) mod test_util;

pub use error::{Error, Result};
pub use linalg::numerical_rank;
pub use scalar::{Real, C};
pub use subspace::{Field, Mat, MatrixSubspace, Membership, Tolerances};

pub type Mat64 = Mat<f64>;
pub type Mat32 = Mat<f32>;
pub type MatrixSubspace64 = MatrixSubspace<f64>;
pub type MatrixSubspace32 = MatrixSubspace<f32>;
pub type ProductAnalysis64 = geometry::ProductAnalysis<f64>;
pub type CurvatureSample64 = geometry::CurvatureSample<f64>;
pub type LftWitness64 = pencil::LftWitness<f64>;
pub type MinrankReport64 = pencil::MinrankReport<f64>;
pub type BilinearModel64 = bilinear::BilinearModel<f64>;
pub type SolveReport64 = bilinear::SolveReport<f64>;
