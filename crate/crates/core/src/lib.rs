//! Exact models of two central quotients of block-unitriangular matrix
//! groups, `G = G0(F_p[t, t^-1]) / C` and `K = K0(Z[1/p]) / Z`, together with
//! checkers for their finite and matricial approximations: LEF embeddings,
//! sofic permutation actions and word-trace microstates.
//!
//! Ring and group arithmetic is exact. Floating point appears only in
//! character values and twisted phases, which are generic over
//! [`num_traits::Float`]; `f64` aliases are provided here.

pub mod approx;
pub mod groups;
pub mod lef;
pub mod rings;
pub mod sample;
pub mod twisted;
pub mod words;

pub use lef::{GElem, LefElem};
pub use twisted::{BaseElem, KElem};

pub type G0Matrix = groups::ShapedMatrix<rings::LaurentPoly>;
pub type K0Matrix = groups::ShapedMatrix<rings::PAdicRat>;
pub type TwistedElem64 = twisted::TwistedElem<f64>;
pub type TwistedTuple64 = twisted::TwistedTuple<f64>;
pub type MonomialMatrix64 = twisted::MonomialMatrix<f64>;
