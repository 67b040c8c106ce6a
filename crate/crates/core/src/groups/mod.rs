//! Block-unitriangular matrix groups and their central quotients.
//!
//! The groups of interest are `G0(R)` (blocks `1,3,1`), `K0(R)` (blocks
//! `1,3,3,1`) and the Heisenberg group (blocks `1,1,1`). Their centre is the
//! corner line `e_{1,N}(R)`, and every quotient taken here is by a subgroup
//! of that line described by a [`CentralReduction`].

mod literal;
mod quotient;
mod shape;
mod shaped;
mod shift;

use std::fmt::Debug;
use std::hash::Hash;

pub use literal::{
    default_g_marked_set, default_k_marked_set, parse_element, parse_marked_set, DEFAULT_G_MARKED_SET,
    DEFAULT_K_MARKED_SET,
};
pub use quotient::{central_part, enumerate_unitriangular, CentralReduction, QuotientElem, Retract};
pub use shape::GroupShape;
pub use shaped::ShapedMatrix;
pub use shift::{kernel_witness, shift_endo, shift_preimage};

use crate::rings::RingError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroupError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("invalid block partition {0:?}: first and last blocks must have size 1")]
    InvalidShape(Vec<usize>),
    #[error("shape mismatch")]
    ShapeMismatch,
    #[error("entry ({i}, {j}) lies outside the block-upper-triangular pattern")]
    OutsideShape { i: usize, j: usize },
    #[error("diagonal block {block} does not have determinant 1")]
    DiagonalBlock { block: usize },
    #[error("central reduction {reduction:?} does not apply to {ring}")]
    ReductionRing { reduction: CentralReduction, ring: String },
    #[error("central reduction mismatch: {0:?} vs {1:?}")]
    ReductionMismatch(CentralReduction, CentralReduction),
    #[error("operation requires the quotient by non-negative powers of t")]
    NotGMode,
    #[error("cannot parse element literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
    #[error("group has {size} elements, above the enumeration budget {budget}")]
    TooLarge { size: u128, budget: u128 },
}

/// A group element with an exact equality test.
///
/// `op` panics when the operands do not belong to the same group; callers
/// that handle untrusted input use the fallible methods on the concrete types.
pub trait GroupElement: Clone + PartialEq + Eq + Hash + Debug + Send + Sync {
    fn op(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn identity_like(&self) -> Self;

    fn is_identity(&self) -> bool {
        *self == self.identity_like()
    }

    /// `self^n` for `n >= 0`.
    fn pow(&self, n: u32) -> Self {
        (0..n).fold(self.identity_like(), |acc, _| acc.op(self))
    }
}
