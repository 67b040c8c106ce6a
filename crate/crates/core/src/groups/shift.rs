//! The shift endomorphism of `G = G0(F_p[t, t^-1]) / C`.
//!
//! Conjugating by `diag(t, 1, ..., 1)` multiplies the first row by `t`. On
//! the centre this is the index shift `t^n -> t^(n+1)`, which maps `C` into
//! itself, so it descends to `G`. It is onto (conjugation by `t^-1` provides
//! preimages) and kills `e_{1,5}(F_p t^-1)`.

use super::{CentralReduction, GroupError, GroupShape, QuotientElem};
use crate::rings::{LaurentPoly, RingElem};

fn require_g_mode(g: &QuotientElem<LaurentPoly>) -> Result<(), GroupError> {
    if g.reduction() == CentralReduction::NonNegativePowers {
        Ok(())
    } else {
        Err(GroupError::NotGMode)
    }
}

fn conjugate_by_power(g: &QuotientElem<LaurentPoly>, k: i64) -> Result<QuotientElem<LaurentPoly>, GroupError> {
    require_g_mode(g)?;
    let u = g.lift().proto().one_like().shift(k);
    QuotientElem::normal_form(g.lift().scale_first_row(&u), g.reduction())
}

/// Image of `g` under the endomorphism induced by conjugation with
/// `diag(t, 1, ..., 1)`.
pub fn shift_endo(g: &QuotientElem<LaurentPoly>) -> Result<QuotientElem<LaurentPoly>, GroupError> {
    conjugate_by_power(g, 1)
}

/// A preimage of `g` under [`shift_endo`] (conjugation by `diag(t^-1, 1, ..., 1)`).
pub fn shift_preimage(g: &QuotientElem<LaurentPoly>) -> Result<QuotientElem<LaurentPoly>, GroupError> {
    conjugate_by_power(g, -1)
}

/// The class of `e_{1,5}(t^-1)`: nontrivial in `G`, killed by the shift.
pub fn kernel_witness(p: u64) -> Result<QuotientElem<LaurentPoly>, GroupError> {
    QuotientElem::elementary(
        GroupShape::g0(),
        1,
        5,
        LaurentPoly::monomial(p, 1, -1)?,
        CentralReduction::NonNegativePowers,
    )
}
