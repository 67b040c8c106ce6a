use std::fmt;

use super::{GroupElement, GroupError, GroupShape, ShapedMatrix};
use crate::rings::{CycloRing, Fp, LaurentPoly, PAdicRat, RingElem, ZModQ};

/// Which central subgroup `e_{1,N}(ker rho)` is divided out, described by a
/// retraction `rho` of the ring onto a set of coset representatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum CentralReduction {
    /// Nothing is divided out; `rho` is the identity.
    Trivial,
    /// `F_p[t, t^-1]` modulo the span of `t^n`, `n >= 0`; `rho` keeps the
    /// negative powers.
    NonNegativePowers,
    /// `F_p[xi]` modulo the span of `xi^0 .. xi^(len-1)`.
    CycloWindow { len: usize },
    /// `Z[1/p]` modulo `Z`; `rho` is the fractional part in `[0, 1)`.
    Integers,
    /// The whole centre; `rho = 0`.
    Full,
}

/// Rings that know how to apply the central retractions relevant to them.
pub trait Retract: RingElem {
    /// `rho(self)`. Satisfies `rho(rho(x)) = rho(x)`, `rho(x) = 0` iff `x` is
    /// in the kernel, and `x - rho(x)` lies in the kernel.
    fn retract(&self, red: CentralReduction) -> Result<Self, GroupError>;
}

fn generic_retract<R: RingElem>(x: &R, red: CentralReduction) -> Result<R, GroupError> {
    match red {
        CentralReduction::Trivial => Ok(x.clone()),
        CentralReduction::Full => Ok(x.zero_like()),
        other => Err(GroupError::ReductionRing {
            reduction: other,
            ring: x.ring_name(),
        }),
    }
}

impl Retract for LaurentPoly {
    fn retract(&self, red: CentralReduction) -> Result<Self, GroupError> {
        match red {
            CentralReduction::NonNegativePowers => Ok(self.filter_exponents(|e| e < 0)),
            other => generic_retract(self, other),
        }
    }
}

impl Retract for CycloRing {
    fn retract(&self, red: CentralReduction) -> Result<Self, GroupError> {
        match red {
            CentralReduction::CycloWindow { len } if len <= self.order() => Ok(self.clear_below(len)),
            other => generic_retract(self, other),
        }
    }
}

impl Retract for PAdicRat {
    fn retract(&self, red: CentralReduction) -> Result<Self, GroupError> {
        match red {
            CentralReduction::Integers => Ok(self.fractional_part()),
            other => generic_retract(self, other),
        }
    }
}

impl Retract for ZModQ {
    fn retract(&self, red: CentralReduction) -> Result<Self, GroupError> {
        generic_retract(self, red)
    }
}

impl Retract for Fp {
    fn retract(&self, red: CentralReduction) -> Result<Self, GroupError> {
        generic_retract(self, red)
    }
}

/// The central component `corner - rho(corner)` of a shaped matrix: the
/// element `c` of the kernel with `g = e_{1,N}(c) * lift(class of g)`.
pub fn central_part<R: Retract>(g: &ShapedMatrix<R>, red: CentralReduction) -> Result<R, GroupError> {
    let c = g.corner();
    Ok(c.sub(&c.retract(red)?))
}

/// Coset of a shaped matrix modulo a central subgroup, stored by its normal
/// form: the representative whose corner entry is fixed by `rho`.
///
/// Right multiplication by a central `e_{1,N}(c)` changes only the corner
/// (the first column of a shaped matrix is `(1, 0, ..., 0)`), so replacing the
/// corner by `rho(corner)` picks a canonical coset member.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientElem<R> {
    rep: ShapedMatrix<R>,
    reduction: CentralReduction,
}

impl<R: Retract> QuotientElem<R> {
    pub fn normal_form(g: ShapedMatrix<R>, reduction: CentralReduction) -> Result<Self, GroupError> {
        let c = g.corner().retract(reduction)?;
        let rep = if &c == g.corner() { g } else { g.with_corner(c) };
        Ok(QuotientElem { rep, reduction })
    }

    pub fn identity(shape: GroupShape, proto: &R, reduction: CentralReduction) -> Result<Self, GroupError> {
        Self::normal_form(ShapedMatrix::identity(shape, proto), reduction)
    }

    pub fn elementary(
        shape: GroupShape,
        i: usize,
        j: usize,
        a: R,
        reduction: CentralReduction,
    ) -> Result<Self, GroupError> {
        Self::normal_form(ShapedMatrix::elementary(shape, i, j, a)?, reduction)
    }

    /// The canonical section: the normal-form representative itself.
    pub fn lift(&self) -> &ShapedMatrix<R> {
        &self.rep
    }

    pub fn reduction(&self) -> CentralReduction {
        self.reduction
    }

    pub fn shape(&self) -> &GroupShape {
        self.rep.shape()
    }

    fn check_reduction(&self, other: &Self) -> Result<(), GroupError> {
        if self.reduction != other.reduction {
            return Err(GroupError::ReductionMismatch(self.reduction, other.reduction));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GroupError> {
        self.check_reduction(other)?;
        Self::normal_form(self.rep.mul(&other.rep)?, self.reduction)
    }

    pub fn inverse(&self) -> Self {
        Self::normal_form(self.rep.inverse(), self.reduction).expect("reduction already validated")
    }

    pub fn is_identity(&self) -> bool {
        self.rep.is_identity()
    }

    /// The 2-cocycle of the extension with respect to the canonical section:
    /// `lift(g) * lift(h) = e_{1,N}(alpha(g, h)) * lift(gh)`.
    pub fn cocycle(&self, other: &Self) -> Result<R, GroupError> {
        self.check_reduction(other)?;
        central_part(&self.rep.mul(&other.rep)?, self.reduction)
    }

    /// `(g * h, alpha(g, h))` from a single matrix product.
    pub fn mul_with_cocycle(&self, other: &Self) -> Result<(Self, R), GroupError> {
        self.check_reduction(other)?;
        let raw = self.rep.mul(&other.rep)?;
        let alpha = central_part(&raw, self.reduction)?;
        Ok((Self::normal_form(raw, self.reduction)?, alpha))
    }

    /// Changes the reduction; the new kernel must contain the old one for the
    /// result to be a group homomorphism.
    pub fn reduce(&self, reduction: CentralReduction) -> Result<Self, GroupError> {
        Self::normal_form(self.rep.clone(), reduction)
    }
}

impl<R: Retract> GroupElement for QuotientElem<R> {
    fn op(&self, other: &Self) -> Self {
        self.mul(other).expect("operands from the same group")
    }

    fn inverse(&self) -> Self {
        QuotientElem::inverse(self)
    }

    fn identity_like(&self) -> Self {
        QuotientElem {
            rep: self.rep.identity_like(),
            reduction: self.reduction,
        }
    }

    fn is_identity(&self) -> bool {
        QuotientElem::is_identity(self)
    }
}

impl<R: Retract> fmt::Display for QuotientElem<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rep)
    }
}

/// All elements of a unitriangular shape over `Z/qZ` modulo `reduction`
/// (`Trivial` or `Full`), in a fixed order.
pub fn enumerate_unitriangular(
    shape: &GroupShape,
    q: u64,
    reduction: CentralReduction,
    budget: u128,
) -> Result<Vec<QuotientElem<ZModQ>>, GroupError> {
    if !shape.is_unitriangular() {
        return Err(GroupError::InvalidShape(shape.blocks().to_vec()));
    }
    let n = shape.dim();
    let skip_corner = match reduction {
        CentralReduction::Full => true,
        CentralReduction::Trivial => false,
        other => {
            return Err(GroupError::ReductionRing {
                reduction: other,
                ring: format!("Z/{q}Z"),
            })
        }
    };
    let positions: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !(skip_corner && i == 0 && j == n - 1))
        .collect();
    let size = (q as u128).checked_pow(positions.len() as u32).unwrap_or(u128::MAX);
    if size > budget {
        return Err(GroupError::TooLarge { size, budget });
    }
    let zero = ZModQ::new(q, 0)?;
    let base = ShapedMatrix::identity(shape.clone(), &zero);
    let mut out = Vec::with_capacity(size as usize);
    for idx in 0..size {
        let mut rest = idx;
        let mut rows: Vec<Vec<ZModQ>> = (0..n).map(|i| (0..n).map(|j| *base.entry(i, j)).collect()).collect();
        for &(i, j) in &positions {
            rows[i][j] = ZModQ::new(q, (rest % q as u128) as i64)?;
            rest /= q as u128;
        }
        let m = crate::rings::SquareMatrix::from_rows(rows)?;
        out.push(QuotientElem::normal_form(
            ShapedMatrix::new(shape.clone(), m)?,
            reduction,
        )?);
    }
    Ok(out)
}
