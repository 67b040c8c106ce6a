use std::fmt;
use std::sync::Arc;

use super::{GroupElement, GroupError, GroupShape};
use crate::rings::{determinant, sl_inverse, RingElem, SquareMatrix};

/// Element of a block-unitriangular matrix group.
///
/// Invariants: entries below the block diagonal vanish, the two corner
/// diagonal entries equal 1 and every diagonal block has determinant 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShapedMatrix<R> {
    shape: Arc<GroupShape>,
    m: SquareMatrix<R>,
}

impl<R: RingElem> ShapedMatrix<R> {
    pub fn new(shape: GroupShape, m: SquareMatrix<R>) -> Result<Self, GroupError> {
        let shape = Arc::new(shape);
        Self::validate(&shape, &m)?;
        Ok(ShapedMatrix { shape, m })
    }

    fn validate(shape: &GroupShape, m: &SquareMatrix<R>) -> Result<(), GroupError> {
        let n = shape.dim();
        if m.dim() != n {
            return Err(GroupError::ShapeMismatch);
        }
        for i in 0..n {
            for j in 0..n {
                if !shape.allows(i, j) && !m.get(i, j).is_zero() {
                    return Err(GroupError::OutsideShape { i: i + 1, j: j + 1 });
                }
            }
        }
        for b in 0..shape.num_blocks() {
            let range = shape.block_range(b);
            let rows = range
                .clone()
                .map(|i| range.clone().map(|j| m.get(i, j).clone()).collect())
                .collect();
            let block = SquareMatrix::from_rows(rows)?;
            if !determinant(&block).is_one() {
                return Err(GroupError::DiagonalBlock { block: b });
            }
        }
        Ok(())
    }

    pub fn identity(shape: GroupShape, proto: &R) -> Self {
        let m = SquareMatrix::identity(shape.dim(), proto);
        ShapedMatrix {
            shape: Arc::new(shape),
            m,
        }
    }

    /// Elementary matrix `e_{ij}(a)`, indices 1-based as in the usual
    /// notation. `(i, j)` must be off-diagonal and allowed by the shape.
    pub fn elementary(shape: GroupShape, i: usize, j: usize, a: R) -> Result<Self, GroupError> {
        let n = shape.dim();
        if i == 0 || j == 0 || i > n || j > n || i == j || !shape.allows(i - 1, j - 1) {
            return Err(GroupError::OutsideShape { i, j });
        }
        let mut out = Self::identity(shape, &a);
        out.m.set(i - 1, j - 1, a);
        Ok(out)
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    /// Entry at 0-based position `(i, j)`.
    pub fn entry(&self, i: usize, j: usize) -> &R {
        self.m.get(i, j)
    }

    pub fn matrix(&self) -> &SquareMatrix<R> {
        &self.m
    }

    /// Any entry, used as a ring prototype.
    pub fn proto(&self) -> &R {
        self.m.get(0, 0)
    }

    /// The `(1, N)` entry, which parametrizes the centre.
    pub fn corner(&self) -> &R {
        self.m.get(0, self.dim() - 1)
    }

    pub fn with_corner(&self, c: R) -> Self {
        let mut out = self.clone();
        let n = self.dim();
        out.m.set(0, n - 1, c);
        out
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let e = self.m.get(i, j);
                if i == j {
                    e.is_one()
                } else {
                    e.is_zero()
                }
            })
        })
    }

    fn check_compatible(&self, other: &Self) -> Result<(), GroupError> {
        if self.shape != other.shape {
            return Err(GroupError::ShapeMismatch);
        }
        self.proto().check_same(other.proto())?;
        Ok(())
    }

    /// Matrix product, skipping the zero blocks below the diagonal.
    pub fn mul(&self, other: &Self) -> Result<Self, GroupError> {
        self.check_compatible(other)?;
        let n = self.dim();
        let sh = &self.shape;
        let zero = self.proto().zero_like();
        let mut rows: Vec<Vec<R>> = vec![vec![zero; n]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            let k_start = sh.block_range(sh.block_of(i)).start;
            for k in k_start..n {
                let a = self.m.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let j_start = sh.block_range(sh.block_of(k)).start;
                for (j, slot) in row.iter_mut().enumerate().skip(j_start) {
                    let b = other.m.get(k, j);
                    if !b.is_zero() {
                        *slot = slot.add(&a.mul(b));
                    }
                }
            }
        }
        Ok(ShapedMatrix {
            shape: self.shape.clone(),
            m: SquareMatrix::from_rows(rows)?,
        })
    }

    /// Exact inverse by block back-substitution; diagonal blocks are inverted
    /// through their adjugates.
    pub fn inverse(&self) -> Self {
        let sh = &self.shape;
        let n = self.dim();
        let nb = sh.num_blocks();
        let zero = self.proto().zero_like();
        let mut x: Vec<Vec<R>> = vec![vec![zero.clone(); n]; n];

        let mut diag_inv = Vec::with_capacity(nb);
        for b in 0..nb {
            let r = sh.block_range(b);
            let rows = r
                .clone()
                .map(|i| r.clone().map(|j| self.m.get(i, j).clone()).collect())
                .collect();
            let block = SquareMatrix::from_rows(rows).expect("square block");
            let inv = sl_inverse(&block).expect("diagonal blocks are unimodular");
            for (a, i) in r.clone().enumerate() {
                for (c, j) in r.clone().enumerate() {
                    x[i][j] = inv.get(a, c).clone();
                }
            }
            diag_inv.push(inv);
        }

        // X_ij = -D_i^{-1} * sum_{i < k <= j} M_ik X_kj, filled bottom-up.
        #[allow(clippy::needless_range_loop)]
        for bi in (0..nb).rev() {
            let ri = sh.block_range(bi);
            for bj in bi + 1..nb {
                let rj = sh.block_range(bj);
                let mut t: Vec<Vec<R>> = vec![vec![zero.clone(); rj.len()]; ri.len()];
                for (a, i) in ri.clone().enumerate() {
                    for k in sh.block_range(bi + 1).start..rj.end {
                        let mik = self.m.get(i, k);
                        if mik.is_zero() {
                            continue;
                        }
                        for (c, j) in rj.clone().enumerate() {
                            if !x[k][j].is_zero() {
                                t[a][c] = t[a][c].add(&mik.mul(&x[k][j]));
                            }
                        }
                    }
                }
                let dinv = &diag_inv[bi];
                for (a, i) in ri.clone().enumerate() {
                    for (c, j) in rj.clone().enumerate() {
                        let mut acc = zero.clone();
                        for (e, row) in t.iter().enumerate() {
                            acc = acc.add(&dinv.get(a, e).mul(&row[c]));
                        }
                        x[i][j] = acc.neg();
                    }
                }
            }
        }
        ShapedMatrix {
            shape: self.shape.clone(),
            m: SquareMatrix::from_rows(x).expect("square"),
        }
    }

    /// Applies a ring homomorphism entrywise. The caller guarantees `f` is a
    /// unital ring homomorphism, which preserves the shape invariants.
    pub fn map_entries<S: RingElem>(&self, f: impl Fn(&R) -> S) -> Result<ShapedMatrix<S>, GroupError> {
        let n = self.dim();
        let rows = (0..n).map(|i| (0..n).map(|j| f(self.m.get(i, j))).collect()).collect();
        Ok(ShapedMatrix {
            shape: self.shape.clone(),
            m: SquareMatrix::from_rows(rows)?,
        })
    }

    /// `self * e_{ij}(a)` (1-based), computed as the column operation
    /// `col_j += a * col_i`.
    pub fn mul_elementary(&self, i: usize, j: usize, a: &R) -> Result<Self, GroupError> {
        let n = self.dim();
        if i == 0 || j == 0 || i > n || j > n || i == j || !self.shape.allows(i - 1, j - 1) {
            return Err(GroupError::OutsideShape { i, j });
        }
        self.proto().check_same(a)?;
        let mut out = self.clone();
        if a.is_zero() {
            return Ok(out);
        }
        for r in 0..n {
            let x = self.m.get(r, i - 1);
            if !x.is_zero() {
                out.m.set(r, j - 1, self.m.get(r, j - 1).add(&x.mul(a)));
            }
        }
        Ok(out)
    }

    /// Conjugation by `diag(u, 1, ..., 1)` for a unit `u`: scales the first
    /// row off the diagonal by `u`. The first column is `(1, 0, ..., 0)`, so
    /// the `u^-1` factor never shows.
    pub(crate) fn scale_first_row(&self, u: &R) -> Self {
        let mut out = self.clone();
        for j in 1..self.dim() {
            let e = self.m.get(0, j);
            if !e.is_zero() {
                out.m.set(0, j, u.mul(e));
            }
        }
        out
    }

    /// Re-checks the shape invariants.
    pub fn is_valid(&self) -> bool {
        Self::validate(&self.shape, &self.m).is_ok()
    }
}

impl<R: RingElem> GroupElement for ShapedMatrix<R> {
    fn op(&self, other: &Self) -> Self {
        self.mul(other).expect("operands from the same group")
    }

    fn inverse(&self) -> Self {
        ShapedMatrix::inverse(self)
    }

    fn identity_like(&self) -> Self {
        ShapedMatrix::identity((*self.shape).clone(), self.proto())
    }

    fn is_identity(&self) -> bool {
        ShapedMatrix::is_identity(self)
    }
}

impl<R: RingElem> fmt::Display for ShapedMatrix<R> {
    /// Writes the matrix as a product of elementary factors in the literal
    /// syntax when it is a single elementary matrix, and row by row otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let mut off: Vec<(usize, usize)> = Vec::new();
        let mut diag_ok = true;
        for i in 0..n {
            for j in 0..n {
                let e = self.m.get(i, j);
                if i == j {
                    diag_ok &= e.is_one();
                } else if !e.is_zero() {
                    off.push((i, j));
                }
            }
        }
        match (diag_ok, off.as_slice()) {
            (true, []) => write!(f, "id"),
            (true, [(i, j)]) => write!(f, "e[{},{}]({})", i + 1, j + 1, self.m.get(*i, *j)),
            _ => {
                let rows: Vec<String> = (0..n)
                    .map(|i| {
                        let r: Vec<String> = (0..n).map(|j| self.m.get(i, j).to_string()).collect();
                        format!("[{}]", r.join(", "))
                    })
                    .collect();
                write!(f, "{}", rows.join(" "))
            }
        }
    }
}
