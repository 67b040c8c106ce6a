use std::fmt;

use super::{RingElem, RingError};

/// Dense square matrix over a commutative ring, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SquareMatrix<R> {
    dim: usize,
    entries: Vec<R>,
}

impl<R: RingElem> SquareMatrix<R> {
    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self, RingError> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(RingError::DimensionMismatch);
        }
        let entries: Vec<R> = rows.into_iter().flatten().collect();
        for e in &entries[1..] {
            entries[0].check_same(e)?;
        }
        Ok(SquareMatrix { dim, entries })
    }

    pub fn identity(dim: usize, proto: &R) -> Self {
        let zero = proto.zero_like();
        let one = proto.one_like();
        let entries = (0..dim * dim)
            .map(|idx| {
                if idx / dim == idx % dim {
                    one.clone()
                } else {
                    zero.clone()
                }
            })
            .collect();
        SquareMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: R) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn mul(&self, other: &Self) -> Result<Self, RingError> {
        if self.dim != other.dim {
            return Err(RingError::DimensionMismatch);
        }
        self.entries[0].check_same(&other.entries[0])?;
        let n = self.dim;
        let zero = self.entries[0].zero_like();
        let mut out = vec![zero; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out[i * n + j] = out[i * n + j].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(SquareMatrix { dim: n, entries: out })
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Self {
        let n = self.dim;
        let entries = (0..n)
            .filter(|&i| i != skip_row)
            .flat_map(|i| {
                (0..n)
                    .filter(move |&j| j != skip_col)
                    .map(move |j| self.get(i, j).clone())
            })
            .collect();
        SquareMatrix { dim: n - 1, entries }
    }
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant<R: RingElem>(a: &SquareMatrix<R>) -> R {
    match a.dim {
        1 => a.get(0, 0).clone(),
        2 => a.get(0, 0).mul(a.get(1, 1)).sub(&a.get(0, 1).mul(a.get(1, 0))),
        n => {
            let mut acc = a.get(0, 0).zero_like();
            for j in 0..n {
                let c = a.get(0, j);
                if c.is_zero() {
                    continue;
                }
                let term = c.mul(&determinant(&a.minor(0, j)));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Inverse of a determinant-one matrix, computed as its adjugate.
pub fn sl_inverse<R: RingElem>(a: &SquareMatrix<R>) -> Result<SquareMatrix<R>, RingError> {
    if !determinant(a).is_one() {
        return Err(RingError::DeterminantNotOne);
    }
    let n = a.dim;
    if n == 1 {
        return Ok(a.clone());
    }
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let cof = determinant(&a.minor(j, i));
            entries.push(if (i + j) % 2 == 0 { cof } else { cof.neg() });
        }
    }
    Ok(SquareMatrix { dim: n, entries })
}

impl<R: RingElem> fmt::Display for SquareMatrix<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
