use std::ops::Range;

use super::GroupError;

/// Block partition of the matrix size `N`. Entries below the block diagonal
/// vanish; the outer blocks have size 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupShape {
    blocks: Vec<usize>,
    block_of: Vec<usize>,
    starts: Vec<usize>,
}

impl GroupShape {
    pub fn new(blocks: Vec<usize>) -> Result<Self, GroupError> {
        let valid = blocks.len() >= 2
            && blocks.iter().all(|&b| b >= 1)
            && blocks.first() == Some(&1)
            && blocks.last() == Some(&1);
        if !valid {
            return Err(GroupError::InvalidShape(blocks));
        }
        let mut block_of = Vec::new();
        let mut starts = Vec::new();
        for (b, &size) in blocks.iter().enumerate() {
            starts.push(block_of.len());
            block_of.extend(std::iter::repeat_n(b, size));
        }
        Ok(GroupShape {
            blocks,
            block_of,
            starts,
        })
    }

    /// `G0`: blocks `(1, 3, 1)`, `N = 5`.
    pub fn g0() -> Self {
        Self::new(vec![1, 3, 1]).expect("valid shape")
    }

    /// `K0`: blocks `(1, 3, 3, 1)`, `N = 8`.
    pub fn k0() -> Self {
        Self::new(vec![1, 3, 3, 1]).expect("valid shape")
    }

    /// Upper unitriangular `3 x 3` matrices.
    pub fn heisenberg() -> Self {
        Self::new(vec![1, 1, 1]).expect("valid shape")
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn dim(&self) -> usize {
        self.block_of.len()
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn block_range(&self, b: usize) -> Range<usize> {
        self.starts[b]..self.starts[b] + self.blocks[b]
    }

    /// Whether position `(i, j)` (0-based) may hold a nonzero entry.
    pub fn allows(&self, i: usize, j: usize) -> bool {
        self.block_of[i] <= self.block_of[j]
    }

    /// All diagonal blocks have size 1.
    pub fn is_unitriangular(&self) -> bool {
        self.blocks.iter().all(|&b| b == 1)
    }
}
