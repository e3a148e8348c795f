use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64};
use crate::poly;

/// `M_{n_1}(C) ⊕ ... ⊕ M_{n_r}(C)`, described by its block sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAlgebra {
    #[serde(rename = "blocks")]
    block_sizes: Vec<usize>,
}

impl BlockAlgebra {
    pub fn new(block_sizes: Vec<usize>) -> Result<Self> {
        if block_sizes.is_empty() {
            return Err(Error::InvalidInput("block algebra needs at least one block".into()));
        }
        if let Some(i) = block_sizes.iter().position(|&n| n == 0) {
            return Err(Error::InvalidInput(format!("block {i} has size 0")));
        }
        Ok(BlockAlgebra { block_sizes })
    }

    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    pub fn num_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    /// Total matrix dimension `sum n_i`.
    pub fn dim(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    pub fn identity(&self) -> BlockElement {
        BlockElement {
            algebra: self.clone(),
            blocks: self.block_sizes.iter().map(|&n| ComplexMatrix::identity(n)).collect(),
        }
    }

    pub fn zero(&self) -> BlockElement {
        BlockElement {
            algebra: self.clone(),
            blocks: self.block_sizes.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect(),
        }
    }
}

/// Two-sided ideal of a block algebra: the direct sum of the listed blocks.
///
/// Every two-sided ideal of a finite direct sum of full matrix algebras has
/// this form, so the block subset is a complete description.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IdealSpec {
    member_blocks: BTreeSet<usize>,
}

impl IdealSpec {
    pub fn zero() -> Self {
        IdealSpec::default()
    }

    pub fn full(algebra: &BlockAlgebra) -> Self {
        IdealSpec {
            member_blocks: (0..algebra.num_blocks()).collect(),
        }
    }

    pub fn new(blocks: impl IntoIterator<Item = usize>) -> Self {
        IdealSpec {
            member_blocks: blocks.into_iter().collect(),
        }
    }

    pub fn contains(&self, block: usize) -> bool {
        self.member_blocks.contains(&block)
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.member_blocks.iter().copied()
    }

    pub fn validate(&self, algebra: &BlockAlgebra) -> Result<()> {
        match self.member_blocks.iter().find(|&&i| i >= algebra.num_blocks()) {
            Some(i) => Err(Error::InvalidInput(format!(
                "ideal references block {i} but the algebra has {} blocks",
                algebra.num_blocks()
            ))),
            None => Ok(()),
        }
    }

    /// Indices of blocks that survive in the quotient.
    pub fn complement(&self, algebra: &BlockAlgebra) -> Vec<usize> {
        (0..algebra.num_blocks()).filter(|i| !self.contains(*i)).collect()
    }
}

/// Element of a block algebra; serialized as its list of blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ComplexMatrix>", into = "Vec<ComplexMatrix>")]
pub struct BlockElement {
    algebra: BlockAlgebra,
    blocks: Vec<ComplexMatrix>,
}

impl BlockElement {
    pub fn new(algebra: BlockAlgebra, blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "{} blocks supplied for an algebra with {}",
                blocks.len(),
                algebra.num_blocks()
            )));
        }
        for (i, (b, &n)) in blocks.iter().zip(algebra.block_sizes()).enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::ShapeMismatch(format!(
                    "block {i} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        Ok(BlockElement { algebra, blocks })
    }

    /// Element whose algebra is read off the (square) block shapes.
    pub fn from_blocks(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        for (i, b) in blocks.iter().enumerate() {
            if !b.is_square() {
                return Err(Error::ShapeMismatch(format!("block {i} is not square")));
            }
        }
        let algebra = BlockAlgebra::new(blocks.iter().map(|b| b.rows()).collect())?;
        Ok(BlockElement { algebra, blocks })
    }

    pub fn algebra(&self) -> &BlockAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix {
        &self.blocks[i]
    }

    pub fn into_blocks(self) -> Vec<ComplexMatrix> {
        self.blocks
    }

    fn zip_with(&self, other: &BlockElement, f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix) -> Result<Self> {
        self.ensure_same_algebra(other)?;
        Ok(BlockElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&other.blocks).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn ensure_same_algebra(&self, other: &BlockElement) -> Result<()> {
        if self.algebra != other.algebra {
            return Err(Error::ShapeMismatch(format!(
                "algebras differ: {:?} vs {:?}",
                self.algebra.block_sizes(),
                other.algebra.block_sizes()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &BlockElement) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &BlockElement) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &BlockElement) -> Result<Self> {
        self.zip_with(other, |a, b| a.matmul(b))
    }

    pub fn map_blocks(&self, f: impl Fn(usize, &ComplexMatrix) -> ComplexMatrix) -> Self {
        BlockElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().enumerate().map(|(i, b)| f(i, b)).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map_blocks(|_, b| b.scale(s))
    }

    pub fn pow(&self, k: u32) -> Self {
        self.map_blocks(|_, b| b.pow(k))
    }

    /// `a + s e`.
    pub fn shift(&self, s: C64) -> Self {
        self.map_blocks(|_, b| b.shift(s))
    }

    pub fn poly_eval(&self, coeffs: &[C64]) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| poly::poly_eval(b, coeffs))
            .collect::<Result<Vec<_>>>()?;
        Ok(BlockElement {
            algebra: self.algebra.clone(),
            blocks,
        })
    }

    /// Largest block operator norm; the norm of the element in `A`.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(|b| b.op_norm()).fold(0.0, f64::max)
    }

    /// Copy with the blocks of `ideal` replaced by zero.
    pub fn without_ideal(&self, ideal: &IdealSpec) -> Self {
        self.map_blocks(|i, b| {
            if ideal.contains(i) {
                ComplexMatrix::zeros(b.rows(), b.cols())
            } else {
                b.clone()
            }
        })
    }

    /// Copy keeping only the blocks of `ideal`; an element of the ideal.
    pub fn ideal_part(&self, ideal: &IdealSpec) -> Self {
        self.map_blocks(|i, b| {
            if ideal.contains(i) {
                b.clone()
            } else {
                ComplexMatrix::zeros(b.rows(), b.cols())
            }
        })
    }

    /// True when every block outside `ideal` has norm at most `tol`.
    pub fn in_ideal(&self, ideal: &IdealSpec, tol: f64) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, b)| ideal.contains(i) || b.op_norm() <= tol)
    }

    /// Exact (bitwise zero) membership.
    pub fn in_ideal_exact(&self, ideal: &IdealSpec) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, b)| ideal.contains(i) || b.is_zero())
    }
}

impl TryFrom<Vec<ComplexMatrix>> for BlockElement {
    type Error = Error;

    fn try_from(blocks: Vec<ComplexMatrix>) -> Result<Self> {
        BlockElement::from_blocks(blocks)
    }
}

impl From<BlockElement> for Vec<ComplexMatrix> {
    fn from(e: BlockElement) -> Self {
        e.blocks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algebra_rejects_empty_and_zero_sizes() {
        assert!(BlockAlgebra::new(vec![]).is_err());
        assert!(BlockAlgebra::new(vec![2, 0]).is_err());
        assert_eq!(BlockAlgebra::new(vec![2, 3]).unwrap().dim(), 5);
    }

    #[test]
    fn element_checks_block_shapes() {
        let alg = BlockAlgebra::new(vec![2, 1]).unwrap();
        assert!(BlockElement::new(alg.clone(), vec![ComplexMatrix::identity(2)]).is_err());
        assert!(BlockElement::new(alg.clone(), vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)]).is_err());
        assert!(BlockElement::new(alg, vec![ComplexMatrix::identity(2), ComplexMatrix::identity(1)]).is_ok());
    }

    #[test]
    fn ideal_validation_and_json() {
        let alg = BlockAlgebra::new(vec![2, 3]).unwrap();
        assert!(IdealSpec::new([2]).validate(&alg).is_err());
        let j = IdealSpec::new([1]);
        assert_eq!(serde_json::to_string(&j).unwrap(), "[1]");
        assert_eq!(j.complement(&alg), vec![0]);
        assert_eq!(serde_json::to_string(&alg).unwrap(), r#"{"blocks":[2,3]}"#);
    }

    #[test]
    fn ideal_parts_recombine() {
        let a = BlockElement::from_blocks(vec![
            ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]),
            ComplexMatrix::from_real_rows(&[&[5.0]]),
        ])
        .unwrap();
        let j = IdealSpec::new([1]);
        let sum = a.without_ideal(&j).add(&a.ideal_part(&j)).unwrap();
        assert_eq!(sum, a);
        assert!(a.ideal_part(&j).in_ideal_exact(&j));
        assert!(!a.in_ideal(&j, 1e-10));
    }
}
