use std::fmt;

use crate::error::{Result, RigError};

/// A partition of `{0, .., n-1}` into nonempty blocks labelled
/// `0..block_count`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    block_count: usize,
}

impl Partition {
    /// Validates an assignment whose labels already form `0..k` with every
    /// label used.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        let block_count = assignment.iter().max().map_or(0, |&b| b + 1);
        let mut used = vec![false; block_count];
        for &b in &assignment {
            used[b] = true;
        }
        if let Some(b) = used.iter().position(|&u| !u) {
            return Err(RigError::InvalidPartition(format!("block {b} is empty")));
        }
        Ok(Self {
            assignment,
            block_count,
        })
    }

    /// Relabels arbitrary labels to `0..k` in order of first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|&l| {
                let next = map.len();
                *map.entry(l).or_insert(next)
            })
            .collect();
        Self {
            assignment,
            block_count: map.len(),
        }
    }

    /// Builds a partition from explicit blocks, which must be nonempty,
    /// pairwise disjoint and cover `0..n`.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(RigError::InvalidPartition(format!("block {b} is empty")));
            }
            for &v in block {
                if v >= n {
                    return Err(RigError::InvalidPartition(format!("vertex {v} outside [0, {n})")));
                }
                if assignment[v] != usize::MAX {
                    return Err(RigError::InvalidPartition(format!("vertex {v} is in two blocks")));
                }
                assignment[v] = b;
            }
        }
        if let Some(v) = assignment.iter().position(|&b| b == usize::MAX) {
            return Err(RigError::InvalidPartition(format!("vertex {v} is not covered")));
        }
        Ok(Self {
            assignment,
            block_count: blocks.len(),
        })
    }

    pub fn trivial(n: usize) -> Self {
        Self {
            assignment: vec![0; n],
            block_count: usize::from(n > 0),
        }
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for (v, &b) in self.assignment.iter().enumerate() {
            blocks[b].push(v);
        }
        blocks
    }

    /// Parses the one-line text format: `n` comma-separated block indices.
    pub fn parse(text: &str) -> Result<Self> {
        let line = text.trim();
        if line.is_empty() {
            return Self::new(Vec::new());
        }
        let assignment = line
            .split(',')
            .map(|t| {
                t.trim().parse::<usize>().map_err(|_| RigError::Parse {
                    line: 1,
                    msg: format!("bad block index {t:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(assignment)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.assignment.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_gaps_in_labels() {
        assert!(Partition::new(vec![0, 2, 2]).is_err());
        assert_eq!(Partition::new(vec![1, 0, 1]).unwrap().block_count(), 2);
    }

    #[test]
    fn compacts_labels_by_first_appearance() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.assignment(), &[0, 1, 0, 2]);
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn from_blocks_checks_cover() {
        assert!(Partition::from_blocks(3, &[vec![0, 1], vec![2]]).is_ok());
        assert!(Partition::from_blocks(3, &[vec![0, 1]]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0, 1], vec![1, 2]]).is_err());
        assert!(Partition::from_blocks(3, &[vec![0, 1, 2], vec![]]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = Partition::new(vec![0, 1, 1, 2, 0]).unwrap();
        assert_eq!(p.to_string(), "0,1,1,2,0");
        assert_eq!(Partition::parse("0,1,1,2,0\n").unwrap(), p);
        assert!(Partition::parse("0,x").is_err());
    }
}
