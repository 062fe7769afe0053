//! Block Decomposition Method.
//!
//! An object is cut into non-overlapping blocks, each block is scored with
//! its CTM value, and the score of the whole is
//!
//! ```text
//! BDM = sum over unique blocks b_i of  CTM(b_i) + log2(n_i)
//! ```
//!
//! where `n_i` is the multiplicity of `b_i`. Terms are added in ascending
//! order, so equal multisets of terms give bit-identical values.
//!
//! 2D arrays are tiled into `d x d` squares (right and bottom remainders kept
//! as smaller rectangles), and each tile is flattened row-major and looked up
//! in the same 1D table. Arrays containing `-1` are binarized cell-wise first
//! (`0 -> 00`, `1 -> 01`, `-1 -> 10`).

use std::collections::HashMap;

use crate::ca::{Cell, Configuration};
use crate::ctm::{CtmTable, TableMeta};
use crate::error::{Error, Result};

pub const DEFAULT_BLOCK_1D: usize = 6;
pub const DEFAULT_BLOCK_2D: usize = 3;
/// State count of the table used for 1D inputs by default.
pub const DEFAULT_CLASS_1D: u32 = 3;
/// State count of the table used for 2D inputs by default.
pub const DEFAULT_CLASS_2D: u32 = 4;

/// How an input was cut: unique blocks with their multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockPartition {
    /// Unique blocks in (length, lexicographic) order.
    pub blocks: Vec<(String, usize)>,
    /// `b` for 1D partitions, `d` for 2D ones.
    pub block_size: usize,
    /// Cells (1D) or tiles (2D) that did not fit a full block.
    pub remainder: Remainder,
    /// Symbols in the (binarized) input.
    pub input_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Remainder {
    /// Length of the trailing short block (1D) or width of the right strip (2D).
    pub cols: usize,
    /// Height of the bottom strip (2D only).
    pub rows: usize,
}

impl BlockPartition {
    fn from_counts(counts: HashMap<&[u8], usize>, block_size: usize, remainder: Remainder, input_len: usize) -> Self {
        let mut blocks: Vec<(String, usize)> = counts
            .into_iter()
            .map(|(b, n)| (String::from_utf8_lossy(b).into_owned(), n))
            .collect();
        blocks.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        BlockPartition {
            blocks,
            block_size,
            remainder,
            input_len,
        }
    }

    /// Total number of blocks, repeats included.
    pub fn block_count(&self) -> usize {
        self.blocks.iter().map(|(_, n)| n).sum()
    }

    /// Symbols covered by all blocks; equals `input_len`.
    pub fn covered_len(&self) -> usize {
        self.blocks.iter().map(|(b, n)| b.len() * n).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BdmValue {
    /// Bits.
    pub value: f64,
    pub partition: BlockPartition,
    pub table: TableMeta,
}

/// Cuts `s` left to right into blocks of length `b`; a shorter trailing block
/// is kept.
pub fn partition_1d(s: &str, b: usize) -> Result<BlockPartition> {
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    if b == 0 {
        return Err(Error::Parameter("block length must be at least 1".into()));
    }
    let mut counts: HashMap<&[u8], usize> = HashMap::new();
    for block in s.as_bytes().chunks(b) {
        *counts.entry(block).or_insert(0) += 1;
    }
    let remainder = Remainder {
        cols: s.len() % b,
        rows: 0,
    };
    Ok(BlockPartition::from_counts(counts, b, remainder, s.len()))
}

/// Scores a partition against `table`. Terms are added in ascending order so
/// the result depends only on the multiset of terms.
pub fn score(partition: &BlockPartition, table: &CtmTable) -> Result<f64> {
    let mut terms = partition
        .blocks
        .iter()
        .map(|(block, n)| Ok(table.lookup(block)? + (*n as f64).log2()))
        .collect::<Result<Vec<f64>>>()?;
    terms.sort_by(f64::total_cmp);
    Ok(terms.iter().sum())
}

/// BDM of a binary string with block length `b`.
pub fn bdm_1d(s: &str, table: &CtmTable, b: usize) -> Result<BdmValue> {
    let partition = partition_1d(s, b)?;
    let value = score(&partition, table)?;
    Ok(BdmValue {
        value,
        partition,
        table: *table.meta(),
    })
}

/// Renders cells as `0`/`1` digits. If any cell is `-1`, every cell is
/// expanded to two bits (`0 -> 00`, `1 -> 01`, `-1 -> 10`).
pub fn binarize(cells: &[Cell]) -> Result<String> {
    let ternary = cells.contains(&-1);
    let mut out = String::with_capacity(cells.len() * if ternary { 2 } else { 1 });
    for (index, &c) in cells.iter().enumerate() {
        let code = match (ternary, c) {
            (false, 0) => "0",
            (false, 1) => "1",
            (true, 0) => "00",
            (true, 1) => "01",
            (true, -1) => "10",
            (_, value) => {
                return Err(Error::Alphabet {
                    value,
                    index,
                    alphabet: "ternary",
                })
            }
        };
        out.push_str(code);
    }
    Ok(out)
}

/// Tiles `a` into `d x d` blocks, flattening each tile row-major.
pub fn partition_2d(a: &Configuration, d: usize) -> Result<BlockPartition> {
    if d == 0 {
        return Err(Error::Parameter("block side must be at least 1".into()));
    }
    if a.is_empty() {
        return Err(Error::EmptyInput);
    }
    let ternary = a.cells().contains(&-1);
    let per_cell = if ternary { 2 } else { 1 };
    let encoded = binarize(a.cells())?;
    let enc = encoded.as_bytes();
    let (w, h) = (a.width(), a.height());

    // Every tile is copied into one arena first so the counting map can
    // borrow slices of it.
    let mut arena: Vec<u8> = Vec::with_capacity(enc.len());
    let mut spans: Vec<(usize, usize)> = Vec::new();
    for r0 in (0..h).step_by(d) {
        let rows = d.min(h - r0);
        for c0 in (0..w).step_by(d) {
            let cols = d.min(w - c0);
            let start = arena.len();
            for r in r0..r0 + rows {
                let from = (r * w + c0) * per_cell;
                arena.extend_from_slice(&enc[from..from + cols * per_cell]);
            }
            spans.push((start, arena.len()));
        }
    }
    let mut counts: HashMap<&[u8], usize> = HashMap::new();
    for &(s, e) in &spans {
        *counts.entry(&arena[s..e]).or_insert(0) += 1;
    }
    let remainder = Remainder {
        cols: w % d,
        rows: h % d,
    };
    Ok(BlockPartition::from_counts(counts, d, remainder, enc.len()))
}

/// 2D BDM with `d x d` tiles.
pub fn bdm_2d(a: &Configuration, table: &CtmTable, d: usize) -> Result<BdmValue> {
    let partition = partition_2d(a, d)?;
    let value = score(&partition, table)?;
    Ok(BdmValue {
        value,
        partition,
        table: *table.meta(),
    })
}

/// BDM of a cell sequence read as one string (binarized when ternary).
pub fn bdm_cells(cells: &[Cell], table: &CtmTable, b: usize) -> Result<BdmValue> {
    bdm_1d(&binarize(cells)?, table, b)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn bits(len: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = String> {
        prop::collection::vec(prop::bool::ANY, len).prop_map(|v| v.into_iter().map(|b| if b { '1' } else { '0' }).collect())
    }

    fn complement(s: &str) -> String {
        s.chars().map(|c| if c == '0' { '1' } else { '0' }).collect()
    }

    proptest! {
        #[test]
        fn repetition_law(s in bits(6), k in 1usize..40) {
            let t = CtmTable::shipped();
            let v = bdm_1d(&s.repeat(k), t, 6).unwrap().value;
            let expect = t.lookup(&s).unwrap() + (k as f64).log2();
            prop_assert!((v - expect).abs() < 1e-9);
        }

        #[test]
        fn complement_invariance(s in bits(1..200), b in 1usize..8) {
            let t = CtmTable::shipped();
            prop_assert_eq!(bdm_1d(&s, t, b).unwrap().value, bdm_1d(&complement(&s), t, b).unwrap().value);
        }

        #[test]
        fn block_order_does_not_matter(blocks in prop::collection::vec(bits(6), 1..20), rot in 0usize..20) {
            let t = CtmTable::shipped();
            let mut shuffled = blocks.clone();
            shuffled.rotate_left(rot % blocks.len());
            shuffled.reverse();
            prop_assert_eq!(
                bdm_1d(&blocks.concat(), t, 6).unwrap().value,
                bdm_1d(&shuffled.concat(), t, 6).unwrap().value
            );
        }

        #[test]
        fn partition_accounts_for_every_block(s in bits(1..100), b in 1usize..9) {
            let p = partition_1d(&s, b).unwrap();
            prop_assert_eq!(p.covered_len(), s.len());
            prop_assert_eq!(p.block_count(), s.len().div_ceil(b));
            prop_assert!(p.blocks.iter().all(|(_, n)| *n >= 1));
        }
    }
}
