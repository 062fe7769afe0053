//! Statistical baselines: LZW compressed size and Shannon entropies.

use std::collections::HashMap;

use crate::ca::{Cell, Spacetime};
use crate::error::{Error, Result};

const FIRST_CODE: u32 = 256;
const MIN_WIDTH: u32 = 9;

/// Output of [`lzw_compress`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LzwResult {
    pub codes: Vec<u32>,
    pub compressed_bits: u64,
    pub compressed_bytes: u64,
}

/// Width of the `i`-th emitted code. When code `i` is written the dictionary
/// holds `256 + i` entries, and the width grows as soon as the next code to
/// assign no longer fits.
fn code_width(i: usize) -> u32 {
    let next = FIRST_CODE as u64 + i as u64;
    (u64::BITS - next.leading_zeros()).max(MIN_WIDTH)
}

/// Classic LZW: 256 single-byte roots, greedy longest match, one new phrase per
/// emitted code, variable-width codes starting at 9 bits, no dictionary reset.
pub fn lzw_compress(data: &[u8]) -> LzwResult {
    let mut dict: HashMap<(u32, u8), u32> = HashMap::new();
    let mut next = FIRST_CODE;
    let mut codes = Vec::new();
    let mut iter = data.iter();
    let Some(&first) = iter.next() else {
        return LzwResult {
            codes,
            compressed_bits: 0,
            compressed_bytes: 0,
        };
    };
    let mut current = first as u32;
    for &byte in iter {
        match dict.get(&(current, byte)) {
            Some(&code) => current = code,
            None => {
                codes.push(current);
                dict.insert((current, byte), next);
                next += 1;
                current = byte as u32;
            }
        }
    }
    codes.push(current);
    let compressed_bits: u64 = (0..codes.len()).map(|i| code_width(i) as u64).sum();
    LzwResult {
        codes,
        compressed_bits,
        compressed_bytes: compressed_bits.div_ceil(8),
    }
}

/// Inverse of [`lzw_compress`] on the code sequence.
pub fn lzw_decompress(codes: &[u32]) -> Result<Vec<u8>> {
    let mut phrases: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
    let mut out = Vec::new();
    let mut prev: Option<Vec<u8>> = None;
    for (i, &code) in codes.iter().enumerate() {
        let entry = match phrases.get(code as usize) {
            Some(p) => p.clone(),
            None if code as usize == phrases.len() && prev.is_some() => {
                let p = prev.as_ref().unwrap();
                let mut e = p.clone();
                e.push(p[0]);
                e
            }
            None => {
                return Err(Error::Parameter(format!("invalid LZW code {code} at position {i}")));
            }
        };
        out.extend_from_slice(&entry);
        if let Some(mut p) = prev.take() {
            p.push(entry[0]);
            phrases.push(p);
        }
        prev = Some(entry);
    }
    Ok(out)
}

impl LzwResult {
    /// Packs the codes LSB-first into `compressed_bytes` bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.compressed_bytes as usize);
        let (mut acc, mut filled) = (0u64, 0u32);
        for (i, &code) in self.codes.iter().enumerate() {
            acc |= (code as u64) << filled;
            filled += code_width(i);
            while filled >= 8 {
                out.push(acc as u8);
                acc >>= 8;
                filled -= 8;
            }
        }
        if filled > 0 {
            out.push(acc as u8);
        }
        out
    }
}

/// Reads codes back from [`LzwResult::to_bytes`]. Padding is always shorter
/// than a code, so the code count is implied.
pub fn unpack_codes(bytes: &[u8]) -> Vec<u32> {
    let total_bits = bytes.len() as u64 * 8;
    let mut codes = Vec::new();
    let (mut acc, mut filled, mut pos, mut used) = (0u64, 0u32, 0usize, 0u64);
    loop {
        let width = code_width(codes.len());
        if used + width as u64 > total_bits {
            break;
        }
        while filled < width {
            acc |= (bytes[pos] as u64) << filled;
            pos += 1;
            filled += 8;
        }
        codes.push((acc & ((1u64 << width) - 1)) as u32);
        acc >>= width;
        filled -= width;
        used += width as u64;
    }
    codes
}

/// ASCII rendering used for compression: `0`, `1`, and `2` for `-1`.
pub fn ascii_cells(cells: impl IntoIterator<Item = Cell>) -> Vec<u8> {
    cells
        .into_iter()
        .map(|c| match c {
            -1 => b'2',
            c => b'0' + c as u8,
        })
        .collect()
}

/// LZW size in bytes of the spacetime serialized row-major as ASCII digits.
pub fn compressed_size(st: &Spacetime) -> u64 {
    lzw_compress(&ascii_cells(st.cells())).compressed_bytes
}

/// Shannon entropy (bits) of a symbol sequence over a two-outcome or larger
/// alphabet, given symbol counts.
fn entropy_of_counts<I: IntoIterator<Item = usize>>(counts: I, total: usize) -> f64 {
    let total = total as f64;
    let mut h = 0.0;
    for c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    // -0.0 for single-symbol inputs
    h + 0.0
}

/// Entropy of the empirical distribution of non-overlapping length-`b`
/// blocks of `s`. A trailing partial block is ignored.
pub fn shannon_block_entropy(s: &[u8], b: usize) -> Result<f64> {
    if b == 0 {
        return Err(Error::Parameter("block length must be at least 1".into()));
    }
    if s.len() < b {
        return Err(Error::Parameter(format!(
            "input of length {} is shorter than block length {b}",
            s.len()
        )));
    }
    let mut counts: HashMap<&[u8], usize> = HashMap::new();
    for block in s.chunks_exact(b) {
        *counts.entry(block).or_insert(0) += 1;
    }
    // Summing in count order makes the value depend only on the multiset of
    // counts, so relabeling symbols cannot change a single bit of it.
    let mut counts: Vec<usize> = counts.into_values().collect();
    counts.sort_unstable();
    Ok(entropy_of_counts(counts, s.len() / b))
}

/// Per-cell entropy grid, row-major `height x width`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyGrid {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl EntropyGrid {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Element-wise `self - other`.
    pub fn difference(&self, other: &EntropyGrid) -> Result<EntropyGrid> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::Size("entropy grids differ in shape".into()));
        }
        Ok(EntropyGrid {
            width: self.width,
            height: self.height,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }
}

/// Entropy of each cell's time series across all frames.
pub fn temporal_cell_entropy(st: &Spacetime) -> Result<EntropyGrid> {
    if st.len() < 2 {
        return Err(Error::Parameter("need at least 2 time slices".into()));
    }
    let first = st.frame(0);
    let n = first.len();
    let mut ones = vec![0usize; n];
    for f in st.frames() {
        for (acc, &c) in ones.iter_mut().zip(f.cells()) {
            *acc += (c != 0) as usize;
        }
    }
    let t = st.len();
    let values = ones
        .into_iter()
        .map(|k| entropy_of_counts([k, t - k], t))
        .collect();
    Ok(EntropyGrid {
        width: first.width(),
        height: first.height(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ca::{evolve_gol, Alphabet, Configuration};
    use proptest::prelude::*;

    #[test]
    fn hand_traced_lzw() {
        let empty = lzw_compress(b"");
        assert_eq!((empty.codes.len(), empty.compressed_bits, empty.compressed_bytes), (0, 0, 0));

        let aaaa = lzw_compress(b"aaaa");
        assert_eq!(aaaa.codes, [97, 256, 97]);
        assert_eq!(aaaa.compressed_bits, 27);
        assert_eq!(aaaa.compressed_bytes, 4);

        let ab = lzw_compress(b"ab");
        assert_eq!(ab.codes, [97, 98]);
        assert_eq!(ab.compressed_bits, 18);
        assert_eq!(ab.compressed_bytes, 3);
    }

    #[test]
    fn kwkwk_case_decodes() {
        // "abababa" exercises the code-not-yet-in-dictionary branch.
        let r = lzw_compress(b"abababa");
        assert_eq!(r.codes, [97, 98, 256, 258]);
        assert_eq!(lzw_decompress(&r.codes).unwrap(), b"abababa");
    }

    #[test]
    fn code_width_grows_at_powers_of_two() {
        assert_eq!(code_width(0), 9);
        assert_eq!(code_width(255), 9);
        assert_eq!(code_width(256), 10);
        assert_eq!(code_width(767), 10);
        assert_eq!(code_width(768), 11);
    }

    #[test]
    fn invalid_codes_rejected() {
        assert!(lzw_decompress(&[300]).is_err());
        assert!(lzw_decompress(&[97, 900]).is_err());
    }

    #[test]
    fn all_zero_spacetime_compresses() {
        let rows = vec![Configuration::zeros(10, 1, Alphabet::Binary).unwrap(); 10];
        let st = Spacetime::from_frames(rows, crate::ca::RuleProvenance::Unknown).unwrap();
        let size = compressed_size(&st);
        assert!(size < 100, "{size}");
        assert_eq!(size, lzw_compress(&[b'0'; 100]).compressed_bytes);
    }

    #[test]
    fn ternary_serialization_uses_two() {
        assert_eq!(ascii_cells([0, 1, -1]), b"012");
    }

    #[test]
    fn block_entropy_examples() {
        assert_eq!(shannon_block_entropy(b"0000", 1).unwrap(), 0.0);
        assert_eq!(shannon_block_entropy(b"0101", 1).unwrap(), 1.0);
        assert_eq!(shannon_block_entropy(b"0011", 2).unwrap(), 1.0);
        assert_eq!(shannon_block_entropy(b"00110", 2).unwrap(), 1.0);
        assert!(shannon_block_entropy(b"0", 2).is_err());
        assert!(shannon_block_entropy(b"0", 0).is_err());
    }

    fn grid(w: usize, h: usize, live: &[(usize, usize)]) -> Configuration {
        let mut cells = vec![0; w * h];
        for &(r, c) in live {
            cells[r * w + c] = 1;
        }
        Configuration::new_2d(w, h, cells, Alphabet::Binary).unwrap()
    }

    #[test]
    fn temporal_entropy_cases() {
        let block = evolve_gol(&grid(6, 6, &[(2, 2), (2, 3), (3, 2), (3, 3)]), 8).unwrap();
        assert!(temporal_cell_entropy(&block).unwrap().values.iter().all(|&h| h == 0.0));

        // 8 frames: arm cells are live in exactly half of them.
        let blinker = evolve_gol(&grid(5, 5, &[(1, 2), (2, 2), (3, 2)]), 7).unwrap();
        let h = temporal_cell_entropy(&blinker).unwrap();
        for (r, c) in [(1, 2), (3, 2), (2, 1), (2, 3)] {
            assert_eq!(h.get(r, c), 1.0);
        }
        assert_eq!(h.get(2, 2), 0.0);

        let dead = evolve_gol(&grid(4, 4, &[]), 3).unwrap();
        assert_eq!(temporal_cell_entropy(&dead).unwrap().total(), 0.0);

        let single = Spacetime::from_frames(vec![grid(4, 4, &[])], crate::ca::RuleProvenance::GameOfLife).unwrap();
        assert!(temporal_cell_entropy(&single).is_err());
    }

    proptest! {
        #[test]
        fn lzw_round_trip(data in proptest::collection::vec(any::<u8>(), 0..4096)) {
            let r = lzw_compress(&data);
            prop_assert_eq!(lzw_decompress(&r.codes).unwrap(), data);
            let packed = r.to_bytes();
            prop_assert_eq!(packed.len() as u64, r.compressed_bytes);
            prop_assert_eq!(unpack_codes(&packed), r.codes);
        }

        #[test]
        fn doubling_reuses_dictionary(data in proptest::collection::vec(0u8..4, 1..2048)) {
            let once = lzw_compress(&data).codes.len();
            let doubled = [data.clone(), data].concat();
            prop_assert!(lzw_compress(&doubled).codes.len() <= 2 * once);
        }

        #[test]
        fn entropy_bounds_and_complement(bits in proptest::collection::vec(0u8..2, 1..512), b in 1usize..6) {
            prop_assume!(bits.len() >= b);
            let s: Vec<u8> = bits.iter().map(|&x| b'0' + x).collect();
            let c: Vec<u8> = bits.iter().map(|&x| b'1' - x).collect();
            let h = shannon_block_entropy(&s, b).unwrap();
            prop_assert!((0.0..=b as f64 + 1e-12).contains(&h));
            prop_assert_eq!(h, shannon_block_entropy(&c, b).unwrap());
        }
    }
}
