//! Bit embedding and blind extraction over mid-band DCT coefficient pairs.
//!
//! One watermark bit is encoded per 8x8 block by ordering two mid-band
//! coefficients: `C1 >= C2` reads as 0, `C1 < C2` as 1. The full algorithm
//! (tag `mmbec`) picks its exchange pairs by equal JPEG quantization factor
//! and widens the coefficient gap to a strength factor `B`; the baseline
//! (tag `mbec`) uses one fixed pair and no gap widening.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::imaging::{dct2, from_blocks, idct2, to_blocks, Block8, GrayImage, BLOCK_SIZE};
use crate::par;

/// Baseline JPEG luminance quantization table (quality 50).
const BASE_QUANT: [[u16; 8]; 8] = [
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
];

/// 8x8 table of positive quantization factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantTable {
    values: [[u16; 8]; 8],
}

impl QuantTable {
    /// The standard JPEG luminance table the exchange pairs are drawn from.
    pub fn standard() -> Self {
        QuantTable { values: BASE_QUANT }
    }

    pub fn from_values(values: [[u16; 8]; 8]) -> Self {
        QuantTable { values }
    }

    pub fn values(&self) -> &[[u16; 8]; 8] {
        &self.values
    }

    /// Factor at a 1-based (row, col) position.
    pub fn at(&self, pos: CoefficientPosition) -> u16 {
        self.values[pos.row as usize - 1][pos.col as usize - 1]
    }
}

/// 1-based (row, col) index into an 8x8 coefficient block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientPosition {
    pub row: u8,
    pub col: u8,
}

impl CoefficientPosition {
    pub const fn new(row: u8, col: u8) -> Self {
        assert!(row >= 1 && row <= 8 && col >= 1 && col <= 8);
        CoefficientPosition { row, col }
    }

    /// Mid-band positions sit between the perceptually critical low band
    /// and the compression-discarded high band.
    pub fn is_mid_band(&self) -> bool {
        let s = self.row + self.col;
        (4..=9).contains(&s)
    }

    fn indices(&self) -> (usize, usize) {
        (self.row as usize - 1, self.col as usize - 1)
    }
}

/// Two exchange coefficients sharing one quantization factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoefficientPair {
    pub first: CoefficientPosition,
    pub second: CoefficientPosition,
    pub quant_factor: u16,
}

const STANDARD_PAIRS: [CoefficientPair; 5] = [
    CoefficientPair {
        first: CoefficientPosition::new(4, 1),
        second: CoefficientPosition::new(2, 3),
        quant_factor: 14,
    },
    CoefficientPair {
        first: CoefficientPosition::new(3, 3),
        second: CoefficientPosition::new(1, 4),
        quant_factor: 16,
    },
    CoefficientPair {
        first: CoefficientPosition::new(5, 2),
        second: CoefficientPosition::new(4, 3),
        quant_factor: 22,
    },
    CoefficientPair {
        first: CoefficientPosition::new(3, 4),
        second: CoefficientPosition::new(1, 5),
        quant_factor: 24,
    },
    CoefficientPair {
        first: CoefficientPosition::new(3, 5),
        second: CoefficientPosition::new(1, 6),
        quant_factor: 40,
    },
];

/// Ordered list of exchange pairs, each validated against the standard
/// quantization table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientPairSet {
    pairs: Vec<CoefficientPair>,
}

impl CoefficientPairSet {
    pub fn pairs(&self) -> &[CoefficientPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// The five mid-band pairs whose two positions share a quantization factor
/// (14, 16, 22, 24 and 40 respectively).
pub fn standard_pair_set() -> CoefficientPairSet {
    let table = QuantTable::standard();
    for pair in &STANDARD_PAIRS {
        debug_assert_eq!(table.at(pair.first), pair.quant_factor);
        debug_assert_eq!(table.at(pair.second), pair.quant_factor);
        debug_assert!(pair.first.is_mid_band() && pair.second.is_mid_band());
    }
    CoefficientPairSet {
        pairs: STANDARD_PAIRS.to_vec(),
    }
}

/// Which embedding algorithm to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Quantization-guided pair choice plus gap widening by the strength
    /// factor.
    Mmbec,
    /// Baseline: fixed pair (4,1)/(2,3), no gap widening.
    Mbec,
}

impl Algorithm {
    pub fn tag(&self) -> &'static str {
        match self {
            Algorithm::Mmbec => "mmbec",
            Algorithm::Mbec => "mbec",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mmbec" => Ok(Algorithm::Mmbec),
            "mbec" => Ok(Algorithm::Mbec),
            other => Err(Error::InvalidParams(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// How a block's bit is spread over the five exchange pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStrategy {
    /// Use only pair `k` (1-based index into the standard set).
    Single(usize),
    /// Write the bit into all five pairs; extraction takes the majority.
    AllPairsMajority,
}

impl PairStrategy {
    pub fn describe(&self) -> String {
        match self {
            PairStrategy::Single(k) => format!("single-pair-{k}"),
            PairStrategy::AllPairsMajority => "all-pairs-majority".to_string(),
        }
    }
}

impl std::str::FromStr for PairStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "all" | "all-pairs-majority" => Ok(PairStrategy::AllPairsMajority),
            k => k
                .parse::<usize>()
                .ok()
                .filter(|k| (1..=5).contains(k))
                .map(PairStrategy::Single)
                .ok_or_else(|| {
                    Error::InvalidParams(format!("pair strategy must be `all` or 1..=5, got `{s}`"))
                }),
        }
    }
}

/// Embedding/extraction parameters. The defaults (mmbec, B = 40, all pairs)
/// are the ones the robustness targets are stated for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbedParams {
    pub algorithm: Algorithm,
    pub strength_b: f64,
    pub pair_strategy: PairStrategy,
}

impl Default for EmbedParams {
    fn default() -> Self {
        EmbedParams {
            algorithm: Algorithm::Mmbec,
            strength_b: crate::defaults::STRENGTH_B,
            pair_strategy: PairStrategy::AllPairsMajority,
        }
    }
}

impl EmbedParams {
    pub fn validate(&self) -> Result<()> {
        if !self.strength_b.is_finite() || self.strength_b < 0.0 {
            return Err(Error::InvalidParams(format!(
                "strength factor must be finite and >= 0, got {}",
                self.strength_b
            )));
        }
        if let PairStrategy::Single(k) = self.pair_strategy {
            if !(1..=5).contains(&k) {
                return Err(Error::InvalidParams(format!(
                    "single-pair index must be in 1..=5, got {k}"
                )));
            }
        }
        Ok(())
    }

    /// Pairs and strength actually applied per block. The baseline pins the
    /// first pair and ignores the strength factor.
    fn effective(&self) -> (&'static [CoefficientPair], f64) {
        match self.algorithm {
            Algorithm::Mbec => (&STANDARD_PAIRS[..1], 0.0),
            Algorithm::Mmbec => match self.pair_strategy {
                PairStrategy::Single(k) => (&STANDARD_PAIRS[k - 1..k], self.strength_b),
                PairStrategy::AllPairsMajority => (&STANDARD_PAIRS[..], self.strength_b),
            },
        }
    }
}

/// Flattened binary watermark with its originating 2-D shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkBits {
    bits: Vec<u8>,
    rows: u32,
    cols: u32,
}

impl WatermarkBits {
    pub fn new(bits: Vec<u8>, rows: u32, cols: u32) -> Result<Self> {
        if bits.len() as u64 != rows as u64 * cols as u64 {
            return Err(Error::InvalidParams(format!(
                "{} bits do not fill a {rows}x{cols} watermark",
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().find(|b| **b > 1) {
            return Err(Error::InvalidParams(format!(
                "watermark element {bad} is not a bit"
            )));
        }
        Ok(WatermarkBits { bits, rows, cols })
    }

    /// A 1 x n sequence.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        let cols = bits.len() as u32;
        WatermarkBits::new(bits, 1, cols)
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn rows(&self) -> u32 {
        self.rows
    }

    pub fn cols(&self) -> u32 {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn reshape(&self, rows: u32, cols: u32) -> Result<Self> {
        WatermarkBits::new(self.bits.clone(), rows, cols)
    }

    /// Thresholds a grayscale image into a logo-style mark: samples below
    /// 128 (ink) become 1, lighter samples become 0.
    pub fn from_image_threshold(img: &GrayImage) -> Self {
        let bits = img.data().iter().map(|&p| u8::from(p < 128)).collect();
        WatermarkBits {
            bits,
            rows: img.height(),
            cols: img.width(),
        }
    }

    /// Renders the bits back into a black/white image (1 -> 0, 0 -> 255),
    /// matching the thresholding convention above.
    pub fn to_image(&self) -> Result<GrayImage> {
        let data = self.bits.iter().map(|&b| if b == 1 { 0 } else { 255 }).collect();
        GrayImage::new(self.cols, self.rows, data)
    }
}

/// Magic-free watermark bit file: rows and cols as 32-bit big-endian,
/// then the bits packed MSB-first.
pub fn write_watermark_file(wm: &WatermarkBits, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(8 + wm.len().div_ceil(8));
    out.extend_from_slice(&wm.rows.to_be_bytes());
    out.extend_from_slice(&wm.cols.to_be_bytes());
    let mut acc = 0u8;
    for (i, &bit) in wm.bits.iter().enumerate() {
        acc = (acc << 1) | bit;
        if i % 8 == 7 {
            out.push(acc);
            acc = 0;
        }
    }
    let rem = wm.len() % 8;
    if rem != 0 {
        out.push(acc << (8 - rem));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a watermark from either the packed bit format or a binary PGM
/// image (thresholded at 128).
pub fn read_watermark_file(path: impl AsRef<Path>) -> Result<WatermarkBits> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") || bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        let img = crate::imaging::load_image(path)?;
        return Ok(WatermarkBits::from_image_threshold(&img));
    }
    if bytes.len() < 8 {
        return Err(Error::corrupt(path, "watermark header needs 8 bytes"));
    }
    let rows = u32::from_be_bytes(bytes[0..4].try_into().unwrap());
    let cols = u32::from_be_bytes(bytes[4..8].try_into().unwrap());
    let nbits = rows as u64 * cols as u64;
    let need = 8 + nbits.div_ceil(8);
    if (bytes.len() as u64) < need {
        return Err(Error::corrupt(
            path,
            format!("{} bytes cannot hold {nbits} bits", bytes.len()),
        ));
    }
    let mut bits = Vec::with_capacity(nbits as usize);
    for i in 0..nbits as usize {
        let byte = bytes[8 + i / 8];
        bits.push((byte >> (7 - i % 8)) & 1);
    }
    WatermarkBits::new(bits, rows, cols)
}

/// Number of independently addressable bits: one per 8x8 block under every
/// strategy.
pub fn capacity(img: &GrayImage, _params: &EmbedParams) -> usize {
    (img.width() as usize / BLOCK_SIZE) * (img.height() as usize / BLOCK_SIZE)
}

/// Encodes one bit into a coefficient-domain block, touching only the
/// pair's two positions. After the call the extraction predicate holds
/// (bit 0 => C1 >= C2, bit 1 => C1 < C2) and, when `strength_b > 0`, the
/// coefficients sit at least `strength_b` apart.
pub fn embed_bit(block: &Block8, bit: u8, pair: &CoefficientPair, strength_b: f64) -> Block8 {
    let mut out = *block;
    embed_bit_in_place(&mut out, bit, pair, strength_b);
    out
}

fn embed_bit_in_place(block: &mut Block8, bit: u8, pair: &CoefficientPair, strength_b: f64) {
    let (r1, c1) = pair.first.indices();
    let (r2, c2) = pair.second.indices();
    let mut first = block.values[r1][c1];
    let mut second = block.values[r2][c2];

    // Swap when the current ordering disagrees with the target relation.
    let want_first_ge = bit == 0;
    let ordering_wrong = if want_first_ge {
        first < second
    } else {
        first >= second
    };
    if ordering_wrong {
        std::mem::swap(&mut first, &mut second);
    }

    // Widen the gap to the strength factor, in the target direction so
    // that exact ties also end up correctly ordered.
    if (first - second).abs() < strength_b {
        let half = strength_b / 2.0;
        if want_first_ge {
            first += half;
            second -= half;
        } else {
            first -= half;
            second += half;
        }
    }

    block.values[r1][c1] = first;
    block.values[r2][c2] = second;
}

/// Blind single-pair read: `C1 >= C2` is 0, otherwise 1.
pub fn extract_bit(block: &Block8, pair: &CoefficientPair) -> u8 {
    let (r1, c1) = pair.first.indices();
    let (r2, c2) = pair.second.indices();
    u8::from(block.values[r1][c1] < block.values[r2][c2])
}

fn block_bit(coeffs: &Block8, pairs: &[CoefficientPair]) -> u8 {
    if pairs.len() == 1 {
        return extract_bit(coeffs, &pairs[0]);
    }
    let ones: usize = pairs.iter().map(|p| extract_bit(coeffs, p) as usize).sum();
    u8::from(2 * ones > pairs.len())
}

/// Embeds the watermark: blocks are processed row-major, block `i` carries
/// bit `i mod wm.len()` (cyclic repetition fills spare blocks). Every block
/// passes through the DCT round trip even when no bits are embedded.
pub fn embed(img: &GrayImage, wm: &WatermarkBits, params: &EmbedParams) -> Result<GrayImage> {
    params.validate()?;
    let cap = capacity(img, params);
    if wm.len() > cap {
        return Err(Error::CapacityExceeded {
            needed: wm.len(),
            capacity: cap,
        });
    }
    let mut grid = to_blocks(img)?;
    let (pairs, strength) = params.effective();
    let bits = wm.bits();
    par::for_each_mut(grid.blocks_mut(), |i, block| {
        let mut coeffs = dct2(block);
        if !bits.is_empty() {
            let bit = bits[i % bits.len()];
            for pair in pairs {
                embed_bit_in_place(&mut coeffs, bit, pair, strength);
            }
        }
        *block = idct2(&coeffs);
    });
    Ok(from_blocks(&grid))
}

/// Blind extraction of `nbits` bits laid out as in [`embed`]. Per block the
/// strategy's pair votes decide the block bit; per watermark bit the block
/// copies vote again, ties reading as 0.
pub fn extract(img: &GrayImage, nbits: usize, params: &EmbedParams) -> Result<WatermarkBits> {
    params.validate()?;
    let cap = capacity(img, params);
    if nbits > cap {
        return Err(Error::CapacityExceeded {
            needed: nbits,
            capacity: cap,
        });
    }
    if nbits == 0 {
        return WatermarkBits::from_bits(Vec::new());
    }
    let grid = to_blocks(img)?;
    let (pairs, _) = params.effective();
    let block_bits = par::map(grid.blocks(), |block| block_bit(&dct2(block), pairs));

    let mut ones = vec![0usize; nbits];
    let mut copies = vec![0usize; nbits];
    for (i, &bit) in block_bits.iter().enumerate() {
        ones[i % nbits] += bit as usize;
        copies[i % nbits] += 1;
    }
    let bits = ones
        .iter()
        .zip(&copies)
        .map(|(&o, &n)| u8::from(2 * o > n))
        .collect();
    WatermarkBits::from_bits(bits)
}

/// Baseline embedding: fixed pair, no gap widening.
pub fn embed_mbec(img: &GrayImage, wm: &WatermarkBits) -> Result<GrayImage> {
    embed(img, wm, &mbec_params())
}

/// Baseline extraction matching [`embed_mbec`].
pub fn extract_mbec(img: &GrayImage, nbits: usize) -> Result<WatermarkBits> {
    extract(img, nbits, &mbec_params())
}

fn mbec_params() -> EmbedParams {
    EmbedParams {
        algorithm: Algorithm::Mbec,
        strength_b: 0.0,
        pair_strategy: PairStrategy::Single(1),
    }
}
