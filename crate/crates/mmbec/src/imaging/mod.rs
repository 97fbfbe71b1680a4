//! Image representation, canonical file I/O, 8x8 block partitioning and the
//! forward/inverse 2-D DCT.

mod dct;
mod io;

pub use dct::{dct2, idct2};
pub use io::{load_image, save_image};

use crate::error::{Error, Result};

pub const BLOCK_SIZE: usize = 8;

/// 8-bit grayscale raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    /// Builds an image from row-major samples. `data.len()` must equal
    /// `width * height`.
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        let expected = (width as u64)
            .checked_mul(height as u64)
            .filter(|n| *n <= usize::MAX as u64)
            .ok_or(Error::DimensionOverflow {
                width: width as u64,
                height: height as u64,
            })?;
        if data.len() as u64 != expected {
            return Err(Error::InvalidParams(format!(
                "pixel buffer holds {} samples, dimensions require {}",
                data.len(),
                expected
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    /// True when both dimensions are multiples of the block size.
    pub fn is_block_aligned(&self) -> bool {
        self.width % BLOCK_SIZE as u32 == 0 && self.height % BLOCK_SIZE as u32 == 0
    }
}

/// 8x8 grid of real values: pixel samples before a transform, DCT
/// coefficients after one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block8 {
    pub values: [[f64; BLOCK_SIZE]; BLOCK_SIZE],
}

impl Block8 {
    pub fn zero() -> Self {
        Block8 {
            values: [[0.0; BLOCK_SIZE]; BLOCK_SIZE],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: f64) {
        self.values[row][col] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_finite())
    }
}

/// Row-major grid of 8x8 blocks covering a block-aligned image.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    blocks_x: u32,
    blocks_y: u32,
    blocks: Vec<Block8>,
}

impl BlockGrid {
    pub fn blocks_x(&self) -> u32 {
        self.blocks_x
    }

    pub fn blocks_y(&self) -> u32 {
        self.blocks_y
    }

    pub fn blocks(&self) -> &[Block8] {
        &self.blocks
    }

    pub fn blocks_mut(&mut self) -> &mut [Block8] {
        &mut self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Splits a block-aligned image into its 8x8 pixel blocks, row-major.
pub fn to_blocks(img: &GrayImage) -> Result<BlockGrid> {
    if !img.is_block_aligned() {
        return Err(Error::MisalignedImage {
            width: img.width,
            height: img.height,
        });
    }
    let blocks_x = img.width / BLOCK_SIZE as u32;
    let blocks_y = img.height / BLOCK_SIZE as u32;
    let mut blocks = Vec::with_capacity((blocks_x * blocks_y) as usize);
    for by in 0..blocks_y {
        for bx in 0..blocks_x {
            let mut block = Block8::zero();
            for r in 0..BLOCK_SIZE {
                let y = by as usize * BLOCK_SIZE + r;
                let row_start = y * img.width as usize + bx as usize * BLOCK_SIZE;
                for c in 0..BLOCK_SIZE {
                    block.values[r][c] = img.data[row_start + c] as f64;
                }
            }
            blocks.push(block);
        }
    }
    Ok(BlockGrid {
        blocks_x,
        blocks_y,
        blocks,
    })
}

/// Reassembles an image from pixel-domain blocks. Values are rounded
/// half-away-from-zero and clamped to [0, 255].
pub fn from_blocks(grid: &BlockGrid) -> GrayImage {
    let width = grid.blocks_x * BLOCK_SIZE as u32;
    let height = grid.blocks_y * BLOCK_SIZE as u32;
    let mut data = vec![0u8; (width * height) as usize];
    for by in 0..grid.blocks_y {
        for bx in 0..grid.blocks_x {
            let block = &grid.blocks[(by * grid.blocks_x + bx) as usize];
            for r in 0..BLOCK_SIZE {
                let y = by as usize * BLOCK_SIZE + r;
                let row_start = y * width as usize + bx as usize * BLOCK_SIZE;
                for c in 0..BLOCK_SIZE {
                    data[row_start + c] = quantize_sample(block.values[r][c]);
                }
            }
        }
    }
    GrayImage {
        width,
        height,
        data,
    }
}

/// f64::round is round-half-away-from-zero, which keeps reconstruction
/// deterministic across platforms.
fn quantize_sample(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Image padded to block alignment by edge replication, together with the
/// dimensions it had before padding.
#[derive(Debug, Clone)]
pub struct PaddedImage {
    pub image: GrayImage,
    pub original_width: u32,
    pub original_height: u32,
}

/// Opt-in alternative to the strict alignment check of [`to_blocks`]:
/// replicates the last row/column out to the next multiple of 8.
pub fn pad_to_block_multiple(img: &GrayImage) -> PaddedImage {
    let round_up = |n: u32| n.div_ceil(BLOCK_SIZE as u32) * BLOCK_SIZE as u32;
    let width = round_up(img.width.max(1));
    let height = round_up(img.height.max(1));
    if width == img.width && height == img.height {
        return PaddedImage {
            image: img.clone(),
            original_width: img.width,
            original_height: img.height,
        };
    }
    let mut data = Vec::with_capacity((width * height) as usize);
    for y in 0..height {
        let sy = y.min(img.height - 1);
        for x in 0..width {
            let sx = x.min(img.width - 1);
            data.push(img.pixel(sx, sy));
        }
    }
    PaddedImage {
        image: GrayImage {
            width,
            height,
            data,
        },
        original_width: img.width,
        original_height: img.height,
    }
}

impl PaddedImage {
    /// Crops the padded image back to the recorded original dimensions.
    pub fn crop_to_original(&self) -> GrayImage {
        let mut data = Vec::with_capacity((self.original_width * self.original_height) as usize);
        for y in 0..self.original_height {
            for x in 0..self.original_width {
                data.push(self.image.pixel(x, y));
            }
        }
        GrayImage {
            width: self.original_width,
            height: self.original_height,
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_image(width: u32, height: u32) -> GrayImage {
        let data = (0..width as usize * height as usize)
            .map(|i| (i * 7 % 256) as u8)
            .collect();
        GrayImage::new(width, height, data).unwrap()
    }

    #[test]
    fn to_blocks_counts() {
        let img = ramp_image(256, 256);
        let grid = to_blocks(&img).unwrap();
        assert_eq!(grid.blocks_x(), 32);
        assert_eq!(grid.blocks_y(), 32);
        assert_eq!(grid.len(), 1024);
    }

    #[test]
    fn single_block_is_identity_partition() {
        let img = ramp_image(8, 8);
        let grid = to_blocks(&img).unwrap();
        assert_eq!(grid.len(), 1);
        for r in 0..8 {
            for c in 0..8 {
                assert_eq!(grid.blocks()[0].values[r][c], img.pixel(c as u32, r as u32) as f64);
            }
        }
    }

    #[test]
    fn wide_image_blocks_are_row_major() {
        // 16x8: two blocks, left then right.
        let mut data = vec![0u8; 128];
        for y in 0..8 {
            for x in 8..16 {
                data[y * 16 + x] = 200;
            }
        }
        let img = GrayImage::new(16, 8, data).unwrap();
        let grid = to_blocks(&img).unwrap();
        assert_eq!((grid.blocks_x(), grid.blocks_y()), (2, 1));
        assert_eq!(grid.blocks()[0].values[0][0], 0.0);
        assert_eq!(grid.blocks()[1].values[0][0], 200.0);
    }

    #[test]
    fn partition_round_trips() {
        let img = ramp_image(64, 32);
        let grid = to_blocks(&img).unwrap();
        assert_eq!(from_blocks(&grid), img);
    }

    #[test]
    fn misaligned_image_is_rejected() {
        let img = ramp_image(12, 8);
        assert!(matches!(
            to_blocks(&img),
            Err(Error::MisalignedImage { width: 12, height: 8 })
        ));
    }

    #[test]
    fn reconstruction_rounds_and_clamps() {
        assert_eq!(quantize_sample(255.7), 255);
        assert_eq!(quantize_sample(-3.2), 0);
        assert_eq!(quantize_sample(127.5), 128);
        assert_eq!(quantize_sample(127.4), 127);
    }

    #[test]
    fn buffer_length_is_checked() {
        assert!(GrayImage::new(8, 8, vec![0; 63]).is_err());
        assert!(GrayImage::new(8, 8, vec![0; 64]).is_ok());
    }

    #[test]
    fn padding_replicates_edges_and_crops_back() {
        let img = ramp_image(10, 9);
        let padded = pad_to_block_multiple(&img);
        assert_eq!(padded.image.width(), 16);
        assert_eq!(padded.image.height(), 16);
        assert_eq!(padded.image.pixel(15, 3), img.pixel(9, 3));
        assert_eq!(padded.image.pixel(4, 15), img.pixel(4, 8));
        assert_eq!(padded.crop_to_original(), img);
    }
}
