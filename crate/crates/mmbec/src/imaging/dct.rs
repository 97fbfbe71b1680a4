//! Orthonormal type-II 2-D DCT over 8x8 blocks, separable row/column passes.

use std::f64::consts::PI;
use std::sync::LazyLock;

use super::{Block8, BLOCK_SIZE};

/// basis[k][n] = s_k * cos(pi * (2n + 1) * k / 16), s_0 = sqrt(1/8),
/// s_k = 1/2 otherwise. Rows are orthonormal, so the inverse transform is
/// multiplication by the transpose.
static BASIS: LazyLock<[[f64; BLOCK_SIZE]; BLOCK_SIZE]> = LazyLock::new(|| {
    let mut basis = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for (k, row) in basis.iter_mut().enumerate() {
        let scale = if k == 0 {
            (1.0 / BLOCK_SIZE as f64).sqrt()
        } else {
            (2.0 / BLOCK_SIZE as f64).sqrt()
        };
        for (n, v) in row.iter_mut().enumerate() {
            *v = scale * (PI * (2.0 * n as f64 + 1.0) * k as f64 / (2.0 * BLOCK_SIZE as f64)).cos();
        }
    }
    basis
});

/// Forward 2-D DCT of a pixel-domain block. A constant block of value `c`
/// transforms to a single DC coefficient of `8c`.
pub fn dct2(block: &Block8) -> Block8 {
    let basis = &*BASIS;
    // Columns first: tmp[u][c] = sum_r basis[u][r] * in[r][c].
    let mut tmp = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for u in 0..BLOCK_SIZE {
        for c in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for r in 0..BLOCK_SIZE {
                acc += basis[u][r] * block.values[r][c];
            }
            tmp[u][c] = acc;
        }
    }
    let mut out = Block8::zero();
    for u in 0..BLOCK_SIZE {
        for v in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for c in 0..BLOCK_SIZE {
                acc += basis[v][c] * tmp[u][c];
            }
            out.values[u][v] = acc;
        }
    }
    out
}

/// Inverse of [`dct2`]; recovers the pixel-domain block to ~1e-12.
pub fn idct2(block: &Block8) -> Block8 {
    let basis = &*BASIS;
    // tmp[r][v] = sum_u basis[u][r] * X[u][v].
    let mut tmp = [[0.0; BLOCK_SIZE]; BLOCK_SIZE];
    for r in 0..BLOCK_SIZE {
        for v in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for u in 0..BLOCK_SIZE {
                acc += basis[u][r] * block.values[u][v];
            }
            tmp[r][v] = acc;
        }
    }
    let mut out = Block8::zero();
    for r in 0..BLOCK_SIZE {
        for c in 0..BLOCK_SIZE {
            let mut acc = 0.0;
            for v in 0..BLOCK_SIZE {
                acc += basis[v][c] * tmp[r][v];
            }
            out.values[r][c] = acc;
        }
    }
    out
}
