//! Regenerates the committed test assets: a procedural 256x256 grayscale
//! scene (rippled water under a banded sky) used as the reproduction cover
//! image, and a 32x32 binary logo mark.
//!
//! The scene is synthetic so the repository stays free of third-party
//! photographs; any 256x256 grayscale image can be dropped in instead.
//! Run with `--check` to print the mid-band statistics and robustness
//! sweep the acceptance suite depends on.
//!
//!     cargo run -p mmbec --example gen_assets [-- --check]

use std::f64::consts::PI;
use std::path::PathBuf;

use mmbec::attack::{bench_sr_vs_qf, BenchConfig, QualityFactor};
use mmbec::imaging::{dct2, save_image, to_blocks, GrayImage};
use mmbec::watermark::{
    embed, extract, standard_pair_set, Algorithm, EmbedParams, WatermarkBits,
};

/// Deterministic white noise in [-1, 1] from pixel coordinates.
fn grain(x: u32, y: u32, salt: u64) -> f64 {
    let mut h = (x as u64) << 32 | y as u64;
    h ^= salt.wrapping_mul(0x9e3779b97f4a7c15);
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51afd7ed558ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ceb9fe1a85ec53);
    h ^= h >> 33;
    (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

/// The reproduction scene. Horizontal ripples carry strong energy at the
/// vertical frequency of coefficient (4, 1), so every block keeps a clear
/// natural gap between the exchange coefficients: faint in the sky, strong
/// on the water.
pub fn reproduction_image() -> GrayImage {
    const SIZE: u32 = 256;
    let mut data = Vec::with_capacity((SIZE * SIZE) as usize);
    for y in 0..SIZE {
        for x in 0..SIZE {
            let fx = x as f64;
            let fy = y as f64;
            let horizon = 100.0 + 6.0 * (2.0 * PI * fx / 256.0).sin();
            // Ripple phase-locked to the 8-row block lattice.
            let ripple = (PI * 3.0 * (2.0 * fy + 1.0) / 16.0).cos();

            let v = if fy < horizon {
                let depth = fy / horizon;
                let base = 208.0 - 66.0 * depth;
                let band_amp = 3.0 + 0.8 * (2.0 * PI * fx / 256.0 + 0.9).sin();
                base + band_amp * ripple + 1.5 * grain(x, y, 1)
            } else {
                let depth = (fy - horizon) / (256.0 - horizon);
                let base = 128.0 - 38.0 * depth
                    + 16.0 * (2.0 * PI * fx / 77.0 + fy / 19.0).sin()
                    + 9.0 * (2.0 * PI * fx / 41.0).cos() * (2.0 * PI * fy / 67.0).sin();
                let wave_amp = 16.0
                    + 7.0 * (2.0 * PI * fx / 131.0 + 0.7).sin() * (2.0 * PI * fy / 173.0).cos();
                base + wave_amp * ripple + 5.0 * grain(x, y, 2)
            };
            data.push(v.round().clamp(8.0, 247.0) as u8);
        }
    }
    GrayImage::new(SIZE, SIZE, data).expect("generator fills the buffer")
}

/// 32x32 ring-and-ticks logo; ink pixels are dark (value 0).
pub fn logo_image() -> GrayImage {
    const SIZE: i32 = 32;
    let mut data = Vec::with_capacity((SIZE * SIZE) as usize);
    for y in 0..SIZE {
        for x in 0..SIZE {
            let dx = x as f64 - 15.5;
            let dy = y as f64 - 15.5;
            let r = (dx * dx + dy * dy).sqrt();
            let ring = (9.0..=12.5).contains(&r);
            let core = r <= 3.5;
            let tick = (x - 15).abs() <= 1 && (y < 5 || y >= 27)
                || (y - 15).abs() <= 1 && (x < 5 || x >= 27);
            let ink = ring || core || tick;
            data.push(if ink { 0 } else { 255 });
        }
    }
    GrayImage::new(SIZE as u32, SIZE as u32, data).expect("generator fills the buffer")
}

fn assets_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets")
}

fn main() {
    let check = std::env::args().any(|a| a == "--check");
    let dir = assets_dir();
    std::fs::create_dir_all(&dir).expect("create assets dir");

    let cover = reproduction_image();
    let logo = logo_image();
    save_image(&cover, dir.join("scene-256.pgm")).expect("write cover");
    save_image(&logo, dir.join("logo-32.pgm")).expect("write logo");
    println!("wrote {}", dir.join("scene-256.pgm").display());
    println!("wrote {}", dir.join("logo-32.pgm").display());

    if check {
        report(&cover, &logo);
    }
}

/// Prints the statistics the asset was tuned against.
fn report(cover: &GrayImage, logo: &GrayImage) {
    let grid = to_blocks(cover).unwrap();
    let pair = standard_pair_set().pairs()[0];
    let mut gaps: Vec<f64> = grid
        .blocks()
        .iter()
        .map(|b| {
            let c = dct2(b);
            (c.get(pair.first.row as usize - 1, pair.first.col as usize - 1)
                - c.get(pair.second.row as usize - 1, pair.second.col as usize - 1))
            .abs()
        })
        .collect();
    gaps.sort_by(f64::total_cmp);
    println!(
        "pair-1 gap: min {:.1}  p05 {:.1}  median {:.1}  max {:.1}",
        gaps[0],
        gaps[gaps.len() / 20],
        gaps[gaps.len() / 2],
        gaps[gaps.len() - 1]
    );
    let below = |t: f64| gaps.iter().filter(|g| **g < t).count();
    println!(
        "blocks with gap < 7: {}   < 28: {}   < 56: {}",
        below(7.0),
        below(28.0),
        below(56.0)
    );

    let wm = WatermarkBits::from_image_threshold(logo);
    let mmbec = EmbedParams::default();
    let mbec = EmbedParams {
        algorithm: Algorithm::Mbec,
        ..EmbedParams::default()
    };

    for (tag, params) in [("mmbec", &mmbec), ("mbec", &mbec)] {
        let marked = embed(cover, &wm, params).unwrap();
        let recovered = extract(&marked, wm.len(), params).unwrap();
        let errors = recovered
            .bits()
            .iter()
            .zip(wm.bits())
            .filter(|(a, b)| a != b)
            .count();
        println!("{tag}: no-attack bit errors {errors}/{}", wm.len());
    }

    let configs = [
        BenchConfig::new("mmbec", mmbec),
        BenchConfig::new("mbec", mbec),
    ];
    let qfs: Vec<QualityFactor> = mmbec::defaults::qf_sweep();
    let rows = bench_sr_vs_qf(cover, &wm, &configs, &qfs).unwrap();
    print!("{}", mmbec::attack::rows_to_csv(&rows));
}
