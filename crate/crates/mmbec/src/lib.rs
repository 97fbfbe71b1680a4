//! Blind invisible image watermarking over 8x8 DCT blocks, plus the
//! authorship-protection protocol built on it.
//!
//! The crate has four layers:
//!
//! * [`imaging`] — grayscale images, PGM/PNG I/O, block partitioning and
//!   the orthonormal 2-D DCT.
//! * [`watermark`] — bit embedding/extraction by ordering mid-band
//!   coefficient pairs (`mmbec` and the `mbec` baseline).
//! * [`protocol`] — keyword/image digests XOR-combined into a payload,
//!   blind verification and dispute resolution.
//! * [`attack`] — in-process JPEG compression attack, the similarity-ratio
//!   metric and the SR-vs-QF benchmark sweep.
//!
//! Everything is deterministic: the same inputs give bit-identical outputs
//! with or without the `parallel` feature.

pub mod attack;
pub mod error;
pub mod imaging;
mod par;
pub mod protocol;
pub mod watermark;

pub use error::{Error, Result};

/// Library-wide defaults. The CLI and the robustness targets both read
/// from here.
pub mod defaults {
    use crate::attack::QualityFactor;

    /// Gap enforced between exchange coefficients.
    pub const STRENGTH_B: f64 = 40.0;
    /// Verification acceptance threshold on the similarity ratio.
    pub const THRESHOLD: f64 = 0.9;
    /// Quality factors of the standard benchmark sweep.
    pub const QF_SWEEP: [u8; 12] = [5, 15, 25, 30, 35, 40, 50, 75, 85, 90, 95, 100];
    /// Strength factors tried by calibration, ascending.
    pub const CALIBRATION_STRENGTHS: [f64; 10] =
        [10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0];

    pub fn qf_sweep() -> Vec<QualityFactor> {
        QF_SWEEP
            .iter()
            .map(|&qf| QualityFactor::new(qf as u32).expect("sweep entries are valid"))
            .collect()
    }
}
