//! JPEG-style compression attack, the similarity-ratio metric and the
//! SR-vs-QF benchmark sweep.
//!
//! The attack reproduces the lossy stage of baseline JPEG in-process
//! (quantize/dequantize of DCT coefficients under quality scaling); the
//! entropy stage is lossless and cannot affect extraction, so it is
//! omitted for bit-exact reproducibility.

use crate::error::{Error, Result};
use crate::imaging::{dct2, from_blocks, idct2, to_blocks, Block8, GrayImage, BLOCK_SIZE};
use crate::par;
use crate::watermark::{capacity, embed, extract, EmbedParams, QuantTable, WatermarkBits};

/// JPEG quality factor, 1..=100. Lower means stronger compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct QualityFactor(u8);

impl QualityFactor {
    pub fn new(qf: u32) -> Result<Self> {
        if (1..=100).contains(&qf) {
            Ok(QualityFactor(qf as u8))
        } else {
            Err(Error::QualityOutOfRange { qf })
        }
    }

    pub fn get(&self) -> u8 {
        self.0
    }
}

/// Scales the base table with the usual quality law: factor 5000/qf below
/// 50, 200 - 2*qf at or above, entries floor((q*scale + 50)/100) clamped
/// to [1, 255].
pub fn scale_quant_table(base: &QuantTable, qf: QualityFactor) -> QuantTable {
    let qf = qf.get() as u32;
    let scale = if qf < 50 { 5000 / qf } else { 200 - 2 * qf };
    let mut values = [[0u16; 8]; 8];
    for (r, row) in base.values().iter().enumerate() {
        for (c, &q) in row.iter().enumerate() {
            values[r][c] = ((q as u32 * scale + 50) / 100).clamp(1, 255) as u16;
        }
    }
    QuantTable::from_values(values)
}

/// Quantizes then dequantizes a coefficient block against the table:
/// each entry becomes round(c / q) * q.
pub fn quantize_coefficients(block: &Block8, table: &QuantTable) -> Block8 {
    let mut out = Block8::zero();
    for r in 0..BLOCK_SIZE {
        for c in 0..BLOCK_SIZE {
            let q = table.values()[r][c] as f64;
            out.values[r][c] = (block.values[r][c] / q).round() * q;
        }
    }
    out
}

/// Runs the compression attack at the given quality over every block:
/// DCT, quantize/dequantize, inverse DCT, then pixel rounding.
pub fn jpeg_attack(img: &GrayImage, qf: QualityFactor) -> Result<GrayImage> {
    let table = scale_quant_table(&QuantTable::standard(), qf);
    let mut grid = to_blocks(img)?;
    par::for_each_mut(grid.blocks_mut(), |_, block| {
        let coeffs = dct2(block);
        let quantized = quantize_coefficients(&coeffs, &table);
        *block = idct2(&quantized);
    });
    Ok(from_blocks(&grid))
}

/// Matching/differing bit counts and their ratio SR = S / (S + D).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimilarityResult {
    pub matching: usize,
    pub differing: usize,
}

impl SimilarityResult {
    pub fn sr(&self) -> f64 {
        let total = self.matching + self.differing;
        if total == 0 {
            1.0
        } else {
            self.matching as f64 / total as f64
        }
    }
}

/// Bit-level similarity of two equal-length sequences.
pub fn bit_similarity(a: &[u8], b: &[u8]) -> Result<SimilarityResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let matching = a.iter().zip(b).filter(|(x, y)| x == y).count();
    Ok(SimilarityResult {
        matching,
        differing: a.len() - matching,
    })
}

/// Similarity ratio between two watermarks of equal length.
pub fn similarity_ratio(a: &WatermarkBits, b: &WatermarkBits) -> Result<SimilarityResult> {
    bit_similarity(a.bits(), b.bits())
}

/// One algorithm configuration in the benchmark sweep.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub tag: String,
    pub params: EmbedParams,
}

impl BenchConfig {
    pub fn new(tag: impl Into<String>, params: EmbedParams) -> Self {
        BenchConfig {
            tag: tag.into(),
            params,
        }
    }
}

/// SR of every configured algorithm at one quality factor.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub qf: QualityFactor,
    pub sr_by_algorithm: Vec<(String, f64)>,
}

/// Embed, attack at each quality, extract and score against the original
/// mark. Rows come back ordered by quality ascending; cells are
/// independent, so the sweep parallelizes without affecting results.
pub fn bench_sr_vs_qf(
    img: &GrayImage,
    wm: &WatermarkBits,
    configs: &[BenchConfig],
    qfs: &[QualityFactor],
) -> Result<Vec<BenchRow>> {
    for config in configs {
        config.params.validate()?;
        let cap = capacity(img, &config.params);
        if wm.len() > cap {
            return Err(Error::CapacityExceeded {
                needed: wm.len(),
                capacity: cap,
            });
        }
    }
    let mut sorted_qfs = qfs.to_vec();
    sorted_qfs.sort();
    sorted_qfs.dedup();

    // Embedding does not depend on qf, so do it once per configuration.
    let marked: Vec<GrayImage> = configs
        .iter()
        .map(|config| embed(img, wm, &config.params))
        .collect::<Result<_>>()?;

    let cells: Vec<(usize, QualityFactor)> = (0..configs.len())
        .flat_map(|ci| sorted_qfs.iter().map(move |&qf| (ci, qf)))
        .collect();
    let scores: Vec<Result<f64>> = par::map(&cells, |&(ci, qf)| {
        let attacked = jpeg_attack(&marked[ci], qf)?;
        let recovered = extract(&attacked, wm.len(), &configs[ci].params)?;
        Ok(similarity_ratio(&recovered, wm)?.sr())
    });

    let mut rows = Vec::with_capacity(sorted_qfs.len());
    for (qi, &qf) in sorted_qfs.iter().enumerate() {
        let mut sr_by_algorithm = Vec::with_capacity(configs.len());
        for (ci, config) in configs.iter().enumerate() {
            let sr = match &scores[ci * sorted_qfs.len() + qi] {
                Ok(sr) => *sr,
                Err(e) => {
                    return Err(Error::InvalidParams(format!(
                        "bench cell {}@qf{} failed: {e}",
                        config.tag,
                        qf.get()
                    )))
                }
            };
            sr_by_algorithm.push((config.tag.clone(), sr));
        }
        rows.push(BenchRow {
            qf,
            sr_by_algorithm,
        });
    }
    Ok(rows)
}

/// CSV rendering, `qf,<tags...>` header and SR at four decimal places.
pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("qf");
    if let Some(first) = rows.first() {
        for (tag, _) in &first.sr_by_algorithm {
            out.push(',');
            out.push_str(tag);
        }
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.qf.get().to_string());
        for (_, sr) in &row.sr_by_algorithm {
            out.push_str(&format!(",{sr:.4}"));
        }
        out.push('\n');
    }
    out
}

/// Gnuplot-friendly rendering: commented header, whitespace-separated
/// columns.
pub fn rows_to_gnuplot(rows: &[BenchRow]) -> String {
    let mut out = String::from("# qf");
    if let Some(first) = rows.first() {
        for (tag, _) in &first.sr_by_algorithm {
            out.push(' ');
            out.push_str(tag);
        }
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.qf.get().to_string());
        for (_, sr) in &row.sr_by_algorithm {
            out.push_str(&format!(" {sr:.4}"));
        }
        out.push('\n');
    }
    out
}

/// Sweeps candidate strength factors and returns the smallest one whose
/// post-attack SR reaches `target_sr` at the given quality, with the SR it
/// achieved. `None` when no candidate reaches the target.
pub fn calibrate_strength(
    img: &GrayImage,
    wm: &WatermarkBits,
    qf: QualityFactor,
    target_sr: f64,
    params: &EmbedParams,
    candidates: &[f64],
) -> Result<Option<(f64, f64)>> {
    let scores: Vec<Result<f64>> = par::map(candidates, |&b| {
        let trial = EmbedParams {
            strength_b: b,
            ..*params
        };
        trial.validate()?;
        let marked = embed(img, wm, &trial)?;
        let attacked = jpeg_attack(&marked, qf)?;
        let recovered = extract(&attacked, wm.len(), &trial)?;
        Ok(similarity_ratio(&recovered, wm)?.sr())
    });
    for (b, score) in candidates.iter().zip(scores) {
        let sr = score?;
        if sr >= target_sr {
            return Ok(Some((*b, sr)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::watermark::QuantTable;

    fn qf(v: u32) -> QualityFactor {
        QualityFactor::new(v).unwrap()
    }

    #[test]
    fn quality_factor_range_is_enforced() {
        assert!(QualityFactor::new(0).is_err());
        assert!(QualityFactor::new(101).is_err());
        assert!(QualityFactor::new(1).is_ok());
        assert!(QualityFactor::new(100).is_ok());
    }

    #[test]
    fn scaling_at_fifty_is_identity() {
        let base = QuantTable::standard();
        assert_eq!(scale_quant_table(&base, qf(50)), base);
    }

    #[test]
    fn scaling_at_hundred_floors_to_one() {
        let scaled = scale_quant_table(&QuantTable::standard(), qf(100));
        assert!(scaled.values().iter().flatten().all(|&q| q == 1));
    }

    #[test]
    fn scaling_at_twenty_five_doubles() {
        let scaled = scale_quant_table(&QuantTable::standard(), qf(25));
        // (14 * 200 + 50) / 100 = 28 at position (4, 1).
        assert_eq!(scaled.values()[3][0], 28);
        assert_eq!(scaled.values()[0][0], 32);
    }

    fn test_image(width: u32, height: u32, seed: u64) -> GrayImage {
        let mut state = seed | 1;
        let data = (0..width as usize * height as usize)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 24) as u8
            })
            .collect();
        GrayImage::new(width, height, data).unwrap()
    }

    #[test]
    fn attack_at_hundred_is_near_identity() {
        let img = test_image(64, 64, 3);
        let attacked = jpeg_attack(&img, qf(100)).unwrap();
        for (a, b) in attacked.data().iter().zip(img.data()) {
            assert!(a.abs_diff(*b) <= 1);
        }
    }

    #[test]
    fn attack_is_deterministic() {
        let img = test_image(64, 64, 5);
        let a = jpeg_attack(&img, qf(35)).unwrap();
        let b = jpeg_attack(&img, qf(35)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn constant_image_shifts_by_at_most_the_dc_step() {
        for quality in [5u32, 25, 50, 75, 100] {
            let c = 77u8;
            let img = GrayImage::new(32, 32, vec![c; 1024]).unwrap();
            let table = scale_quant_table(&QuantTable::standard(), qf(quality));
            let dc_step = table.values()[0][0] as f64;

            // Exact prediction: DC = 8c quantizes alone, every pixel becomes
            // round(quantized_dc / 8).
            let quantized_dc = (8.0 * c as f64 / dc_step).round() * dc_step;
            let expected = (quantized_dc / 8.0).round().clamp(0.0, 255.0) as u8;

            let attacked = jpeg_attack(&img, qf(quality)).unwrap();
            assert!(attacked.data().iter().all(|&p| p == expected), "qf {quality}");
            assert!(
                (expected as f64 - c as f64).abs() <= dc_step / 16.0 + 0.5,
                "qf {quality}"
            );
        }
    }

    #[test]
    fn similarity_handles_the_edge_cases() {
        let a = WatermarkBits::from_bits(vec![1, 0, 1, 1]).unwrap();
        let b = WatermarkBits::from_bits(vec![0, 1, 0, 0]).unwrap();
        assert_eq!(similarity_ratio(&a, &a).unwrap().sr(), 1.0);
        assert_eq!(similarity_ratio(&a, &b).unwrap().sr(), 0.0);

        let mut bits = vec![0u8; 1024];
        for bit in bits.iter_mut().take(750) {
            *bit = 1;
        }
        let ones = WatermarkBits::from_bits(vec![1; 1024]).unwrap();
        let mixed = WatermarkBits::from_bits(bits).unwrap();
        let result = similarity_ratio(&mixed, &ones).unwrap();
        assert_eq!(result.matching, 750);
        assert_eq!(result.differing, 274);
        assert_eq!(format!("{:.4}", result.sr()), "0.7324");
    }

    #[test]
    fn similarity_is_symmetric_and_checks_length() {
        let a = WatermarkBits::from_bits(vec![1, 0, 1]).unwrap();
        let b = WatermarkBits::from_bits(vec![1, 1, 0]).unwrap();
        assert_eq!(
            similarity_ratio(&a, &b).unwrap(),
            similarity_ratio(&b, &a).unwrap()
        );
        let short = WatermarkBits::from_bits(vec![1]).unwrap();
        assert!(matches!(
            similarity_ratio(&a, &short),
            Err(Error::LengthMismatch { left: 3, right: 1 })
        ));
    }

    #[test]
    fn bench_rows_are_sorted_and_full_quality_is_lossless() {
        let img = test_image(64, 64, 11);
        let mut state = 17u64;
        let bits = (0..64)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 32) as u8 & 1
            })
            .collect();
        let wm = WatermarkBits::from_bits(bits).unwrap();
        let configs = [
            BenchConfig::new("mmbec", EmbedParams::default()),
            BenchConfig::new(
                "mbec",
                EmbedParams {
                    algorithm: crate::watermark::Algorithm::Mbec,
                    ..EmbedParams::default()
                },
            ),
        ];
        let rows = bench_sr_vs_qf(&img, &wm, &configs, &[qf(100), qf(75)]).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].qf, qf(75));
        assert_eq!(rows[1].qf, qf(100));
        // Quantizer step 1 preserves every enforced ordering.
        assert_eq!(rows[1].sr_by_algorithm[0].1, 1.0);
    }

    #[test]
    fn csv_format_matches_the_contract() {
        let rows = vec![
            BenchRow {
                qf: qf(25),
                sr_by_algorithm: vec![("mmbec".into(), 1.0), ("mbec".into(), 0.73129)],
            },
            BenchRow {
                qf: qf(50),
                sr_by_algorithm: vec![("mmbec".into(), 1.0), ("mbec".into(), 0.7863)],
            },
        ];
        let csv = rows_to_csv(&rows);
        assert_eq!(csv, "qf,mmbec,mbec\n25,1.0000,0.7313\n50,1.0000,0.7863\n");
        let plot = rows_to_gnuplot(&rows);
        assert!(plot.starts_with("# qf mmbec mbec\n"));
        assert!(plot.contains("25 1.0000 0.7313\n"));
    }
}
