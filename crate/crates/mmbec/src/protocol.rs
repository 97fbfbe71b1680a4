//! Hash-based authorship payload, blind verification and two-party dispute
//! resolution.
//!
//! The embedded payload is two digests: W-MSB = H(keyword) XOR H(image) and
//! W-LSB = H(image). Verification extracts both halves blindly, XORs them
//! back into a keyword digest and scores it against the claimed keyword's
//! digest; the cover image is never an input.

use std::fmt;

use sha1::Sha1;
use sha2::{Digest as _, Sha256};

use crate::attack::bit_similarity;
use crate::error::{Error, Result};
use crate::imaging::GrayImage;
use crate::par;
use crate::watermark::{capacity, embed, extract, EmbedParams, WatermarkBits};

/// Hash family used for keyword and image digests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HashKind {
    #[default]
    Sha256,
    Sha1,
}

impl HashKind {
    pub fn name(&self) -> &'static str {
        match self {
            HashKind::Sha256 => "sha-256",
            HashKind::Sha1 => "sha-1",
        }
    }

    pub fn digest_bits(&self) -> usize {
        match self {
            HashKind::Sha256 => 256,
            HashKind::Sha1 => 160,
        }
    }

    /// Two digests make up the payload.
    pub fn payload_bits(&self) -> usize {
        2 * self.digest_bits()
    }

    fn digest(&self, data: &[u8]) -> Vec<u8> {
        match self {
            HashKind::Sha256 => Sha256::digest(data).to_vec(),
            HashKind::Sha1 => Sha1::digest(data).to_vec(),
        }
    }
}

impl std::str::FromStr for HashKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sha-256" | "sha256" => Ok(HashKind::Sha256),
            "sha-1" | "sha1" => Ok(HashKind::Sha1),
            other => Err(Error::InvalidParams(format!("unknown hash `{other}`"))),
        }
    }
}

/// Author-chosen secret of any non-zero length.
#[derive(Clone, PartialEq, Eq)]
pub struct SecretKeyword(Vec<u8>);

impl SecretKeyword {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::EmptyKeyword);
        }
        Ok(SecretKeyword(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

// The keyword must never leak through logs or reports.
impl fmt::Debug for SecretKeyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("SecretKeyword(<redacted>)")
    }
}

/// Fixed-length hash output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashDigest {
    bytes: Vec<u8>,
}

impl HashDigest {
    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn bit_len(&self) -> usize {
        self.bytes.len() * 8
    }

    pub fn xor(&self, other: &HashDigest) -> Result<HashDigest> {
        if self.bytes.len() != other.bytes.len() {
            return Err(Error::LengthMismatch {
                left: self.bit_len(),
                right: other.bit_len(),
            });
        }
        Ok(HashDigest {
            bytes: self
                .bytes
                .iter()
                .zip(&other.bytes)
                .map(|(a, b)| a ^ b)
                .collect(),
        })
    }

    /// MSB-first bit expansion.
    pub fn to_bits(&self) -> Vec<u8> {
        let mut bits = Vec::with_capacity(self.bit_len());
        for byte in &self.bytes {
            for shift in (0..8).rev() {
                bits.push((byte >> shift) & 1);
            }
        }
        bits
    }

    pub fn from_bits(bits: &[u8]) -> Result<HashDigest> {
        if bits.len() % 8 != 0 {
            return Err(Error::InvalidParams(format!(
                "digest needs a whole number of bytes, got {} bits",
                bits.len()
            )));
        }
        let bytes = bits
            .chunks(8)
            .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | b))
            .collect();
        Ok(HashDigest { bytes })
    }
}

/// Digest of the keyword bytes.
pub fn hash_keyword(keyword: &SecretKeyword, hash: HashKind) -> HashDigest {
    HashDigest {
        bytes: hash.digest(keyword.as_bytes()),
    }
}

/// Digest over the canonical pixel serialization (32-bit big-endian width
/// and height, then row-major samples), so the identity is independent of
/// the source file format.
pub fn hash_image(img: &GrayImage, hash: HashKind) -> HashDigest {
    let mut canonical = Vec::with_capacity(8 + img.data().len());
    canonical.extend_from_slice(&img.width().to_be_bytes());
    canonical.extend_from_slice(&img.height().to_be_bytes());
    canonical.extend_from_slice(img.data());
    HashDigest {
        bytes: hash.digest(&canonical),
    }
}

/// The two payload halves. Before embedding, `wmsb XOR wlsb` recovers the
/// keyword digest exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkPayload {
    pub wmsb: HashDigest,
    pub wlsb: HashDigest,
}

impl WatermarkPayload {
    /// Serialization order: wmsb first, then wlsb, MSB-first in each byte.
    pub fn to_watermark(&self) -> WatermarkBits {
        let mut bits = self.wmsb.to_bits();
        bits.extend(self.wlsb.to_bits());
        WatermarkBits::from_bits(bits).expect("digest bits are 0/1")
    }

    pub fn from_watermark(wm: &WatermarkBits) -> Result<WatermarkPayload> {
        let bits = wm.bits();
        if bits.len() % 16 != 0 {
            return Err(Error::InvalidParams(format!(
                "payload of {} bits does not split into two byte-aligned digests",
                bits.len()
            )));
        }
        let half = bits.len() / 2;
        Ok(WatermarkPayload {
            wmsb: HashDigest::from_bits(&bits[..half])?,
            wlsb: HashDigest::from_bits(&bits[half..])?,
        })
    }
}

/// Builds the payload: W-MSB = H(keyword) XOR H(image), W-LSB = H(image).
pub fn build_payload(
    keyword: &SecretKeyword,
    img: &GrayImage,
    hash: HashKind,
) -> WatermarkPayload {
    let keyword_digest = hash_keyword(keyword, hash);
    let image_digest = hash_image(img, hash);
    let wmsb = keyword_digest
        .xor(&image_digest)
        .expect("digests of one hash share a length");
    WatermarkPayload {
        wmsb,
        wlsb: image_digest,
    }
}

/// Watermarks the image with its authorship payload. The cover image is
/// hashed, combined with the keyword digest and embedded; it is up to the
/// caller to keep the unwatermarked original secret.
pub fn embed_authorship(
    img: &GrayImage,
    keyword: &SecretKeyword,
    params: &EmbedParams,
    hash: HashKind,
) -> Result<GrayImage> {
    let needed = hash.payload_bits();
    let cap = capacity(img, params);
    if cap < needed {
        return Err(Error::CapacityExceeded {
            needed,
            capacity: cap,
        });
    }
    let payload = build_payload(keyword, img, hash);
    embed(img, &payload.to_watermark(), params)
}

/// Outcome of one blind verification.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub sr: f64,
    pub threshold: f64,
    pub accepted: bool,
    pub params: EmbedParams,
    pub hash: HashKind,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report: verification")?;
        writeln!(f, "algorithm: {}", self.params.algorithm.tag())?;
        writeln!(f, "pair_strategy: {}", self.params.pair_strategy.describe())?;
        writeln!(f, "strength_b: {}", self.params.strength_b)?;
        writeln!(f, "hash: {}", self.hash.name())?;
        writeln!(f, "sr: {:.6}", self.sr)?;
        writeln!(f, "threshold: {:.6}", self.threshold)?;
        write!(f, "accepted: {}", self.accepted)
    }
}

/// Blind verification: extract both payload halves from the watermarked
/// image alone, XOR them into the extracted keyword digest and score it
/// against the claimed keyword.
pub fn verify(
    watermarked: &GrayImage,
    claimed: &SecretKeyword,
    params: &EmbedParams,
    hash: HashKind,
    threshold: f64,
) -> Result<VerificationReport> {
    let recovered = extract(watermarked, hash.payload_bits(), params)?;
    let payload = WatermarkPayload::from_watermark(&recovered)?;
    let extracted_digest = payload.wmsb.xor(&payload.wlsb)?;
    let claimed_digest = hash_keyword(claimed, hash);
    let sr = bit_similarity(&extracted_digest.to_bits(), &claimed_digest.to_bits())?.sr();
    Ok(VerificationReport {
        sr,
        threshold,
        accepted: sr >= threshold,
        params: *params,
        hash,
    })
}

/// Who the dispute resolution decides for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ruling {
    AIsAuthor,
    BIsAuthor,
    Inconclusive,
}

impl Ruling {
    pub fn describe(&self) -> &'static str {
        match self {
            Ruling::AIsAuthor => "A-is-author",
            Ruling::BIsAuthor => "B-is-author",
            Ruling::Inconclusive => "inconclusive",
        }
    }
}

/// Full outcome of a two-party dispute: the ruling plus the 2x2 SR matrix
/// (keyword x object).
#[derive(Debug, Clone)]
pub struct DisputeOutcome {
    pub ruling: Ruling,
    /// `reports[x][y]`: keyword of party x verified against object of
    /// party y (0 = A, 1 = B).
    pub reports: [[VerificationReport; 2]; 2],
    pub diagnostic: Option<String>,
}

impl fmt::Display for DisputeOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report: dispute")?;
        let names = ["a", "b"];
        for (x, key_name) in names.iter().enumerate() {
            for (y, obj_name) in names.iter().enumerate() {
                let r = &self.reports[x][y];
                writeln!(
                    f,
                    "sr_keyword_{key_name}_on_object_{obj_name}: {:.6}",
                    r.sr
                )?;
            }
        }
        writeln!(f, "threshold: {:.6}", self.reports[0][0].threshold)?;
        if let Some(diag) = &self.diagnostic {
            writeln!(f, "diagnostic: {diag}")?;
        }
        write!(f, "ruling: {}", self.ruling.describe())
    }
}

/// Resolves conflicting authorship claims by verifying both keywords
/// against both objects. A party wins when its keyword verifies on its own
/// object while the opposing keyword fails there: a published copy lacking
/// the opponent's mark shows the opponent cannot be the author. Checked
/// for A first, then B; identical keywords are indistinguishable up front.
pub fn resolve_dispute(
    obj_a: &GrayImage,
    keyword_a: &SecretKeyword,
    obj_b: &GrayImage,
    keyword_b: &SecretKeyword,
    params: &EmbedParams,
    hash: HashKind,
    threshold: f64,
) -> Result<DisputeOutcome> {
    let (on_a, on_b) = par::join(
        || -> Result<_> {
            Ok((
                verify(obj_a, keyword_a, params, hash, threshold)?,
                verify(obj_a, keyword_b, params, hash, threshold)?,
            ))
        },
        || -> Result<_> {
            Ok((
                verify(obj_b, keyword_a, params, hash, threshold)?,
                verify(obj_b, keyword_b, params, hash, threshold)?,
            ))
        },
    );
    let (a_on_a, b_on_a) = on_a?;
    let (a_on_b, b_on_b) = on_b?;
    let reports = [[a_on_a, a_on_b], [b_on_a, b_on_b]];

    if keyword_a == keyword_b {
        return Ok(DisputeOutcome {
            ruling: Ruling::Inconclusive,
            reports,
            diagnostic: Some("indistinguishable claims".to_string()),
        });
    }

    let ruling = if reports[0][0].accepted && !reports[1][0].accepted {
        Ruling::AIsAuthor
    } else if reports[1][1].accepted && !reports[0][1].accepted {
        Ruling::BIsAuthor
    } else {
        Ruling::Inconclusive
    };
    Ok(DisputeOutcome {
        ruling,
        reports,
        diagnostic: None,
    })
}
