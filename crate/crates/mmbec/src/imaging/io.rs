//! Canonical image I/O. Binary PGM (P5, maxval 255) is the bit-exact
//! interchange format; 8-bit grayscale PNG is accepted on input when the
//! `png` feature is enabled.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};

const PNG_MAGIC: [u8; 4] = [0x89, b'P', b'N', b'G'];

/// Loads a grayscale image, dispatching on the file's magic bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P5") {
        decode_pgm(path, &bytes)
    } else if bytes.starts_with(&PNG_MAGIC) {
        decode_png(path, &bytes)
    } else {
        Err(Error::unsupported(path, "expected binary PGM (P5) or PNG"))
    }
}

/// Writes the image as binary PGM. `load_image(save_image(img))` is
/// bit-exact.
pub fn save_image(img: &GrayImage, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(img.data().len() + 32);
    write!(out, "P5\n{} {}\n255\n", img.width(), img.height()).expect("vec write");
    out.extend_from_slice(img.data());
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn decode_pgm(path: &Path, bytes: &[u8]) -> Result<GrayImage> {
    let mut cursor = 2; // past "P5"
    let width = read_header_number(path, bytes, &mut cursor)?;
    let height = read_header_number(path, bytes, &mut cursor)?;
    let maxval = read_header_number(path, bytes, &mut cursor)?;
    if maxval != 255 {
        return Err(Error::unsupported(path, format!("maxval {maxval}, want 255")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(cursor) {
        Some(b) if b.is_ascii_whitespace() => cursor += 1,
        _ => return Err(Error::corrupt(path, "missing raster separator")),
    }
    let expected = (width as u64)
        .checked_mul(height as u64)
        .ok_or(Error::DimensionOverflow {
            width: width as u64,
            height: height as u64,
        })?;
    let raster = &bytes[cursor..];
    if (raster.len() as u64) < expected {
        return Err(Error::corrupt(
            path,
            format!("raster holds {} bytes, header promises {}", raster.len(), expected),
        ));
    }
    GrayImage::new(width, height, raster[..expected as usize].to_vec())
}

/// Reads the next decimal field of a PGM header, skipping whitespace and
/// `#` comment lines.
fn read_header_number(path: &Path, bytes: &[u8], cursor: &mut usize) -> Result<u32> {
    loop {
        match bytes.get(*cursor) {
            Some(b) if b.is_ascii_whitespace() => *cursor += 1,
            Some(b'#') => {
                while let Some(b) = bytes.get(*cursor) {
                    *cursor += 1;
                    if *b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(Error::corrupt(path, "truncated header")),
        }
    }
    let start = *cursor;
    while matches!(bytes.get(*cursor), Some(b) if b.is_ascii_digit()) {
        *cursor += 1;
    }
    if *cursor == start {
        return Err(Error::corrupt(path, "expected decimal header field"));
    }
    std::str::from_utf8(&bytes[start..*cursor])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::corrupt(path, "header field out of range"))
}

#[cfg(feature = "png")]
fn decode_png(path: &Path, bytes: &[u8]) -> Result<GrayImage> {
    let decoded = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::corrupt(path, e.to_string()))?;
    match decoded {
        image::DynamicImage::ImageLuma8(luma) => {
            GrayImage::new(luma.width(), luma.height(), luma.into_raw())
        }
        other => Err(Error::unsupported(
            path,
            format!("PNG color type {:?}, want 8-bit grayscale", other.color()),
        )),
    }
}

#[cfg(not(feature = "png"))]
fn decode_png(path: &Path, _bytes: &[u8]) -> Result<GrayImage> {
    Err(Error::unsupported(
        path,
        "PNG input requires the `png` feature",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_path(name: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("mmbec-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir.join(name)
    }

    #[test]
    fn pgm_round_trip_is_bit_exact() {
        let data: Vec<u8> = (0..256 * 256).map(|i| (i % 251) as u8).collect();
        let img = GrayImage::new(256, 256, data).unwrap();
        let path = tmp_path("roundtrip.pgm");
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn constant_pgm_decodes() {
        let path = tmp_path("constant.pgm");
        let mut bytes = b"P5\n8 8\n255\n".to_vec();
        bytes.extend(std::iter::repeat_n(0x80u8, 64));
        fs::write(&path, bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!((img.width(), img.height()), (8, 8));
        assert!(img.data().iter().all(|&p| p == 128));
    }

    #[test]
    fn header_comments_are_skipped() {
        let path = tmp_path("comments.pgm");
        let mut bytes = b"P5\n# made by hand\n8 # width\n8\n255\n".to_vec();
        bytes.extend(std::iter::repeat_n(1u8, 64));
        fs::write(&path, bytes).unwrap();
        assert!(load_image(&path).is_ok());
    }

    #[test]
    fn truncated_body_is_corrupt() {
        let path = tmp_path("truncated.pgm");
        let mut bytes = b"P5\n8 8\n255\n".to_vec();
        bytes.extend(std::iter::repeat_n(0u8, 63));
        fs::write(&path, bytes).unwrap();
        assert!(matches!(load_image(&path), Err(Error::CorruptImage { .. })));
    }

    #[test]
    fn non_255_maxval_is_unsupported() {
        let path = tmp_path("maxval.pgm");
        fs::write(&path, b"P5\n1 1\n65535\n\x00\x00").unwrap();
        assert!(matches!(load_image(&path), Err(Error::UnsupportedFormat { .. })));
    }

    #[test]
    fn unknown_magic_is_unsupported() {
        let path = tmp_path("junk.bin");
        fs::write(&path, b"GIF89a.....").unwrap();
        assert!(matches!(load_image(&path), Err(Error::UnsupportedFormat { .. })));
    }

    #[test]
    fn unwritable_destination_errors() {
        let img = GrayImage::new(8, 8, vec![0; 64]).unwrap();
        let err = save_image(&img, "/nonexistent-dir/out.pgm").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }

    #[cfg(feature = "png")]
    #[test]
    fn png_input_matches_pgm_pixels() {
        let data: Vec<u8> = (0..64 * 64).map(|i| (i * 3 % 256) as u8).collect();
        let img = GrayImage::new(64, 64, data.clone()).unwrap();

        let png_path = tmp_path("same.png");
        image::GrayImage::from_raw(64, 64, data)
            .unwrap()
            .save(&png_path)
            .unwrap();
        let from_png = load_image(&png_path).unwrap();
        assert_eq!(from_png, img);
    }
}
