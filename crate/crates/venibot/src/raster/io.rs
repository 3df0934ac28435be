//! Image file I/O: 8-bit single-channel PNG and PGM (P5).
//!
//! Intensities map linearly, byte `b` ↔ `b / 255.0`; writing rounds to the
//! nearest byte. Masks are written as `{0, 255}` images and read back with a
//! mid-gray cut.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, GrayImage};

/// Hard cap on parsed image dimensions; rejects absurd headers before
/// allocating.
const MAX_DIM: usize = 1 << 15;

fn byte_to_intensity(b: u8) -> f64 {
    f64::from(b) / 255.0
}

fn intensity_to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Encodes an image to PGM (P5, maxval 255).
pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| intensity_to_byte(v)));
    out
}

/// Decodes a binary PGM (P5) image with maxval 255.
///
/// Accepts the common header form: magic, whitespace/comment-separated
/// width, height and maxval, one whitespace byte, then raw pixel data.
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let mut pos = 0usize;

    fn skip_ws_and_comments(bytes: &[u8], pos: &mut usize) {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn read_number(bytes: &[u8], pos: &mut usize) -> Result<usize> {
        skip_ws_and_comments(bytes, pos);
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == start || *pos - start > 8 {
            return Err(Error::format("malformed PGM header number"));
        }
        std::str::from_utf8(&bytes[start..*pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format("malformed PGM header number"))
    }

    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        return Err(Error::format("not a P5 PGM"));
    }
    pos += 2;
    let width = read_number(bytes, &mut pos)?;
    let height = read_number(bytes, &mut pos)?;
    let maxval = read_number(bytes, &mut pos)?;
    if width == 0 || height == 0 || width > MAX_DIM || height > MAX_DIM {
        return Err(Error::format("PGM dimensions out of range"));
    }
    if maxval != 255 {
        return Err(Error::format("only maxval 255 PGM is supported"));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format("missing separator before PGM pixel data"));
    }
    pos += 1;
    let need = width
        .checked_mul(height)
        .ok_or_else(|| Error::format("PGM dimensions overflow"))?;
    let raw = bytes
        .get(pos..pos + need)
        .ok_or_else(|| Error::format("truncated PGM pixel data"))?;
    let data = raw.iter().map(|&b| byte_to_intensity(b)).collect();
    GrayImage::from_vec(width, height, data)
}

/// Encodes an image to single-channel 8-bit PNG.
pub fn encode_png(img: &GrayImage) -> Result<Vec<u8>> {
    let buf: Vec<u8> = img.data().iter().map(|&v| intensity_to_byte(v)).collect();
    let mut out = Vec::new();
    let enc = image::codecs::png::PngEncoder::new(&mut out);
    image::ImageEncoder::write_image(
        enc,
        &buf,
        img.width() as u32,
        img.height() as u32,
        image::ExtendedColorType::L8,
    )
    .map_err(|e| Error::format(format!("png encode: {e}")))?;
    Ok(out)
}

/// Decodes a PNG into a gray image; color inputs are luma-converted.
pub fn decode_png(bytes: &[u8]) -> Result<GrayImage> {
    let dyn_img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::format(format!("png decode: {e}")))?;
    let gray = dyn_img.into_luma8();
    let (w, h) = (gray.width() as usize, gray.height() as usize);
    if w == 0 || h == 0 || w > MAX_DIM || h > MAX_DIM {
        return Err(Error::format("PNG dimensions out of range"));
    }
    let data = gray.as_raw().iter().map(|&b| byte_to_intensity(b)).collect();
    GrayImage::from_vec(w, h, data)
}

/// Loads an image, picking the decoder from the file extension.
pub fn load_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => decode_pgm(&bytes),
        _ => decode_png(&bytes),
    }
}

/// Writes an image, picking the encoder from the file extension.
pub fn save_image(path: &Path, img: &GrayImage) -> Result<()> {
    let bytes = match path.extension().and_then(|e| e.to_str()) {
        Some("pgm") => encode_pgm(img),
        _ => encode_png(img)?,
    };
    fs::write(path, bytes)?;
    Ok(())
}

pub fn load_mask(path: &Path) -> Result<BinaryMask> {
    let img = load_image(path)?;
    let bits = img.data().iter().map(|&v| v >= 0.5).collect();
    BinaryMask::from_bits(img.width(), img.height(), bits)
}

pub fn save_mask(path: &Path, mask: &BinaryMask) -> Result<()> {
    save_image(path, &mask.to_gray())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip_is_bit_exact() {
        let img = GrayImage::from_vec(3, 2, vec![0.0, 0.5, 1.0, 0.25, 0.75, 0.1]).unwrap();
        let bytes = encode_pgm(&img);
        let back = decode_pgm(&bytes).unwrap();
        assert_eq!(encode_pgm(&back), bytes);
    }

    #[test]
    fn pgm_rejects_truncation_and_bad_headers() {
        assert!(decode_pgm(b"P6\n1 1\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\n4 4\n255\n\0\0").is_err());
        assert!(decode_pgm(b"P5\n999999999 1\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\n0 3\n255\n").is_err());
    }

    #[test]
    fn pgm_allows_comments() {
        let img = decode_pgm(b"P5\n# test\n2 1\n255\n\x00\xff").unwrap();
        assert_eq!(img.data(), &[0.0, 1.0]);
    }

    #[test]
    fn png_round_trip_preserves_bytes() {
        let img = GrayImage::from_vec(2, 2, vec![0.0, 1.0, 0.5, 0.2]).unwrap();
        let bytes = encode_png(&img).unwrap();
        let back = decode_png(&bytes).unwrap();
        assert_eq!(encode_png(&back).unwrap(), bytes);
    }

    #[test]
    fn mask_round_trip() {
        let mut m = BinaryMask::empty(4, 3).unwrap();
        m.set(1, 1, true);
        m.set(3, 2, true);
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.png");
        save_mask(&p, &m).unwrap();
        assert_eq!(load_mask(&p).unwrap(), m);
    }
}
