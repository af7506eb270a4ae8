//! Binary PGM (P5) reader and writer.
//!
//! The canonical on-disk format for covers, watermarked images and logos.
//! The reader accepts `#` comment lines and arbitrary whitespace in the
//! header; the writer emits the fixed header `P5\n<w> <h>\n255\n` so output
//! is byte-for-byte deterministic.

use crate::error::{Error, Result};
use crate::plane::GrayImage;

/// Parses a binary PGM. Only maxval 255 is accepted.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[0..2] != b"P5" {
        let found = bytes
            .iter()
            .take(2)
            .map(|&b| b as char)
            .collect::<String>();
        return Err(Error::PgmBadMagic { found });
    }
    let mut pos = 2;
    let width = read_header_number(bytes, &mut pos)? as usize;
    let height = read_header_number(bytes, &mut pos)? as usize;
    let maxval = read_header_number(bytes, &mut pos)?;
    if maxval != 255 {
        return Err(Error::PgmMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(Error::PgmHeader(
                "missing whitespace before payload".into(),
            ))
        }
    }
    let expected = width * height;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::PgmTruncated {
            expected,
            actual: payload.len(),
        });
    }
    GrayImage::new(width, height, payload[..expected].to_vec())
}

/// Serializes an image as binary PGM; `load_pgm(save_pgm(img)) == img`.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

/// Skips whitespace and `#` comments, then reads an unsigned decimal.
fn read_header_number(bytes: &[u8], pos: &mut usize) -> Result<u32> {
    loop {
        match bytes.get(*pos) {
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = bytes.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(_) => break,
            None => return Err(Error::PgmHeader("unexpected end of header".into())),
        }
    }
    let start = *pos;
    while let Some(b) = bytes.get(*pos) {
        if b.is_ascii_digit() {
            *pos += 1;
        } else {
            break;
        }
    }
    if *pos == start {
        return Err(Error::PgmHeader(format!(
            "expected a number at byte offset {start}"
        )));
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::PgmHeader("number out of range".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_pixel() {
        let img = load_pgm(b"P5 1 1 255 \x80").unwrap();
        assert_eq!((img.width(), img.height()), (1, 1));
        assert_eq!(img.samples(), &[0x80]);
    }

    #[test]
    fn two_pixels() {
        let img = load_pgm(b"P5 2 1 255 \x00\xff").unwrap();
        assert_eq!(img.samples(), &[0, 255]);
    }

    #[test]
    fn header_records_width_then_height() {
        let img = GrayImage::new(2, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        let bytes = save_pgm(&img);
        assert!(bytes.starts_with(b"P5\n2 3\n255\n"));
    }

    #[test]
    fn comments_accepted_on_load() {
        let img = load_pgm(b"P5\n# width and height\n2 1\n# maxval\n255\n\x01\x02").unwrap();
        assert_eq!(img.samples(), &[1, 2]);
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = b"P5 512 512 255 ".to_vec();
        bytes.extend_from_slice(&[0u8; 10]);
        match load_pgm(&bytes) {
            Err(Error::PgmTruncated { expected, actual }) => {
                assert_eq!(expected, 512 * 512);
                assert_eq!(actual, 10);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic() {
        assert!(matches!(
            load_pgm(b"P6 1 1 255 abc"),
            Err(Error::PgmBadMagic { .. })
        ));
    }

    #[test]
    fn bad_maxval() {
        assert!(matches!(
            load_pgm(b"P5 1 1 65535 \x00\x00"),
            Err(Error::PgmMaxval(65535))
        ));
    }

    proptest! {
        #[test]
        fn round_trip_identity(width in 1usize..40, height in 1usize..40, seed in any::<u64>()) {
            let mut state = seed;
            let samples: Vec<u8> = (0..width * height)
                .map(|_| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    (state >> 56) as u8
                })
                .collect();
            let img = GrayImage::new(width, height, samples).unwrap();
            let back = load_pgm(&save_pgm(&img)).unwrap();
            prop_assert_eq!(back, img);
        }
    }
}
