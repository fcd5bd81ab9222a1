//! Binary PGM (`P5`, maxval 255) reader and writer.
//!
//! Reading accepts the full header grammar of the netpbm format: whitespace
//! separated fields, `#` comments up to end of line, and exactly one
//! whitespace byte before the raster. Writing emits `P5\n<w> <h>\n255\n`
//! followed by the raster.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::ImageGrid;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a grayscale netpbm file (magic {0:?})")]
    NotGrayscale(String),
    #[error("unsupported maxval {0}; only 8-bit (maxval 255) images are supported")]
    UnsupportedDepth(u32),
    #[error("malformed PGM: {0}")]
    Malformed(String),
}

struct Header {
    width: usize,
    height: usize,
    raster_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header, PgmError> {
    if bytes.len() < 2 {
        return Err(PgmError::Malformed("file shorter than magic number".into()));
    }
    let magic = &bytes[..2];
    if magic != b"P5" {
        return Err(PgmError::NotGrayscale(String::from_utf8_lossy(magic).into_owned()));
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' || b == b'\r' {
                            break;
                        }
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(PgmError::Malformed(format!("expected a decimal header field at byte {start}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text.parse().map_err(|_| PgmError::Malformed(format!("header field {text} out of range")))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(PgmError::Malformed("missing whitespace after maxval".into())),
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(PgmError::UnsupportedDepth(maxval.min(u32::MAX as u64) as u32));
    }
    if width == 0 || height == 0 {
        return Err(PgmError::Malformed(format!("empty image {width}x{height}")));
    }
    Ok(Header { width: width as usize, height: height as usize, raster_offset: pos })
}

pub fn decode<T: Real>(bytes: &[u8]) -> Result<ImageGrid<T>, PgmError> {
    let header = parse_header(bytes)?;
    let n = header.width * header.height;
    let raster = &bytes[header.raster_offset..];
    if raster.len() < n {
        return Err(PgmError::Malformed(format!("raster has {} of {n} bytes", raster.len())));
    }
    let data = raster[..n].iter().map(|&b| T::lit(b as f64)).collect();
    Ok(ImageGrid::new(header.width, header.height, data).expect("header dimensions are consistent"))
}

/// Quantises one intensity: clamp to `[0, 255]`, round half away from zero.
#[inline]
pub fn quantize<T: Real>(v: T) -> u8 {
    let v = v.to_f64().unwrap_or(0.0).clamp(0.0, 255.0);
    v.round() as u8
}

pub fn encode<T: Real>(img: &ImageGrid<T>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| quantize(v)));
    out
}

pub fn read_from<T: Real, R: Read>(mut reader: R) -> Result<ImageGrid<T>, PgmError> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn read_image<T: Real>(path: impl AsRef<Path>) -> Result<ImageGrid<T>, PgmError> {
    decode(&fs::read(path)?)
}

pub fn write_to<T: Real, W: Write>(img: &ImageGrid<T>, mut writer: W) -> Result<(), PgmError> {
    writer.write_all(&encode(img))?;
    Ok(())
}

pub fn write_image<T: Real>(img: &ImageGrid<T>, path: impl AsRef<Path>) -> Result<(), PgmError> {
    fs::write(path, encode(img))?;
    Ok(())
}
