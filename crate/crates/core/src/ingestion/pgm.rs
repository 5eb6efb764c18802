//! Netpbm graymap (PGM) codec, `P2` (ASCII) and `P5` (binary).

use std::fs;
use std::path::Path;

use super::Frame;
use crate::error::{Error, Result};

struct Header {
    binary: bool,
    width: usize,
    height: usize,
    maxval: u32,
    /// Offset of the first raster byte.
    data_start: usize,
}

/// Skips whitespace and `#` comments.
fn skip_separators(bytes: &[u8], mut pos: usize) -> usize {
    while pos < bytes.len() {
        match bytes[pos] {
            b'#' => {
                while pos < bytes.len() && bytes[pos] != b'\n' && bytes[pos] != b'\r' {
                    pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => pos += 1,
            _ => break,
        }
    }
    pos
}

fn read_uint(bytes: &[u8], pos: usize, what: &str) -> Result<(u32, usize)> {
    let start = skip_separators(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(Error::BadHeader(format!("expected {what}")));
    }
    let text = std::str::from_utf8(&bytes[start..end]).expect("ascii digits");
    let value = text
        .parse::<u32>()
        .map_err(|_| Error::BadHeader(format!("{what} {text} is out of range")))?;
    Ok((value, end))
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        other => {
            return Err(Error::BadMagic {
                found: String::from_utf8_lossy(other.unwrap_or(bytes)).into_owned(),
            })
        }
    };
    let (width, pos) = read_uint(bytes, 2, "width")?;
    let (height, pos) = read_uint(bytes, pos, "height")?;
    let (maxval, pos) = read_uint(bytes, pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::BadHeader(format!("image is {width}x{height}")));
    }
    if maxval == 0 {
        return Err(Error::ZeroMaxval);
    }
    if maxval > 65535 {
        return Err(Error::MaxvalTooLarge(maxval));
    }
    // exactly one whitespace byte separates the header from a binary raster
    let data_start = match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos + 1,
        None if !binary => pos,
        _ => return Err(Error::BadHeader("missing whitespace after maxval".into())),
    };
    Ok(Header {
        binary,
        width: width as usize,
        height: height as usize,
        maxval,
        data_start,
    })
}

/// Decodes a PGM image held in memory into a frame with values in `[0, 1]`.
pub fn decode_pgm(bytes: &[u8]) -> Result<Frame> {
    let h = parse_header(bytes)?;
    let count = h.width * h.height;
    let raster = &bytes[h.data_start..];
    let mut raw = Vec::with_capacity(count);

    if h.binary {
        let wide = h.maxval > 255;
        let stride = if wide { 2 } else { 1 };
        let available = raster.len() / stride;
        if available < count {
            return Err(Error::Truncated {
                expected: count,
                found: available,
            });
        }
        for i in 0..count {
            let v = if wide {
                u16::from_be_bytes([raster[2 * i], raster[2 * i + 1]]) as u32
            } else {
                raster[i] as u32
            };
            raw.push(v);
        }
    } else {
        let mut pos = 0;
        while raw.len() < count {
            let start = skip_separators(raster, pos);
            if start >= raster.len() {
                return Err(Error::Truncated {
                    expected: count,
                    found: raw.len(),
                });
            }
            let (v, next) = read_uint(raster, start, "sample")?;
            raw.push(v);
            pos = next;
        }
    }

    if let Some(&bad) = raw.iter().find(|&&v| v > h.maxval) {
        return Err(Error::SampleOutOfRange {
            value: bad,
            maxval: h.maxval,
        });
    }
    let scale = h.maxval as f64;
    Ok(Frame {
        width: h.width,
        height: h.height,
        pixels: raw.into_iter().map(|v| v as f64 / scale).collect(),
    })
}

/// Reads a PGM file. Row-major, top-left pixel first.
pub fn load_pgm(path: &Path) -> Result<Frame> {
    let bytes = fs::read(path).map_err(|e| Error::from(e).in_frame(path))?;
    decode_pgm(&bytes).map_err(|e| e.in_frame(path))
}

/// Encodes a frame as binary `P5` with maxval 255, clamping to `[0, 1]`.
/// Returns the bytes and the number of clamped pixels.
pub fn encode_pgm(frame: &Frame) -> (Vec<u8>, usize) {
    let mut out = format!("P5\n{} {}\n255\n", frame.width, frame.height).into_bytes();
    let mut clamped = 0;
    out.extend(frame.pixels.iter().map(|&v| {
        if !(0.0..=1.0).contains(&v) {
            clamped += 1;
        }
        (v.clamp(0.0, 1.0) * 255.0).round() as u8
    }));
    (out, clamped)
}

/// Writes a frame as binary PGM; returns the number of clamped pixels.
pub fn write_pgm(path: &Path, frame: &Frame) -> Result<usize> {
    let (bytes, clamped) = encode_pgm(frame);
    fs::write(path, bytes)?;
    Ok(clamped)
}
