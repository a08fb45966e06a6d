//! Square grayscale PGM (`P2` plain, `P5` raw) with linear value mapping.
//!
//! Image row `n`, column `m` holds map entry `[n][m]`. Gray level `v` in
//! `0..=maxval` maps to `lo + (hi - lo) * v / maxval`. Output is always `P5`
//! with `maxval = 65535`, big-endian samples.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::phase_map::{RealMap, ValueRange};

/// Largest image side accepted by the decoder.
pub const MAX_SIDE: usize = 8192;

const OUT_MAXVAL: u32 = 65535;

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.data.len() {
            match self.data[self.pos] {
                b'#' => {
                    while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b if b.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.data.len() && self.data[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse(format!("expected {what} in PGM header")));
        }
        let digits = std::str::from_utf8(&self.data[start..self.pos]).expect("ascii digits");
        digits
            .parse()
            .map_err(|_| Error::Parse(format!("{what} '{digits}' out of range")))
    }
}

/// Decodes a PGM image into a map with values in `range`.
pub fn decode_pgm(data: &[u8], range: ValueRange) -> Result<RealMap> {
    if data.len() < 2 || data[0] != b'P' || !matches!(data[1], b'2' | b'5') {
        return Err(Error::Parse("not a P2/P5 PGM image".into()));
    }
    let binary = data[1] == b'5';
    let mut cur = Cursor { data, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Parse("PGM image has zero size".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse(format!("PGM maxval {maxval} outside 1..=65535")));
    }
    if width != height {
        return Err(Error::Shape(format!("PGM image is {width}x{height}, expected square")));
    }
    let side = width as usize;
    if side > MAX_SIDE {
        return Err(Error::Parse(format!("PGM side {side} exceeds {MAX_SIDE}")));
    }
    let count = side * side;

    let grays: Vec<u32> = if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= data.len() || !data[cur.pos].is_ascii_whitespace() {
            return Err(Error::Parse("missing separator before PGM raster".into()));
        }
        let raster = &data[cur.pos + 1..];
        let bytes_per = if maxval < 256 { 1 } else { 2 };
        if raster.len() < count * bytes_per {
            return Err(Error::Parse(format!(
                "PGM raster has {} bytes, expected {}",
                raster.len(),
                count * bytes_per
            )));
        }
        if bytes_per == 1 {
            raster[..count].iter().map(|&b| u32::from(b)).collect()
        } else {
            raster[..2 * count]
                .chunks_exact(2)
                .map(|c| u32::from(u16::from_be_bytes([c[0], c[1]])))
                .collect()
        }
    } else {
        let mut grays = Vec::with_capacity(count.min(data.len()));
        for _ in 0..count {
            let v = cur.number("gray value")?;
            grays.push(u32::try_from(v).unwrap_or(u32::MAX));
        }
        grays
    };
    if let Some(v) = grays.iter().find(|&&v| u64::from(v) > maxval) {
        return Err(Error::Parse(format!("gray value {v} exceeds maxval {maxval}")));
    }
    let scale = (range.hi - range.lo) / maxval as f64;
    RealMap::from_vec(side, grays.into_iter().map(|v| range.lo + scale * v as f64).collect())
}

/// Encodes a map as a 16-bit `P5` image. Values are clamped to `range`;
/// `NaN` entries become `lo`.
pub fn encode_pgm(map: &RealMap, range: ValueRange) -> Result<Vec<u8>> {
    if !(range.hi > range.lo) {
        return Err(Error::InvalidParameter(format!(
            "PGM value range [{}, {}] is empty",
            range.lo, range.hi
        )));
    }
    let side = map.size();
    let mut out = format!("P5\n{side} {side}\n{OUT_MAXVAL}\n").into_bytes();
    out.reserve(2 * side * side);
    let span = range.hi - range.lo;
    for &v in map.as_slice() {
        let t = if v.is_nan() { 0.0 } else { ((v - range.lo) / span).clamp(0.0, 1.0) };
        let gray = (t * OUT_MAXVAL as f64).round() as u16;
        out.extend_from_slice(&gray.to_be_bytes());
    }
    Ok(out)
}

pub fn load_pgm(path: &Path, range: ValueRange) -> Result<RealMap> {
    decode_pgm(&fs::read(path)?, range)
}

pub fn save_pgm(map: &RealMap, path: &Path, range: ValueRange) -> Result<()> {
    fs::write(path, encode_pgm(map, range)?)?;
    Ok(())
}
