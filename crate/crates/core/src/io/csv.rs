//! Row-major CSV of a square map, one row per time shift `n`.
//!
//! Values are written with 17 significant digits, so a write/read cycle
//! reproduces every `f64` bit for bit. `NaN` is written as `NaN`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::phase_map::RealMap;

/// Largest side accepted by the parser.
pub const MAX_SIDE: usize = 8192;

pub fn to_csv(map: &RealMap) -> String {
    let side = map.size();
    let mut out = String::with_capacity(side * side * 24);
    for n in 0..side {
        for (m, v) in map.row(n).iter().enumerate() {
            if m > 0 {
                out.push(',');
            }
            if v.is_nan() {
                out.push_str("NaN");
            } else {
                write!(out, "{v:.16e}").expect("writing to a String cannot fail");
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_csv(text: &str) -> Result<RealMap> {
    let rows: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .collect();
    let side = rows.len();
    if side == 0 {
        return Err(Error::Parse("empty CSV".into()));
    }
    if side > MAX_SIDE {
        return Err(Error::Parse(format!("CSV has {side} rows, limit is {MAX_SIDE}")));
    }
    let mut data = Vec::with_capacity(side * side);
    for (n, row) in rows.iter().enumerate() {
        let before = data.len();
        for field in row.split(',') {
            let field = field.trim();
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {n}: bad number '{field}'")))?;
            if v.is_infinite() {
                return Err(Error::Parse(format!("row {n}: infinite value")));
            }
            data.push(v);
            if data.len() - before > side {
                break;
            }
        }
        let cols = data.len() - before;
        if cols != side {
            return Err(Error::Shape(format!(
                "row {n} has {cols} columns, expected {side} (square map)"
            )));
        }
    }
    RealMap::from_vec(side, data)
}

pub fn save_csv(map: &RealMap, path: &Path) -> Result<()> {
    fs::write(path, to_csv(map))?;
    Ok(())
}

pub fn load_csv(path: &Path) -> Result<RealMap> {
    let bytes = fs::read(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| Error::Parse("CSV is not UTF-8".into()))?;
    parse_csv(text)
}
