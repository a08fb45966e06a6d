//! Symbol and estimate files: 16-bit PGM and full-precision CSV.

pub mod csv;
pub mod pgm;

use std::path::Path;

use crate::error::Result;
use crate::phase_map::{RealMap, ValueRange};

pub use self::csv::{load_csv, parse_csv, save_csv, to_csv};
pub use self::pgm::{decode_pgm, encode_pgm, load_pgm, save_pgm};

/// Reads a map from `.csv` (exact) or PGM (anything else, mapped onto `range`).
pub fn read_map(path: &Path, range: ValueRange) -> Result<RealMap> {
    if has_extension(path, "csv") {
        load_csv(path)
    } else {
        load_pgm(path, range)
    }
}

/// Case-insensitive extension test.
pub fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}
