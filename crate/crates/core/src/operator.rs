//! Dense (mixed-state) localization operators.
//!
//! For a symbol `f` and window system `S = sum_k s_k (g_k (x) g_k)`,
//!
//! ```text
//! A = (1/L) sum_z f[z] sum_k s_k (pi(z) g_k)(pi(z) g_k)^*
//! ```
//!
//! Expanding the modulations, entry `(t, s)` only depends on the inverse DFT
//! of each symbol row evaluated at `t - s`:
//!
//! ```text
//! A[t][s] = sum_k s_k sum_n g_k[t - n] conj(g_k[s - n]) fhat_n[t - s],
//! fhat_n[d] = (1/L) sum_m f[n][m] exp(2 pi i m d / L)
//! ```
//!
//! which assembles the matrix in `O(L^3)` per window.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{check_len, Error, Result};
use crate::fft::Plans;
use crate::phase_map::{ComplexMap, RealMap};
use crate::signal::Signal;
use crate::window::WindowSystem;

/// Magic bytes of the binary operator dump.
pub const LOCOP_MAGIC: &[u8; 6] = b"LOCOP1";
/// Header length of the binary operator dump.
pub const LOCOP_HEADER_LEN: usize = 16;
/// Largest grid accepted when decoding a dump.
pub const LOCOP_MAX_SIZE: usize = 4096;

/// A dense `L x L` operator together with where it came from.
#[derive(Clone, Debug)]
pub struct LocOperator {
    size: usize,
    matrix: Vec<Complex64>,
    window_system: Option<WindowSystem>,
    symbol_hash: Option<String>,
}

impl LocOperator {
    /// Builds `f * S` for a real symbol.
    pub fn build(symbol: &RealMap, system: &WindowSystem) -> Result<Self> {
        if !symbol.is_finite() {
            return Err(Error::NonFinite("symbol"));
        }
        let mut op = Self::assemble(&symbol.to_complex(), system)?;
        op.symbol_hash = Some(hash_real(symbol));
        Ok(op)
    }

    /// Builds `f * S` for a complex symbol. The result is not self-adjoint
    /// unless the imaginary part vanishes.
    pub fn build_complex(symbol: &ComplexMap, system: &WindowSystem) -> Result<Self> {
        if symbol
            .as_slice()
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::NonFinite("symbol"));
        }
        let mut op = Self::assemble(symbol, system)?;
        let mut hasher = Sha256::new();
        hasher.update((symbol.size() as u64).to_le_bytes());
        for v in symbol.as_slice() {
            hasher.update(v.re.to_le_bytes());
            hasher.update(v.im.to_le_bytes());
        }
        op.symbol_hash = Some(to_hex(&hasher.finalize()));
        Ok(op)
    }

    fn assemble(symbol: &ComplexMap, system: &WindowSystem) -> Result<Self> {
        let len = system.signal_len();
        check_len(len, symbol.size())?;

        let plans = Plans::new(len);
        let scale = 1.0 / len as f64;
        // fhat[n][d]
        let fhat: Vec<Vec<Complex64>> = (0..len)
            .into_par_iter()
            .map(|n| {
                let mut row = symbol.row(n).to_vec();
                plans.inverse.process(&mut row);
                row.iter().map(|v| v * scale).collect()
            })
            .collect();

        let mut matrix = vec![Complex64::new(0.0, 0.0); len * len];
        matrix.par_chunks_mut(len).enumerate().for_each(|(t, row)| {
            for (weight, window) in system.terms() {
                if *weight == 0.0 {
                    continue;
                }
                let g = window.as_slice();
                for (s, entry) in row.iter_mut().enumerate() {
                    let d = (t + len - s) % len;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (n, fh) in fhat.iter().enumerate() {
                        acc += g[(t + len - n) % len] * g[(s + len - n) % len].conj() * fh[d];
                    }
                    *entry += acc * *weight;
                }
            }
        });

        Ok(LocOperator {
            size: len,
            matrix,
            window_system: Some(system.clone()),
            symbol_hash: None,
        })
    }

    /// Wraps a row-major matrix.
    pub fn from_matrix(size: usize, matrix: Vec<Complex64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSize("operator must be non-empty".into()));
        }
        check_len(size * size, matrix.len())?;
        if matrix.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("operator matrix"));
        }
        Ok(LocOperator {
            size,
            matrix,
            window_system: None,
            symbol_hash: None,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Row-major entries.
    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn entry(&self, t: usize, s: usize) -> Complex64 {
        self.matrix[t * self.size + s]
    }

    pub fn window_system(&self) -> Option<&WindowSystem> {
        self.window_system.as_ref()
    }

    /// SHA-256 of the symbol the operator was built from.
    pub fn symbol_hash(&self) -> Option<&str> {
        self.symbol_hash.as_deref()
    }

    pub fn apply(&self, psi: &Signal) -> Result<Signal> {
        check_len(self.size, psi.len())?;
        let x = psi.as_slice();
        let out = self
            .matrix
            .chunks_exact(self.size)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Signal::from_vec_unchecked(out))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.size).map(|i| self.entry(i, i)).sum()
    }

    /// `max |A - A^*|` over all entries.
    pub fn max_asymmetry(&self) -> f64 {
        let l = self.size;
        let mut worst: f64 = 0.0;
        for t in 0..l {
            for s in t..l {
                worst = worst.max((self.entry(t, s) - self.entry(s, t).conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_distance(&self, other: &LocOperator) -> f64 {
        assert_eq!(self.size, other.size, "operator size mismatch");
        self.matrix
            .iter()
            .zip(&other.matrix)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `alpha * self + beta * other`; provenance is dropped.
    pub fn linear_combination(&self, alpha: f64, other: &LocOperator, beta: f64) -> LocOperator {
        assert_eq!(self.size, other.size, "operator size mismatch");
        LocOperator {
            size: self.size,
            matrix: self
                .matrix
                .iter()
                .zip(&other.matrix)
                .map(|(a, b)| a * alpha + b * beta)
                .collect(),
            window_system: None,
            symbol_hash: None,
        }
    }

    pub fn scaled(&self, c: f64) -> LocOperator {
        LocOperator {
            size: self.size,
            matrix: self.matrix.iter().map(|v| v * c).collect(),
            window_system: self.window_system.clone(),
            symbol_hash: None,
        }
    }

    /// Binary dump: `LOCOP1`, `u32` size (little endian), six zero bytes, then
    /// the row-major entries as little-endian `f64` (re, im) pairs.
    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        let size = u32::try_from(self.size)
            .map_err(|_| Error::InvalidSize(format!("{} does not fit in u32", self.size)))?;
        let mut header = [0u8; LOCOP_HEADER_LEN];
        header[..6].copy_from_slice(LOCOP_MAGIC);
        header[6..10].copy_from_slice(&size.to_le_bytes());
        out.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.matrix.len() * 16);
        for v in &self.matrix {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        out.write_all(&buf)?;
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(LOCOP_HEADER_LEN + self.matrix.len() * 16);
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }

    /// Decodes a dump written by [`LocOperator::write_to`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < LOCOP_HEADER_LEN {
            return Err(Error::Parse("operator dump shorter than its header".into()));
        }
        if &bytes[..6] != LOCOP_MAGIC {
            return Err(Error::Parse("bad operator dump magic".into()));
        }
        let size = u32::from_le_bytes(bytes[6..10].try_into().expect("4 bytes")) as usize;
        if bytes[10..LOCOP_HEADER_LEN].iter().any(|&b| b != 0) {
            return Err(Error::Parse("reserved header bytes must be zero".into()));
        }
        if size == 0 || size > LOCOP_MAX_SIZE {
            return Err(Error::Parse(format!("operator size {size} out of range")));
        }
        let body = &bytes[LOCOP_HEADER_LEN..];
        if body.len() != size * size * 16 {
            return Err(Error::Parse(format!(
                "operator body has {} bytes, expected {}",
                body.len(),
                size * size * 16
            )));
        }
        let matrix = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                    f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
                )
            })
            .collect();
        Self::from_matrix(size, matrix)
    }
}

fn hash_real(symbol: &RealMap) -> String {
    let mut hasher = Sha256::new();
    hasher.update((symbol.size() as u64).to_le_bytes());
    for v in symbol.as_slice() {
        hasher.update(v.to_le_bytes());
    }
    to_hex(&hasher.finalize())
}

fn to_hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
