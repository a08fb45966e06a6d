//! Signals on the cyclic group `Z_L` and time-frequency shifts.

use std::f64::consts::PI;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// A complex vector of length `L`, indices taken modulo `L`.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal(Vec<Complex64>);

impl Signal {
    /// Wraps samples, rejecting empty or non-finite input.
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidSize("signal must be non-empty".into()));
        }
        if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("signal"));
        }
        Ok(Signal(samples))
    }

    pub fn from_real(samples: &[f64]) -> Result<Self> {
        Self::new(samples.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(len: usize) -> Self {
        Signal(vec![Complex64::new(0.0, 0.0); len])
    }

    /// Standard basis vector `e_k`.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut s = Self::zeros(len);
        s.0[k % len] = Complex64::new(1.0, 0.0);
        s
    }

    pub(crate) fn from_vec_unchecked(samples: Vec<Complex64>) -> Self {
        Signal(samples)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other> = sum self[t] * conj(other[t])`, linear in the first slot.
    pub fn inner(&self, other: &Signal) -> Result<Complex64> {
        check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn scaled(&self, c: Complex64) -> Signal {
        Signal(self.0.iter().map(|v| v * c).collect())
    }

    pub fn normalized(&self) -> Result<Signal> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize a zero signal".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Time-frequency shift `pi(n, m)`:
    /// `(pi(n, m) psi)[t] = exp(2 pi i m t / L) psi[(t - n) mod L]`.
    pub fn tf_shift(&self, z: LatticePoint) -> Signal {
        let len = self.len();
        let n = z.n % len;
        let m = z.m % len;
        let samples = (0..len)
            .map(|t| {
                let v = self.0[(t + len - n) % len];
                if m == 0 {
                    v
                } else {
                    v * modulation(m * t % len, len)
                }
            })
            .collect();
        Signal(samples)
    }
}

impl Index<usize> for Signal {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Signal {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

/// `exp(2 pi i k / L)` for `k` already reduced modulo `L`.
pub(crate) fn modulation(k: usize, len: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / len as f64)
}

/// A point `(n, m)` of the phase-space torus: time shift and frequency bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub n: usize,
    pub m: usize,
}

impl LatticePoint {
    pub fn new(n: usize, m: usize) -> Self {
        LatticePoint { n, m }
    }

    /// Builds a point on the `size` torus, rejecting out-of-range indices.
    pub fn checked(n: usize, m: usize, size: usize) -> Result<Self> {
        if n >= size || m >= size {
            return Err(Error::InvalidParameter(format!(
                "lattice point ({n}, {m}) outside 0..{size}"
            )));
        }
        Ok(LatticePoint { n, m })
    }

    /// The inverse shift `(-n mod L, -m mod L)`.
    pub fn negated(self, size: usize) -> Self {
        LatticePoint {
            n: (size - self.n % size) % size,
            m: (size - self.m % size) % size,
        }
    }
}

/// Torus distance from the origin: `sqrt(min(n, L-n)^2 + min(m, L-m)^2)`.
pub fn torus_norm(n: usize, m: usize, size: usize) -> f64 {
    let dn = n.min(size - n) as f64;
    let dm = m.min(size - m) as f64;
    (dn * dn + dm * dm).sqrt()
}
