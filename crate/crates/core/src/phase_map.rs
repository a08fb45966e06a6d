//! Square arrays on the phase-space torus, indexed `[n][m]`.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::fft::fft2_in_place;
use crate::signal::LatticePoint;

/// An `L x L` array indexed by (time shift `n`, frequency bin `m`), stored
/// row-major over `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseMap<T> {
    size: usize,
    data: Vec<T>,
}

pub type RealMap = PhaseMap<f64>;
pub type ComplexMap = PhaseMap<Complex64>;

/// Closed interval `[lo, hi]` of symbol values, written `[lo, hi]` in JSON.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValueRange {
    pub const UNIT: ValueRange = ValueRange { lo: 0.0, hi: 1.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        ValueRange { lo, hi }
    }

    /// `lo` for `t == 0`, `hi` for `t == 1`, linear in between.
    pub fn lerp(self, t: f64) -> f64 {
        if t == 0.0 {
            self.lo
        } else if t == 1.0 {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * t
        }
    }
}

impl Default for ValueRange {
    fn default() -> Self {
        ValueRange::UNIT
    }
}

impl From<[f64; 2]> for ValueRange {
    fn from([lo, hi]: [f64; 2]) -> Self {
        ValueRange { lo, hi }
    }
}

impl From<ValueRange> for [f64; 2] {
    fn from(r: ValueRange) -> Self {
        [r.lo, r.hi]
    }
}

impl<T: Clone> PhaseMap<T> {
    pub fn filled(size: usize, value: T) -> Self {
        PhaseMap {
            size,
            data: vec![value; size * size],
        }
    }
}

impl<T> PhaseMap<T> {
    pub fn from_vec(size: usize, data: Vec<T>) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidSize("phase map must be non-empty".into()));
        }
        check_len(size * size, data.len())?;
        Ok(PhaseMap { size, data })
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(size * size);
        for n in 0..size {
            for m in 0..size {
                data.push(f(n, m));
            }
        }
        PhaseMap { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn row(&self, n: usize) -> &[T] {
        &self.data[n * self.size..(n + 1) * self.size]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [T] {
        &mut self.data[n * self.size..(n + 1) * self.size]
    }

    pub fn get(&self, z: LatticePoint) -> &T {
        &self.data[(z.n % self.size) * self.size + z.m % self.size]
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> PhaseMap<U> {
        PhaseMap {
            size: self.size,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Entry `[n][m]` of the result is entry `[n - dn][m - dm]` of `self`.
    pub fn shifted(&self, dn: usize, dm: usize) -> PhaseMap<T>
    where
        T: Clone,
    {
        let l = self.size;
        PhaseMap::from_fn(l, |n, m| {
            self[((n + l - dn % l) % l, (m + l - dm % l) % l)].clone()
        })
    }
}

impl<T> Index<(usize, usize)> for PhaseMap<T> {
    type Output = T;

    fn index(&self, (n, m): (usize, usize)) -> &T {
        &self.data[n * self.size + m]
    }
}

impl<T> IndexMut<(usize, usize)> for PhaseMap<T> {
    fn index_mut(&mut self, (n, m): (usize, usize)) -> &mut T {
        &mut self.data[n * self.size + m]
    }
}

impl RealMap {
    pub fn zeros(size: usize) -> Self {
        Self::filled(size, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &RealMap) -> f64 {
        assert_eq!(self.size, other.size, "phase map size mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Smallest and largest finite entries, `None` if there are none.
    pub fn finite_range(&self) -> Option<(f64, f64)> {
        let mut it = self.data.iter().copied().filter(|v| v.is_finite());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.data {
            *v *= c;
        }
    }

    pub fn add_scaled(&mut self, other: &RealMap, c: f64) {
        assert_eq!(self.size, other.size, "phase map size mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn to_complex(&self) -> ComplexMap {
        self.map(|&v| Complex64::new(v, 0.0))
    }

    /// Circular convolution `(f (*) k)[z] = sum_w f[w] k[z - w]`, computed directly.
    ///
    /// `O(L^4)`; meant for small grids and as an independent check of the
    /// FFT route in [`RealMap::convolve`].
    pub fn convolve_direct(&self, kernel: &RealMap) -> Result<RealMap> {
        check_len(self.size, kernel.size)?;
        let l = self.size;
        let mut out = RealMap::zeros(l);
        for wn in 0..l {
            for wm in 0..l {
                let fw = self[(wn, wm)];
                if fw == 0.0 {
                    continue;
                }
                for n in 0..l {
                    let kn = (n + l - wn) % l;
                    let krow = kernel.row(kn);
                    let orow = out.row_mut(n);
                    for m in 0..l {
                        orow[m] += fw * krow[(m + l - wm) % l];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Circular convolution through the 2D FFT.
    pub fn convolve(&self, kernel: &RealMap) -> Result<RealMap> {
        check_len(self.size, kernel.size)?;
        let a = self.fft2();
        let b = kernel.fft2();
        let mut prod: Vec<Complex64> = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
        fft2_in_place(&mut prod, self.size, true);
        Ok(PhaseMap {
            size: self.size,
            data: prod.into_iter().map(|v| v.re).collect(),
        })
    }

    /// Unnormalized 2D DFT with `exp(-2 pi i (n p + m q) / L)`.
    pub fn fft2(&self) -> ComplexMap {
        self.to_complex().fft2()
    }
}

impl ComplexMap {
    pub fn fft2(&self) -> ComplexMap {
        let mut data = self.data.clone();
        fft2_in_place(&mut data, self.size, false);
        PhaseMap {
            size: self.size,
            data,
        }
    }

    /// Inverse of [`ComplexMap::fft2`], including the `1/L^2` factor.
    pub fn ifft2(&self) -> ComplexMap {
        let mut data = self.data.clone();
        fft2_in_place(&mut data, self.size, true);
        PhaseMap {
            size: self.size,
            data,
        }
    }

    pub fn re(&self) -> RealMap {
        self.map(|v| v.re)
    }

    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.im.abs()))
    }

    pub fn norm_sqr(&self) -> RealMap {
        self.map(|v| v.norm_sqr())
    }
}

/// Sums maps in a fixed pairwise tree so the result does not depend on how
/// the inputs were produced.
pub(crate) fn tree_sum(mut maps: Vec<RealMap>, size: usize) -> RealMap {
    if maps.is_empty() {
        return RealMap::zeros(size);
    }
    while maps.len() > 1 {
        let mut next = Vec::with_capacity(maps.len().div_ceil(2));
        let mut it = maps.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                a.add_scaled(&b, 1.0);
            }
            next.push(a);
        }
        maps = next;
    }
    maps.pop().expect("non-empty")
}
