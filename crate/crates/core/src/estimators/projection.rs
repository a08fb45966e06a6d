//! Gabor projection: probe the operator with the reconstruction window
//! shifted to each lattice point and read off the response at that point.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{Method, RecoveryResult};
use crate::error::{check_len, Error, Result};
use crate::fft::Plans;
use crate::operator::LocOperator;
use crate::phase_map::RealMap;
use crate::signal::{LatticePoint, Signal};

/// A set of lattice points, stored as a mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    size: usize,
    mask: Vec<bool>,
}

impl Region {
    pub fn full(size: usize) -> Self {
        Region {
            size,
            mask: vec![true; size * size],
        }
    }

    /// The half-open rectangle `n0 <= n < n1`, `m0 <= m < m1`.
    pub fn rect(size: usize, n0: usize, m0: usize, n1: usize, m1: usize) -> Result<Self> {
        if n0 >= n1 || m0 >= m1 || n1 > size || m1 > size {
            return Err(Error::InvalidParameter(format!(
                "region {n0},{m0},{n1},{m1} is empty or exceeds 0..{size}"
            )));
        }
        let mut mask = vec![false; size * size];
        for n in n0..n1 {
            mask[n * size + m0..n * size + m1].fill(true);
        }
        Ok(Region { size, mask })
    }

    pub fn from_points(size: usize, points: &[LatticePoint]) -> Result<Self> {
        let mut mask = vec![false; size * size];
        for p in points {
            let p = LatticePoint::checked(p.n, p.m, size)?;
            mask[p.n * size + p.m] = true;
        }
        Ok(Region { size, mask })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn contains(&self, z: LatticePoint) -> bool {
        z.n < self.size && z.m < self.size && self.mask[z.n * self.size + z.m]
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        let size = self.size;
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| LatticePoint::new(i / size, i % size))
    }
}

/// `<A pi(z) phi, pi(z) phi>` at a single point, evaluated literally.
pub fn gp_point(op: &LocOperator, phi: &Signal, z: LatticePoint) -> Result<Complex64> {
    let probe = phi.tf_shift(z);
    op.apply(&probe)?.inner(&probe)
}

/// Gabor projection estimate `Re <A pi(z) phi, pi(z) phi>`.
///
/// Without a region every lattice point is estimated. With a region, points
/// outside it hold `NaN`, since zero is a meaningful symbol value.
pub fn gp_recover(op: &LocOperator, phi: &Signal, region: Option<&Region>) -> Result<RecoveryResult> {
    let len = op.size();
    check_len(len, phi.len())?;
    let (estimate, max_imag, points) = match region {
        None => {
            let (est, imag) = full_grid(op, phi);
            (est, imag, len * len)
        }
        Some(region) => {
            check_len(len, region.size())?;
            let values = region
                .points()
                .collect::<Vec<_>>()
                .into_par_iter()
                .map(|z| Ok((z, gp_point(op, phi, z)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut est = RealMap::filled(len, f64::NAN);
            let mut imag: f64 = 0.0;
            for (z, v) in &values {
                est[(z.n, z.m)] = v.re;
                imag = imag.max(v.im.abs());
            }
            (est, imag, values.len())
        }
    };
    Ok(RecoveryResult::new(estimate, Method::Gp)
        .with("points", points)
        .with("max_imag", max_imag)
        .with("region", region.is_some()))
}

/// All `L^2` points in `O(L^3)`.
///
/// With `u = pi(n, 0) phi`, the value at `(n, m)` is
/// `sum_d b_n[d] exp(2 pi i m d / L)` where
/// `b_n[d] = sum_t conj(u[t]) A[t][t + d] u[t + d]`.
fn full_grid(op: &LocOperator, phi: &Signal) -> (RealMap, f64) {
    let len = op.size();
    let plans = Plans::new(len);
    let rows: Vec<(Vec<f64>, f64)> = (0..len)
        .into_par_iter()
        .map(|n| {
            let u = phi.tf_shift(LatticePoint::new(n, 0));
            let u = u.as_slice();
            let mut b = vec![Complex64::new(0.0, 0.0); len];
            for t in 0..len {
                let ut = u[t].conj();
                for (d, slot) in b.iter_mut().enumerate() {
                    let s = (t + d) % len;
                    *slot += ut * op.entry(t, s) * u[s];
                }
            }
            plans.inverse.process(&mut b);
            let imag = b.iter().fold(0.0f64, |acc, v| acc.max(v.im.abs()));
            (b.iter().map(|v| v.re).collect(), imag)
        })
        .collect();
    let imag = rows.iter().fold(0.0f64, |acc, (_, i)| acc.max(*i));
    let data = rows.into_iter().flat_map(|(r, _)| r).collect();
    (RealMap::from_vec(len, data).expect("len * len entries"), imag)
}
