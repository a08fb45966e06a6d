//! Plane tiling: spectrograms of the operator applied to an orthonormal family.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Method, RecoveryResult};
use crate::dgt::spectrogram;
use crate::error::{check_len, Error, Result};
use crate::operator::LocOperator;
use crate::phase_map::tree_sum;
use crate::signal::{LatticePoint, Signal};
use crate::window::hermite_system;

const ORTHO_TOL: f64 = 1e-8;

/// `sum_n |V_phi(A e_n)|^2` over the supplied orthonormal family.
///
/// With a complete basis this equals [`super::theta`] for any choice of basis.
pub fn pt_recover(op: &LocOperator, basis: &[Signal], phi: &Signal) -> Result<RecoveryResult> {
    let len = op.size();
    check_len(len, phi.len())?;
    if basis.is_empty() {
        return Err(Error::InvalidCount("plane tiling needs at least one basis element".into()));
    }
    check_orthonormal(basis, len)?;
    let maps = basis
        .par_iter()
        .map(|e| spectrogram(&op.apply(e)?, phi))
        .collect::<Result<Vec<_>>>()?;
    Ok(RecoveryResult::new(tree_sum(maps, len), Method::Pt)
        .with("basis_size", basis.len())
        .with("complete", basis.len() == len)
        .with("target", "f^2"))
}

fn check_orthonormal(basis: &[Signal], len: usize) -> Result<()> {
    for (i, a) in basis.iter().enumerate() {
        check_len(len, a.len())?;
        if (a.norm() - 1.0).abs() > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!("basis element {i} is not unit norm")));
        }
    }
    let bad = (0..basis.len()).into_par_iter().find_any(|&i| {
        basis[i + 1..]
            .iter()
            .any(|b| basis[i].inner(b).expect("checked lengths").norm() > ORTHO_TOL)
    });
    match bad {
        Some(i) => Err(Error::InvalidParameter(format!(
            "basis element {i} is not orthogonal to a later element"
        ))),
        None => Ok(()),
    }
}

/// Orthonormal families for plane tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BasisKind {
    /// `e_k[t] = delta[t - k]`.
    Standard,
    /// `e_k[t] = exp(2 pi i k t / L) / sqrt(L)`.
    Dft,
    /// The first `count` Hermite functions shifted to `center`.
    Hermite { count: usize, center: LatticePoint },
}

impl BasisKind {
    pub fn build(self, len: usize) -> Result<Vec<Signal>> {
        match self {
            BasisKind::Standard => Ok((0..len).map(|k| Signal::unit(len, k)).collect()),
            BasisKind::Dft => {
                let scale = 1.0 / (len as f64).sqrt();
                Ok((0..len)
                    .map(|k| {
                        Signal::from_vec_unchecked(
                            (0..len)
                                .map(|t| {
                                    let phase = 2.0 * PI * ((k * t) % len) as f64 / len as f64;
                                    Complex64::from_polar(scale, phase)
                                })
                                .collect(),
                        )
                    })
                    .collect())
            }
            BasisKind::Hermite { count, center } => {
                let center = LatticePoint::checked(center.n, center.m, len)?;
                hermite_system(len, count, center)
            }
        }
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    /// `standard`, `dft` or `hermite:N@n,m`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "standard" => Ok(BasisKind::Standard),
            "dft" => Ok(BasisKind::Dft),
            other => {
                let bad = || Error::Parse(format!("bad basis '{other}' (expected standard, dft or hermite:N@n,m)"));
                let rest = other.strip_prefix("hermite:").ok_or_else(bad)?;
                let (count, center) = rest.split_once('@').ok_or_else(bad)?;
                let (n, m) = center.split_once(',').ok_or_else(bad)?;
                Ok(BasisKind::Hermite {
                    count: count.trim().parse().map_err(|_| bad())?,
                    center: LatticePoint::new(
                        n.trim().parse().map_err(|_| bad())?,
                        m.trim().parse().map_err(|_| bad())?,
                    ),
                })
            }
        }
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Standard => write!(f, "standard"),
            BasisKind::Dft => write!(f, "dft"),
            BasisKind::Hermite { count, center } => {
                write!(f, "hermite:{count}@{},{}", center.n, center.m)
            }
        }
    }
}

impl TryFrom<String> for BasisKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BasisKind> for String {
    fn from(b: BasisKind) -> String {
        b.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_map::RealMap;
    use crate::window::{make_gaussian_window, WindowSystem};

    #[test]
    fn basis_parsing() {
        assert_eq!("standard".parse::<BasisKind>().unwrap(), BasisKind::Standard);
        assert_eq!("dft".parse::<BasisKind>().unwrap(), BasisKind::Dft);
        let h: BasisKind = "hermite:40@32,16".parse().unwrap();
        assert_eq!(
            h,
            BasisKind::Hermite {
                count: 40,
                center: LatticePoint::new(32, 16)
            }
        );
        assert_eq!(h.to_string().parse::<BasisKind>().unwrap(), h);
        for bad in ["hermite", "hermite:4", "hermite:4@1", "fourier", "hermite:x@1,2"] {
            assert!(bad.parse::<BasisKind>().is_err(), "{bad}");
        }
    }

    #[test]
    fn dft_basis_is_orthonormal() {
        let basis = BasisKind::Dft.build(24).unwrap();
        assert!(check_orthonormal(&basis, 24).is_ok());
    }

    #[test]
    fn rejects_non_orthogonal_family() {
        let len = 8;
        let g = make_gaussian_window(len).unwrap();
        let op = LocOperator::build(&RealMap::filled(len, 1.0), &WindowSystem::single(g.clone()).unwrap())
            .unwrap();
        let family = vec![Signal::unit(len, 0), g.clone()];
        assert!(pt_recover(&op, &family, &g).is_err());
        assert!(pt_recover(&op, &[], &g).is_err());
    }

    #[test]
    fn zero_operator() {
        let len = 16;
        let g = make_gaussian_window(len).unwrap();
        let op = LocOperator::build(&RealMap::zeros(len), &WindowSystem::single(g.clone()).unwrap())
            .unwrap();
        let basis = BasisKind::Standard.build(len).unwrap();
        assert_eq!(pt_recover(&op, &basis, &g).unwrap().estimate.max_abs(), 0.0);
    }

    #[test]
    fn identity_operator_tiles_to_one() {
        let len = 16;
        let g = make_gaussian_window(len).unwrap();
        let op = LocOperator::build(&RealMap::filled(len, 1.0), &WindowSystem::single(g.clone()).unwrap())
            .unwrap();
        let basis = BasisKind::Dft.build(len).unwrap();
        let est = pt_recover(&op, &basis, &g).unwrap().estimate;
        assert!(est.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-9));
    }
}
