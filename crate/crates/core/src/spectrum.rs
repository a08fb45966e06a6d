//! Spectral decomposition `A = sum_m lambda_m (h_m (x) h_m)` of a self-adjoint operator.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::LocOperator;
use crate::signal::Signal;
use crate::window::gram_schmidt;

/// Largest entrywise `|A - A^*|` accepted before symmetrizing.
pub const ASYMMETRY_TOL: f64 = 1e-6;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

const EIGVEC_ROUNDING: f64 = 1e-9;
const EIGVAL_ROUNDING: f64 = 1e-12;

/// Eigenpairs sorted by descending `|lambda|`, ties by descending `lambda`,
/// then by the rounded eigenvector.
#[derive(Clone, Debug)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<Signal>,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[Signal] {
        &self.eigenvectors
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, &Signal)> {
        self.eigenvalues.iter().copied().zip(&self.eigenvectors)
    }

    /// `sum_{m >= count} |lambda_m|`, the mass a partial sum of `count` terms leaves out.
    pub fn tail_mass(&self, count: usize) -> f64 {
        self.eigenvalues.iter().skip(count).map(|v| v.abs()).sum()
    }

    /// `max |<h_i, h_j> - delta_ij|`.
    pub fn gram_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate().skip(i) {
                let expected = if i == j { 1.0 } else { 0.0 };
                let ip = a.inner(b).expect("equal lengths");
                worst = worst.max((ip - expected).norm());
            }
        }
        worst
    }

    /// Row-major `sum_m lambda_m h_m h_m^*`.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let len = self.eigenvectors.first().map_or(0, Signal::len);
        let mut out = vec![Complex64::new(0.0, 0.0); len * len];
        for (lambda, h) in self.pairs() {
            for t in 0..len {
                let a = h[t] * lambda;
                for s in 0..len {
                    out[t * len + s] += a * h[s].conj();
                }
            }
        }
        out
    }

    /// The spectrum of `-A`.
    pub fn negated(&self) -> Spectrum {
        Spectrum {
            eigenvalues: self.eigenvalues.iter().map(|v| -v).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }
}

/// Full eigendecomposition of a self-adjoint operator.
///
/// The matrix is averaged with its adjoint first; operators further than
/// [`ASYMMETRY_TOL`] from self-adjoint are rejected. Eigenvectors inside
/// numerically degenerate clusters are re-orthonormalized, and each eigenvector's
/// phase is fixed so that its largest entry is real and positive.
pub fn eigendecompose(op: &LocOperator) -> Result<Spectrum> {
    let len = op.size();
    let asymmetry = op.max_asymmetry();
    if !(asymmetry <= ASYMMETRY_TOL) {
        return Err(Error::NotSelfAdjoint(asymmetry));
    }
    let hermitian = DMatrix::from_fn(len, len, |t, s| {
        (op.entry(t, s) + op.entry(s, t).conj()) * 0.5
    });
    let eig = SymmetricEigen::try_new(hermitian, f64::EPSILON, 100 * len.max(10))
        .ok_or(Error::EigenNonConvergence)?;

    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..len)
        .map(|k| {
            let v = eig.eigenvectors.column(k).iter().copied().collect();
            (eig.eigenvalues[k], v)
        })
        .collect();
    if pairs.iter().any(|(l, _)| !l.is_finite()) {
        return Err(Error::EigenNonConvergence);
    }

    // Re-orthonormalize within clusters of nearly equal eigenvalues.
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut start = 0;
    while start < pairs.len() {
        let mut end = start + 1;
        while end < pairs.len() && pairs[end - 1].0 - pairs[end].0 < CLUSTER_GAP {
            end += 1;
        }
        if end - start > 1 {
            let vectors = pairs[start..end].iter().map(|(_, v)| v.clone()).collect();
            let fixed = gram_schmidt(vectors).map_err(|_| Error::EigenNonConvergence)?;
            for (slot, v) in pairs[start..end].iter_mut().zip(fixed) {
                slot.1 = v;
            }
        }
        start = end;
    }

    for (_, v) in &mut pairs {
        fix_phase(v);
    }

    let mut keyed: Vec<(SortKey, f64, Vec<Complex64>)> = pairs
        .into_iter()
        .map(|(l, v)| (SortKey::new(l, &v), l, v))
        .collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));

    let (eigenvalues, eigenvectors) = keyed
        .into_iter()
        .map(|(_, l, v)| (l, Signal::from_vec_unchecked(v)))
        .unzip();
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Rotates `v` so that its first entry of (numerically) maximal modulus is real positive.
fn fix_phase(v: &mut [Complex64]) {
    let max = v.iter().fold(0.0f64, |acc, a| acc.max(a.norm()));
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .find(|a| a.norm() >= max * (1.0 - 1e-6))
        .copied()
        .expect("maximum exists");
    let rot = pivot.conj() / pivot.norm();
    for a in v.iter_mut() {
        *a *= rot;
    }
}

#[derive(PartialEq, Eq)]
struct SortKey {
    abs: i64,
    signed: i64,
    vector: Vec<(i64, i64)>,
}

impl SortKey {
    fn new(lambda: f64, v: &[Complex64]) -> Self {
        let q = |x: f64, step: f64| (x / step).round() as i64;
        SortKey {
            abs: q(lambda.abs(), EIGVAL_ROUNDING),
            signed: q(lambda, EIGVAL_ROUNDING),
            vector: v
                .iter()
                .map(|a| (q(a.re, EIGVEC_ROUNDING), q(a.im, EIGVEC_ROUNDING)))
                .collect(),
        }
    }
}

impl Ord for SortKey {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .abs
            .cmp(&self.abs)
            .then(other.signed.cmp(&self.signed))
            .then_with(|| self.vector.cmp(&other.vector))
    }
}

impl PartialOrd for SortKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
