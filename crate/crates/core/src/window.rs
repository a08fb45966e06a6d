//! Window generation and finite-rank window systems.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{LatticePoint, Signal};

const UNIT_TOL: f64 = 1e-12;

/// Sample index the generated windows are centered on.
///
/// Lattice coordinates produced by the Gabor transform are relative to this
/// position: a window centered here has its spectrogram peak at `(0, 0)`.
pub fn window_center(len: usize) -> usize {
    len / 2
}

/// Periodized Gaussian `exp(-pi (j - c)^2 / L)` summed over the three nearest
/// periods, normalized to unit energy.
pub fn make_gaussian_window(len: usize) -> Result<Signal> {
    if len < 4 {
        return Err(Error::InvalidSize(format!("gaussian window needs L >= 4, got {len}")));
    }
    let l = len as f64;
    let c = window_center(len) as f64;
    let samples: Vec<f64> = (0..len)
        .map(|j| {
            (-1..=1)
                .map(|r| {
                    let x = j as f64 - c + r as f64 * l;
                    (-PI * x * x / l).exp()
                })
                .sum()
        })
        .collect();
    let norm = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(Signal::from_vec_unchecked(
        samples.iter().map(|v| Complex64::new(v / norm, 0.0)).collect(),
    ))
}

/// Sampled Hermite functions for the weight `exp(-pi x^2)`, evaluated at
/// `x = (j - c) / sqrt(L)`, orthonormalized in order and then shifted by `center`.
///
/// Element `k` is the degree-`k` Hermite function; element 0 agrees with
/// [`make_gaussian_window`] up to periodization.
pub fn hermite_system(len: usize, count: usize, center: LatticePoint) -> Result<Vec<Signal>> {
    if len < 4 {
        return Err(Error::InvalidSize(format!("hermite system needs L >= 4, got {len}")));
    }
    if count == 0 || count > len {
        return Err(Error::InvalidCount(format!(
            "hermite system needs 1 <= N <= L, got N = {count}, L = {len}"
        )));
    }
    let c = window_center(len) as f64;
    let scale = (2.0 * PI / len as f64).sqrt();
    let ys: Vec<f64> = (0..len).map(|j| scale * (j as f64 - c)).collect();

    // Three-term recurrence of the normalized Hermite functions in y = sqrt(2 pi) x.
    let mut raw: Vec<Vec<f64>> = Vec::with_capacity(count);
    raw.push(ys.iter().map(|y| (-0.5 * y * y).exp()).collect());
    for k in 0..count - 1 {
        let a = (2.0 / (k + 1) as f64).sqrt();
        let b = (k as f64 / (k + 1) as f64).sqrt();
        let next: Vec<f64> = (0..len)
            .map(|j| {
                let prev = if k == 0 { 0.0 } else { raw[k - 1][j] };
                a * ys[j] * raw[k][j] - b * prev
            })
            .collect();
        raw.push(next);
    }

    let vectors: Vec<Vec<Complex64>> = raw
        .into_iter()
        .map(|v| v.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
        .collect();
    let basis = gram_schmidt(vectors)?;
    Ok(basis
        .into_iter()
        .map(|v| Signal::from_vec_unchecked(v).tf_shift(center))
        .collect())
}

/// Modified Gram-Schmidt with one reorthogonalization pass.
///
/// Fails if a vector is numerically dependent on its predecessors.
pub(crate) fn gram_schmidt(vectors: Vec<Vec<Complex64>>) -> Result<Vec<Vec<Complex64>>> {
    let mut out: Vec<Vec<Complex64>> = Vec::with_capacity(vectors.len());
    for (k, mut v) in vectors.into_iter().enumerate() {
        let original = norm(&v);
        for _pass in 0..2 {
            for q in &out {
                let proj: Complex64 = v.iter().zip(q).map(|(a, b)| a * b.conj()).sum();
                for (a, b) in v.iter_mut().zip(q) {
                    *a -= proj * b;
                }
            }
        }
        let residual = norm(&v);
        if !(residual > 1e-12 * original) {
            return Err(Error::InvalidParameter(format!(
                "vector {k} is numerically dependent on its predecessors"
            )));
        }
        for a in &mut v {
            *a /= residual;
        }
        out.push(v);
    }
    Ok(out)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Positive finite-rank operator `S = sum_k s_k (g_k (x) g_k)` with unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowSystem {
    terms: Vec<(f64, Signal)>,
}

impl WindowSystem {
    pub fn new(terms: Vec<(f64, Signal)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidWindowSystem("no windows".into()));
        };
        let len = first.len();
        let mut total = 0.0;
        for (k, (weight, window)) in terms.iter().enumerate() {
            if !(weight.is_finite() && *weight >= 0.0) {
                return Err(Error::InvalidWindowSystem(format!(
                    "weight {k} must be finite and non-negative, got {weight}"
                )));
            }
            if window.len() != len {
                return Err(Error::InvalidWindowSystem(format!(
                    "window {k} has length {}, expected {len}",
                    window.len()
                )));
            }
            let norm = window.norm();
            if (norm - 1.0).abs() > UNIT_TOL {
                return Err(Error::InvalidWindowSystem(format!(
                    "window {k} has norm {norm}, expected 1"
                )));
            }
            total += weight;
        }
        if (total - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidWindowSystem(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(WindowSystem { terms })
    }

    /// The rank-one system `g (x) g`.
    pub fn single(window: Signal) -> Result<Self> {
        Self::new(vec![(1.0, window)])
    }

    pub fn terms(&self) -> &[(f64, Signal)] {
        &self.terms
    }

    pub fn signal_len(&self) -> usize {
        self.terms[0].1.len()
    }

    pub fn is_rank_one(&self) -> bool {
        self.terms.len() == 1
    }
}

/// A named window: `gauss` or `hermite:k` (degree-`k` Hermite function).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowKind {
    Gauss,
    Hermite(usize),
}

impl WindowKind {
    pub fn generate(self, len: usize) -> Result<Signal> {
        match self {
            WindowKind::Gauss => make_gaussian_window(len),
            WindowKind::Hermite(k) => {
                let mut family = hermite_system(len, k + 1, LatticePoint::new(0, 0))?;
                Ok(family.pop().expect("count >= 1"))
            }
        }
    }
}

impl FromStr for WindowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "gauss" {
            return Ok(WindowKind::Gauss);
        }
        if let Some(k) = s.strip_prefix("hermite:") {
            return k
                .parse()
                .map(WindowKind::Hermite)
                .map_err(|_| Error::Parse(format!("bad hermite degree in '{s}'")));
        }
        Err(Error::Parse(format!("unknown window '{s}' (expected gauss or hermite:k)")))
    }
}

impl fmt::Display for WindowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowKind::Gauss => write!(f, "gauss"),
            WindowKind::Hermite(k) => write!(f, "hermite:{k}"),
        }
    }
}

/// Textual description of a window system: a single [`WindowKind`] or a
/// `+`-separated mixture of `weight*kind` terms, e.g. `0.5*gauss+0.5*hermite:1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct WindowSpec {
    pub terms: Vec<(f64, WindowKind)>,
}

impl WindowSpec {
    pub fn gauss() -> Self {
        WindowSpec {
            terms: vec![(1.0, WindowKind::Gauss)],
        }
    }

    pub fn build(&self, len: usize) -> Result<WindowSystem> {
        let terms = self
            .terms
            .iter()
            .map(|&(w, kind)| Ok((w, kind.generate(len)?)))
            .collect::<Result<Vec<_>>>()?;
        WindowSystem::new(terms)
    }

    /// The single window of a rank-one spec.
    pub fn build_single(&self, len: usize) -> Result<Signal> {
        match self.terms.as_slice() {
            [(_, kind)] => kind.generate(len),
            _ => Err(Error::InvalidParameter(format!(
                "'{self}' is a mixture; a single window is required here"
            ))),
        }
    }
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('+').collect();
        if parts.len() == 1 && !s.contains('*') {
            return Ok(WindowSpec {
                terms: vec![(1.0, s.parse()?)],
            });
        }
        let terms = parts
            .iter()
            .map(|part| {
                let (w, kind) = part
                    .split_once('*')
                    .ok_or_else(|| Error::Parse(format!("expected weight*window, got '{part}'")))?;
                let w: f64 = w
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad weight '{w}'")))?;
                Ok((w, kind.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(WindowSpec { terms })
    }
}

impl TryFrom<String> for WindowSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WindowSpec> for String {
    fn from(spec: WindowSpec) -> String {
        spec.to_string()
    }
}

impl fmt::Display for WindowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let [(w, kind)] = self.terms.as_slice() {
            if *w == 1.0 {
                return write!(f, "{kind}");
            }
        }
        for (i, (w, kind)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            write!(f, "{w}*{kind}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gram_error(family: &[Signal]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in family.iter().enumerate() {
            for (j, b) in family.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.inner(b).unwrap() - expected).norm());
            }
        }
        worst
    }

    #[test]
    fn gaussian_is_unit_even_and_peaked() {
        let g = make_gaussian_window(64).unwrap();
        assert!((g.norm() - 1.0).abs() < 1e-14);
        for j in 0..64 {
            assert!(g[j].im == 0.0 && g[j].re >= 0.0);
            assert!((g[j] - g[(64 - j) % 64]).norm() < 1e-15);
        }
        let argmax = (0..64)
            .max_by(|&a, &b| g[a].re.partial_cmp(&g[b].re).unwrap())
            .unwrap();
        assert_eq!(argmax, 32);
    }

    #[test]
    fn gaussian_reflection_preserves_values_odd_length() {
        let g = make_gaussian_window(65).unwrap();
        let c = window_center(65);
        let mut a: Vec<f64> = (0..65).map(|j| g[j].re).collect();
        let mut b: Vec<f64> = (0..65).map(|j| g[(2 * c + 65 - j) % 65].re).collect();
        for j in 0..65 {
            assert!((a[j] - b[j]).abs() < 1e-15);
        }
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert_eq!(a, b);
    }

    #[test]
    fn gaussian_rejects_tiny_length() {
        assert!(matches!(make_gaussian_window(3), Err(Error::InvalidSize(_))));
    }

    #[test]
    fn hermite_family_is_orthonormal() {
        let family = hermite_system(64, 20, LatticePoint::new(5, 9)).unwrap();
        assert_eq!(family.len(), 20);
        assert!(gram_error(&family) < 1e-10);
    }

    #[test]
    fn complete_hermite_family_is_orthonormal() {
        for len in [16, 64, 65] {
            let family = hermite_system(len, len, LatticePoint::new(0, 0)).unwrap();
            assert!(gram_error(&family) < 1e-8, "L = {len}");
        }
    }

    #[test]
    fn hermite_ground_state_matches_gaussian() {
        let h0 = hermite_system(128, 1, LatticePoint::new(0, 0)).unwrap().remove(0);
        let g = make_gaussian_window(128).unwrap();
        let worst = (0..128).map(|j| (h0[j] - g[j]).norm()).fold(0.0, f64::max);
        assert!(worst < 1e-3, "max difference {worst}");
    }

    #[test]
    fn hermite_count_bounds() {
        assert!(matches!(
            hermite_system(16, 17, LatticePoint::new(0, 0)),
            Err(Error::InvalidCount(_))
        ));
        assert!(hermite_system(16, 0, LatticePoint::new(0, 0)).is_err());
    }

    #[test]
    fn window_system_validation() {
        let g = make_gaussian_window(16).unwrap();
        let h = WindowKind::Hermite(1).generate(16).unwrap();
        assert!(WindowSystem::new(vec![(0.5, g.clone()), (0.5, h.clone())]).is_ok());
        assert!(WindowSystem::new(vec![(0.5, g.clone()), (0.4, h.clone())]).is_err());
        assert!(WindowSystem::new(vec![(1.5, g.clone()), (-0.5, h)]).is_err());
        assert!(WindowSystem::new(vec![(1.0, g.scaled(Complex64::new(2.0, 0.0)))]).is_err());
        assert!(WindowSystem::new(vec![]).is_err());
    }

    #[test]
    fn window_spec_parsing() {
        let spec: WindowSpec = "gauss".parse().unwrap();
        assert_eq!(spec, WindowSpec::gauss());
        let mixed: WindowSpec = "0.25*gauss+0.75*hermite:2".parse().unwrap();
        assert_eq!(
            mixed.terms,
            vec![(0.25, WindowKind::Gauss), (0.75, WindowKind::Hermite(2))]
        );
        assert_eq!(mixed.to_string().parse::<WindowSpec>().unwrap(), mixed);
        assert!("hann".parse::<WindowSpec>().is_err());
        assert!("hermite:x".parse::<WindowSpec>().is_err());
        assert!(mixed.build_single(16).is_err());
        assert!(mixed.build(16).is_ok());
    }
}
