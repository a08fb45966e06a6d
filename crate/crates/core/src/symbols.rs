//! Synthetic test symbols.
//!
//! Shapes are drawn in pixel coordinates `(n, m)` and centered at
//! `(L/2, L/2)` unless told otherwise. Every generator first produces a
//! pattern in `[0, 1]`, optionally blurs it, then maps it onto the value
//! range, so binary shapes take exactly the values `lo` and `hi`.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::load_pgm;
use crate::phase_map::{RealMap, ValueRange};
use crate::signal::torus_norm;

/// One Gaussian bump `amplitude * exp(-|x - center|^2 / (2 sigma^2))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: [f64; 2],
    pub sigma: f64,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

/// Kind-specific parameters. Unset fields take size-dependent defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolShape {
    /// Indicator of the open disk `|x - center| < radius`.
    Circle {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
        /// Default `L/4`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
    },
    /// Sum of Gaussian bumps clipped to `[0, 1]`.
    Gaussians {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bumps: Option<Vec<Bump>>,
        /// Number of default bumps when `bumps` is not given. Default 5.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        count: Option<usize>,
    },
    /// Indicator of a star polygon.
    Star {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
        /// Default 5.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<usize>,
        /// Default `0.4 L`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        outer_radius: Option<f64>,
        /// Default `0.16 L`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inner_radius: Option<f64>,
    },
    /// Straight bars and rings.
    LinesCircles {
        /// Stroke width, default `max(2, L/24)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
    },
    /// [`SymbolShape::LinesCircles`] with a default blur of `L/64`.
    BlurredLinesCircles {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        width: Option<f64>,
    },
    /// Checkerboard with `rows x cols` rectangles, default 4 x 4.
    Tiles {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cols: Option<usize>,
    },
    /// A PGM image mapped onto the value range.
    Bitmap { path: PathBuf },
}

impl SymbolShape {
    pub fn kind(&self) -> &'static str {
        match self {
            SymbolShape::Circle { .. } => "circle",
            SymbolShape::Gaussians { .. } => "gaussians",
            SymbolShape::Star { .. } => "star",
            SymbolShape::LinesCircles { .. } => "lines_circles",
            SymbolShape::BlurredLinesCircles { .. } => "blurred_lines_circles",
            SymbolShape::Tiles { .. } => "tiles",
            SymbolShape::Bitmap { .. } => "bitmap",
        }
    }

    /// Whether the unblurred pattern only takes the values 0 and 1.
    pub fn is_binary(&self) -> bool {
        matches!(
            self,
            SymbolShape::Circle { .. }
                | SymbolShape::Star { .. }
                | SymbolShape::Tiles { .. }
                | SymbolShape::LinesCircles { .. }
        )
    }

    fn default_blur(&self, size: usize) -> f64 {
        match self {
            SymbolShape::BlurredLinesCircles { .. } => size as f64 / 64.0,
            _ => 0.0,
        }
    }
}

impl FromStr for SymbolShape {
    type Err = Error;

    /// A shape with all parameters at their defaults. `bitmap` needs a path
    /// and cannot be built this way.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "circle" => SymbolShape::Circle { center: None, radius: None },
            "gaussians" => SymbolShape::Gaussians { bumps: None, count: None },
            "star" => SymbolShape::Star {
                center: None,
                points: None,
                outer_radius: None,
                inner_radius: None,
            },
            "lines_circles" => SymbolShape::LinesCircles { width: None },
            "blurred_lines_circles" => SymbolShape::BlurredLinesCircles { width: None },
            "tiles" => SymbolShape::Tiles { rows: None, cols: None },
            other => {
                return Err(Error::Parse(format!(
                    "unknown symbol kind '{other}' (expected circle, gaussians, star, \
                     lines_circles, blurred_lines_circles, tiles or bitmap)"
                )))
            }
        })
    }
}

impl fmt::Display for SymbolShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind())
    }
}

/// Everything needed to generate a symbol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolSpec {
    pub size: usize,
    #[serde(default)]
    pub value_range: ValueRange,
    /// Standard deviation in pixels of a circular Gaussian blur. `None`
    /// means the kind's default (zero except for blurred kinds).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blur: Option<f64>,
    #[serde(flatten)]
    pub shape: SymbolShape,
}

impl SymbolSpec {
    pub fn new(size: usize, shape: SymbolShape) -> Self {
        SymbolSpec {
            size,
            value_range: ValueRange::UNIT,
            blur: None,
            shape,
        }
    }

    pub fn with_range(mut self, range: ValueRange) -> Self {
        self.value_range = range;
        self
    }

    pub fn with_blur(mut self, sigma: f64) -> Self {
        self.blur = Some(sigma);
        self
    }

    pub fn effective_blur(&self) -> f64 {
        self.blur.unwrap_or_else(|| self.shape.default_blur(self.size))
    }

    fn validate(&self) -> Result<()> {
        if self.size == 0 {
            return Err(Error::InvalidSize("symbol size must be positive".into()));
        }
        let ValueRange { lo, hi } = self.value_range;
        if !(lo.is_finite() && hi.is_finite() && -1.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "value range [{lo}, {hi}] must satisfy -1 <= lo < hi <= 1"
            )));
        }
        let blur = self.effective_blur();
        if !(blur.is_finite() && blur >= 0.0) {
            return Err(Error::InvalidParameter(format!("blur must be >= 0, got {blur}")));
        }
        Ok(())
    }
}

fn non_negative(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")))
    }
}

/// Generates the symbol described by `spec`. Identical specs give
/// bit-identical maps.
pub fn gen_symbol(spec: &SymbolSpec) -> Result<RealMap> {
    spec.validate()?;
    let size = spec.size;
    let l = size as f64;
    let mid = [(size / 2) as f64; 2];

    if let SymbolShape::Bitmap { path } = &spec.shape {
        let map = load_pgm(path, ValueRange::UNIT)?;
        if map.size() != size {
            return Err(Error::Shape(format!(
                "bitmap {} is {}x{}, expected {size}x{size}",
                path.display(),
                map.size(),
                map.size()
            )));
        }
        return Ok(finish(map, spec));
    }

    let pattern = match &spec.shape {
        SymbolShape::Circle { center, radius } => {
            let c = center.unwrap_or(mid);
            let r = non_negative("radius", radius.unwrap_or(l / 4.0))?;
            indicator(size, |x, y| sq(x - c[0]) + sq(y - c[1]) < r * r)
        }
        SymbolShape::Gaussians { bumps, count } => {
            let bumps = match bumps {
                Some(b) => b.clone(),
                None => default_bumps(size, count.unwrap_or(5)),
            };
            for b in &bumps {
                if !(b.sigma.is_finite() && b.sigma > 0.0 && b.amplitude.is_finite()) {
                    return Err(Error::InvalidParameter("bump sigma must be > 0".into()));
                }
            }
            RealMap::from_fn(size, |n, m| {
                let (x, y) = (n as f64, m as f64);
                let v: f64 = bumps
                    .iter()
                    .map(|b| {
                        let d2 = sq(x - b.center[0]) + sq(y - b.center[1]);
                        b.amplitude * (-d2 / (2.0 * b.sigma * b.sigma)).exp()
                    })
                    .sum();
                v.clamp(0.0, 1.0)
            })
        }
        SymbolShape::Star {
            center,
            points,
            outer_radius,
            inner_radius,
        } => {
            let c = center.unwrap_or(mid);
            let tips = points.unwrap_or(5);
            if tips < 2 {
                return Err(Error::InvalidParameter("a star needs at least 2 points".into()));
            }
            let outer = non_negative("outer radius", outer_radius.unwrap_or(0.4 * l))?;
            let inner = non_negative("inner radius", inner_radius.unwrap_or(0.16 * l))?;
            let polygon: Vec<[f64; 2]> = (0..2 * tips)
                .map(|i| {
                    let r = if i % 2 == 0 { outer } else { inner };
                    // first tip points towards decreasing n
                    let angle = PI * i as f64 / tips as f64;
                    [c[0] - r * angle.cos(), c[1] + r * angle.sin()]
                })
                .collect();
            indicator(size, |x, y| inside_polygon(&polygon, x, y))
        }
        SymbolShape::LinesCircles { width } | SymbolShape::BlurredLinesCircles { width } => {
            let w = non_negative("width", width.unwrap_or((l / 24.0).max(2.0)))?;
            lines_circles(size, w)
        }
        SymbolShape::Tiles { rows, cols } => {
            let (rows, cols) = (rows.unwrap_or(4), cols.unwrap_or(4));
            if rows == 0 || cols == 0 || rows > size || cols > size {
                return Err(Error::InvalidParameter(format!(
                    "tile counts must be in 1..={size}, got {rows}x{cols}"
                )));
            }
            indicator(size, |x, y| {
                let (n, m) = (x as usize, y as usize);
                (n * rows / size + m * cols / size) % 2 == 1
            })
        }
        SymbolShape::Bitmap { .. } => unreachable!("handled above"),
    };
    Ok(finish(pattern, spec))
}

fn finish(pattern: RealMap, spec: &SymbolSpec) -> RealMap {
    let blurred = gaussian_blur(&pattern, spec.effective_blur());
    blurred.map(|&t| spec.value_range.lerp(t.clamp(0.0, 1.0)))
}

fn sq(x: f64) -> f64 {
    x * x
}

fn indicator(size: usize, inside: impl Fn(f64, f64) -> bool) -> RealMap {
    RealMap::from_fn(size, |n, m| if inside(n as f64, m as f64) { 1.0 } else { 0.0 })
}

fn default_bumps(size: usize, count: usize) -> Vec<Bump> {
    let l = size as f64;
    let c = (size / 2) as f64;
    (0..count)
        .map(|i| {
            let (dn, dm) = if i == 0 {
                (0.0, 0.0)
            } else {
                let angle = 2.0 * PI * (i - 1) as f64 / (count - 1) as f64 + 0.3;
                (0.25 * l * angle.cos(), 0.25 * l * angle.sin())
            };
            Bump {
                center: [c + dn, c + dm],
                sigma: l * (0.05 + 0.01 * (i % 3) as f64),
                amplitude: 1.0 - 0.15 * (i % 3) as f64,
            }
        })
        .collect()
}

/// Even-odd rule.
fn inside_polygon(polygon: &[[f64; 2]], x: f64, y: f64) -> bool {
    let mut inside = false;
    let mut j = polygon.len() - 1;
    for i in 0..polygon.len() {
        let (a, b) = (polygon[i], polygon[j]);
        if (a[1] > y) != (b[1] > y) && x < (b[0] - a[0]) * (y - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn lines_circles(size: usize, width: f64) -> RealMap {
    let l = size as f64;
    let half = width / 2.0;
    let (lo, hi) = (0.12 * l, 0.88 * l);
    let span = |v: f64| (lo..=hi).contains(&v);
    let ring = |x: f64, y: f64, cx: f64, cy: f64, r: f64| {
        ((sq(x - cx * l) + sq(y - cy * l)).sqrt() - r * l).abs() < half
    };
    indicator(size, |x, y| {
        let bars = ((x - 0.2 * l).abs() < half && span(y))
            || ((y - 0.8 * l).abs() < half && span(x))
            || ((x - y).abs() / 2f64.sqrt() < half && span(x) && span(y) && x > 0.45 * l);
        let rings = ring(x, y, 0.45, 0.35, 0.16) || ring(x, y, 0.6, 0.6, 0.1);
        let dot = sq(x - 0.78 * l) + sq(y - 0.25 * l) < sq(0.07 * l);
        bars || rings || dot
    })
}

/// Circular convolution with a unit-mass Gaussian of standard deviation
/// `sigma` pixels on the torus. Mass is preserved; `sigma == 0` is the identity.
pub fn gaussian_blur(map: &RealMap, sigma: f64) -> RealMap {
    if sigma == 0.0 {
        return map.clone();
    }
    let size = map.size();
    let mut kernel = RealMap::from_fn(size, |n, m| {
        let r = torus_norm(n, m, size);
        (-r * r / (2.0 * sigma * sigma)).exp()
    });
    let mass = kernel.sum();
    kernel.scale(1.0 / mass);
    map.convolve(&kernel).expect("kernel has the map's size")
}

/// Zeroes the upper half of the frequency axis, `m >= ceil(L/2)`, keeping
/// only non-negative frequencies.
pub fn compress_positive_frequency(map: &RealMap) -> RealMap {
    let size = map.size();
    let cut = size.div_ceil(2);
    RealMap::from_fn(size, |n, m| if m < cut { map[(n, m)] } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(size: usize, kind: &str) -> SymbolSpec {
        SymbolSpec::new(size, kind.parse().unwrap())
    }

    #[test]
    fn zero_radius_circle_is_empty() {
        let s = SymbolSpec::new(
            32,
            SymbolShape::Circle {
                center: None,
                radius: Some(0.0),
            },
        );
        assert_eq!(gen_symbol(&s).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn circle_is_centered_disk() {
        let map = gen_symbol(&spec(64, "circle")).unwrap();
        assert_eq!(map[(32, 32)], 1.0);
        assert_eq!(map[(32, 32 + 15)], 1.0);
        assert_eq!(map[(32, 32 + 16)], 0.0);
        assert_eq!(map[(0, 0)], 0.0);
        let area = map.sum();
        assert!((area - PI * 256.0).abs() < 0.05 * PI * 256.0, "{area}");
    }

    #[test]
    fn single_bump_peaks_at_one() {
        let s = SymbolSpec::new(
            48,
            SymbolShape::Gaussians {
                bumps: Some(vec![Bump {
                    center: [20.0, 30.0],
                    sigma: 4.0,
                    amplitude: 1.0,
                }]),
                count: None,
            },
        );
        let map = gen_symbol(&s).unwrap();
        assert_eq!(map[(20, 30)], 1.0);
        assert!(map.as_slice().iter().all(|&v| v <= 1.0));
        assert_eq!(map.max_abs(), 1.0);
    }

    #[test]
    fn binary_kinds_take_exactly_two_values() {
        let range = ValueRange::new(-0.7, 0.3);
        for kind in ["circle", "star", "tiles", "lines_circles"] {
            let map = gen_symbol(&spec(64, kind).with_range(range)).unwrap();
            let (mut lo, mut hi) = (0, 0);
            for &v in map.as_slice() {
                if v == range.lo {
                    lo += 1;
                } else if v == range.hi {
                    hi += 1;
                } else {
                    panic!("{kind}: unexpected value {v}");
                }
            }
            assert!(lo > 0 && hi > 0, "{kind}");
        }
    }

    #[test]
    fn entries_lie_in_range() {
        let range = ValueRange::new(-1.0, 0.5);
        for kind in ["gaussians", "blurred_lines_circles"] {
            let map = gen_symbol(&spec(40, kind).with_range(range)).unwrap();
            assert!(map.as_slice().iter().all(|&v| range.lo <= v && v <= range.hi), "{kind}");
        }
    }

    #[test]
    fn blur_preserves_mass() {
        for kind in ["circle", "star", "tiles", "lines_circles"] {
            let base = gen_symbol(&spec(64, kind)).unwrap();
            let blurred = gen_symbol(&spec(64, kind).with_blur(2.5)).unwrap();
            assert!((blurred.sum() - base.sum()).abs() < 1e-8, "{kind}");
            assert!(blurred.max_abs_diff(&base) > 0.1);
        }
        let base = gen_symbol(&spec(64, "lines_circles")).unwrap();
        let blurred = gen_symbol(&spec(64, "blurred_lines_circles")).unwrap();
        assert!((blurred.sum() - base.sum()).abs() < 1e-8);
    }

    #[test]
    fn tiles_form_a_checkerboard() {
        let map = gen_symbol(&spec(16, "tiles")).unwrap();
        assert_eq!(map[(0, 0)], 0.0);
        assert_eq!(map[(0, 4)], 1.0);
        assert_eq!(map[(4, 4)], 0.0);
        assert_eq!(map[(15, 0)], 1.0);
        assert_eq!(map.sum(), 128.0);
    }

    #[test]
    fn star_is_polygonal() {
        let map = gen_symbol(&spec(64, "star")).unwrap();
        assert_eq!(map[(32, 32)], 1.0);
        // the first tip points to decreasing n, the gap between tips does not reach as far
        assert_eq!(map[(32 - 22, 32)], 1.0);
        assert_eq!(map[(32 + 22, 32)], 0.0);
    }

    #[test]
    fn deterministic() {
        for kind in ["circle", "gaussians", "star", "lines_circles", "blurred_lines_circles", "tiles"] {
            let a = gen_symbol(&spec(33, kind)).unwrap();
            let b = gen_symbol(&spec(33, kind)).unwrap();
            assert!(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn json_form() {
        let json = r#"{"kind": "circle", "size": 64, "radius": 10, "value_range": [-1, 1]}"#;
        let s: SymbolSpec = serde_json::from_str(json).unwrap();
        assert_eq!(
            s.shape,
            SymbolShape::Circle {
                center: None,
                radius: Some(10.0)
            }
        );
        assert_eq!(s.value_range, ValueRange::new(-1.0, 1.0));
        let back: SymbolSpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn invalid_specs() {
        assert!(gen_symbol(&spec(16, "circle").with_range(ValueRange::new(-2.0, 1.0))).is_err());
        assert!(gen_symbol(&spec(16, "circle").with_range(ValueRange::new(0.5, 0.5))).is_err());
        assert!(gen_symbol(&spec(16, "circle").with_blur(-1.0)).is_err());
        assert!(gen_symbol(&spec(0, "circle")).is_err());
        assert!(gen_symbol(&SymbolSpec::new(
            16,
            SymbolShape::Tiles {
                rows: Some(0),
                cols: None
            }
        ))
        .is_err());
        assert!("square".parse::<SymbolShape>().is_err());
    }

    #[test]
    fn compression_keeps_lower_half() {
        let map = RealMap::filled(5, 1.0);
        let out = compress_positive_frequency(&map);
        assert_eq!(out.row(2), &[1.0, 1.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn bitmap_import() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.pgm");
        std::fs::write(&path, b"P2 2 2 255 0 255 255 0").unwrap();
        let s = SymbolSpec::new(2, SymbolShape::Bitmap { path: path.clone() })
            .with_range(ValueRange::new(-1.0, 1.0));
        assert_eq!(gen_symbol(&s).unwrap().as_slice(), &[-1.0, 1.0, 1.0, -1.0]);
        let wrong = SymbolSpec::new(3, SymbolShape::Bitmap { path });
        assert!(matches!(gen_symbol(&wrong), Err(Error::Shape(_))));
    }
}
