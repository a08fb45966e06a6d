//! Error metrics and the blur bound.

use crate::error::{check_len, Error, Result};
use crate::phase_map::RealMap;
use crate::signal::torus_norm;

/// `||estimate - truth||_1 / ||truth||_1`.
///
/// Entries where the estimate is `NaN` (outside a restricted region) are
/// left out of both sums.
pub fn rel_l1_error(estimate: &RealMap, truth: &RealMap) -> Result<f64> {
    check_len(truth.size(), estimate.size())?;
    if !truth.is_finite() {
        return Err(Error::NonFinite("truth"));
    }
    let (mut num, mut den) = (0.0, 0.0);
    for (&e, &t) in estimate.as_slice().iter().zip(truth.as_slice()) {
        if e.is_nan() {
            continue;
        }
        num += (e - t).abs();
        den += t.abs();
    }
    if den == 0.0 {
        return Err(Error::InvalidParameter(
            "truth has zero L1 norm on the compared entries".into(),
        ));
    }
    Ok(num / den)
}

/// Discrete isotropic total variation with forward cyclic differences,
/// `sum_z sqrt(|f(n+1, m) - f(n, m)|^2 + |f(n, m+1) - f(n, m)|^2)`.
pub fn variation(f: &RealMap) -> f64 {
    let size = f.size();
    let mut total = 0.0;
    for n in 0..size {
        let row = f.row(n);
        let next = f.row((n + 1) % size);
        for m in 0..size {
            let dn = next[m] - row[m];
            let dm = row[(m + 1) % size] - row[m];
            total += dn.hypot(dm);
        }
    }
    total
}

/// `variation(f) * sum_z |z| |kernel(z)|` with the torus metric.
///
/// For a unit-mass kernel this bounds `||f (*) kernel - f||_1`: a shift by
/// `z = (a, b)` moves `f` by at most `|a| sum |D_n f| + |b| sum |D_m f|`,
/// which Cauchy-Schwarz bounds by `|z| variation(f)` pointwise.
pub fn blur_bound(f: &RealMap, kernel: &RealMap) -> Result<f64> {
    check_len(f.size(), kernel.size())?;
    let size = kernel.size();
    let mut moment = 0.0;
    for n in 0..size {
        for (m, &k) in kernel.row(n).iter().enumerate() {
            moment += torus_norm(n, m, size) * k.abs();
        }
    }
    Ok(variation(f) * moment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn delta(size: usize) -> RealMap {
        let mut d = RealMap::zeros(size);
        d[(0, 0)] = 1.0;
        d
    }

    #[test]
    fn rel_l1_examples() {
        let truth = RealMap::from_fn(8, |n, m| (n * 8 + m) as f64 - 20.0);
        assert_eq!(rel_l1_error(&truth, &truth).unwrap(), 0.0);
        assert_eq!(rel_l1_error(&RealMap::zeros(8), &truth).unwrap(), 1.0);
        let ones = RealMap::filled(8, 1.0);
        let shifted = RealMap::filled(8, 1.25);
        assert!((rel_l1_error(&shifted, &ones).unwrap() - 0.25).abs() < 1e-15);
        let below = RealMap::filled(8, 0.5);
        assert!((rel_l1_error(&below, &ones).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rel_l1_skips_nan_entries() {
        let truth = RealMap::from_vec(2, vec![1.0, 2.0, 100.0, 4.0]).unwrap();
        let est = RealMap::from_vec(2, vec![2.0, 2.0, f64::NAN, 4.0]).unwrap();
        assert!((rel_l1_error(&est, &truth).unwrap() - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn rel_l1_rejects_bad_input() {
        assert!(rel_l1_error(&RealMap::zeros(4), &RealMap::zeros(4)).is_err());
        assert!(rel_l1_error(&RealMap::zeros(4), &RealMap::filled(5, 1.0)).is_err());
        assert!(rel_l1_error(&RealMap::zeros(4), &RealMap::filled(4, f64::NAN)).is_err());
    }

    #[test]
    fn variation_examples() {
        assert_eq!(variation(&RealMap::filled(16, 0.3)), 0.0);
        // one pixel: |grad| = sqrt(2) at the pixel, 1 at its two backward neighbours
        let mut pixel = RealMap::zeros(16);
        pixel[(5, 7)] = 1.0;
        assert!((variation(&pixel) - (2.0 + 2f64.sqrt())).abs() < 1e-15);
        // a horizontal stripe has two unit jumps per column
        let stripe = RealMap::from_fn(16, |n, _| if (4..9).contains(&n) { 1.0 } else { 0.0 });
        assert!((variation(&stripe) - 32.0).abs() < 1e-12);
    }

    #[test]
    fn blur_bound_examples() {
        let f = RealMap::from_fn(16, |n, m| ((n * m) % 7) as f64);
        assert_eq!(blur_bound(&f, &delta(16)).unwrap(), 0.0);
        let kernel = RealMap::filled(16, 1.0 / 256.0);
        assert_eq!(blur_bound(&RealMap::filled(16, 2.0), &kernel).unwrap(), 0.0);
    }

    fn gaussian_kernel(size: usize, sigma: f64) -> RealMap {
        let mut k = RealMap::from_fn(size, |n, m| {
            let r = torus_norm(n, m, size);
            (-r * r / (2.0 * sigma * sigma)).exp()
        });
        let mass = k.sum();
        k.scale(1.0 / mass);
        k
    }

    #[test]
    fn disk_blur_is_bounded() {
        let size = 64;
        let f = RealMap::from_fn(size, |n, m| {
            let (a, b) = (n as f64 - 32.0, m as f64 - 32.0);
            if a * a + b * b < 256.0 {
                1.0
            } else {
                0.0
            }
        });
        let k = gaussian_kernel(size, 2.0);
        let mut err = f.convolve(&k).unwrap();
        err.add_scaled(&f, -1.0);
        let bound = blur_bound(&f, &k).unwrap();
        assert!(err.l1_norm() <= bound, "{} > {bound}", err.l1_norm());
    }

    proptest! {
        #[test]
        fn rel_l1_is_scale_covariant(
            values in proptest::collection::vec(-1.0f64..1.0, 36),
            noise in proptest::collection::vec(-0.1f64..0.1, 36),
            c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0],
        ) {
            let truth = RealMap::from_vec(6, values).unwrap();
            prop_assume!(truth.l1_norm() > 1e-3);
            let mut est = RealMap::from_vec(6, noise).unwrap();
            est.add_scaled(&truth, 1.0);
            let base = rel_l1_error(&est, &truth).unwrap();
            let mut est_c = est.clone();
            est_c.scale(c);
            let mut truth_c = truth.clone();
            truth_c.scale(c);
            let scaled = rel_l1_error(&est_c, &truth_c).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
        }

        #[test]
        fn variation_is_homogeneous(
            values in proptest::collection::vec(-1.0f64..1.0, 25),
            c in -10.0f64..10.0,
        ) {
            let f = RealMap::from_vec(5, values).unwrap();
            let mut g = f.clone();
            g.scale(c);
            prop_assert!((variation(&g) - c.abs() * variation(&f)).abs() <= 1e-12 * (1.0 + variation(&g)));
        }

        #[test]
        fn blur_bound_dominates_blur_error(
            values in proptest::collection::vec(-1.0f64..1.0, 144),
            weights in proptest::collection::vec(0.0f64..1.0, 144),
        ) {
            let f = RealMap::from_vec(12, values).unwrap();
            let mut k = RealMap::from_vec(12, weights).unwrap();
            let mass = k.sum();
            prop_assume!(mass > 1e-6);
            k.scale(1.0 / mass);
            let mut err = f.convolve_direct(&k).unwrap();
            err.add_scaled(&f, -1.0);
            prop_assert!(err.l1_norm() <= blur_bound(&f, &k).unwrap() + 1e-9);
        }
    }
}
