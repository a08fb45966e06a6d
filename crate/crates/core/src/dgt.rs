//! Full-lattice discrete Gabor transform.
//!
//! `V_g psi[n][m] = <psi, pi(n, m) g> = sum_t psi[t] conj(g[t - n]) exp(-2 pi i m t / L)`.
//!
//! Synthesis carries the `1/L` so that [`dgt_adjoint`] after [`dgt`] is the
//! identity for a unit-norm window.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_len, Result};
use crate::fft::Plans;
use crate::phase_map::{ComplexMap, RealMap};
use crate::signal::Signal;

/// Analysis: one length-`L` FFT per time shift.
pub fn dgt(psi: &Signal, g: &Signal) -> Result<ComplexMap> {
    let len = psi.len();
    check_len(len, g.len())?;
    let plans = Plans::new(len);
    let x = psi.as_slice();
    let w = g.as_slice();
    let mut data = vec![Complex64::new(0.0, 0.0); len * len];
    data.par_chunks_mut(len).enumerate().for_each(|(n, row)| {
        for (t, v) in row.iter_mut().enumerate() {
            *v = x[t] * w[(t + len - n) % len].conj();
        }
        plans.forward.process(row);
    });
    ComplexMap::from_vec(len, data)
}

/// Synthesis `(1/L) sum_{n,m} F[n][m] pi(n, m) g`.
pub fn dgt_adjoint(coeffs: &ComplexMap, g: &Signal) -> Result<Signal> {
    let len = g.len();
    check_len(len, coeffs.size())?;
    let plans = Plans::new(len);
    let w = g.as_slice();
    let rows: Vec<Vec<Complex64>> = (0..len)
        .into_par_iter()
        .map(|n| {
            let mut row = coeffs.row(n).to_vec();
            plans.inverse.process(&mut row);
            for (t, v) in row.iter_mut().enumerate() {
                *v *= w[(t + len - n) % len];
            }
            row
        })
        .collect();
    let scale = 1.0 / len as f64;
    let out = (0..len)
        .map(|t| rows.iter().map(|row| row[t]).sum::<Complex64>() * scale)
        .collect();
    Ok(Signal::from_vec_unchecked(out))
}

/// `|V_g psi|^2`.
pub fn spectrogram(psi: &Signal, g: &Signal) -> Result<RealMap> {
    Ok(dgt(psi, g)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::LatticePoint;
    use crate::window::make_gaussian_window;

    fn random_signal(len: usize, seed: u64) -> Signal {
        let mut state = seed ^ 0x9e3779b97f4a7c15;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        Signal::new((0..len).map(|_| Complex64::new(next(), next())).collect()).unwrap()
    }

    /// Literal `<psi, pi(z) g>`.
    fn brute_dgt(psi: &Signal, g: &Signal, n: usize, m: usize) -> Complex64 {
        psi.inner(&g.tf_shift(LatticePoint::new(n, m))).unwrap()
    }

    #[test]
    fn matches_inner_products() {
        let psi = random_signal(12, 1);
        let g = random_signal(12, 2);
        let v = dgt(&psi, &g).unwrap();
        for n in 0..12 {
            for m in 0..12 {
                assert!((v[(n, m)] - brute_dgt(&psi, &g, n, m)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn moyal() {
        let psi = random_signal(64, 3);
        let g = random_signal(64, 4);
        let s = spectrogram(&psi, &g).unwrap();
        let lhs = s.sum() / 64.0;
        let rhs = psi.norm_sqr() * g.norm_sqr();
        assert!((lhs - rhs).abs() < 1e-10 * rhs);
    }

    #[test]
    fn window_against_itself_at_origin() {
        let g = make_gaussian_window(64).unwrap();
        let v = dgt(&g, &g).unwrap();
        assert!((v[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn covariance() {
        let len = 32;
        let psi = random_signal(len, 5);
        let g = make_gaussian_window(len).unwrap();
        let z0 = LatticePoint::new(7, 19);
        let a = spectrogram(&psi.tf_shift(z0), &g).unwrap();
        let b = spectrogram(&psi, &g).unwrap();
        for n in 0..len {
            for m in 0..len {
                let src = ((n + len - z0.n) % len, (m + len - z0.m) % len);
                assert!((a[(n, m)] - b[src]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reconstruction() {
        let psi = random_signal(64, 6);
        let g = make_gaussian_window(64).unwrap();
        let back = dgt_adjoint(&dgt(&psi, &g).unwrap(), &g).unwrap();
        let worst = (0..64).map(|t| (back[t] - psi[t]).norm()).fold(0.0, f64::max);
        assert!(worst <= 1e-12, "{worst}");
    }

    #[test]
    fn reconstruction_scales_with_window_energy() {
        let psi = random_signal(32, 7);
        let g = make_gaussian_window(32).unwrap().scaled(Complex64::new(3.0, 0.0));
        let back = dgt_adjoint(&dgt(&psi, &g).unwrap(), &g).unwrap();
        for t in 0..32 {
            assert!((back[t] - psi[t] * 9.0).norm() < 1e-11);
        }
    }

    #[test]
    fn zero_coefficients_synthesize_zero() {
        let g = make_gaussian_window(16).unwrap();
        let out = dgt_adjoint(&ComplexMap::filled(16, Complex64::new(0.0, 0.0)), &g).unwrap();
        assert_eq!(out.norm(), 0.0);
        assert_eq!(spectrogram(&Signal::zeros(16), &g).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn shifted_window_spectrogram_peaks_at_shift() {
        let len = 48;
        let g = make_gaussian_window(len).unwrap();
        let z0 = LatticePoint::new(10, 37);
        let s = spectrogram(&g.tf_shift(z0), &g).unwrap();
        assert!((s[(z0.n, z0.m)] - 1.0).abs() < 1e-12);
        assert!(s.as_slice().iter().all(|&v| v <= 1.0 + 1e-12));
    }

    #[test]
    fn standard_basis_tiles_the_plane() {
        let len = 32;
        let phi = make_gaussian_window(len).unwrap();
        let mut total = RealMap::zeros(len);
        for k in 0..len {
            total.add_scaled(&spectrogram(&Signal::unit(len, k), &phi).unwrap(), 1.0);
        }
        assert!(total.as_slice().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn linear_in_signal_conjugate_linear_in_window() {
        let len = 16;
        let (a, b) = (random_signal(len, 8), random_signal(len, 9));
        let g = random_signal(len, 10);
        let alpha = Complex64::new(0.3, -1.2);
        let combo = Signal::new(
            (0..len).map(|t| a[t] * alpha + b[t]).collect(),
        )
        .unwrap();
        let lhs = dgt(&combo, &g).unwrap();
        let va = dgt(&a, &g).unwrap();
        let vb = dgt(&b, &g).unwrap();
        for (i, v) in lhs.as_slice().iter().enumerate() {
            assert!((v - (va.as_slice()[i] * alpha + vb.as_slice()[i])).norm() < 1e-12);
        }
        let scaled = dgt(&a, &g.scaled(alpha)).unwrap();
        for (i, v) in scaled.as_slice().iter().enumerate() {
            assert!((v - va.as_slice()[i] * alpha.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn gabor_projection_is_idempotent() {
        let len = 16;
        let g = make_gaussian_window(len).unwrap();
        // arbitrary coefficients, not in the range of the transform
        let mut state = 11u64;
        let coeffs = ComplexMap::from_fn(len, |_, _| {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            Complex64::new((state >> 40) as f64 / 1e7, (state >> 20 & 0xffff) as f64 / 1e4)
        });
        let once = dgt(&dgt_adjoint(&coeffs, &g).unwrap(), &g).unwrap();
        let twice = dgt(&dgt_adjoint(&once, &g).unwrap(), &g).unwrap();
        for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(dgt(&Signal::zeros(8), &Signal::zeros(9)).is_err());
    }
}
