//! Discrete Wigner distribution and finite-rank Cohen's class distributions.
//!
//! The Wigner kernel is `exp(-4 pi i m k / L)`, i.e. lag `k` is read as a
//! half-integer time offset folded onto the integer frequency grid:
//!
//! ```text
//! W[n][m] = sum_k psi[n + k] conj(psi[n - k]) exp(-4 pi i m k / L)
//! ```
//!
//! For odd `L` the marginal `sum_m W[n][m] = L |psi[n]|^2` is exact. For
//! even `L` the lag `L/2` also survives the frequency sum and every signal
//! picks up aliased copies at half-period offsets; see
//! [`wigner_is_alias_free`].

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dgt::spectrogram;
use crate::error::Result;
use crate::fft::Plans;
use crate::phase_map::RealMap;
use crate::signal::Signal;
use crate::window::WindowSystem;

/// Whether [`wigner`] is free of half-period aliasing at this grid size.
pub fn wigner_is_alias_free(len: usize) -> bool {
    len % 2 == 1
}

/// Real Wigner distribution of `psi`.
pub fn wigner(psi: &Signal) -> RealMap {
    wigner_with_residual(psi).0
}

/// Wigner distribution plus the largest imaginary part discarded from it.
pub fn wigner_with_residual(psi: &Signal) -> (RealMap, f64) {
    let len = psi.len();
    let x = psi.as_slice();
    let plans = Plans::new(len);
    let rows: Vec<(Vec<f64>, f64)> = (0..len)
        .into_par_iter()
        .map(|n| {
            let mut lag: Vec<Complex64> = (0..len)
                .map(|k| x[(n + k) % len] * x[(n + len - k) % len].conj())
                .collect();
            plans.forward.process(&mut lag);
            let mut residual: f64 = 0.0;
            let row = (0..len)
                .map(|m| {
                    let v = lag[2 * m % len];
                    residual = residual.max(v.im.abs());
                    v.re
                })
                .collect();
            (row, residual)
        })
        .collect();
    let residual = rows.iter().fold(0.0f64, |acc, (_, r)| acc.max(*r));
    let data = rows.into_iter().flat_map(|(row, _)| row).collect();
    (
        RealMap::from_vec(len, data).expect("len * len entries"),
        residual,
    )
}

/// `Q_T(psi) = sum_k t_k |V_{tau_k} psi|^2`.
pub fn cohen_q(psi: &Signal, system: &WindowSystem) -> Result<RealMap> {
    let mut out = RealMap::zeros(psi.len());
    for (weight, window) in system.terms() {
        out.add_scaled(&spectrogram(psi, window)?, *weight);
    }
    Ok(out)
}
