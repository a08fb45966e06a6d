//! Blurring kernels and FFT deconvolution.

use num_complex::Complex64;

use super::projection::gp_recover;
use super::spectral::{was_recover, wawd_recover};
use crate::dgt::spectrogram;
use crate::error::{check_len, Error, Result};
use crate::operator::LocOperator;
use crate::phase_map::RealMap;
use crate::signal::Signal;
use crate::spectrum::eigendecompose;
use crate::window::WindowSystem;

/// Which estimator a measured kernel is read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasuredPipeline {
    Gp,
    Was,
    /// Raw weighted accumulated Wigner sum, in absolute time coordinates.
    Wawd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    /// `k[z] = sum_j s_j (1/L) |V_phi g_j[z]|^2`.
    Analytic,
    /// Response of an estimator to the unit point symbol at the origin.
    Measured(MeasuredPipeline),
}

/// The kernel `k` such that the estimate of a symbol `f` is `f (*) k`.
///
/// The measured kernel uses the symbol with value 1 at `(0, 0)` and zeros
/// elsewhere; under the `1/L` operator normalization its response already
/// has unit mass.
pub fn impulse_kernel(system: &WindowSystem, phi: &Signal, mode: KernelMode) -> Result<RealMap> {
    let len = system.signal_len();
    check_len(len, phi.len())?;
    match mode {
        KernelMode::Analytic => {
            let mut kernel = RealMap::zeros(len);
            for (weight, g) in system.terms() {
                kernel.add_scaled(&spectrogram(g, phi)?, weight / len as f64);
            }
            Ok(kernel)
        }
        KernelMode::Measured(pipeline) => {
            let mut delta = RealMap::zeros(len);
            delta[(0, 0)] = 1.0;
            let op = LocOperator::build(&delta, system)?;
            let result = match pipeline {
                MeasuredPipeline::Gp => gp_recover(&op, phi, None)?,
                MeasuredPipeline::Was => {
                    let spec = eigendecompose(&op)?;
                    was_recover(&spec, &WindowSystem::single(phi.clone())?, len)?
                }
                MeasuredPipeline::Wawd => wawd_recover(&eigendecompose(&op)?, len)?,
            };
            Ok(result.estimate)
        }
    }
}

/// Inverse filter `F^-1(F(est) / F(kernel))`, keeping only frequencies where
/// `|F(kernel)| > eps * max |F(kernel)|` and zeroing the rest.
pub fn deconvolve(estimate: &RealMap, kernel: &RealMap, eps: f64) -> Result<RealMap> {
    deconvolve_with_residual(estimate, kernel, eps).map(|(out, _)| out)
}

/// [`deconvolve`] plus the largest imaginary part discarded from the output.
pub fn deconvolve_with_residual(estimate: &RealMap, kernel: &RealMap, eps: f64) -> Result<(RealMap, f64)> {
    check_len(estimate.size(), kernel.size())?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1), got {eps}")));
    }
    if !estimate.is_finite() {
        return Err(Error::NonFinite("estimate (region-restricted estimates cannot be deconvolved)"));
    }
    if !kernel.is_finite() {
        return Err(Error::NonFinite("kernel"));
    }
    let kernel_hat = kernel.fft2();
    let peak = kernel_hat
        .as_slice()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.norm()));
    if peak == 0.0 {
        return Err(Error::DegenerateKernel("kernel spectrum is identically zero".into()));
    }
    let cutoff = eps * peak;
    let mut ratio = estimate.fft2();
    for (v, k) in ratio.as_mut_slice().iter_mut().zip(kernel_hat.as_slice()) {
        *v = if k.norm() > cutoff {
            *v / k
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let out = ratio.ifft2();
    Ok((out.re(), out.max_imag()))
}
