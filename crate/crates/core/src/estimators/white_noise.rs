//! Average observed spectrogram of operator-filtered white noise.

use rayon::prelude::*;

use super::{Method, RecoveryResult};
use crate::dgt::dgt;
use crate::error::{check_len, Error, Result};
use crate::operator::LocOperator;
use crate::phase_map::{tree_sum, RealMap};
use crate::rng::{white_noise, NoiseKind};
use crate::signal::Signal;

/// Realizations processed per parallel batch. Fixed so that the summation
/// order never depends on the thread count.
const BATCH: usize = 64;

/// `rho` together with the noise power read off the probes.
#[derive(Clone, Debug)]
pub struct ObservedSpectrogram {
    /// `rho[z] = (1/K) sum_k |V_phi(A N_k)[z]|^2`.
    pub rho: RealMap,
    /// Mean of `|V_phi N_k[z]|^2` over all `k` and `z`.
    pub sigma2_hat: f64,
}

/// Probes `op` with `count` white-noise realizations drawn from `(seed, k)` substreams.
pub fn average_observed_spectrogram(
    op: &LocOperator,
    phi: &Signal,
    count: usize,
    sigma2: f64,
    seed: u64,
    kind: NoiseKind,
) -> Result<ObservedSpectrogram> {
    let len = op.size();
    check_len(len, phi.len())?;
    if count == 0 {
        return Err(Error::InvalidCount("white noise needs K >= 1 realizations".into()));
    }
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma^2 must be positive, got {sigma2}")));
    }

    let mut rho = RealMap::zeros(len);
    let mut noise_energy = 0.0;
    for start in (0..count).step_by(BATCH) {
        let end = (start + BATCH).min(count);
        let batch: Vec<(RealMap, f64)> = (start..end)
            .into_par_iter()
            .map(|k| -> Result<(RealMap, f64)> {
                let noise = white_noise(len, sigma2, seed, k as u64, kind);
                let observed = dgt(&op.apply(&noise)?, phi)?.norm_sqr();
                let energy = dgt(&noise, phi)?.norm_sqr().sum();
                Ok((observed, energy))
            })
            .collect::<Result<_>>()?;
        let (maps, energies): (Vec<RealMap>, Vec<f64>) = batch.into_iter().unzip();
        rho.add_scaled(&tree_sum(maps, len), 1.0);
        noise_energy += energies.iter().sum::<f64>();
    }
    rho.scale(1.0 / count as f64);
    let sigma2_hat = noise_energy / (count * len * len) as f64;
    Ok(ObservedSpectrogram { rho, sigma2_hat })
}

/// White-noise recovery with complex noise; the estimate is `rho / sigma2_hat`,
/// which targets `f^2`.
pub fn wn_recover(
    op: &LocOperator,
    phi: &Signal,
    count: usize,
    sigma2: f64,
    seed: u64,
) -> Result<RecoveryResult> {
    wn_recover_with(op, phi, count, sigma2, seed, NoiseKind::Complex)
}

pub fn wn_recover_with(
    op: &LocOperator,
    phi: &Signal,
    count: usize,
    sigma2: f64,
    seed: u64,
    kind: NoiseKind,
) -> Result<RecoveryResult> {
    let ObservedSpectrogram { rho, sigma2_hat } =
        average_observed_spectrogram(op, phi, count, sigma2, seed, kind)?;
    let mut estimate = rho;
    estimate.scale(1.0 / sigma2_hat);
    Ok(RecoveryResult::new(estimate, Method::Wn)
        .with("K", count)
        .with("sigma2", sigma2)
        .with("sigma2_hat", sigma2_hat)
        .with("seed", seed)
        .with("noise", format!("{kind:?}").to_lowercase())
        .with("target", "f^2"))
}
