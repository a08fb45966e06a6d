//! Estimators built from the eigenpairs of the operator.

use rayon::prelude::*;

use super::{Method, RecoveryResult};
use crate::dgt::spectrogram;
use crate::error::{check_len, Error, Result};
use crate::phase_map::{tree_sum, RealMap};
use crate::signal::Signal;
use crate::spectrum::Spectrum;
use crate::wigner::{cohen_q, wigner};
use crate::window::WindowSystem;

fn check_count(spec: &Spectrum, count: usize) -> Result<()> {
    if count == 0 || count > spec.len() {
        return Err(Error::InvalidCount(format!(
            "eigenpair count must be in 1..={}, got {count}",
            spec.len()
        )));
    }
    Ok(())
}

fn weighted_sum<F>(spec: &Spectrum, count: usize, term: F) -> Result<RealMap>
where
    F: Fn(f64, &Signal) -> Result<RealMap> + Sync,
{
    let len = spec.eigenvectors().first().map_or(0, Signal::len);
    let maps = spec.eigenvalues()[..count]
        .par_iter()
        .zip(&spec.eigenvectors()[..count])
        .map(|(&lambda, h)| {
            let mut m = term(lambda, h)?;
            m.scale(lambda);
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tree_sum(maps, len))
}

/// `theta[z] = sum_m lambda_m^2 |V_phi h_m[z]|^2`, the limit of the average
/// observed spectrogram normalized by the noise power.
pub fn theta(spec: &Spectrum, phi: &Signal) -> Result<RealMap> {
    if let Some(h) = spec.eigenvectors().first() {
        check_len(h.len(), phi.len())?;
    }
    let len = phi.len();
    let maps = spec
        .pairs()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(lambda, h)| {
            let mut m = spectrogram(h, phi)?;
            m.scale(lambda * lambda);
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(tree_sum(maps, len))
}

/// Weighted accumulated Cohen's class `sum_{m < count} lambda_m Q_T(h_m)`
/// over the `count` largest-magnitude eigenpairs.
pub fn was_recover(spec: &Spectrum, system: &WindowSystem, count: usize) -> Result<RecoveryResult> {
    check_count(spec, count)?;
    check_len(spec.eigenvectors()[0].len(), system.signal_len())?;
    let estimate = weighted_sum(spec, count, |_, h| cohen_q(h, system))?;
    Ok(RecoveryResult::new(estimate, Method::Was)
        .with("N", count)
        .with("eigenvalue_tail_mass", spec.tail_mass(count))
        .with("reconstruction_rank", system.terms().len()))
}

/// Weighted accumulated Wigner distribution `sum_{m < count} lambda_m W(h_m)`.
///
/// The sum is returned as is, in absolute time coordinates, so that with
/// all eigenpairs it equals `(1/L) f (*) sum_k s_k W(g_k)` exactly. Use
/// [`align_wigner_estimate`] to move it onto the symbol lattice.
pub fn wawd_recover(spec: &Spectrum, count: usize) -> Result<RecoveryResult> {
    check_count(spec, count)?;
    let estimate = weighted_sum(spec, count, |_, h| Ok(wigner(h)))?;
    Ok(RecoveryResult::new(estimate, Method::Wawd)
        .with("N", count)
        .with("eigenvalue_tail_mass", spec.tail_mass(count)))
}

/// Shifts a Wigner-domain estimate by the window center so it lines up with
/// lattice coordinates, which are relative to the window position.
pub fn align_wigner_estimate(estimate: &RealMap, window_center: usize) -> RealMap {
    let l = estimate.size();
    estimate.shifted(l - window_center % l, 0)
}
