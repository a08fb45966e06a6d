//! Symbol recovery from a localization operator.
//!
//! Every estimator returns a [`RecoveryResult`] whose `estimate` lives on the
//! same lattice as the symbol. White noise and plane tiling estimate `f^2`;
//! the others estimate `f` blurred by a unit-mass kernel.

mod deconv;
mod projection;
mod spectral;
mod tiling;
mod white_noise;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Error;
use crate::phase_map::RealMap;

pub use deconv::{deconvolve, deconvolve_with_residual, impulse_kernel, KernelMode, MeasuredPipeline};
pub use projection::{gp_point, gp_recover, Region};
pub use spectral::{align_wigner_estimate, theta, was_recover, wawd_recover};
pub use tiling::{pt_recover, BasisKind};
pub use white_noise::{average_observed_spectrogram, wn_recover, wn_recover_with, ObservedSpectrogram};

/// The recovery methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// White-noise probing.
    Wn,
    /// Weighted accumulated spectrogram (Cohen's class).
    Was,
    /// Weighted accumulated Wigner distribution.
    Wawd,
    /// Plane tiling.
    Pt,
    /// Gabor projection.
    Gp,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Wn, Method::Was, Method::Wawd, Method::Pt, Method::Gp];

    /// Whether the method estimates `f^2` rather than `f`.
    pub fn estimates_square(self) -> bool {
        matches!(self, Method::Wn | Method::Pt)
    }

    pub fn label(self) -> &'static str {
        match self {
            Method::Wn => "WN",
            Method::Was => "WAS",
            Method::Wawd => "WAWD",
            Method::Pt => "PT",
            Method::Gp => "GP",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label().to_lowercase())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "wn" => Ok(Method::Wn),
            "was" => Ok(Method::Was),
            "wawd" => Ok(Method::Wawd),
            "pt" => Ok(Method::Pt),
            "gp" => Ok(Method::Gp),
            _ => Err(Error::Parse(format!("unknown method '{s}'"))),
        }
    }
}

/// An estimate with the parameters that produced it.
#[derive(Clone, Debug)]
pub struct RecoveryResult {
    pub estimate: RealMap,
    pub method: Method,
    pub meta: BTreeMap<String, Value>,
}

impl RecoveryResult {
    pub(crate) fn new(estimate: RealMap, method: Method) -> Self {
        RecoveryResult {
            estimate,
            method,
            meta: BTreeMap::new(),
        }
    }

    pub(crate) fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }
}
