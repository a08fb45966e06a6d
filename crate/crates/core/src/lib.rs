//! Finite-dimensional time-frequency localization operators on the cyclic
//! group `Z_L` and recovery of their symbols.
//!
//! Phase space is the discrete torus `Z_L x Z_L`. A lattice point `(n, m)`
//! is a time shift `n` and a frequency bin `m`. With the synthesis
//! normalization used throughout, the full-lattice Gabor transform is a tight
//! frame with bound `L`, so a symbol `f == 1` produces the identity operator.
//!
//! The recovery methods live in [`estimators`]:
//!
//! - white-noise probing ([`estimators::wn_recover`])
//! - weighted accumulated spectrogram / Cohen's class ([`estimators::was_recover`])
//! - weighted accumulated Wigner distribution ([`estimators::wawd_recover`])
//! - plane tiling ([`estimators::pt_recover`])
//! - Gabor projection ([`estimators::gp_recover`])

pub mod bench;
pub mod dgt;
pub mod error;
pub mod estimators;
pub mod io;
pub mod metrics;
pub mod operator;
pub mod phase_map;
pub mod rng;
pub mod signal;
pub mod spectrum;
pub mod symbols;
pub mod wigner;
pub mod window;

mod fft;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use operator::LocOperator;
pub use phase_map::{ComplexMap, PhaseMap, RealMap, ValueRange};
pub use signal::{LatticePoint, Signal};
pub use spectrum::Spectrum;
pub use window::WindowSystem;
