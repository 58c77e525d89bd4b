//! Geometric phases between partially distinguishable photons in cyclic
//! multiphoton interferometers, and the CHSH correlations they produce.
//!
//! - [`states`]: internal states, Bloch vectors, geometric factors and
//!   Pancharatnam phases.
//! - [`cyclic`]: closed-form coincidence statistics and parity correlators of
//!   the cyclic interferometer.
//! - [`oracle`]: permutation-sum output probabilities for any interferometer.
//! - [`bell`]: trajectory construction, CHSH values and the four-photon
//!   optimization.
//! - [`experiment`]: JSON experiment descriptions and CSV formatting.

pub mod bell;
pub mod cyclic;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod permutation;
pub mod simplex;
pub mod states;

pub use error::{Error, Result};
