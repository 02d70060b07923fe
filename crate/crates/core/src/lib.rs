//! Design, simulation and characterization of frequency-bin two-qubit gates.
//!
//! A frequency-bin qubit lives in two optical carriers `omega_n = omega_0 + n d_omega`.
//! Cascades of sinusoidally driven phase modulators (EOMs) and line-by-line
//! pulse shapers (PSs) mix those bins linearly, and with two photons the
//! resulting interference implements a coincidence-basis CNOT.
//!
//! The crate is organized by workflow stage:
//!
//! - [`optics`]: mode transforms of EOM/PS cascades, the induced two-photon
//!   transform and its success probability and fidelity.
//! - [`design`]: penalty/quasi-Newton multistart search for cascades that
//!   maximize success under a fidelity floor, plus mode-placement search.
//! - [`counting`]: photon-counting model with multipair and dark-count noise,
//!   likelihoods, and a seeded count simulator.
//! - [`bayes`]: slice-sampling posterior inference of the mode transform and
//!   noise parameters from count data.
//! - [`coherent`]: classical-light probe simulation and matrix reconstruction.
//! - [`app`]: file-based orchestration behind the `freqgate` binary.
//!
//! See `examples/` for one runnable program per capability.

pub mod app;
pub mod bayes;
pub mod bessel;
pub mod coherent;
pub mod counting;
pub mod design;
pub mod error;
pub mod linalg;
pub mod optics;
pub mod reference;

pub use error::{Error, Result};
pub use linalg::Mat4;
