//! Classical-light characterization of the single-photon mode transform.
//!
//! Single-line probes give `|V[n, u]|^2` directly. Sending two lines and
//! scanning their relative phase produces a fringe on every output bin whose
//! phase is the difference of two entries in that row; phases are chained
//! outward from a set of gauge-fixed slots. Rows and columns that couple too
//! weakly to produce a visible fringe stay undetermined.

mod probe;
mod reconstruct;

pub use probe::{
    fit_fringe, probe_phase_scan, probe_phase_scan_with, probe_single_line, probe_single_line_with, Fringe,
    ProbeResult, ProbeSettings,
};
pub use reconstruct::{
    acquire, characterize, designed_gauge, embed_matrix, tabulated_reconstruction, reconstruct, reconstruct_single,
    Acquisition, CharacterizationConfig, FixedPhase, InferredMetrics, PairScan, PhaseEntry, PhaseStatus,
    ReconstructedMatrix, SingleReconstruction,
};
