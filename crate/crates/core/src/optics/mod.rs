//! Frequency-bin mode transforms: phase modulators, pulse shapers, their
//! cascades, and the two-photon gate metrics derived from them.

mod element;
mod gate;
mod grid;
mod transform;

pub use element::{CircuitSpec, Element, EomElement, ShaperElement};
pub use gate::{
    cnot, fidelity, gate_metrics, metrics_adaptive, separable_phase_gate, success_probability,
    two_photon_map, GateMetrics, PumpLabels, QubitModeMap, TwoPhotonTransform, COINCIDENCE_DIM,
};
pub use grid::{FrequencyGrid, DEFAULT_CENTER_HZ, DEFAULT_GUARD_BINS, DEFAULT_SPACING_HZ};
pub use transform::{
    compose, compose_transforms, element_transform, eom_coefficients, eom_transform,
    project_computational, projected_transform, ps_transform, ModeTransform,
};
pub(crate) use transform::apply_toeplitz;
