//! Posterior inference of the gate's mode transform and noise rates from
//! coincidence counts.
//!
//! The parameters are the 16 squared moduli of the 4x4 transform (uniform
//! on the simplex of fixed Hilbert-Schmidt norm), 10 of its 16 phases (the
//! other six fix the gauge) and the rates `mu, eta_a, eta_b`; 28 free
//! coordinates in all. The posterior is explored with a univariate slice
//! sampler, optionally along the principal axes of the burn-in covariance.

mod params;
mod posterior;
mod slice;
mod summary;

pub use params::{
    log_density_packed, log_posterior, log_prior, log_prior_packed, pack, unpack, ParamVector, PriorSpec, DIM,
    FIXED_PHASE_SLOTS, FREE_PHASE_SLOTS, PHASE_COORDS,
};
pub use posterior::{infer, initial_point, InferenceConfig, PosteriorChain};
pub use slice::{
    autocorrelation, effective_sample_size, slice_sample, split_half_z, Chain, Diagnostics, SliceBasis,
    SliceConfig, Thinning,
};
pub use summary::{pathway_probabilities, summarize, Estimate, PosteriorSummary};
