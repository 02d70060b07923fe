//! Photon-counting model for a two-photon gate experiment.
//!
//! A photon pair enters as `|1_u 1_v>`; detector A watches one control bin,
//! detector B one target bin. Per frame of length `tau`:
//!
//! - singles `p_A = mu eta_A (|V_mu|^2 + |V_mv|^2) + d_A` (and the exact form
//!   with double-occupancy terms),
//! - coincidences `p_AB = mu eta_A eta_B |V_mu V_nv + V_mv V_nu|^2 + 2 p_A p_B`,
//!
//! and the counts of one configuration follow a four-category multinomial
//! (A only, B only, both, none) over `M` frames.

mod dataset;
mod model;
mod simulate;

pub use dataset::{
    ConfigCounts, CountDataset, CountRecord, DatasetMetadata, ExperimentConfig, COUNTS_FORMAT_VERSION,
};
pub use model::{
    coincidence_prob, config_log_likelihood, config_probs, dataset_log_likelihood, per_pair_double,
    per_pair_joint, per_pair_marginal, per_pair_marginal_direct, singles_probs, ConfigProbs, NoiseParams,
    SinglesForm, PROB_FLOOR,
};
pub use simulate::{correct_output_fraction, simulate_dataset};
