//! Sample-based statistics: the two-halves stationarity test, degree-weight
//! estimation with decay fitting, linear cross-entropy fidelity, and a
//! uniformity check for p-values.

mod decay;
mod degree;
mod ks;
mod stationarity;
mod xeb;

pub use decay::{
    decay_fit, decay_fit_estimates, decay_fit_pooled, DecayFit, FLOOR_SIGMAS, WEIGHT_FLOOR,
};
pub use degree::{
    estimate_degree_profile, DegreeProfileEstimate, Estimator, JACKKNIFE_GROUPS,
    MIN_ESTIMATE_SAMPLES,
};
pub use ks::{kolmogorov_q, ks_uniformity, KsResult};
pub use stationarity::{
    sequential_half_distance, sequential_half_distance_named, stationarity_test, Metric,
    StationarityReport, DEFAULT_SPLITS, MIN_SPLITS, MIN_TEST_SAMPLES,
};
pub use xeb::{xeb_estimate, xeb_fidelity, XebEstimate};
