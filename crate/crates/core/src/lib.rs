//! Desk-scale toolkit for noisy random-circuit sampling.
//!
//! * [`outcome`]: bitstrings, ordered sample streams, dense distributions and distances.
//! * [`boolsim`]: NOT/AND Boolean circuits over deterministic and probabilistic bits.
//! * [`qsim`]: grid circuits with state-vector, density-matrix and trajectory backends.
//! * [`noise`]: gate noise, the outcome bit-flip channel and drifting schedules.
//! * [`walsh`]: Fourier–Walsh spectra, degree profiles and noise stability.
//! * [`chaostats`]: stationarity testing, degree-weight estimation, decay fits and XEB.
//! * [`board`]: red/blue boards with even-parity 2×2 windows.
//! * [`io`]: file formats, run configuration, reports and replayable pipelines.

pub mod board;
pub mod boolsim;
pub mod chaostats;
pub mod error;
pub mod io;
pub mod noise;
pub mod outcome;
pub mod qsim;
pub mod rng;
pub mod walsh;

pub use error::{Error, Result};
pub use outcome::{
    empirical_distribution, l2_distance, tv_distance, BitString, OutcomeDistribution, SampleMeta,
    SampleSet,
};

/// Hard cap on bitstring length and qubit count.
pub const MAX_BITS: usize = 24;
