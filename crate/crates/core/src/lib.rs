//! Discrete-time coined quantum walks on the `n`-dimensional hypercube.
//!
//! - [`walk`]: walker state, Grover coin and the one-step evolution.
//! - [`spectral`]: Fourier eigensystem and the limiting distribution `π`.
//! - [`metrics`]: total variation distance and mixing times.
//! - [`decoherence`]: broken-link noise and Monte Carlo ensembles.
//! - [`cli`]: experiment configuration and figure-data generation.

pub mod cli;
pub mod decoherence;
pub mod distribution;
pub mod error;
pub mod metrics;
pub mod spectral;
pub mod walk;

pub use decoherence::{
    decoherent_mixing_time, run_decoherent, sample_mask, EdgeMask, Ensemble, EnsembleAccumulator, EnsembleConfig,
    InitialCondition,
};
pub use distribution::Distribution;
pub use error::{Result, WalkError};
pub use metrics::{
    aharonov_bound, average_mixing_time, instantaneous_mixing_time, time_averaged, tvd, MixingResult, ReferenceKind,
};
pub use spectral::{
    alpha, hamming_profile, omega, pi_at_origin, stationary_pi_closed, stationary_pi_spectral, walsh_hadamard,
    SpectralData,
};
pub use walk::{
    grover_coin, initial_state_symmetric, initial_state_uniform_full, position_distribution, step, CoinMatrix, Walk,
    WalkerState,
};
