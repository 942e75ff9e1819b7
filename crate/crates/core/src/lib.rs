//! Achievable sum rate of UAV-relayed multi-way NOMA networks with residual
//! hardware impairments.
//!
//! `M` ground users exchange messages through an amplify-and-forward UAV
//! relay in two slots: all users transmit a power-domain superposition to the
//! relay, the relay rebroadcasts it, and every user decodes the weaker users'
//! messages by successive interference cancellation. The crate provides
//!
//! * [`channel`]: ordered Gamma fading gains, their closed-form moments and a
//!   quadrature oracle,
//! * [`signal`]: the instantaneous SINR under transceiver distortion,
//! * [`rate`]: closed-form and high-SNR sum rates, slope and offset estimates,
//! * [`montecarlo`]: a seeded, thread-count-independent simulator,
//! * [`baseline`]: the OMA comparison,
//! * [`placement`]: UAV position sweeps,
//! * [`experiment`]: config files, presets and CSV output.

pub mod baseline;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod montecarlo;
pub mod placement;
pub mod rate;
pub mod signal;

pub use baseline::{asr_oma, time_slots, OmaScheme};
pub use channel::{
    moment_oracle, omega_moment, order_stat_moments, psi_moment, sample_channel_gains, ChannelRealization,
    FadingParams, OrderStatMoments,
};
pub use error::{Error, Result};
pub use montecarlo::{derive_trial_stream, simulate_asr, McEstimate, TrialConfig};
pub use placement::{distances, sweep_grid, Engine, Geometry, GridSpec, Scheme, Surface};
pub use rate::{
    asr, asr_asymptotic, high_snr_offset, high_snr_slope, rate_pair_ideal, rate_pair_nonideal, AsrResult, Condition,
    HighSnrOffset, Provenance, RateTerms,
};
pub use signal::{amplification_gain, sinr_instantaneous, ImpairmentProfile, NetworkConfig, SinrTerms};
