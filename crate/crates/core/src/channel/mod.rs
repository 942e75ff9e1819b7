//! Ordered Nakagami-m fading gains with distance-based path loss.
//!
//! The squared envelope `|h|²` of every user is Gamma distributed with an
//! integer (Erlang) shape. Users are indexed by ascending gain, so the `i`-th
//! user sees the `i`-th order statistic of `M` i.i.d. draws, attenuated by
//! `1 / (1 + d_i^ν)` where `d_i` is the distance assigned to that position.

mod moments;
mod oracle;
mod sampling;

pub use moments::{omega_moment, order_stat_moments, psi_moment};
pub use oracle::moment_oracle;
pub use sampling::{sample_channel_gains, sample_gamma};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Large-scale and small-scale fading parameters shared by all users.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FadingParams {
    /// Gamma shape of `|h|²`. Must be a positive integer.
    pub alpha: u32,
    /// Gamma scale of `|h|²`.
    pub beta: f64,
    /// Path-loss exponent.
    pub nu: f64,
    /// Relay distance of each order position, weakest user first.
    pub distances: Vec<f64>,
}

impl FadingParams {
    /// Builds parameters from a possibly non-integer shape, rejecting anything
    /// that is not a positive integer.
    pub fn new(alpha: f64, beta: f64, nu: f64, distances: Vec<f64>) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 1.0) {
            return Err(Error::Config(format!("fading.alpha must be >= 1, got {alpha}")));
        }
        if alpha.fract() != 0.0 {
            return Err(Error::UnsupportedParameter(format!(
                "fading.alpha = {alpha} is not an integer; only Erlang shapes are supported"
            )));
        }
        if alpha > u32::MAX as f64 {
            return Err(Error::Config(format!("fading.alpha = {alpha} is out of range")));
        }
        let params = FadingParams { alpha: alpha as u32, beta, nu, distances };
        params.validate(params.distances.len())?;
        Ok(params)
    }

    /// Homogeneous placement: every user at the same relay distance.
    pub fn uniform(alpha: u32, beta: f64, nu: f64, distance: f64, users: usize) -> Self {
        FadingParams { alpha, beta, nu, distances: vec![distance; users] }
    }

    pub fn validate(&self, users: usize) -> Result<()> {
        if self.alpha < 1 {
            return Err(Error::Config("fading.alpha must be >= 1".into()));
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::Config(format!("fading.beta must be > 0, got {}", self.beta)));
        }
        if !(self.nu.is_finite() && self.nu >= 0.0) {
            return Err(Error::Config(format!("fading.nu must be >= 0, got {}", self.nu)));
        }
        if self.distances.len() != users {
            return Err(Error::Config(format!(
                "fading.distances has {} entries but the network has {users} users",
                self.distances.len()
            )));
        }
        if let Some(d) = self.distances.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::Config(format!("fading.distances must be finite and >= 0, got {d}")));
        }
        Ok(())
    }

    /// Linear attenuation `1 / (1 + d^ν)` of order position `i` (0-based).
    pub fn path_loss(&self, i: usize) -> f64 {
        1.0 / (1.0 + self.distances[i].powf(self.nu))
    }
}

/// One draw of the `M` instantaneous channel power gains `ρ_i = |g_i|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub rho: Vec<f64>,
    /// Whether `rho` is nondecreasing. Always true when distances do not
    /// increase with the order position.
    pub ordered: bool,
}

impl ChannelRealization {
    pub fn new(rho: Vec<f64>) -> Result<Self> {
        if let Some(r) = rho.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::Argument(format!("channel gains must be finite and >= 0, got {r}")));
        }
        let ordered = rho.windows(2).all(|w| w[0] <= w[1]);
        Ok(ChannelRealization { rho, ordered })
    }

    pub fn users(&self) -> usize {
        self.rho.len()
    }
}

/// First and second moments of the ordered channel gains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderStatMoments {
    pub psi: Vec<f64>,
    pub omega: Vec<f64>,
}

impl OrderStatMoments {
    pub fn users(&self) -> usize {
        self.psi.len()
    }
}

pub(crate) fn check_order_index(users: usize, i: usize) -> Result<()> {
    if users < 1 {
        return Err(Error::Argument("user count must be >= 1".into()));
    }
    if i < 1 || i > users {
        return Err(Error::Argument(format!("order index {i} outside 1..={users}")));
    }
    Ok(())
}
