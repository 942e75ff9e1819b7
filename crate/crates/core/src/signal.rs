//! Two-phase amplify-and-forward signal model with residual hardware
//! impairments.
//!
//! In the multiple-access phase every user transmits its superposed share
//! `a_i P` to the relay; in the broadcast phase the relay scales the received
//! mixture by `G` and rebroadcasts. Distortion at each transceiver stage is an
//! additive Gaussian term whose variance is `κ²` times the signal power at
//! that stage. User indices are 1-based and ordered weakest first.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Distortion levels of the four transceiver stages.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpairmentProfile {
    /// User transmitter.
    pub kappa_ut: f64,
    /// User receiver.
    pub kappa_ur: f64,
    /// Relay transmitter.
    pub kappa_rt: f64,
    /// Relay receiver.
    pub kappa_rr: f64,
}

impl ImpairmentProfile {
    pub const IDEAL: ImpairmentProfile = ImpairmentProfile { kappa_ut: 0.0, kappa_ur: 0.0, kappa_rt: 0.0, kappa_rr: 0.0 };

    pub fn uniform(kappa: f64) -> Self {
        ImpairmentProfile { kappa_ut: kappa, kappa_ur: kappa, kappa_rt: kappa, kappa_rr: kappa }
    }

    /// Distortion on the transmit chains only (user and relay transmitters).
    pub fn transmit_only(kappa: f64) -> Self {
        ImpairmentProfile { kappa_ut: kappa, kappa_rt: kappa, ..Self::IDEAL }
    }

    /// Distortion on the receive chains only (relay and user receivers).
    pub fn receive_only(kappa: f64) -> Self {
        ImpairmentProfile { kappa_ur: kappa, kappa_rr: kappa, ..Self::IDEAL }
    }

    pub fn is_ideal(&self) -> bool {
        self.kappa_ut == 0.0 && self.kappa_ur == 0.0 && self.kappa_rt == 0.0 && self.kappa_rr == 0.0
    }

    pub fn validate(&self) -> Result<()> {
        for (name, k) in [
            ("kappa_ut", self.kappa_ut),
            ("kappa_ur", self.kappa_ur),
            ("kappa_rt", self.kappa_rt),
            ("kappa_rr", self.kappa_rr),
        ] {
            if !(0.0..1.0).contains(&k) {
                return Err(Error::Config(format!("impairments.{name} must lie in [0, 1), got {k}")));
            }
        }
        Ok(())
    }
}

/// Network-wide power and noise settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Power-allocation coefficients, weakest user first.
    pub power_allocation: Vec<f64>,
    /// User transmit SNR `r₁ = P / σ_r²` (linear).
    pub r1: f64,
    /// Relay-to-user SNR ratio, `r₂ = c · r₁`.
    pub c: f64,
    pub sigma_r2: f64,
    pub sigma_t2: f64,
}

impl NetworkConfig {
    /// Unit noise at relay and users, equal user and relay powers.
    pub fn new(power_allocation: Vec<f64>, snr_db: f64) -> Self {
        NetworkConfig { power_allocation, r1: db_to_linear(snr_db), c: 1.0, sigma_r2: 1.0, sigma_t2: 1.0 }
    }

    pub fn with_snr_db(&self, snr_db: f64) -> Self {
        NetworkConfig { r1: db_to_linear(snr_db), ..self.clone() }
    }

    pub fn users(&self) -> usize {
        self.power_allocation.len()
    }

    pub fn r2(&self) -> f64 {
        self.c * self.r1
    }

    /// Per-user maximum transmit power `P`.
    pub fn user_power(&self) -> f64 {
        self.r1 * self.sigma_r2
    }

    /// Relay transmit power `P_R`.
    pub fn relay_power(&self) -> f64 {
        self.r2() * self.sigma_t2
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.power_allocation;
        if a.len() < 2 {
            return Err(Error::Config(format!("network needs at least 2 users, got {}", a.len())));
        }
        let sum: f64 = a.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("power allocation must sum to 1, sums to {sum}")));
        }
        if a.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::Config("power allocation coefficients must be > 0".into()));
        }
        if a.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config(
                "power allocation must be strictly decreasing (weakest user gets the most power)".into(),
            ));
        }
        for (name, v) in [("r1", self.r1), ("c", self.c), ("sigma_r2", self.sigma_r2), ("sigma_t2", self.sigma_t2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("network.{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Denominator aggregates of the instantaneous SINR.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SinrTerms {
    /// Residual inter-user interference after successive decoding.
    pub theta1: f64,
    /// Distortion terms scaling with `ρ_k ρ_i`.
    pub theta2: f64,
    /// User-receiver distortion of the rebroadcast mixture.
    pub theta3: f64,
    /// Relay-noise and receive-distortion terms linear in one SNR.
    pub theta4: f64,
    /// Own-link relay transmit power plus normalized noise.
    pub theta5: f64,
}

impl SinrTerms {
    pub fn total(&self) -> f64 {
        self.theta1 + self.theta2 + self.theta3 + self.theta4 + self.theta5
    }
}

/// Relay amplification gain `G = sqrt(P_R / (Σ ρ_i a_i P (1 + κ_ut² + κ_Rr²) + σ_r²))`.
pub fn amplification_gain(realization: &ChannelRealization, cfg: &NetworkConfig, imp: &ImpairmentProfile) -> Result<f64> {
    cfg.validate()?;
    imp.validate()?;
    check_len(realization, cfg)?;
    let distortion = 1.0 + imp.kappa_ut.powi(2) + imp.kappa_rr.powi(2);
    let received: f64 = realization
        .rho
        .iter()
        .zip(&cfg.power_allocation)
        .map(|(rho, a)| rho * a * cfg.user_power() * distortion)
        .sum();
    Ok((cfg.relay_power() / (received + cfg.sigma_r2)).sqrt())
}

/// Assembles the SINR aggregates for user `k` decoding user `n` (1-based,
/// `n < k`).
pub fn sinr_terms(
    realization: &ChannelRealization,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    k: usize,
    n: usize,
) -> Result<SinrTerms> {
    cfg.validate()?;
    imp.validate()?;
    check_len(realization, cfg)?;
    check_pair(cfg.users(), k, n)?;
    Ok(terms(&realization.rho, &cfg.power_allocation, cfg.r1, cfg.r2(), imp, k - 1, n - 1))
}

/// Instantaneous SINR `γ_{k,n}` with which user `k` decodes user `n`
/// (1-based). Zero whenever `n ≥ k`: a user cannot decode a stronger user's
/// message.
pub fn sinr_instantaneous(
    realization: &ChannelRealization,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    k: usize,
    n: usize,
) -> Result<f64> {
    cfg.validate()?;
    imp.validate()?;
    check_len(realization, cfg)?;
    check_pair(cfg.users(), k, n)?;
    Ok(sinr_unchecked(&realization.rho, &cfg.power_allocation, cfg.r1, cfg.r2(), imp, k - 1, n - 1))
}

/// 0-based kernel shared with the Monte Carlo engine.
pub(crate) fn sinr_unchecked(rho: &[f64], a: &[f64], r1: f64, r2: f64, imp: &ImpairmentProfile, k: usize, n: usize) -> f64 {
    if n >= k {
        return 0.0;
    }
    let numerator = rho[k] * rho[n] * a[n] * r1 * r2;
    if numerator == 0.0 {
        return 0.0;
    }
    numerator / terms(rho, a, r1, r2, imp, k, n).total()
}

fn terms(rho: &[f64], a: &[f64], r1: f64, r2: f64, imp: &ImpairmentProfile, k: usize, n: usize) -> SinrTerms {
    let m = rho.len();
    let ut = imp.kappa_ut.powi(2);
    let ur = imp.kappa_ur.powi(2);
    let rt = imp.kappa_rt.powi(2);
    let rr = imp.kappa_rr.powi(2);
    let rr12 = r1 * r2;
    let relay_in = 1.0 + ut + rr;

    // Interference from users n+1 ..= M-1 (1-based); user M is excluded.
    let theta1: f64 = (n + 1..m.saturating_sub(1)).map(|i| rho[k] * rho[i] * a[i] * rr12).sum();
    let theta2: f64 = (0..m)
        .map(|i| rho[k] * rho[i] * rr12 * a[i] * (ut + rr + rt * rr + rt + rt * ut))
        .sum();
    let theta3: f64 = (0..m).map(|i| a[i] * rho[i] * rho[i] * ur * rr12 * relay_in).sum();
    let theta4: f64 = (0..m).map(|i| rho[i] * r1 * a[i] * relay_in + ur * rho[i] * r2).sum();
    let theta5 = rho[k] * r2 * (1.0 + rt) + 1.0;
    SinrTerms { theta1, theta2, theta3, theta4, theta5 }
}

fn check_len(realization: &ChannelRealization, cfg: &NetworkConfig) -> Result<()> {
    if realization.users() != cfg.users() {
        return Err(Error::Argument(format!(
            "realization has {} gains but the network has {} users",
            realization.users(),
            cfg.users()
        )));
    }
    Ok(())
}

pub(crate) fn check_pair(users: usize, k: usize, n: usize) -> Result<()> {
    if k < 1 || k > users || n < 1 || n > users {
        return Err(Error::Argument(format!("pair (k={k}, n={n}) outside 1..={users}")));
    }
    Ok(())
}
