//! Closed-form achievable rates.
//!
//! Per-pair rates replace every instantaneous gain in the SINR by its
//! order-statistic moment (`ρ_i → Ψ_i`, `ρ_i² → Ω_i`), giving
//! `C_{k,n} = ½ log₂(1 + Ψ_k Ψ_n a_n r₁ r₂ / (Ξ₁ + … + Ξ₅))`. The ½ accounts for
//! the two-slot exchange. Dividing numerator and denominator by `r₁ r₂` and
//! letting `r₁ → ∞` with `r₂ = c r₁` gives the high-SNR ceilings.

use serde::Serialize;

use crate::channel::OrderStatMoments;
use crate::error::{Error, Result};
use crate::signal::{check_pair, ImpairmentProfile, NetworkConfig};

/// Slope magnitude below which the high-SNR slope is treated as zero.
pub const ZERO_SLOPE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    Ideal,
    NonIdeal,
}

impl Condition {
    pub fn label(&self) -> &'static str {
        match self {
            Condition::Ideal => "ideal",
            Condition::NonIdeal => "nonideal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytical,
    MonteCarlo,
    Asymptotic,
}

/// Denominator aggregates of the closed-form rates for one `(k, n)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RateTerms {
    pub xi1: f64,
    pub xi2: f64,
    pub xi3: f64,
    pub xi4: f64,
    pub xi5: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta3: f64,
    pub delta4: f64,
    pub varpi: f64,
}

impl RateTerms {
    pub fn xi_total(&self) -> f64 {
        self.xi1 + self.xi2 + self.xi3 + self.xi4 + self.xi5
    }

    pub fn delta_total(&self) -> f64 {
        self.delta1 + self.delta2 + self.delta3 + self.delta4
    }
}

/// Achievable sum rate together with its per-pair breakdown.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsrResult {
    /// `per_pair[k-1][n-1]` is `C_{k,n}` for `k ∈ 1..=M`, `n ∈ 1..M`.
    pub per_pair: Vec<Vec<f64>>,
    pub total: f64,
    pub provenance: Provenance,
    /// Standard error of `total` (Monte Carlo only).
    pub stderr: Option<f64>,
    /// Standard errors matching `per_pair` (Monte Carlo only).
    pub pair_stderr: Option<Vec<Vec<f64>>>,
    pub notes: Vec<String>,
}

impl AsrResult {
    pub(crate) fn from_pairs(per_pair: Vec<Vec<f64>>, provenance: Provenance) -> Self {
        let total = per_pair.iter().flatten().sum();
        AsrResult { per_pair, total, provenance, stderr: None, pair_stderr: None, notes: Vec::new() }
    }

    pub fn users(&self) -> usize {
        self.per_pair.len()
    }

    /// `C_{k,n}` with 1-based indices.
    pub fn pair(&self, k: usize, n: usize) -> f64 {
        self.per_pair[k - 1][n - 1]
    }

    /// Sum over pairs whose rate is finite.
    pub fn finite_total(&self) -> f64 {
        self.per_pair.iter().flatten().filter(|c| c.is_finite()).sum()
    }

    /// Pairs (1-based) whose rate is unbounded.
    pub fn divergent_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, row) in self.per_pair.iter().enumerate() {
            for (n, c) in row.iter().enumerate() {
                if c.is_infinite() {
                    out.push((k + 1, n + 1));
                }
            }
        }
        out
    }

    /// Sum over the given 1-based pairs.
    pub fn subtotal(&self, pairs: &[(usize, usize)]) -> f64 {
        pairs.iter().map(|&(k, n)| self.pair(k, n)).sum()
    }

    /// Decodable pairs `(k, n)` with `n < k`, 1-based, in row-major order.
    pub fn decodable_pairs(users: usize) -> Vec<(usize, usize)> {
        (1..=users).flat_map(|k| (1..users).filter(move |&n| n < k).map(move |n| (k, n))).collect()
    }
}

fn check_moments(moments: &OrderStatMoments, cfg: &NetworkConfig) -> Result<()> {
    if moments.psi.len() != cfg.users() || moments.omega.len() != cfg.users() {
        return Err(Error::Argument(format!(
            "moments cover {} users but the network has {}",
            moments.psi.len(),
            cfg.users()
        )));
    }
    Ok(())
}

/// 0-based aggregates. Users with `a_i = 0` are treated as silent in the
/// `Ξ₅` receive-distortion sum, which is the only term not weighted by `a_i`.
pub(crate) fn rate_terms(
    psi: &[f64],
    omega: &[f64],
    a: &[f64],
    r1: f64,
    r2: f64,
    imp: &ImpairmentProfile,
    k: usize,
    n: usize,
) -> RateTerms {
    let m = psi.len();
    let ut = imp.kappa_ut.powi(2);
    let ur = imp.kappa_ur.powi(2);
    let rt = imp.kappa_rt.powi(2);
    let rr = imp.kappa_rr.powi(2);
    let rr12 = r1 * r2;
    let pk = psi[k];
    let all = 0..m;

    let interference: f64 = (n + 1..m.saturating_sub(1)).map(|i| psi[i] * a[i]).sum();
    let weighted_psi: f64 = all.clone().map(|i| psi[i] * a[i]).sum();
    let weighted_omega: f64 = all.clone().map(|i| omega[i] * a[i]).sum();
    let active_psi: f64 = all.filter(|&i| a[i] > 0.0).map(|i| psi[i]).sum();

    let xi1 = pk * interference * rr12;
    let xi2 = pk * weighted_psi * ut * rr12 + rr * pk * weighted_psi * rr12;
    let xi3 = pk * weighted_psi * rt * rr12 * (1.0 + ut) + pk * weighted_psi * rt * rr * rr12;
    let xi4 = weighted_omega * ur * rr12 * (1.0 + ut)
        + weighted_omega * ur * rr * rr12
        + weighted_psi * r1 * (1.0 + ut)
        + weighted_psi * rr * r1;
    let xi5 = ur * active_psi * r2 + pk * r2 + pk * rt * r2 + 1.0;

    let distorted = 1.0 + ut + rr;
    RateTerms {
        xi1,
        xi2,
        xi3,
        xi4,
        xi5,
        delta1: pk * interference,
        delta2: pk * weighted_psi * (ut + rr),
        delta3: pk * weighted_psi * rt * distorted,
        delta4: weighted_omega * ur * distorted,
        varpi: pk * interference * rr12 + weighted_psi * r1,
    }
}

pub(crate) fn nonideal_rate_unchecked(
    moments: &OrderStatMoments,
    a: &[f64],
    r1: f64,
    r2: f64,
    imp: &ImpairmentProfile,
    k: usize,
    n: usize,
) -> f64 {
    if n >= k {
        return 0.0;
    }
    let t = rate_terms(&moments.psi, &moments.omega, a, r1, r2, imp, k, n);
    let signal = moments.psi[k] * moments.psi[n] * a[n] * r1 * r2;
    0.5 * (signal / t.xi_total()).ln_1p() / std::f64::consts::LN_2
}

fn ideal_rate_unchecked(moments: &OrderStatMoments, a: &[f64], r1: f64, r2: f64, k: usize, n: usize) -> f64 {
    if n >= k {
        return 0.0;
    }
    let t = rate_terms(&moments.psi, &moments.omega, a, r1, r2, &ImpairmentProfile::IDEAL, k, n);
    let signal = moments.psi[k] * moments.psi[n] * a[n] * r1 * r2;
    0.5 * (signal / (t.varpi + moments.psi[k] * r2 + 1.0)).ln_1p() / std::f64::consts::LN_2
}

/// Exposes the aggregates of pair `(k, n)` (1-based) for inspection.
pub fn pair_terms(
    moments: &OrderStatMoments,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    k: usize,
    n: usize,
) -> Result<RateTerms> {
    cfg.validate()?;
    check_moments(moments, cfg)?;
    check_pair(cfg.users(), k, n)?;
    Ok(rate_terms(&moments.psi, &moments.omega, &cfg.power_allocation, cfg.r1, cfg.r2(), imp, k - 1, n - 1))
}

/// Closed-form rate of user `k` decoding user `n` under impairments.
pub fn rate_pair_nonideal(
    moments: &OrderStatMoments,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    k: usize,
    n: usize,
) -> Result<f64> {
    cfg.validate()?;
    imp.validate()?;
    check_moments(moments, cfg)?;
    check_pair(cfg.users(), k, n)?;
    Ok(nonideal_rate_unchecked(moments, &cfg.power_allocation, cfg.r1, cfg.r2(), imp, k - 1, n - 1))
}

/// Closed-form rate of user `k` decoding user `n` with ideal hardware.
pub fn rate_pair_ideal(moments: &OrderStatMoments, cfg: &NetworkConfig, k: usize, n: usize) -> Result<f64> {
    cfg.validate()?;
    check_moments(moments, cfg)?;
    check_pair(cfg.users(), k, n)?;
    Ok(ideal_rate_unchecked(moments, &cfg.power_allocation, cfg.r1, cfg.r2(), k - 1, n - 1))
}

/// Achievable sum rate `Υ = Σ_k Σ_{n<M} C_{k,n}`.
pub fn asr(
    moments: &OrderStatMoments,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    condition: Condition,
) -> Result<AsrResult> {
    cfg.validate()?;
    imp.validate()?;
    check_moments(moments, cfg)?;
    let m = cfg.users();
    let a = &cfg.power_allocation;
    let per_pair = (0..m)
        .map(|k| {
            (0..m - 1)
                .map(|n| match condition {
                    Condition::Ideal => ideal_rate_unchecked(moments, a, cfg.r1, cfg.r2(), k, n),
                    Condition::NonIdeal => nonideal_rate_unchecked(moments, a, cfg.r1, cfg.r2(), imp, k, n),
                })
                .collect()
        })
        .collect();
    Ok(AsrResult::from_pairs(per_pair, Provenance::Analytical))
}

/// High-SNR ceilings of every pair rate. Pairs whose ceiling is unbounded are
/// reported as `f64::INFINITY`; use [`AsrResult::finite_total`] for the
/// bounded part.
pub fn asr_asymptotic(
    moments: &OrderStatMoments,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    condition: Condition,
) -> Result<AsrResult> {
    cfg.validate()?;
    imp.validate()?;
    check_moments(moments, cfg)?;
    let m = cfg.users();
    let a = &cfg.power_allocation;
    let psi = &moments.psi;
    let mut per_pair = vec![vec![0.0; m - 1]; m];
    for (k, row) in per_pair.iter_mut().enumerate() {
        for (n, c) in row.iter_mut().enumerate().take(k) {
            let (signal, floor) = match condition {
                Condition::Ideal => (a[n] * psi[n], (n + 1..m - 1).map(|i| a[i] * psi[i]).sum::<f64>()),
                Condition::NonIdeal => {
                    let t = rate_terms(psi, &moments.omega, a, 1.0, 1.0, imp, k, n);
                    (psi[k] * psi[n] * a[n], t.delta_total())
                }
            };
            // An empty interference sum folds to -0.0; both zeros mean no ceiling.
            *c = if floor > 0.0 { 0.5 * (signal / floor).ln_1p() / std::f64::consts::LN_2 } else { f64::INFINITY };
        }
    }
    let mut result = AsrResult::from_pairs(per_pair, Provenance::Asymptotic);
    let divergent = result.divergent_pairs();
    if !divergent.is_empty() {
        result.notes.push(format!("unbounded high-SNR rate for pairs {divergent:?}"));
    }
    Ok(result)
}

fn check_curve(curve: &[(f64, f64)]) -> Result<()> {
    if curve.len() < 3 {
        return Err(Error::Argument(format!("slope estimate needs at least 3 samples, got {}", curve.len())));
    }
    if curve.iter().any(|(r, y)| !(r.is_finite() && *r > 0.0 && y.is_finite())) {
        return Err(Error::Argument("curve samples must be finite with positive SNR".into()));
    }
    if curve.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Argument("curve SNRs must be strictly increasing".into()));
    }
    let span_db = 10.0 * (curve[curve.len() - 1].0 / curve[0].0).log10();
    if span_db < 20.0 - 1e-9 {
        return Err(Error::Argument(format!("curve spans {span_db:.1} dB, need at least 20 dB")));
    }
    Ok(())
}

/// Secant estimate of `lim Υ / log₂ r` from the two highest samples of
/// `(r, Υ)` (linear SNR, bits/s/Hz).
pub fn high_snr_slope(curve: &[(f64, f64)]) -> Result<f64> {
    check_curve(curve)?;
    let (r_hi, y_hi) = curve[curve.len() - 1];
    let (r_lo, y_lo) = curve[curve.len() - 2];
    Ok((y_hi - y_lo) / (r_hi.log2() - r_lo.log2()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HighSnrOffset {
    /// Offset in 3 dB units.
    Finite(f64),
    /// The slope is zero, so the offset is infinite.
    Divergent,
}

/// `L∞ = log₂ r − Υ / S∞` at the highest sample.
pub fn high_snr_offset(curve: &[(f64, f64)], slope: f64) -> Result<HighSnrOffset> {
    check_curve(curve)?;
    if !slope.is_finite() || slope.abs() < ZERO_SLOPE_THRESHOLD {
        return Ok(HighSnrOffset::Divergent);
    }
    let (r, y) = curve[curve.len() - 1];
    Ok(HighSnrOffset::Finite(r.log2() - y / slope))
}
