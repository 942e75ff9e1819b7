//! Orthogonal multiple access baseline.
//!
//! A pairwise OMA exchange among `M` users needs `⌈(M-1)/2⌉ + 1` time slots
//! where the NOMA protocol needs two, so every OMA rate carries the
//! pre-factor `1 / slots` instead of `½`.

use serde::{Deserialize, Serialize};

use crate::channel::OrderStatMoments;
use crate::error::{Error, Result};
use crate::rate::{nonideal_rate_unchecked, AsrResult, Provenance};
use crate::signal::{ImpairmentProfile, NetworkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmaScheme {
    /// Same per-exchange link model as NOMA; only the slot count differs.
    #[default]
    SlotScaled,
    /// Each exchange gets a dedicated resource at full power (`a_n = 1`) and
    /// sees no co-channel interference.
    Orthogonal,
}

/// Number of OMA time slots for `users` users.
pub fn time_slots(users: usize) -> usize {
    (users - 1).div_ceil(2) + 1
}

fn prefactor(users: usize) -> f64 {
    1.0 / time_slots(users) as f64
}

fn slot_note(users: usize) -> Option<String> {
    (time_slots(users) <= 2).then(|| {
        format!("OMA with M={users} uses {} slots, no fewer than the 2 NOMA slots", time_slots(users))
    })
}

/// OMA achievable sum rate over the same `(k, n)` exchange pairs as NOMA.
pub fn asr_oma(
    moments: &OrderStatMoments,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    scheme: OmaScheme,
) -> Result<AsrResult> {
    cfg.validate()?;
    imp.validate()?;
    let m = cfg.users();
    if moments.users() != m {
        return Err(Error::Argument(format!("moments cover {} users but the network has {m}", moments.users())));
    }
    // nonideal_rate_unchecked carries the NOMA ½; rescale it to 1/slots.
    let rescale = 2.0 * prefactor(m);
    let per_pair = (0..m)
        .map(|k| {
            (0..m - 1)
                .map(|n| match scheme {
                    OmaScheme::SlotScaled => {
                        rescale * nonideal_rate_unchecked(moments, &cfg.power_allocation, cfg.r1, cfg.r2(), imp, k, n)
                    }
                    OmaScheme::Orthogonal => {
                        let mut solo = vec![0.0; m];
                        solo[n] = 1.0;
                        rescale * nonideal_rate_unchecked(moments, &solo, cfg.r1, cfg.r2(), imp, k, n)
                    }
                })
                .collect()
        })
        .collect();
    let mut result = AsrResult::from_pairs(per_pair, Provenance::Analytical);
    result.notes.extend(slot_note(m));
    Ok(result)
}

/// Converts a NOMA estimate into the slot-scaled OMA estimate. Works for
/// Monte Carlo results too, standard errors included.
pub fn slot_scaled_from_noma(noma: &AsrResult) -> AsrResult {
    let m = noma.users();
    let rescale = 2.0 * prefactor(m);
    let scale = |rows: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
        rows.iter().map(|r| r.iter().map(|c| c * rescale).collect()).collect()
    };
    let mut result = AsrResult::from_pairs(scale(&noma.per_pair), noma.provenance);
    result.stderr = noma.stderr.map(|s| s * rescale);
    result.pair_stderr = noma.pair_stderr.as_ref().map(scale);
    result.notes.extend(slot_note(m));
    result
}
