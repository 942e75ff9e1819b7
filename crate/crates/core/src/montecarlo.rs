//! Seeded Monte Carlo estimate of the achievable sum rate.
//!
//! Every trial draws its own channel realization from a stream derived from
//! `(seed, trial index)`, so the estimate does not depend on how trials are
//! spread over threads. Trials are grouped in fixed-size blocks; blocks are
//! reduced independently and merged in index order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_channel_gains, FadingParams};
use crate::error::{Error, Result};
use crate::rate::{AsrResult, Provenance};
use crate::signal::{sinr_unchecked, ImpairmentProfile, NetworkConfig};

const BLOCK: u64 = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    pub trials: u64,
    pub seed: u64,
    /// Thread count; has no effect on the result.
    #[serde(default = "default_workers")]
    pub workers: usize,
}

fn default_workers() -> usize {
    1
}

impl TrialConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        TrialConfig { trials, seed, workers: 1 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Argument("trials must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Argument("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Sample mean of the sum rate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedAsr {
    pub result: AsrResult,
    pub estimate: McEstimate,
}

/// Independent random stream for one trial: ChaCha8 keyed by `seed`, with the
/// trial index as stream id.
pub fn derive_trial_stream(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Running mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.count as f64 * other.count as f64) / n as f64;
        self.count = n;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

/// Runs `body` on a pool of `workers` threads.
pub(crate) fn with_workers<T: Send>(workers: usize, body: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    Ok(pool.install(body))
}

/// Averages `½ log₂(1 + γ_{k,n})` over `tc.trials` channel realizations.
pub fn simulate_asr(
    cfg: &NetworkConfig,
    fading: &FadingParams,
    imp: &ImpairmentProfile,
    tc: &TrialConfig,
) -> Result<SimulatedAsr> {
    cfg.validate()?;
    imp.validate()?;
    tc.validate()?;
    let m = cfg.users();
    fading.validate(m)?;

    let blocks = tc.trials.div_ceil(BLOCK);
    let run_block = |b: u64| -> Result<(Vec<RunningStats>, RunningStats)> {
        let mut pairs = vec![RunningStats::default(); m * (m - 1)];
        let mut total = RunningStats::default();
        let end = ((b + 1) * BLOCK).min(tc.trials);
        for t in b * BLOCK..end {
            let mut rng = derive_trial_stream(tc.seed, t);
            let realization = sample_channel_gains(fading, m, &mut rng)?;
            let mut sum = 0.0;
            for k in 0..m {
                for n in 0..m - 1 {
                    let gamma = sinr_unchecked(&realization.rho, &cfg.power_allocation, cfg.r1, cfg.r2(), imp, k, n);
                    let c = 0.5 * gamma.ln_1p() / std::f64::consts::LN_2;
                    if !c.is_finite() {
                        return Err(Error::NonFinite {
                            trial: t,
                            detail: format!("rate of pair (k={}, n={}) is {c}", k + 1, n + 1),
                        });
                    }
                    pairs[k * (m - 1) + n].push(c);
                    sum += c;
                }
            }
            total.push(sum);
        }
        Ok((pairs, total))
    };

    let partials: Vec<(Vec<RunningStats>, RunningStats)> =
        with_workers(tc.workers, || (0..blocks).into_par_iter().map(run_block).collect::<Result<Vec<_>>>())??;

    let mut pairs = vec![RunningStats::default(); m * (m - 1)];
    let mut total = RunningStats::default();
    for (block_pairs, block_total) in &partials {
        for (acc, p) in pairs.iter_mut().zip(block_pairs) {
            acc.merge(p);
        }
        total.merge(block_total);
    }

    let per_pair: Vec<Vec<f64>> = pairs.chunks(m - 1).map(|row| row.iter().map(RunningStats::mean).collect()).collect();
    let pair_stderr: Vec<Vec<f64>> = pairs.chunks(m - 1).map(|row| row.iter().map(RunningStats::stderr).collect()).collect();
    let mut result = AsrResult::from_pairs(per_pair, Provenance::MonteCarlo);
    result.stderr = Some(total.stderr());
    result.pair_stderr = Some(pair_stderr);
    let estimate = McEstimate { mean: total.mean(), stderr: total.stderr(), trials: total.count() };
    Ok(SimulatedAsr { result, estimate })
}

/// Per-position sample statistics of `ρ_i` and `ρ_i²`, using the same trial
/// streams as [`simulate_asr`].
pub fn empirical_moments(fading: &FadingParams, users: usize, tc: &TrialConfig) -> Result<Vec<(RunningStats, RunningStats)>> {
    tc.validate()?;
    fading.validate(users)?;
    let blocks = tc.trials.div_ceil(BLOCK);
    let run_block = |b: u64| -> Result<Vec<(RunningStats, RunningStats)>> {
        let mut acc = vec![(RunningStats::default(), RunningStats::default()); users];
        for t in b * BLOCK..((b + 1) * BLOCK).min(tc.trials) {
            let realization = sample_channel_gains(fading, users, &mut derive_trial_stream(tc.seed, t))?;
            for (slot, rho) in acc.iter_mut().zip(&realization.rho) {
                slot.0.push(*rho);
                slot.1.push(rho * rho);
            }
        }
        Ok(acc)
    };
    let partials =
        with_workers(tc.workers, || (0..blocks).into_par_iter().map(run_block).collect::<Result<Vec<_>>>())??;
    let mut out = vec![(RunningStats::default(), RunningStats::default()); users];
    for part in &partials {
        for (acc, p) in out.iter_mut().zip(part) {
            acc.0.merge(&p.0);
            acc.1.merge(&p.1);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn defaults(snr_db: f64) -> (NetworkConfig, FadingParams) {
        (NetworkConfig::new(vec![0.5, 0.3, 0.2], snr_db), FadingParams::uniform(2, 3.0, 3.0, 1.0, 3))
    }

    #[test]
    fn streams_are_pure_and_distinct() {
        let a: u64 = derive_trial_stream(42, 0).random();
        let b: u64 = derive_trial_stream(42, 0).random();
        let c: u64 = derive_trial_stream(42, 1).random();
        let d: u64 = derive_trial_stream(43, 0).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(a, d);
    }

    #[test]
    fn first_draws_are_uniform() {
        // Chi-square over 20 equiprobable bins; 1% critical value for 19 dof.
        const BINS: usize = 20;
        const CRITICAL: f64 = 36.191;
        let n = 10_000;
        let mut counts = [0u32; BINS];
        for i in 0..n {
            let u: f64 = derive_trial_stream(2024, i).random();
            counts[(u * BINS as f64) as usize] += 1;
        }
        let expected = n as f64 / BINS as f64;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < CRITICAL, "chi-square {chi2}");
    }

    #[test]
    fn welford_merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.25).collect();
        let mut seq = RunningStats::default();
        xs.iter().for_each(|&x| seq.push(x));
        let mut left = RunningStats::default();
        let mut right = RunningStats::default();
        xs[..313].iter().for_each(|&x| left.push(x));
        xs[313..].iter().for_each(|&x| right.push(x));
        left.merge(&right);
        assert_eq!(left.count(), seq.count());
        assert!((left.mean() - seq.mean()).abs() < 1e-12);
        assert!((left.variance() / seq.variance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let (cfg, fading) = defaults(20.0);
        let imp = ImpairmentProfile::uniform(0.1);
        let one = simulate_asr(&cfg, &fading, &imp, &TrialConfig { trials: 10_000, seed: 5, workers: 1 }).unwrap();
        let eight = simulate_asr(&cfg, &fading, &imp, &TrialConfig { trials: 10_000, seed: 5, workers: 8 }).unwrap();
        assert_eq!(one, eight);
    }

    #[test]
    fn undecodable_pairs_are_exactly_zero() {
        let (cfg, fading) = defaults(30.0);
        let sim = simulate_asr(&cfg, &fading, &ImpairmentProfile::IDEAL, &TrialConfig::new(3000, 9)).unwrap();
        for k in 1..=3 {
            for n in k..3 {
                assert_eq!(sim.result.pair(k, n), 0.0);
                assert_eq!(sim.result.pair_stderr.as_ref().unwrap()[k - 1][n - 1], 0.0);
            }
        }
        assert!((sim.result.total - sim.estimate.mean).abs() < 1e-9);
    }

    #[test]
    fn zero_snr_limit() {
        let (cfg, fading) = defaults(-90.0);
        let sim = simulate_asr(&cfg, &fading, &ImpairmentProfile::IDEAL, &TrialConfig::new(5000, 1)).unwrap();
        assert!(sim.estimate.mean < 1e-6);
    }

    #[test]
    fn stderr_shrinks_with_trials() {
        let (cfg, fading) = defaults(20.0);
        let small = simulate_asr(&cfg, &fading, &ImpairmentProfile::IDEAL, &TrialConfig::new(4_000, 3)).unwrap();
        let large = simulate_asr(&cfg, &fading, &ImpairmentProfile::IDEAL, &TrialConfig::new(64_000, 3)).unwrap();
        let ratio = small.estimate.stderr / large.estimate.stderr;
        assert!((ratio - 4.0).abs() < 0.6, "ratio {ratio}");
    }

    #[test]
    fn zero_trials_rejected() {
        let (cfg, fading) = defaults(20.0);
        let err = simulate_asr(&cfg, &fading, &ImpairmentProfile::IDEAL, &TrialConfig::new(0, 1)).unwrap_err();
        assert!(matches!(err, Error::Argument(_)));
    }
}
