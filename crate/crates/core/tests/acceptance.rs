//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

use std::process::ExitCode;

use uav_noma::baseline::asr_oma;
use uav_noma::experiment::{load, run, EngineChoice};
use uav_noma::montecarlo::empirical_moments;
use uav_noma::placement::{sweep_grid, Engine, Geometry, GridSpec, Scheme};
use uav_noma::rate::AsrResult;
use uav_noma::signal::db_to_linear;
use uav_noma::{
    asr, asr_asymptotic, high_snr_offset, high_snr_slope, moment_oracle, omega_moment, order_stat_moments,
    psi_moment, simulate_asr, Condition, FadingParams, HighSnrOffset, ImpairmentProfile, NetworkConfig, OmaScheme,
    TrialConfig,
};

const MOMENT_REL_TOL: f64 = 1e-3;
const MC_SIGMAS: f64 = 3.0;
const MOMENT_MC_DRAWS: u64 = 1_000_000;
const ASR_MC_TRIALS: u64 = 100_000;
const ASR_MC_REL_TOL: f64 = 0.10;
const FLOOR_GROWTH_MAX: f64 = 0.02;
const FLOOR_CEILING_REL_TOL: f64 = 0.01;
const SLOPE_MAX: f64 = 0.05;
const TXRX_REL_GAP_MAX: f64 = 0.02;

const SEED: u64 = 20_200_515;

type Outcome = (bool, String);
type Criterion = fn() -> Outcome;

fn three_users(snr_db: f64) -> (NetworkConfig, FadingParams) {
    (NetworkConfig::new(vec![0.5, 0.3, 0.2], snr_db), FadingParams::uniform(2, 3.0, 3.0, 1.0, 3))
}

fn allocation(users: usize) -> Vec<f64> {
    match users {
        3 => vec![0.5, 0.3, 0.2],
        4 => vec![0.5, 0.3, 0.15, 0.05],
        5 => vec![0.5, 0.2, 0.15, 0.1, 0.05],
        _ => unreachable!(),
    }
}

fn snr_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + i as f64 * step).collect()
}

/// 1. Closed-form moments against quadrature and 10⁶-draw Monte Carlo.
fn moment_correctness() -> Outcome {
    let mut worst_rel: f64 = 0.0;
    let mut worst_z: f64 = 0.0;
    let mut failures = Vec::new();
    for (alpha, beta) in [(1u32, 1.0), (2, 3.0), (3, 2.0)] {
        for users in [2usize, 3, 5] {
            let fading = FadingParams::uniform(alpha, beta, 3.0, 0.0, users);
            let tc = TrialConfig { trials: MOMENT_MC_DRAWS, seed: SEED, workers: 8 };
            let empirical = empirical_moments(&fading, users, &tc).unwrap();
            for i in 1..=users {
                for order in [1u32, 2] {
                    let closed = if order == 1 {
                        psi_moment(&fading, users, i).unwrap()
                    } else {
                        omega_moment(&fading, users, i).unwrap()
                    };
                    let quad = moment_oracle(&fading, users, i, order).unwrap();
                    let rel = (closed - quad).abs() / quad;
                    let stats = if order == 1 { empirical[i - 1].0 } else { empirical[i - 1].1 };
                    let z = (stats.mean() - closed).abs() / stats.stderr();
                    worst_rel = worst_rel.max(rel);
                    worst_z = worst_z.max(z);
                    if rel > MOMENT_REL_TOL || z > MC_SIGMAS {
                        failures.push(format!("(α={alpha}, β={beta}, M={users}, i={i}, q={order}): rel {rel:.1e}, z {z:.2}"));
                    }
                }
            }
        }
    }
    (
        failures.is_empty(),
        format!("worst quadrature rel err {worst_rel:.2e}, worst MC |z| {worst_z:.2}{}", fail_list(&failures)),
    )
}

/// 2. Closed-form ASR against Monte Carlo over 0–40 dB.
fn analytical_vs_monte_carlo() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for db in snr_grid(0.0, 40.0, 5.0) {
        let (cfg, fading) = three_users(db);
        let mo = order_stat_moments(&fading, 3).unwrap();
        let closed = asr(&mo, &cfg, &ImpairmentProfile::IDEAL, Condition::NonIdeal).unwrap().total;
        let tc = TrialConfig { trials: ASR_MC_TRIALS, seed: SEED, workers: 8 };
        let mc = simulate_asr(&cfg, &fading, &ImpairmentProfile::IDEAL, &tc).unwrap().estimate.mean;
        let rel = (closed - mc).abs() / mc;
        worst = worst.max(rel);
        if rel > ASR_MC_REL_TOL {
            failures.push(format!("{db} dB: closed {closed:.4} vs MC {mc:.4}"));
        }
    }
    (failures.is_empty(), format!("worst relative gap {:.2}%{}", 100.0 * worst, fail_list(&failures)))
}

/// 3. Error floor with κ = 0.1.
fn error_floor() -> Outcome {
    let imp = ImpairmentProfile::uniform(0.1);
    let (base, fading) = three_users(0.0);
    let mo = order_stat_moments(&fading, 3).unwrap();
    let at = |db: f64| asr(&mo, &base.with_snr_db(db), &imp, Condition::NonIdeal).unwrap().total;
    let growth = at(70.0) - at(50.0);
    let ceiling = asr_asymptotic(&mo, &base, &imp, Condition::NonIdeal).unwrap().total;
    let rel = (at(60.0) - ceiling).abs() / ceiling;
    (
        growth < FLOOR_GROWTH_MAX && rel < FLOOR_CEILING_REL_TOL && ceiling.is_finite(),
        format!("Υ(70)−Υ(50) = {growth:.2e} bits/s/Hz, |Υ(60)−Υ∞|/Υ∞ = {rel:.2e}, Υ∞ = {ceiling:.4}"),
    )
}

/// 4. Zero high-SNR slope and divergent offset.
fn high_snr_diagnostics() -> Outcome {
    let (base, fading) = three_users(0.0);
    let mo = order_stat_moments(&fading, 3).unwrap();
    let dbs = [40.0, 50.0, 60.0];

    let finite_pairs: Vec<(usize, usize)> = {
        let ceiling = asr_asymptotic(&mo, &base, &ImpairmentProfile::IDEAL, Condition::Ideal).unwrap();
        AsrResult::decodable_pairs(3).into_iter().filter(|&(k, n)| ceiling.pair(k, n).is_finite()).collect()
    };
    let ideal: Vec<(f64, f64)> = dbs
        .iter()
        .map(|&db| {
            let r = asr(&mo, &base.with_snr_db(db), &ImpairmentProfile::IDEAL, Condition::Ideal).unwrap();
            (db_to_linear(db), r.subtotal(&finite_pairs))
        })
        .collect();

    let mut parts = Vec::new();
    let mut ok = true;
    let mut check = |label: &str, curve: &[(f64, f64)]| {
        let slope = high_snr_slope(curve).unwrap();
        let offset = high_snr_offset(curve, slope).unwrap();
        ok &= slope.abs() < SLOPE_MAX && offset == HighSnrOffset::Divergent;
        parts.push(format!("{label}: S∞ ≈ {slope:.2e}, L∞ {offset:?}"));
    };
    check("ideal (finite pairs)", &ideal);
    for kappa in [0.1, 0.2] {
        let imp = ImpairmentProfile::uniform(kappa);
        let curve: Vec<(f64, f64)> = dbs
            .iter()
            .map(|&db| (db_to_linear(db), asr(&mo, &base.with_snr_db(db), &imp, Condition::NonIdeal).unwrap().total))
            .collect();
        check(&format!("non-ideal κ={kappa}"), &curve);
    }
    (ok, parts.join("; "))
}

fn noma_oma_at_30db(users: usize) -> (f64, f64) {
    let cfg = NetworkConfig::new(allocation(users), 30.0);
    let mo = order_stat_moments(&FadingParams::uniform(2, 3.0, 3.0, 1.0, users), users).unwrap();
    let noma = asr(&mo, &cfg, &ImpairmentProfile::IDEAL, Condition::NonIdeal).unwrap().total;
    let oma = asr_oma(&mo, &cfg, &ImpairmentProfile::IDEAL, OmaScheme::SlotScaled).unwrap().total;
    (noma, oma)
}

/// 5. NOMA beats OMA and the gap widens from M = 4 to M = 5.
fn noma_beats_oma() -> Outcome {
    let (n4, o4) = noma_oma_at_30db(4);
    let (n5, o5) = noma_oma_at_30db(5);
    let (g4, g5) = (n4 - o4, n5 - o5);
    (
        n4 > o4 && n5 > o5 && g5 > g4,
        format!("M=4: NOMA {n4:.4} vs OMA {o4:.4} (gap {g4:.4}); M=5: NOMA {n5:.4} vs OMA {o5:.4} (gap {g5:.4})"),
    )
}

/// 6. Sum rate decreases with the impairment level, closed form and MC.
fn rhi_monotonicity() -> Outcome {
    let kappas = snr_grid(0.0, 0.3, 0.05);
    let mut failures = Vec::new();
    let mut spans = Vec::new();
    for users in [4usize, 5] {
        let cfg = NetworkConfig::new(allocation(users), 30.0);
        let fading = FadingParams::uniform(2, 3.0, 3.0, 1.0, users);
        let mo = order_stat_moments(&fading, users).unwrap();
        let tc = TrialConfig { trials: ASR_MC_TRIALS, seed: SEED, workers: 8 };
        let mut closed = Vec::new();
        let mut mc = Vec::new();
        for &k in &kappas {
            let imp = ImpairmentProfile::uniform(k);
            closed.push(asr(&mo, &cfg, &imp, Condition::NonIdeal).unwrap().total);
            let est = simulate_asr(&cfg, &fading, &imp, &tc).unwrap().estimate;
            mc.push((est.mean, est.stderr));
        }
        for j in 1..kappas.len() {
            if closed[j] >= closed[j - 1] {
                failures.push(format!("M={users} closed form rises at κ={:.2}", kappas[j]));
            }
            let (cur, se_cur) = mc[j];
            let (prev, se_prev) = mc[j - 1];
            if cur >= prev || cur - prev > MC_SIGMAS * se_cur.hypot(se_prev) {
                failures.push(format!("M={users} MC rises at κ={:.2}", kappas[j]));
            }
        }
        spans.push(format!(
            "M={users}: closed {:.3}→{:.3}, MC {:.3}→{:.3}",
            closed[0],
            closed[closed.len() - 1],
            mc[0].0,
            mc[mc.len() - 1].0
        ));
    }
    (failures.is_empty(), format!("{}{}", spans.join("; "), fail_list(&failures)))
}

/// 7. Transmit-side and receive-side distortion cost about the same.
fn tx_rx_symmetry() -> Outcome {
    let users = 4;
    let fading = FadingParams::uniform(2, 3.0, 3.0, 1.0, users);
    let mo = order_stat_moments(&fading, users).unwrap();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for db in snr_grid(0.0, 40.0, 5.0) {
        let cfg = NetworkConfig::new(allocation(users), db);
        let at = |imp: ImpairmentProfile| asr(&mo, &cfg, &imp, Condition::NonIdeal).unwrap().total;
        let ideal = at(ImpairmentProfile::IDEAL);
        let tx = at(ImpairmentProfile::transmit_only(0.2));
        let rx = at(ImpairmentProfile::receive_only(0.2));
        let both = at(ImpairmentProfile::uniform(0.2));
        let gap = (tx - rx).abs() / tx.max(rx);
        worst = worst.max(gap);
        if gap >= TXRX_REL_GAP_MAX {
            failures.push(format!("{db} dB: tx {tx:.4} rx {rx:.4} ({:.2}%)", 100.0 * gap));
        }
        if !(tx < ideal && rx < ideal && tx > both && rx > both) {
            failures.push(format!("{db} dB: ordering ideal {ideal:.4} > tx {tx:.4}, rx {rx:.4} > transceiver {both:.4} violated"));
        }
    }
    (failures.is_empty(), format!("worst tx/rx gap {:.2}%{}", 100.0 * worst, fail_list(&failures)))
}

/// 8. Placement surface: centred optimum, monotone in SNR, NOMA above OMA.
fn placement() -> Outcome {
    let users = 4;
    let fading = FadingParams::uniform(2, 3.0, 3.0, 1.0, users);
    let geom = Geometry::square(5.0, 10.0);
    let grid = GridSpec::default();
    let surface = |db: f64, scheme: Scheme| {
        sweep_grid(&geom, &grid, &NetworkConfig::new(allocation(users), db), &fading, &ImpairmentProfile::IDEAL, &Engine::Analytical, scheme)
            .unwrap()
    };
    let noma30 = surface(30.0, Scheme::Noma);
    let noma35 = surface(35.0, Scheme::Noma);
    let oma30 = surface(30.0, Scheme::Oma(OmaScheme::SlotScaled));
    let best = noma30.argmax;
    let centred = best.x.abs() <= grid.step && best.y.abs() <= grid.step;
    let snr_monotone = noma30.points.iter().zip(&noma35.points).all(|(a, b)| b.asr >= a.asr);
    let above_oma = noma30.points.iter().zip(&oma30.points).all(|(n, o)| n.asr > o.asr);
    (
        centred && snr_monotone && above_oma,
        format!(
            "argmax ({}, {}) Υ={:.4}; 35 dB ≥ 30 dB pointwise: {snr_monotone}; NOMA > OMA pointwise: {above_oma}",
            best.x, best.y, best.asr
        ),
    )
}

/// 9. Identical config and seed give byte-identical CSV for any worker count.
fn determinism() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (preset, patch) in [
        ("fig2b", r#"{"experiment": {"snr_db": {"start": 0, "stop": 30, "step": 10}}, "trials": {"trials": 20000, "seed": 77}}"#),
        ("fig3", r#"{"trials": {"trials": 20000, "seed": 78}}"#),
        ("moments", r#"{"trials": {"trials": 50000, "seed": 79}}"#),
    ] {
        let outputs: Vec<String> = [1usize, 4, 8]
            .iter()
            .map(|w| {
                let mut spec = load(Some(preset), Some(patch)).unwrap();
                spec.trials.workers = *w;
                run(&spec, EngineChoice::Both).unwrap().csv
            })
            .collect();
        let same = outputs.windows(2).all(|p| p[0] == p[1]);
        ok &= same;
        parts.push(format!("{preset}: {} bytes, identical={same}", outputs[0].len()));
    }
    (ok, parts.join("; "))
}

fn fail_list(failures: &[String]) -> String {
    if failures.is_empty() {
        String::new()
    } else {
        format!(" | failing: {}", failures.join(", "))
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 9] = [
        ("1 moment correctness", moment_correctness),
        ("2 analytical vs Monte Carlo ASR", analytical_vs_monte_carlo),
        ("3 error floor", error_floor),
        ("4 high-SNR slope and offset", high_snr_diagnostics),
        ("5 NOMA > OMA", noma_beats_oma),
        ("6 RHI monotonicity", rhi_monotonicity),
        ("7 Tx/Rx near-symmetry", tx_rx_symmetry),
        ("8 placement surface", placement),
        ("9 determinism across workers", determinism),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let (ok, detail) = check();
        println!("[{}] criterion {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
