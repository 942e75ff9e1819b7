//! Experiment configuration, named presets and CSV emission.
//!
//! A config file is a JSON document with the sections `experiment`,
//! `network`, `fading`, `impairments` and `trials`. A preset supplies a full
//! document; a config file given alongside a preset is merged over it key by
//! key. SNRs are given in dB and converted once here.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::baseline::{asr_oma, slot_scaled_from_noma, OmaScheme};
use crate::channel::{moment_oracle, order_stat_moments, FadingParams};
use crate::error::{Error, Result};
use crate::montecarlo::{empirical_moments, simulate_asr, TrialConfig};
use crate::placement::{sweep_grid, Engine, Geometry, GridSpec, Scheme};
use crate::rate::{asr, AsrResult, Condition};
use crate::signal::{db_to_linear, ImpairmentProfile, NetworkConfig};

pub const PRESETS: [&str; 6] = ["fig2a", "fig2b", "fig3", "fig4a", "fig4b", "moments"];

pub const SNR_HEADER: &str = "snr_db,scheme,condition,asr_analytical,asr_mc,mc_stderr";
pub const KAPPA_HEADER: &str = "kappa,scheme,condition,asr_analytical,asr_mc,mc_stderr";
pub const PLACEMENT_HEADER: &str = "x_m,y_m,asr";
pub const MOMENTS_HEADER: &str = "i,moment,closed_form,quadrature,rel_err_quadrature,monte_carlo,mc_stderr";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SnrSweep,
    KappaSweep,
    PlacementSweep,
    MomentsCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Range {
    fn values(&self, key: &str) -> Result<Vec<f64>> {
        if !(self.step.is_finite() && self.step > 0.0) || self.stop < self.start {
            return Err(Error::Config(format!("experiment.{key}: need step > 0 and stop >= start")));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeName {
    Noma,
    Oma,
}

/// Transceiver stage varied by a kappa sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Ut,
    Ur,
    Rt,
    Rr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedProfile {
    pub name: String,
    #[serde(flatten)]
    pub profile: ImpairmentProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub snr_db: Option<Range>,
    #[serde(default)]
    pub kappa: Option<Range>,
    #[serde(default)]
    pub kappa_stages: Option<Vec<Stage>>,
    #[serde(default)]
    pub profiles: Option<Vec<NamedProfile>>,
    #[serde(default)]
    pub geometry: Option<Geometry>,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default = "default_schemes")]
    pub schemes: Vec<SchemeName>,
    #[serde(default)]
    pub oma_model: OmaScheme,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_schemes() -> Vec<SchemeName> {
    vec![SchemeName::Noma]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub power_allocation: Vec<f64>,
    /// User transmit SNR `P / σ_r²` in dB; the base point of non-SNR sweeps.
    pub snr_db: f64,
    /// `n` in `P = n · P_R`.
    #[serde(default = "one")]
    pub user_to_relay_power_ratio: f64,
    #[serde(default = "one")]
    pub sigma_r2: f64,
    #[serde(default = "one")]
    pub sigma_t2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    pub alpha: f64,
    pub beta: f64,
    pub nu: f64,
    /// Per order position; defaults to the normalized distance 1 for everyone.
    #[serde(default)]
    pub distances: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

fn default_trials() -> TrialConfig {
    TrialConfig { trials: 0, seed: 1, workers: 1 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: ExperimentSection,
    pub network: NetworkSection,
    pub fading: FadingSection,
    #[serde(default)]
    pub impairments: ImpairmentProfile,
    #[serde(default = "default_trials")]
    pub trials: TrialConfig,
}

/// The swept dimension of a validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    Snr { snr_db: Vec<f64>, profiles: Vec<NamedProfile> },
    Kappa { values: Vec<f64>, stages: Vec<Stage> },
    Placement { geometry: Geometry, grid: GridSpec },
    Moments,
}

/// A validated, ready-to-run experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub network: NetworkConfig,
    pub fading: FadingParams,
    pub impairments: ImpairmentProfile,
    pub trials: TrialConfig,
    pub sweep: Sweep,
    pub schemes: Vec<SchemeName>,
    pub oma_model: OmaScheme,
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngineChoice {
    Analytical,
    MonteCarlo,
    #[default]
    Both,
}

impl EngineChoice {
    fn analytical(self) -> bool {
        matches!(self, EngineChoice::Analytical | EngineChoice::Both)
    }

    fn monte_carlo(self, trials: &TrialConfig) -> bool {
        matches!(self, EngineChoice::MonteCarlo | EngineChoice::Both) && trials.trials > 0
    }
}

/// Config document of a named preset.
pub fn preset(name: &str) -> Result<Value> {
    let section_iv_fading = serde_json::json!({ "alpha": 2.0, "beta": 3.0, "nu": 3.0 });
    let four_users = serde_json::json!({ "power_allocation": [0.5, 0.3, 0.15, 0.05], "snr_db": 30.0 });
    let trials = serde_json::json!({ "trials": 100000, "seed": 1 });
    let doc = match name {
        "fig2a" => serde_json::json!({
            "experiment": {
                "kind": "snr-sweep",
                "snr_db": { "start": 0.0, "stop": 40.0, "step": 5.0 },
                "schemes": ["noma", "oma"],
                "output": "fig2a.csv"
            },
            "network": four_users,
            "fading": section_iv_fading,
            "trials": trials
        }),
        "fig2b" => serde_json::json!({
            "experiment": {
                "kind": "snr-sweep",
                "snr_db": { "start": 0.0, "stop": 40.0, "step": 5.0 },
                "profiles": [
                    { "name": "ideal", "kappa_ut": 0.0, "kappa_ur": 0.0, "kappa_rt": 0.0, "kappa_rr": 0.0 },
                    { "name": "transmitter", "kappa_ut": 0.2, "kappa_ur": 0.0, "kappa_rt": 0.2, "kappa_rr": 0.0 },
                    { "name": "receiver", "kappa_ut": 0.0, "kappa_ur": 0.2, "kappa_rt": 0.0, "kappa_rr": 0.2 },
                    { "name": "transceiver", "kappa_ut": 0.2, "kappa_ur": 0.2, "kappa_rt": 0.2, "kappa_rr": 0.2 }
                ],
                "output": "fig2b.csv"
            },
            "network": four_users,
            "fading": section_iv_fading,
            "trials": trials
        }),
        "fig3" => serde_json::json!({
            "experiment": {
                "kind": "kappa-sweep",
                "kappa": { "start": 0.0, "stop": 0.3, "step": 0.05 },
                "schemes": ["noma", "oma"],
                "output": "fig3.csv"
            },
            "network": four_users,
            "fading": section_iv_fading,
            "trials": trials
        }),
        "fig4a" | "fig4b" => serde_json::json!({
            "experiment": {
                "kind": "placement-sweep",
                "geometry": Geometry::square(5.0, 10.0),
                "grid": GridSpec::default(),
                "schemes": [if name == "fig4a" { "noma" } else { "oma" }],
                "output": format!("{name}.csv")
            },
            "network": four_users,
            "fading": section_iv_fading,
            "trials": { "trials": 0, "seed": 1 }
        }),
        "moments" => serde_json::json!({
            "experiment": { "kind": "moments-check", "output": "moments.csv" },
            "network": { "power_allocation": [0.5, 0.3, 0.2], "snr_db": 30.0 },
            "fading": section_iv_fading,
            "trials": { "trials": 1000000, "seed": 1 }
        }),
        other => {
            return Err(Error::Parse(format!("unknown preset `{other}` (known: {})", PRESETS.join(", "))));
        }
    };
    Ok(doc)
}

/// Recursively overlays `patch` on `base`. Objects merge key by key; any
/// other value replaces.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Parses a config document, optionally merged over a preset.
pub fn load(preset_name: Option<&str>, config_text: Option<&str>) -> Result<ExperimentSpec> {
    let mut doc = match preset_name {
        Some(name) => preset(name)?,
        None => Value::Object(Default::default()),
    };
    if let Some(text) = config_text {
        let patch: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        merge(&mut doc, patch);
    }
    if preset_name.is_none() && config_text.is_none() {
        return Err(Error::Parse("either a config file or a preset is required".into()));
    }
    let file: ConfigFile = serde_json::from_value(doc).map_err(|e| Error::Parse(e.to_string()))?;
    file.into_spec()
}

impl ConfigFile {
    pub fn into_spec(self) -> Result<ExperimentSpec> {
        let net = &self.network;
        if !(net.user_to_relay_power_ratio.is_finite() && net.user_to_relay_power_ratio > 0.0) {
            return Err(Error::Config("network.user_to_relay_power_ratio must be > 0".into()));
        }
        let users = net.power_allocation.len();
        let network = NetworkConfig {
            power_allocation: net.power_allocation.clone(),
            r1: db_to_linear(net.snr_db),
            // r2 / r1 = (P_R / σ_t²) / (P / σ_r²) with P = n P_R
            c: net.sigma_r2 / (net.user_to_relay_power_ratio * net.sigma_t2),
            sigma_r2: net.sigma_r2,
            sigma_t2: net.sigma_t2,
        };
        network.validate()?;
        let distances = self.fading.distances.clone().unwrap_or_else(|| vec![1.0; users]);
        let fading = FadingParams::new(self.fading.alpha, self.fading.beta, self.fading.nu, distances)?;
        fading.validate(users)?;
        self.impairments.validate()?;
        if self.trials.workers == 0 {
            return Err(Error::Config("trials.workers must be >= 1".into()));
        }

        let ex = self.experiment;
        let set = |present: bool, key: &str, kind: &str| -> Result<()> {
            if present {
                Err(Error::Config(format!("experiment.{key} is not allowed for a {kind} (one sweep dimension per experiment)")))
            } else {
                Ok(())
            }
        };
        let sweep = match ex.kind {
            ExperimentKind::SnrSweep => {
                set(ex.kappa.is_some(), "kappa", "snr-sweep")?;
                set(ex.grid.is_some(), "grid", "snr-sweep")?;
                let range = ex.snr_db.ok_or_else(|| Error::Config("experiment.snr_db is required for snr-sweep".into()))?;
                let profiles = match ex.profiles {
                    Some(p) if p.is_empty() => return Err(Error::Config("experiment.profiles must not be empty".into())),
                    Some(p) => p,
                    None => vec![NamedProfile { name: condition_label(&self.impairments).into(), profile: self.impairments }],
                };
                for p in &profiles {
                    p.profile.validate()?;
                }
                Sweep::Snr { snr_db: range.values("snr_db")?, profiles }
            }
            ExperimentKind::KappaSweep => {
                set(ex.snr_db.is_some(), "snr_db", "kappa-sweep")?;
                set(ex.grid.is_some(), "grid", "kappa-sweep")?;
                set(ex.profiles.is_some(), "profiles", "kappa-sweep")?;
                let range = ex.kappa.ok_or_else(|| Error::Config("experiment.kappa is required for kappa-sweep".into()))?;
                let values = range.values("kappa")?;
                for &k in &values {
                    ImpairmentProfile::uniform(k).validate()?;
                }
                let stages = ex.kappa_stages.unwrap_or_else(|| vec![Stage::Ut, Stage::Ur, Stage::Rt, Stage::Rr]);
                Sweep::Kappa { values, stages }
            }
            ExperimentKind::PlacementSweep => {
                set(ex.snr_db.is_some(), "snr_db", "placement-sweep")?;
                set(ex.kappa.is_some(), "kappa", "placement-sweep")?;
                set(ex.profiles.is_some(), "profiles", "placement-sweep")?;
                let geometry = ex.geometry.unwrap_or_else(|| Geometry::square(5.0, 10.0));
                geometry.validate()?;
                if geometry.user_positions.len() != users {
                    return Err(Error::Config(format!(
                        "experiment.geometry has {} users but network.power_allocation has {users}",
                        geometry.user_positions.len()
                    )));
                }
                if ex.schemes.len() != 1 {
                    return Err(Error::Config("a placement-sweep evaluates exactly one scheme".into()));
                }
                let grid = ex.grid.unwrap_or_default();
                grid.points()?;
                Sweep::Placement { geometry, grid }
            }
            ExperimentKind::MomentsCheck => {
                set(ex.snr_db.is_some(), "snr_db", "moments-check")?;
                set(ex.kappa.is_some(), "kappa", "moments-check")?;
                set(ex.grid.is_some(), "grid", "moments-check")?;
                Sweep::Moments
            }
        };
        if ex.schemes.is_empty() {
            return Err(Error::Config("experiment.schemes must not be empty".into()));
        }
        Ok(ExperimentSpec {
            kind: ex.kind,
            network,
            fading,
            impairments: self.impairments,
            trials: self.trials,
            sweep,
            schemes: ex.schemes,
            oma_model: ex.oma_model,
            output: ex.output,
        })
    }
}

fn condition_label(imp: &ImpairmentProfile) -> &'static str {
    if imp.is_ideal() {
        Condition::Ideal.label()
    } else {
        Condition::NonIdeal.label()
    }
}

/// Decimal rendering with 9 significant digits.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new leading digit (9.99…→10.0…)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|c| *c == '0').count();
    if digits > 9 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(format_sig9).unwrap_or_default()
}

/// Result of running one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: String,
    pub summary: String,
}

#[derive(Debug, Clone, PartialEq)]
struct Row {
    x: f64,
    scheme: SchemeName,
    condition: String,
    analytical: Option<f64>,
    mc: Option<(f64, f64)>,
}

fn evaluate_row(
    spec: &ExperimentSpec,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    engine: EngineChoice,
) -> Result<Vec<(SchemeName, Option<f64>, Option<(f64, f64)>)>> {
    let moments = order_stat_moments(&spec.fading, cfg.users())?;
    let noma_mc: Option<AsrResult> = if engine.monte_carlo(&spec.trials) {
        Some(simulate_asr(cfg, &spec.fading, imp, &spec.trials)?.result)
    } else {
        None
    };
    spec.schemes
        .iter()
        .map(|&scheme| {
            let analytical = if engine.analytical() {
                Some(match scheme {
                    SchemeName::Noma => asr(&moments, cfg, imp, Condition::NonIdeal)?.total,
                    SchemeName::Oma => asr_oma(&moments, cfg, imp, spec.oma_model)?.total,
                })
            } else {
                None
            };
            let mc = match (&noma_mc, scheme, spec.oma_model) {
                (Some(r), SchemeName::Noma, _) => Some((r.total, r.stderr.unwrap_or(0.0))),
                (Some(r), SchemeName::Oma, OmaScheme::SlotScaled) => {
                    let o = slot_scaled_from_noma(r);
                    Some((o.total, o.stderr.unwrap_or(0.0)))
                }
                _ => None,
            };
            Ok((scheme, analytical, mc))
        })
        .collect()
}

fn scheme_label(s: SchemeName) -> &'static str {
    match s {
        SchemeName::Noma => "noma",
        SchemeName::Oma => "oma",
    }
}

fn rows_to_csv(header: &str, rows: &[Row]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_sig9(r.x),
            scheme_label(r.scheme),
            r.condition,
            opt(r.analytical),
            opt(r.mc.map(|m| m.0)),
            opt(r.mc.map(|m| m.1)),
        );
    }
    out
}

fn rows_summary(axis: &str, rows: &[Row]) -> String {
    let mut s = format!("{axis:>8}  {:<6} {:<12} {:>12} {:>12} {:>10}\n", "scheme", "condition", "analytical", "monte-carlo", "stderr");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>8}  {:<6} {:<12} {:>12} {:>12} {:>10}",
            format_sig9(r.x),
            scheme_label(r.scheme),
            r.condition,
            r.analytical.map(|v| format!("{v:.4}")).unwrap_or_else(|| "-".into()),
            r.mc.map(|m| format!("{:.4}", m.0)).unwrap_or_else(|| "-".into()),
            r.mc.map(|m| format!("{:.1e}", m.1)).unwrap_or_else(|| "-".into()),
        );
    }
    s
}

fn kappa_profile(kappa: f64, stages: &[Stage]) -> ImpairmentProfile {
    let mut p = ImpairmentProfile::IDEAL;
    for s in stages {
        match s {
            Stage::Ut => p.kappa_ut = kappa,
            Stage::Ur => p.kappa_ur = kappa,
            Stage::Rt => p.kappa_rt = kappa,
            Stage::Rr => p.kappa_rr = kappa,
        }
    }
    p
}

/// Runs the experiment and renders its CSV and a human-readable summary.
pub fn run(spec: &ExperimentSpec, engine: EngineChoice) -> Result<RunOutput> {
    match &spec.sweep {
        Sweep::Snr { snr_db, profiles } => {
            let mut rows = Vec::new();
            for &db in snr_db {
                let cfg = NetworkConfig { r1: db_to_linear(db), ..spec.network.clone() };
                for p in profiles {
                    for (scheme, analytical, mc) in evaluate_row(spec, &cfg, &p.profile, engine)? {
                        rows.push(Row { x: db, scheme, condition: p.name.clone(), analytical, mc });
                    }
                }
            }
            Ok(RunOutput { csv: rows_to_csv(SNR_HEADER, &rows), summary: rows_summary("snr_db", &rows) })
        }
        Sweep::Kappa { values, stages } => {
            let mut rows = Vec::new();
            for &k in values {
                let imp = kappa_profile(k, stages);
                for (scheme, analytical, mc) in evaluate_row(spec, &spec.network, &imp, engine)? {
                    rows.push(Row { x: k, scheme, condition: condition_label(&imp).into(), analytical, mc });
                }
            }
            Ok(RunOutput { csv: rows_to_csv(KAPPA_HEADER, &rows), summary: rows_summary("kappa", &rows) })
        }
        Sweep::Placement { geometry, grid } => {
            let engine = if engine == EngineChoice::MonteCarlo {
                if spec.trials.trials == 0 {
                    return Err(Error::Config("trials.trials must be > 0 for the Monte Carlo engine".into()));
                }
                Engine::MonteCarlo(spec.trials)
            } else {
                Engine::Analytical
            };
            let scheme = match spec.schemes[0] {
                SchemeName::Noma => Scheme::Noma,
                SchemeName::Oma => Scheme::Oma(spec.oma_model),
            };
            let surface = sweep_grid(geometry, grid, &spec.network, &spec.fading, &spec.impairments, &engine, scheme)?;
            let mut csv = String::from(PLACEMENT_HEADER);
            csv.push('\n');
            for p in &surface.points {
                let _ = writeln!(csv, "{},{},{}", format_sig9(p.x), format_sig9(p.y), format_sig9(p.asr));
            }
            let best = surface.argmax;
            let summary = format!(
                "{} points, scheme {}, max ASR {} at (x={}, y={})\n",
                surface.points.len(),
                scheme.label(),
                format_sig9(best.asr),
                format_sig9(best.x),
                format_sig9(best.y)
            );
            Ok(RunOutput { csv, summary })
        }
        Sweep::Moments => {
            let m = spec.network.users();
            let closed = order_stat_moments(&spec.fading, m)?;
            let empirical = if engine.monte_carlo(&spec.trials) {
                Some(empirical_moments(&spec.fading, m, &spec.trials)?)
            } else {
                None
            };
            let mut csv = String::from(MOMENTS_HEADER);
            csv.push('\n');
            let mut summary = format!("{:>3} {:>6} {:>14} {:>14} {:>10} {:>14} {:>6}\n", "i", "moment", "closed-form", "quadrature", "rel-err", "monte-carlo", "z");
            for i in 1..=m {
                for (order, name) in [(1u32, "psi"), (2, "omega")] {
                    let cf = if order == 1 { closed.psi[i - 1] } else { closed.omega[i - 1] };
                    let quad = moment_oracle(&spec.fading, m, i, order)?;
                    let rel = (cf - quad).abs() / quad.abs();
                    let mc = empirical.as_ref().map(|e| {
                        let s = if order == 1 { e[i - 1].0 } else { e[i - 1].1 };
                        (s.mean(), s.stderr())
                    });
                    let _ = writeln!(
                        csv,
                        "{i},{name},{},{},{},{},{}",
                        format_sig9(cf),
                        format_sig9(quad),
                        format_sig9(rel),
                        opt(mc.map(|v| v.0)),
                        opt(mc.map(|v| v.1)),
                    );
                    let z = mc.map(|(mean, se)| format!("{:.2}", (mean - cf) / se)).unwrap_or_else(|| "-".into());
                    let _ = writeln!(
                        summary,
                        "{i:>3} {name:>6} {cf:>14.8} {quad:>14.8} {rel:>10.1e} {:>14} {z:>6}",
                        mc.map(|v| format!("{:.8}", v.0)).unwrap_or_else(|| "-".into())
                    );
                }
            }
            Ok(RunOutput { csv, summary })
        }
    }
}
