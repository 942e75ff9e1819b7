//! UAV placement sweep over a horizontal grid at fixed altitude.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{asr_oma, slot_scaled_from_noma, OmaScheme};
use crate::channel::{order_stat_moments, FadingParams, OrderStatMoments};
use crate::error::{Error, Result};
use crate::montecarlo::{simulate_asr, TrialConfig};
use crate::rate::{asr, Condition};
use crate::signal::{ImpairmentProfile, NetworkConfig};

/// Ground users and the UAV relay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Geometry {
    pub user_positions: Vec<(f64, f64)>,
    pub uav_xy: (f64, f64),
    pub uav_height: f64,
}

impl Geometry {
    /// Users on the corners of a square of side `2 * half_side` centred on
    /// the origin, UAV above the centre.
    pub fn square(half_side: f64, uav_height: f64) -> Self {
        let s = half_side;
        Geometry { user_positions: vec![(s, s), (s, -s), (-s, s), (-s, -s)], uav_xy: (0.0, 0.0), uav_height }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.uav_height.is_finite() && self.uav_height > 0.0) {
            return Err(Error::Config(format!("uav_height must be > 0, got {}", self.uav_height)));
        }
        let finite = |p: &(f64, f64)| p.0.is_finite() && p.1.is_finite();
        if !self.user_positions.iter().all(finite) || !finite(&self.uav_xy) {
            return Err(Error::Config("positions must be finite".into()));
        }
        Ok(())
    }

    pub fn with_uav_at(&self, x: f64, y: f64) -> Self {
        Geometry { uav_xy: (x, y), ..self.clone() }
    }
}

/// Euclidean UAV-to-user distances, in user order.
pub fn distances(geom: &Geometry) -> Vec<f64> {
    let (ux, uy) = geom.uav_xy;
    geom.user_positions
        .iter()
        .map(|&(x, y)| ((ux - x).powi(2) + (uy - y).powi(2) + geom.uav_height.powi(2)).sqrt())
        .collect()
}

/// Assigns distances to order positions: the farthest user is the weakest
/// (position 1).
pub fn order_distances(mut d: Vec<f64>) -> Vec<f64> {
    d.sort_by(|a, b| b.total_cmp(a));
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { x_min: -20.0, x_max: 20.0, y_min: -20.0, y_max: 20.0, step: 1.0 }
    }
}

impl GridSpec {
    pub fn single(x: f64, y: f64) -> Self {
        GridSpec { x_min: x, x_max: x, y_min: y, y_max: y, step: 1.0 }
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| lo + i as f64 * step).collect()
    }

    /// Row-major grid points (x outer, y inner).
    pub fn points(&self) -> Result<Vec<(f64, f64)>> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Config(format!("grid step must be > 0, got {}", self.step)));
        }
        if !(self.x_max >= self.x_min && self.y_max >= self.y_min) {
            return Err(Error::Config("grid ranges must be nonempty (max >= min)".into()));
        }
        let xs = Self::axis(self.x_min, self.x_max, self.step);
        let ys = Self::axis(self.y_min, self.y_max, self.step);
        Ok(xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Engine {
    Analytical,
    MonteCarlo(TrialConfig),
}

/// Multiple-access scheme whose sum rate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Noma,
    Oma(OmaScheme),
}

impl Scheme {
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::Noma => "noma",
            Scheme::Oma(_) => "oma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub x: f64,
    pub y: f64,
    pub asr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Surface {
    /// Row-major, matching [`GridSpec::points`].
    pub points: Vec<SurfacePoint>,
    /// First point attaining the maximum.
    pub argmax: SurfacePoint,
}

/// Sum rate at one UAV position.
pub fn asr_at(
    geom: &Geometry,
    cfg: &NetworkConfig,
    fading: &FadingParams,
    imp: &ImpairmentProfile,
    engine: &Engine,
    scheme: Scheme,
) -> Result<f64> {
    let fading = FadingParams { distances: order_distances(distances(geom)), ..fading.clone() };
    evaluate(&fading, cfg, imp, engine, scheme, None)
}

fn evaluate(
    fading: &FadingParams,
    cfg: &NetworkConfig,
    imp: &ImpairmentProfile,
    engine: &Engine,
    scheme: Scheme,
    raw: Option<&OrderStatMoments>,
) -> Result<f64> {
    let m = cfg.users();
    match engine {
        Engine::Analytical => {
            let moments = match raw {
                Some(raw) => scale_moments(raw, fading),
                None => order_stat_moments(fading, m)?,
            };
            let result = match scheme {
                Scheme::Noma => asr(&moments, cfg, imp, Condition::NonIdeal)?,
                Scheme::Oma(s) => asr_oma(&moments, cfg, imp, s)?,
            };
            Ok(result.total)
        }
        Engine::MonteCarlo(tc) => {
            let sim = simulate_asr(cfg, fading, imp, tc)?;
            match scheme {
                Scheme::Noma => Ok(sim.result.total),
                Scheme::Oma(OmaScheme::SlotScaled) => Ok(slot_scaled_from_noma(&sim.result).total),
                Scheme::Oma(OmaScheme::Orthogonal) => Err(Error::Argument(
                    "Monte Carlo is not available for the orthogonal OMA scheme".into(),
                )),
            }
        }
    }
}

fn scale_moments(raw: &OrderStatMoments, fading: &FadingParams) -> OrderStatMoments {
    let loss: Vec<f64> = (0..raw.users()).map(|i| fading.path_loss(i)).collect();
    OrderStatMoments {
        psi: raw.psi.iter().zip(&loss).map(|(p, l)| p * l).collect(),
        omega: raw.omega.iter().zip(&loss).map(|(o, l)| o * l * l).collect(),
    }
}

/// Moves the UAV over `grid` and evaluates the sum rate at every point.
pub fn sweep_grid(
    template: &Geometry,
    grid: &GridSpec,
    cfg: &NetworkConfig,
    fading: &FadingParams,
    imp: &ImpairmentProfile,
    engine: &Engine,
    scheme: Scheme,
) -> Result<Surface> {
    template.validate()?;
    cfg.validate()?;
    imp.validate()?;
    let m = cfg.users();
    if template.user_positions.len() != m {
        return Err(Error::Config(format!(
            "geometry has {} users but the network has {m}",
            template.user_positions.len()
        )));
    }
    let points = grid.points()?;
    // Unattenuated moments, rescaled per grid point.
    let raw = order_stat_moments(&FadingParams::uniform(fading.alpha, fading.beta, fading.nu, 0.0, m), m)?;

    let at = |&(x, y): &(f64, f64)| -> Result<SurfacePoint> {
        let geom = template.with_uav_at(x, y);
        let local = FadingParams { distances: order_distances(distances(&geom)), ..fading.clone() };
        let asr = evaluate(&local, cfg, imp, engine, scheme, Some(&raw))
            .map_err(|e| Error::GridPoint { x, y, source: Box::new(e) })?;
        Ok(SurfacePoint { x, y, asr })
    };
    let values: Vec<SurfacePoint> = match engine {
        Engine::Analytical => points.par_iter().map(at).collect::<Result<_>>()?,
        // the simulator already spreads trials over its own workers
        Engine::MonteCarlo(_) => points.iter().map(at).collect::<Result<_>>()?,
    };
    let argmax = values
        .iter()
        .copied()
        .reduce(|best, p| if p.asr > best.asr { p } else { best })
        .expect("grid has at least one point");
    Ok(Surface { points: values, argmax })
}
