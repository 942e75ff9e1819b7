//! Independent numerical check of the order-statistic moments.
//!
//! Integrates `x^p · f_(i)(x)` with
//! `f_(i) = M! / ((i-1)! (M-i)!) · F^{i-1} (1-F)^{M-i} f`, using the Gamma
//! density and distribution function from `statrs`. Nothing here touches the
//! series expansion in `moments`.

use statrs::distribution::{Continuous, ContinuousCDF, Gamma};


use super::{check_order_index, FadingParams};
use crate::error::{Error, Result};

const TARGET_REL_ERROR: f64 = 1e-6;
const WORKING_REL_ERROR: f64 = 1e-11;
const MAX_SUBDIVISIONS: usize = 4000;

/// Order-statistic moment of order `moment_order` ∈ {1, 2} for position `i`
/// (1-based), including the path loss of that position.
pub fn moment_oracle(params: &FadingParams, users: usize, i: usize, moment_order: u32) -> Result<f64> {
    params.validate(users)?;
    check_order_index(users, i)?;
    if !(1..=2).contains(&moment_order) {
        return Err(Error::Argument(format!("moment order must be 1 or 2, got {moment_order}")));
    }
    let gamma = Gamma::new(params.alpha as f64, 1.0 / params.beta)
        .map_err(|e| Error::Config(format!("gamma distribution: {e}")))?;

    let lead = ln_factorial(users) - ln_factorial(i - 1) - ln_factorial(users - i);
    let below = (i - 1) as i32;
    let above = (users - i) as i32;
    let p = moment_order as i32;
    let integrand = |x: f64| {
        x.powi(p) * (lead + gamma.ln_pdf(x)).exp() * gamma.cdf(x).powi(below) * gamma.sf(x).powi(above)
    };

    // Beyond alpha + 60 scale units the Gamma tail is below e^-60.
    let upper = params.beta * (params.alpha as f64 + 60.0);
    let (value, err) = integrate_adaptive(integrand, 0.0, upper, WORKING_REL_ERROR, MAX_SUBDIVISIONS);
    let achieved = if value != 0.0 { err / value.abs() } else { err };
    if !(achieved <= TARGET_REL_ERROR) {
        return Err(Error::Quadrature { achieved, target: TARGET_REL_ERROR });
    }
    Ok(value * params.path_loss(i - 1).powi(p))
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss-Kronrod integration. Returns the estimate and its
/// absolute error bound.
pub(crate) fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> (f64, f64) {
    let pieces = 32;
    let width = (b - a) / pieces as f64;
    let mut intervals: Vec<(f64, f64, f64, f64)> = (0..pieces)
        .map(|k| {
            let lo = a + k as f64 * width;
            let hi = if k + 1 == pieces { b } else { lo + width };
            let (v, e) = gk15(&f, lo, hi);
            (lo, hi, v, e)
        })
        .collect();

    loop {
        let total: f64 = intervals.iter().map(|iv| iv.2).sum();
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        if err <= rel_tol * total.abs() || err == 0.0 || intervals.len() >= max_intervals {
            return (total, err);
        }
        let worst = intervals
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(idx, _)| idx)
            .unwrap();
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        intervals.push((lo, mid, v1, e1));
        intervals.push((mid, hi, v2, e2));
    }
}
