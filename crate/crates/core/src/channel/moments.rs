//! Closed-form moments of ordered Gamma gains.
//!
//! For the `m`-th smallest of `M` i.i.d. Gamma(α, β) draws with integer α,
//! the order-statistic density is expanded with
//! `F^{m-1} = Σ_n C(m-1, n) (-1)^n (1-F)^n` and
//! `(1-F)^N = e^{-Nx/β} Σ_p multinom(N; p) Π_g (x^g / (g! β^g))^{p_g}`,
//! where `p` ranges over compositions of `N = n + M - m` into α parts.
//! Each term then integrates to a Gamma function with total polynomial
//! degree `S = Σ_g g·p_g`.

use statrs::function::gamma::ln_gamma;

use super::{check_order_index, FadingParams, OrderStatMoments};
use crate::error::{Error, Result};

const EXACT_FACTORIALS: usize = 21;

fn factorial_table() -> &'static [u64; EXACT_FACTORIALS] {
    static TABLE: std::sync::OnceLock<[u64; EXACT_FACTORIALS]> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1u64; EXACT_FACTORIALS];
        for k in 1..EXACT_FACTORIALS {
            t[k] = t[k - 1] * k as u64;
        }
        t
    })
}

/// `n!`, exact up to 20 and through `ln Γ` above.
pub(crate) fn factorial(n: u32) -> f64 {
    match factorial_table().get(n as usize) {
        Some(&f) => f as f64,
        None => ln_gamma(n as f64 + 1.0).exp(),
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k as u128 {
        acc = acc * (n as u128 - j) / (j + 1);
    }
    acc as f64
}

/// `N! / (p_0! ... p_{α-1}!)`.
fn multinomial(total: u32, parts: &[u32]) -> f64 {
    if (total as usize) < EXACT_FACTORIALS {
        let t = factorial_table();
        let denom: u64 = parts.iter().map(|&p| t[p as usize]).product();
        (t[total as usize] / denom) as f64
    } else {
        let ln = ln_gamma(total as f64 + 1.0)
            - parts.iter().map(|&p| ln_gamma(p as f64 + 1.0)).sum::<f64>();
        ln.exp()
    }
}

/// All compositions of `total` into `parts` nonnegative parts, in
/// lexicographic order.
pub(crate) fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    fn fill(rest: u32, slot: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slot + 1 == cur.len() {
            cur[slot] = rest;
            out.push(cur.clone());
            return;
        }
        for v in 0..=rest {
            cur[slot] = v;
            fill(rest - v, slot + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    fill(total, 0, &mut vec![0; parts], &mut out);
    out
}

/// Raw moment `E[X_(m)^q]` of the `m`-th order statistic (1-based) before
/// path loss.
pub(crate) fn order_stat_raw_moment(alpha: u32, beta: f64, users: usize, m: usize, q: u32) -> Result<f64> {
    check_order_index(users, m)?;
    let big_m = users as u32;
    let m = m as u32;
    let lead = factorial(big_m) / (factorial(m - 1) * factorial(big_m - m));
    let norm = factorial(alpha - 1) * beta.powi(alpha as i32);

    let mut sum = 0.0;
    for n in 0..m {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let outer = binomial(m - 1, n) * sign;
        let big_n = n + big_m - m;
        for p in compositions(big_n, alpha as usize) {
            let mut weight = 1.0;
            let mut degree = 0u32;
            for (g, &pg) in p.iter().enumerate() {
                weight *= (1.0 / (factorial(g as u32) * beta.powi(g as i32))).powi(pg as i32);
                degree += g as u32 * pg;
            }
            let power = q + alpha + degree;
            let term = outer
                * multinomial(big_n, &p)
                * weight
                * factorial(power - 1)
                * (beta / (big_n + 1) as f64).powi(power as i32);
            if !term.is_finite() {
                return Err(Error::NumericRange {
                    term: format!("order-statistic moment term n={n}, p={p:?} (M={users}, m={m}, q={q})"),
                });
            }
            sum += term;
        }
    }
    let value = lead * sum / norm;
    if !value.is_finite() {
        return Err(Error::NumericRange {
            term: format!("order-statistic moment normalisation (M={users}, m={m}, q={q})"),
        });
    }
    Ok(value)
}

/// First moment `Ψ_i` of the `i`-th ordered channel gain (1-based `i`).
pub fn psi_moment(params: &FadingParams, users: usize, i: usize) -> Result<f64> {
    params.validate(users)?;
    check_order_index(users, i)?;
    Ok(order_stat_raw_moment(params.alpha, params.beta, users, i, 1)? * params.path_loss(i - 1))
}

/// Second moment `Ω_i` of the `i`-th ordered channel gain (1-based `i`).
///
/// `ρ_i²` carries the squared attenuation.
pub fn omega_moment(params: &FadingParams, users: usize, i: usize) -> Result<f64> {
    params.validate(users)?;
    check_order_index(users, i)?;
    let loss = params.path_loss(i - 1);
    Ok(order_stat_raw_moment(params.alpha, params.beta, users, i, 2)? * loss * loss)
}

/// `Ψ_i` and `Ω_i` for every order position.
pub fn order_stat_moments(params: &FadingParams, users: usize) -> Result<OrderStatMoments> {
    params.validate(users)?;
    let mut psi = Vec::with_capacity(users);
    let mut omega = Vec::with_capacity(users);
    for i in 1..=users {
        psi.push(psi_moment(params, users, i)?);
        omega.push(omega_moment(params, users, i)?);
    }
    Ok(OrderStatMoments { psi, omega })
}
