use rand::Rng;

use super::{ChannelRealization, FadingParams};
use crate::error::{Error, Result};

/// Erlang draw as a sum of `shape` exponentials with mean `scale`.
pub fn sample_gamma<R: Rng + ?Sized>(shape: u32, scale: f64, rng: &mut R) -> f64 {
    let mut acc = 0.0;
    for _ in 0..shape {
        // (0, 1] keeps the logarithm finite.
        let u = 1.0 - rng.random::<f64>();
        acc -= u.ln();
    }
    scale * acc
}

/// Draws `M` i.i.d. `|h|²` values, sorts them ascending and attenuates the
/// `i`-th smallest by the path loss of order position `i`.
pub fn sample_channel_gains<R: Rng + ?Sized>(
    params: &FadingParams,
    users: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    if users < 2 {
        return Err(Error::Config(format!("a network needs at least 2 users, got {users}")));
    }
    params.validate(users)?;
    let mut rho: Vec<f64> = (0..users).map(|_| sample_gamma(params.alpha, params.beta, rng)).collect();
    rho.sort_by(f64::total_cmp);
    for (i, r) in rho.iter_mut().enumerate() {
        *r *= params.path_loss(i);
    }
    ChannelRealization::new(rho)
}
