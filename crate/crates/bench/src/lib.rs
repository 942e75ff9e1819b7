//! Benchmark fixtures shared by the criterion targets.

use uav_noma::{FadingParams, NetworkConfig};

/// Default evaluation point: Gamma(2, 3) fading, unit distances, ν = 3.
pub fn section_defaults(users: usize, snr_db: f64) -> (NetworkConfig, FadingParams) {
    let a = match users {
        3 => vec![0.5, 0.3, 0.2],
        4 => vec![0.5, 0.3, 0.15, 0.05],
        5 => vec![0.5, 0.2, 0.15, 0.1, 0.05],
        _ => panic!("no default power allocation for {users} users"),
    };
    (NetworkConfig::new(a, snr_db), FadingParams::uniform(2, 3.0, 3.0, 1.0, users))
}
