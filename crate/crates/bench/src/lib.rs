//! Shared fixtures for the benchmark targets.

use cellcov_core::{FadingModel, NetworkConfig, PathlossModel};

pub fn sspm_config(lambda: f64, ahd: f64) -> NetworkConfig {
    NetworkConfig::new(
        lambda,
        ahd,
        1.0,
        0.2,
        PathlossModel::single_slope(4.0).expect("valid"),
        FadingModel::Rayleigh,
    )
    .expect("valid")
}

pub fn dspm_config(lambda: f64, ahd: f64) -> NetworkConfig {
    NetworkConfig::new(
        lambda,
        ahd,
        1.0,
        0.2,
        PathlossModel::dual_slope(1.5, 4.0, 10.0).expect("valid"),
        FadingModel::Rayleigh,
    )
    .expect("valid")
}

pub fn mspm_config(lambda: f64, ahd: f64) -> NetworkConfig {
    NetworkConfig::new(
        lambda,
        ahd,
        1.0,
        0.2,
        PathlossModel::new(vec![1.5, 3.0, 4.5], vec![10.0, 50.0]).expect("valid"),
        FadingModel::Rayleigh,
    )
    .expect("valid")
}
