//! Coverage probability and spatial throughput of downlink cellular
//! networks under multi-slope pathloss with a base-station/user antenna
//! height difference.
//!
//! Base stations form a homogeneous Poisson field; the typical user
//! attaches to the nearest one and decodes when its SIR clears a
//! threshold. The crate provides:
//!
//! * [`special`] — the restricted hypergeometric kernel behind every
//!   closed form;
//! * [`pathloss`] — single-, dual- and multi-slope attenuation models
//!   with an antenna height difference;
//! * [`analytic`] — coverage probability, spatial throughput, and
//!   analytic coverage bounds;
//! * [`montecarlo`] — a reproducible brute-force SIR simulator that
//!   independently validates the analytics;
//! * [`density`] — critical deployment densities, closed-form and
//!   numerical, with and without a coverage constraint;
//! * [`quad`] — the adaptive Gauss-Kronrod integrator used by the
//!   radial expectations.

pub mod analytic;
pub mod density;
pub mod montecarlo;
pub mod pathloss;
pub mod quad;
pub mod special;

pub use analytic::{
    coverage_probability, cp_bounds_mspm, cp_dspm, cp_mspm, cp_sspm, radial_expectation,
    spatial_throughput, CpBounds, NetworkConfig,
};
pub use density::{
    critical_density_numeric, lambda_dagger, lambda_star, necessary_condition, CriticalDensities,
    QosConstraint,
};
pub use montecarlo::{estimate_cp, estimate_st, CpEstimate, FadingModel, StEstimate};
pub use pathloss::{Link, PathlossModel};
pub use special::{hyp2f1_1b, omega1, omega2};
