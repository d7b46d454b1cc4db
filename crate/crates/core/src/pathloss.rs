//! Multi-slope pathloss models and link attenuation.
//!
//! A model is a piecewise power law over 2-D ground distance: within
//! segment `n` (breakpoints `R_n <= r < R_{n+1}`, `R_0 = 0`,
//! `R_N = inf`) the gain is `K_n d^{-alpha_n}` evaluated at the 3-D
//! antenna distance `d = sqrt(r^2 + dh^2)`. The continuity constants are
//! `K_0 = 1`, `K_n = prod_{i<=n} R_i^{alpha_i - alpha_{i-1}}`, chosen so
//! the gain is continuous at every breakpoint when the antenna height
//! difference is zero.
//!
//! Segment membership is decided by the 2-D distance, equivalently by the
//! 3-D distance against the lifted breakpoints `sqrt(R_n^2 + dh^2)`. With
//! a nonzero height difference the gain therefore has small jumps at the
//! breakpoints (the constants enforce continuity at `R_n`, not at the
//! lifted radii); the coverage integrals and the simulator share this
//! convention.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("at least one pathloss exponent is required")]
    NoExponents,
    #[error("expected {expected} breakpoints for {segments} exponents, got {actual}")]
    BreakpointCount { expected: usize, segments: usize, actual: usize },
    #[error("pathloss exponents must be finite, nonnegative and non-decreasing: {0:?}")]
    UnorderedExponents(Vec<f64>),
    #[error("the last pathloss exponent must exceed 2 for the interference integral to converge, got {0}")]
    LastExponentTooSmall(f64),
    #[error("breakpoints must be finite, positive and strictly increasing: {0:?}")]
    UnorderedBreakpoints(Vec<f64>),
}

/// Piecewise power-law attenuation over ground distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathlossModel {
    exponents: Vec<f64>,
    breakpoints: Vec<f64>,
    constants: Vec<f64>,
}

impl PathlossModel {
    /// Builds a model from exponents `alpha_0..alpha_{N-1}` and interior
    /// breakpoints `R_1..R_{N-1}` (meters), deriving the continuity
    /// constants.
    pub fn new(exponents: Vec<f64>, breakpoints: Vec<f64>) -> Result<Self, ModelError> {
        if exponents.is_empty() {
            return Err(ModelError::NoExponents);
        }
        if breakpoints.len() != exponents.len() - 1 {
            return Err(ModelError::BreakpointCount {
                expected: exponents.len() - 1,
                segments: exponents.len(),
                actual: breakpoints.len(),
            });
        }
        let ordered = exponents.iter().all(|a| a.is_finite() && *a >= 0.0)
            && exponents.windows(2).all(|w| w[0] <= w[1]);
        if !ordered {
            return Err(ModelError::UnorderedExponents(exponents));
        }
        let last = *exponents.last().unwrap();
        if last <= 2.0 {
            return Err(ModelError::LastExponentTooSmall(last));
        }
        let increasing = breakpoints.iter().all(|r| r.is_finite() && *r > 0.0)
            && breakpoints.windows(2).all(|w| w[0] < w[1]);
        if !increasing {
            return Err(ModelError::UnorderedBreakpoints(breakpoints));
        }

        let mut constants = vec![1.0];
        for n in 1..exponents.len() {
            let k = constants[n - 1] * breakpoints[n - 1].powf(exponents[n] - exponents[n - 1]);
            constants.push(k);
        }
        Ok(Self { exponents, breakpoints, constants })
    }

    /// Single-slope model `d^{-alpha}`.
    pub fn single_slope(alpha: f64) -> Result<Self, ModelError> {
        Self::new(vec![alpha], vec![])
    }

    /// Dual-slope model with corner distance `r1`.
    pub fn dual_slope(alpha0: f64, alpha1: f64, r1: f64) -> Result<Self, ModelError> {
        Self::new(vec![alpha0, alpha1], vec![r1])
    }

    /// Number of slope segments `N`.
    pub fn segment_count(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Continuity constants `K_0..K_{N-1}`.
    pub fn constants(&self) -> &[f64] {
        &self.constants
    }

    /// Index `n` of the segment with `R_n <= r2d < R_{n+1}`; a breakpoint
    /// belongs to the upper segment.
    pub fn segment_index(&self, r2d: f64) -> usize {
        debug_assert!(r2d >= 0.0);
        self.breakpoints.iter().take_while(|r| **r <= r2d).count()
    }

    /// Breakpoint `R_n` lifted to 3-D distance, `sqrt(R_n^2 + ahd^2)`.
    /// `n` ranges over `1..N`; the implicit `R_0 = 0` lifts to `ahd`.
    pub fn lifted_breakpoint(&self, n: usize, ahd: f64) -> f64 {
        self.breakpoints[n - 1].hypot(ahd)
    }

    /// Linear attenuation of a link: `K_n d3d^{-alpha_n}` with the
    /// segment chosen by the 2-D distance.
    ///
    /// Panics on a degenerate link (`d3d = 0` with a positive exponent),
    /// where the gain would be infinite.
    pub fn gain(&self, link: Link) -> f64 {
        let n = self.segment_index(link.r2d());
        let d = link.d3d();
        assert!(
            d > 0.0 || self.exponents[n] == 0.0,
            "link gain is unbounded at zero antenna distance"
        );
        self.constants[n] * d.powf(-self.exponents[n])
    }
}

/// A base-station/user link: 2-D ground distance plus the fixed antenna
/// height difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    r2d: f64,
    ahd: f64,
}

impl Link {
    /// Panics if either distance is negative or non-finite.
    pub fn new(r2d: f64, ahd: f64) -> Self {
        assert!(r2d.is_finite() && r2d >= 0.0, "ground distance must be finite and nonnegative");
        assert!(ahd.is_finite() && ahd >= 0.0, "antenna height difference must be finite and nonnegative");
        Self { r2d, ahd }
    }

    pub fn r2d(&self) -> f64 {
        self.r2d
    }

    pub fn ahd(&self) -> f64 {
        self.ahd
    }

    /// 3-D antenna distance `sqrt(r2d^2 + ahd^2)`.
    pub fn d3d(&self) -> f64 {
        self.r2d.hypot(self.ahd)
    }
}
