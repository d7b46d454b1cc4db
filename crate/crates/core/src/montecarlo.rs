//! Brute-force SIR simulator, the independent check on every analytic
//! expression in this crate.
//!
//! The simulation is conditioned on the serving link: the serving ground
//! distance is drawn from the contact law, then interferers are a
//! Poisson number of points on the annulus between the serving distance
//! and the simulation window, radii distributed with density
//! proportional to `r` (angles never enter the SIR). This mirrors the
//! structure of the analytic derivation, keeps the serving-distance law
//! exact, and leaves no empty-network edge case for the serving link.
//!
//! Window rule: `r_sim = max(sqrt(2000/(pi lambda)), 5 R_last, 10 dh,
//! 2 r0)` — at least 2000 expected interferers plus geometric safety
//! margins. The truncated tail is negligible because the outermost
//! pathloss exponent exceeds 2; the validation report quantifies the
//! residual bias by re-running a subsample with the window doubled.
//!
//! Every trial draws from its own counter-derived random stream, so an
//! estimate depends only on `(seed, trials)` and never on thread count
//! or scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::NetworkConfig;
use crate::pathloss::PathlossModel;

/// Expected interferer count floor of the window rule.
const WINDOW_MIN_EXPECTED: f64 = 2000.0;

/// Small-scale channel power gain law, normalized to unit mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FadingModel {
    /// Unit-mean exponential power gain.
    Rayleigh,
    /// Noncentral chi-squared power gain with noncentrality `nu_nc` and
    /// `nu_dof` degrees of freedom, divided by `nu_dof + nu_nc` so the
    /// mean is 1. Simulation-only: no analytic coverage path exists.
    Rice { nu_nc: f64, nu_dof: f64 },
}

impl FadingModel {
    /// Validated Rice constructor (`nu_dof >= 1`, `nu_nc >= 0`).
    pub fn rice(nu_nc: f64, nu_dof: f64) -> Result<Self, String> {
        if !(nu_nc.is_finite() && nu_nc >= 0.0) {
            return Err(format!("Rice noncentrality must be nonnegative, got {nu_nc}"));
        }
        if !(nu_dof.is_finite() && nu_dof >= 1.0) {
            return Err(format!("Rice degrees of freedom must be at least 1, got {nu_dof}"));
        }
        Ok(Self::Rice { nu_nc, nu_dof })
    }
}

/// Precomputed sampler for a fading law.
#[derive(Debug, Clone)]
enum FadingSampler {
    Rayleigh,
    Rice { sqrt_nc: f64, scattered: Option<Gamma<f64>>, norm: f64 },
}

impl FadingSampler {
    fn new(model: FadingModel) -> Self {
        match model {
            FadingModel::Rayleigh => Self::Rayleigh,
            FadingModel::Rice { nu_nc, nu_dof } => {
                assert!(nu_nc >= 0.0 && nu_dof >= 1.0, "invalid Rice parameters");
                // chi^2(dof) with noncentrality nc decomposes into
                // chi^2(dof - 1) plus the squared shifted normal
                let scattered = if nu_dof > 1.0 {
                    Some(Gamma::new((nu_dof - 1.0) / 2.0, 2.0).expect("valid gamma shape"))
                } else {
                    None
                };
                Self::Rice { sqrt_nc: nu_nc.sqrt(), scattered, norm: 1.0 / (nu_dof + nu_nc) }
            }
        }
    }

    #[inline]
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Rayleigh => -(1.0 - rng.random::<f64>()).ln(),
            Self::Rice { sqrt_nc, scattered, norm } => {
                let z: f64 = StandardNormal.sample(rng);
                let los = z + sqrt_nc;
                let mut v = los * los;
                if let Some(g) = scattered {
                    v += g.sample(rng);
                }
                v * norm
            }
        }
    }
}

/// One simulated network draw.
#[derive(Debug, Clone)]
pub struct Realization {
    /// Serving ground distance, meters.
    pub serving_r2d: f64,
    /// Interferer ground distances, meters; all beyond the serving one.
    pub interferer_r2ds: Vec<f64>,
    /// Signal-to-interference ratio (`+inf` if no interferer landed in
    /// the window).
    pub sir: f64,
}

/// Monte Carlo coverage estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CpEstimate {
    /// Fraction of trials with SIR above the threshold.
    pub mean: f64,
    pub trials: u64,
    /// `1.96 sqrt(mean (1 - mean) / trials)`.
    pub ci95_halfwidth: f64,
    pub seed: u64,
}

/// Monte Carlo spatial-throughput estimate, bits/(s Hz m^2).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct StEstimate {
    pub mean: f64,
    pub trials: u64,
    pub ci95_halfwidth: f64,
    pub seed: u64,
}

/// Serving ground distance by inverse transform of the contact law:
/// `r = sqrt(-ln(U) / (pi lambda))` with `U` uniform on (0, 1].
pub fn sample_serving_distance<R: Rng>(lambda: f64, rng: &mut R) -> f64 {
    assert!(lambda > 0.0);
    let u = 1.0 - rng.random::<f64>();
    (-u.ln() / (std::f64::consts::PI * lambda)).sqrt()
}

/// Interferer ground radii on the annulus `(r0, r_sim]`: a Poisson count
/// with mean `lambda pi (r_sim^2 - r0^2)`, radii i.i.d. with density
/// proportional to `r`.
pub fn sample_interferers<R: Rng>(lambda: f64, r0: f64, r_sim: f64, rng: &mut R) -> Vec<f64> {
    let area = std::f64::consts::PI * (r_sim * r_sim - r0 * r0);
    if area <= 0.0 {
        return Vec::new();
    }
    let count = Poisson::new(lambda * area).expect("positive mean").sample(rng) as usize;
    let (lo_sq, span) = (r0 * r0, r_sim * r_sim - r0 * r0);
    (0..count)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            (lo_sq + u * span).sqrt()
        })
        .collect()
}

/// Simulation window for a trial with serving distance `r0`.
pub fn simulation_radius(model: &PathlossModel, lambda: f64, ahd: f64, r0: f64) -> f64 {
    let r_last = model.breakpoints().last().copied().unwrap_or(0.0);
    (WINDOW_MIN_EXPECTED / (std::f64::consts::PI * lambda))
        .sqrt()
        .max(5.0 * r_last)
        .max(10.0 * ahd)
        .max(2.0 * r0)
}

/// Flattened per-trial parameters.
struct SimParams {
    pi_lambda: f64,
    dh2: f64,
    tau: f64,
    window_scale: f64,
    window_base: f64,
    breaks_sq: Vec<f64>,
    constants: Vec<f64>,
    half_exponents: Vec<f64>,
    fading: FadingSampler,
}

impl SimParams {
    fn new(cfg: &NetworkConfig, window_scale: f64) -> Self {
        let model = &cfg.model;
        let r_last = model.breakpoints().last().copied().unwrap_or(0.0);
        let window_base = (WINDOW_MIN_EXPECTED / (std::f64::consts::PI * cfg.lambda))
            .sqrt()
            .max(5.0 * r_last)
            .max(10.0 * cfg.ahd);
        Self {
            pi_lambda: std::f64::consts::PI * cfg.lambda,
            dh2: cfg.ahd * cfg.ahd,
            tau: cfg.tau,
            window_scale,
            window_base,
            breaks_sq: model.breakpoints().iter().map(|r| r * r).collect(),
            constants: model.constants().to_vec(),
            half_exponents: model.exponents().iter().map(|a| 0.5 * a).collect(),
            fading: FadingSampler::new(cfg.fading),
        }
    }

    #[inline]
    fn gain_of_r_sq(&self, r_sq: f64) -> f64 {
        let mut seg = 0;
        while seg < self.breaks_sq.len() && self.breaks_sq[seg] <= r_sq {
            seg += 1;
        }
        let d_sq = r_sq + self.dh2;
        let e = self.half_exponents[seg];
        // alpha = 4 dominates the grids; skip powf there
        let atten = if e == 2.0 { 1.0 / (d_sq * d_sq) } else { d_sq.powf(-e) };
        self.constants[seg] * atten
    }

    /// One trial; true when the SIR clears the threshold. Interference
    /// accumulation stops early once failure is certain (each further
    /// term can only increase it).
    fn trial<R: Rng>(&self, rng: &mut R) -> bool {
        let u = 1.0 - rng.random::<f64>();
        let r0_sq = -u.ln() / self.pi_lambda;
        let r_sim = (self.window_base.max(2.0 * r0_sq.sqrt())) * self.window_scale;

        let signal = self.fading.sample(rng) * self.gain_of_r_sq(r0_sq);

        let span = r_sim * r_sim - r0_sq;
        let mean = self.pi_lambda * span;
        debug_assert!(mean > 0.0);
        let count = Poisson::new(mean).expect("positive mean").sample(rng) as u64;

        let mut interference = 0.0;
        for _ in 0..count {
            let u = 1.0 - rng.random::<f64>();
            let r_sq = r0_sq + u * span;
            interference += self.fading.sample(rng) * self.gain_of_r_sq(r_sq);
            if self.tau * interference >= signal {
                return false;
            }
        }
        if interference == 0.0 {
            return true; // empty window: infinite SIR counts as covered
        }
        signal > self.tau * interference
    }
}

/// Draws one full realization (serving distance, interferer distances,
/// SIR). Zero interferers yield an infinite SIR.
pub fn draw_realization<R: Rng>(cfg: &NetworkConfig, rng: &mut R) -> Realization {
    let params = SimParams::new(cfg, 1.0);
    let r0 = sample_serving_distance(cfg.lambda, rng);
    let r_sim = simulation_radius(&cfg.model, cfg.lambda, cfg.ahd, r0);
    let signal = params.fading.sample(rng) * params.gain_of_r_sq(r0 * r0);
    let interferers = sample_interferers(cfg.lambda, r0, r_sim, rng);
    let interference: f64 = interferers
        .iter()
        .map(|r| params.fading.sample(rng) * params.gain_of_r_sq(r * r))
        .sum();
    let sir = if interference == 0.0 { f64::INFINITY } else { signal / interference };
    Realization { serving_r2d: r0, interferer_r2ds: interferers, sir }
}

/// One SIR draw. Transmit power cancels between signal and interference
/// and never enters.
pub fn sir_realization<R: Rng>(cfg: &NetworkConfig, rng: &mut R) -> f64 {
    draw_realization(cfg, rng).sir
}

/// Coverage estimate over `trials` independent realizations.
///
/// Each trial uses the random stream indexed by its trial number under
/// the master seed, so results are reproducible bit for bit regardless
/// of parallel scheduling.
pub fn estimate_cp(cfg: &NetworkConfig, trials: u64, seed: u64) -> CpEstimate {
    estimate_cp_scaled_window(cfg, trials, seed, 1.0)
}

/// [`estimate_cp`] with the simulation window scaled by `window_scale`;
/// the validation report doubles the window on a subsample to bound the
/// truncation bias.
pub fn estimate_cp_scaled_window(
    cfg: &NetworkConfig,
    trials: u64,
    seed: u64,
    window_scale: f64,
) -> CpEstimate {
    assert!(trials >= 1000, "at least 1000 trials required, got {trials}");
    assert!(window_scale >= 1.0);
    let params = SimParams::new(cfg, window_scale);
    let base = ChaCha8Rng::seed_from_u64(seed);

    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.clone();
            rng.set_stream(i);
            params.trial(&mut rng) as u64
        })
        .sum();

    let mean = hits as f64 / trials as f64;
    CpEstimate {
        mean,
        trials,
        ci95_halfwidth: 1.96 * (mean * (1.0 - mean) / trials as f64).sqrt(),
        seed,
    }
}

/// Spatial-throughput estimate: the coverage estimate scaled by
/// `lambda log2(1 + tau)`.
pub fn estimate_st(cfg: &NetworkConfig, trials: u64, seed: u64) -> StEstimate {
    let cp = estimate_cp(cfg, trials, seed);
    let scale = cfg.lambda * (1.0 + cfg.tau).log2();
    StEstimate {
        mean: scale * cp.mean,
        trials,
        ci95_halfwidth: scale * cp.ci95_halfwidth,
        seed,
    }
}
