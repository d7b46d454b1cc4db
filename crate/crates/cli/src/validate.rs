//! Machine-checkable agreement report between the analytic coverage
//! expressions and the brute-force simulator, over a fixed grid of three
//! reference models, four antenna height differences and four densities.
//!
//! Each Rayleigh point passes when `|MC - analytic| <= max(2 ci95, 0.01)`.
//! Alternative formula readings (ground-corner interference split for
//! two slopes, unnormalized cross-segment coefficients for three or
//! more) are evaluated against the same estimate so the report shows
//! which convention the simulation supports. A subsample rerun with the
//! simulation window doubled bounds the truncation bias. Rice points
//! carry no analytic reference and are reported for shape inspection
//! only.

use anyhow::Result;
use rayon::prelude::*;
use serde::Serialize;

use cellcov_core::analytic::{
    coverage_probability, cp_dspm_ground_split, cp_mspm_unnormalized, NetworkConfig,
};
use cellcov_core::montecarlo::{estimate_cp, estimate_cp_scaled_window};
use cellcov_core::{FadingModel, PathlossModel};

use crate::config::{model_id, Settings};

/// Absolute-agreement floor of the pass rule `max(2 ci95, 0.01)`.
const AGREEMENT_FLOOR: f64 = 0.01;

/// Fraction of the trial budget spent on the doubled-window probe.
const PROBE_DIVISOR: u64 = 20;

#[derive(Debug, Clone, Serialize)]
pub struct VariantCheck {
    pub name: String,
    pub cp: f64,
    pub abs_diff: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidatePoint {
    pub model_id: String,
    pub delta_h_m: f64,
    pub lambda_per_km2: f64,
    pub cp_analytic: Option<f64>,
    pub cp_mc: f64,
    pub ci95: f64,
    pub abs_diff: Option<f64>,
    pub tolerance: f64,
    pub pass: Option<bool>,
    /// Shift of a subsampled estimate when the simulation window is
    /// doubled; bounds the truncation bias of the window rule.
    pub window_doubling_shift: f64,
    pub variants: Vec<VariantCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantSummary {
    pub name: String,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidateReport {
    pub trials: u64,
    pub seed: u64,
    pub fading: String,
    pub tolerance_rule: String,
    pub points: Vec<ValidatePoint>,
    pub primary_passed: usize,
    pub primary_total: usize,
    pub variant_summary: Vec<VariantSummary>,
    pub overall_pass: bool,
}

/// The three reference models of the standard validation grid.
pub fn reference_models() -> Vec<PathlossModel> {
    vec![
        PathlossModel::single_slope(4.0).expect("valid"),
        PathlossModel::dual_slope(1.5, 4.0, 10.0).expect("valid"),
        PathlossModel::new(vec![1.5, 3.0, 4.5], vec![10.0, 50.0]).expect("valid"),
    ]
}

pub const GRID_DELTA_H_M: [f64; 4] = [0.0, 2.0, 4.5, 8.5];
pub const GRID_LAMBDA_PER_KM2: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

/// Pass rule shared by the report and its tests:
/// `(abs_diff, tolerance, pass)`.
pub fn agreement(analytic: f64, mc_mean: f64, ci95: f64) -> (f64, f64, bool) {
    let diff = (mc_mean - analytic).abs();
    let tol = (2.0 * ci95).max(AGREEMENT_FLOOR);
    (diff, tol, diff <= tol)
}

pub fn run_validate(settings: &Settings) -> Result<ValidateReport> {
    let (trials, seed) = (settings.trials, settings.seed);
    let mut cases = Vec::new();
    for model in reference_models() {
        for dh in GRID_DELTA_H_M {
            for lambda_km2 in GRID_LAMBDA_PER_KM2 {
                cases.push((model.clone(), dh, lambda_km2));
            }
        }
    }

    let points: Vec<ValidatePoint> = cases
        .par_iter()
        .enumerate()
        .map(|(idx, (model, dh, lambda_km2))| {
            validate_point(settings, model, *dh, *lambda_km2, trials, seed.wrapping_add(idx as u64))
        })
        .collect();

    let rayleigh = matches!(settings.fading, FadingModel::Rayleigh);
    let primary_total = points.iter().filter(|p| p.pass.is_some()).count();
    let primary_passed = points.iter().filter(|p| p.pass == Some(true)).count();

    let mut variant_summary: Vec<VariantSummary> = Vec::new();
    for p in &points {
        for v in &p.variants {
            match variant_summary.iter_mut().find(|s| s.name == v.name) {
                Some(s) => {
                    s.total += 1;
                    s.passed += v.pass as usize;
                }
                None => variant_summary.push(VariantSummary {
                    name: v.name.clone(),
                    passed: v.pass as usize,
                    total: 1,
                }),
            }
        }
    }

    let overall_pass = points.iter().all(|p| p.error.is_none())
        && (!rayleigh || (primary_passed == primary_total && primary_total > 0));
    Ok(ValidateReport {
        trials,
        seed,
        fading: match settings.fading {
            FadingModel::Rayleigh => "rayleigh".to_string(),
            FadingModel::Rice { nu_nc, nu_dof } => format!("rice(nu_nc={nu_nc}, nu_dof={nu_dof})"),
        },
        tolerance_rule: "max(2*ci95, 0.01)".to_string(),
        points,
        primary_passed,
        primary_total,
        variant_summary,
        overall_pass,
    })
}

fn validate_point(
    settings: &Settings,
    model: &PathlossModel,
    dh: f64,
    lambda_km2: f64,
    trials: u64,
    seed: u64,
) -> ValidatePoint {
    let cfg = NetworkConfig::new(
        lambda_km2 * 1e-6,
        dh,
        settings.tau,
        settings.power_w,
        model.clone(),
        settings.fading,
    )
    .expect("grid values are valid");

    let mc = estimate_cp(&cfg, trials, seed);
    let probe_trials = (trials / PROBE_DIVISOR).max(1000);
    let direct = estimate_cp(&cfg, probe_trials, seed);
    let widened = estimate_cp_scaled_window(&cfg, probe_trials, seed, 2.0);
    let window_doubling_shift = widened.mean - direct.mean;

    let mut point = ValidatePoint {
        model_id: model_id(model),
        delta_h_m: dh,
        lambda_per_km2: lambda_km2,
        cp_analytic: None,
        cp_mc: mc.mean,
        ci95: mc.ci95_halfwidth,
        abs_diff: None,
        tolerance: (2.0 * mc.ci95_halfwidth).max(AGREEMENT_FLOOR),
        pass: None,
        window_doubling_shift,
        variants: Vec::new(),
        note: None,
        error: None,
    };

    if matches!(settings.fading, FadingModel::Rice { .. }) {
        point.note = Some("no analytic reference; scaling-shape check only".to_string());
        return point;
    }

    match coverage_probability(&cfg) {
        Ok(cp) => {
            let (diff, tol, pass) = agreement(cp, mc.mean, mc.ci95_halfwidth);
            point.cp_analytic = Some(cp);
            point.abs_diff = Some(diff);
            point.tolerance = tol;
            point.pass = Some(pass);
        }
        Err(e) => {
            point.error = Some(e.to_string());
            return point;
        }
    }

    // alternative formula readings, judged against the same estimate
    let mut push_variant = |name: &str, value: Result<f64, cellcov_core::analytic::EvalError>| {
        match value {
            Ok(cp) => {
                let (diff, _, pass) = agreement(cp, mc.mean, mc.ci95_halfwidth);
                point.variants.push(VariantCheck {
                    name: name.to_string(),
                    cp,
                    abs_diff: diff,
                    pass,
                });
            }
            Err(e) => point.error = Some(format!("{name}: {e}")),
        }
    };
    match model.segment_count() {
        2 => push_variant("dspm_ground_split", cp_dspm_ground_split(&cfg)),
        n if n >= 3 => push_variant("mspm_unnormalized", cp_mspm_unnormalized(&cfg)),
        _ => {}
    }
    point
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_rule() {
        // wide CI dominates the floor
        let (_, tol, pass) = agreement(0.5, 0.52, 0.02);
        assert_eq!(tol, 0.04);
        assert!(pass);
        // floor dominates a tight CI
        let (_, tol, pass) = agreement(0.5, 0.508, 0.001);
        assert_eq!(tol, 0.01);
        assert!(pass);
        let (_, _, pass) = agreement(0.5, 0.52, 0.001);
        assert!(!pass);
    }

    #[test]
    fn corrupted_analytic_is_flagged() {
        // sensitivity canary: a wrong interference constant moves every
        // single-slope point with resolvable coverage outside the
        // agreement rule (points with CP below the 0.01 floor cannot
        // distinguish any formula and are excluded)
        let c1 = std::f64::consts::FRAC_PI_4;
        let corrupted_c1 = c1 * 1.25;
        let mut flagged = 0;
        for dh in GRID_DELTA_H_M {
            for lkm2 in GRID_LAMBDA_PER_KM2 {
                let lambda = lkm2 * 1e-6;
                let truth =
                    (-std::f64::consts::PI * lambda * c1 * dh * dh).exp() / (1.0 + c1);
                if truth < 0.02 {
                    continue;
                }
                let corrupted = (-std::f64::consts::PI * lambda * corrupted_c1 * dh * dh).exp()
                    / (1.0 + corrupted_c1);
                // stand in for the simulator with the true value and a
                // typical 1e5-trial CI
                let ci = 1.96 * (truth * (1.0 - truth) / 1e5).sqrt();
                let (_, _, pass) = agreement(corrupted, truth, ci);
                assert!(!pass, "corruption undetected at dh={dh}, lambda={lkm2}/km2");
                flagged += 1;
            }
        }
        assert_eq!(flagged, 14, "expected 14 of 16 grid points to carry signal");
    }

    #[test]
    fn grid_shape() {
        assert_eq!(reference_models().len(), 3);
        assert_eq!(reference_models()[2].segment_count(), 3);
    }
}
