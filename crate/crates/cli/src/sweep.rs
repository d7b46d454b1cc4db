//! Density and height sweeps.

use anyhow::{bail, Result};
use rayon::prelude::*;

use cellcov_core::analytic::{coverage_probability, cp_bounds_mspm, EvalError};
use cellcov_core::montecarlo::{estimate_cp, estimate_st};
use cellcov_core::FadingModel;

use crate::config::{model_id, Settings, SweepSpec, SweepVariable};
use crate::records::SweepRecord;

/// Runs the sweep; the flag reports whether any grid point failed.
pub fn run_sweep(settings: &Settings) -> Result<(Vec<SweepRecord>, bool)> {
    let spec = match &settings.sweep {
        Some(s) => s.clone(),
        None => bail!("sweep.variable: required for the sweep subcommand"),
    };
    let model = settings.require_model()?;
    if spec.outputs.analytic && matches!(settings.fading, FadingModel::Rice { .. }) {
        bail!(
            "sweep.outputs: no analytic reference exists under Rice fading; request mc output only"
        );
    }
    if spec.outputs.bounds && model.segment_count() < 3 {
        bail!("sweep.outputs: bounds require a model with at least 3 segments");
    }
    if spec.variable == SweepVariable::Ahd {
        settings.require_lambda()?;
        if spec.grid.first().is_some_and(|g| *g < 0.0) {
            bail!("sweep.grid: antenna height difference cannot be negative");
        }
    }

    let records: Vec<SweepRecord> = spec
        .grid
        .par_iter()
        .enumerate()
        .map(|(idx, value)| evaluate_point(settings, &spec, idx, *value))
        .collect();
    let failed = records.iter().any(|r| r.error.is_some());
    Ok((records, failed))
}

fn evaluate_point(settings: &Settings, spec: &SweepSpec, idx: usize, value: f64) -> SweepRecord {
    let (lambda_per_km2, ahd) = match spec.variable {
        SweepVariable::Lambda => (value, settings.ahd),
        SweepVariable::Ahd => (settings.lambda.expect("checked") * 1e6, value),
    };
    let mut record = SweepRecord {
        lambda_per_km2,
        delta_h_m: ahd,
        model_id: model_id(settings.model.as_ref().expect("checked")),
        cp_analytic: None,
        st_analytic: None,
        cp_mc: None,
        cp_mc_ci95: None,
        st_mc: None,
        cp_lower: None,
        cp_upper: None,
        error: None,
    };
    let cfg = match settings.network_at(lambda_per_km2 * 1e-6, ahd) {
        Ok(cfg) => cfg,
        Err(e) => {
            record.error = Some(e.to_string());
            return record;
        }
    };

    let fail = |record: &mut SweepRecord, e: &EvalError| {
        record.error = Some(e.to_string());
    };

    if spec.outputs.analytic {
        match coverage_probability(&cfg) {
            Ok(cp) => {
                record.cp_analytic = Some(cp);
                record.st_analytic = Some(cfg.lambda * cp * (1.0 + cfg.tau).log2());
            }
            Err(e) => fail(&mut record, &e),
        }
    }
    if spec.outputs.bounds && record.error.is_none() {
        match cp_bounds_mspm(&cfg) {
            Ok(b) => {
                record.cp_lower = Some(b.lower);
                record.cp_upper = Some(b.upper);
            }
            Err(e) => fail(&mut record, &e),
        }
    }
    if spec.outputs.mc && record.error.is_none() {
        let seed = spec.seed.wrapping_add(idx as u64);
        let cp = estimate_cp(&cfg, spec.trials, seed);
        let st = estimate_st(&cfg, spec.trials, seed);
        record.cp_mc = Some(cp.mean);
        record.cp_mc_ci95 = Some(cp.ci95_halfwidth);
        record.st_mc = Some(st.mean);
    }
    record
}
