//! Critical-density analysis: closed forms for single-slope models,
//! golden-section/bisection search otherwise.

use anyhow::{bail, Result};
use rayon::prelude::*;

use cellcov_core::density::{
    critical_density_numeric, lambda_dagger, lambda_star, DensityError, QosConstraint,
};

use crate::config::{model_id, Settings, SweepVariable};
use crate::records::CriticalRecord;

pub fn run_critical(settings: &Settings) -> Result<Vec<CriticalRecord>> {
    let heights: Vec<f64> = match &settings.sweep {
        Some(spec) if spec.variable == SweepVariable::Ahd => spec.grid.clone(),
        Some(_) => bail!("sweep.variable: the critical subcommand sweeps `ahd` only"),
        None => vec![settings.ahd],
    };
    settings.require_model()?;

    heights
        .par_iter()
        .map(|ahd| critical_at(settings, *ahd))
        .collect::<Result<Vec<_>>>()
}

fn critical_at(settings: &Settings, ahd: f64) -> Result<CriticalRecord> {
    let model = settings.require_model()?;
    let qos = settings.epsilon.map(QosConstraint::new).transpose()?;
    let closed_form = model.segment_count() == 1;

    let mut record = CriticalRecord {
        delta_h_m: ahd,
        model_id: model_id(model),
        epsilon: settings.epsilon,
        lambda_star_per_km2: None,
        lambda_star_status: if qos.is_some() { "ok" } else { "n/a" }.to_string(),
        lambda_dagger_per_km2: None,
        lambda_dagger_status: "ok".to_string(),
        method: if closed_form { "closed-form" } else { "numeric" }.to_string(),
    };

    let dagger = if closed_form {
        lambda_dagger(model.exponents()[0], settings.tau, ahd)
    } else {
        critical_density_numeric(model, ahd, settings.tau, None)
            .map(|v| v.expect("unconstrained search always yields a density"))
    };
    match dagger {
        Ok(v) => record.lambda_dagger_per_km2 = Some(v * 1e6),
        Err(DensityError::ZeroHeight) => {
            record.lambda_dagger_status = "unbounded".to_string();
            if qos.is_some() {
                record.lambda_star_status = "unbounded".to_string();
            }
            return Ok(record);
        }
        Err(e) => return Err(e.into()),
    }

    if let Some(qos) = qos {
        let star = if closed_form {
            lambda_star(model.exponents()[0], settings.tau, ahd, qos)
        } else {
            critical_density_numeric(model, ahd, settings.tau, Some(qos))
        };
        match star {
            Ok(Some(v)) => record.lambda_star_per_km2 = Some(v * 1e6),
            Ok(None) => record.lambda_star_status = "infeasible".to_string(),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(record)
}
