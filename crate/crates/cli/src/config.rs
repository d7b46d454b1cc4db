//! Configuration loading: a flat `key = value` document with dotted
//! sections (JSON with the same keys, possibly nested, is also
//! accepted), overridden by command-line flags. All boundary units match
//! the figure axes — densities in BS/km^2, thresholds in dB, power in
//! dBm, distances in meters — and are converted to SI on the way in.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;

use cellcov_core::{FadingModel, NetworkConfig, PathlossModel};

/// Parsed document plus consumption tracking, so leftover keys are
/// reported as schema violations with their full path.
pub struct RawConfig {
    values: BTreeMap<String, Value>,
    consumed: BTreeSet<String>,
}

impl RawConfig {
    pub fn empty() -> Self {
        Self { values: BTreeMap::new(), consumed: BTreeSet::new() }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        if text.trim_start().starts_with('{') {
            Self::from_json(&text)
        } else {
            Self::from_flat(&text)
        }
    }

    /// `key = value` lines; `#` starts a comment; commas make lists.
    pub fn from_flat(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`, got `{line}`", lineno + 1))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                bail!("line {}: empty key", lineno + 1);
            }
            values.insert(key, parse_flat_value(value.trim()));
        }
        Ok(Self { values, consumed: BTreeSet::new() })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let root: Value = serde_json::from_str(text).context("invalid JSON config")?;
        let Value::Object(map) = root else {
            bail!("JSON config must be an object");
        };
        let mut values = BTreeMap::new();
        for (key, value) in map {
            flatten_json(&key, value, &mut values)?;
        }
        Ok(Self { values, consumed: BTreeSet::new() })
    }

    /// Inserts or replaces a value (flag overrides take this path).
    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    pub fn set_flat(&mut self, key: &str, text: &str) {
        self.set(key, parse_flat_value(text));
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn take(&mut self, key: &str) -> Option<&Value> {
        let v = self.values.get(key);
        if v.is_some() {
            self.consumed.insert(key.to_string());
        }
        v
    }

    pub fn number(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Number(n)) => {
                Ok(Some(n.as_f64().ok_or_else(|| anyhow!("{key}: not a finite number"))?))
            }
            Some(other) => bail!("{key}: expected a number, got {other}"),
        }
    }

    pub fn integer(&mut self, key: &str) -> Result<Option<u64>> {
        match self.number(key)? {
            None => Ok(None),
            Some(v) if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => Ok(Some(v as u64)),
            Some(v) => bail!("{key}: expected a nonnegative integer, got {v}"),
        }
    }

    pub fn number_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::Number(n)) => {
                Ok(Some(vec![n.as_f64().ok_or_else(|| anyhow!("{key}: not a finite number"))?]))
            }
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    let n = item
                        .as_f64()
                        .ok_or_else(|| anyhow!("{key}[{i}]: expected a number, got {item}"))?;
                    out.push(n);
                }
                Ok(Some(out))
            }
            Some(other) => bail!("{key}: expected a list of numbers, got {other}"),
        }
    }

    pub fn text(&mut self, key: &str) -> Result<Option<String>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => bail!("{key}: expected a string, got {other}"),
        }
    }

    pub fn text_list(&mut self, key: &str) -> Result<Option<Vec<String>>> {
        match self.take(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(vec![s.clone()])),
            Some(Value::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.iter().enumerate() {
                    match item {
                        Value::String(s) => out.push(s.clone()),
                        other => bail!("{key}[{i}]: expected a string, got {other}"),
                    }
                }
                Ok(Some(out))
            }
            Some(other) => bail!("{key}: expected a list of strings, got {other}"),
        }
    }

    /// Fails on any key that no extractor asked for.
    pub fn finish(&self) -> Result<()> {
        let unknown: Vec<&String> =
            self.values.keys().filter(|k| !self.consumed.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            bail!(
                "unknown config key(s): {}",
                unknown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
            )
        }
    }
}

fn parse_flat_value(text: &str) -> Value {
    let token_value = |tok: &str| -> Value {
        match tok.parse::<f64>() {
            Ok(n) => serde_json::Number::from_f64(n).map(Value::Number).unwrap_or_else(|| {
                Value::String(tok.to_string())
            }),
            Err(_) => Value::String(tok.to_string()),
        }
    };
    if text.is_empty() {
        return Value::Array(vec![]);
    }
    if text.contains(',') {
        Value::Array(text.split(',').map(|t| token_value(t.trim())).collect())
    } else {
        token_value(text)
    }
}

fn flatten_json(prefix: &str, value: Value, out: &mut BTreeMap<String, Value>) -> Result<()> {
    match value {
        Value::Object(map) => {
            for (key, inner) in map {
                flatten_json(&format!("{prefix}.{key}"), inner, out)?;
            }
            Ok(())
        }
        Value::Null => bail!("{prefix}: null is not a valid config value"),
        other => {
            out.insert(prefix.to_string(), other);
            Ok(())
        }
    }
}

/// Which quantities a sweep emits per grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOutputs {
    pub analytic: bool,
    pub mc: bool,
    pub bounds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepVariable {
    Lambda,
    Ahd,
}

/// Sweep request in boundary units (BS/km^2 for density, meters for
/// height).
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub grid: Vec<f64>,
    pub outputs: SweepOutputs,
    pub trials: u64,
    pub seed: u64,
}

/// Everything the subcommands need, in SI units.
#[derive(Debug, Clone)]
pub struct Settings {
    /// `None` only for subcommands with a built-in model grid.
    pub model: Option<PathlossModel>,
    /// BS/m^2; `None` when the density is swept.
    pub lambda: Option<f64>,
    pub ahd: f64,
    pub tau: f64,
    pub power_w: f64,
    pub fading: FadingModel,
    pub trials: u64,
    pub seed: u64,
    pub epsilon: Option<f64>,
    pub sweep: Option<SweepSpec>,
    /// Whether the config carried an explicit power entry (flagged as
    /// having no effect on SIR results).
    pub power_given: bool,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

impl Settings {
    pub fn from_raw(mut raw: RawConfig) -> Result<Self> {
        let model = match raw.number_list("model.alphas")? {
            Some(alphas) => {
                let breakpoints = raw.number_list("model.breakpoints_m")?.unwrap_or_default();
                Some(
                    PathlossModel::new(alphas, breakpoints)
                        .map_err(|e| anyhow!("model.alphas/model.breakpoints_m: {e}"))?,
                )
            }
            None => {
                if raw.contains("model.breakpoints_m") {
                    bail!("model.breakpoints_m: requires model.alphas");
                }
                None
            }
        };

        let tau_db = raw.number("net.tau_db")?.unwrap_or(0.0);
        let tau = 10f64.powf(tau_db / 10.0);
        let power_given = raw.contains("net.p_dbm");
        let p_dbm = raw.number("net.p_dbm")?.unwrap_or(23.0);
        let power_w = 10f64.powf((p_dbm - 30.0) / 10.0);
        let ahd = raw.number("net.delta_h_m")?.unwrap_or(0.0);
        if !(ahd.is_finite() && ahd >= 0.0) {
            bail!("net.delta_h_m: must be nonnegative and finite, got {ahd}");
        }
        let lambda = match raw.number("net.lambda_per_km2")? {
            Some(per_km2) => {
                if !(per_km2.is_finite() && per_km2 > 0.0) {
                    bail!("net.lambda_per_km2: must be positive and finite, got {per_km2}");
                }
                Some(per_km2 * 1e-6)
            }
            None => None,
        };

        let fading = match raw.text("net.fading")?.as_deref().unwrap_or("rayleigh") {
            "rayleigh" => {
                // consume optional Rice keys so they are not "unknown"
                if raw.number("net.rice_nu_nc")?.is_some() || raw.number("net.rice_nu_dof")?.is_some()
                {
                    bail!("net.rice_nu_nc/net.rice_nu_dof: only valid with net.fading = rice");
                }
                FadingModel::Rayleigh
            }
            "rice" => {
                let nu_nc = raw.number("net.rice_nu_nc")?.unwrap_or(1.0);
                let nu_dof = raw.number("net.rice_nu_dof")?.unwrap_or(12.0);
                FadingModel::rice(nu_nc, nu_dof)
                    .map_err(|e| anyhow!("net.rice_nu_nc/net.rice_nu_dof: {e}"))?
            }
            other => bail!("net.fading: expected `rayleigh` or `rice`, got `{other}`"),
        };

        let trials = raw.integer("mc.trials")?.unwrap_or(DEFAULT_TRIALS);
        let seed = raw.integer("mc.seed")?.unwrap_or(DEFAULT_SEED);

        let epsilon = raw.number("qos.epsilon")?;
        if let Some(e) = epsilon {
            if !(e > 0.0 && e < 1.0) {
                bail!("qos.epsilon: must lie strictly between 0 and 1, got {e}");
            }
        }

        let sweep = Self::sweep_from_raw(&mut raw, trials, seed)?;
        raw.finish()?;

        Ok(Self {
            model,
            lambda,
            ahd,
            tau,
            power_w,
            fading,
            trials,
            seed,
            epsilon,
            sweep,
            power_given,
        })
    }

    fn sweep_from_raw(raw: &mut RawConfig, trials: u64, seed: u64) -> Result<Option<SweepSpec>> {
        let variable = match raw.text("sweep.variable")?.as_deref() {
            None => {
                // reject orphan sweep keys with a clear message
                for key in ["sweep.grid", "sweep.lo", "sweep.hi", "sweep.points", "sweep.scale",
                            "sweep.outputs"] {
                    if raw.contains(key) {
                        bail!("{key}: requires sweep.variable = lambda | ahd");
                    }
                }
                return Ok(None);
            }
            Some("lambda") => SweepVariable::Lambda,
            Some("ahd") => SweepVariable::Ahd,
            Some(other) => bail!("sweep.variable: expected `lambda` or `ahd`, got `{other}`"),
        };

        let grid = if let Some(grid) = raw.number_list("sweep.grid")? {
            for key in ["sweep.lo", "sweep.hi", "sweep.points", "sweep.scale"] {
                if raw.contains(key) {
                    bail!("{key}: mutually exclusive with sweep.grid");
                }
            }
            grid
        } else {
            let lo = raw.number("sweep.lo")?.ok_or_else(|| anyhow!("sweep.lo: required"))?;
            let hi = raw.number("sweep.hi")?.ok_or_else(|| anyhow!("sweep.hi: required"))?;
            let points = raw
                .integer("sweep.points")?
                .ok_or_else(|| anyhow!("sweep.points: required"))? as usize;
            let scale = raw.text("sweep.scale")?.unwrap_or_else(|| "log".to_string());
            if points < 2 {
                bail!("sweep.points: need at least 2 points, got {points}");
            }
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                bail!("sweep.lo/sweep.hi: need lo < hi, got {lo}..{hi}");
            }
            match scale.as_str() {
                "log" => {
                    if lo <= 0.0 {
                        bail!("sweep.lo: log scale requires a positive lower bound");
                    }
                    (0..points)
                        .map(|i| lo * (hi / lo).powf(i as f64 / (points - 1) as f64))
                        .collect()
                }
                "linear" => (0..points)
                    .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                    .collect(),
                other => bail!("sweep.scale: expected `linear` or `log`, got `{other}`"),
            }
        };
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            bail!("sweep.grid: grid must be strictly increasing");
        }

        let outputs = match raw.text_list("sweep.outputs")? {
            None => SweepOutputs { analytic: true, mc: false, bounds: false },
            Some(items) => {
                let mut out = SweepOutputs { analytic: false, mc: false, bounds: false };
                for item in items {
                    match item.as_str() {
                        "analytic" => out.analytic = true,
                        "mc" => out.mc = true,
                        "bounds" => out.bounds = true,
                        other => bail!(
                            "sweep.outputs: expected analytic, mc or bounds, got `{other}`"
                        ),
                    }
                }
                out
            }
        };
        if outputs.mc && trials < 1000 {
            bail!("mc.trials: at least 1000 trials required for Monte Carlo sweeps, got {trials}");
        }

        Ok(Some(SweepSpec { variable, grid, outputs, trials, seed }))
    }

    /// The pathloss model, required by most subcommands.
    pub fn require_model(&self) -> Result<&PathlossModel> {
        self.model.as_ref().ok_or_else(|| anyhow!("model.alphas: required (pathloss exponents)"))
    }

    /// The operating density in BS/m^2.
    pub fn require_lambda(&self) -> Result<f64> {
        self.lambda
            .ok_or_else(|| anyhow!("net.lambda_per_km2: required (base-station density)"))
    }

    /// Network config at an explicit density (BS/m^2) and height (m).
    pub fn network_at(&self, lambda: f64, ahd: f64) -> Result<NetworkConfig> {
        NetworkConfig::new(
            lambda,
            ahd,
            self.tau,
            self.power_w,
            self.require_model()?.clone(),
            self.fading,
        )
        .map_err(|e| anyhow!("{e}"))
    }
}

pub fn model_id(model: &PathlossModel) -> String {
    match model.segment_count() {
        1 => "sspm".to_string(),
        2 => "dspm".to_string(),
        n => format!("mspm{n}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_document_round_trip() {
        let raw = RawConfig::from_flat(
            "# comment\nmodel.alphas = 1.5, 4\nmodel.breakpoints_m = 10\nnet.tau_db = 0\n\
             net.p_dbm = 23\nnet.delta_h_m = 8.5\nnet.lambda_per_km2 = 1000\n",
        )
        .unwrap();
        let s = Settings::from_raw(raw).unwrap();
        assert_eq!(s.require_model().unwrap().segment_count(), 2);
        assert_eq!(s.tau, 1.0); // 0 dB
        assert!((s.power_w - 0.19952623149688797).abs() < 1e-15); // 23 dBm
        assert_eq!(s.lambda, Some(1e-3));
        assert_eq!(s.ahd, 8.5);
        assert!(s.power_given);
    }

    #[test]
    fn json_document_nested_and_flat() {
        let nested = RawConfig::from_json(
            r#"{"model": {"alphas": [1.5, 4], "breakpoints_m": [10]},
                "net": {"tau_db": 3.0102999566398119521}}"#,
        )
        .unwrap();
        let s = Settings::from_raw(nested).unwrap();
        assert!((s.tau - 2.0).abs() < 1e-12);

        let flat = RawConfig::from_json(r#"{"model.alphas": 4, "net.lambda_per_km2": 100}"#)
            .unwrap();
        let s = Settings::from_raw(flat).unwrap();
        assert_eq!(s.require_model().unwrap().segment_count(), 1);
        assert_eq!(s.lambda, Some(1e-4));
    }

    #[test]
    fn unknown_key_is_reported_with_path() {
        let mut raw = RawConfig::from_flat("model.alphas = 4\nnet.typo_key = 3\n").unwrap();
        raw.number_list("model.alphas").unwrap();
        let err = raw.finish().unwrap_err().to_string();
        assert!(err.contains("net.typo_key"), "{err}");
    }

    #[test]
    fn model_invariant_violations_carry_constraint() {
        let raw = RawConfig::from_flat("model.alphas = 2\n").unwrap();
        let err = Settings::from_raw(raw).unwrap_err().to_string();
        assert!(err.contains("must exceed 2"), "{err}");

        let raw = RawConfig::from_flat("model.alphas = 2, 4\n").unwrap();
        let err = Settings::from_raw(raw).unwrap_err().to_string();
        assert!(err.contains("breakpoints"), "{err}");
    }

    #[test]
    fn sweep_grid_construction() {
        let raw = RawConfig::from_flat(
            "model.alphas = 4\nsweep.variable = lambda\nsweep.lo = 100\nsweep.hi = 100000\n\
             sweep.points = 4\nsweep.scale = log\n",
        )
        .unwrap();
        let s = Settings::from_raw(raw).unwrap();
        let sweep = s.sweep.unwrap();
        assert_eq!(sweep.variable, SweepVariable::Lambda);
        let want = [100.0, 1000.0, 10000.0, 100000.0];
        for (g, w) in sweep.grid.iter().zip(want) {
            assert!((g - w).abs() < 1e-9 * w);
        }
        assert!(sweep.outputs.analytic && !sweep.outputs.mc);
    }

    #[test]
    fn explicit_grid_must_increase() {
        let raw = RawConfig::from_flat(
            "model.alphas = 4\nsweep.variable = ahd\nsweep.grid = 0, 2, 2\n",
        )
        .unwrap();
        let err = Settings::from_raw(raw).unwrap_err().to_string();
        assert!(err.contains("strictly increasing"), "{err}");
    }

    #[test]
    fn rice_keys_require_rice_fading() {
        let raw = RawConfig::from_flat("model.alphas = 4\nnet.rice_nu_dof = 12\n").unwrap();
        let err = Settings::from_raw(raw).unwrap_err().to_string();
        assert!(err.contains("net.fading = rice"), "{err}");

        let raw =
            RawConfig::from_flat("model.alphas = 4\nnet.fading = rice\n").unwrap();
        let s = Settings::from_raw(raw).unwrap();
        assert_eq!(s.fading, FadingModel::Rice { nu_nc: 1.0, nu_dof: 12.0 });
    }

    #[test]
    fn mc_sweep_requires_enough_trials() {
        let raw = RawConfig::from_flat(
            "model.alphas = 4\nmc.trials = 10\nsweep.variable = lambda\nsweep.grid = 100, 1000\n\
             sweep.outputs = mc\n",
        )
        .unwrap();
        let err = Settings::from_raw(raw).unwrap_err().to_string();
        assert!(err.contains("1000 trials"), "{err}");
    }
}
