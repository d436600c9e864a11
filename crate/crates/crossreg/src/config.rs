//! Scenario configuration files. Unknown keys are rejected everywhere.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CrossError;
use crate::param::Param;
use crate::portrait::Format;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    Table,
    LambdaFamily,
    PlanarCross,
    SpatialCross,
}

impl ScenarioName {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Table => "table",
            ScenarioName::LambdaFamily => "lambda-family",
            ScenarioName::PlanarCross => "planar-cross",
            ScenarioName::SpatialCross => "spatial-cross",
        }
    }

    fn allowed(self) -> &'static [&'static str] {
        match self {
            ScenarioName::Table => &[],
            ScenarioName::LambdaFamily => &["lambda", "eps", "eta", "seed_offset", "y_max", "grid"],
            ScenarioName::PlanarCross => &["C", "B", "D", "initial", "t_end", "grid"],
            ScenarioName::SpatialCross => &["a", "b", "c"],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamMap {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Param>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<Param>>,
    /// Plateau width of the mollifier; 0 is the box profile.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<Param>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c_cross: Option<Param>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b_cross: Option<Param>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d_cross: Option<Param>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Param>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Param>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Param>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_offset: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_max: Option<f64>,
    /// Seeds per axis for portrait trajectories.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial: Option<[f64; 2]>,
}

impl ParamMap {
    pub fn present(&self) -> Vec<String> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Pass threshold for numeric checks (first-integral drift, smoothness continuity).
    pub check: Option<f64>,
    /// Relative tolerance of the integrator.
    pub rtol: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub formats: Option<Vec<Format>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    #[serde(default)]
    pub params: ParamMap,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioName) -> Self {
        ScenarioConfig { scenario, params: ParamMap::default(), tolerances: Tolerances::default(), output: OutputSpec::default() }
    }

    pub fn from_json(s: &str) -> Result<Self, CrossError> {
        let cfg: ScenarioConfig = serde_json::from_str(s).map_err(|e| CrossError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CrossError> {
        let s = std::fs::read_to_string(path).map_err(|source| CrossError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&s)
    }

    /// Rejects parameters the scenario does not use and values outside their range.
    /// Missing planar-cross parameters default to C = 2, B = D = 1/20.
    pub fn validate(&self) -> Result<(), CrossError> {
        let allowed = self.scenario.allowed();
        let extra: Vec<String> = self.params.present().into_iter().filter(|k| !allowed.contains(&k.as_str())).collect();
        if !extra.is_empty() {
            return Err(CrossError::Config(format!(
                "scenario {} does not take parameter(s) {}",
                self.scenario.as_str(),
                extra.join(", ")
            )));
        }
        let p = &self.params;
        if let Some(eps) = &p.eps {
            if eps.iter().any(|e| e.to_f64() <= 0.0) {
                return Err(CrossError::Config("every eps must be positive".into()));
            }
        }
        if let Some(eta) = &p.eta {
            let v = eta.to_f64();
            if !(0.0..1.0).contains(&v) {
                return Err(CrossError::Config(format!("eta must lie in [0, 1), got {eta}")));
            }
        }
        if let Some(l) = &p.lambda {
            if let Some(bad) = l.iter().find(|l| l.to_f64() <= -5.0 / 6.0) {
                return Err(CrossError::Config(format!("lambda must exceed -5/6, got {bad}")));
            }
        }
        for v in [p.t_end, p.seed_offset, p.y_max, self.tolerances.check, self.tolerances.rtol].into_iter().flatten() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CrossError::Config(format!("expected a positive number, got {v}")));
            }
        }
        if self.scenario == ScenarioName::PlanarCross {
            let get = |v: &Option<Param>, d: pws_core::Rational| v.as_ref().map_or(d, |p| p.0.clone());
            crate::planar::PlanarParams::new(
                get(&p.c_cross, pws_core::int(2)),
                get(&p.b_cross, pws_core::rat(1, 20)),
                get(&p.d_cross, pws_core::rat(1, 20)),
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"scenario": "table", "param": {}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"scenario": "spatial-cross", "params": {"d": 1}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"scenario": "nope"}"#).is_err());
    }

    #[test]
    fn parameters_are_checked_per_scenario() {
        let ok = r#"{"scenario": "planar-cross", "params": {"C": 2, "B": 0.05, "D": "1/20"}}"#;
        assert!(ScenarioConfig::from_json(ok).is_ok());
        let wrong = r#"{"scenario": "planar-cross", "params": {"C": 2, "B": 0.05, "D": 0.05, "lambda": [0.4]}}"#;
        assert!(ScenarioConfig::from_json(wrong).is_err());
        let zero = r#"{"scenario": "planar-cross", "params": {"C": 0, "B": 0.05, "D": 0.05}}"#;
        assert!(matches!(ScenarioConfig::from_json(zero), Err(CrossError::DegenerateParameters(_))));
        let eps = r#"{"scenario": "lambda-family", "params": {"lambda": [0.4], "eps": [0]}}"#;
        assert!(ScenarioConfig::from_json(eps).is_err());
    }
}
