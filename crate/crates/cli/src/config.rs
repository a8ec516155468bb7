//! Run configuration. JSON, radians for angles, lattice units for lengths.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use berry_cumulants::bargmann::ExtractionMethod;
use berry_cumulants::continuum::Harmonic;
use berry_cumulants::models::BlochModel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    SpinSweep,
    GaugeAudit,
    RouteCompare,
    Polarization,
    Convergence,
}

impl Task {
    pub fn as_str(&self) -> &'static str {
        match self {
            Task::SpinSweep => "spin_sweep",
            Task::GaugeAudit => "gauge_audit",
            Task::RouteCompare => "route_compare",
            Task::Polarization => "polarization",
            Task::Convergence => "convergence",
        }
    }

    fn default_grids(&self) -> Vec<usize> {
        match self {
            Task::SpinSweep | Task::GaugeAudit | Task::RouteCompare => vec![512],
            Task::Polarization => vec![128, 256, 512, 1024],
            Task::Convergence => vec![64, 128, 256, 512],
        }
    }

    fn default_thetas(&self) -> Vec<f64> {
        match self {
            Task::SpinSweep | Task::RouteCompare => (0..=8).map(|k| k as f64 * PI / 8.0).collect(),
            Task::GaugeAudit | Task::Convergence => vec![PI / 3.0],
            Task::Polarization => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    Product,
    Continuum,
    Operator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinConfig {
    #[serde(default = "one")]
    pub mu: f64,
}

impl Default for SpinConfig {
    fn default() -> Self {
        Self { mu: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaugeConfig {
    #[serde(default)]
    pub winding: i64,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
}

impl Default for GaugeConfig {
    fn default() -> Self {
        Self { winding: 1, harmonics: Vec::new() }
    }
}

/// Oracle tolerances used by `--check`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// `|C_n/Λ − f_n|` for the product route.
    pub product: f64,
    /// `|C_n/Λ − f_n|` for the continuum route.
    pub continuum: f64,
    /// `|C_n/Λ − f_n|` for the operator route.
    pub operator: f64,
    /// Operator against product, raw `C_n`.
    pub route_product: f64,
    /// Operator against continuum, raw `C_n`.
    pub route_continuum: f64,
    /// Gauge-audit residuals.
    pub gauge: f64,
    /// `|σ²_discrete − σ²_average|`.
    pub spread: f64,
    /// Distance of the Zak phase from {0, π} when `delta = 0`.
    pub zak: f64,
    /// Fitted convergence orders must lie within `2 ± order_window`.
    pub order_window: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            product: 1e-5,
            continuum: 1e-6,
            operator: 1e-10,
            route_product: 1e-4,
            route_continuum: 1e-6,
            gauge: 1e-6,
            spread: 1e-3,
            zak: 1e-6,
            order_window: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default)]
    pub task: Option<Task>,
    #[serde(default)]
    pub thetas_rad: Option<Vec<f64>>,
    #[serde(default)]
    pub grids: Option<Vec<usize>>,
    #[serde(default)]
    pub spin: SpinConfig,
    #[serde(default)]
    pub bloch: Option<BlochModel>,
    #[serde(default)]
    pub band: Option<usize>,
    #[serde(default)]
    pub gauge: Option<GaugeConfig>,
    #[serde(default)]
    pub routes: Option<Vec<RouteName>>,
    #[serde(default)]
    pub extraction: ExtractionMethod,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// A validated configuration with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub task: Task,
    pub thetas_rad: Vec<f64>,
    pub grids: Vec<usize>,
    pub spin: SpinConfig,
    pub bloch: BlochModel,
    pub band: usize,
    pub gauge: GaugeConfig,
    pub routes: Vec<RouteName>,
    pub extraction: ExtractionMethod,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
}

fn one() -> f64 {
    1.0
}

impl RunConfig {
    pub fn from_path(path: &Path, task: Task) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_json(&text, task)
    }

    pub fn from_json(text: &str, task: Task) -> Result<Self, RunError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| RunError::Config(vec![e.to_string()]))?;
        raw.resolve(task)
    }

    /// SHA-256 of the canonical JSON form, lowercase hex.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl RawConfig {
    pub fn resolve(self, task: Task) -> Result<RunConfig, RunError> {
        let mut bad = Vec::new();
        if let Some(t) = self.task {
            if t != task {
                bad.push(format!("task: config says {} but the subcommand runs {}", t.as_str(), task.as_str()));
            }
        }
        let thetas = self.thetas_rad.unwrap_or_else(|| task.default_thetas());
        for (i, t) in thetas.iter().enumerate() {
            if !(t.is_finite() && (0.0..=PI).contains(t)) {
                bad.push(format!("thetas_rad[{i}]: {t} is outside [0, π]"));
            }
        }
        if thetas.is_empty() && task != Task::Polarization {
            bad.push("thetas_rad: must not be empty".into());
        }
        let grids = self.grids.unwrap_or_else(|| task.default_grids());
        if grids.is_empty() {
            bad.push("grids: must not be empty".into());
        }
        for (i, g) in grids.iter().enumerate() {
            if *g < 64 || g % 2 != 0 {
                bad.push(format!("grids[{i}]: {g} must be even and at least 64"));
            }
        }
        if task == Task::Convergence && grids.len() < 2 {
            bad.push("grids: a convergence study needs at least two sizes".into());
        }
        if !(self.spin.mu.is_finite() && self.spin.mu != 0.0) {
            bad.push(format!("spin.mu: {} must be finite and nonzero", self.spin.mu));
        }
        let bloch = self.bloch.unwrap_or(BlochModel::new(1.0, 0.5, 0.3));
        if let Err(e) = bloch.validate() {
            bad.push(format!("bloch: {e}"));
        }
        let band = self.band.unwrap_or(0);
        if band > 1 {
            bad.push(format!("band: {band} must be 0 or 1"));
        }
        let gauge = self.gauge.unwrap_or_default();
        for (i, h) in gauge.harmonics.iter().enumerate() {
            if h.n == 0 {
                bad.push(format!("gauge.harmonics[{i}].n: must be at least 1"));
            }
            if !(h.cos.is_finite() && h.sin.is_finite()) {
                bad.push(format!("gauge.harmonics[{i}]: coefficients must be finite"));
            }
        }
        let routes = self.routes.unwrap_or_else(|| match task {
            Task::RouteCompare => vec![RouteName::Product, RouteName::Continuum, RouteName::Operator],
            _ => vec![RouteName::Product, RouteName::Continuum],
        });
        if routes.is_empty() {
            bad.push("routes: must not be empty".into());
        }
        if matches!(task, Task::Polarization | Task::Convergence) && routes.contains(&RouteName::Operator) {
            bad.push(format!("routes: operator route is not available for {}", task.as_str()));
        }
        let t = &self.tolerances;
        let named = [
            ("product", t.product),
            ("continuum", t.continuum),
            ("operator", t.operator),
            ("route_product", t.route_product),
            ("route_continuum", t.route_continuum),
            ("gauge", t.gauge),
            ("spread", t.spread),
            ("zak", t.zak),
            ("order_window", t.order_window),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                bad.push(format!("tolerances.{name}: {v} must be finite and positive"));
            }
        }
        if !bad.is_empty() {
            return Err(RunError::Config(bad));
        }
        Ok(RunConfig {
            task,
            thetas_rad: thetas,
            grids,
            spin: self.spin,
            bloch,
            band,
            gauge,
            routes,
            extraction: self.extraction,
            tolerances: self.tolerances,
            output: self.output,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_json("{}", Task::SpinSweep).unwrap();
        assert_eq!(c.thetas_rad.len(), 9);
        assert_eq!(c.grids, vec![512]);
        assert_eq!(c.routes, vec![RouteName::Product, RouteName::Continuum]);
        assert_eq!(c.gauge.winding, 1);
    }

    #[test]
    fn unknown_field_is_named() {
        let e = RunConfig::from_json(r#"{"gridz": [512]}"#, Task::SpinSweep).unwrap_err();
        assert!(e.to_string().contains("gridz"), "{e}");
        let e = RunConfig::from_json(r#"{"bloch": {"t1": 1, "t2": 0.5, "tt": 3}}"#, Task::Polarization).unwrap_err();
        assert!(e.to_string().contains("tt"), "{e}");
    }

    #[test]
    fn every_bad_field_is_listed() {
        let e = RunConfig::from_json(
            r#"{"thetas_rad": [0.1, 4.0], "grids": [63, 512], "spin": {"mu": 0}, "tolerances": {"gauge": -1}}"#,
            Task::SpinSweep,
        )
        .unwrap_err();
        let RunError::Config(list) = &e else { panic!("{e}") };
        assert_eq!(list.len(), 4, "{list:?}");
        for key in ["thetas_rad[1]", "grids[0]", "spin.mu", "tolerances.gauge"] {
            assert!(list.iter().any(|s| s.starts_with(key)), "{key} missing from {list:?}");
        }
    }

    #[test]
    fn task_must_match() {
        assert!(RunConfig::from_json(r#"{"task": "polarization"}"#, Task::SpinSweep).is_err());
        assert!(RunConfig::from_json(r#"{"task": "polarization"}"#, Task::Polarization).is_ok());
    }

    #[test]
    fn operator_route_only_for_spin_tasks() {
        assert!(RunConfig::from_json(r#"{"routes": ["operator"]}"#, Task::Polarization).is_err());
        assert!(RunConfig::from_json(r#"{"routes": ["operator"]}"#, Task::SpinSweep).is_ok());
    }

    #[test]
    fn hash_is_stable() {
        let a = RunConfig::from_json(r#"{"grids": [512]}"#, Task::SpinSweep).unwrap();
        let b = RunConfig::from_json("{ \"grids\" : [ 512 ] }", Task::SpinSweep).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let c = RunConfig::from_json(r#"{"grids": [256]}"#, Task::SpinSweep).unwrap();
        assert_ne!(a.hash(), c.hash());
    }
}
