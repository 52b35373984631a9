use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScrapError};
use crate::propagator::{DEFAULT_OUTPUT_POINTS, MAX_TOL, MIN_OUTPUT_POINTS, MIN_TOL};
use crate::pulse::PulseSchedule;
use crate::spectrum::CbjjParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Spectrum,
    ScrapNot,
    Readout,
    Swap,
    LzSweep,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::Spectrum,
        ScenarioKind::ScrapNot,
        ScenarioKind::Readout,
        ScenarioKind::Swap,
        ScenarioKind::LzSweep,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Spectrum => "spectrum",
            ScenarioKind::ScrapNot => "scrap-not",
            ScenarioKind::Readout => "readout",
            ScenarioKind::Swap => "swap",
            ScenarioKind::LzSweep => "lz-sweep",
        }
    }

    /// Pulse names the scenario reads from `[pulses]`.
    pub fn required_pulses(self) -> &'static [&'static str] {
        match self {
            ScenarioKind::Spectrum | ScenarioKind::LzSweep => &[],
            ScenarioKind::ScrapNot | ScenarioKind::Readout => &["dc", "mw"],
            ScenarioKind::Swap => &["dc_subspace2", "dc_subspace3"],
        }
    }

    /// Shipped configuration for this scenario.
    pub fn default_config(self) -> ScenarioConfig {
        let text = match self {
            ScenarioKind::Spectrum => include_str!("../../configs/spectrum.toml"),
            ScenarioKind::ScrapNot => include_str!("../../configs/scrap-not.toml"),
            ScenarioKind::Readout => include_str!("../../configs/readout.toml"),
            ScenarioKind::Swap => include_str!("../../configs/swap.toml"),
            ScenarioKind::LzSweep => include_str!("../../configs/lz-sweep.toml"),
        };
        ScenarioConfig::from_toml(text).expect("shipped configs parse")
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = ScrapError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
            ScrapError::invalid("scenario", format!("unknown scenario `{s}` (expected one of {})", names.join(", ")))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_output_points")]
    pub output_points: usize,
}

fn default_tol() -> f64 {
    1e-9
}

fn default_output_points() -> usize {
    DEFAULT_OUTPUT_POINTS
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            output_points: default_output_points(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumOptions {
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_levels() -> usize {
    3
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self { levels: default_levels() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingOptions {
    /// C_c / C_J.
    #[serde(default = "default_zeta")]
    pub zeta: f64,
}

fn default_zeta() -> f64 {
    0.05
}

impl Default for CouplingOptions {
    fn default() -> Self {
        Self { zeta: default_zeta() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LzOptions {
    /// Ω values in rad/ns.
    #[serde(default = "default_lz_rabi")]
    pub rabi: Vec<f64>,
    /// Sweep rates v in rad/ns².
    #[serde(default = "default_lz_rates")]
    pub rates: Vec<f64>,
    /// Half-window in units of Ω/v, so that |Δ| reaches this multiple of Ω.
    #[serde(default = "default_lz_window_ratio")]
    pub window_ratio: f64,
}

fn default_lz_rabi() -> Vec<f64> {
    vec![0.25, 0.4375, 0.625, 0.8125, 1.0]
}

fn default_lz_rates() -> Vec<f64> {
    vec![0.35, 0.8, 1.8, 4.0, 9.0]
}

fn default_lz_window_ratio() -> f64 {
    200.0
}

impl Default for LzOptions {
    fn default() -> Self {
        Self {
            rabi: default_lz_rabi(),
            rates: default_lz_rates(),
            window_ratio: default_lz_window_ratio(),
        }
    }
}

/// One scenario run. Every optional section is filled with its default on
/// load, so serialising a loaded config records the full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default = "CbjjParams::reference")]
    pub cbjj: CbjjParams,
    #[serde(default)]
    pub pulses: BTreeMap<String, PulseSchedule>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub spectrum: SpectrumOptions,
    #[serde(default)]
    pub coupling: CouplingOptions,
    #[serde(default)]
    pub lz: LzOptions,
    /// Where artifacts go; not part of the recorded run.
    #[serde(default, skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| ScrapError::Config(format!("config: {e}")))
    }

    /// Accepts a config object or a run summary carrying `metadata.config`.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ScrapError::Config(format!("config: {e}")))?;
        let config = match value.pointer("/metadata/config") {
            Some(inner) => inner.clone(),
            None => value,
        };
        serde_json::from_value(config).map_err(|e| ScrapError::Config(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScrapError::Config(format!("cannot read {}: {e}", path.display())))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json(&text),
            _ => Self::from_toml(&text),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn pulse(&self, name: &str) -> Result<&PulseSchedule> {
        self.pulses
            .get(name)
            .ok_or_else(|| ScrapError::invalid(&format!("pulses.{name}"), "missing"))
    }

    pub fn validate(&self) -> Result<()> {
        self.cbjj.validate()?;
        let tol = self.integrator.tol;
        if !(tol > MIN_TOL && tol < MAX_TOL) {
            return Err(ScrapError::invalid(
                "integrator.tol",
                format!("{tol:e} outside ({MIN_TOL:e}, {MAX_TOL:e})"),
            ));
        }
        if self.integrator.output_points < MIN_OUTPUT_POINTS {
            return Err(ScrapError::invalid(
                "integrator.output_points",
                format!("{} < {MIN_OUTPUT_POINTS}", self.integrator.output_points),
            ));
        }
        for name in self.scenario.required_pulses() {
            self.pulse(name)?;
        }
        for (name, pulse) in &self.pulses {
            pulse.validate().map_err(|e| match e {
                ScrapError::InvalidParameter { field, reason } => {
                    ScrapError::invalid(&format!("pulses.{name}.{field}"), reason)
                }
                other => other,
            })?;
        }
        match self.scenario {
            ScenarioKind::Spectrum if self.spectrum.levels < 2 => {
                Err(ScrapError::invalid("spectrum.levels", "need at least 2 levels"))
            }
            ScenarioKind::Swap if !(self.coupling.zeta > 0.0 && self.coupling.zeta < 1.0) => {
                Err(ScrapError::invalid("coupling.zeta", format!("{} outside (0, 1)", self.coupling.zeta)))
            }
            ScenarioKind::LzSweep => {
                let lz = &self.lz;
                if lz.rabi.is_empty() || lz.rates.is_empty() {
                    return Err(ScrapError::invalid("lz", "rabi and rates must be non-empty"));
                }
                if lz.rabi.iter().any(|&o| !(o > 0.0 && o.is_finite())) {
                    return Err(ScrapError::invalid("lz.rabi", "values must be positive"));
                }
                if lz.rates.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
                    return Err(ScrapError::invalid("lz.rates", "values must be positive"));
                }
                if !(lz.window_ratio >= 10.0 && lz.window_ratio.is_finite()) {
                    return Err(ScrapError::invalid("lz.window_ratio", "must be at least 10"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}
