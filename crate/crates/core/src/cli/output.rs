use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::cli::config::ScenarioConfig;
use crate::error::{Result, ScrapError};
use crate::propagator::Trajectory;

/// `|02⟩` → `02`.
pub fn column_label(basis_label: &str) -> String {
    basis_label.chars().filter(|c| !matches!(c, '|' | '⟩' | '>' | '<' | '⟨')).collect()
}

fn number(x: f64) -> String {
    format!("{x:.8e}")
}

/// Population time series with header `t_ns,P_<label>...`.
pub fn emit_timeseries(trajectory: &Trajectory, path: &Path) -> Result<()> {
    let mut out = String::from("t_ns");
    for label in &trajectory.basis_labels {
        write!(out, ",P_{}", column_label(label)).unwrap();
    }
    out.push('\n');
    for (t, pops) in trajectory.times.iter().zip(&trajectory.populations) {
        out.push_str(&number(*t));
        for p in pops {
            out.push(',');
            out.push_str(&number(*p));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Plain numeric table.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&x| number(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    /// Fully resolved config; feeding it back reproduces the run.
    pub config: ScenarioConfig,
    /// Values the scenario derived or chose on top of the config.
    pub derived: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    #[serde(flatten)]
    pub metrics: BTreeMap<String, f64>,
    /// File names relative to the output directory.
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    pub metadata: Metadata,
}

impl RunSummary {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            scenario: config.scenario.name().to_string(),
            metrics: BTreeMap::new(),
            artifacts: Vec::new(),
            warnings: Vec::new(),
            metadata: Metadata {
                config: config.clone(),
                derived: BTreeMap::new(),
            },
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    pub fn derived(&mut self, name: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("metadata serialises");
        self.metadata.derived.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.metrics.iter().find(|(_, v)| !v.is_finite()) {
            Some((name, v)) => Err(ScrapError::Config(format!("metric `{name}` is not finite ({v})"))),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("summary serialises");
        text.push('\n');
        text
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("summary.json");
        fs::write(&path, self.to_json())?;
        Ok(path)
    }
}
