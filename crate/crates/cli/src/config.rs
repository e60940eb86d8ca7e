//! Scenario documents: one TOML file per run, units in `presets/SCHEMA.md`.

use std::fmt;
use std::path::Path;

use crossstitch::{EmitterKind, EmitterSpec, LatticeConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig2,
    Fig4a,
    Fig4b,
    Fig5,
    Fig7,
    Fig8a,
    Fig8c,
    Custom,
}

impl Scenario {
    pub const PRESETS: [Scenario; 7] = [
        Scenario::Fig2,
        Scenario::Fig4a,
        Scenario::Fig4b,
        Scenario::Fig5,
        Scenario::Fig7,
        Scenario::Fig8a,
        Scenario::Fig8c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig4a => "fig4a",
            Scenario::Fig4b => "fig4b",
            Scenario::Fig5 => "fig5",
            Scenario::Fig7 => "fig7",
            Scenario::Fig8a => "fig8a",
            Scenario::Fig8c => "fig8c",
            Scenario::Custom => "custom",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::PRESETS
            .into_iter()
            .chain([Scenario::Custom])
            .find(|s| s.name() == name)
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmitterConfig {
    pub kind: EmitterKind,
    pub frequency: f64,
    pub coupling: f64,
    #[serde(default)]
    pub phase: f64,
    /// Cell of the A-leg attachment.
    pub cell: usize,
    /// Cell of the B-leg attachment (giant emitters only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cell_b: Option<usize>,
}

impl EmitterConfig {
    pub fn to_spec(&self) -> EmitterSpec {
        match self.kind {
            EmitterKind::Small => EmitterSpec::small(self.frequency, self.coupling, self.cell),
            EmitterKind::Giant => EmitterSpec::giant(
                self.frequency,
                self.coupling,
                self.phase,
                self.cell,
                self.cell_b.unwrap_or(self.cell),
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Cells between the A legs of emitter 0 and emitter 1.
    Separation,
    /// Frequency of every emitter.
    Frequency,
    /// Coupling of every emitter.
    Coupling,
    /// Phase of every giant emitter.
    Phase,
    IntraHop,
    InterHop,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Separation => "separation",
            SweepParameter::Frequency => "frequency",
            SweepParameter::Coupling => "coupling",
            SweepParameter::Phase => "phase",
            SweepParameter::IntraHop => "intra_hop",
            SweepParameter::InterHop => "inter_hop",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

/// Energy-resolved field projection. Without an explicit energy, the strongest
/// line of emitter 0's amplitude is located first and used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionConfig {
    pub window_start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    #[serde(default)]
    pub description: String,
    /// Copied verbatim into the output preamble.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub horizon: f64,
    pub sample_spacing: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
    pub lattice: LatticeConfig,
    pub emitters: Vec<EmitterConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection: Option<ProjectionConfig>,
}

impl ScenarioConfig {
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::config(source_name, e.to_string()))?;
        config.validate().map_err(|m| CliError::config(source_name, m))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario configs always serialise")
    }

    /// Number of sampling intervals; the horizon must be a whole multiple of the spacing.
    pub fn sample_count(&self) -> usize {
        (self.horizon / self.sample_spacing).round() as usize
    }

    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.sample_count())
            .map(|i| i as f64 * self.sample_spacing)
            .collect()
    }

    pub fn emitter_specs(&self) -> Vec<EmitterSpec> {
        self.emitters.iter().map(EmitterConfig::to_spec).collect()
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(format!("horizon must be positive, got {}", self.horizon));
        }
        if !(self.sample_spacing > 0.0 && self.sample_spacing <= self.horizon) {
            return Err(format!(
                "sample_spacing must lie in (0, horizon], got {}",
                self.sample_spacing
            ));
        }
        let ratio = self.horizon / self.sample_spacing;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(format!(
                "horizon {} is not a whole number of sample spacings {}",
                self.horizon, self.sample_spacing
            ));
        }
        for &t in &self.snapshots {
            let k = t / self.sample_spacing;
            if t < 0.0 || t > self.horizon || (k - k.round()).abs() > 1e-9 * k.max(1.0) {
                return Err(format!("snapshot time {t} is not on the sample grid"));
            }
        }
        if self.emitters.is_empty() {
            return Err("at least one emitter is required".into());
        }
        self.lattice.validate().map_err(|e| e.to_string())?;
        for (q, e) in self.emitters.iter().enumerate() {
            if e.kind == EmitterKind::Small && e.cell_b.is_some() {
                return Err(format!("emitter {q}: cell_b is only meaningful for giant emitters"));
            }
            e.to_spec()
                .validate(self.lattice.n_cells)
                .map_err(|err| format!("emitter {q}: {err}"))?;
        }
        if let Some(p) = &self.projection {
            if !(p.window_start >= 0.0 && p.window_start < self.horizon) {
                return Err(format!(
                    "projection window_start {} must lie in [0, horizon)",
                    p.window_start
                ));
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err("sweep needs at least one value".into());
            }
            if sweep.parameter == SweepParameter::Separation {
                if self.emitters.len() != 2 {
                    return Err("a separation sweep needs exactly two emitters".into());
                }
                for &v in &sweep.values {
                    if v < 0.0 || v.fract() != 0.0 {
                        return Err(format!("separation {v} is not a non-negative whole number"));
                    }
                    self.sweep_point(v).validate_placement()?;
                }
            }
        }
        Ok(())
    }

    fn validate_placement(&self) -> std::result::Result<(), String> {
        for (q, e) in self.emitters.iter().enumerate() {
            e.to_spec()
                .validate(self.lattice.n_cells)
                .map_err(|err| format!("emitter {q}: {err}"))?;
        }
        Ok(())
    }

    /// Sweep values, or a single `None` point when there is no sweep.
    pub fn points(&self) -> Vec<Option<f64>> {
        match &self.sweep {
            Some(s) => s.values.iter().copied().map(Some).collect(),
            None => vec![None],
        }
    }

    /// The configuration at one sweep value.
    pub fn sweep_point(&self, value: f64) -> ScenarioConfig {
        let mut c = self.clone();
        let Some(sweep) = &self.sweep else { return c };
        match sweep.parameter {
            SweepParameter::Separation => {
                let d = value as usize;
                let first = c.emitters[0].clone();
                let leg = first.cell_b.map(|b| b as i64 - first.cell as i64);
                let second = &mut c.emitters[1];
                second.cell = first.cell + d;
                if second.kind == EmitterKind::Giant {
                    second.cell_b = Some((second.cell as i64 + leg.unwrap_or(0)).max(0) as usize);
                }
            }
            SweepParameter::Frequency => c.emitters.iter_mut().for_each(|e| e.frequency = value),
            SweepParameter::Coupling => c.emitters.iter_mut().for_each(|e| e.coupling = value),
            SweepParameter::Phase => c.emitters.iter_mut().for_each(|e| e.phase = value),
            SweepParameter::IntraHop => c.lattice.intra_hop = value,
            SweepParameter::InterHop => c.lattice.inter_hop = value,
        }
        c.sweep = None;
        c
    }

    /// File stem for one sweep point.
    pub fn point_label(&self, value: Option<f64>) -> String {
        match (&self.sweep, value) {
            (Some(s), Some(v)) => format!("{}_{}_{}", self.scenario, s.parameter.name(), format_value(v)),
            _ => self.scenario.to_string(),
        }
    }
}

/// Compact, filename-safe rendering of a sweep value.
fn format_value(v: f64) -> String {
    let s = if v.fract() == 0.0 { format!("{v:.0}") } else { format!("{v}") };
    s.replace('-', "m").replace('.', "p")
}
