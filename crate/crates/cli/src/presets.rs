//! Scenario presets shipped as data.

use std::path::Path;

use crate::config::{Scenario, ScenarioConfig};
use crate::error::{CliError, Result};

/// Units and keys of the scenario format.
pub const SCHEMA: &str = include_str!("../presets/SCHEMA.md");

pub fn preset_text(scenario: Scenario) -> Option<&'static str> {
    Some(match scenario {
        Scenario::Fig2 => include_str!("../presets/fig2.toml"),
        Scenario::Fig4a => include_str!("../presets/fig4a.toml"),
        Scenario::Fig4b => include_str!("../presets/fig4b.toml"),
        Scenario::Fig5 => include_str!("../presets/fig5.toml"),
        Scenario::Fig7 => include_str!("../presets/fig7.toml"),
        Scenario::Fig8a => include_str!("../presets/fig8a.toml"),
        Scenario::Fig8c => include_str!("../presets/fig8c.toml"),
        Scenario::Custom => return None,
    })
}

/// Built-in preset, or `<dir>/<name>.toml` when a preset directory is given.
pub fn load_preset(scenario: Scenario, dir: Option<&Path>) -> Result<ScenarioConfig> {
    match dir {
        Some(dir) => ScenarioConfig::load(&dir.join(format!("{scenario}.toml"))),
        None => {
            let text = preset_text(scenario)
                .ok_or_else(|| CliError::config(scenario.name(), "no built-in preset for custom scenarios"))?;
            ScenarioConfig::parse(text, &format!("built-in preset {scenario}"))
        }
    }
}
