//! Scenario file loading: JSON parse, override application, schema
//! deserialization, and invariant validation, each failing with the
//! exit-code class a batch caller expects.

use std::fs;
use std::path::Path;

use asaa_core::sim::Scenario;
use serde_json::Value;

use crate::error::CliError;
use crate::overrides::{apply_override, parse_assignment};

/// A scenario that passed every hard check, plus any advisory warnings
/// the caller should surface.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

pub fn read_scenario_value(path: &Path) -> Result<Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

pub fn scenario_from_value(value: Value, origin: &Path) -> Result<Scenario, CliError> {
    serde_json::from_value(value)
        .map_err(|e| CliError::Validation(format!("{}: {e}", origin.display())))
}

/// Reads, overrides, deserializes, and validates one scenario file.
/// Override assignments are raw `KEY=VALUE` strings as given on the
/// command line.
pub fn load_scenario(path: &Path, overrides: &[String]) -> Result<LoadedScenario, CliError> {
    let mut value = read_scenario_value(path)?;
    for assignment in overrides {
        let (key, raw) = parse_assignment(assignment)?;
        apply_override(&mut value, key, raw)?;
    }
    let scenario = scenario_from_value(value, path)?;
    let report = scenario.validate();
    if !report.is_ok() {
        return Err(CliError::Validation(format!(
            "{}: {}",
            path.display(),
            report.errors.join("; ")
        )));
    }
    Ok(LoadedScenario { scenario, warnings: report.warnings })
}
