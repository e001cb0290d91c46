//! Built-in scenarios and their parameter schemas.

mod consensus;
mod control;
mod custom;
mod fastslow;
mod linear;
mod polar;
mod sir;

use std::collections::BTreeMap;

use crate::config::{ScenarioConfig, Value};
use crate::output::OutputSink;
use crate::CliError;

/// One declared parameter of a scenario.
pub struct ParamSpec {
    pub name: &'static str,
    /// Display default (the scenario code owns the actual value).
    pub default: &'static str,
    pub help: &'static str,
}

/// A runnable named experiment.
pub trait Scenario: Sync {
    fn name(&self) -> &'static str;
    /// One-line account of what the experiment demonstrates.
    fn describe(&self) -> &'static str;
    fn params(&self) -> &'static [ParamSpec];
    fn run(&self, cfg: &ScenarioConfig, sink: &mut OutputSink) -> Result<(), CliError>;
}

/// All built-ins, in listing order.
pub fn all() -> Vec<Box<dyn Scenario>> {
    vec![
        Box::new(sir::Sir),
        Box::new(linear::Linear),
        Box::new(polar::Polar),
        Box::new(fastslow::FastSlow),
        Box::new(control::Control),
        Box::new(consensus::Consensus),
        Box::new(custom::Custom),
    ]
}

pub fn find(name: &str) -> Option<Box<dyn Scenario>> {
    all().into_iter().find(|s| s.name() == name)
}

/// Strict parameter validation: every supplied key must belong to the
/// scenario's schema (no silent defaults for misspellings).
pub fn validate_parameters(
    scenario: &dyn Scenario,
    parameters: &BTreeMap<String, Value>,
) -> Result<(), CliError> {
    for key in parameters.keys() {
        if !scenario.params().iter().any(|p| p.name == key) {
            return Err(CliError::Validation(format!(
                "scenario '{}' has no parameter '{key}'",
                scenario.name()
            )));
        }
    }
    Ok(())
}

/// Human-readable listing.
pub fn render_list() -> String {
    let mut out = String::from("Available scenarios:\n");
    for s in all() {
        out.push_str(&format!("  {:<10} {}\n", s.name(), s.describe()));
        for p in s.params() {
            out.push_str(&format!(
                "      {:<18} default {:<12} {}\n",
                p.name, p.default, p.help
            ));
        }
    }
    out
}

/// Machine listing: one scenario per line,
/// `name<TAB>description<TAB>param=default;...`.
pub fn render_list_machine() -> String {
    let mut out = String::new();
    for s in all() {
        let params: Vec<String> = s
            .params()
            .iter()
            .map(|p| format!("{}={}", p.name, p.default))
            .collect();
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            s.name(),
            s.describe(),
            params.join(";")
        ));
    }
    out
}
