//! Strict sectioned key=value scenario configs.
//!
//! ```text
//! # comments run to end of line
//! [scenario]
//! name = sir
//!
//! [parameters]
//! c0 = 1.0
//! gamma2_hat = [0.2, -0.1]     # vectors in brackets
//!
//! [integrator]
//! dt = 1e-3
//! horizon = 40
//! master_seed = 42
//! record_stride = 10
//!
//! [run]
//! ensemble = 64
//! outputs = report, paths
//! output_dir = out/sir
//! ```
//!
//! Parsing is strict in two stages: malformed syntax (missing `=`, bad
//! numbers, unterminated vectors, duplicate keys) is a *parse* error;
//! unknown sections, unknown keys, or out-of-range values are *validation*
//! errors. No defaults are invented for misspelled keys.

use std::collections::BTreeMap;
use std::path::PathBuf;

use cjd_core::IntegratorConfig;

use crate::scenarios;
use crate::CliError;

/// A parsed config value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
    Vector(Vec<f64>),
}

impl Value {
    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Number(_) => "number",
            Value::Text(_) => "text",
            Value::Vector(_) => "vector",
        }
    }
}

/// Which output files a run produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Paths,
    Occupation,
    Report,
}

impl OutputKind {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "paths" => Ok(OutputKind::Paths),
            "occupation" => Ok(OutputKind::Occupation),
            "report" => Ok(OutputKind::Report),
            other => Err(CliError::Validation(format!(
                "unknown output kind '{other}' (expected paths, occupation, report)"
            ))),
        }
    }
}

/// A fully validated scenario description.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: String,
    pub parameters: BTreeMap<String, Value>,
    pub integrator: IntegratorConfig,
    pub ensemble: usize,
    pub outputs: Vec<OutputKind>,
    pub output_dir: PathBuf,
}

fn parse_scalar(raw: &str, context: &str) -> Result<Value, CliError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Err(CliError::Parse(format!("{context}: empty value")));
    }
    if let Some(inner) = raw.strip_prefix('[') {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| CliError::Parse(format!("{context}: unterminated vector")))?;
        let mut v = Vec::new();
        let trimmed = inner.trim();
        if !trimmed.is_empty() {
            for tok in trimmed.split(',') {
                let x: f64 = tok
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Parse(format!("{context}: bad number '{tok}'")))?;
                v.push(x);
            }
        }
        return Ok(Value::Vector(v));
    }
    if let Ok(x) = raw.parse::<f64>() {
        return Ok(Value::Number(x));
    }
    Ok(Value::Text(raw.to_string()))
}

/// Raw section -> key -> value map produced by pass one.
type RawSections = BTreeMap<String, BTreeMap<String, Value>>;

fn parse_sections(text: &str) -> Result<RawSections, CliError> {
    let mut sections: RawSections = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |msg: &str| CliError::Parse(format!("line {}: {msg}", lineno + 1));
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| at("unterminated section header"))?
                .trim()
                .to_string();
            if name.is_empty() {
                return Err(at("empty section name"));
            }
            if sections.contains_key(&name) {
                return Err(at(&format!("duplicate section [{name}]")));
            }
            sections.insert(name.clone(), BTreeMap::new());
            current = Some(name);
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(at("expected 'key = value'"));
        };
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(at("empty key"));
        }
        let section = current
            .as_ref()
            .ok_or_else(|| at("key outside of any [section]"))?;
        let value = parse_scalar(value, &format!("line {}", lineno + 1))?;
        let entry = sections.get_mut(section).expect("section exists");
        if entry.insert(key.clone(), value).is_some() {
            return Err(at(&format!("duplicate key '{key}'")));
        }
    }
    Ok(sections)
}

fn get_number(
    map: &BTreeMap<String, Value>,
    key: &str,
    section: &str,
) -> Result<Option<f64>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::Number(x)) => Ok(Some(*x)),
        Some(other) => Err(CliError::Validation(format!(
            "[{section}] {key}: expected a number, got {}",
            other.type_name()
        ))),
    }
}

fn get_integer(
    map: &BTreeMap<String, Value>,
    key: &str,
    section: &str,
) -> Result<Option<u64>, CliError> {
    match get_number(map, key, section)? {
        None => Ok(None),
        Some(x) if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 => Ok(Some(x as u64)),
        Some(x) => Err(CliError::Validation(format!(
            "[{section}] {key}: expected a nonnegative integer, got {x}"
        ))),
    }
}

/// Parse and validate a scenario config.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, CliError> {
    let mut sections = parse_sections(text)?;

    for name in sections.keys() {
        if !matches!(name.as_str(), "scenario" | "parameters" | "integrator" | "run") {
            return Err(CliError::Validation(format!("unknown section [{name}]")));
        }
    }

    let scenario_sec = sections
        .remove("scenario")
        .ok_or_else(|| CliError::Validation("missing [scenario] section".into()))?;
    for key in scenario_sec.keys() {
        if key != "name" {
            return Err(CliError::Validation(format!(
                "[scenario] unknown key '{key}'"
            )));
        }
    }
    let scenario = match scenario_sec.get("name") {
        Some(Value::Text(s)) => s.clone(),
        Some(other) => {
            return Err(CliError::Validation(format!(
                "[scenario] name: expected text, got {}",
                other.type_name()
            )))
        }
        None => return Err(CliError::Validation("[scenario] name is required".into())),
    };
    let spec = scenarios::find(&scenario).ok_or_else(|| {
        CliError::Validation(format!(
            "unknown scenario '{scenario}' (see `cjd list` for the built-ins)"
        ))
    })?;

    let integrator_sec = sections.remove("integrator").unwrap_or_default();
    for key in integrator_sec.keys() {
        if !matches!(key.as_str(), "dt" | "horizon" | "master_seed" | "record_stride") {
            return Err(CliError::Validation(format!(
                "[integrator] unknown key '{key}'"
            )));
        }
    }
    let dt = get_number(&integrator_sec, "dt", "integrator")?.unwrap_or(1e-3);
    let horizon = get_number(&integrator_sec, "horizon", "integrator")?.unwrap_or(10.0);
    let master_seed = get_integer(&integrator_sec, "master_seed", "integrator")?.unwrap_or(0);
    let record_stride =
        get_integer(&integrator_sec, "record_stride", "integrator")?.unwrap_or(1) as usize;
    let integrator = IntegratorConfig {
        dt,
        horizon,
        master_seed,
        record_stride,
    };
    integrator
        .validate()
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let run_sec = sections.remove("run").unwrap_or_default();
    for key in run_sec.keys() {
        if !matches!(key.as_str(), "ensemble" | "outputs" | "output_dir") {
            return Err(CliError::Validation(format!("[run] unknown key '{key}'")));
        }
    }
    let ensemble = get_integer(&run_sec, "ensemble", "run")?.unwrap_or(16) as usize;
    if ensemble == 0 {
        return Err(CliError::Validation("[run] ensemble must be >= 1".into()));
    }
    let outputs = match run_sec.get("outputs") {
        None => vec![OutputKind::Report],
        Some(Value::Text(s)) => {
            let mut kinds = Vec::new();
            for tok in s.split(',') {
                let kind = OutputKind::parse(tok.trim())?;
                if !kinds.contains(&kind) {
                    kinds.push(kind);
                }
            }
            kinds
        }
        Some(other) => {
            return Err(CliError::Validation(format!(
                "[run] outputs: expected text, got {}",
                other.type_name()
            )))
        }
    };
    let output_dir = match run_sec.get("output_dir") {
        None => PathBuf::from("out"),
        Some(Value::Text(s)) => PathBuf::from(s),
        Some(other) => {
            return Err(CliError::Validation(format!(
                "[run] output_dir: expected text, got {}",
                other.type_name()
            )))
        }
    };

    let parameters = sections.remove("parameters").unwrap_or_default();
    scenarios::validate_parameters(spec.as_ref(), &parameters)?;

    Ok(ScenarioConfig {
        scenario,
        parameters,
        integrator,
        ensemble,
        outputs,
        output_dir,
    })
}

/// Typed access to `[parameters]` with per-scenario defaults.
pub struct Params<'a> {
    map: &'a BTreeMap<String, Value>,
}

impl<'a> Params<'a> {
    pub fn new(map: &'a BTreeMap<String, Value>) -> Self {
        Self { map }
    }

    pub fn has(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.map.get(key) {
            None => Ok(default),
            Some(Value::Number(x)) => Ok(*x),
            Some(other) => Err(CliError::Validation(format!(
                "parameter {key}: expected a number, got {}",
                other.type_name()
            ))),
        }
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let x = self.f64(key, default as f64)?;
        if x < 0.0 || x.fract() != 0.0 {
            return Err(CliError::Validation(format!(
                "parameter {key}: expected a nonnegative integer, got {x}"
            )));
        }
        Ok(x as usize)
    }

    pub fn vector(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Vector(v)) => Ok(v.clone()),
            Some(Value::Number(x)) => Ok(vec![*x]),
            Some(other) => Err(CliError::Validation(format!(
                "parameter {key}: expected a vector, got {}",
                other.type_name()
            ))),
        }
    }

    pub fn text(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.map.get(key) {
            None => Ok(default.to_string()),
            Some(Value::Text(s)) => Ok(s.clone()),
            Some(other) => Err(CliError::Validation(format!(
                "parameter {key}: expected text, got {}",
                other.type_name()
            ))),
        }
    }

    /// Paired `(mark, weight)` atoms from `<key>_hat` / `<key>_weight`.
    pub fn atoms(&self, prefix: &str) -> Result<Vec<(f64, f64)>, CliError> {
        let marks = self.vector(&format!("{prefix}_hat"), &[])?;
        let weights = self.vector(&format!("{prefix}_weight"), &[])?;
        if marks.len() != weights.len() {
            return Err(CliError::Validation(format!(
                "parameters {prefix}_hat and {prefix}_weight must have equal length"
            )));
        }
        Ok(marks.into_iter().zip(weights).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[scenario]\nname = linear\n";

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.scenario, "linear");
        assert_eq!(cfg.ensemble, 16);
        assert_eq!(cfg.outputs, vec![OutputKind::Report]);
    }

    #[test]
    fn syntax_errors_are_parse_errors() {
        for bad in [
            "[scenario\nname = linear\n",
            "[scenario]\nname linear\n",
            "name = linear\n",
            "[scenario]\nname = linear\nname = sir\n",
            "[parameters]\nv = [1, 2\n",
            "[parameters]\nv = [1, oops]\n",
        ] {
            match parse_config(bad) {
                Err(CliError::Parse(_)) => {}
                other => panic!("expected parse error for {bad:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_keys_fail_validation() {
        for bad in [
            "[scenario]\nname = linear\n[mystery]\nx = 1\n",
            "[scenario]\nname = linear\nextra = 1\n",
            "[scenario]\nname = linear\n[integrator]\ndtt = 0.1\n",
            "[scenario]\nname = linear\n[run]\nthreads = 2\n",
            "[scenario]\nname = linear\n[parameters]\nnot_a_param = 1\n",
        ] {
            match parse_config(bad) {
                Err(CliError::Validation(_)) => {}
                other => panic!("expected validation error for {bad:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn unknown_scenario_rejected() {
        let bad = "[scenario]\nname = warp\n";
        assert!(matches!(parse_config(bad), Err(CliError::Validation(_))));
    }

    #[test]
    fn vectors_and_comments_parse() {
        let text = "\
[scenario]
name = linear   # the scalar benchmark
[parameters]
gamma2_hat = [0.5, -0.25]
gamma2_weight = [1.0, 2.0]
[integrator]
dt = 1e-2
horizon = 5
[run]
outputs = report, paths
output_dir = tmpdir
";
        let cfg = parse_config(text).unwrap();
        let p = Params::new(&cfg.parameters);
        assert_eq!(p.atoms("gamma2").unwrap(), vec![(0.5, 1.0), (-0.25, 2.0)]);
        assert_eq!(cfg.outputs, vec![OutputKind::Report, OutputKind::Paths]);
        assert_eq!(cfg.output_dir, PathBuf::from("tmpdir"));
    }
}
