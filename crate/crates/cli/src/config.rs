//! Run configuration: a JSON document whose every field is optional.
//!
//! ```json
//! {
//!   "parameters": { "p_osr": 360, "z_hs": 27 },
//!   "scenarios": ["HS", "PS", "PT"],
//!   "regimes": ["communication", "no_communication"],
//!   "solver": { "restarts": 27, "tolerance": 1e-10, "max_iterations": 5000, "grid_resolution": 50 },
//!   "output": { "directory": "out", "formats": ["json", "csv"] }
//! }
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use pollinate_core::params::REAL_FIELDS;
use pollinate_core::scenarios::SuiteSelection;
use pollinate_core::{ParameterSet, PolicyKind, Regime, SolverConfig, Violation};
use serde_json::{Map, Value};

use crate::CliError;

const TOP_LEVEL_KEYS: &[&str] = &["parameters", "scenarios", "regimes", "solver", "output"];
const SOLVER_KEYS: &[&str] = &["restarts", "tolerance", "max_iterations", "grid_resolution"];
const OUTPUT_KEYS: &[&str] = &["directory", "formats"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ParameterSet,
    pub selection: SuiteSelection,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ParameterSet::default_calibration(),
            selection: SuiteSelection::default(),
            solver: SolverConfig::default(),
            output_dir: PathBuf::from("out"),
            formats: vec![Format::Json, Format::Csv],
        }
    }
}

impl RunConfig {
    pub fn writes(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

/// Reads and validates a config file; `None` yields the defaults.
pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Io(format!("cannot parse {}: {e}", path.display())))?;
    from_value(&value).map_err(CliError::Config)
}

/// Builds a config from parsed JSON, collecting every violation with its
/// key path.
pub fn from_value(value: &Value) -> Result<RunConfig, Vec<Violation>> {
    let mut violations = Vec::new();
    let mut config = RunConfig::default();

    let Some(root) = value.as_object() else {
        return Err(vec![Violation::new("", "config must be a JSON object")]);
    };
    reject_unknown(root, TOP_LEVEL_KEYS, "", &mut violations);

    if let Some(v) = root.get("parameters") {
        match v.as_object() {
            Some(map) => config.params = parameters(map, &mut violations),
            None => violations.push(Violation::new("parameters", "must be an object")),
        }
    }
    if let Some(v) = root.get("scenarios") {
        config.selection.policies = list(v, "scenarios", &mut violations, |s| {
            PolicyKind::from_str(s).map_err(|_| format!("unknown scenario `{s}` (expected HS, PS or PT)"))
        })
        .into_iter()
        .filter(|k| *k != PolicyKind::Bau)
        .collect();
    }
    if let Some(v) = root.get("regimes") {
        config.selection.regimes = list(v, "regimes", &mut violations, |s| {
            Regime::from_str(s).map_err(|_| format!("unknown regime `{s}` (expected communication or no_communication)"))
        });
    }
    if let Some(v) = root.get("solver") {
        match v.as_object() {
            Some(map) => {
                reject_unknown(map, SOLVER_KEYS, "solver", &mut violations);
                let known: Map<String, Value> = map
                    .iter()
                    .filter(|(k, _)| SOLVER_KEYS.contains(&k.as_str()))
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                match serde_json::from_value::<SolverConfig>(Value::Object(known)) {
                    Ok(solver) => {
                        if let Err(e) = solver.validate() {
                            violations.push(Violation::new("solver", e.to_string()));
                        }
                        config.solver = solver;
                    }
                    Err(e) => violations.push(Violation::new("solver", e.to_string())),
                }
            }
            None => violations.push(Violation::new("solver", "must be an object")),
        }
    }
    if let Some(v) = root.get("output") {
        match v.as_object() {
            Some(map) => {
                reject_unknown(map, OUTPUT_KEYS, "output", &mut violations);
                if let Some(d) = map.get("directory") {
                    match d.as_str() {
                        Some(s) if !s.is_empty() => config.output_dir = PathBuf::from(s),
                        _ => violations.push(Violation::new("output.directory", "must be a non-empty string")),
                    }
                }
                if let Some(f) = map.get("formats") {
                    config.formats = list(f, "output.formats", &mut violations, |s| match s {
                        "json" => Ok(Format::Json),
                        "csv" => Ok(Format::Csv),
                        other => Err(format!("unknown format `{other}` (expected json or csv)")),
                    });
                }
            }
            None => violations.push(Violation::new("output", "must be an object")),
        }
    }

    if violations.is_empty() {
        Ok(config)
    } else {
        Err(violations)
    }
}

fn reject_unknown(map: &Map<String, Value>, known: &[&str], prefix: &str, out: &mut Vec<Violation>) {
    for key in map.keys() {
        if !known.contains(&key.as_str()) {
            out.push(Violation::new(join(prefix, key), "unknown key"));
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn list<T: PartialEq>(
    value: &Value,
    path: &str,
    out: &mut Vec<Violation>,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Vec<T> {
    let Some(items) = value.as_array() else {
        out.push(Violation::new(path, "must be an array of strings"));
        return Vec::new();
    };
    let mut parsed = Vec::new();
    for (i, item) in items.iter().enumerate() {
        match item.as_str().map(&parse) {
            Some(Ok(v)) => {
                if !parsed.contains(&v) {
                    parsed.push(v);
                }
            }
            Some(Err(msg)) => out.push(Violation::new(format!("{path}[{i}]"), msg)),
            None => out.push(Violation::new(format!("{path}[{i}]"), "must be a string")),
        }
    }
    parsed
}

/// Applies overrides on top of the default calibration. `b_ref` keeps
/// tracking its derived value unless it is overridden itself.
fn parameters(map: &Map<String, Value>, out: &mut Vec<Violation>) -> ParameterSet {
    let mut params = ParameterSet::default_calibration();
    for (key, value) in map {
        let path = format!("parameters.{key}");
        if key == "n_farmers" {
            match value.as_u64().and_then(|n| u32::try_from(n).ok()) {
                Some(n) => params.n_farmers = n,
                None => out.push(Violation::new(path, "n_farmers must be a non-negative integer")),
            }
            continue;
        }
        if !REAL_FIELDS.contains(&key.as_str()) {
            out.push(Violation::new(path, "unknown key"));
            continue;
        }
        if key == "b_ref" {
            continue;
        }
        match value.as_f64() {
            Some(v) => params = params.with_override(key, v).expect("listed field"),
            None => out.push(Violation::new(path, "must be a number")),
        }
    }
    if let Some(value) = map.get("b_ref") {
        match value.as_f64() {
            Some(v) => params.b_ref = v,
            None => out.push(Violation::new("parameters.b_ref", "must be a number")),
        }
    }
    for v in params.violations() {
        out.push(Violation::new(format!("parameters.{}", v.field), v.message));
    }
    params
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_object_is_default() {
        assert_eq!(from_value(&json!({})).unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_carry_their_path() {
        let errs = from_value(&json!({
            "parameters": { "gamma3": 1.0 },
            "solver": { "restart": 3 },
            "extra": true
        }))
        .unwrap_err();
        let fields: Vec<&str> = errs.iter().map(|v| v.field.as_str()).collect();
        assert!(fields.contains(&"parameters.gamma3"));
        assert!(fields.contains(&"solver.restart"));
        assert!(fields.contains(&"extra"));
    }

    #[test]
    fn invariant_violations_are_prefixed() {
        let errs = from_value(&json!({ "parameters": { "epsilon": 1.5 } })).unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].to_string(), "parameters.epsilon: epsilon must lie in (0,1)");
    }

    #[test]
    fn b_ref_follows_capacity_unless_overridden() {
        let c = from_value(&json!({ "parameters": { "x_h_max": 1.0 } })).unwrap();
        assert_eq!(c.params.b_ref, 1.0 * c.params.k_h + c.params.k_w);
        let c = from_value(&json!({ "parameters": { "x_h_max": 1.0, "b_ref": 30000.0 } })).unwrap();
        assert_eq!(c.params.b_ref, 30000.0);
    }

    #[test]
    fn selections_parse() {
        let c = from_value(&json!({
            "scenarios": ["PT", "HS", "HS"],
            "regimes": ["no_communication"],
            "output": { "directory": "x", "formats": ["csv"] }
        }))
        .unwrap();
        assert_eq!(c.selection.policies, vec![PolicyKind::PesticideTax, PolicyKind::HiveSubsidy]);
        assert_eq!(c.selection.regimes, vec![Regime::NoCommunication]);
        assert_eq!(c.formats, vec![Format::Csv]);
        assert!(from_value(&json!({ "scenarios": ["XX"] })).is_err());
    }

    #[test]
    fn bad_solver_settings_are_reported() {
        let errs = from_value(&json!({ "solver": { "restarts": 0 } })).unwrap_err();
        assert_eq!(errs[0].field, "solver");
    }
}
