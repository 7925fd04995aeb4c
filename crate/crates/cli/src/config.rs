//! Experiment configuration files (TOML).
//!
//! ```toml
//! scheme = "network-displacement"
//! M = 4
//! r = { start = 0.0, stop = 1.0, steps = 3 }   # or r = 1.0
//! distributor = "dft"                          # or "hadamard"
//!
//! [encoding]
//! uniform = 0.1        # or values = [...], or pattern = "alternating" with amplitude = ...
//!
//! [backend]
//! kind = "gaussian"    # or "fock" with cutoff = 40
//!
//! [output]
//! path = "sweep.csv"
//! format = "csv"
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use su11net_core::fock::{DEFAULT_GUARD, MAX_MODES};
use su11net_core::{DistributorKind, Pipeline, Scheme};
use toml::{Table, Value};

/// Every problem found in a config, in file order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "config error: {e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RSpec {
    Fixed(f64),
    Sweep { start: f64, stop: f64, steps: usize },
}

impl RSpec {
    /// Evenly spaced values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        match *self {
            RSpec::Fixed(r) => vec![r],
            RSpec::Sweep { start, steps: 1, .. } => vec![start],
            RSpec::Sweep { start, stop, steps } => {
                let dr = (stop - start) / (steps - 1) as f64;
                (0..steps).map(|i| if i + 1 == steps { stop } else { start + dr * i as f64 }).collect()
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    Uniform,
    /// `+a, −a, +a, …`
    Alternating,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EncodingSpec {
    Values(Vec<f64>),
    Uniform(f64),
    Pattern { pattern: Pattern, amplitude: f64 },
}

impl EncodingSpec {
    pub fn resolve(&self, modes: usize) -> Vec<f64> {
        match self {
            EncodingSpec::Values(v) => v.clone(),
            EncodingSpec::Uniform(x) => vec![*x; modes],
            EncodingSpec::Pattern { pattern: Pattern::Uniform, amplitude } => vec![*amplitude; modes],
            EncodingSpec::Pattern { pattern: Pattern::Alternating, amplitude } => {
                (0..modes).map(|j| if j % 2 == 0 { *amplitude } else { -amplitude }).collect()
            }
        }
    }
}

impl Serialize for EncodingSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(None)?;
        match self {
            EncodingSpec::Values(v) => map.serialize_entry("values", v)?,
            EncodingSpec::Uniform(x) => map.serialize_entry("uniform", x)?,
            EncodingSpec::Pattern { pattern, amplitude } => {
                map.serialize_entry("pattern", pattern)?;
                map.serialize_entry("amplitude", amplitude)?;
            }
        }
        map.end()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Gaussian,
    Fock,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gaussian" => Ok(BackendKind::Gaussian),
            "fock" => Ok(BackendKind::Fock),
            other => Err(format!("unknown backend '{other}' (expected gaussian or fock)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct BackendSpec {
    pub kind: BackendKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guard: Option<f64>,
    /// Also compute the QFI with the Fock oracle at `cutoff`.
    pub qfi_numeric: bool,
}

impl BackendSpec {
    pub fn guard(&self) -> f64 {
        self.guard.unwrap_or(DEFAULT_GUARD)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown output format '{other}' (expected csv or json)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OutputSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    #[serde(rename = "M")]
    pub modes: usize,
    pub r: RSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub distributor: DistributorKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_seed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eval_point: Option<f64>,
    pub encoding: EncodingSpec,
    pub backend: BackendSpec,
    pub output: OutputSpec,
}

impl ExperimentConfig {
    /// Config with `r = 1`, zero node deviations and the Gaussian backend.
    pub fn new(scheme: Scheme, modes: usize) -> Self {
        Self {
            scheme,
            modes,
            r: RSpec::Fixed(1.0),
            beta: None,
            distributor: DistributorKind::Dft,
            alpha_seed: None,
            eval_point: None,
            encoding: EncodingSpec::Uniform(0.0),
            backend: BackendSpec::default(),
            output: OutputSpec::default(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    /// Pipeline at one squeezing value of the sweep.
    pub fn pipeline(&self, r: f64) -> su11net_core::Result<Pipeline> {
        let mut b = Pipeline::builder(self.scheme)
            .modes(self.modes)
            .squeezing(r)
            .distributor(self.distributor)
            .encoding(self.encoding.resolve(self.modes));
        if let Some(beta) = self.beta {
            b = b.beta(beta);
        }
        if let Some(a) = self.alpha_seed {
            b = b.seed(a);
        }
        b.build()
    }

    /// Re-checks the invariants after programmatic edits (e.g. CLI overrides).
    pub fn validate(&self) -> Result<(), ConfigErrors> {
        let errors = semantic_errors(self);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(ConfigErrors(errors))
        }
    }
}

struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn unknown_keys(&mut self, table: &Table, section: &str, allowed: &[&str]) {
        for key in table.keys() {
            if !allowed.contains(&key.as_str()) {
                let at = if section.is_empty() { String::new() } else { format!(" in [{section}]") };
                self.errors.push(format!("unknown key '{key}'{at}"));
            }
        }
    }

    fn number(&mut self, v: &Value, key: &str) -> Option<f64> {
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            other => {
                self.errors.push(format!("'{key}' must be a number, got {}", other.type_str()));
                return None;
            }
        };
        if !x.is_finite() {
            self.errors.push(format!("'{key}' must be finite, got {x}"));
            return None;
        }
        Some(x)
    }

    fn opt_number(&mut self, t: &Table, key: &str) -> Option<f64> {
        t.get(key).and_then(|v| self.number(v, key))
    }

    fn integer(&mut self, v: &Value, key: &str) -> Option<usize> {
        match v {
            Value::Integer(i) if *i >= 0 => Some(*i as usize),
            Value::Integer(i) => {
                self.errors.push(format!("'{key}' must be >= 0, got {i}"));
                None
            }
            other => {
                self.errors.push(format!("'{key}' must be an integer, got {}", other.type_str()));
                None
            }
        }
    }

    fn string<'a>(&mut self, v: &'a Value, key: &str) -> Option<&'a str> {
        match v {
            Value::String(s) => Some(s),
            other => {
                self.errors.push(format!("'{key}' must be a string, got {}", other.type_str()));
                None
            }
        }
    }

    fn table<'a>(&mut self, v: &'a Value, key: &str) -> Option<&'a Table> {
        match v {
            Value::Table(t) => Some(t),
            other => {
                self.errors.push(format!("'{key}' must be a table, got {}", other.type_str()));
                None
            }
        }
    }

    fn parsed<T: FromStr>(&mut self, v: &Value, key: &str) -> Option<T>
    where
        T::Err: fmt::Display,
    {
        let s = self.string(v, key)?;
        match s.parse() {
            Ok(x) => Some(x),
            Err(e) => {
                self.errors.push(e.to_string());
                None
            }
        }
    }
}

const TOP_KEYS: &[&str] =
    &["scheme", "M", "modes", "r", "beta", "distributor", "encoding", "alpha_seed", "backend", "eval_point", "output"];

/// Parses and validates a config, reporting every problem found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigErrors(vec![e.message().to_string()]))?;
    let mut rd = Reader { errors: Vec::new() };
    rd.unknown_keys(&table, "", TOP_KEYS);

    let scheme = match table.get("scheme") {
        Some(v) => rd.parsed::<Scheme>(v, "scheme"),
        None => {
            rd.errors.push("missing 'scheme'".into());
            None
        }
    };

    if table.contains_key("M") && table.contains_key("modes") {
        rd.errors.push("give either 'M' or 'modes', not both".into());
    }
    let modes = match table.get("M").or_else(|| table.get("modes")) {
        Some(v) => rd.integer(v, "M"),
        None if scheme.is_some_and(|s| s.is_single_mode()) => Some(1),
        None => {
            rd.errors.push("missing 'M'".into());
            None
        }
    };

    let r = match table.get("r") {
        None => Some(RSpec::Fixed(1.0)),
        Some(Value::Table(t)) => {
            rd.unknown_keys(t, "r", &["start", "stop", "steps"]);
            let start = t.get("start").and_then(|v| rd.number(v, "r.start"));
            let stop = t.get("stop").and_then(|v| rd.number(v, "r.stop"));
            let steps = t.get("steps").and_then(|v| rd.integer(v, "r.steps"));
            for key in ["start", "stop", "steps"] {
                if !t.contains_key(key) {
                    rd.errors.push(format!("sweep 'r' is missing '{key}'"));
                }
            }
            match (start, stop, steps) {
                (Some(start), Some(stop), Some(steps)) => Some(RSpec::Sweep { start, stop, steps }),
                _ => None,
            }
        }
        Some(v) => rd.number(v, "r").map(RSpec::Fixed),
    };

    let beta = rd.opt_number(&table, "beta");
    let distributor = match table.get("distributor") {
        Some(v) => rd.parsed::<DistributorKind>(v, "distributor"),
        None => Some(DistributorKind::Dft),
    };
    let alpha_seed = rd.opt_number(&table, "alpha_seed");
    let eval_point = rd.opt_number(&table, "eval_point");

    let encoding = match table.get("encoding") {
        None => Some(EncodingSpec::Uniform(0.0)),
        Some(v) => rd.table(v, "encoding").and_then(|t| parse_encoding(&mut rd, t)),
    };

    let backend = match table.get("backend") {
        None => Some(BackendSpec::default()),
        Some(v) => rd.table(v, "backend").and_then(|t| parse_backend(&mut rd, t)),
    };

    let output = match table.get("output") {
        None => Some(OutputSpec::default()),
        Some(v) => rd.table(v, "output").and_then(|t| {
            rd.unknown_keys(t, "output", &["path", "format"]);
            let path = t.get("path").and_then(|v| rd.string(v, "output.path")).map(PathBuf::from);
            let format = match t.get("format") {
                Some(v) => rd.parsed::<Format>(v, "output.format")?,
                None => Format::Csv,
            };
            Some(OutputSpec { path, format })
        }),
    };

    let mut errors = rd.errors;
    let complete = r.is_some() && distributor.is_some() && encoding.is_some() && backend.is_some() && output.is_some();
    if let (Some(scheme), Some(modes)) = (scheme, modes) {
        // Sections that failed to parse get neutral stand-ins so the cross-field checks still run.
        let cfg = ExperimentConfig {
            scheme,
            modes,
            r: r.unwrap_or(RSpec::Fixed(1.0)),
            beta,
            distributor: distributor.unwrap_or_default(),
            alpha_seed,
            eval_point,
            encoding: encoding.unwrap_or(EncodingSpec::Uniform(0.0)),
            backend: backend.unwrap_or_default(),
            output: output.unwrap_or_default(),
        };
        errors.extend(semantic_errors(&cfg));
        if errors.is_empty() && complete {
            return Ok(cfg);
        }
    }
    Err(ConfigErrors(errors))
}

fn parse_encoding(rd: &mut Reader, t: &Table) -> Option<EncodingSpec> {
    rd.unknown_keys(t, "encoding", &["values", "uniform", "pattern", "amplitude"]);
    let forms = ["values", "uniform", "pattern"].iter().filter(|k| t.contains_key(**k)).count();
    if forms != 1 {
        rd.errors.push(format!("[encoding] needs exactly one of values, uniform or pattern, found {forms}"));
        return None;
    }
    if let Some(v) = t.get("values") {
        let Value::Array(items) = v else {
            rd.errors.push(format!("'encoding.values' must be an array, got {}", v.type_str()));
            return None;
        };
        let vals: Vec<Option<f64>> = items.iter().map(|x| rd.number(x, "encoding.values")).collect();
        return vals.into_iter().collect::<Option<Vec<_>>>().map(EncodingSpec::Values);
    }
    if let Some(v) = t.get("uniform") {
        if t.contains_key("amplitude") {
            rd.errors.push("'encoding.amplitude' only applies to a pattern".into());
        }
        return rd.number(v, "encoding.uniform").map(EncodingSpec::Uniform);
    }
    let pattern = match rd.string(&t["pattern"], "encoding.pattern")? {
        "uniform" => Some(Pattern::Uniform),
        "alternating" => Some(Pattern::Alternating),
        other => {
            rd.errors.push(format!("unknown encoding pattern '{other}' (expected uniform or alternating)"));
            None
        }
    };
    let amplitude = match t.get("amplitude") {
        Some(v) => rd.number(v, "encoding.amplitude"),
        None => {
            rd.errors.push("pattern encoding needs 'amplitude'".into());
            None
        }
    };
    Some(EncodingSpec::Pattern { pattern: pattern?, amplitude: amplitude? })
}

fn parse_backend(rd: &mut Reader, t: &Table) -> Option<BackendSpec> {
    rd.unknown_keys(t, "backend", &["kind", "cutoff", "guard", "qfi_numeric"]);
    let kind = match t.get("kind") {
        Some(v) => rd.parsed::<BackendKind>(v, "backend.kind"),
        None => Some(BackendKind::Gaussian),
    };
    let cutoff = t.get("cutoff").and_then(|v| rd.integer(v, "backend.cutoff"));
    let guard = rd.opt_number(t, "guard");
    let qfi_numeric = match t.get("qfi_numeric") {
        Some(Value::Boolean(b)) => *b,
        Some(other) => {
            rd.errors.push(format!("'backend.qfi_numeric' must be a boolean, got {}", other.type_str()));
            false
        }
        None => false,
    };
    Some(BackendSpec { kind: kind?, cutoff, guard, qfi_numeric })
}

fn semantic_errors(cfg: &ExperimentConfig) -> Vec<String> {
    let mut errors = Vec::new();
    let scheme = cfg.scheme;
    if cfg.modes == 0 {
        errors.push("'M' must be at least 1".into());
    }
    if scheme.is_single_mode() && cfg.modes != 1 {
        errors.push(format!("scheme {scheme} is single-mode but M = {}", cfg.modes));
    }
    match cfg.r {
        RSpec::Fixed(r) if r < 0.0 => errors.push(format!("'r' must be >= 0, got {r}")),
        RSpec::Sweep { start, stop, steps } => {
            if steps < 1 {
                errors.push(format!("sweep 'r' needs steps >= 1, got {steps}"));
            }
            if stop < start {
                errors.push(format!("sweep 'r' needs stop >= start, got start {start}, stop {stop}"));
            }
            if start < 0.0 {
                errors.push(format!("sweep 'r' must start at >= 0, got {start}"));
            }
        }
        RSpec::Fixed(_) => {}
    }
    if cfg.distributor == DistributorKind::Hadamard && !cfg.modes.is_power_of_two() {
        errors.push(format!("hadamard distributor needs M to be a power of two, got {}", cfg.modes));
    }
    if let EncodingSpec::Values(v) = &cfg.encoding {
        if v.len() != cfg.modes {
            errors.push(format!("encoding has {} values but M = {}", v.len(), cfg.modes));
        }
    }
    match (scheme.is_homodyne(), cfg.alpha_seed) {
        (true, None) => errors.push(format!("scheme {scheme} needs 'alpha_seed'")),
        (true, Some(a)) if a < 0.0 => errors.push(format!("'alpha_seed' must be >= 0, got {a}")),
        (false, Some(_)) => errors.push(format!("'alpha_seed' only applies to network-phase-homodyne, not {scheme}")),
        _ => {}
    }
    if let Some(eta) = cfg.eval_point {
        if scheme.encodes_phase() && !scheme.is_homodyne() && eta <= 0.0 {
            errors.push(format!("phase schemes need eval_point > 0, got {eta}"));
        }
    }
    let b = &cfg.backend;
    let needs_fock = b.kind == BackendKind::Fock || b.qfi_numeric;
    if needs_fock {
        match b.cutoff {
            None => errors.push("fock backend and qfi_numeric need 'backend.cutoff'".into()),
            Some(c) if c < 3 => errors.push(format!("'backend.cutoff' must be >= 3, got {c}")),
            _ => {}
        }
        if cfg.modes > MAX_MODES {
            errors.push(format!("fock backend supports at most {MAX_MODES} modes, got M = {}", cfg.modes));
        }
    }
    if let Some(g) = b.guard {
        if g <= 0.0 {
            errors.push(format!("'backend.guard' must be > 0, got {g}"));
        }
    }
    errors
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_round_trips() {
        let cfg = parse_config("scheme = \"single-displacement\"\nr = 1.0\n").unwrap();
        assert_eq!(cfg.modes, 1);
        assert_eq!(cfg.r, RSpec::Fixed(1.0));
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn full_config_round_trips() {
        let text = r#"
scheme = "network-phase-homodyne"
M = 4
r = { start = 0.0, stop = 2.0, steps = 9 }
beta = 0.5
distributor = "hadamard"
alpha_seed = 10
eval_point = 1e-4
[encoding]
pattern = "alternating"
amplitude = 0.01
[backend]
kind = "fock"
cutoff = 12
guard = 1e-6
qfi_numeric = true
[output]
path = "out.json"
format = "json"
"#;
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.r.values().len(), 9);
        assert_eq!(cfg.encoding.resolve(4), vec![0.01, -0.01, 0.01, -0.01]);
        assert_eq!(parse_config(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn sweep_values_hit_endpoints() {
        let v = RSpec::Sweep { start: 0.0, stop: 2.0, steps: 9 }.values();
        assert_eq!(v.len(), 9);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], 1.0);
        assert_eq!(v[8], 2.0);
        assert_eq!(RSpec::Sweep { start: 0.5, stop: 0.5, steps: 1 }.values(), vec![0.5]);
    }

    #[test]
    fn encoding_length_error_names_both_lengths() {
        let err = parse_config("scheme = \"network-phase\"\nM = 3\n[encoding]\nvalues = [0.1, 0.2]\n").unwrap_err();
        assert_eq!(err.0, vec!["encoding has 2 values but M = 3".to_string()]);
    }

    #[test]
    fn collects_all_errors() {
        let text = r#"
scheme = "network-phase"
M = 3
r = { start = 2.0, stop = 1.0, steps = 0 }
distributor = "hadamard"
colour = "blue"
[encoding]
uniform = 0.1
values = [1, 2, 3]
"#;
        let err = parse_config(text).unwrap_err();
        let all = err.to_string();
        for needle in ["unknown key 'colour'", "exactly one of", "steps >= 1", "stop >= start", "power of two"] {
            assert!(all.contains(needle), "missing '{needle}' in:\n{all}");
        }
        assert!(parse_config("scheme = \"nope\"\nM = 2\n").unwrap_err().0[0].contains("unknown scheme id"));
    }

    #[test]
    fn scheme_specific_rules() {
        assert!(parse_config("scheme = \"network-phase-homodyne\"\nM = 2\n").is_err());
        assert!(parse_config("scheme = \"network-phase\"\nM = 2\nalpha_seed = 1.0\n").is_err());
        assert!(parse_config("scheme = \"single-phase\"\nM = 2\n").is_err());
        assert!(parse_config("scheme = \"network-phase\"\nM = 2\neval_point = 0.0\n").is_err());
        assert!(parse_config("scheme = \"network-phase\"\nM = 2\n[backend]\nkind = \"fock\"\n").is_err());
        assert!(parse_config("scheme = \"network-phase\"\nM = 5\n[backend]\nkind = \"fock\"\ncutoff = 8\n").is_err());
        assert!(parse_config("scheme = \"network-phase\"\nM = 2\n[backend]\nkind = \"fock\"\ncutoff = 8\n").is_ok());
    }
}
