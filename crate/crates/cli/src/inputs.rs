use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use funcineq::weight_dsl::{parse_weight, WeightExpr};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Verb {
    #[default]
    CertifyHi,
    CertifyPair,
    Beta,
    Rayleigh,
    Verify,
    TransportCheck,
    Moser,
    Report,
}

impl Verb {
    pub const ALL: [Verb; 8] = [
        Verb::CertifyHi,
        Verb::CertifyPair,
        Verb::Beta,
        Verb::Rayleigh,
        Verb::Verify,
        Verb::TransportCheck,
        Verb::Moser,
        Verb::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::CertifyHi => "certify-hi",
            Verb::CertifyPair => "certify-pair",
            Verb::Beta => "beta",
            Verb::Rayleigh => "rayleigh",
            Verb::Verify => "verify",
            Verb::TransportCheck => "transport-check",
            Verb::Moser => "moser",
            Verb::Report => "report",
        }
    }

    pub fn parse(name: &str) -> Result<Verb> {
        Verb::ALL
            .into_iter()
            .find(|v| v.name() == name)
            .ok_or_else(|| CliError::input(format!("unknown verb `{name}`")))
    }

    /// `report` re-derives results and is never served from the cache.
    pub fn cacheable(self) -> bool {
        self != Verb::Report
    }
}

/// Every flag a verb can take. Which ones a verb accepts is decided during
/// normalization; anything else is rejected.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Args {
    /// Potential P(r) in the weight DSL.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[arg(long = "V", allow_hyphen_values = true)]
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    pub v: Option<String>,
    #[arg(long = "W", allow_hyphen_values = true)]
    #[serde(rename = "W", skip_serializing_if = "Option::is_none")]
    pub w: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[arg(long = "R")]
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Grid size (rayleigh, transport-check).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Check name (verify, transport-check).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    /// Quadratic form (rayleigh).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<String>,
    /// Task (moser).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    /// Radial test function u(r) in the weight DSL.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    /// Radial test function as `r,u` CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_file: Option<PathBuf>,
    /// Densities as `x,rho` CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho0: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho1: Option<PathBuf>,
    /// Gaussian parameters (mean, standard deviation) of the two densities.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m0: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m1: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1: Option<f64>,
    /// Iteration budget (moser).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
    /// Codimension (verify distance) or Moser profile depth (moser singular).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Grid doublings after the first Rayleigh solve.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doublings: Option<u32>,
    /// Report file to re-check (report).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

impl Args {
    /// Reads a `key = value` config file whose keys mirror the flags.
    pub fn from_config(path: &Path) -> Result<Args> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Ok(toml::from_str(&text)?)
    }

    /// Flags set here win over `base`.
    pub fn overriding(&self, base: &Args) -> Result<Args> {
        let mut merged = as_map(base)?;
        merged.extend(as_map(self)?);
        Ok(serde_json::from_value(Value::Object(merged.into_iter().collect()))?)
    }

    /// Sets one flag from its textual value (sweep grids).
    pub fn set(&mut self, key: &str, text: &str) -> Result<()> {
        let mut map = as_map(self)?;
        let spec = key_spec(key).ok_or_else(|| CliError::input(format!("unknown parameter `{key}`")))?;
        let value = match spec {
            Kind::Float => json!(text.parse::<f64>().map_err(|_| bad_number(key, text))?),
            Kind::Uint => json!(text.parse::<u64>().map_err(|_| bad_number(key, text))?),
            _ => json!(text),
        };
        map.insert(key.to_string(), value);
        *self = serde_json::from_value(Value::Object(map.into_iter().collect()))?;
        Ok(())
    }

    pub fn echo(&self, verb: Verb) -> Result<Value> {
        Ok(json!({ "verb": verb.name(), "flags": Value::Object(as_map(self)?.into_iter().collect()) }))
    }
}

fn bad_number(key: &str, text: &str) -> CliError {
    CliError::input(format!("`{text}` is not a valid value for {key}"))
}

fn as_map(args: &Args) -> Result<BTreeMap<String, Value>> {
    match serde_json::to_value(args)? {
        Value::Object(m) => Ok(m.into_iter().collect()),
        _ => unreachable!("Args serializes to an object"),
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Dsl,
    Float,
    Uint,
    Text,
    File,
}

fn key_spec(key: &str) -> Option<Kind> {
    Some(match key {
        "potential" | "V" | "W" | "profile" => Kind::Dsl,
        "R" | "lambda" | "alpha" | "beta" | "s" | "tol" | "m0" | "s0" | "m1" | "s1" | "k" => Kind::Float,
        "n" | "grid" | "seed" | "budget" | "doublings" => Kind::Uint,
        "check" | "form" | "task" => Kind::Text,
        "profile-file" | "rho0" | "rho1" | "input" => Kind::File,
        _ => return None,
    })
}

enum Need {
    Required,
    Optional,
    Default(Value),
}

pub const VERIFY_CHECKS: &[&str] = &[
    "family",
    "improved-hardy",
    "hardy-rellich",
    "boundary-first",
    "boundary-second",
    "e-weight-interior",
    "e-weight-boundary",
    "distance",
    "distance-interval",
];
pub const TRANSPORT_CHECKS: &[&str] =
    &["w2", "talagrand", "log-sobolev", "hwi", "hwbi", "master", "energy-entropy", "duality"];
pub const RAYLEIGH_FORMS: &[&str] = &["hardy", "hardy-rellich", "improved-hardy", "hardy-sobolev"];
pub const MOSER_TASKS: &[&str] = &["minimize", "aubin", "ghigi", "threshold", "singular", "identity"];

fn verb_keys(verb: Verb) -> Vec<(&'static str, Need, Option<&'static [&'static str]>)> {
    use Need::*;
    let tol = || Default(json!(funcineq::radial_ode::DEFAULT_TOL));
    match verb {
        Verb::CertifyHi => vec![("potential", Required, None), ("R", Required, None), ("tol", tol(), None)],
        Verb::CertifyPair => vec![
            ("V", Required, None),
            ("W", Required, None),
            ("n", Required, None),
            ("R", Required, None),
            ("lambda", Optional, None),
            ("tol", tol(), None),
        ],
        Verb::Beta => vec![("potential", Required, None), ("n", Required, None), ("R", Required, None)],
        Verb::Rayleigh => vec![
            ("form", Default(json!("hardy")), Some(RAYLEIGH_FORMS)),
            ("n", Required, None),
            ("R", Default(json!(1.0)), None),
            ("grid", Default(json!(256)), None),
            ("doublings", Default(json!(0)), None),
            ("potential", Optional, None),
            ("s", Optional, None),
        ],
        Verb::Verify => vec![
            ("check", Default(json!("family")), Some(VERIFY_CHECKS)),
            ("profile", Optional, None),
            ("profile-file", Optional, None),
            ("potential", Optional, None),
            ("V", Optional, None),
            ("W", Optional, None),
            ("n", Default(json!(3)), None),
            ("R", Default(json!(1.0)), None),
            ("k", Optional, None),
            ("seed", Default(json!(7)), None),
        ],
        Verb::TransportCheck => vec![
            ("check", Required, Some(TRANSPORT_CHECKS)),
            ("m0", Default(json!(0.0)), None),
            ("s0", Default(json!(1.0)), None),
            ("m1", Default(json!(0.0)), None),
            ("s1", Default(json!(1.0)), None),
            ("grid", Default(json!(2001)), None),
            ("rho0", Optional, None),
            ("rho1", Optional, None),
            ("lambda", Default(json!(0.0)), None),
            ("s", Default(json!(1.0)), None),
            ("n", Default(json!(3)), None),
        ],
        Verb::Moser => vec![
            ("task", Required, Some(MOSER_TASKS)),
            ("alpha", Optional, None),
            ("beta", Optional, None),
            ("n", Default(json!(2)), None),
            ("budget", Optional, None),
            ("seed", Default(json!(1)), None),
            ("k", Optional, None),
        ],
        Verb::Report => vec![("input", Required, None)],
    }
}

/// Inputs after validation: defaults filled in, DSL in canonical form and
/// files replaced by their content hash. This is what gets echoed in the
/// report and hashed for the cache.
#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub verb: Verb,
    pub values: BTreeMap<String, Value>,
    files: BTreeMap<String, String>,
}

impl Inputs {
    pub fn normalize(verb: Verb, args: &Args) -> Result<Inputs> {
        let raw = as_map(args)?;
        let keys = verb_keys(verb);
        for k in raw.keys() {
            if !keys.iter().any(|(name, _, _)| name == k) {
                return Err(CliError::input(format!("flag --{k} is not accepted by `{}`", verb.name())));
            }
        }
        let mut values = BTreeMap::new();
        let mut files = BTreeMap::new();
        for (key, need, choices) in keys {
            let v = match (raw.get(key), need) {
                (Some(v), _) => v.clone(),
                (None, Need::Default(d)) => d,
                (None, Need::Optional) => continue,
                (None, Need::Required) => {
                    return Err(CliError::input(format!("`{}` needs --{key}", verb.name())));
                }
            };
            let kind = key_spec(key).expect("every verb key has a kind");
            let normalized = match kind {
                Kind::Dsl => {
                    let text = v.as_str().unwrap_or_default();
                    json!(parse_weight(text)?.to_string())
                }
                Kind::Float => {
                    let x = v.as_f64().ok_or_else(|| CliError::input(format!("--{key} must be a number")))?;
                    if !x.is_finite() {
                        return Err(CliError::input(format!("--{key} must be finite")));
                    }
                    json!(x)
                }
                Kind::Uint => v,
                Kind::Text => {
                    let text = v.as_str().unwrap_or_default().to_string();
                    if let Some(allowed) = choices {
                        if !allowed.contains(&text.as_str()) {
                            return Err(CliError::input(format!(
                                "--{key} must be one of {}; got `{text}`",
                                allowed.join(", ")
                            )));
                        }
                    }
                    json!(text)
                }
                Kind::File => {
                    let path = v.as_str().unwrap_or_default().to_string();
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::input(format!("cannot read --{key} {path}: {e}")))?;
                    let digest = hex::encode(Sha256::digest(text.as_bytes()));
                    files.insert(key.to_string(), text);
                    json!({ "path": path, "sha256": digest })
                }
            };
            values.insert(key.to_string(), normalized);
        }
        Ok(Inputs { verb, values, files })
    }

    /// Canonical JSON (sorted keys) used for hashing.
    pub fn canonical(&self) -> String {
        serde_json::to_string(&json!({ "verb": self.verb.name(), "inputs": self.values })).expect("plain JSON")
    }

    pub fn fingerprint(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.values.get(key).and_then(Value::as_f64)
    }

    pub fn u64(&self, key: &str) -> Option<u64> {
        self.values.get(key).and_then(Value::as_u64)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.values.get(key).and_then(Value::as_str)
    }

    pub fn req_f64(&self, key: &str) -> Result<f64> {
        self.f64(key).ok_or_else(|| self.missing(key))
    }

    pub fn req_u32(&self, key: &str) -> Result<u32> {
        let v = self.u64(key).ok_or_else(|| self.missing(key))?;
        u32::try_from(v).map_err(|_| CliError::input(format!("--{key} is too large")))
    }

    pub fn req_text(&self, key: &str) -> Result<&str> {
        self.text(key).ok_or_else(|| self.missing(key))
    }

    pub fn weight(&self, key: &str) -> Result<Option<WeightExpr>> {
        self.text(key).map(parse_weight).transpose().map_err(Into::into)
    }

    pub fn req_weight(&self, key: &str) -> Result<WeightExpr> {
        self.weight(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn file(&self, key: &str) -> Option<&str> {
        self.files.get(key).map(String::as_str)
    }

    pub fn file_path(&self, key: &str) -> Option<&str> {
        self.values.get(key).and_then(|v| v.get("path")).and_then(Value::as_str)
    }

    pub fn missing(&self, key: &str) -> CliError {
        CliError::input(format!("`{}` needs --{key} here", self.verb.name()))
    }
}
