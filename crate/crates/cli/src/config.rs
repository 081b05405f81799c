//! Flag and config-file parsing.
//!
//! Every run is `bulksurf <command> [--config file] [--key value]...`.
//! Config files hold one `key = value` per line; flags override file
//! entries. Unknown keys are errors, never warnings.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("missing command")]
    MissingCommand,
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("type error for key `{key}`: {detail}")]
    TypeError { key: String, detail: String },
    #[error("malformed flag `{0}` (expected --key value)")]
    MalformedFlag(String),
    #[error("config file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    EigenBall,
    EigenFem,
    Hessian,
    HessianFd,
    RegimeScan,
    Talenti,
    Nonexistence,
    FkCheck,
    LimitGap,
}

impl Command {
    pub fn parse(name: &str) -> Option<Command> {
        Some(match name {
            "eigen-ball" => Command::EigenBall,
            "eigen-fem" => Command::EigenFem,
            "hessian" => Command::Hessian,
            "hessian-fd" => Command::HessianFd,
            "regime-scan" => Command::RegimeScan,
            "talenti" => Command::Talenti,
            "nonexistence" => Command::Nonexistence,
            "fk-check" => Command::FkCheck,
            "limit-gap" => Command::LimitGap,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::EigenBall => "eigen-ball",
            Command::EigenFem => "eigen-fem",
            Command::Hessian => "hessian",
            Command::HessianFd => "hessian-fd",
            Command::RegimeScan => "regime-scan",
            Command::Talenti => "talenti",
            Command::Nonexistence => "nonexistence",
            Command::FkCheck => "fk-check",
            Command::LimitGap => "limit-gap",
        }
    }

    pub const ALL: [Command; 9] = [
        Command::EigenBall,
        Command::EigenFem,
        Command::Hessian,
        Command::HessianFd,
        Command::RegimeScan,
        Command::Talenti,
        Command::Nonexistence,
        Command::FkCheck,
        Command::LimitGap,
    ];

    /// Key schema: (key, kind, default); `None` default means required.
    fn schema(&self) -> Vec<(&'static str, Kind, Option<&'static str>)> {
        use Kind::*;
        let mut keys = vec![("out", Text, Some(self.name())), ("seed", Int, Some("7"))];
        match self {
            Command::EigenBall => keys.extend([
                ("d", Int, Some("2")),
                ("r", Float, Some("1.0")),
                ("c_i", Float, None),
                ("c_b", Float, None),
                ("grid_n", Int, Some("4096")),
            ]),
            Command::EigenFem => keys.extend([
                ("c_i", Float, None),
                ("c_b", Float, None),
                ("h", Float, Some("0.02")),
                ("domain", Text, Some("disk")),
                ("a", Float, Some("1.0")),
                ("b", Float, Some("1.0")),
                ("grid_n", Int, Some("4096")),
            ]),
            Command::Hessian => keys.extend([
                ("d", Int, Some("2")),
                ("c_i", Float, None),
                ("c_b", Float, None),
                ("k_max", Int, Some("60")),
                ("grid_n", Int, Some("4096")),
            ]),
            Command::HessianFd => keys.extend([
                ("k", Int, None),
                ("c_i", Float, None),
                ("c_b", Float, None),
                ("t", Float, Some("0.01")),
                ("h", Float, Some("0.02")),
                ("grid_n", Int, Some("4096")),
            ]),
            Command::RegimeScan => keys.extend([
                ("d", Int, Some("2")),
                ("c_i", Float, None),
                ("c_b", Float, None),
                ("k_max", Int, Some("60")),
                ("grid_n", Int, Some("4096")),
            ]),
            Command::Talenti => keys.extend([
                ("kind", Text, Some("robin")),
                ("trials", Int, Some("50")),
                ("n_r", Int, Some("96")),
                ("m", Int, Some("128")),
                ("robin_beta", Float, Some("1.0")),
                ("tol", Float, Some("1e-8")),
            ]),
            Command::Nonexistence => keys.extend([
                ("c_i", Float, None),
                ("c_b", Float, None),
                ("aspects", FloatList, Some("1,4,16,64")),
            ]),
            Command::FkCheck => keys.extend([
                ("trials", Int, Some("20")),
                ("n_r", Int, Some("128")),
                ("m", Int, Some("128")),
                ("tol", Float, Some("1e-6")),
            ]),
            Command::LimitGap => keys.extend([
                ("d", Int, Some("2")),
                ("c_i_list", FloatList, Some("-1,-5,-20,-80,-200")),
                ("grid_n", Int, Some("4096")),
            ]),
        }
        keys
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Int,
    Float,
    Text,
    FloatList,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    FloatList(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Float(v) => write!(f, "{v}"),
            Value::Text(v) => write!(f, "{v}"),
            Value::FloatList(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", parts.join(","))
            }
        }
    }
}

fn parse_value(key: &str, kind: Kind, raw: &str) -> Result<Value, ConfigError> {
    let type_err = |detail: String| ConfigError::TypeError {
        key: key.to_string(),
        detail,
    };
    Ok(match kind {
        Kind::Int => Value::Int(raw.trim().parse().map_err(|e| type_err(format!("{e}")))?),
        Kind::Float => Value::Float(raw.trim().parse().map_err(|e| type_err(format!("{e}")))?),
        Kind::Text => Value::Text(raw.trim().to_string()),
        Kind::FloatList => Value::FloatList(
            raw.split(',')
                .map(|p| {
                    p.trim()
                        .parse::<f64>()
                        .map_err(|e| type_err(format!("{e}")))
                })
                .collect::<Result<_, _>>()?,
        ),
    })
}

/// Validated run configuration: a command plus a typed key-value map.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub values: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn int(&self, key: &str) -> i64 {
        match &self.values[key] {
            Value::Int(v) => *v,
            _ => unreachable!("schema guarantees {key} is an int"),
        }
    }

    pub fn float(&self, key: &str) -> f64 {
        match &self.values[key] {
            Value::Float(v) => *v,
            _ => unreachable!("schema guarantees {key} is a float"),
        }
    }

    pub fn text(&self, key: &str) -> &str {
        match &self.values[key] {
            Value::Text(v) => v,
            _ => unreachable!("schema guarantees {key} is text"),
        }
    }

    pub fn float_list(&self, key: &str) -> &[f64] {
        match &self.values[key] {
            Value::FloatList(v) => v,
            _ => unreachable!("schema guarantees {key} is a float list"),
        }
    }

    pub fn seed(&self) -> u64 {
        self.int("seed") as u64
    }
}

/// Parses argv (without the program name). `--config <file>` pulls defaults
/// from a file of `key = value` lines; explicit flags win.
pub fn parse_config(args: &[String]) -> Result<RunConfig, ConfigError> {
    let command_name = args.first().ok_or(ConfigError::MissingCommand)?;
    let command = Command::parse(command_name)
        .ok_or_else(|| ConfigError::UnknownCommand(command_name.clone()))?;
    let schema = command.schema();
    let lookup = |key: &str| {
        schema
            .iter()
            .find(|(k, _, _)| *k == key)
            .map(|&(_, kind, _)| kind)
    };

    let mut raw_file: Vec<(String, String)> = Vec::new();
    let mut raw_flags: Vec<(String, String)> = Vec::new();
    let mut it = args[1..].iter();
    while let Some(flag) = it.next() {
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| ConfigError::MalformedFlag(flag.clone()))?;
        let value = it
            .next()
            .ok_or_else(|| ConfigError::MalformedFlag(flag.clone()))?;
        if key == "config" {
            let text = std::fs::read_to_string(value)?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| ConfigError::MalformedFlag(line.to_string()))?;
                raw_file.push((k.trim().to_string(), v.trim().to_string()));
            }
        } else {
            raw_flags.push((key.to_string(), value.clone()));
        }
    }

    let mut values: BTreeMap<String, Value> = BTreeMap::new();
    for (key, kind, default) in &schema {
        if let Some(d) = default {
            values.insert(key.to_string(), parse_value(key, *kind, d)?);
        }
    }
    // file first, then flags override
    for (key, raw) in raw_file.into_iter().chain(raw_flags) {
        let kind = lookup(&key).ok_or_else(|| ConfigError::UnknownKey(key.clone()))?;
        values.insert(key.clone(), parse_value(&key, kind, &raw)?);
    }
    for (key, _, default) in &schema {
        if default.is_none() && !values.contains_key(*key) {
            return Err(ConfigError::MissingKey(key.to_string()));
        }
    }

    // numeric range validation before dispatch
    let positive_int = |key: &str| -> Result<(), ConfigError> {
        if let Some(Value::Int(v)) = values.get(key) {
            if *v <= 0 {
                return Err(ConfigError::TypeError {
                    key: key.to_string(),
                    detail: format!("must be positive, got {v}"),
                });
            }
        }
        Ok(())
    };
    for key in ["grid_n", "k_max", "trials", "n_r", "m", "k", "d"] {
        positive_int(key)?;
    }
    let positive_float = |key: &str| -> Result<(), ConfigError> {
        if let Some(Value::Float(v)) = values.get(key) {
            if !(*v > 0.0) {
                return Err(ConfigError::TypeError {
                    key: key.to_string(),
                    detail: format!("must be positive, got {v}"),
                });
            }
        }
        Ok(())
    };
    for key in ["h", "t", "r", "tol"] {
        positive_float(key)?;
    }

    Ok(RunConfig { command, values })
}
