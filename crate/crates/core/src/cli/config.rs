//! `key = value` run configuration.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde_json::{Map, Value};
use thiserror::Error;

use crate::geometry::{CurvatureData, FramingConvention};
use crate::jet::MAX_BUDGET;
use crate::kernel::QuadratureConfig;
use crate::projection::MAX_DEPTH;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

fn invalid(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    VerifyTheorem,
    Sweep,
    ShowIntermediates,
    FtCheck,
    GaugeCheck,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::VerifyTheorem,
        Mode::Sweep,
        Mode::ShowIntermediates,
        Mode::FtCheck,
        Mode::GaugeCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::VerifyTheorem => "verify-theorem",
            Mode::Sweep => "sweep",
            Mode::ShowIntermediates => "show-intermediates",
            Mode::FtCheck => "ft-check",
            Mode::GaugeCheck => "gauge-check",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurvatureSpec {
    Data(CurvatureData),
    Basis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub curvature: CurvatureSpec,
    pub budget: u32,
    pub depth: u32,
    pub framing: FramingConvention,
    pub output: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
}

impl RunConfig {
    pub fn new(mode: Mode) -> RunConfig {
        RunConfig {
            mode,
            curvature: if mode == Mode::Sweep {
                CurvatureSpec::Basis
            } else {
                CurvatureSpec::Data(CurvatureData::flat())
            },
            budget: 3,
            depth: 3,
            framing: FramingConvention::default(),
            output: None,
            quadrature: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.depth > MAX_DEPTH {
            return Err(invalid("depth", format!("at most {MAX_DEPTH}")));
        }
        if self.budget < self.depth {
            return Err(invalid("budget", "must be at least the depth"));
        }
        if self.budget < 3 {
            return Err(invalid("budget", "the curvature self-check needs at least 3"));
        }
        if self.budget > MAX_BUDGET {
            return Err(invalid("budget", format!("at most {MAX_BUDGET}")));
        }
        match (&self.curvature, self.mode == Mode::Sweep) {
            (CurvatureSpec::Basis, true) | (CurvatureSpec::Data(_), false) => {}
            (CurvatureSpec::Basis, false) => return Err(invalid("curvature", "`basis` is only valid for sweep")),
            (CurvatureSpec::Data(_), true) => return Err(invalid("curvature", "sweep needs `curvature = basis`")),
        }
        if self.mode == Mode::FtCheck {
            self.quadrature.validate().map_err(|e| invalid("quadrature", e.to_string()))?;
        }
        Ok(())
    }

    /// The normalized configuration, in a fixed key order.
    pub fn echo(&self) -> Value {
        let mut m = Map::new();
        m.insert("mode".into(), self.mode.name().into());
        match &self.curvature {
            CurvatureSpec::Basis => {
                m.insert("curvature".into(), "basis".into());
            }
            CurvatureSpec::Data(d) => {
                for (k, v) in d.to_key_values() {
                    if v != "0" {
                        m.insert(k, v.into());
                    }
                }
            }
        }
        m.insert("budget".into(), self.budget.into());
        m.insert("depth".into(), self.depth.into());
        m.insert("framing".into(), self.framing.name().into());
        if self.mode == Mode::FtCheck {
            m.insert("quadrature".into(), self.quadrature.to_json());
        }
        Value::Object(m)
    }
}

fn parse_number<T: FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| invalid(key, format!("cannot parse `{v}`")))
}

fn parse_float(key: &str, v: &str) -> Result<f64, ConfigError> {
    let x: f64 = parse_number(key, v)?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

/// Parses and validates a configuration. `default_mode` is used when the
/// text has no `mode` line; a `mode` line that disagrees with it is rejected.
pub fn parse_config_with_mode(text: &str, default_mode: Option<Mode>) -> Result<RunConfig, ConfigError> {
    let mut pairs: Vec<(usize, String, String)> = Vec::new();
    let mut seen = BTreeSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (k, v) = body.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected `key = value`, found `{body}`"),
        })?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: "empty key or value".into(),
            });
        }
        if !seen.insert(k.clone()) {
            return Err(ConfigError::Parse {
                line,
                message: format!("duplicate key `{k}`"),
            });
        }
        pairs.push((line, k, v));
    }

    let mode = match pairs.iter().find(|(_, k, _)| k == "mode") {
        Some((line, _, v)) => {
            let m: Mode = v.parse().map_err(|message| ConfigError::Parse { line: *line, message })?;
            if default_mode.is_some_and(|d| d != m) {
                return Err(invalid("mode", format!("config says `{m}` but `{}` was requested", default_mode.unwrap())));
            }
            m
        }
        None => default_mode.ok_or_else(|| invalid("mode", "missing"))?,
    };

    let mut cfg = RunConfig::new(mode);
    let mut data = CurvatureData::flat();
    let mut has_coefficients = false;
    let mut basis = false;
    for (line, k, v) in &pairs {
        match k.as_str() {
            "mode" => {}
            "curvature" => {
                if v != "basis" {
                    return Err(invalid(k, "only `basis` is accepted; give coefficients as c1..c24"));
                }
                basis = true;
            }
            "budget" => cfg.budget = parse_number(k, v)?,
            "depth" => cfg.depth = parse_number(k, v)?,
            "framing" => {
                cfg.framing = FramingConvention::parse(v).ok_or_else(|| invalid(k, format!("unknown framing `{v}`")))?
            }
            "output" => cfg.output = Some(PathBuf::from(v)),
            "cutoff" => cfg.quadrature.cutoff = parse_float(k, v)?,
            "tolerance" => cfg.quadrature.tolerance = parse_float(k, v)?,
            "limit_tolerance" => cfg.quadrature.limit_tolerance = parse_float(k, v)?,
            "angular_order" => cfg.quadrature.angular_order = parse_number(k, v)?,
            "radii" => {
                cfg.quadrature.radii = v
                    .split(',')
                    .map(|r| parse_float(k, r.trim()))
                    .collect::<Result<_, _>>()?
            }
            _ if k.starts_with('c') && k[1..].parse::<usize>().is_ok() => {
                data.set_from_key_value(k, v).map_err(|e| invalid(k, e.to_string()))?;
                has_coefficients = true;
            }
            _ => {
                return Err(ConfigError::Parse {
                    line: *line,
                    message: format!("unknown key `{k}`"),
                })
            }
        }
    }
    if basis && has_coefficients {
        return Err(invalid("curvature", "`basis` cannot be combined with coefficients"));
    }
    if basis || (mode == Mode::Sweep && !has_coefficients) {
        cfg.curvature = CurvatureSpec::Basis;
    } else {
        cfg.curvature = CurvatureSpec::Data(data);
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_mode(text, None)
}
