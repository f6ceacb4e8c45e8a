//! Simulation configuration: `key=value` files, `--key value` flags, and
//! validation into a [`SimConfig`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use heisenberg_dual::dynamics::{CoeffState, Mode, QuadHamiltonian, QuantumConvention};
use heisenberg_dual::{parse_expr, RepParams};
use thiserror::Error;

/// Keys accepted in config files and as `simulate` flags.
pub const KEYS: [&str; 7] = [
    "mode",
    "hamiltonian",
    "observable",
    "hbar",
    "t_end",
    "dt",
    "convention",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid value for `{key}`: {reason}")]
    InvalidValue { key: String, reason: String },
    #[error("{path}:{line}: expected `key=value`, got `{text}`")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        text: String,
    },
    #[error("key `{key}` given twice in {path}")]
    DuplicateKey { key: String, path: PathBuf },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl ConfigError {
    /// The offending key, if the error is about one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key }
            | ConfigError::InvalidValue { key, .. }
            | ConfigError::DuplicateKey { key, .. } => Some(key),
            _ => None,
        }
    }
}

fn invalid(key: &str, reason: impl fmt::Display) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        reason: reason.to_string(),
    }
}

/// `t-end` and `t_end` name the same key.
fn canonical_key(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Raw key/value pairs, before validation. Later layers override earlier
/// ones key by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sets `key` to `value`, rejecting keys outside [`KEYS`].
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = canonical_key(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey { key });
        }
        self.values.insert(key, value.trim().to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parses `key=value` lines. Blank lines and lines starting with `#`
    /// are skipped.
    pub fn parse(text: &str, path: &Path) -> Result<Self, ConfigError> {
        let mut out = Self::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::MalformedLine {
                    path: path.to_path_buf(),
                    line: n + 1,
                    text: line.to_string(),
                });
            };
            if out.get(&canonical_key(key)).is_some() {
                return Err(ConfigError::DuplicateKey {
                    key: canonical_key(key),
                    path: path.to_path_buf(),
                });
            }
            out.set(key, value)?;
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// `self` with every key of `overrides` replaced.
    pub fn merged(mut self, overrides: &RawConfig) -> Self {
        for (k, v) in &overrides.values {
            self.values.insert(k.clone(), v.clone());
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SimMode {
    #[default]
    Classical,
    Quantum,
}

/// A validated simulation request.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub mode: SimMode,
    pub hamiltonian: QuadHamiltonian,
    pub observable: CoeffState,
    pub hbar: f64,
    pub t_end: f64,
    pub dt: f64,
    pub convention: QuantumConvention,
}

impl Default for SimConfig {
    fn default() -> Self {
        let hamiltonian = QuadHamiltonian::harmonic();
        Self {
            mode: SimMode::Classical,
            hamiltonian,
            observable: CoeffState::q(),
            hbar: 1.0 / (2.0 * PI),
            t_end: 2.0 * PI,
            dt: 1e-3,
            convention: QuantumConvention::Egorov,
        }
    }
}

/// A real coefficient vector: a preset, six comma-separated numbers, or a
/// real polynomial of degree at most 2 in `q`, `p`.
fn parse_coeffs(key: &str, value: &str) -> Result<CoeffState, ConfigError> {
    if value.contains(',') {
        let parts: Vec<&str> = value.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(invalid(
                key,
                format!("expected 6 coefficients, got {}", parts.len()),
            ));
        }
        let mut a = [0.0; 6];
        for (slot, part) in a.iter_mut().zip(&parts) {
            *slot = parse_finite(key, part)?;
        }
        return Ok(CoeffState::from_array(a));
    }
    let expr = parse_expr(value).map_err(|e| invalid(key, e))?;
    CoeffState::from_expr(&expr).map_err(|e| invalid(key, e))
}

fn parse_finite(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value
        .parse()
        .map_err(|_| invalid(key, format!("`{value}` is not a number")))?;
    if !x.is_finite() {
        return Err(invalid(key, format!("`{value}` is not finite")));
    }
    Ok(x)
}

fn parse_positive(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x = parse_finite(key, value)?;
    if x <= 0.0 {
        return Err(invalid(key, format!("must be > 0, got {value}")));
    }
    Ok(x)
}

impl SimConfig {
    /// Validates `raw`, filling absent keys with defaults.
    pub fn from_raw(raw: &RawConfig) -> Result<Self, ConfigError> {
        let mut cfg = SimConfig::default();
        if let Some(v) = raw.get("mode") {
            cfg.mode = match v {
                "classical" => SimMode::Classical,
                "quantum" => SimMode::Quantum,
                other => {
                    return Err(invalid(
                        "mode",
                        format!("`{other}` (expected classical|quantum)"),
                    ))
                }
            };
        }
        if let Some(v) = raw.get("hamiltonian") {
            cfg.hamiltonian = match v {
                "harmonic" => QuadHamiltonian::harmonic(),
                "free" => QuadHamiltonian::free(),
                other => QuadHamiltonian::new(parse_coeffs("hamiltonian", other)?),
            };
        }
        if let Some(v) = raw.get("observable") {
            cfg.observable = match v {
                "q" => CoeffState::q(),
                "p" => CoeffState::p(),
                "energy" => cfg.hamiltonian.coeffs(),
                other => parse_coeffs("observable", other)?,
            };
        }
        if let Some(v) = raw.get("hbar") {
            cfg.hbar = parse_finite("hbar", v)?;
            if cfg.hbar == 0.0 {
                return Err(invalid("hbar", "must be nonzero"));
            }
        }
        if let Some(v) = raw.get("t_end") {
            cfg.t_end = parse_positive("t_end", v)?;
        }
        if let Some(v) = raw.get("dt") {
            cfg.dt = parse_positive("dt", v)?;
        }
        if cfg.dt > cfg.t_end {
            return Err(invalid(
                "dt",
                format!("must not exceed t_end = {}", cfg.t_end),
            ));
        }
        if let Some(v) = raw.get("convention") {
            cfg.convention = v.parse().map_err(|e: String| invalid("convention", e))?;
        }
        Ok(cfg)
    }

    pub fn rep_params(&self) -> RepParams {
        RepParams::new(self.hbar).expect("hbar validated as finite and nonzero")
    }

    pub fn dynamics_mode(&self) -> Mode {
        match self.mode {
            SimMode::Classical => Mode::Classical,
            SimMode::Quantum => Mode::Quantum(self.convention),
        }
    }
}
