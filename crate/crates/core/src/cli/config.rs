//! Flat `key = value` run configuration. Every key is always written, so a
//! printed configuration fully describes a run.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::enumerate::DEFAULT_BUDGET_BYTES;
use crate::error::{Error, Result};
use crate::group::BackendSpec;
use crate::operator::{DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use crate::rd::{DEFAULT_PROBE_RADIUS, DEFAULT_RD_SEED, DEFAULT_SAMPLES_PER_N};

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub backend: BackendSpec,
    /// Element in generator syntax, e.g. `x y^-1 a`.
    pub element: Option<String>,
    /// Ball radius for growth series.
    pub radius: usize,
    /// Class length horizon L for conjugacy profiles and certificates.
    pub class_length: usize,
    /// Ball radius scanned for finite classes.
    pub trace_horizon: usize,
    pub s: f64,
    pub max_n: usize,
    pub samples_per_n: usize,
    pub probe_radius: usize,
    pub seed: u64,
    pub memory_budget_bytes: u64,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub out_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            backend: BackendSpec::Preset("free2".into()),
            element: None,
            radius: 10,
            class_length: 21,
            trace_horizon: 4,
            s: 2.0,
            max_n: 8,
            samples_per_n: DEFAULT_SAMPLES_PER_N,
            probe_radius: DEFAULT_PROBE_RADIUS,
            seed: DEFAULT_RD_SEED,
            memory_budget_bytes: DEFAULT_BUDGET_BYTES,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            tolerance: DEFAULT_TOLERANCE,
            out_dir: PathBuf::from("."),
            cache_dir: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

impl RunConfig {
    /// Keys that determine results, in file order.
    pub(crate) fn result_lines(&self) -> Vec<(&'static str, String)> {
        vec![
            ("backend", self.backend.to_string()),
            ("element", self.element.clone().unwrap_or_default()),
            ("radius", self.radius.to_string()),
            ("class_length", self.class_length.to_string()),
            ("trace_horizon", self.trace_horizon.to_string()),
            ("s", self.s.to_string()),
            ("max_n", self.max_n.to_string()),
            ("samples_per_n", self.samples_per_n.to_string()),
            ("probe_radius", self.probe_radius.to_string()),
            ("seed", self.seed.to_string()),
            ("memory_budget_bytes", self.memory_budget_bytes.to_string()),
            ("max_iterations", self.max_iterations.to_string()),
            ("tolerance", self.tolerance.to_string()),
        ]
    }

    /// The full file, including output and cache locations.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.result_lines() {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "out_dir = {}", self.out_dir.display());
        let _ = writeln!(
            out,
            "cache_dir = {}",
            self.cache_dir.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
        );
        out
    }

    /// The result-determining lines; locations are excluded so that the
    /// same run written to two directories is byte-identical.
    pub fn canonical_text(&self) -> String {
        self.result_lines().into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_text().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Applies `key = value` lines on top of `self`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "backend" => self.backend = value.parse()?,
            "element" => self.element = (!value.is_empty()).then(|| value.to_string()),
            "radius" => self.radius = parse_num(key, value)?,
            "class_length" => self.class_length = parse_num(key, value)?,
            "trace_horizon" => self.trace_horizon = parse_num(key, value)?,
            "s" => self.s = parse_num(key, value)?,
            "max_n" => self.max_n = parse_num(key, value)?,
            "samples_per_n" => self.samples_per_n = parse_num(key, value)?,
            "probe_radius" => self.probe_radius = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "memory_budget_bytes" => self.memory_budget_bytes = parse_num(key, value)?,
            "max_iterations" => self.max_iterations = parse_num(key, value)?,
            "tolerance" => self.tolerance = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "cache_dir" => self.cache_dir = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::Config(format!("s must be finite and ≥ 0, got {}", self.s)));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        if self.memory_budget_bytes == 0 || self.max_iterations == 0 || self.samples_per_n == 0 {
            return Err(Error::Config("budgets, iteration caps and sample counts must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trips() {
        let mut cfg = RunConfig {
            backend: "semidirect(cyclic(3),free(2),[[0,2,1],[0,1,2]])".parse().unwrap(),
            element: Some("x y^-1 a".into()),
            s: 0.1 + 0.2,
            tolerance: 3e-11,
            cache_dir: Some("/tmp/c".into()),
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        cfg.element = None;
        cfg.cache_dir = None;
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn hash_ignores_locations_only() {
        let a = RunConfig::default();
        let b = RunConfig { out_dir: "/elsewhere".into(), ..a.clone() };
        let c = RunConfig { seed: 1, ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn bad_input_is_a_config_error() {
        for text in ["radius = -1", "nonsense = 1", "just words", "s = -2", "tolerance = 0", "backend = free("] {
            let err = RunConfig::parse(text).unwrap_err();
            assert_eq!(err.exit_code(), 3, "{text}: {err}");
        }
    }
}
