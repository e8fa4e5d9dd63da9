//! Command-line front end. Every command writes CSV and/or JSON into the
//! output directory. Each file carries the tool version, the config hash and
//! the full result-determining configuration, so equal configs give
//! byte-identical files.
//!
//! Exit codes: 0 success, 1 other failure (including a certificate whose
//! verdict does not hold), 2 budget exceeded, 3 invalid configuration or
//! input, 4 wrong regime (finite class), 5 insufficient data.

mod cache;
mod commands;
mod config;

pub use cache::BallCache;
pub use config::RunConfig;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::group::BackendSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable overriding the cache directory of a config file.
pub const CACHE_ENV: &str = "HYPTRACE_CACHE_DIR";

#[derive(Parser, Debug)]
#[command(name = "hyptrace", version, about = "Growth, conjugacy, trace and rapid-decay experiments on finitely generated groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Sphere sizes of the Cayley ball and a growth verdict.
    Growth,
    /// Conjugacy class profile of --element and a growth verdict.
    Conjgrowth,
    /// Vanishing certificate for the class of --element.
    Certify,
    /// Finite conjugacy classes meeting the ball of radius --horizon.
    Tracespace,
    /// FC-center, subgroup and normality checks, and quotient checks.
    Fccenter,
    /// Rapid-decay ratio samples at --s and at s = 0.
    Rd,
    /// Print the effective configuration file and exit.
    ShowConfig,
}

/// Flags override values from `--config`, which override defaults.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Preset group: free2, z, z3xz3, z3xfree2, paper-example-3, s3.
    #[arg(long, global = true, conflicts_with = "spec")]
    preset: Option<String>,
    /// Backend description, e.g. `free_product(cyclic(3),cyclic(3))`.
    #[arg(long, global = true)]
    spec: Option<String>,
    /// Element as generator tokens, e.g. `x y^-1 a`.
    #[arg(long, global = true)]
    element: Option<String>,
    /// Ball radius for growth.
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Class length horizon for conjgrowth and certify.
    #[arg(long = "L", global = true)]
    class_length: Option<usize>,
    /// Ball radius scanned by tracespace and fccenter.
    #[arg(long, global = true)]
    horizon: Option<usize>,
    /// Sobolev exponent.
    #[arg(long = "s", global = true)]
    s: Option<f64>,
    /// Largest support radius sampled by rd.
    #[arg(long, global = true)]
    max_n: Option<usize>,
    /// Random samples per support radius for rd.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Probe ball radius for rd.
    #[arg(long, global = true)]
    probe_radius: Option<usize>,
    /// Seed for rd sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Memory budget in bytes.
    #[arg(long, global = true)]
    budget_bytes: Option<u64>,
    /// Power iteration cap for norm estimates.
    #[arg(long, global = true)]
    max_iterations: Option<usize>,
    /// Residual tolerance for norm estimates.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Output directory, created if missing.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Ball cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
}

impl Overrides {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(p) = &self.preset {
            cfg.backend = BackendSpec::Preset(p.clone());
        }
        if let Some(s) = &self.spec {
            cfg.backend = s.parse()?;
        }
        macro_rules! take {
            ($($field:ident => $target:ident),*) => {
                $(if let Some(v) = &self.$field { cfg.$target = v.clone(); })*
            };
        }
        take!(radius => radius, class_length => class_length, horizon => trace_horizon, s => s,
              max_n => max_n, samples => samples_per_n, probe_radius => probe_radius, seed => seed,
              budget_bytes => memory_budget_bytes, max_iterations => max_iterations,
              tolerance => tolerance, out => out_dir);
        if self.element.is_some() {
            cfg.element = self.element.clone();
        }
        if self.cache_dir.is_some() {
            cfg.cache_dir = self.cache_dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Errors are reported on stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 3 } else { 0 };
        }
    };
    match cli.overrides.resolve().and_then(|cfg| execute(cli.command, &cfg)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, cfg: &RunConfig) -> Result<i32> {
    match command {
        Command::ShowConfig => {
            print!("{}", cfg.to_text());
            Ok(0)
        }
        Command::Growth => commands::growth(cfg),
        Command::Conjgrowth => commands::conjgrowth(cfg),
        Command::Certify => commands::certify(cfg),
        Command::Tracespace => commands::tracespace(cfg),
        Command::Fccenter => commands::fccenter(cfg),
        Command::Rd => commands::rd(cfg),
    }
}
