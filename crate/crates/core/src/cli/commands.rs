use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{BallCache, RunConfig, VERSION};
use crate::conjugacy::{class_profile, finite_class_elements, DEFAULT_CLASS_BUDGET};
use crate::enumerate::{enumerate_ball_within, growth_classify, BallEnumeration};
use crate::error::{Error, Result};
use crate::fc::fc_report;
use crate::group::{make_backend, GroupBackend, GroupElement};
use crate::rd::{rd_ratio_estimates, RdOptions};
use crate::traces::{trace_space_basis, vanishing_certificate};

/// Writes files for one command, each stamped with version and config.
struct Output<'a> {
    cfg: &'a RunConfig,
    command: &'static str,
    written: Vec<PathBuf>,
}

impl<'a> Output<'a> {
    fn new(cfg: &'a RunConfig, command: &'static str) -> Result<Self> {
        fs::create_dir_all(&cfg.out_dir)?;
        Ok(Output { cfg, command, written: Vec::new() })
    }

    fn write(&mut self, name: &str, text: String) -> Result<()> {
        let path = self.cfg.out_dir.join(name);
        fs::write(&path, text)?;
        self.written.push(path);
        Ok(())
    }

    /// `#` metadata lines, then the table.
    fn csv(&mut self, name: &str, table: &str) -> Result<()> {
        let mut text = format!("# hyptrace {VERSION}\n# command {}\n# config_hash {}\n", self.command, self.cfg.hash());
        for line in self.cfg.canonical_text().lines() {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(table);
        self.write(name, text)
    }

    fn json(&mut self, name: &str, result: Value) -> Result<()> {
        let config: serde_json::Map<String, Value> =
            self.cfg.result_lines().into_iter().map(|(k, v)| (k.to_string(), Value::String(v))).collect();
        let doc = json!({
            "tool": "hyptrace",
            "version": VERSION,
            "command": self.command,
            "config_hash": self.cfg.hash(),
            "config": config,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        text.push('\n');
        self.write(name, text)
    }

    fn report(&self) {
        for p in &self.written {
            println!("wrote {}", p.display());
        }
    }
}

fn backend(cfg: &RunConfig) -> Result<Arc<GroupBackend>> {
    make_backend(&cfg.backend)
}

fn element(cfg: &RunConfig, backend: &GroupBackend) -> Result<GroupElement> {
    let text = cfg.element.as_deref().ok_or_else(|| Error::Config("this command needs --element".into()))?;
    backend.parse_element(text)
}

/// B_radius from the cache when possible. On budget exhaustion returns the
/// largest complete ball and the radius reached.
fn ball(cfg: &RunConfig, backend: &Arc<GroupBackend>) -> Result<(BallEnumeration, Option<usize>)> {
    let cache = cfg.cache_dir.as_deref().map(BallCache::open).transpose()?;
    if let Some(hit) = cache.as_ref().map(|c| c.load(backend, cfg.radius)).transpose()?.flatten() {
        return Ok((hit, None));
    }
    match enumerate_ball_within(backend, cfg.radius, cfg.memory_budget_bytes) {
        Ok(ball) => {
            if let Some(c) = &cache {
                c.store(&ball)?;
            }
            Ok((ball, None))
        }
        Err(Error::BudgetExceeded { reached, .. }) => {
            Ok((enumerate_ball_within(backend, reached, cfg.memory_budget_bytes)?, Some(reached)))
        }
        Err(e) => Err(e),
    }
}

pub(super) fn growth(cfg: &RunConfig) -> Result<i32> {
    let backend = backend(cfg)?;
    let mut out = Output::new(cfg, "growth")?;
    let (ball, partial) = ball(cfg, &backend)?;
    let series = ball.sphere_sizes();
    let (verdict, mut code) = match partial {
        Some(_) => (Value::Null, 2),
        None => match growth_classify(&series) {
            Ok(v) => (json!(v), 0),
            Err(e @ Error::SeriesTooShort { .. }) => (json!({ "error": e.to_string() }), e.exit_code()),
            Err(e) => return Err(e),
        },
    };
    out.csv("growth.csv", &series.to_csv())?;
    out.json(
        "growth.json",
        json!({
            "backend": backend.description(),
            "requested_radius": cfg.radius,
            "radius": ball.radius(),
            "partial": partial.is_some(),
            "counts": series.counts,
            "ball_size": series.total(),
            "verdict": verdict,
        }),
    )?;
    out.report();
    if let Some(reached) = partial {
        eprintln!("error: memory budget exceeded; results are partial, complete up to radius {reached}");
        code = 2;
    } else if code != 0 {
        eprintln!("error: series too short to classify; counts written");
    }
    Ok(code)
}

pub(super) fn conjgrowth(cfg: &RunConfig) -> Result<i32> {
    let backend = backend(cfg)?;
    let a = element(cfg, &backend)?;
    let mut out = Output::new(cfg, "conjgrowth")?;
    let profile = class_profile(&backend, &a, cfg.class_length)?;
    let finite = finite_class_elements(&backend, &a, DEFAULT_CLASS_BUDGET)?;
    let (verdict, code) = match finite {
        Some(elements) => (
            json!({
                "kind": "finite_class",
                "size": elements.len(),
                "elements": elements.iter().map(|g| backend.format_element(g)).collect::<Vec<_>>(),
            }),
            0,
        ),
        None => match growth_classify(&profile.counts) {
            Ok(v) => (json!(v), 0),
            Err(e @ Error::SeriesTooShort { .. }) => (json!({ "error": e.to_string() }), e.exit_code()),
            Err(e) => return Err(e),
        },
    };
    out.csv("conjgrowth.csv", &profile.to_csv())?;
    out.json(
        "conjgrowth.json",
        json!({
            "backend": backend.description(),
            "representative": backend.format_element(&profile.representative),
            "canonical": backend.format_element(&profile.canonical),
            "horizon": profile.horizon,
            "exactness": profile.exactness.as_str(),
            "counts": profile.counts.counts,
            "verdict": verdict,
        }),
    )?;
    out.report();
    if code != 0 {
        eprintln!("error: class profile too short to classify; counts written");
    }
    Ok(code)
}

pub(super) fn certify(cfg: &RunConfig) -> Result<i32> {
    let backend = backend(cfg)?;
    let a = element(cfg, &backend)?;
    let cert = vanishing_certificate(&backend, &a, cfg.s, cfg.class_length)?;
    let established = cert.verdict.decreasing_tail && cert.exact;
    let mut out = Output::new(cfg, "certify")?;
    out.csv("certificate.csv", &cert.to_csv())?;
    let mut result = cert.to_json();
    result["established"] = json!(established);
    out.json("certificate.json", result)?;
    out.report();
    if let Some(w) = cert.warning() {
        eprintln!("warning: {w}");
    }
    if !established {
        eprintln!(
            "certificate not established: decreasing tail {}, exact profile {}, final bound {:.6}",
            cert.verdict.decreasing_tail, cert.exact, cert.verdict.final_bound
        );
        return Ok(1);
    }
    Ok(0)
}

pub(super) fn tracespace(cfg: &RunConfig) -> Result<i32> {
    let backend = backend(cfg)?;
    let space = trace_space_basis(&backend, cfg.trace_horizon, cfg.memory_budget_bytes)?;
    let mut out = Output::new(cfg, "tracespace")?;
    let mut result = space.to_json();
    result["backend"] = json!(backend.description());
    out.json("tracespace.json", result)?;
    out.report();
    Ok(0)
}

pub(super) fn fccenter(cfg: &RunConfig) -> Result<i32> {
    let backend = backend(cfg)?;
    let report = fc_report(&backend, cfg.trace_horizon, cfg.trace_horizon, cfg.memory_budget_bytes)?;
    let mut out = Output::new(cfg, "fccenter")?;
    let mut result = report.to_json();
    result["backend"] = json!(backend.description());
    out.json("fccenter.json", result)?;
    out.report();
    Ok(if report.subgroup.passed && report.normal.passed { 0 } else { 1 })
}

pub(super) fn rd(cfg: &RunConfig) -> Result<i32> {
    let backend = backend(cfg)?;
    let exponents: Vec<f64> = if cfg.s == 0.0 { vec![0.0] } else { vec![cfg.s, 0.0] };
    let opts = RdOptions {
        min_n: 0,
        max_n: cfg.max_n,
        samples_per_n: cfg.samples_per_n,
        seed: cfg.seed,
        probe_radius: cfg.probe_radius,
        budget_bytes: cfg.memory_budget_bytes,
    };
    let estimates = rd_ratio_estimates(&backend, &exponents, &opts)?;
    let mut out = Output::new(cfg, "rd")?;
    let mut table = String::from("s,n,ratio\n");
    for est in &estimates {
        for smp in &est.samples {
            table.push_str(&format!("{},{},{:.12e}\n", est.s, smp.n, smp.ratio));
        }
    }
    out.csv("rd.csv", &table)?;
    let summaries: Vec<Value> = estimates
        .iter()
        .map(|est| {
            let per_n: Vec<Value> = (opts.min_n..=opts.max_n)
                .map(|n| {
                    let ratios: Vec<f64> = est.samples.iter().filter(|x| x.n == n).map(|x| x.ratio).collect();
                    json!({
                        "n": n,
                        "mean": ratios.iter().sum::<f64>() / ratios.len() as f64,
                        "max": est.sup_at(n),
                    })
                })
                .collect();
            json!({
                "s": est.s,
                "sup_ratio": est.sup_ratio,
                "trend_slope": est.trend_slope,
                "samples_per_n": est.samples_per_n,
                "probe_radius": est.probe_radius,
                "sampling": est.sampling,
                "seed": est.seed,
                "per_n": per_n,
            })
        })
        .collect();
    out.json("rd.json", json!({ "backend": backend.description(), "estimates": summaries }))?;
    out.report();
    Ok(0)
}
