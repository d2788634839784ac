//! Config-driven runner for the greenwalk analyses.

pub mod config;
pub mod emit;
pub mod tasks;

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;

pub const REPORT_SCHEMA: &str = "greenwalk-report/1";

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub out: PathBuf,
    pub timestamp: bool,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    task: &'a str,
    kind: &'a str,
    walk: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<u64>,
    result: serde_value::Value,
}

#[derive(Debug)]
pub struct TaskRecord {
    pub name: String,
    pub kind: &'static str,
    pub summary: String,
    pub undetermined: bool,
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub tasks: Vec<TaskRecord>,
}

impl RunSummary {
    pub fn any_undetermined(&self) -> bool {
        self.tasks.iter().any(|t| t.undetermined)
    }
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Runs every task of a configuration text in order and writes the reports.
pub fn run_config_text(text: &str, opts: &RunOptions) -> Result<RunSummary> {
    let cfg = config::parse(text)?;
    let default_walk = cfg.walk.as_ref().map(|w| w.resolve()).transpose()?;
    let mut summary = RunSummary::default();
    for (i, task) in cfg.tasks.iter().enumerate() {
        let name = task.name();
        let kind = task.kind();
        let ctx = || format!("task `{name}` ({kind})");
        let walk = match task.walk() {
            Some(w) => w.resolve().with_context(ctx)?,
            None => default_walk.clone().expect("checked by the parser"),
        };
        let out = tasks::run_task(task, &walk, &cfg.defaults).with_context(ctx)?;
        let env = Envelope {
            schema: REPORT_SCHEMA,
            task: &name,
            kind,
            walk: walk.label(),
            generated_at: opts.timestamp.then(now),
            result: out.result,
        };
        let stem = format!("{:02}-{name}", i + 1);
        let files = emit::write_report(&opts.out, &stem, &emit::to_value(&env)?).with_context(ctx)?;
        summary.tasks.push(TaskRecord {
            name,
            kind,
            summary: out.summary,
            undetermined: out.undetermined,
            files,
        });
    }
    Ok(summary)
}

pub fn run_config(path: &Path, opts: &RunOptions) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    run_config_text(&text, opts)
}

/// The `classify` shortcut: one measure (homogeneous) or two (oscillating).
pub fn classify_inline(measure: &str, nu: Option<&str>, tol: f64) -> Result<(String, bool)> {
    let parse = |s: &str, what: &str| -> Result<config::MeasureConfig> {
        serde_json::from_str(s).map_err(|e| anyhow::anyhow!("invalid {what}: {e}"))
    };
    let walk = match nu {
        None => config::WalkConfig::Homogeneous {
            step: parse(measure, "--measure")?,
        },
        Some(n) => config::WalkConfig::Oscillating {
            mu: parse(measure, "--measure")?,
            nu: parse(n, "--nu")?,
        },
    }
    .resolve()?;
    let task = config::TaskConfig::Classify {
        name: None,
        walk: None,
        tol: Some(tol),
    };
    let out = tasks::run_task(&task, &walk, &config::Defaults::default())?;
    let env = Envelope {
        schema: REPORT_SCHEMA,
        task: "classify",
        kind: "classify",
        walk: walk.label(),
        generated_at: None,
        result: out.result,
    };
    Ok((emit::json_text(&emit::to_value(&env)?), out.undetermined))
}
