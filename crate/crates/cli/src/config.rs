//! Version 1 of the task configuration. Every struct rejects unknown keys.

use anyhow::{bail, Context, Result};
use greenwalk_core::greens::WalkSpec;
use greenwalk_core::measure::Law;
use serde::{Deserialize, Serialize};

pub const VERSION: u32 = 1;

/// Window used for zeta families when none is given.
pub const DEFAULT_ZETA_WINDOW: i64 = 1 << 16;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub version: u32,
    #[serde(default)]
    pub walk: Option<WalkConfig>,
    #[serde(default)]
    pub defaults: Defaults,
    pub tasks: Vec<TaskConfig>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Defaults {
    pub tol: f64,
    pub seed: u64,
    pub trials: u64,
    pub horizon: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            seed: 1,
            trials: 100_000,
            horizon: 10_000,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureConfig {
    Points {
        points: Vec<(i64, f64)>,
    },
    Geometric {
        p: f64,
    },
    Zeta {
        a: f64,
        #[serde(default)]
        window: Option<i64>,
        #[serde(default)]
        symmetric: bool,
    },
    /// `k ↦ of(−k)`.
    Reflected {
        of: Box<MeasureConfig>,
    },
}

impl MeasureConfig {
    pub fn to_law(&self) -> Result<Law> {
        Ok(match self {
            MeasureConfig::Points { points } => Law::points(points)?,
            MeasureConfig::Geometric { p } => Law::geometric(*p)?,
            MeasureConfig::Zeta { a, window, symmetric } => {
                Law::zeta(*a, window.unwrap_or(DEFAULT_ZETA_WINDOW), *symmetric)?
            }
            MeasureConfig::Reflected { of } => of.to_law()?.reflected(),
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WalkConfig {
    Homogeneous { step: MeasureConfig },
    /// `mu` is used from positions `≤ 0`, `nu` from `≥ 1`.
    Oscillating { mu: MeasureConfig, nu: MeasureConfig },
    Concentrated { mu_plus: MeasureConfig, nu_minus: MeasureConfig },
}

/// A walk with its laws resolved.
#[derive(Clone, Debug)]
pub enum Walk {
    Homogeneous(Law),
    Oscillating { mu: Law, nu: Law },
    Concentrated { mu_plus: Law, nu_minus: Law },
}

impl WalkConfig {
    pub fn resolve(&self) -> Result<Walk> {
        Ok(match self {
            WalkConfig::Homogeneous { step } => Walk::Homogeneous(step.to_law().context("walk.step")?),
            WalkConfig::Oscillating { mu, nu } => Walk::Oscillating {
                mu: mu.to_law().context("walk.mu")?,
                nu: nu.to_law().context("walk.nu")?,
            },
            WalkConfig::Concentrated { mu_plus, nu_minus } => Walk::Concentrated {
                mu_plus: mu_plus.to_law().context("walk.mu_plus")?,
                nu_minus: nu_minus.to_law().context("walk.nu_minus")?,
            },
        })
    }
}

impl Walk {
    pub fn spec(&self) -> Result<WalkSpec> {
        Ok(match self {
            Walk::Homogeneous(l) => WalkSpec::homogeneous(l.clone())?,
            Walk::Oscillating { mu, nu } => WalkSpec::oscillating(mu.clone(), nu.clone())?,
            Walk::Concentrated { mu_plus, nu_minus } => WalkSpec::concentrated(mu_plus.clone(), nu_minus.clone())?,
        })
    }

    pub fn label(&self) -> String {
        match self {
            Walk::Homogeneous(l) => format!("homogeneous({})", l.label()),
            Walk::Oscillating { mu, nu } => format!("oscillating(mu={}, nu={})", mu.label(), nu.label()),
            Walk::Concentrated { mu_plus, nu_minus } => {
                format!("concentrated(mu_plus={}, nu_minus={})", mu_plus.label(), nu_minus.label())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum GreenModeConfig {
    /// Finite-horizon dynamic programming, any walk.
    Dp,
    /// `s ↑ 1` limit of the Fourier Green function, homogeneous walks.
    ChungFuchs,
    Series,
    FourierS,
    Symmetric,
    Intersection,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EventConfig {
    Return,
    Hit {
        y: i64,
    },
    Occupation {
        at: i64,
        #[serde(default)]
        before: Option<i64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    Classify {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        walk: Option<WalkConfig>,
        #[serde(default)]
        tol: Option<f64>,
    },
    Factorize {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        walk: Option<WalkConfig>,
        #[serde(default)]
        s: Option<f64>,
        #[serde(default)]
        trials: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
    },
    Green {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        walk: Option<WalkConfig>,
        #[serde(default)]
        modes: Option<Vec<GreenModeConfig>>,
        #[serde(default)]
        horizon: Option<usize>,
        #[serde(default)]
        series_log2: Option<u32>,
        #[serde(default)]
        trials: Option<u64>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        tol: Option<f64>,
    },
    Identities {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        walk: Option<WalkConfig>,
        #[serde(default)]
        tol: Option<f64>,
        /// Check Fourier coefficients against the renewal sequence for `1 ≤ x ≤ coefficients`.
        #[serde(default)]
        coefficients: Option<i64>,
    },
    Simulate {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        walk: Option<WalkConfig>,
        event: EventConfig,
        #[serde(default)]
        start: Option<i64>,
        #[serde(default)]
        trials: Option<u64>,
        #[serde(default)]
        horizon: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
    TransitionCheck {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        walk: Option<WalkConfig>,
        #[serde(default)]
        steps: Option<usize>,
        #[serde(default)]
        y_range: Option<i64>,
        #[serde(default)]
        trajectories: Option<u64>,
        #[serde(default)]
        length: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl TaskConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskConfig::Classify { .. } => "classify",
            TaskConfig::Factorize { .. } => "factorize",
            TaskConfig::Green { .. } => "green",
            TaskConfig::Identities { .. } => "identities",
            TaskConfig::Simulate { .. } => "simulate",
            TaskConfig::TransitionCheck { .. } => "transition-check",
        }
    }

    pub fn name(&self) -> String {
        let n = match self {
            TaskConfig::Classify { name, .. }
            | TaskConfig::Factorize { name, .. }
            | TaskConfig::Green { name, .. }
            | TaskConfig::Identities { name, .. }
            | TaskConfig::Simulate { name, .. }
            | TaskConfig::TransitionCheck { name, .. } => name,
        };
        n.clone().unwrap_or_else(|| self.kind().to_string())
    }

    pub fn walk(&self) -> Option<&WalkConfig> {
        match self {
            TaskConfig::Classify { walk, .. }
            | TaskConfig::Factorize { walk, .. }
            | TaskConfig::Green { walk, .. }
            | TaskConfig::Identities { walk, .. }
            | TaskConfig::Simulate { walk, .. }
            | TaskConfig::TransitionCheck { walk, .. } => walk.as_ref(),
        }
    }
}

pub fn parse(text: &str) -> Result<Config> {
    let cfg: Config = serde_json::from_str(text).map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))?;
    if cfg.version != VERSION {
        bail!("unsupported configuration version {} (expected {VERSION})", cfg.version);
    }
    if cfg.tasks.is_empty() {
        bail!("configuration lists no tasks");
    }
    let mut names = std::collections::BTreeSet::new();
    for (i, t) in cfg.tasks.iter().enumerate() {
        if t.walk().is_none() && cfg.walk.is_none() {
            bail!("task {} ({}) has no walk and the configuration sets none", i + 1, t.kind());
        }
        let n = t.name();
        if n.is_empty() || !n.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            bail!("task {}: name `{n}` must be nonempty and use only letters, digits, '-' or '_'", i + 1);
        }
        if !names.insert(n.clone()) {
            bail!("task {}: duplicate task name `{n}`", i + 1);
        }
    }
    Ok(cfg)
}
