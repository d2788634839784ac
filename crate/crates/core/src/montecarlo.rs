//! Trajectory simulation and seeded Monte Carlo estimators.
//!
//! Trial `i` draws from its own ChaCha stream keyed by `(seed, i)`, so the
//! outcome of a trial never depends on scheduling, and results are reduced
//! in trial order.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::greens::WalkSpec;
use crate::measure::{Law, LatticeMeasure};

/// Independent stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Draw {
    Jump(i64),
    /// A jump beyond the materialized window.
    Tail,
    /// The missing mass of a sub-probability law.
    Killed,
}

/// Inverse-CDF sampler over a materialized window.
#[derive(Clone, Debug)]
pub struct Sampler {
    lo: i64,
    cdf: Vec<f64>,
    explicit: f64,
    with_tail: f64,
}

impl Sampler {
    pub fn new(law: &Law) -> Self {
        Self::from_measure(&law.materialize())
    }

    pub fn from_measure(m: &LatticeMeasure) -> Self {
        let mut acc = 0.0;
        let cdf: Vec<f64> = m
            .weights()
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self {
            lo: m.support_min(),
            cdf,
            explicit: acc,
            with_tail: acc + m.tail_mass(),
        }
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Draw {
        let u: f64 = rng.random();
        if u < self.explicit {
            let i = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
            Draw::Jump(self.lo + i as i64)
        } else if u < self.with_tail {
            Draw::Tail
        } else {
            Draw::Killed
        }
    }
}

/// Samplers for the law used on each side of the origin.
#[derive(Clone, Debug)]
pub struct WalkSampler {
    low: Sampler,
    high: Option<Sampler>,
}

impl WalkSampler {
    pub fn new(walk: &WalkSpec) -> Self {
        match walk {
            WalkSpec::Homogeneous(l) => Self {
                low: Sampler::new(l),
                high: None,
            },
            WalkSpec::Oscillating { neg_side, pos_side } => Self {
                low: Sampler::new(neg_side),
                high: Some(Sampler::new(pos_side)),
            },
            WalkSpec::Concentrated { mu_plus, nu_minus } => Self {
                low: Sampler::new(mu_plus),
                high: Some(Sampler::new(nu_minus)),
            },
        }
    }

    pub fn draw_from<R: Rng + ?Sized>(&self, z: i64, rng: &mut R) -> Draw {
        match &self.high {
            Some(h) if z >= 1 => h.draw(rng),
            _ => self.low.draw(rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Censor {
    Tail,
    Killed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    pub positions: Vec<i64>,
    /// Set when the walk stopped early.
    pub censored: Option<Censor>,
}

/// Path of `steps` steps from `start`, stopped early at a tail or kill event.
pub fn simulate_walk(walk: &WalkSpec, start: i64, steps: usize, seed: u64) -> Trajectory {
    let sampler = WalkSampler::new(walk);
    let mut rng = trial_rng(seed, 0);
    run_path(&sampler, start, steps, &mut rng)
}

pub(crate) fn run_path<R: Rng + ?Sized>(s: &WalkSampler, start: i64, steps: usize, rng: &mut R) -> Trajectory {
    let mut positions = Vec::with_capacity(steps + 1);
    positions.push(start);
    let mut z = start;
    for _ in 0..steps {
        match s.draw_from(z, rng) {
            Draw::Jump(j) => {
                z += j;
                positions.push(z);
            }
            Draw::Tail => {
                return Trajectory {
                    positions,
                    censored: Some(Censor::Tail),
                }
            }
            Draw::Killed => {
                return Trajectory {
                    positions,
                    censored: Some(Censor::Killed),
                }
            }
        }
    }
    Trajectory {
        positions,
        censored: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Event {
    /// Return to the start within the horizon.
    Return,
    /// Visit `y` at some time `1 ≤ n ≤ horizon`.
    Hit { y: i64 },
    /// Visits to `at` at times `n < T_before ∧ horizon`.
    Occupation { at: i64, before: Option<i64> },
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub walk: WalkSpec,
    pub start: i64,
    pub trials: u64,
    pub horizon: usize,
    pub seed: u64,
    pub event: Event,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    /// Three standard errors.
    pub radius: f64,
    pub trials: u64,
    /// Trials stopped by a tail jump or killing, counted as zero.
    pub censored: u64,
    /// Trials still unresolved at the horizon.
    pub at_horizon: u64,
}

impl Estimate {
    pub fn covers(&self, x: f64) -> bool {
        (self.mean - x).abs() <= self.radius
    }

    pub(crate) fn from_samples(samples: &[f64], censored: u64, at_horizon: u64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let se = (var / n).sqrt();
        Self {
            mean,
            std_error: se,
            radius: 3.0 * se,
            trials: samples.len() as u64,
            censored,
            at_horizon,
        }
    }
}

#[derive(Clone, Copy)]
struct Outcome {
    value: f64,
    censored: bool,
    at_horizon: bool,
}

fn one_trial(s: &WalkSampler, cfg: &SimulationConfig, trial: u64) -> Outcome {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut z = cfg.start;
    let mut value = 0.0;
    if let Event::Occupation { at, .. } = cfg.event {
        if z == at {
            value += 1.0;
        }
    }
    for _ in 0..cfg.horizon {
        match s.draw_from(z, &mut rng) {
            Draw::Jump(j) => z += j,
            Draw::Tail | Draw::Killed => {
                return Outcome {
                    value,
                    censored: true,
                    at_horizon: false,
                }
            }
        }
        match cfg.event {
            Event::Return if z == cfg.start => {
                return Outcome {
                    value: 1.0,
                    censored: false,
                    at_horizon: false,
                }
            }
            Event::Hit { y } if z == y => {
                return Outcome {
                    value: 1.0,
                    censored: false,
                    at_horizon: false,
                }
            }
            Event::Occupation { at, before } => {
                if before == Some(z) {
                    return Outcome {
                        value,
                        censored: false,
                        at_horizon: false,
                    };
                }
                if z == at {
                    value += 1.0;
                }
            }
            _ => {}
        }
    }
    Outcome {
        value,
        censored: false,
        at_horizon: true,
    }
}

/// Empirical mean of the configured event with a 3σ interval.
pub fn estimate_event(cfg: &SimulationConfig) -> Result<Estimate> {
    if cfg.trials < 1 || cfg.horizon < 1 {
        return precondition("trials and horizon must be at least 1");
    }
    let s = WalkSampler::new(&cfg.walk);
    let outcomes: Vec<Outcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| one_trial(&s, cfg, i))
        .collect();
    let samples: Vec<f64> = outcomes.iter().map(|o| o.value).collect();
    let censored = outcomes.iter().filter(|o| o.censored).count() as u64;
    let at_horizon = outcomes.iter().filter(|o| o.at_horizon).count() as u64;
    Ok(Estimate::from_samples(&samples, censored, at_horizon))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(p: &[(i64, f64)]) -> Law {
        Law::points(p).unwrap()
    }

    #[test]
    fn deterministic_paths() {
        let w = WalkSpec::concentrated(pts(&[(1, 1.0)]), pts(&[(-1, 1.0)])).unwrap();
        assert_eq!(simulate_walk(&w, 0, 4, 7).positions, vec![0, 1, 0, 1, 0]);
        let w = WalkSpec::homogeneous(pts(&[(1, 1.0)])).unwrap();
        assert_eq!(simulate_walk(&w, 0, 3, 7).positions, vec![0, 1, 2, 3]);
    }

    #[test]
    fn same_seed_same_path() {
        let w = WalkSpec::homogeneous(Law::zeta(0.7, 1000, true).unwrap()).unwrap();
        let a = simulate_walk(&w, 0, 500, 42);
        let b = simulate_walk(&w, 0, 500, 42);
        assert_eq!(a, b);
        assert_ne!(a, simulate_walk(&w, 0, 500, 43));
    }

    #[test]
    fn tail_jumps_are_censored() {
        let w = WalkSpec::homogeneous(Law::zeta(0.2, 2, false).unwrap()).unwrap();
        let t = simulate_walk(&w, 0, 10_000, 1);
        assert_eq!(t.censored, Some(Censor::Tail));
    }

    #[test]
    fn gamblers_ruin() {
        let cfg = SimulationConfig {
            walk: WalkSpec::homogeneous(pts(&[(1, 0.3), (-1, 0.7)])).unwrap(),
            start: 0,
            trials: 100_000,
            horizon: 10_000,
            seed: 11,
            event: Event::Hit { y: 1 },
        };
        let e = estimate_event(&cfg).unwrap();
        assert!(e.covers(3.0 / 7.0), "{e:?}");
    }

    #[test]
    fn zigzag_always_returns() {
        let cfg = SimulationConfig {
            walk: WalkSpec::concentrated(pts(&[(1, 1.0)]), pts(&[(-1, 1.0)])).unwrap(),
            start: 0,
            trials: 1000,
            horizon: 10,
            seed: 3,
            event: Event::Return,
        };
        let e = estimate_event(&cfg).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.radius, 0.0);
    }

    #[test]
    fn taboo_occupation() {
        let cfg = SimulationConfig {
            walk: WalkSpec::homogeneous(pts(&[(1, 0.5), (-1, 0.5)])).unwrap(),
            start: 0,
            trials: 100_000,
            horizon: 100_000,
            seed: 5,
            event: Event::Occupation { at: 0, before: Some(1) },
        };
        let e = estimate_event(&cfg).unwrap();
        assert!(e.covers(2.0), "{e:?}");
    }

    #[test]
    fn worker_count_does_not_matter() {
        let cfg = SimulationConfig {
            walk: WalkSpec::homogeneous(pts(&[(1, 0.4), (-2, 0.3), (3, 0.3)])).unwrap(),
            start: 0,
            trials: 5000,
            horizon: 200,
            seed: 99,
            event: Event::Return,
        };
        let a = estimate_event(&cfg).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| estimate_event(&cfg).unwrap());
        assert_eq!(a, b);
    }
}
