//! The concentrated chain `(Z_n)`: positive jumps drawn from `μ₊` at
//! positions `≤ 0`, negative jumps from `ν₋` at positions `≥ 1`.
//!
//! `μ₊` and `ν₋` are the entrance laws of the two step laws of an
//! oscillating walk, and the chain shares its recurrence type.

mod green;
mod invariant;
mod jumps;
mod transition;

use rayon::prelude::*;
use serde::Serialize;

pub use green::{green_z, intersection_estimator, GreenBudget, GreenMode, GreenZ};
pub use invariant::{invariant_measure, InvariantMeasure};
pub use jumps::{decompose_trajectory, reconstruct_trajectory, JumpLists};
pub use transition::{transition_check, transition_probability, transition_row, TransitionCheck};

use crate::error::{precondition, Result};
use crate::fourier::inverse_square_integral;
use crate::greens::WalkSpec;
use crate::measure::{LatticeMeasure, Law};
use crate::montecarlo::{run_path, trial_rng, WalkSampler};
use crate::quad::Verdict;
use crate::report::{ClassificationReport, Evidence, InputEcho, Regime};
use crate::wiener_hopf::{
    factorize, factorize_negative, ladder_factor, ladder_factor_auto, ladder_factor_capped, mass_criterion, FactorizationResult,
    MassTrend, DEFAULT_HORIZON, HORIZON_CAP,
};

/// Mass deficit below which a factor counts as a probability.
pub const MASS_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct FactorDiagnostics {
    pub mu_plus: FactorizationResult,
    pub nu_minus: FactorizationResult,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Given,
    Factored {
        mu: String,
        nu: String,
        /// Ladder mass still outside the target half-line when the loop stopped.
        mu_plus_unescaped: f64,
        nu_minus_unescaped: f64,
        /// Whether the ladder output was rescaled to unit mass.
        normalized: bool,
        diagnostics: Option<Box<FactorDiagnostics>>,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct ConcentratedSpec {
    /// Materialized `μ₊` on `ℕ*`.
    pub mu_plus: LatticeMeasure,
    /// Materialized `ν₋` on `−ℕ*`.
    pub nu_minus: LatticeMeasure,
    #[serde(skip)]
    pub mu_plus_law: Law,
    #[serde(skip)]
    pub nu_minus_law: Law,
    pub provenance: Provenance,
    /// Set when either factor is defective.
    pub defective_factor: bool,
    /// Whether each factor `[μ₊, ν₋]` has a finite mean; `None` when the
    /// materialized window cannot tell.
    pub finite_mean: [Option<bool>; 2],
    /// Whether each factor is the exact law rather than a windowed ladder output.
    pub exact: [bool; 2],
}

impl ConcentratedSpec {
    pub fn given(mu_plus: Law, nu_minus: Law) -> Result<Self> {
        // reuses the support and mass checks
        WalkSpec::concentrated(mu_plus.clone(), nu_minus.clone())?;
        let finite_mean = [Some(mu_plus.has_finite_mean()), Some(nu_minus.has_finite_mean())];
        Ok(Self::assemble(mu_plus, nu_minus, Provenance::Given, finite_mean, [true, true]))
    }

    fn assemble(
        mu_plus_law: Law,
        nu_minus_law: Law,
        provenance: Provenance,
        finite_mean: [Option<bool>; 2],
        exact: [bool; 2],
    ) -> Self {
        let defective_factor =
            mu_plus_law.total_mass() < 1.0 - MASS_TOL || nu_minus_law.total_mass() < 1.0 - MASS_TOL;
        Self {
            mu_plus: mu_plus_law.materialize(),
            nu_minus: nu_minus_law.materialize(),
            mu_plus_law,
            nu_minus_law,
            provenance,
            defective_factor,
            finite_mean,
            exact,
        }
    }

    pub fn walk(&self) -> WalkSpec {
        WalkSpec::Concentrated {
            mu_plus: self.mu_plus_law.clone(),
            nu_minus: self.nu_minus_law.clone(),
        }
    }

    /// `ν₋(A) = μ₊(−A)` on the materialized windows and tails.
    pub fn is_mirrored(&self) -> bool {
        self.nu_minus == self.mu_plus.reflect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BuildOptions {
    /// Run the three-way factorization check at `s = 0.999` with this many trials.
    pub diagnostic_trials: Option<u64>,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            diagnostic_trials: None,
            seed: 0,
        }
    }
}

pub const DIAGNOSTIC_S: f64 = 0.999;

/// Widest pending ladder mass kept for heavy two-sided laws.
pub const LADDER_WIDTH_CAP: usize = 1 << 17;

struct Entrance {
    law: Law,
    unescaped: f64,
    normalized: bool,
    finite_mean: Option<bool>,
    exact: bool,
}

/// Decay exponent `a` of an upper tail `≍ k^{−1−a}`, `None` for bounded or light tails.
fn upper_tail_exponent(l: &Law) -> Option<f64> {
    if l.support_bounds().1.is_some() {
        None
    } else {
        l.tail_exponent()
    }
}

/// Whether the ladder height of a mixed-sign `mu` has a finite mean.
/// `μ₊ ≥ μ` on `ℕ*`, so a tail with `a ≤ 1` forces an infinite mean; a finite
/// upward drift or a finite second positive moment gives a finite one.
fn ladder_mean_finite(mu: &Law) -> Option<bool> {
    match upper_tail_exponent(mu) {
        None => Some(true),
        Some(a) if a <= 1.0 => Some(false),
        Some(a) if a > 2.0 => Some(true),
        Some(_) if mu.mean() > 0.0 => Some(true),
        Some(_) => None,
    }
}

/// Entrance law of the `mu`-walk into `ℕ*`, with its un-escaped mass.
fn entrance(mu: &Law) -> Result<Entrance> {
    if mu.support_bounds().0.is_some_and(|lo| lo >= 1) {
        // the first step already enters
        return Ok(Entrance {
            law: mu.clone(),
            unescaped: 0.0,
            normalized: false,
            finite_mean: Some(mu.has_finite_mean()),
            exact: true,
        });
    }
    let finite_mean = ladder_mean_finite(mu);
    // heavy two-sided laws only have a windowed ladder
    let exact = mu.tail_exponent().is_none();
    let mean = mu.mean();
    // a walk that does not drift to −∞ enters ℕ* surely
    let sure = !(mean < 0.0) || mass_criterion(mu, 256)?.trend == MassTrend::LogDivergent;
    if sure {
        let l = if exact {
            ladder_factor(mu, 1.0, DEFAULT_HORIZON)?
        } else {
            ladder_factor_capped(mu, 1.0, DEFAULT_HORIZON, LADDER_WIDTH_CAP)?
        };
        if l.factor.mass() <= 0.0 {
            return precondition("the walk never entered the positive half-line within the horizon");
        }
        Ok(Entrance {
            law: Law::Points(with_tail(&l.factor, l.lost).normalized()?),
            unescaped: l.unescaped,
            normalized: true,
            finite_mean,
            exact,
        })
    } else {
        let l = if exact {
            ladder_factor_auto(mu, 1.0)?
        } else {
            ladder_factor_capped(mu, 1.0, HORIZON_CAP, LADDER_WIDTH_CAP)?
        };
        Ok(Entrance {
            law: Law::Points(with_tail(&l.factor, l.lost)),
            unescaped: l.unescaped,
            normalized: false,
            finite_mean,
            exact,
        })
    }
}

/// Jumps past the materialized window still enter `ℕ*`; keep them as tail mass.
fn with_tail(m: &LatticeMeasure, lost: f64) -> LatticeMeasure {
    LatticeMeasure::from_raw(m.support_min(), m.weights().to_vec(), m.tail_mass() + lost.max(0.0))
}

/// `μ₊` from `mu` (used at `≤ 0`) and `ν₋` from `nu` (used at `≥ 1`).
pub fn build_concentrated(mu: &Law, nu: &Law, opts: BuildOptions) -> Result<ConcentratedSpec> {
    for (name, l) in [("mu", mu), ("nu", nu)] {
        if (l.total_mass() - 1.0).abs() > MASS_TOL {
            return precondition(format!("{name} must be a probability, mass is {}", l.total_mass()));
        }
    }
    let up = entrance(mu)?;
    let down = entrance(&nu.clone().reflected())?;
    let diagnostics = match opts.diagnostic_trials {
        Some(trials) => Some(Box::new(FactorDiagnostics {
            mu_plus: factorize(mu, DIAGNOSTIC_S, trials, opts.seed)?,
            nu_minus: factorize_negative(nu, DIAGNOSTIC_S, trials, opts.seed.wrapping_add(1))?,
        })),
        None => None,
    };
    let provenance = Provenance::Factored {
        mu: mu.label(),
        nu: nu.label(),
        mu_plus_unescaped: up.unescaped,
        nu_minus_unescaped: down.unescaped,
        normalized: up.normalized || down.normalized,
        diagnostics,
    };
    Ok(ConcentratedSpec::assemble(
        up.law,
        down.law.reflected(),
        provenance,
        [up.finite_mean, down.finite_mean],
        [up.exact, down.exact],
    ))
}

fn mean_evidence(role: &str, law: &Law) -> Evidence {
    let m = law.mean().abs();
    let e = Evidence::new(&format!("mean-{role}"), m, 0.0, "exact");
    if law.tail_exponent().is_some() {
        e.with_note("parametric tail")
    } else {
        e.with_note("finite on the explicit support")
    }
}

/// Positive recurrent iff both means are finite; null recurrent when exactly
/// one is and the Green series diverges; transient when both `L²` integrals
/// are finite. Anything else is left undetermined with the evidence attached.
pub fn classify_oscillating(spec: &ConcentratedSpec, tol: f64) -> Result<ClassificationReport> {
    let inputs = vec![
        InputEcho::of("mu_plus", &spec.mu_plus_law),
        InputEcho::of("nu_minus", &spec.nu_minus_law),
    ];
    let mut ev = vec![
        Evidence::new("mass-mu-plus", spec.mu_plus_law.total_mass(), 0.0, "exact"),
        Evidence::new("mass-nu-minus", spec.nu_minus_law.total_mass(), 0.0, "exact"),
    ];
    if spec.defective_factor {
        return Ok(ClassificationReport::new(Regime::Transient, ev, inputs));
    }
    ev.push(mean_evidence("mu-plus", &spec.mu_plus_law));
    ev.push(mean_evidence("nu-minus", &spec.nu_minus_law));
    let [Some(a), Some(b)] = spec.finite_mean else {
        ev.push(
            Evidence::new("ladder-mean", f64::NAN, f64::NAN, "tail exponent")
                .with_note("a ladder-height mean is not decided by the tail exponent"),
        );
        return Ok(ClassificationReport::new(Regime::Undetermined, ev, inputs));
    };
    if !(a && b) && spec.exact != [true, true] {
        ev.push(
            Evidence::new("ladder-window", f64::NAN, f64::NAN, "ladder recursion")
                .with_note("an infinite-mean factor is only known on a finite window"),
        );
        return Ok(ClassificationReport::new(Regime::Undetermined, ev, inputs));
    }
    let regime = match [a, b] {
        [true, true] => Regime::PositiveRecurrent,
        [true, false] | [false, true] => {
            let g = green_z(spec, GreenMode::Series, GreenBudget { tol, ..GreenBudget::default() })?;
            ev.push(Evidence::new("green-z-series", g.value, g.error, "renewal series").with_note(g.note));
            if g.verdict == Verdict::Divergent {
                Regime::NullRecurrent
            } else {
                Regime::Undetermined
            }
        }
        [false, false] => {
            let a = inverse_square_integral(&spec.mu_plus_law, tol);
            let b = inverse_square_integral(&spec.nu_minus_law, tol);
            ev.push(Evidence::new("l2-mu-plus", a.value, a.abs_error_estimate, "shell quadrature"));
            ev.push(Evidence::new("l2-nu-minus", b.value, b.abs_error_estimate, "shell quadrature"));
            if a.is_finite() && b.is_finite() {
                Regime::Transient
            } else {
                let g = green_z(spec, GreenMode::FourierS, GreenBudget { tol, ..GreenBudget::default() })?;
                ev.push(
                    Evidence::new("pairing-s-trend", g.value, g.error, "regularized Fourier pairing")
                        .with_note(g.note),
                );
                Regime::Undetermined
            }
        }
    };
    Ok(ClassificationReport::new(regime, ev, inputs))
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    pub trajectories: u64,
    pub steps: usize,
    /// Paths cut short by a jump beyond a materialized window.
    pub censored: u64,
    /// Paths whose lists failed the admissibility test or did not reconstruct.
    pub failures: u64,
    pub first_failure: Option<u64>,
}

/// Simulates chain paths from 0, splits them into jump lists and rebuilds them.
pub fn round_trip_check(spec: &ConcentratedSpec, trajectories: u64, steps: usize, seed: u64) -> Result<RoundTrip> {
    let sampler = WalkSampler::new(&spec.walk());
    let outcomes: Vec<(bool, bool)> = (0..trajectories)
        .into_par_iter()
        .map(|i| {
            let t = run_path(&sampler, 0, steps, &mut trial_rng(seed, i));
            let ok = decompose_trajectory(&t.positions).is_ok_and(|l| {
                l.admissible_for(*t.positions.last().unwrap())
                    && reconstruct_trajectory(&l).is_ok_and(|r| r == t.positions)
            });
            (ok, t.censored.is_some())
        })
        .collect();
    Ok(RoundTrip {
        trajectories,
        steps,
        censored: outcomes.iter().filter(|o| o.1).count() as u64,
        failures: outcomes.iter().filter(|o| !o.0).count() as u64,
        first_failure: outcomes.iter().position(|o| !o.0).map(|i| i as u64),
    })
}
