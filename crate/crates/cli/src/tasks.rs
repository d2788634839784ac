use anyhow::{bail, Result};
use greenwalk_core::fourier::{
    chung_fuchs_limit, classify_homogeneous, default_s_schedule, fourier_coefficient, identity_check, Identity, Kernel,
};
use greenwalk_core::greens::green_finite;
use greenwalk_core::measure::{LatticeMeasure, Law};
use greenwalk_core::montecarlo::{estimate_event, Estimate, Event, SimulationConfig};
use greenwalk_core::oscillating::{
    build_concentrated, classify_oscillating, green_z, intersection_estimator, round_trip_check, transition_check,
    BuildOptions, ConcentratedSpec, DIAGNOSTIC_S, GreenBudget, GreenMode, Provenance, RoundTrip, TransitionCheck,
};
use greenwalk_core::renewal::renewal_sequence;
use greenwalk_core::report::{ClassificationReport, Regime};
use greenwalk_core::wiener_hopf::{
    factorize, ladder_factor_auto, mass_criterion, Discrepancy, FactorizationResult, MassTrend,
};
use serde::Serialize;

use crate::config::{Defaults, EventConfig, GreenModeConfig, TaskConfig, Walk};

/// What a task hands back to the runner.
pub struct Outcome {
    pub result: serde_value::Value,
    pub summary: String,
    pub undetermined: bool,
}

fn outcome<T: Serialize>(r: &T, summary: String, undetermined: bool) -> Result<Outcome> {
    Ok(Outcome {
        result: crate::emit::to_value(r)?,
        summary,
        undetermined,
    })
}

fn concentrated(walk: &Walk) -> Result<ConcentratedSpec> {
    Ok(match walk {
        Walk::Homogeneous(_) => bail!("this task needs an oscillating or concentrated walk"),
        Walk::Oscillating { mu, nu } => build_concentrated(mu, nu, BuildOptions::default())?,
        Walk::Concentrated { mu_plus, nu_minus } => ConcentratedSpec::given(mu_plus.clone(), nu_minus.clone())?,
    })
}

#[derive(Serialize)]
struct ConcentratedEcho {
    mu_plus: LatticeMeasure,
    nu_minus: LatticeMeasure,
    provenance: Provenance,
    defective_factor: bool,
    finite_mean: [Option<bool>; 2],
    exact: [bool; 2],
}

impl From<&ConcentratedSpec> for ConcentratedEcho {
    fn from(s: &ConcentratedSpec) -> Self {
        Self {
            mu_plus: s.mu_plus.clone(),
            nu_minus: s.nu_minus.clone(),
            provenance: s.provenance.clone(),
            defective_factor: s.defective_factor,
            finite_mean: s.finite_mean,
            exact: s.exact,
        }
    }
}

#[derive(Serialize)]
struct ClassifyResult {
    #[serde(flatten)]
    report: ClassificationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    concentrated: Option<ConcentratedEcho>,
}

fn classify(walk: &Walk, tol: f64) -> Result<Outcome> {
    let (report, concentrated) = match walk {
        Walk::Homogeneous(l) => (classify_homogeneous(l, tol)?, None),
        other => {
            let spec = concentrated(other)?;
            (classify_oscillating(&spec, tol)?, Some(ConcentratedEcho::from(&spec)))
        }
    };
    let regime = report.regime;
    let summary = verdict_text(regime);
    outcome(&ClassifyResult { report, concentrated }, summary, regime == Regime::Undetermined)
}

#[derive(Serialize)]
struct Quantity {
    value: f64,
    error: f64,
    provenance: String,
}

#[derive(Serialize)]
struct FactorRow {
    side: &'static str,
    k: i64,
    ladder: f64,
    exponential: f64,
    monte_carlo: f64,
    monte_carlo_radius: f64,
}

#[derive(Serialize)]
struct MassSummary {
    implied_mass: f64,
    trend: MassTrend,
    terms: usize,
    heuristic: bool,
}

#[derive(Serialize)]
struct SideSummary {
    side: &'static str,
    s: f64,
    discrepancy: Discrepancy,
    tolerance: f64,
    agree: bool,
    ladder_unescaped: f64,
    exponential_truncation: f64,
    mass_at_s: Quantity,
    mass_at_one: Quantity,
    mass_criterion: MassSummary,
}

#[derive(Serialize)]
struct FactorizeResult {
    sides: Vec<SideSummary>,
    table: Vec<FactorRow>,
    agree: bool,
}

const MASS_TERMS: usize = 512;
/// Atoms below this in all three routes are left out of the table.
const TABLE_FLOOR: f64 = 1e-14;

fn factor_side(side: &'static str, law: &Law, s: f64, trials: u64, seed: u64, table: &mut Vec<FactorRow>) -> Result<SideSummary> {
    // the ν₋ side is factored as the entrance of the reflected walk into ℕ*
    let r: FactorizationResult = factorize(law, s, trials, seed)?;
    let sign = if side == "nu_minus" { -1 } else { 1 };
    let lo = r.via_ladder.support_min().min(r.via_exponential.support_min()).min(r.via_monte_carlo.support_min());
    let hi = r.via_ladder.support_max().max(r.via_exponential.support_max()).max(r.via_monte_carlo.support_max());
    for k in lo.max(1)..=hi {
        let radius = r.monte_carlo_radii.iter().find(|x| x.0 == k).map_or(0.0, |x| x.1);
        let vals = [r.via_ladder.get(k), r.via_exponential.get(k), r.via_monte_carlo.get(k)];
        if vals.iter().all(|&v| v < TABLE_FLOOR) {
            continue;
        }
        table.push(FactorRow {
            side,
            k: sign * k,
            ladder: r.via_ladder.get(k),
            exponential: r.via_exponential.get(k),
            monte_carlo: r.via_monte_carlo.get(k),
            monte_carlo_radius: radius,
        });
    }
    let at_one = ladder_factor_auto(law, 1.0)?;
    let mc = mass_criterion(law, MASS_TERMS)?;
    // mass that drifts away for good is not an error once the sum has converged
    let at_one_error = if mc.trend == MassTrend::Convergent {
        at_one.lost
    } else {
        at_one.unescaped + at_one.lost
    };
    Ok(SideSummary {
        side,
        s,
        mass_at_s: Quantity {
            value: r.via_ladder.mass(),
            error: r.ladder_unescaped,
            provenance: "ladder iteration".into(),
        },
        mass_at_one: Quantity {
            value: at_one.factor.mass(),
            error: at_one_error,
            provenance: format!("ladder iteration at s=1, {} steps", at_one.steps),
        },
        mass_criterion: MassSummary {
            implied_mass: mc.implied_mass,
            trend: mc.trend,
            terms: mc.terms.len(),
            heuristic: mc.heuristic,
        },
        discrepancy: r.discrepancy,
        tolerance: r.tolerance,
        agree: r.agree,
        ladder_unescaped: r.ladder_unescaped,
        exponential_truncation: r.exponential_truncation,
    })
}

fn factorize_task(walk: &Walk, s: f64, trials: u64, seed: u64) -> Result<Outcome> {
    let mut table = Vec::new();
    let sides = match walk {
        Walk::Homogeneous(l) => vec![factor_side("mu_plus", l, s, trials, seed, &mut table)?],
        Walk::Oscillating { mu, nu } => vec![
            factor_side("mu_plus", mu, s, trials, seed, &mut table)?,
            factor_side("nu_minus", &nu.clone().reflected(), s, trials, seed.wrapping_add(1), &mut table)?,
        ],
        Walk::Concentrated { .. } => bail!("factorize needs step laws, not a concentrated walk"),
    };
    let agree = sides.iter().all(|x| x.agree);
    let summary = sides
        .iter()
        .map(|x| format!("{} mass {:.6} ({})", x.side, x.mass_at_one.value, if x.agree { "agree" } else { "disagree" }))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(&FactorizeResult { sides, table, agree }, summary, false)
}

#[derive(Serialize)]
struct GreenRow {
    mode: GreenModeConfig,
    value: f64,
    error: f64,
    verdict: String,
    provenance: String,
    note: String,
}

#[derive(Serialize)]
struct GreenResult {
    quantity: &'static str,
    table: Vec<GreenRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    concentrated: Option<ConcentratedEcho>,
}

fn verdict_text<T: Serialize>(v: T) -> String {
    serde_json::to_value(v).ok().and_then(|x| x.as_str().map(String::from)).unwrap_or_default()
}

pub struct GreenParams {
    pub modes: Option<Vec<GreenModeConfig>>,
    pub horizon: usize,
    pub series_log2: u32,
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
}

fn green_task(walk: &Walk, p: GreenParams) -> Result<Outcome> {
    use GreenModeConfig as M;
    let spec = match walk {
        Walk::Homogeneous(_) => None,
        other => Some(concentrated(other)?),
    };
    let modes = p.modes.clone().unwrap_or_else(|| match &spec {
        None => vec![M::Dp, M::ChungFuchs],
        Some(s) if s.is_mirrored() => vec![M::Dp, M::Series, M::FourierS, M::Symmetric],
        Some(_) => vec![M::Dp, M::Series, M::FourierS],
    });
    let budget = GreenBudget {
        series_log2: p.series_log2,
        tol: p.tol,
        ..GreenBudget::default()
    };
    let mut table = Vec::new();
    for mode in modes {
        let row = match (mode, &spec, walk) {
            (M::Dp, _, _) => {
                let ws = match &spec {
                    Some(s) => s.walk(),
                    None => walk.spec()?,
                };
                let g = green_finite(&ws, p.horizon, 0)?;
                GreenRow {
                    mode,
                    value: g.get(0),
                    error: g.lost,
                    verdict: "finite-horizon".into(),
                    provenance: format!("forward dynamic programming, N={}", p.horizon),
                    note: "occupation of 0 over steps 0..N-1; error is the lost occupation".into(),
                }
            }
            (M::ChungFuchs, None, Walk::Homogeneous(l)) => {
                let c = chung_fuchs_limit(l, &default_s_schedule(), p.tol)?;
                GreenRow {
                    mode,
                    value: c.limit,
                    error: c.limit_error,
                    verdict: verdict_text(c.verdict),
                    provenance: "Fourier Green function at s=1-2^-k, extrapolated".into(),
                    note: c.convergence.note.clone(),
                }
            }
            (M::Intersection, Some(s), _) => {
                let e = intersection_estimator(s, p.trials, p.horizon, p.seed)?;
                GreenRow {
                    mode,
                    value: e.mean,
                    error: e.radius,
                    verdict: "lower-bound".into(),
                    provenance: format!("range intersection Monte Carlo, {} trials, horizon {}", e.trials, p.horizon),
                    note: format!("{} trials still open at the horizon", e.at_horizon),
                }
            }
            (M::Series | M::FourierS | M::Symmetric, Some(s), _) => {
                let gm = match mode {
                    M::Series => GreenMode::Series,
                    M::FourierS => GreenMode::FourierS,
                    _ => GreenMode::Symmetric,
                };
                let g = green_z(s, gm, budget)?;
                let provenance = match gm {
                    GreenMode::Series => format!("renewal series, M=2^{}", p.series_log2),
                    GreenMode::FourierS => "regularized Fourier pairing, s=1-2^-k".into(),
                    GreenMode::Symmetric => "quadrature of |1 - mu_plus^|^-2".into(),
                };
                GreenRow {
                    mode,
                    value: g.value,
                    error: g.error,
                    verdict: verdict_text(g.verdict),
                    provenance,
                    note: g.note,
                }
            }
            (m, _, _) => bail!("green mode {} does not apply to {}", verdict_text(m), walk.label()),
        };
        table.push(row);
    }
    let summary = table
        .iter()
        .map(|r| format!("{}={}", verdict_text(r.mode), crate::emit::format_f64(r.value)))
        .collect::<Vec<_>>()
        .join(" ");
    let r = GreenResult {
        quantity: if spec.is_some() { "G^Z(0,0)" } else { "G(0,0)" },
        table,
        concentrated: spec.as_ref().map(ConcentratedEcho::from),
    };
    outcome(&r, summary, false)
}

#[derive(Serialize)]
struct IdentityRow {
    identity: String,
    x: Option<i64>,
    lhs: f64,
    lhs_error: f64,
    rhs: f64,
    gap: f64,
    tol: f64,
    pass: bool,
    provenance: String,
}

#[derive(Serialize)]
struct IdentitiesResult {
    law: String,
    table: Vec<IdentityRow>,
    all_pass: bool,
}

const COEFFICIENT_TOL: f64 = 1e-6;

fn identities_task(walk: &Walk, tol: f64, coefficients: i64) -> Result<Outcome> {
    let law = match walk {
        Walk::Homogeneous(l) => l.clone(),
        other => concentrated(other)?.mu_plus_law,
    };
    let mut table = Vec::new();
    for (which, t) in [(Identity::Herglotz, tol), (Identity::Varia, 10.0 * tol)] {
        let r = identity_check(&law, which, t)?;
        table.push(IdentityRow {
            identity: verdict_text(r.identity),
            x: None,
            lhs: r.lhs,
            lhs_error: r.lhs_error,
            rhs: r.rhs,
            gap: r.gap,
            tol: r.tol,
            pass: r.pass,
            provenance: "shell quadrature vs closed form".into(),
        });
    }
    if coefficients > 0 {
        let u = renewal_sequence(&law, coefficients as usize)?;
        let inv_mean = if law.has_finite_mean() { 1.0 / law.mean() } else { 0.0 };
        for x in 1..=coefficients {
            for (kind, name, rhs) in [
                (Kernel::Cosine, "renewal-cosine", u[x as usize] - inv_mean),
                (Kernel::Sine, "renewal-sine", u[x as usize]),
            ] {
                let q = fourier_coefficient(&law, x, kind, 1e-2 * COEFFICIENT_TOL)?;
                let gap = (q.value - rhs).abs();
                table.push(IdentityRow {
                    identity: name.into(),
                    x: Some(x),
                    lhs: q.value,
                    lhs_error: q.abs_error_estimate,
                    rhs,
                    gap,
                    tol: COEFFICIENT_TOL,
                    pass: q.is_finite() && gap <= COEFFICIENT_TOL,
                    provenance: "Fourier coefficient quadrature vs renewal recursion".into(),
                });
            }
        }
    }
    let all_pass = table.iter().all(|r| r.pass);
    let failed = table.iter().filter(|r| !r.pass).count();
    let summary = format!("{} checks, {failed} failed", table.len());
    outcome(&IdentitiesResult { law: law.label(), table, all_pass }, summary, false)
}

#[derive(Serialize)]
struct SimulateResult {
    event: Event,
    start: i64,
    horizon: usize,
    seed: u64,
    estimate: Estimate,
    provenance: &'static str,
}

fn simulate_task(walk: &Walk, event: EventConfig, start: i64, trials: u64, horizon: usize, seed: u64) -> Result<Outcome> {
    let event = match event {
        EventConfig::Return => Event::Return,
        EventConfig::Hit { y } => Event::Hit { y },
        EventConfig::Occupation { at, before } => Event::Occupation { at, before },
    };
    let estimate = estimate_event(&SimulationConfig {
        walk: walk.spec()?,
        start,
        trials,
        horizon,
        seed,
        event,
    })?;
    let summary = format!(
        "{} ± {}",
        crate::emit::format_f64(estimate.mean),
        crate::emit::format_f64(estimate.radius)
    );
    let r = SimulateResult {
        event,
        start,
        horizon,
        seed,
        estimate,
        provenance: "Monte Carlo, per-trial ChaCha8 streams, 3 standard errors",
    };
    outcome(&r, summary, false)
}

#[derive(Serialize)]
struct TransitionResult {
    formula_vs_dp: TransitionCheck,
    tolerance: f64,
    round_trip: RoundTrip,
    pass: bool,
    concentrated: ConcentratedEcho,
}

const TRANSITION_TOL: f64 = 1e-12;

pub struct TransitionParams {
    pub steps: usize,
    pub y_range: i64,
    pub trajectories: u64,
    pub length: usize,
    pub seed: u64,
}

fn transition_task(walk: &Walk, p: TransitionParams) -> Result<Outcome> {
    let spec = concentrated(walk)?;
    let check = transition_check(&spec, &[-2, 0, 1, 3], p.steps, p.y_range)?;
    let rt = round_trip_check(&spec, p.trajectories, p.length, p.seed)?;
    let pass = check.max_gap <= TRANSITION_TOL && rt.failures == 0;
    let summary = format!(
        "max gap {}, {} of {} round trips failed",
        crate::emit::format_f64(check.max_gap),
        rt.failures,
        rt.trajectories
    );
    let r = TransitionResult {
        formula_vs_dp: check,
        tolerance: TRANSITION_TOL,
        round_trip: rt,
        pass,
        concentrated: ConcentratedEcho::from(&spec),
    };
    outcome(&r, summary, false)
}

pub fn run_task(task: &TaskConfig, walk: &Walk, d: &Defaults) -> Result<Outcome> {
    match task {
        TaskConfig::Classify { tol, .. } => classify(walk, tol.unwrap_or(d.tol)),
        TaskConfig::Factorize { s, trials, seed, .. } => factorize_task(
            walk,
            s.unwrap_or(DIAGNOSTIC_S),
            trials.unwrap_or(d.trials),
            seed.unwrap_or(d.seed),
        ),
        TaskConfig::Green {
            modes,
            horizon,
            series_log2,
            trials,
            seed,
            tol,
            ..
        } => green_task(
            walk,
            GreenParams {
                modes: modes.clone(),
                horizon: horizon.unwrap_or(d.horizon),
                series_log2: series_log2.unwrap_or(GreenBudget::default().series_log2),
                trials: trials.unwrap_or(d.trials),
                seed: seed.unwrap_or(d.seed),
                tol: tol.unwrap_or(d.tol),
            },
        ),
        TaskConfig::Identities { tol, coefficients, .. } => {
            identities_task(walk, tol.unwrap_or(1e-6), coefficients.unwrap_or(0))
        }
        TaskConfig::Simulate {
            event,
            start,
            trials,
            horizon,
            seed,
            ..
        } => simulate_task(
            walk,
            *event,
            start.unwrap_or(0),
            trials.unwrap_or(d.trials),
            horizon.unwrap_or(d.horizon),
            seed.unwrap_or(d.seed),
        ),
        TaskConfig::TransitionCheck {
            steps,
            y_range,
            trajectories,
            length,
            seed,
            ..
        } => transition_task(
            walk,
            TransitionParams {
                steps: steps.unwrap_or(20),
                y_range: y_range.unwrap_or(20),
                trajectories: trajectories.unwrap_or(10_000),
                length: length.unwrap_or(1_000),
                seed: seed.unwrap_or(d.seed),
            },
        ),
    }
}
