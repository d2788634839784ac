use serde::Serialize;

use crate::error::{precondition, Result};
use crate::measure::{LatticeMeasure, Side};

use super::ConcentratedSpec;

#[derive(Clone, Debug, Serialize)]
pub struct InvariantMeasure {
    pub window: i64,
    /// `π` on `[−window, window]`.
    pub pi: LatticeMeasure,
    /// `Σ_{|y| ≤ window} |(πP)(y) − π(y)|`.
    pub residual: f64,
    /// Mass of `π` on the window sent outside it by one step.
    pub leakage: f64,
    /// Jump mass beyond the materialized windows, which the residual cannot see.
    pub tail_bound: f64,
    pub window_mass: f64,
    /// `E^{μ₊}X − E^{ν₋}X`, the total mass of `π`.
    pub expected_mass: f64,
}

fn pi_at(spec: &ConcentratedSpec, y: i64) -> f64 {
    if y >= 1 {
        spec.mu_plus_law.upper_tail(y)
    } else {
        spec.nu_minus_law.lower_tail(y - 1)
    }
}

fn pi_on(spec: &ConcentratedSpec, lo: i64, hi: i64) -> LatticeMeasure {
    LatticeMeasure::from_raw(lo, (lo..=hi).map(|y| pi_at(spec, y)).collect(), 0.0)
}

/// One step of the chain applied to a measure.
fn push(spec: &ConcentratedSpec, m: &LatticeMeasure) -> Result<LatticeMeasure> {
    let up = m.restrict(Side::NonPositive).convolve(&spec.mu_plus)?;
    let down = m.restrict(Side::Positive).convolve(&spec.nu_minus)?;
    let lo = up.support_min().min(down.support_min());
    let hi = up.support_max().max(down.support_max());
    Ok(LatticeMeasure::from_raw(
        lo,
        (lo..=hi).map(|k| up.get(k) + down.get(k)).collect(),
        0.0,
    ))
}

pub fn invariant_measure(spec: &ConcentratedSpec, window: i64) -> Result<InvariantMeasure> {
    if window < 0 {
        return precondition("window must be nonnegative");
    }
    for (name, m) in [("mu_plus", spec.mu_plus_law.total_mass()), ("nu_minus", spec.nu_minus_law.total_mass())] {
        if (m - 1.0).abs() > 1e-9 {
            return precondition(format!("{name} has mass {m}; the invariant measure needs probability factors"));
        }
    }
    let reach_up = spec.mu_plus.support_max();
    let reach_down = -spec.nu_minus.support_min();
    let wide = pi_on(spec, -window - reach_up, window + reach_down);
    let image = push(spec, &wide)?;
    let residual = (-window..=window).map(|y| (image.get(y) - pi_at(spec, y)).abs()).sum();

    let pi = pi_on(spec, -window, window);
    let inner = push(spec, &pi)?;
    let kept: f64 = (-window..=window).map(|y| inner.get(y)).sum();
    let window_mass = pi.mass();
    let tail_bound = spec.mu_plus.tail_mass() * pi.restrict(Side::NonPositive).mass()
        + spec.nu_minus.tail_mass() * pi.restrict(Side::Positive).mass();
    Ok(InvariantMeasure {
        window,
        pi,
        residual,
        leakage: (window_mass - kept).max(0.0),
        tail_bound,
        window_mass,
        expected_mass: spec.mu_plus_law.mean() - spec.nu_minus_law.mean(),
    })
}
