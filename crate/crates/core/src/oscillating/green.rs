//! `G^Z(0,0)` of the concentrated chain by three routes, and the
//! range-intersection Monte Carlo estimate.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::extrapolate::{aitken, richardson_with_error};
use crate::fourier::{inverse_square_integral, regularized_pairing};
use crate::montecarlo::{trial_rng, Draw, Estimate, Sampler};
use crate::quad::{Verdict, DIVERGENCE_CEILING};
use crate::renewal::renewal_sequence;

use super::ConcentratedSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GreenMode {
    /// `Σ_m G^{μ₊}(0,m) G^{ν₋}(0,−m)` from the two renewal sequences.
    Series,
    /// `s ↑ 1` limit of the regularized Fourier pairing.
    FourierS,
    /// `(1/2π)∫|1 − μ̂₊|^{−2}` when `ν₋` mirrors `μ₊`.
    Symmetric,
}

#[derive(Clone, Copy, Debug)]
pub struct GreenBudget {
    /// Series length is `2^series_log2`.
    pub series_log2: u32,
    /// Fourier mode uses `s_k = 1 − 2^{−k}` for `k ≤ s_levels`.
    pub s_levels: u32,
    pub tol: f64,
}

impl Default for GreenBudget {
    fn default() -> Self {
        Self {
            series_log2: 20,
            s_levels: 30,
            tol: 1e-10,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GreenZ {
    pub mode: GreenMode,
    pub value: f64,
    pub error: f64,
    pub verdict: Verdict,
    /// `(M, partial sum)` or `(k, value at s_k)` checkpoints.
    pub trend: Vec<(f64, f64)>,
    pub note: String,
}

pub fn green_z(spec: &ConcentratedSpec, mode: GreenMode, budget: GreenBudget) -> Result<GreenZ> {
    match mode {
        GreenMode::Series => series(spec, budget),
        GreenMode::FourierS => fourier_s(spec, budget),
        GreenMode::Symmetric => symmetric(spec, budget),
    }
}

fn series(spec: &ConcentratedSpec, budget: GreenBudget) -> Result<GreenZ> {
    let m = 1usize << budget.series_log2;
    let u = renewal_sequence(&spec.mu_plus_law, m)?;
    let v = renewal_sequence(&spec.nu_minus_law.clone().reflected(), m)?;
    let mut sums = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    for (a, b) in u.iter().zip(&v) {
        acc += a * b;
        sums.push(acc);
    }
    let trend: Vec<(f64, f64)> = (4..=budget.series_log2)
        .map(|k| ((1usize << k) as f64, sums[1 << k]))
        .collect();
    // local decay exponent of the terms u_m v_m
    let w = |i: usize| u[i] * v[i];
    let beta = if w(m) > 0.0 && w(m / 2) > 0.0 {
        (w(m / 2) / w(m)).log2()
    } else {
        f64::INFINITY
    };
    let last = sums[m];
    if last > DIVERGENCE_CEILING || beta < 1.05 {
        return Ok(GreenZ {
            mode: GreenMode::Series,
            value: f64::INFINITY,
            error: f64::INFINITY,
            verdict: Verdict::Divergent,
            trend,
            note: format!("terms decay like m^-{beta:.3}"),
        });
    }
    if !beta.is_finite() || beta > 30.0 || w(m) < 1e-300 {
        return Ok(GreenZ {
            mode: GreenMode::Series,
            value: last,
            error: w(m) * m as f64,
            verdict: Verdict::Converged,
            trend,
            note: "terms vanish".into(),
        });
    }
    let p = beta - 1.0;
    let corr = match (spec.mu_plus_law.tail_exponent(), spec.nu_minus_law.tail_exponent()) {
        (Some(a), Some(b)) => 1.0 - a.max(b),
        (Some(a), None) | (None, Some(a)) => 1.0 - a,
        (None, None) => 1.0,
    };
    let mut powers = vec![p, p + corr, p + 1.0];
    powers.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let pts: Vec<(f64, f64)> = (0..=powers.len())
        .rev()
        .map(|j| {
            let mm = m >> j;
            (mm as f64, sums[mm])
        })
        .collect();
    let ex = richardson_with_error(&pts, &powers);
    // error floor: the size of the fitted leading tail
    let tail = ex.value - last;
    Ok(GreenZ {
        mode: GreenMode::Series,
        value: ex.value,
        error: ex.error.max(1e-3 * tail.abs()),
        verdict: Verdict::Converged,
        trend,
        note: format!("power-law tail fit with exponents {powers:?}"),
    })
}

fn fourier_s(spec: &ConcentratedSpec, budget: GreenBudget) -> Result<GreenZ> {
    let mut trend = Vec::new();
    let mut values = Vec::new();
    for k in 1..=budget.s_levels {
        let s = 1.0 - 0.5f64.powi(k as i32);
        let q = regularized_pairing(&spec.mu_plus_law, &spec.nu_minus_law, s, budget.tol)?;
        trend.push((k as f64, q.value));
        values.push(q.value);
    }
    let n = values.len();
    let last = values[n - 1];
    let growing = n >= 3 && {
        let d1 = values[n - 2] - values[n - 3];
        let d2 = values[n - 1] - values[n - 2];
        d1 > 0.0 && d2 > 0.0 && d2 >= 0.98 * d1
    };
    if growing || last > DIVERGENCE_CEILING {
        return Ok(GreenZ {
            mode: GreenMode::FourierS,
            value: f64::INFINITY,
            error: f64::INFINITY,
            verdict: Verdict::Divergent,
            trend,
            note: "regularized values keep growing".into(),
        });
    }
    let acc = aitken(&values).unwrap_or(last);
    let err = (acc - last).abs().max((values[n - 1] - values[n - 2]).abs());
    Ok(GreenZ {
        mode: GreenMode::FourierS,
        value: acc,
        error: err,
        verdict: Verdict::Converged,
        trend,
        note: "Aitken extrapolation in s".into(),
    })
}

fn symmetric(spec: &ConcentratedSpec, budget: GreenBudget) -> Result<GreenZ> {
    if !spec.is_mirrored() {
        return precondition("symmetric mode needs ν₋(A) = μ₊(−A)");
    }
    let q = inverse_square_integral(&spec.mu_plus_law, budget.tol);
    let (value, error) = if q.is_finite() {
        (q.value, q.abs_error_estimate)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(GreenZ {
        mode: GreenMode::Symmetric,
        value,
        error,
        verdict: q.verdict,
        trend: Vec::new(),
        note: "dyadic-shell quadrature of |1 − μ̂₊|^-2".into(),
    })
}

/// Positions `0 = S_0 < S_1 < ...` of an increasing walk that stay `≤ cap`,
/// for at most `horizon` steps. A tail jump leaves `[0, cap]` for good.
fn increasing_range<R: rand::Rng>(s: &Sampler, horizon: usize, cap: i64, rng: &mut R) -> (Vec<i64>, bool) {
    let mut out = vec![0];
    let mut z = 0i64;
    for _ in 0..horizon {
        match s.draw(rng) {
            Draw::Jump(j) => {
                z += j;
                if z > cap {
                    return (out, false);
                }
                out.push(z);
            }
            Draw::Tail | Draw::Killed => return (out, false),
        }
    }
    (out, true)
}

fn count_common(a: &[i64], b: &[i64]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Expected size of `{S_k^{μ₊}} ∩ {−S_l^{ν₋}}` within `[0, W]`, where `W` is
/// the smaller materialized window. A lower bound for `G^Z(0,0)`.
pub fn intersection_estimator(spec: &ConcentratedSpec, trials: u64, horizon: usize, seed: u64) -> Result<Estimate> {
    if trials < 1 {
        return precondition("trials must be at least 1");
    }
    let up = Sampler::from_measure(&spec.mu_plus);
    let down = Sampler::from_measure(&spec.nu_minus.reflect());
    // windowed laws censor jumps beyond their window, so count only inside it
    let cap = [spec.mu_plus_law.window(), spec.nu_minus_law.window()]
        .into_iter()
        .flatten()
        .min()
        .unwrap_or(i64::MAX);
    let runs: Vec<(f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (a, open_a) = increasing_range(&up, horizon, cap, &mut rng);
            let (b, open_b) = increasing_range(&down, horizon, cap, &mut rng);
            (count_common(&a, &b) as f64, open_a && open_b)
        })
        .collect();
    let samples: Vec<f64> = runs.iter().map(|r| r.0).collect();
    let at_horizon = runs.iter().filter(|r| r.1).count() as u64;
    Ok(Estimate::from_samples(&samples, 0, at_horizon))
}
