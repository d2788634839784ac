//! `P_x(Z_n = y)` from the jump-list decomposition.
//!
//! A path with `k` upward and `n − k` downward jumps ending at `y` is
//! determined by its lists, so the probability is a sum over `k` of
//! convolutions of the two factors, with the last upward jump `≥ y` and
//! the last downward jump `≤ y − 1`.

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::greens::{Chain, Dist};
use crate::measure::{LatticeMeasure, Side};

use super::ConcentratedSpec;

/// `m^{∗0}, ..., m^{∗n}` on their explicit windows.
fn powers(m: &LatticeMeasure, n: usize) -> Result<Vec<LatticeMeasure>> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(LatticeMeasure::dirac(0));
    for i in 1..=n {
        let next = out[i - 1].convolve(m)?;
        out.push(next);
    }
    Ok(out)
}

fn keep_at_least(m: &LatticeMeasure, y: i64) -> LatticeMeasure {
    let shifted = LatticeMeasure::from_raw(m.support_min() - y + 1, m.weights().to_vec(), 0.0);
    let kept = shifted.restrict(Side::Positive);
    LatticeMeasure::from_raw(kept.support_min() + y - 1, kept.weights().to_vec(), 0.0)
}

fn keep_at_most(m: &LatticeMeasure, y: i64) -> LatticeMeasure {
    let shifted = LatticeMeasure::from_raw(m.support_min() - y, m.weights().to_vec(), 0.0);
    let kept = shifted.restrict(Side::NonPositive);
    LatticeMeasure::from_raw(kept.support_min() + y, kept.weights().to_vec(), 0.0)
}

/// Sum over `a` of `p(a)·q(d − a)`.
fn pair_at(p: &LatticeMeasure, q: &LatticeMeasure, d: i64) -> f64 {
    p.iter().map(|(a, w)| w * q.get(d - a)).sum()
}

pub fn transition_probability(spec: &ConcentratedSpec, x: i64, y: i64, n: usize) -> Result<f64> {
    Ok(transition_row(spec, x, &[y], n)?[0])
}

/// `P_x(Z_n = y)` for several endpoints, sharing the convolution powers.
pub fn transition_row(spec: &ConcentratedSpec, x: i64, ys: &[i64], n: usize) -> Result<Vec<f64>> {
    if spec.mu_plus.is_zero() && spec.nu_minus.is_zero() && n > 0 {
        return precondition("both factors are zero");
    }
    let mu = &spec.mu_plus;
    let nu = &spec.nu_minus;
    let mp = powers(mu, n.saturating_sub(1))?;
    let np = powers(nu, n.saturating_sub(1))?;
    let mut out = Vec::with_capacity(ys.len());
    for &y in ys {
        let d = y - x;
        if n == 0 {
            out.push(if d == 0 { 1.0 } else { 0.0 });
            continue;
        }
        let last_up = keep_at_least(mu, y);
        let last_down = keep_at_most(nu, y - 1);
        let mut total = 0.0;
        for k in 0..=n {
            let j = n - k;
            let a = if k == 0 { LatticeMeasure::dirac(0) } else { mp[k - 1].convolve(&last_up)? };
            let b = if j == 0 { LatticeMeasure::dirac(0) } else { np[j - 1].convolve(&last_down)? };
            if a.is_zero() || b.is_zero() {
                continue;
            }
            total += pair_at(&a, &b, d);
        }
        out.push(total);
    }
    Ok(out)
}

/// Largest gap between the formula and forward DP of the chain.
#[derive(Clone, Debug, Serialize)]
pub struct TransitionCheck {
    pub starts: Vec<i64>,
    pub max_steps: usize,
    pub y_range: i64,
    pub max_gap: f64,
    /// `(x, y, n)` where the gap is largest.
    pub worst: (i64, i64, usize),
}

pub fn transition_check(spec: &ConcentratedSpec, starts: &[i64], max_steps: usize, y_range: i64) -> Result<TransitionCheck> {
    let chain = Chain::new(&spec.walk());
    let ys: Vec<i64> = (-y_range..=y_range).collect();
    let mut max_gap = 0.0;
    let mut worst = (0, 0, 0);
    for &x in starts {
        let mut d = Dist::delta(x);
        for n in 0..=max_steps {
            if n > 0 {
                d = d.step(&chain)?;
            }
            let row = transition_row(spec, x, &ys, n)?;
            for (&y, p) in ys.iter().zip(&row) {
                let gap = (d.get(y) - p).abs();
                if gap > max_gap {
                    max_gap = gap;
                    worst = (x, y, n);
                }
            }
        }
    }
    Ok(TransitionCheck {
        starts: starts.to_vec(),
        max_steps,
        y_range,
        max_gap,
        worst,
    })
}
