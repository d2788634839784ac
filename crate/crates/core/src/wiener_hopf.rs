//! The entrance law `μ₊` of a walk into `ℕ*`, by three independent routes:
//! the ladder recursion `η_{n+1} = s(η_n)⁻ ∗ μ`, the exponential formula
//! `δ₀ − μ₊ = exp(−L⁺)` with `L = Σ sⁿμⁿ/n`, and simulation.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{precondition, Result};
use crate::measure::{
    convolve_slices, exp_series_below, log_series, log_tail_bound, FftConvolver, LatticeMeasure, Law, Side,
};
use crate::montecarlo::{trial_rng, Draw, Sampler};

const TRIM: f64 = 1e-30;
pub const DEFAULT_HORIZON: usize = 10_000;
pub const HORIZON_CAP: usize = 1_000_000;
pub const UNESCAPED_TARGET: f64 = 1e-8;

fn check_s(s: f64, allow_one: bool) -> Result<()> {
    let ok = s > 0.0 && (s < 1.0 || (allow_one && s == 1.0));
    if !ok {
        return precondition(format!("s = {s} is outside the admissible range"));
    }
    Ok(())
}

fn check_law(mu: &Law) -> Result<()> {
    if mu.total_mass() > 1.0 + 1e-9 {
        return precondition(format!("step mass {} exceeds 1", mu.total_mass()));
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderFactor {
    pub s: f64,
    pub factor: LatticeMeasure,
    /// Mass of `(η_N)⁻` still waiting to enter.
    pub unescaped: f64,
    /// Mass that left through a truncated tail or was trimmed.
    pub lost: f64,
    pub steps: usize,
}

struct Ladder {
    w: LatticeMeasure,
    s: f64,
    eta_lo: i64,
    eta: Vec<f64>,
    plus: Vec<f64>,
    lost: f64,
    steps: usize,
    conv: FftConvolver,
}

impl Ladder {
    fn new(mu: &Law, s: f64) -> Self {
        Self {
            w: mu.materialize(),
            s,
            eta_lo: 0,
            eta: vec![1.0],
            plus: vec![0.0],
            lost: 0.0,
            steps: 0,
            conv: FftConvolver::new(),
        }
    }

    fn unescaped(&self) -> f64 {
        self.eta.iter().sum()
    }

    fn step(&mut self) {
        if self.eta.is_empty() || self.w.is_zero() {
            self.steps += 1;
            return;
        }
        let mass = self.unescaped();
        self.lost += self.s * mass * self.w.tail_mass();
        let wt = self.w.weights();
        let mut out = if self.eta.len().min(wt.len()) > 64 {
            self.conv.convolve(&self.eta, wt)
        } else {
            convolve_slices(&self.eta, wt)
        };
        for x in &mut out {
            *x *= self.s;
        }
        let lo = self.eta_lo + self.w.support_min();
        // split at the origin
        let n_neg = (1 - lo).clamp(0, out.len() as i64) as usize;
        for (i, &x) in out[n_neg..].iter().enumerate() {
            let k = (lo + (n_neg + i) as i64) as usize;
            if k >= self.plus.len() {
                self.plus.resize(k + 1, 0.0);
            }
            self.plus[k] += x.max(0.0);
        }
        out.truncate(n_neg);
        let first = out.iter().position(|&x| x >= TRIM).unwrap_or(out.len());
        let last = out.iter().rposition(|&x| x >= TRIM).map_or(first, |i| i + 1);
        self.lost += out[..first].iter().chain(&out[last..]).sum::<f64>();
        out.truncate(last);
        out.drain(..first);
        self.eta_lo = lo + first as i64;
        self.eta = out;
        self.steps += 1;
    }

    fn result(&self) -> LadderFactor {
        LadderFactor {
            s: self.s,
            factor: LatticeMeasure::from_raw(0, self.plus.clone(), 0.0),
            unescaped: self.unescaped(),
            lost: self.lost,
            steps: self.steps,
        }
    }
}

/// `Σ_{n≤horizon} (η_n)⁺` with `η_0 = δ₀` and `η_{n+1} = s(η_n)⁻ ∗ μ`.
pub fn ladder_factor(mu: &Law, s: f64, horizon: usize) -> Result<LadderFactor> {
    check_s(s, true)?;
    check_law(mu)?;
    if horizon < 1 {
        return precondition("horizon must be at least 1");
    }
    let mut l = Ladder::new(mu, s);
    for _ in 0..horizon {
        l.step();
        if l.eta.is_empty() {
            break;
        }
    }
    Ok(l.result())
}

/// [`ladder_factor`] that also stops once `(η_n)⁻` spans more than
/// `width_cap` sites. Heavy two-sided laws spread by a full window per step.
pub fn ladder_factor_capped(mu: &Law, s: f64, horizon: usize, width_cap: usize) -> Result<LadderFactor> {
    check_s(s, true)?;
    check_law(mu)?;
    if horizon < 1 || width_cap < 1 {
        return precondition("horizon and width cap must be at least 1");
    }
    let mut l = Ladder::new(mu, s);
    for _ in 0..horizon {
        l.step();
        if l.eta.is_empty() || l.eta.len() > width_cap {
            break;
        }
    }
    Ok(l.result())
}

/// Ladder route run from [`DEFAULT_HORIZON`], doubling until the
/// un-escaped mass is below [`UNESCAPED_TARGET`] or the cap is reached.
/// Also stops once a doubling adds less than `1e−15` of entered mass,
/// which happens when the remaining mass drifts away from the origin.
pub fn ladder_factor_auto(mu: &Law, s: f64) -> Result<LadderFactor> {
    check_s(s, true)?;
    check_law(mu)?;
    let mut l = Ladder::new(mu, s);
    let mut target = DEFAULT_HORIZON;
    let mut entered = 0.0;
    loop {
        while l.steps < target && !l.eta.is_empty() {
            l.step();
        }
        let now: f64 = l.plus.iter().sum();
        let stalled = now - entered < 1e-15;
        entered = now;
        if l.unescaped() < UNESCAPED_TARGET || target >= HORIZON_CAP || l.eta.is_empty() || stalled {
            return Ok(l.result());
        }
        target = (2 * target).min(HORIZON_CAP);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpFactor {
    pub s: f64,
    pub factor: LatticeMeasure,
    /// TV bound on the error from truncating both series.
    pub truncation_bound: f64,
    /// `L⁺(ℕ*)`; the factor mass should equal `1 − e^{−L⁺(ℕ*)}`.
    pub log_mass: f64,
    pub terms: usize,
}

/// Smallest `n` whose log-series remainder is below `tol`.
pub fn exp_n_max(s: f64, tol: f64) -> usize {
    let mut n = 1;
    while log_tail_bound(s, n) >= tol && n < 10_000_000 {
        n = (n as f64 * 1.25).ceil() as usize;
    }
    let mut lo = n * 4 / 5;
    while lo < n && log_tail_bound(s, lo) >= tol {
        lo += 1;
    }
    lo.max(1)
}

/// `δ₀ − exp(−L⁺)` restricted to `ℕ*`, for `s < 1`.
pub fn exp_factor(mu: &Law, s: f64, n_max: usize) -> Result<ExpFactor> {
    check_s(s, false)?;
    check_law(mu)?;
    if n_max < 1 {
        return precondition("n_max must be at least 1");
    }
    let log = log_series(&mu.materialize(), s, n_max)?;
    let lp = log.value.restrict(Side::Positive);
    let log_mass = lp.mass();
    if lp.is_zero() {
        return Ok(ExpFactor {
            s,
            factor: LatticeMeasure::zero(),
            truncation_bound: log.truncation_bound,
            log_mass,
            terms: n_max,
        });
    }
    let norm = lp.norm_bound();
    let mut terms = 1;
    let mut bound = norm.exp() * norm;
    while bound >= 1e-16 && terms < 2000 {
        terms += 1;
        bound *= norm / terms as f64;
    }
    let e = exp_series_below(&lp.scale(-1.0), terms, lp.support_max())?;
    // the exponential is 1-Lipschitz up to e^{‖L⁺‖} in total variation
    let truncation_bound = e.truncation_bound + norm.exp() * log.truncation_bound;
    let factor = e
        .value
        .scale(-1.0)
        .restrict(Side::Positive)
        .to_lattice(truncation_bound.max(1e-9))?;
    Ok(ExpFactor {
        s,
        factor,
        truncation_bound,
        log_mass,
        terms: n_max,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryMonteCarlo {
    pub s: f64,
    pub law: LatticeMeasure,
    /// Three binomial standard errors for each atom of `law`.
    pub radii: Vec<(i64, f64)>,
    pub trials: u64,
    /// Trials that hit the step cap before entering.
    pub unfinished: u64,
    /// Trials stopped by a tail jump.
    pub censored: u64,
}

impl EntryMonteCarlo {
    pub fn tv_radius(&self) -> f64 {
        self.radii.iter().map(|r| r.1).sum()
    }
}

pub fn entry_monte_carlo(mu: &Law, trials: u64, step_cap: usize, seed: u64) -> Result<EntryMonteCarlo> {
    entry_monte_carlo_at(mu, 1.0, trials, step_cap, seed)
}

#[derive(Clone, Copy)]
enum Entry {
    At(i64),
    Killed,
    Unfinished,
    Censored,
}

/// Empirical entrance law with geometric killing at rate `1 − s` per step.
pub fn entry_monte_carlo_at(mu: &Law, s: f64, trials: u64, step_cap: usize, seed: u64) -> Result<EntryMonteCarlo> {
    check_s(s, true)?;
    check_law(mu)?;
    if trials < 1 {
        return precondition("trials must be at least 1");
    }
    let sampler = Sampler::new(mu);
    let outcomes: Vec<Entry> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut z = 0i64;
            for _ in 0..step_cap {
                if s < 1.0 && rng.random::<f64>() >= s {
                    return Entry::Killed;
                }
                match sampler.draw(&mut rng) {
                    Draw::Jump(j) => z += j,
                    Draw::Tail => return Entry::Censored,
                    Draw::Killed => return Entry::Killed,
                }
                if z >= 1 {
                    return Entry::At(z);
                }
            }
            Entry::Unfinished
        })
        .collect();
    let mut counts: Vec<u64> = Vec::new();
    let (mut unfinished, mut censored) = (0, 0);
    for o in outcomes {
        match o {
            Entry::At(k) => {
                let k = k as usize;
                if k >= counts.len() {
                    counts.resize(k + 1, 0);
                }
                counts[k] += 1;
            }
            Entry::Unfinished => unfinished += 1,
            Entry::Censored => censored += 1,
            Entry::Killed => {}
        }
    }
    let n = trials as f64;
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let radii = freq
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (k as i64, 3.0 * (p * (1.0 - p) / n).sqrt()))
        .collect();
    Ok(EntryMonteCarlo {
        s,
        law: LatticeMeasure::from_raw(0, freq, 0.0),
        radii,
        trials,
        unfinished,
        censored,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Discrepancy {
    pub ladder_exponential: f64,
    pub ladder_monte_carlo: f64,
    pub exponential_monte_carlo: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationResult {
    pub s: f64,
    pub via_ladder: LatticeMeasure,
    pub ladder_unescaped: f64,
    pub via_exponential: LatticeMeasure,
    pub exponential_truncation: f64,
    pub via_monte_carlo: LatticeMeasure,
    pub monte_carlo_radii: Vec<(i64, f64)>,
    /// `1 −` mass of the ladder estimate.
    pub mass_deficit: f64,
    pub discrepancy: Discrepancy,
    /// `max(1e−4, Σ per-atom 3σ)`.
    pub tolerance: f64,
    pub agree: bool,
}

impl FactorizationResult {
    fn reflect(self) -> Self {
        let r = |m: LatticeMeasure| m.reflect();
        Self {
            via_ladder: r(self.via_ladder),
            via_exponential: r(self.via_exponential),
            via_monte_carlo: r(self.via_monte_carlo),
            monte_carlo_radii: self.monte_carlo_radii.into_iter().map(|(k, v)| (-k, v)).rev().collect(),
            ..self
        }
    }
}

/// All three routes at a common `s < 1`.
pub fn factorize(mu: &Law, s: f64, trials: u64, seed: u64) -> Result<FactorizationResult> {
    check_s(s, false)?;
    let ladder = ladder_factor_auto(mu, s)?;
    let exp = exp_factor(mu, s, exp_n_max(s, 1e-12))?;
    let mc = entry_monte_carlo_at(mu, s, trials, HORIZON_CAP, seed)?;
    let discrepancy = Discrepancy {
        ladder_exponential: ladder.factor.tv_distance(&exp.factor),
        ladder_monte_carlo: ladder.factor.tv_distance(&mc.law),
        exponential_monte_carlo: exp.factor.tv_distance(&mc.law),
    };
    let tolerance = mc.tv_radius().max(1e-4);
    let agree = discrepancy.ladder_exponential <= tolerance
        && discrepancy.ladder_monte_carlo <= tolerance
        && discrepancy.exponential_monte_carlo <= tolerance;
    Ok(FactorizationResult {
        s,
        mass_deficit: 1.0 - ladder.factor.mass(),
        via_ladder: ladder.factor,
        ladder_unescaped: ladder.unescaped,
        via_exponential: exp.factor,
        exponential_truncation: exp.truncation_bound,
        via_monte_carlo: mc.law,
        monte_carlo_radii: mc.radii,
        discrepancy,
        tolerance,
        agree,
    })
}

/// The entrance law into `−ℕ*`, via the reflected walk.
pub fn factorize_negative(nu: &Law, s: f64, trials: u64, seed: u64) -> Result<FactorizationResult> {
    Ok(factorize(&nu.clone().reflected(), s, trials, seed)?.reflect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MassTrend {
    LogDivergent,
    Convergent,
    Inconclusive,
}

/// `μ₊(ℕ*) = 1 − exp(−Σ μⁿ(ℕ*)/n)`, so `μ₊` is a probability iff the sum
/// diverges. This reports the partial sums; the trend is a heuristic.
#[derive(Clone, Debug, Serialize)]
pub struct MassCriterion {
    /// `μⁿ(ℕ*)` for `n = 1..=n_max`.
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub implied_mass: f64,
    pub trend: MassTrend,
    pub heuristic: bool,
}

pub fn mass_criterion(mu: &Law, n_max: usize) -> Result<MassCriterion> {
    check_law(mu)?;
    if n_max < 2 {
        return precondition("n_max must be at least 2");
    }
    let m = mu.materialize();
    let base = m.weights();
    let mut lo = m.support_min();
    let mut power = base.to_vec();
    let mut terms = Vec::with_capacity(n_max);
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut acc = 0.0;
    for n in 1..=n_max {
        if n > 1 {
            power = convolve_slices(&power, base);
            lo += m.support_min();
            let first = power.iter().position(|&x| x >= 1e-40).unwrap_or(power.len());
            let last = power.iter().rposition(|&x| x >= 1e-40).map_or(first, |i| i + 1);
            power.truncate(last);
            power.drain(..first);
            lo += first as i64;
        }
        let pos: f64 = power
            .iter()
            .enumerate()
            .filter(|(i, _)| lo + *i as i64 >= 1)
            .map(|(_, x)| x)
            .sum();
        terms.push(pos);
        acc += pos / n as f64;
        partial_sums.push(acc);
    }
    let a_end = *terms.last().unwrap();
    let a_prev = terms[terms.len() - 2];
    let trend = if a_end > 1e-2 {
        MassTrend::LogDivergent
    } else {
        let ratio = if a_prev > 0.0 { a_end / a_prev } else { 0.0 };
        let tail = if ratio < 1.0 {
            a_end / n_max as f64 / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if tail < 1e-10 {
            MassTrend::Convergent
        } else {
            MassTrend::Inconclusive
        }
    };
    Ok(MassCriterion {
        implied_mass: 1.0 - (-acc).exp(),
        terms,
        partial_sums,
        trend,
        heuristic: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(p: &[(i64, f64)]) -> Law {
        Law::points(p).unwrap()
    }

    #[test]
    fn ladder_simple_walk_enters_at_one() {
        let l = ladder_factor(&pts(&[(-1, 0.5), (1, 0.5)]), 1.0, 10_000).unwrap();
        assert_eq!(l.factor.support_min(), 1);
        assert_eq!(l.factor.support_max(), 1);
        assert!(l.factor.mass() >= 1.0 - 1e-2);
        assert!((l.factor.mass() + l.unescaped - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ladder_gamblers_ruin() {
        let l = ladder_factor_auto(&pts(&[(1, 0.3), (-1, 0.7)]), 1.0).unwrap();
        assert!((l.factor.get(1) - 3.0 / 7.0).abs() < 1e-8);
        // the rest drifts to −∞ and never enters
        assert!((l.unescaped - 4.0 / 7.0).abs() < 1e-8);
    }

    #[test]
    fn ladder_positive_step() {
        let l = ladder_factor(&pts(&[(1, 1.0)]), 1.0, 1).unwrap();
        assert_eq!(l.factor, LatticeMeasure::dirac(1));
    }

    #[test]
    fn ladder_monotone_in_horizon_and_s() {
        let mu = pts(&[(-2, 0.3), (-1, 0.2), (1, 0.4), (3, 0.1)]);
        let mut prev = 0.0;
        for h in [1, 2, 5, 10, 50, 200] {
            let m = ladder_factor(&mu, 1.0, h).unwrap().factor.mass();
            assert!(m >= prev);
            prev = m;
        }
        let mut prev = 0.0;
        for s in [0.5, 0.9, 0.99, 1.0] {
            let m = ladder_factor(&mu, s, 200).unwrap().factor.mass();
            assert!(m >= prev);
            prev = m;
        }
    }

    #[test]
    fn exp_matches_ladder() {
        let mu = pts(&[(-1, 0.5), (1, 0.5)]);
        let e = exp_factor(&mu, 0.99, exp_n_max(0.99, 1e-12)).unwrap();
        let l = ladder_factor_auto(&mu, 0.99).unwrap();
        assert!(e.factor.tv_distance(&l.factor) <= 1e-6 + e.truncation_bound);
        // exp(−L⁺) has mass exp(−L⁺(ℕ*))
        assert!((e.factor.mass() - (1.0 - (-e.log_mass).exp())).abs() < 1e-12);
    }

    #[test]
    fn exp_positive_step_is_scaled() {
        for s in [0.3, 0.9, 0.999] {
            let e = exp_factor(&pts(&[(1, 1.0)]), s, exp_n_max(s, 1e-12)).unwrap();
            assert!((e.factor.get(1) - s).abs() < 1e-10, "{}", e.factor.get(1));
            assert!(e.factor.mass() - s < 1e-10);
        }
    }

    #[test]
    fn monte_carlo_simple_walk() {
        let mc = entry_monte_carlo(&pts(&[(-1, 0.5), (1, 0.5)]), 100_000, 100_000, 1).unwrap();
        assert!(mc.law.get(1) >= 0.95);
        let again = entry_monte_carlo(&pts(&[(-1, 0.5), (1, 0.5)]), 100_000, 100_000, 1).unwrap();
        assert_eq!(mc.law, again.law);
    }

    #[test]
    fn monte_carlo_gamblers_ruin() {
        let mc = entry_monte_carlo(&pts(&[(1, 0.3), (-1, 0.7)]), 100_000, 2000, 2).unwrap();
        assert!((mc.law.mass() - 3.0 / 7.0).abs() <= mc.tv_radius());
    }

    #[test]
    fn three_way_agreement() {
        let r = factorize(&pts(&[(1, 0.3), (-1, 0.7)]), 0.999, 100_000, 3).unwrap();
        assert!(r.agree, "{:?}", r.discrepancy);
        assert!(r.discrepancy.ladder_exponential < 1e-9);
    }

    #[test]
    fn mirror_symmetry() {
        let nu = pts(&[(1, 0.4), (-1, 0.2), (-3, 0.4)]);
        let a = factorize_negative(&nu, 0.99, 1000, 4).unwrap();
        let b = factorize(&nu.clone().reflected(), 0.99, 1000, 4).unwrap();
        assert_eq!(a.via_ladder, b.via_ladder.reflect());
        assert_eq!(a.via_exponential, b.via_exponential.reflect());
        assert!(a.via_ladder.support_max() <= -1);
    }

    #[test]
    fn mass_criterion_examples() {
        let c = mass_criterion(&pts(&[(-1, 0.5), (1, 0.5)]), 2000).unwrap();
        assert_eq!(c.trend, MassTrend::LogDivergent);
        assert!((c.terms[1999] - 0.5).abs() < 0.02);
        let c = mass_criterion(&pts(&[(1, 0.3), (-1, 0.7)]), 2000).unwrap();
        assert_eq!(c.trend, MassTrend::Convergent);
        assert!((c.implied_mass - 3.0 / 7.0).abs() < 1e-9);
        let c = mass_criterion(&pts(&[(1, 1.0)]), 100).unwrap();
        assert!(c.terms.iter().all(|&a| a == 1.0));
        assert_eq!(c.trend, MassTrend::LogDivergent);
    }
}
