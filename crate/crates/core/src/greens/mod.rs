//! Finite-horizon dynamic programming: Green functions, first passage,
//! taboo Green values, potential-kernel differences, ratio limits and
//! Chung's limit.

mod dp;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::extrapolate::{diagnose, richardson_with_error, Convergence, Extrapolated};
use crate::measure::{gcd, Law};

pub(crate) use dp::{Chain, Dist};

/// The walks every engine consumes.
#[derive(Clone, Debug)]
pub enum WalkSpec {
    /// `S_{n+1} = S_n + X_{n+1}` with i.i.d. steps.
    Homogeneous(Law),
    /// `neg_side` is used from positions `≤ 0`, `pos_side` from `≥ 1`.
    Oscillating { neg_side: Law, pos_side: Law },
    /// Positive jumps from `≤ 0`, negative jumps from `≥ 1`.
    Concentrated { mu_plus: Law, nu_minus: Law },
}

impl WalkSpec {
    pub fn homogeneous(step: Law) -> Result<Self> {
        if step.total_mass() > 1.0 + 1e-12 {
            return precondition(format!("step mass {} exceeds 1", step.total_mass()));
        }
        Ok(WalkSpec::Homogeneous(step))
    }

    pub fn oscillating(neg_side: Law, pos_side: Law) -> Result<Self> {
        for (name, l) in [("neg_side", &neg_side), ("pos_side", &pos_side)] {
            if (l.total_mass() - 1.0).abs() > 1e-9 {
                return precondition(format!("{name} must be a probability, mass is {}", l.total_mass()));
            }
        }
        Ok(WalkSpec::Oscillating { neg_side, pos_side })
    }

    pub fn concentrated(mu_plus: Law, nu_minus: Law) -> Result<Self> {
        if !(mu_plus.is_strictly_positive() || mu_plus.total_mass() == 0.0) {
            return precondition("mu_plus must be supported in the positive integers");
        }
        if !(nu_minus.is_strictly_negative() || nu_minus.total_mass() == 0.0) {
            return precondition("nu_minus must be supported in the negative integers");
        }
        for (name, l) in [("mu_plus", &mu_plus), ("nu_minus", &nu_minus)] {
            if l.total_mass() > 1.0 + 1e-9 {
                return precondition(format!("{name} mass {} exceeds 1", l.total_mass()));
            }
        }
        Ok(WalkSpec::Concentrated { mu_plus, nu_minus })
    }

    /// Step law used from position `z`.
    pub fn law_at(&self, z: i64) -> &Law {
        match self {
            WalkSpec::Homogeneous(l) => l,
            WalkSpec::Oscillating { neg_side, pos_side } => {
                if z <= 0 {
                    neg_side
                } else {
                    pos_side
                }
            }
            WalkSpec::Concentrated { mu_plus, nu_minus } => {
                if z <= 0 {
                    mu_plus
                } else {
                    nu_minus
                }
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, WalkSpec::Homogeneous(_))
    }
}

/// `G_N(x, y) = Σ_{n<N} P_x(S_n = y)`.
#[derive(Clone, Debug, Serialize)]
pub struct GreenTable {
    pub horizon: usize,
    pub origin: i64,
    pub support_min: i64,
    pub values: Vec<f64>,
    /// Occupation lost to truncated tails, trimming or killing.
    pub lost: f64,
}

impl GreenTable {
    pub fn get(&self, y: i64) -> f64 {
        let i = y - self.support_min;
        if i < 0 || i >= self.values.len() as i64 {
            0.0
        } else {
            self.values[i as usize]
        }
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn support_max(&self) -> i64 {
        self.support_min + self.values.len() as i64 - 1
    }
}

pub fn green_finite(walk: &WalkSpec, n: usize, x: i64) -> Result<GreenTable> {
    if n < 1 {
        return precondition("horizon N must be at least 1");
    }
    let chain = Chain::new(walk);
    let mut d = Dist::delta(x);
    let mut lo = x;
    let mut acc: Vec<f64> = vec![0.0];
    let mut lost_occupation = 0.0;
    for step in 0..n {
        if !d.p.is_empty() {
            if d.lo < lo {
                let grow = (lo - d.lo) as usize;
                acc.splice(0..0, std::iter::repeat(0.0).take(grow));
                lo = d.lo;
            }
            let need = (d.hi() - lo + 1) as usize;
            if need > acc.len() {
                acc.resize(need, 0.0);
            }
            let off = (d.lo - lo) as usize;
            for (a, p) in acc[off..].iter_mut().zip(&d.p) {
                *a += p;
            }
        }
        lost_occupation += d.lost + d.killed;
        if step + 1 < n {
            d = d.step(&chain)?;
        }
    }
    Ok(GreenTable {
        horizon: n,
        origin: x,
        support_min: lo,
        values: acc,
        lost: lost_occupation,
    })
}

/// Law of `T_y = min{n ≥ 1 : S_n = y}` up to a horizon.
#[derive(Clone, Debug, Serialize)]
pub struct FirstPassage {
    pub from: i64,
    pub to: i64,
    /// `pmf[k] = P_x(T_y = k)`, with `pmf[0] = 0`.
    pub pmf: Vec<f64>,
    /// `P_x(T_y > horizon)` carried by the tracked distribution.
    pub tail: f64,
    /// Mass whose fate is unknown (window tails, trimming, killing).
    pub lost: f64,
}

impl FirstPassage {
    pub fn hit_probability(&self) -> f64 {
        self.pmf.iter().sum()
    }
}

pub fn first_passage(walk: &WalkSpec, x: i64, y: i64, horizon: usize) -> Result<FirstPassage> {
    if horizon < 1 {
        return precondition("horizon must be at least 1");
    }
    let run = absorb(walk, x, &[y], None, horizon)?;
    Ok(FirstPassage {
        from: x,
        to: y,
        pmf: run.hits.into_iter().next().unwrap(),
        tail: run.remaining,
        lost: run.lost,
    })
}

/// Largest gap in `G_N(x,y) = Σ_{k<N} P_x(T_y=k) G_{N−k}(y,y)` over `N ≤ n`, `x ≠ y`.
pub fn first_passage_decomposition_gap(walk: &WalkSpec, x: i64, y: i64, n: usize) -> Result<f64> {
    if x == y {
        return precondition("decomposition check needs x ≠ y");
    }
    let fp = first_passage(walk, x, y, n)?;
    let from_x = dp::occupation_series(walk, x, y, n)?;
    let from_y = dp::occupation_series(walk, y, y, n)?;
    let mut gyy = vec![0.0; n + 1];
    for m in 1..=n {
        gyy[m] = gyy[m - 1] + from_y[m - 1];
    }
    let mut worst: f64 = 0.0;
    let mut gxy = 0.0;
    for big_n in 1..=n {
        gxy += from_x[big_n - 1];
        let conv: f64 = (1..big_n).map(|k| fp.pmf[k] * gyy[big_n - k]).sum();
        worst = worst.max((gxy - conv).abs());
    }
    Ok(worst)
}

struct AbsorbRun {
    /// `hits[i][n]`: mass absorbed at target `i` at time `n`.
    hits: Vec<Vec<f64>>,
    /// Cumulative absorbed mass per target at each time.
    remaining: f64,
    /// `E Σ_{n < T ∧ horizon} 1_{S_n = watch}` evaluated at every horizon `≤ horizon`.
    occupation: Vec<f64>,
    lost: f64,
}

/// Runs the chain from `x` with every target absorbing from time 1 on.
fn absorb(walk: &WalkSpec, x: i64, targets: &[i64], watch: Option<i64>, horizon: usize) -> Result<AbsorbRun> {
    let chain = Chain::new(walk);
    let mut d = Dist::delta(x);
    let mut hits = vec![vec![0.0; horizon + 1]; targets.len()];
    let mut occupation = Vec::with_capacity(horizon + 1);
    let mut occ = 0.0;
    occupation.push(0.0);
    if let Some(w) = watch {
        occ += d.get(w);
    }
    occupation.push(occ);
    for n in 1..=horizon {
        d = d.step(&chain)?;
        for (i, &t) in targets.iter().enumerate() {
            hits[i][n] = d.take(t);
        }
        if let Some(w) = watch {
            occ += d.get(w);
        }
        if n < horizon {
            occupation.push(occ);
        }
    }
    Ok(AbsorbRun {
        hits,
        remaining: d.mass(),
        occupation,
        lost: d.lost + d.killed,
    })
}

/// Smallest common period of the return times to `x` observed up to `scan`.
pub fn period(walk: &WalkSpec, x: i64, scan: usize) -> Result<Option<u64>> {
    let series = dp::occupation_series(walk, x, x, scan + 1)?;
    let mut g = 0u64;
    for (n, &p) in series.iter().enumerate().skip(1) {
        if p > 0.0 {
            g = gcd(g, n as u64);
            if g == 1 {
                break;
            }
        }
    }
    Ok((g > 0).then_some(g))
}

fn sample_horizons(horizon: usize, period: u64) -> Vec<usize> {
    let p = period.max(1) as usize;
    let mut out: Vec<usize> = (0..4)
        .rev()
        .map(|k| ((horizon >> k) / p).max(1) * p)
        .collect();
    out.dedup();
    out
}

const POWERS: [f64; 3] = [0.5, 1.0, 1.5];

fn extrapolate_schedule(hs: &[usize], values: &[f64]) -> Extrapolated {
    let pts: Vec<(f64, f64)> = hs.iter().zip(values).map(|(&h, &v)| (h as f64, v)).collect();
    if pts.len() == POWERS.len() + 1 {
        richardson_with_error(&pts, &POWERS)
    } else {
        let raw = *values.last().unwrap();
        Extrapolated {
            value: raw,
            error: f64::INFINITY,
            raw,
        }
    }
}

/// Expected visits to `x` before `T_y`, by two routes.
#[derive(Clone, Debug, Serialize)]
pub struct TabooGreen {
    pub x: i64,
    pub y: i64,
    pub horizon: usize,
    /// `E_x Σ_{n<T_y∧N} 1_{S_n=x}` from the DP with `y` absorbing.
    pub direct: f64,
    /// `1/(1 − P_x(T_x < T_y ∧ N))`; absent for non-communicating pairs.
    pub formula: Option<f64>,
    pub gap: f64,
    /// `P_x(T_x < T_y, T_x ≤ N)`.
    pub return_probability: f64,
    /// `P_x(T_y ≤ N)`.
    pub hit_probability: f64,
    /// Mass neither returned nor absorbed by `N`.
    pub unresolved: f64,
    /// Horizon-extrapolated value of the formula route.
    pub extrapolated: Extrapolated,
    pub non_communicating: bool,
}

impl TabooGreen {
    pub fn value(&self) -> f64 {
        self.extrapolated.value
    }
}

pub fn taboo_green(walk: &WalkSpec, x: i64, y: i64, horizon: usize) -> Result<TabooGreen> {
    if x == y {
        return precondition("taboo Green value needs x ≠ y");
    }
    if horizon < 1 {
        return precondition("horizon must be at least 1");
    }
    let direct_run = absorb(walk, x, &[y], Some(x), horizon)?;
    let hit_probability: f64 = direct_run.hits[0].iter().sum();
    let direct = direct_run.occupation[horizon];

    let ret = absorb(walk, x, &[x, y], None, horizon)?;
    let mut cum = vec![0.0; horizon + 1];
    for n in 1..=horizon {
        cum[n] = cum[n - 1] + ret.hits[0][n];
    }
    let q = cum[horizon];
    let unresolved = ret.remaining;
    let non_communicating = hit_probability < 1e-12;

    let per = period(walk, x, 256.min(horizon))?.unwrap_or(1);
    let hs = sample_horizons(horizon, per);
    let seq: Vec<f64> = hs.iter().map(|&h| 1.0 / (1.0 - cum[h])).collect();
    let extrapolated = if non_communicating {
        Extrapolated {
            value: direct,
            error: f64::INFINITY,
            raw: direct,
        }
    } else {
        extrapolate_schedule(&hs, &seq)
    };
    let formula = (!non_communicating).then(|| 1.0 / (1.0 - q));
    Ok(TabooGreen {
        x,
        y,
        horizon,
        direct,
        formula,
        gap: formula.map_or(f64::NAN, |f| (f - direct).abs()),
        return_probability: q,
        hit_probability,
        unresolved,
        extrapolated,
        non_communicating,
    })
}

/// `P_x(T_y < ∞)` from the absorbing DP, with horizon extrapolation.
pub fn hitting_probability(walk: &WalkSpec, x: i64, y: i64, horizon: usize) -> Result<Extrapolated> {
    let fp = first_passage(walk, x, y, horizon)?;
    let mut cum = vec![0.0; horizon + 1];
    for n in 1..=horizon {
        cum[n] = cum[n - 1] + fp.pmf[n];
    }
    let per = period(walk, x, 256.min(horizon))?.unwrap_or(1);
    let hs = sample_horizons(horizon, per);
    let seq: Vec<f64> = hs.iter().map(|&h| cum[h]).collect();
    let mut e = extrapolate_schedule(&hs, &seq);
    e.value = e.value.clamp(0.0, 1.0);
    Ok(e)
}

/// Both routes to `Δ(x)` share this output shape.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaEstimate {
    pub x: i64,
    pub value: f64,
    pub error: f64,
    pub taboo: f64,
    pub transient_term: f64,
    /// `Some(true)` transient, `Some(false)` recurrent, `None` undetermined
    /// (value is then the midpoint of the two cases).
    pub transient: Option<bool>,
}

/// `Δ(x) = E₀Σ_{n<T_x}1_{S_n=0} + 1_{TR} G(0,0) P₀(T_x=∞) P₀(T_{−x}=∞)`,
/// with the regime taken from the Spitzer integral.
pub fn delta_probabilistic(mu: &Law, x: i64, horizon: usize) -> Result<DeltaEstimate> {
    let spitzer = crate::fourier::spitzer_integral(mu, 1e-8)?;
    let transient = match spitzer.verdict {
        crate::quad::Verdict::Converged => Some(true),
        crate::quad::Verdict::Divergent => Some(false),
        crate::quad::Verdict::Undetermined => None,
    };
    delta_probabilistic_with(mu, x, horizon, transient)
}

pub fn delta_probabilistic_with(mu: &Law, x: i64, horizon: usize, transient: Option<bool>) -> Result<DeltaEstimate> {
    if x < 1 {
        return precondition("Δ(x) is evaluated for positive x");
    }
    if mu.is_dirac() && !mu.is_strictly_positive() && !mu.is_strictly_negative() {
        return precondition("step law must not be δ₀");
    }
    let walk = WalkSpec::homogeneous(mu.clone())?;
    let taboo = taboo_green(&walk, 0, x, horizon)?;
    let c = taboo.value();
    let c_err = taboo.extrapolated.error;
    let term = || -> Result<(f64, f64)> {
        let ret = hitting_probability(&walk, 0, 0, horizon)?;
        let hx = hitting_probability(&walk, 0, x, horizon)?;
        let hmx = hitting_probability(&walk, 0, -x, horizon)?;
        let g = 1.0 / (1.0 - ret.value);
        let v = g * (1.0 - hx.value) * (1.0 - hmx.value);
        let err = g * (hx.error + hmx.error) + v * g * ret.error;
        Ok((v, err))
    };
    let (value, error, transient_term) = match transient {
        Some(false) => (c, c_err, 0.0),
        Some(true) => {
            let (t, e) = term()?;
            (c + t, c_err + e, t)
        }
        None => {
            let (t, e) = term()?;
            (c + 0.5 * t, c_err + e + 0.5 * t, t)
        }
    };
    Ok(DeltaEstimate {
        x,
        value,
        error,
        taboo: c,
        transient_term,
        transient,
    })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum LoopIdentity {
    Finite {
        lhs: f64,
        rhs: f64,
        relative_gap: f64,
        horizon: usize,
    },
    BothDiverge {
        escape_probability: f64,
        horizon: usize,
    },
}

/// `G(0,0) = [1/(1−P₀(T₀<T_x))]·[1/(1−P₀(T_x<∞)P_x(T₀<∞))]`.
pub fn loop_identity_check(walk: &WalkSpec, x: i64, horizon: usize) -> Result<LoopIdentity> {
    if x == 0 {
        return precondition("loop identity needs x ≠ 0");
    }
    let ret = hitting_probability(walk, 0, 0, horizon)?;
    if ret.value > 1.0 - 1e-6 {
        return Ok(LoopIdentity::BothDiverge {
            escape_probability: 1.0 - ret.value,
            horizon,
        });
    }
    let lhs = 1.0 / (1.0 - ret.value);
    let taboo = taboo_green(walk, 0, x, horizon)?;
    let a = hitting_probability(walk, 0, x, horizon)?.value;
    let b = hitting_probability(walk, x, 0, horizon)?.value;
    let rhs = taboo.value() / (1.0 - a * b);
    Ok(LoopIdentity::Finite {
        lhs,
        rhs,
        relative_gap: (lhs - rhs).abs() / lhs.abs(),
        horizon,
    })
}

/// `G_N(from, at)` at each horizon of an increasing schedule.
pub fn green_along(walk: &WalkSpec, from: i64, at: i64, schedule: &[usize]) -> Result<Vec<f64>> {
    let max = schedule.iter().copied().max().unwrap_or(0);
    let series = dp::occupation_series(walk, from, at, max)?;
    let mut prefix = vec![0.0; max + 1];
    for n in 0..max {
        prefix[n + 1] = prefix[n] + series[n];
    }
    Ok(schedule.iter().map(|&n| prefix[n]).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioLimit {
    pub schedule: Vec<usize>,
    /// `G_N(x,x)/G_N(y,y)` along the schedule.
    pub dp_ratios: Vec<f64>,
    /// `E_xΣ_{n<T_y}1_{S_n=x} / E_yΣ_{n<T_x}1_{S_n=y}`.
    pub taboo_ratio: f64,
    pub gap: f64,
    pub convergence: Convergence,
}

impl RatioLimit {
    pub fn value(&self) -> f64 {
        *self.dp_ratios.last().unwrap()
    }
}

pub fn ratio_limit(walk: &WalkSpec, x: i64, y: i64, schedule: &[usize]) -> Result<RatioLimit> {
    if schedule.is_empty() || x == y {
        return precondition("ratio limit needs x ≠ y and a non-empty schedule");
    }
    let gxx = green_along(walk, x, x, schedule)?;
    let gyy = green_along(walk, y, y, schedule)?;
    let dp_ratios: Vec<f64> = gxx.iter().zip(&gyy).map(|(a, b)| a / b).collect();
    let horizon = *schedule.iter().max().unwrap();
    let cxy = taboo_green(walk, x, y, horizon)?.value();
    let cyx = taboo_green(walk, y, x, horizon)?.value();
    let taboo_ratio = cxy / cyx;
    let last = *dp_ratios.last().unwrap();
    if walk.is_homogeneous() {
        debug_assert!((last - 1.0).abs() < 1e-9, "homogeneous ratio {last}");
    }
    Ok(RatioLimit {
        schedule: schedule.to_vec(),
        convergence: diagnose(&dp_ratios, 1e-3),
        gap: (last - taboo_ratio).abs(),
        dp_ratios,
        taboo_ratio,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ChungLimit {
    pub schedule: Vec<usize>,
    /// `a_N(x,y) + α(x,y) a_N(y,x)` along the schedule.
    pub lhs: Vec<f64>,
    pub rhs: f64,
    pub rhs_error: f64,
    pub alpha: f64,
    pub taboo: f64,
    pub transient_term: f64,
    pub transient: bool,
    pub period: u64,
    pub convergence: Convergence,
}

/// Chung's limit with `a_N(x,y) = G_N(x,x) − G_N(y,x)`.
///
/// `transient` may be supplied; otherwise it is read off the extrapolated
/// escape probability from `x`.
pub fn chung_limit(
    walk: &WalkSpec,
    x: i64,
    y: i64,
    schedule: &[usize],
    transient: Option<bool>,
) -> Result<ChungLimit> {
    if schedule.is_empty() || x == y {
        return precondition("Chung limit needs x ≠ y and a non-empty schedule");
    }
    let horizon = *schedule.iter().max().unwrap();
    let per = period(walk, x, 512.min(horizon))?;
    match per {
        None => return precondition(format!("state {x} is never revisited, chain is not irreducible")),
        Some(p) if p > 1 => return Err(crate::Error::Periodic { period: p }),
        _ => {}
    }
    let gxx = green_along(walk, x, x, schedule)?;
    let gyx = green_along(walk, y, x, schedule)?;
    let gyy = green_along(walk, y, y, schedule)?;
    let gxy = green_along(walk, x, y, schedule)?;
    let cxy = taboo_green(walk, x, y, horizon)?;
    let cyx = taboo_green(walk, y, x, horizon)?;
    let alpha = cxy.value() / cyx.value();
    let lhs: Vec<f64> = (0..schedule.len())
        .map(|i| (gxx[i] - gyx[i]) + alpha * (gyy[i] - gxy[i]))
        .collect();

    let ret = hitting_probability(walk, x, x, horizon)?;
    let transient = transient.unwrap_or(1.0 - ret.value > 1e-6);
    let (term, term_err) = if transient {
        let g = 1.0 / (1.0 - ret.value);
        let a = hitting_probability(walk, x, y, horizon)?;
        let b = hitting_probability(walk, y, x, horizon)?;
        let v = g * (1.0 - a.value) * (1.0 - b.value);
        (v, g * (a.error + b.error) + v * g * ret.error)
    } else {
        (0.0, 0.0)
    };
    Ok(ChungLimit {
        schedule: schedule.to_vec(),
        convergence: diagnose(&lhs, 1e-2),
        lhs,
        rhs: cxy.value() + term,
        rhs_error: cxy.extrapolated.error + term_err,
        alpha,
        taboo: cxy.value(),
        transient_term: term,
        transient,
        period: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::LatticeMeasure;

    fn hom(points: &[(i64, f64)]) -> WalkSpec {
        WalkSpec::homogeneous(Law::points(points).unwrap()).unwrap()
    }

    fn zigzag() -> WalkSpec {
        WalkSpec::concentrated(Law::points(&[(1, 1.0)]).unwrap(), Law::points(&[(-1, 1.0)]).unwrap()).unwrap()
    }

    #[test]
    fn drift_green_table() {
        let g = green_finite(&hom(&[(1, 1.0)]), 5, 0).unwrap();
        for y in 0..5 {
            assert_eq!(g.get(y), 1.0);
        }
        assert_eq!(g.get(5), 0.0);
    }

    #[test]
    fn srw_green_at_three() {
        let g = green_finite(&hom(&[(-1, 0.5), (1, 0.5)]), 3, 0).unwrap();
        assert!((g.get(0) - 1.5).abs() < 1e-15);
        assert!((g.total() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn first_passage_examples() {
        let fp = first_passage(&hom(&[(1, 1.0)]), 0, 3, 5).unwrap();
        assert_eq!(fp.pmf[3], 1.0);
        assert_eq!(fp.hit_probability(), 1.0);
        let fp = first_passage(&hom(&[(-1, 0.5), (1, 0.5)]), 0, 1, 3).unwrap();
        assert!((fp.pmf[1] - 0.5).abs() < 1e-15);
        assert_eq!(fp.pmf[2], 0.0);
        assert!((fp.pmf[3] - 0.125).abs() < 1e-15);
        assert!((fp.pmf.iter().sum::<f64>() + fp.tail + fp.lost - 1.0).abs() < 1e-12);
        let fp = first_passage(&zigzag(), 0, 0, 4).unwrap();
        assert_eq!(fp.pmf, vec![0.0, 0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn taboo_examples() {
        let t = taboo_green(&hom(&[(1, 1.0)]), 0, 1, 100).unwrap();
        assert_eq!(t.direct, 1.0);
        assert_eq!(t.formula, Some(1.0));
        let t = taboo_green(&hom(&[(-1, 0.5), (1, 0.5)]), 0, 1, 10_000).unwrap();
        assert!((t.value() - 2.0).abs() < 1e-6, "{:?}", t);
        assert!(t.direct < 2.0 && t.formula.unwrap() < 2.0);
        let t = taboo_green(&zigzag(), 0, 1, 50).unwrap();
        assert_eq!(t.direct, 1.0);
    }

    #[test]
    fn loop_identity_examples() {
        match loop_identity_check(&hom(&[(1, 1.0)]), 1, 100).unwrap() {
            LoopIdentity::Finite { lhs, rhs, .. } => {
                assert_eq!(lhs, 1.0);
                assert_eq!(rhs, 1.0);
            }
            other => panic!("{other:?}"),
        }
        match loop_identity_check(&hom(&[(-1, 0.3), (1, 0.7)]), 1, 10_000).unwrap() {
            LoopIdentity::Finite { relative_gap, .. } => assert!(relative_gap < 1e-6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            loop_identity_check(&hom(&[(-1, 0.5), (1, 0.5)]), 1, 10_000).unwrap(),
            LoopIdentity::BothDiverge { .. }
        ));
    }

    #[test]
    fn delta_examples() {
        let srw = Law::points(&[(-1, 0.5), (1, 0.5)]).unwrap();
        let d = delta_probabilistic_with(&srw, 1, 1 << 14, Some(false)).unwrap();
        assert!((d.value - 2.0).abs() < 1e-6);
        let drift = Law::points(&[(1, 1.0)]).unwrap();
        let d = delta_probabilistic_with(&drift, 1, 100, Some(true)).unwrap();
        assert!((d.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ratio_examples() {
        let r = ratio_limit(&hom(&[(-1, 0.5), (1, 0.5)]), 0, 3, &[100, 1000]).unwrap();
        assert!((r.value() - 1.0).abs() < 1e-12);
        assert!((r.taboo_ratio - 1.0).abs() < 1e-6);
        let r = ratio_limit(&zigzag(), 0, 1, &[100, 1000]).unwrap();
        assert!((r.value() - 1.0).abs() < 1e-2);
        let spec = WalkSpec::concentrated(
            Law::points(&[(1, 0.5), (2, 0.5)]).unwrap(),
            Law::points(&[(-1, 1.0)]).unwrap(),
        )
        .unwrap();
        let r = ratio_limit(&spec, 0, 1, &[2500, 5000, 10_000]).unwrap();
        assert!(r.gap < 1e-3, "{r:?}");
    }

    #[test]
    fn periodic_chung_is_rejected() {
        let err = chung_limit(&hom(&[(-1, 0.5), (1, 0.5)]), 0, 1, &[100], None).unwrap_err();
        assert_eq!(err, crate::Error::Periodic { period: 2 });
        assert!(chung_limit(&hom(&[(1, 1.0)]), 0, 1, &[100], None).is_err());
    }

    #[test]
    fn lazy_chung_limits() {
        let lazy = LatticeMeasure::from_points(&[(-1, 0.5), (1, 0.5)]).unwrap().lazify(0.01);
        let w = WalkSpec::homogeneous(Law::Points(lazy)).unwrap();
        let c = chung_limit(&w, 0, 1, &[2500, 5000, 10_000], None).unwrap();
        assert!((c.lhs.last().unwrap() - c.rhs).abs() < 1e-2, "{c:?}");
        let lazy = LatticeMeasure::from_points(&[(-1, 0.3), (1, 0.7)]).unwrap().lazify(0.01);
        let w = WalkSpec::homogeneous(Law::Points(lazy)).unwrap();
        let c = chung_limit(&w, 0, 1, &[2500, 5000, 10_000], None).unwrap();
        assert!(c.transient && c.transient_term > 0.0);
        assert!((c.lhs.last().unwrap() - c.rhs).abs() < 1e-2, "{c:?}");
    }
}
