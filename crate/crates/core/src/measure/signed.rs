use num_complex::Complex64;
use serde::Serialize;

use super::{convolve_slices, LatticeMeasure, Side, DEFAULT_SUPPORT_CAP};
use crate::error::{Error, Result};

/// Finitely supported signed measure on ℤ.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignedLatticeMeasure {
    support_min: i64,
    weights: Vec<f64>,
    norm_bound: f64,
}

impl SignedLatticeMeasure {
    pub fn new(support_min: i64, mut weights: Vec<f64>) -> Self {
        let Some(first) = weights.iter().position(|&w| w != 0.0) else {
            return Self::zero();
        };
        let last = weights.iter().rposition(|&w| w != 0.0).unwrap();
        weights.truncate(last + 1);
        weights.drain(..first);
        let norm_bound = weights.iter().map(|w| w.abs()).sum();
        Self {
            support_min: support_min + first as i64,
            weights,
            norm_bound,
        }
    }

    pub fn zero() -> Self {
        Self {
            support_min: 0,
            weights: Vec::new(),
            norm_bound: 0.0,
        }
    }

    pub fn delta(k: i64) -> Self {
        Self::new(k, vec![1.0])
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support_min(&self) -> i64 {
        self.support_min
    }

    pub fn support_max(&self) -> i64 {
        self.support_min + self.weights.len() as i64 - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Total-variation norm, recomputed at construction.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.support_min;
        if i < 0 || i >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[i as usize]
        }
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn char_fn(&self, t: f64) -> Complex64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Complex64::from_polar(1.0, (self.support_min + i as i64) as f64 * t) * w)
            .sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.support_min, self.weights.iter().map(|w| w * c).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.support_min.min(other.support_min);
        let hi = self.support_max().max(other.support_max());
        let w = (lo..=hi).map(|k| self.get(k) + other.get(k)).collect();
        Self::new(lo, w)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.convolve_capped(other, DEFAULT_SUPPORT_CAP)
    }

    pub fn convolve_capped(&self, other: &Self, cap: usize) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let len = self.weights.len() + other.weights.len() - 1;
        if len > cap {
            return Err(Error::Resource { len, cap });
        }
        Ok(Self::new(
            self.support_min + other.support_min,
            convolve_slices(&self.weights, &other.weights),
        ))
    }

    pub fn restrict(&self, side: Side) -> Self {
        let w = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| {
                let k = self.support_min + i as i64;
                let keep = match side {
                    Side::NonPositive => k <= 0,
                    Side::Positive => k >= 1,
                };
                if keep {
                    w
                } else {
                    0.0
                }
            })
            .collect();
        Self::new(self.support_min, w)
    }

    /// Keeps only atoms in `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        if hi < lo {
            return Self::zero();
        }
        Self::new(lo, (lo..=hi).map(|k| self.get(k)).collect())
    }

    pub fn tv_distance(&self, other: &Self) -> f64 {
        self.sub(other).norm_bound
    }

    /// Converts to a nonnegative measure, failing on any negative atom
    /// below `-tol`; atoms in `[-tol, 0)` are clamped to zero.
    pub fn to_lattice(&self, tol: f64) -> Result<LatticeMeasure> {
        let mut w = self.weights.clone();
        for (i, x) in w.iter_mut().enumerate() {
            if *x < -tol {
                return Err(Error::InvalidMeasure {
                    atom: self.support_min + i as i64,
                    weight: *x,
                });
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        Ok(LatticeMeasure::from_raw(self.support_min, w, 0.0))
    }
}

impl From<&LatticeMeasure> for SignedLatticeMeasure {
    fn from(m: &LatticeMeasure) -> Self {
        m.to_signed()
    }
}

/// A truncated series together with a bound on the omitted remainder
/// in total variation.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesResult {
    pub value: SignedLatticeMeasure,
    pub truncation_bound: f64,
    pub terms: usize,
}

/// `Σ_{1≤n≤n_max} sⁿwⁿ/n`. The remainder is bounded by `Σ_{n>n_max} sⁿ/n`.
pub fn log_series(w: &LatticeMeasure, s: f64, n_max: usize) -> Result<SeriesResult> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Precondition(format!("s must lie in (0,1), got {s}")));
    }
    if n_max < 1 {
        return Err(Error::Precondition("n_max must be at least 1".into()));
    }
    if w.total_mass() > 1.0 + 1e-12 {
        return Err(Error::Precondition(format!(
            "log series needs mass at most 1, got {}",
            w.total_mass()
        )));
    }
    let base = w.weights();
    if base.is_empty() {
        return Ok(SeriesResult {
            value: SignedLatticeMeasure::zero(),
            truncation_bound: 0.0,
            terms: n_max,
        });
    }
    let mut p_lo = w.support_min();
    let mut power = base.to_vec();
    let mut acc_lo = p_lo;
    let mut acc: Vec<f64> = power.iter().map(|x| s * x).collect();
    let mut dropped = 0.0;
    let mut sn = s;
    for n in 2..=n_max {
        power = convolve_slices(&power, base);
        p_lo += w.support_min();
        // atoms this small cannot matter at any later power
        let first = power.iter().position(|&x| x.abs() >= POWER_TRIM).unwrap_or(power.len());
        let last = power.iter().rposition(|&x| x.abs() >= POWER_TRIM).map_or(first, |i| i + 1);
        let cut: f64 = power[..first].iter().chain(&power[last..]).map(|x| x.abs()).sum();
        power.truncate(last);
        power.drain(..first);
        p_lo += first as i64;
        sn *= s;
        let c = sn / n as f64;
        dropped += cut * sn / (1.0 - s);
        if power.is_empty() {
            break;
        }
        if p_lo < acc_lo {
            let grow = (acc_lo - p_lo) as usize;
            acc.splice(0..0, std::iter::repeat(0.0).take(grow));
            acc_lo = p_lo;
        }
        let off = (p_lo - acc_lo) as usize;
        if off + power.len() > acc.len() {
            acc.resize(off + power.len(), 0.0);
        }
        for (a, x) in acc[off..].iter_mut().zip(&power) {
            *a += c * x;
        }
    }
    Ok(SeriesResult {
        value: SignedLatticeMeasure::new(acc_lo, acc),
        truncation_bound: log_tail_bound(s, n_max) + dropped,
        terms: n_max,
    })
}

const POWER_TRIM: f64 = 1e-40;

/// Upper bound for `Σ_{n>n_max} sⁿ/n`.
pub fn log_tail_bound(s: f64, n_max: usize) -> f64 {
    let n1 = (n_max + 1) as f64;
    s.powf(n1) / (n1 * (1.0 - s))
}

/// `Σ_{0≤n≤n_max} wⁿ/n!` with remainder bound `e^{‖w‖}‖w‖^{n_max+1}/(n_max+1)!`.
pub fn exp_series(w: &SignedLatticeMeasure, n_max: usize) -> Result<SeriesResult> {
    let norm = w.norm_bound();
    if !norm.is_finite() {
        return Err(Error::Precondition("norm must be finite".into()));
    }
    let mut term = SignedLatticeMeasure::delta(0);
    let mut acc = term.clone();
    for n in 1..=n_max {
        term = term.convolve(w)?.scale(1.0 / n as f64);
        acc = acc.add(&term);
    }
    let mut bound = norm.exp();
    for k in 1..=(n_max + 1) {
        bound *= norm / k as f64;
    }
    Ok(SeriesResult {
        value: acc,
        truncation_bound: bound,
        terms: n_max + 1,
    })
}

/// [`exp_series`] restricted to atoms `≤ hi`. For `w` supported in `[0, ∞)`
/// the kept atoms are exactly those of the full series.
pub fn exp_series_below(w: &SignedLatticeMeasure, n_max: usize, hi: i64) -> Result<SeriesResult> {
    if !w.is_zero() && w.support_min() < 0 {
        return Err(Error::Precondition("windowed exponential needs support in [0, ∞)".into()));
    }
    let norm = w.norm_bound();
    if !norm.is_finite() {
        return Err(Error::Precondition("norm must be finite".into()));
    }
    let w = w.window(w.support_min().min(hi), hi);
    let mut term = SignedLatticeMeasure::delta(0);
    let mut acc = term.clone();
    for n in 1..=n_max {
        term = term.convolve(&w)?.scale(1.0 / n as f64).window(0, hi);
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term);
    }
    let mut bound = norm.exp();
    for k in 1..=(n_max + 1) {
        bound *= norm / k as f64;
    }
    Ok(SeriesResult {
        value: acc,
        truncation_bound: bound,
        terms: n_max + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn srw() -> LatticeMeasure {
        LatticeMeasure::from_points(&[(-1, 0.5), (1, 0.5)]).unwrap()
    }

    #[test]
    fn log_series_single_atom() {
        let r = log_series(&LatticeMeasure::dirac(1), 0.5, 40).unwrap();
        assert!((r.value.get(1) - 0.5).abs() < 1e-16);
        for n in 1..=40 {
            let want = 0.5f64.powi(n) / n as f64;
            assert!((r.value.get(n as i64) - want).abs() < 1e-18);
        }
    }

    #[test]
    fn log_series_mass_is_scalar_log() {
        let s = 0.7;
        let mu = LatticeMeasure::from_points(&[(-2, 0.3), (1, 0.5)]).unwrap();
        let r = log_series(&mu, s, 60).unwrap();
        let exact = -(1.0 - s * mu.mass()).ln();
        assert!((r.value.mass() - exact).abs() <= r.truncation_bound + 1e-14);
    }

    #[test]
    fn log_series_srw_coefficient_at_zero() {
        let s = 0.9;
        let r = log_series(&srw(), s, 50).unwrap();
        // central binomial oracle
        let mut want = 0.0;
        let mut c = 1.0; // binom(n, n/2) 2^-n for n = 0
        for m in 1..=25 {
            let n = 2 * m;
            c *= (n - 1) as f64 / n as f64;
            want += s.powi(n) * c / n as f64;
        }
        assert!((r.value.get(0) - want).abs() < 1e-14);
    }

    #[test]
    fn exp_of_zero_is_delta() {
        let r = exp_series(&SignedLatticeMeasure::zero(), 5).unwrap();
        assert_eq!(r.value, SignedLatticeMeasure::delta(0));
        assert_eq!(r.truncation_bound, 0.0);
    }

    #[test]
    fn exp_inverts_log() {
        let s = 0.4;
        let mu = LatticeMeasure::from_points(&[(-1, 0.25), (2, 0.75)]).unwrap();
        let l = log_series(&mu, s, 40).unwrap();
        let e = exp_series(&l.value.scale(-1.0), 30).unwrap();
        let want = SignedLatticeMeasure::delta(0).sub(&mu.to_signed().scale(s));
        let bound = e.truncation_bound + l.truncation_bound * std::f64::consts::E;
        assert!(e.value.tv_distance(&want) <= bound + 1e-12);
    }

    fn arb_small() -> impl Strategy<Value = SignedLatticeMeasure> {
        (-5i64..5, prop::collection::vec(-0.2f64..0.2, 1..6))
            .prop_map(|(lo, w)| SignedLatticeMeasure::new(lo, w))
    }

    proptest! {
        #[test]
        fn exp_is_a_homomorphism(a in arb_small(), b in arb_small()) {
            let lhs = exp_series(&a, 30).unwrap().value.convolve(&exp_series(&b, 30).unwrap().value).unwrap();
            let rhs = exp_series(&a.add(&b), 30).unwrap().value;
            prop_assert!(lhs.tv_distance(&rhs) <= 1e-10);
        }

        #[test]
        fn signed_convolution_commutes(a in arb_small(), b in arb_small(), c in arb_small()) {
            let ab = a.convolve(&b).unwrap();
            prop_assert!(ab.tv_distance(&b.convolve(&a).unwrap()) <= 1e-12);
            let l = ab.convolve(&c).unwrap();
            let r = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert!(l.tv_distance(&r) <= 1e-12);
        }

        #[test]
        fn norm_is_recomputable(a in arb_small()) {
            let n: f64 = a.weights().iter().map(|w| w.abs()).sum();
            prop_assert_eq!(n, a.norm_bound());
        }

        #[test]
        fn signed_restriction_is_exact(a in arb_small()) {
            let s = a.restrict(Side::NonPositive).add(&a.restrict(Side::Positive));
            for k in a.support_min()..=a.support_max() {
                prop_assert_eq!(s.get(k), a.get(k));
            }
        }
    }
}
