//! Measures on the integer lattice.
//!
//! [`LatticeMeasure`] is a nonnegative, finitely supported measure that may
//! carry truncated tail mass. [`SignedLatticeMeasure`] is the element of the
//! convolution algebra used by the exponential and logarithm series.
//! [`Law`] wraps the parametric families whose characteristic functions are
//! known in closed form.

mod law;
mod signed;
pub mod special;

pub use law::Law;
pub use signed::{exp_series, exp_series_below, log_series, log_tail_bound, SeriesResult, SignedLatticeMeasure};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default upper bound on the number of atoms of any convolution result.
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 24;

/// Which half-line a restriction keeps. Zero belongs to the nonpositive side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    NonPositive,
    Positive,
}

/// Nonnegative measure on ℤ with finite support and optional tail mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticeMeasure {
    support_min: i64,
    weights: Vec<f64>,
    tail_mass: f64,
}

impl LatticeMeasure {
    /// Builds a measure whose atom `support_min + i` has weight `weights[i]`.
    pub fn new(support_min: i64, weights: Vec<f64>) -> Result<Self> {
        Self::with_tail(support_min, weights, 0.0)
    }

    pub fn with_tail(support_min: i64, weights: Vec<f64>, tail_mass: f64) -> Result<Self> {
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidMeasure {
                    atom: support_min + i as i64,
                    weight: w,
                });
            }
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0) {
            return Err(Error::Precondition(format!(
                "tail mass must be finite and nonnegative, got {tail_mass}"
            )));
        }
        Ok(Self::from_raw(support_min, weights, tail_mass))
    }

    /// Accepts `(atom, weight)` pairs in any order; repeated atoms add up.
    pub fn from_points(points: &[(i64, f64)]) -> Result<Self> {
        for &(k, w) in points {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidMeasure { atom: k, weight: w });
            }
        }
        let Some(lo) = points.iter().map(|p| p.0).min() else {
            return Ok(Self::zero());
        };
        let hi = points.iter().map(|p| p.0).max().unwrap();
        let len = (hi - lo) as usize + 1;
        if len > DEFAULT_SUPPORT_CAP {
            return Err(Error::Resource {
                len,
                cap: DEFAULT_SUPPORT_CAP,
            });
        }
        let mut weights = vec![0.0; len];
        for &(k, w) in points {
            weights[(k - lo) as usize] += w;
        }
        Ok(Self::from_raw(lo, weights, 0.0))
    }

    /// Trusted constructor: trims but does not validate.
    pub(crate) fn from_raw(support_min: i64, mut weights: Vec<f64>, tail_mass: f64) -> Self {
        let first = weights.iter().position(|&w| w != 0.0);
        let Some(first) = first else {
            return Self {
                support_min: 0,
                weights: Vec::new(),
                tail_mass,
            };
        };
        let last = weights.iter().rposition(|&w| w != 0.0).unwrap();
        weights.truncate(last + 1);
        weights.drain(..first);
        Self {
            support_min: support_min + first as i64,
            weights,
            tail_mass,
        }
    }

    pub fn dirac(k: i64) -> Self {
        Self {
            support_min: k,
            weights: vec![1.0],
            tail_mass: 0.0,
        }
    }

    pub fn zero() -> Self {
        Self {
            support_min: 0,
            weights: Vec::new(),
            tail_mass: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn support_min(&self) -> i64 {
        self.support_min
    }

    /// Largest atom; equals `support_min - 1` for the zero measure.
    pub fn support_max(&self) -> i64 {
        self.support_min + self.weights.len() as i64 - 1
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn get(&self, k: i64) -> f64 {
        let i = k - self.support_min;
        if i < 0 || i >= self.weights.len() as i64 {
            0.0
        } else {
            self.weights[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let lo = self.support_min;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(move |(i, &w)| (lo + i as i64, w))
    }

    /// Mass carried by the explicit atoms.
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Explicit mass plus truncated tail mass.
    pub fn total_mass(&self) -> f64 {
        self.mass() + self.tail_mass
    }

    /// First moment over the explicit atoms.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(k, w)| k as f64 * w).sum()
    }

    pub fn second_moment(&self) -> f64 {
        self.iter().map(|(k, w)| (k as f64).powi(2) * w).sum()
    }

    pub fn is_dirac(&self) -> bool {
        self.iter().count() == 1
    }

    /// gcd of the absolute values of the support points (0 for δ₀ or zero).
    pub fn gcd_support(&self) -> u64 {
        self.iter().fold(0u64, |g, (k, _)| gcd(g, k.unsigned_abs()))
    }

    pub fn char_fn(&self, t: f64) -> Complex64 {
        self.iter()
            .map(|(k, w)| Complex64::from_polar(w, k as f64 * t))
            .sum()
    }

    /// `1 − ŵ(t)` evaluated without cancellation near `t = 0`.
    pub fn one_minus_char(&self, t: f64) -> Complex64 {
        let mut acc = Complex64::new(1.0 - self.mass(), 0.0);
        for (k, w) in self.iter() {
            let u = k as f64 * t;
            let s = (0.5 * u).sin();
            acc += Complex64::new(2.0 * w * s * s, -w * u.sin());
        }
        acc
    }

    pub fn reflect(&self) -> Self {
        let mut weights = self.weights.clone();
        weights.reverse();
        Self {
            support_min: -self.support_max(),
            weights,
            tail_mass: self.tail_mass,
        }
    }

    pub fn restrict(&self, side: Side) -> Self {
        let keep = |k: i64| match side {
            Side::NonPositive => k <= 0,
            Side::Positive => k >= 1,
        };
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(i, &w)| if keep(self.support_min + i as i64) { w } else { 0.0 })
            .collect();
        Self::from_raw(self.support_min, weights, 0.0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_raw(
            self.support_min,
            self.weights.iter().map(|w| w * c).collect(),
            self.tail_mass * c,
        )
    }

    /// Rescales to unit total mass, keeping the tail share.
    pub fn normalized(&self) -> Result<Self> {
        let m = self.total_mass();
        if m <= 0.0 {
            return Err(Error::Precondition("cannot normalize the zero measure".into()));
        }
        Ok(self.scale(1.0 / m))
    }

    /// `(1 − ε)μ + εδ₀`.
    pub fn lazify(&self, eps: f64) -> Self {
        let lo = self.support_min.min(0);
        let hi = self.support_max().max(0);
        let mut weights = vec![0.0; (hi - lo + 1) as usize];
        for (k, w) in self.iter() {
            weights[(k - lo) as usize] = (1.0 - eps) * w;
        }
        weights[(-lo) as usize] += eps;
        Self::from_raw(lo, weights, (1.0 - eps) * self.tail_mass)
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
        let mut w = convolve_slices(&self.weights, &other.weights);
        for x in &mut w {
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let tail = self.tail_mass * other.total_mass() + other.tail_mass * self.mass();
        Ok(Self::from_raw(self.support_min + other.support_min, w, tail))
    }

    pub fn to_signed(&self) -> SignedLatticeMeasure {
        SignedLatticeMeasure::new(self.support_min, self.weights.clone())
    }

    /// Σ|a(k) − b(k)| over the explicit atoms.
    pub fn tv_distance(&self, other: &Self) -> f64 {
        if self.is_zero() && other.is_zero() {
            return 0.0;
        }
        let lo = self.support_min.min(other.support_min);
        let hi = self.support_max().max(other.support_max());
        (lo..=hi).map(|k| (self.get(k) - other.get(k)).abs()).sum()
    }

    /// Constants `(α, t₀)` with `Re(1 − μ̂(t)) ≥ αt²` for `|t| ≤ t₀`,
    /// from `1 − cos u ≥ 2u²/π²` on `|u| ≤ π` applied to atoms with `|k| < m`.
    pub fn quadratic_lower_bound(&self, m: Option<i64>) -> Option<(f64, f64)> {
        let m = m.unwrap_or_else(|| self.iter().map(|(k, _)| k.abs()).max().unwrap_or(0) + 1);
        let inner: Vec<(i64, f64)> = self
            .iter()
            .filter(|&(k, _)| k != 0 && k.abs() < m)
            .collect();
        if inner.is_empty() {
            return None;
        }
        let second: f64 = inner.iter().map(|&(k, w)| (k as f64).powi(2) * w).sum();
        let alpha = 2.0 / std::f64::consts::PI.powi(2) * second;
        let t0 = std::f64::consts::PI / (m - 1).max(1) as f64;
        Some((alpha, t0))
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const FFT_THRESHOLD: usize = 64;

/// Linear convolution of two coefficient slices, direct or by FFT.
pub fn convolve_slices(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let n = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= FFT_THRESHOLD {
        let mut out = vec![0.0; n];
        let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        for (i, &x) in short.iter().enumerate() {
            if x == 0.0 {
                continue;
            }
            for (o, &y) in out[i..].iter_mut().zip(long) {
                *o += x * y;
            }
        }
        return out;
    }
    FftConvolver::new().convolve(a, b)
}

/// FFT convolution that reuses its plans across calls.
pub struct FftConvolver {
    planner: FftPlanner<f64>,
}

impl Default for FftConvolver {
    fn default() -> Self {
        Self::new()
    }
}

impl FftConvolver {
    pub fn new() -> Self {
        Self {
            planner: FftPlanner::new(),
        }
    }

    pub fn convolve(&mut self, a: &[f64], b: &[f64]) -> Vec<f64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let n = a.len() + b.len() - 1;
        let size = n.next_power_of_two();
        let fwd = self.planner.plan_fft_forward(size);
        let inv = self.planner.plan_fft_inverse(size);
        // pack both real inputs into one complex transform
        let mut z: Vec<Complex64> = (0..size)
            .map(|i| Complex64::new(a.get(i).copied().unwrap_or(0.0), b.get(i).copied().unwrap_or(0.0)))
            .collect();
        fwd.process(&mut z);
        let mut prod = vec![Complex64::new(0.0, 0.0); size];
        for k in 0..size {
            let zk = z[k];
            let zc = z[(size - k) % size].conj();
            let fa = (zk + zc) * 0.5;
            let fb = (zk - zc) * Complex64::new(0.0, -0.5);
            prod[k] = fa * fb;
        }
        inv.process(&mut prod);
        let scale = 1.0 / size as f64;
        prod[..n].iter().map(|c| c.re * scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn srw() -> LatticeMeasure {
        LatticeMeasure::from_points(&[(-1, 0.5), (1, 0.5)]).unwrap()
    }

    #[test]
    fn negative_weight_names_the_atom() {
        let err = LatticeMeasure::from_points(&[(3, -0.1)]).unwrap_err();
        assert_eq!(err, Error::InvalidMeasure { atom: 3, weight: -0.1 });
    }

    #[test]
    fn trimming_drops_end_zeros() {
        let m = LatticeMeasure::new(-2, vec![0.0, 0.5, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(m.support_min(), -1);
        assert_eq!(m.support_max(), 1);
        assert_eq!(m.weights(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn dirac_is_identity() {
        let mu = LatticeMeasure::from_points(&[(-2, 0.2), (1, 0.3), (4, 0.5)]).unwrap();
        let c = LatticeMeasure::dirac(0).convolve(&mu).unwrap();
        assert!(c.tv_distance(&mu) < 1e-15);
    }

    #[test]
    fn srw_squared() {
        let c = srw().convolve(&srw()).unwrap();
        let want = LatticeMeasure::from_points(&[(-2, 0.25), (0, 0.5), (2, 0.25)]).unwrap();
        assert!(c.tv_distance(&want) < 1e-15);
    }

    #[test]
    fn geometric_square_matches_double_sum() {
        let g = Law::geometric(0.5).unwrap().materialize();
        let sq = g.convolve(&g).unwrap();
        let brute: f64 = (1..3).map(|j| g.get(j) * g.get(3 - j)).sum();
        assert!((sq.get(3) - brute).abs() < 1e-16);
        assert!((brute - 0.25).abs() < 1e-16);
    }

    #[test]
    fn restrict_examples() {
        let p = srw().restrict(Side::Positive);
        assert_eq!(p, LatticeMeasure::from_points(&[(1, 0.5)]).unwrap());
        assert!(LatticeMeasure::dirac(0).restrict(Side::Positive).is_zero());
        let cube = srw().convolve(&srw()).unwrap().convolve(&srw()).unwrap();
        let pos = cube.restrict(Side::Positive);
        let want = LatticeMeasure::from_points(&[(1, 0.375), (3, 0.125)]).unwrap();
        assert!(pos.tv_distance(&want) < 1e-16);
    }

    #[test]
    fn char_fn_examples() {
        let t = 0.7;
        let d = LatticeMeasure::dirac(1).char_fn(t);
        assert!((d - Complex64::from_polar(1.0, t)).norm() < 1e-15);
        assert!((srw().char_fn(t).re - t.cos()).abs() < 1e-15);
        let mu = LatticeMeasure::from_points(&[(-3, 0.1), (2, 0.4)]).unwrap();
        assert!((mu.char_fn(0.0).re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fft_path_matches_direct() {
        let a: Vec<f64> = (0..300).map(|i| ((i * 7 % 13) as f64) / 13.0).collect();
        let b: Vec<f64> = (0..200).map(|i| ((i * 5 % 11) as f64) / 11.0).collect();
        let fast = convolve_slices(&a, &b);
        let mut slow = vec![0.0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        let err: f64 = fast.iter().zip(&slow).map(|(x, y)| (x - y).abs()).sum();
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn support_cap_is_reported() {
        let a = LatticeMeasure::new(0, vec![1.0; 10]).unwrap();
        let err = a.convolve_capped(&a, 15).unwrap_err();
        assert_eq!(err, Error::Resource { len: 19, cap: 15 });
    }

    #[test]
    fn lazify_keeps_mass() {
        let l = srw().lazify(0.01);
        assert!((l.mass() - 1.0).abs() < 1e-15);
        assert!((l.get(0) - 0.01).abs() < 1e-15);
    }

    fn arb_measure() -> impl Strategy<Value = LatticeMeasure> {
        (-25i64..25, prop::collection::vec(0.0f64..1.0, 1..50)).prop_map(|(lo, mut w)| {
            w[0] += 0.1;
            let s: f64 = w.iter().sum();
            for x in &mut w {
                *x /= s;
            }
            LatticeMeasure::new(lo, w).unwrap()
        })
    }

    proptest! {
        #[test]
        fn convolution_commutes_and_associates(a in arb_measure(), b in arb_measure(), c in arb_measure()) {
            let ab = a.convolve(&b).unwrap();
            let ba = b.convolve(&a).unwrap();
            prop_assert!(ab.tv_distance(&ba) <= 1e-12);
            let l = ab.convolve(&c).unwrap();
            let r = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert!(l.tv_distance(&r) <= 1e-12);
        }

        #[test]
        fn char_fn_is_multiplicative(a in arb_measure(), b in arb_measure(), ts in prop::collection::vec(-10.0f64..10.0, 100)) {
            let ab = a.convolve(&b).unwrap();
            for t in ts {
                let d = ab.char_fn(t) - a.char_fn(t) * b.char_fn(t);
                prop_assert!(d.norm() <= 1e-12);
            }
        }

        #[test]
        fn char_fn_is_periodic_and_bounded(a in arb_measure(), t in -10.0f64..10.0) {
            let z = a.char_fn(t);
            prop_assert!(z.norm() <= a.mass() + 1e-12);
            prop_assert!((z - a.char_fn(t + 2.0 * std::f64::consts::PI)).norm() <= 1e-11);
            prop_assert!((a.one_minus_char(t) - (1.0 - z)).norm() <= 1e-12);
        }

        #[test]
        fn restriction_decomposes_exactly(a in arb_measure()) {
            let n = a.restrict(Side::NonPositive);
            let p = a.restrict(Side::Positive);
            for k in a.support_min()..=a.support_max() {
                prop_assert_eq!(n.get(k) + p.get(k), a.get(k));
                prop_assert!(n.get(k) == 0.0 || p.get(k) == 0.0);
            }
        }

        #[test]
        fn quadratic_lower_bound_holds(a in arb_measure(), u in 0.0f64..1.0) {
            if a.is_dirac() || a.gcd_support() != 1 {
                return Ok(());
            }
            if let Some((alpha, t0)) = a.quadratic_lower_bound(None) {
                prop_assert!(alpha > 0.0 && t0 > 0.0);
                let t = u * t0;
                prop_assert!(a.one_minus_char(t).re >= alpha * t * t - 1e-14);
            }
        }
    }
}
