use std::sync::Arc;

use num_complex::Complex64;

use super::special::{hurwitz_zeta, polylog_real, zeta, PolylogCircle};
use super::LatticeMeasure;
use crate::error::{Error, Result};

/// A step law with an exactly known characteristic function.
///
/// Point lists are exact. The geometric and zeta families have infinite
/// support; [`Law::materialize`] cuts them to a window and records the
/// removed mass as `tail_mass`.
#[derive(Clone, Debug)]
pub enum Law {
    Points(LatticeMeasure),
    /// `p(1−p)^{k−1}` on `k ≥ 1`.
    Geometric { p: f64, window: i64 },
    /// `k^{−1−a}/ζ(1+a)` on `k ≥ 1`, or split evenly over `±k` when symmetric.
    Zeta {
        a: f64,
        symmetric: bool,
        window: i64,
        circle: Arc<PolylogCircle>,
    },
    Reflected(Box<Law>),
}

impl From<LatticeMeasure> for Law {
    fn from(m: LatticeMeasure) -> Self {
        Law::Points(m)
    }
}

impl Law {
    pub fn points(points: &[(i64, f64)]) -> Result<Self> {
        Ok(Law::Points(LatticeMeasure::from_points(points)?))
    }

    pub fn geometric(p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Precondition(format!("geometric p must lie in (0,1], got {p}")));
        }
        let q = 1.0 - p;
        let window = if q == 0.0 {
            1
        } else {
            ((1e-18f64).ln() / q.ln()).ceil().max(1.0) as i64
        };
        Ok(Law::Geometric { p, window })
    }

    pub fn zeta(a: f64, window: i64, symmetric: bool) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Precondition(format!("zeta exponent a must be positive, got {a}")));
        }
        if window < 1 {
            return Err(Error::Precondition("zeta window must be at least 1".into()));
        }
        Ok(Law::Zeta {
            a,
            symmetric,
            window,
            circle: Arc::new(PolylogCircle::new(1.0 + a)),
        })
    }

    pub fn reflected(self) -> Self {
        match self {
            Law::Reflected(inner) => *inner,
            Law::Points(m) => Law::Points(m.reflect()),
            other => Law::Reflected(Box::new(other)),
        }
    }

    pub fn pmf(&self, k: i64) -> f64 {
        match self {
            Law::Points(m) => m.get(k),
            Law::Geometric { p, .. } => {
                if k >= 1 {
                    p * (1.0 - p).powi((k - 1) as i32)
                } else {
                    0.0
                }
            }
            Law::Zeta { a, symmetric, circle, .. } => {
                let z = circle.zeta_s();
                if *symmetric {
                    if k == 0 {
                        0.0
                    } else {
                        0.5 * (k.unsigned_abs() as f64).powf(-1.0 - a) / z
                    }
                } else if k >= 1 {
                    (k as f64).powf(-1.0 - a) / z
                } else {
                    0.0
                }
            }
            Law::Reflected(inner) => inner.pmf(-k),
        }
    }

    /// `P(X ≥ k)` for `k ≥ 1` on one-sided positive laws.
    pub fn upper_tail(&self, k: i64) -> f64 {
        match self {
            Law::Points(m) => m.iter().filter(|&(j, _)| j >= k).map(|(_, w)| w).sum::<f64>(),
            Law::Geometric { p, .. } => {
                if k <= 1 {
                    1.0
                } else {
                    (1.0 - p).powi((k - 1) as i32)
                }
            }
            Law::Zeta { a, symmetric, circle, .. } => {
                let z = circle.zeta_s();
                let half = if *symmetric { 0.5 } else { 1.0 };
                if k <= 1 {
                    if !*symmetric {
                        1.0
                    } else if k == 1 {
                        0.5
                    } else {
                        1.0 - self.upper_tail(1 - k)
                    }
                } else {
                    half * hurwitz_zeta(1.0 + a, k as f64) / z
                }
            }
            Law::Reflected(inner) => inner.lower_tail(-k),
        }
    }

    /// `P(X ≤ k)`.
    pub fn lower_tail(&self, k: i64) -> f64 {
        match self {
            Law::Points(m) => m.iter().filter(|&(j, _)| j <= k).map(|(_, w)| w).sum::<f64>(),
            Law::Reflected(inner) => inner.upper_tail(-k),
            other => other.total_mass() - other.upper_tail(k + 1),
        }
    }

    pub fn total_mass(&self) -> f64 {
        match self {
            Law::Points(m) => m.total_mass(),
            Law::Reflected(inner) => inner.total_mass(),
            _ => 1.0,
        }
    }

    /// Mean, possibly infinite; NaN when undefined.
    pub fn mean(&self) -> f64 {
        match self {
            Law::Points(m) => m.mean(),
            Law::Geometric { p, .. } => 1.0 / p,
            Law::Zeta { a, symmetric, circle, .. } => {
                if *symmetric {
                    if *a > 1.0 {
                        0.0
                    } else {
                        f64::NAN
                    }
                } else if *a > 1.0 {
                    zeta(*a) / circle.zeta_s()
                } else {
                    f64::INFINITY
                }
            }
            Law::Reflected(inner) => -inner.mean(),
        }
    }

    /// True when the mean is known to be finite. Point lists always have one.
    pub fn has_finite_mean(&self) -> bool {
        self.mean().is_finite()
    }

    /// `E(e^{−X})` for laws supported on `ℕ*`.
    pub fn laplace_at_one(&self) -> f64 {
        match self {
            Law::Points(m) => m.iter().map(|(k, w)| w * (-(k as f64)).exp()).sum(),
            Law::Geometric { p, .. } => {
                let e = (-1.0f64).exp();
                p * e / (1.0 - (1.0 - p) * e)
            }
            Law::Zeta { a, circle, .. } => polylog_real(1.0 + a, (-1.0f64).exp()) / circle.zeta_s(),
            Law::Reflected(inner) => {
                // only meaningful on ℕ*; kept for completeness
                let m = inner.materialize();
                m.iter().map(|(k, w)| w * (k as f64).exp()).sum()
            }
        }
    }

    pub fn char_fn(&self, t: f64) -> Complex64 {
        match self {
            Law::Points(m) => m.char_fn(t),
            Law::Reflected(inner) => inner.char_fn(t).conj(),
            other => Complex64::new(other.total_mass(), 0.0) - other.one_minus_char(t),
        }
    }

    /// `1 − μ̂(t)` without cancellation near `t = 0`.
    pub fn one_minus_char(&self, t: f64) -> Complex64 {
        match self {
            Law::Points(m) => m.one_minus_char(t),
            Law::Geometric { p, .. } => {
                let q = 1.0 - p;
                let h = (0.5 * t).sin();
                let num = Complex64::new(2.0 * h * h, -t.sin());
                let den = Complex64::new(1.0 - q * t.cos(), -q * t.sin());
                num / den
            }
            Law::Zeta { symmetric, circle, .. } => {
                let d = -circle.minus_zeta(t) / circle.zeta_s();
                if *symmetric {
                    Complex64::new(d.re, 0.0)
                } else {
                    d
                }
            }
            Law::Reflected(inner) => inner.one_minus_char(t).conj(),
        }
    }

    /// Smallest and largest atoms; `None` for an unbounded side.
    pub fn support_bounds(&self) -> (Option<i64>, Option<i64>) {
        match self {
            Law::Points(m) => (Some(m.support_min()), Some(m.support_max())),
            Law::Geometric { .. } => (Some(1), None),
            Law::Zeta { symmetric, .. } => {
                if *symmetric {
                    (None, None)
                } else {
                    (Some(1), None)
                }
            }
            Law::Reflected(inner) => {
                let (lo, hi) = inner.support_bounds();
                (hi.map(|h| -h), lo.map(|l| -l))
            }
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        matches!(self.support_bounds().0, Some(lo) if lo >= 1)
    }

    pub fn is_strictly_negative(&self) -> bool {
        matches!(self.support_bounds().1, Some(hi) if hi <= -1)
    }

    pub fn gcd_support(&self) -> u64 {
        match self {
            Law::Points(m) => m.gcd_support(),
            Law::Reflected(inner) => inner.gcd_support(),
            _ => 1,
        }
    }

    pub fn is_dirac(&self) -> bool {
        match self {
            Law::Points(m) => m.is_dirac(),
            Law::Geometric { p, .. } => *p == 1.0,
            Law::Zeta { .. } => false,
            Law::Reflected(inner) => inner.is_dirac(),
        }
    }

    /// The tail exponent `a` of zeta families, if any.
    pub fn tail_exponent(&self) -> Option<f64> {
        match self {
            Law::Zeta { a, .. } => Some(*a),
            Law::Reflected(inner) => inner.tail_exponent(),
            _ => None,
        }
    }

    pub fn window(&self) -> Option<i64> {
        match self {
            Law::Points(_) => None,
            Law::Geometric { window, .. } | Law::Zeta { window, .. } => Some(*window),
            Law::Reflected(inner) => inner.window(),
        }
    }

    /// Finite-support version with the truncated mass recorded as tail.
    pub fn materialize(&self) -> LatticeMeasure {
        match self {
            Law::Points(m) => m.clone(),
            Law::Geometric { p, window } => {
                let q = 1.0 - p;
                let w: Vec<f64> = (0..*window).map(|i| p * q.powi(i as i32)).collect();
                LatticeMeasure::from_raw(1, w, q.powi(*window as i32))
            }
            Law::Zeta { a, symmetric, window, circle } => {
                let s = 1.0 + a;
                let z = circle.zeta_s();
                let tail = hurwitz_zeta(s, (*window + 1) as f64) / z;
                if *symmetric {
                    let n = *window as usize;
                    let mut w = vec![0.0; 2 * n + 1];
                    for k in 1..=n {
                        let v = 0.5 * (k as f64).powf(-s) / z;
                        w[n + k] = v;
                        w[n - k] = v;
                    }
                    LatticeMeasure::from_raw(-*window, w, tail)
                } else {
                    let w = (1..=*window).map(|k| (k as f64).powf(-s) / z).collect();
                    LatticeMeasure::from_raw(1, w, tail)
                }
            }
            Law::Reflected(inner) => inner.materialize().reflect(),
        }
    }

    /// Short human-readable label used in reports.
    pub fn label(&self) -> String {
        match self {
            Law::Points(m) => {
                let parts: Vec<String> = m.iter().map(|(k, w)| format!("{w}@{k}")).collect();
                format!("points[{}]", parts.join(","))
            }
            Law::Geometric { p, .. } => format!("geometric(p={p})"),
            Law::Zeta { a, symmetric, window, .. } => {
                if *symmetric {
                    format!("zeta(a={a},symmetric,window={window})")
                } else {
                    format!("zeta(a={a},window={window})")
                }
            }
            Law::Reflected(inner) => format!("reflect({})", inner.label()),
        }
    }
}
