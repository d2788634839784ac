//! Clipped Parseval pairing of even trigonometric polynomials.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{precondition, Result};
use crate::quad::adaptive;

/// `ĉ_0 + 2 Σ_{n≥1} ĉ_n cos(nt)`.
pub fn trig_poly(c: &[f64], t: f64) -> f64 {
    let mut v = c.first().copied().unwrap_or(0.0);
    for (n, &a) in c.iter().enumerate().skip(1) {
        v += 2.0 * a * (n as f64 * t).cos();
    }
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct FejerReport {
    /// `(1/2π)∫ f·(g ∧ M)`.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `Σ_{n∈ℤ} f̂(n)ĝ(n)`.
    pub rhs: f64,
    pub gap: f64,
    pub tol: f64,
    pub clipping_active: bool,
    pub holds: bool,
}

fn grid_min(c: &[f64], points: usize) -> f64 {
    (0..=points)
        .map(|j| trig_poly(c, PI * j as f64 / points as f64))
        .fold(f64::INFINITY, f64::min)
}

/// Checks `(1/2π)∫ f·(g ∧ M) ≤ Σ f̂(n)ĝ(n)` for even `f, g ≥ 0` given by
/// nonnegative cosine coefficients. Without clipping both sides agree,
/// and the left side is computed by an exact trapezoid rule.
pub fn fejer_bound_check(f: &[f64], g: &[f64], m: f64, tol: f64) -> Result<FejerReport> {
    for (name, c) in [("f", f), ("g", g)] {
        if let Some((n, &x)) = c.iter().enumerate().find(|(_, &x)| !(x >= 0.0 && x.is_finite())) {
            return precondition(format!("{name} coefficient {n} is {x}, must be nonnegative"));
        }
    }
    let deg = f.len().max(g.len()).max(1);
    let scale: f64 = f.iter().chain(g).sum::<f64>().max(f64::MIN_POSITIVE);
    for (name, c) in [("f", f), ("g", g)] {
        if grid_min(c, 64 * deg) < -1e-12 * scale {
            return precondition(format!("{name} takes negative values"));
        }
    }
    let rhs = f
        .iter()
        .zip(g)
        .enumerate()
        .map(|(n, (a, b))| if n == 0 { a * b } else { 2.0 * a * b })
        .sum::<f64>();
    let gmax = trig_poly(g, 0.0);
    let clipping_active = m < gmax;
    let (lhs, lhs_error) = if !clipping_active {
        // trapezoid on N > deg(f·g) nodes is exact
        let n = 2 * (f.len() + g.len()) + 2;
        let s: f64 = (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                trig_poly(f, t) * trig_poly(g, t)
            })
            .sum();
        (s / n as f64, 0.0)
    } else {
        clipped_integral(f, g, m, deg)
    };
    let gap = rhs - lhs;
    Ok(FejerReport {
        lhs,
        lhs_error,
        rhs,
        gap,
        tol,
        clipping_active,
        holds: lhs <= rhs + tol,
    })
}

fn clipped_integral(f: &[f64], g: &[f64], m: f64, deg: usize) -> (f64, f64) {
    let h = |t: f64| trig_poly(g, t) - m;
    let n = 256 * deg;
    let mut breaks = vec![0.0];
    let mut prev = h(0.0);
    for j in 1..=n {
        let t = PI * j as f64 / n as f64;
        let cur = h(t);
        if (prev > 0.0) != (cur > 0.0) {
            let (mut a, mut b) = (PI * (j - 1) as f64 / n as f64, t);
            for _ in 0..80 {
                let c = 0.5 * (a + b);
                if (h(c) > 0.0) == (prev > 0.0) {
                    a = c;
                } else {
                    b = c;
                }
            }
            breaks.push(0.5 * (a + b));
        }
        prev = cur;
    }
    breaks.push(PI);
    let integrand = |t: f64| trig_poly(f, t) * trig_poly(g, t).min(m);
    let mut value = 0.0;
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let r = adaptive(&integrand, w[0], w[1], 1e-15, 1e-15, 2000);
        value += r.value;
        error += r.error;
    }
    (value / PI, error / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fejer_coeffs(order: usize) -> Vec<f64> {
        (0..=order).map(|n| 1.0 - n as f64 / (order + 1) as f64).collect()
    }

    #[test]
    fn fejer_kernels_unclipped() {
        let c = fejer_coeffs(3);
        let r = fejer_bound_check(&c, &c, 1e6, 1e-12).unwrap();
        assert!(!r.clipping_active);
        let exact = 1.0 + 2.0 * (0.75f64.powi(2) + 0.25 + 0.0625);
        assert!((r.rhs - exact).abs() < 1e-14);
        assert!(r.gap.abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn constants() {
        let r = fejer_bound_check(&[1.0], &[1.0], 1.0, 1e-12).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-14 && (r.rhs - 1.0).abs() < 1e-14);
    }

    #[test]
    fn clipping_lowers_the_left_side() {
        let c = fejer_coeffs(3);
        let r = fejer_bound_check(&c, &c, 2.0, 1e-12).unwrap();
        assert!(r.clipping_active);
        assert!(r.holds && r.gap > 0.1);
    }

    #[test]
    fn clipped_matches_brute_force() {
        let f = [1.0, 0.3, 0.1];
        let g = [1.0, 0.4, 0.05];
        let m = 1.5;
        let r = fejer_bound_check(&f, &g, m, 1e-12).unwrap();
        let n = 400_000;
        let bf: f64 = (0..n)
            .map(|j| {
                let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
                trig_poly(&f, t) * trig_poly(&g, t).min(m)
            })
            .sum::<f64>()
            / n as f64;
        assert!((r.lhs - bf).abs() < 1e-9, "{} {}", r.lhs, bf);
    }

    #[test]
    fn rejects_negative_inputs() {
        assert!(fejer_bound_check(&[1.0, -0.1], &[1.0], 1.0, 1e-12).is_err());
        // nonnegative coefficients yet f(π) < 0
        assert!(fejer_bound_check(&[0.1, 1.0], &[1.0], 1.0, 1e-12).is_err());
    }

    proptest! {
        #[test]
        fn bound_holds(
            fr in prop::collection::vec(0.0f64..1.0, 1..8),
            gr in prop::collection::vec(0.0f64..1.0, 1..8),
            frac in 0.1f64..1.5,
        ) {
            // lift the constant term so both polynomials are nonnegative
            let lift = |mut c: Vec<f64>| { c[0] += 2.0 * c[1..].iter().sum::<f64>(); c };
            let f = lift(fr);
            let g = lift(gr);
            let m = frac * trig_poly(&g, 0.0);
            let r = fejer_bound_check(&f, &g, m, 1e-12).unwrap();
            prop_assert!(r.holds, "{:?}", r);
            if !r.clipping_active {
                prop_assert!(r.gap.abs() < 1e-12);
            }
        }
    }
}
