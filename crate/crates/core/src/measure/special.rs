//! Riemann and Hurwitz zeta functions and the polylogarithm on the unit
//! circle, as needed by the zeta-tail step laws.

use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

// B_2, B_4, ..., B_24
const BERNOULLI: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

/// Hurwitz zeta `Σ_{k≥0} (q+k)^{-s}` for `s > 0`, `s ≠ 1`, `q > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(q > 0.0);
    let n = (20.0 - q).ceil().max(0.0) as usize;
    let mut sum = 0.0;
    for k in (0..n).rev() {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + n as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // rising product s(s+1)...(s+2j-2) / (2j)! times a^{-s-2j+1}
    let mut fact = s / a.powf(s + 1.0) / 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        let term = b * fact;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        let m = 2.0 * (j + 1) as f64;
        fact *= (s + m - 1.0) * (s + m) / ((m + 1.0) * (m + 2.0) * a * a);
    }
    sum
}

/// Riemann zeta on the real line (`s ≠ 1`).
pub fn zeta(s: f64) -> f64 {
    if s == 0.0 {
        return -0.5;
    }
    if s >= 0.5 {
        return hurwitz_zeta(s, 1.0);
    }
    if s < 0.0 && s.fract() == 0.0 && (s as i64) % 2 == 0 {
        return 0.0;
    }
    // functional equation
    let r = 1.0 - s;
    2f64.powf(s) * PI.powf(s - 1.0) * (0.5 * PI * s).sin() * gamma(r) * zeta(r)
}

/// `Σ_{k≥1} x^k k^{-s}` for `0 ≤ x < 1`.
pub fn polylog_real(s: f64, x: f64) -> f64 {
    let mut sum = 0.0f64;
    let mut xk = x;
    let mut k = 1.0f64;
    while xk > 1e-20 * sum.max(1e-300) {
        sum += xk * k.powf(-s);
        xk *= x;
        k += 1.0;
    }
    sum
}

const CIRCLE_TERMS: usize = 90;

/// Precomputed expansion of `Li_s(e^{iθ}) − ζ(s)` around `θ = 0`,
/// valid and used for `|θ| ≤ π`.
#[derive(Clone, Debug)]
pub struct PolylogCircle {
    s: f64,
    integer: Option<u32>,
    gamma_factor: f64,
    zeta_s: f64,
    // ζ(s−k)/k! for k = 1..CIRCLE_TERMS; unused slot for the log term
    coeffs: Vec<f64>,
}

impl PolylogCircle {
    /// `s > 1`.
    pub fn new(s: f64) -> Self {
        assert!(s > 1.0, "expansion needs s > 1");
        let rounded = s.round();
        let integer = ((s - rounded).abs() < 1e-12).then_some(rounded as u32);
        let mut coeffs = vec![0.0; CIRCLE_TERMS + 1];
        let mut fact = 1.0;
        for (k, c) in coeffs.iter_mut().enumerate().skip(1) {
            fact *= k as f64;
            let arg = match integer {
                Some(n) if k as u32 == n - 1 => continue,
                Some(n) => n as f64 - k as f64,
                None => s - k as f64,
            };
            *c = zeta(arg) / fact;
        }
        let gamma_factor = if integer.is_some() { 0.0 } else { gamma(1.0 - s) };
        Self {
            s,
            integer,
            gamma_factor,
            zeta_s: zeta(s),
            coeffs,
        }
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn zeta_s(&self) -> f64 {
        self.zeta_s
    }

    /// `Li_s(e^{iθ}) − ζ(s)`, free of the cancellation near `θ = 0`.
    pub fn minus_zeta(&self, theta: f64) -> Complex64 {
        let mut th = theta.rem_euclid(2.0 * PI);
        if th > PI {
            th -= 2.0 * PI;
        }
        if th == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if th < 0.0 {
            return self.minus_zeta(-th).conj();
        }
        let it = Complex64::new(0.0, th);
        let mut acc = match self.integer {
            None => {
                Complex64::from_polar(self.gamma_factor * th.powf(self.s - 1.0), -0.5 * PI * (self.s - 1.0))
            }
            Some(_) => Complex64::new(0.0, 0.0),
        };
        let mut pw = Complex64::new(1.0, 0.0);
        let mut quiet = false;
        for k in 1..=CIRCLE_TERMS {
            pw *= it;
            let term = match self.integer {
                Some(n) if k as u32 == n - 1 => {
                    let mut fact = 1.0;
                    let mut harmonic = 0.0;
                    for j in 1..=k {
                        fact *= j as f64;
                        harmonic += 1.0 / j as f64;
                    }
                    let log = Complex64::new(th.ln(), -0.5 * PI);
                    pw / fact * (harmonic - log)
                }
                _ => pw * self.coeffs[k],
            };
            acc += term;
            // odd and even terms vanish separately for integer s, so look at pairs
            let small = term.norm() < 1e-19 * acc.norm();
            if k > 4 && small && quiet {
                break;
            }
            quiet = small;
        }
        if self.integer == Some(1) {
            let log = Complex64::new(th.ln(), -0.5 * PI);
            acc -= log;
        }
        acc
    }

    pub fn value(&self, theta: f64) -> Complex64 {
        self.minus_zeta(theta) + self.zeta_s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_known_values() {
        assert!((zeta(2.0) - PI * PI / 6.0).abs() < 1e-15);
        assert!((zeta(3.0) - 1.202_056_903_159_594_2).abs() < 1e-15);
        assert!((zeta(1.5) - 2.612_375_348_685_488).abs() < 1e-14);
        assert!((zeta(0.5) + 1.460_354_508_809_586_8).abs() < 1e-14);
        assert!((zeta(-1.0) + 1.0 / 12.0).abs() < 1e-15);
        assert!((zeta(-3.0) - 1.0 / 120.0).abs() < 1e-15);
        assert_eq!(zeta(-4.0), 0.0);
        assert!((zeta(-0.5) + 0.207_886_224_977_354_57).abs() < 1e-14);
    }

    #[test]
    fn hurwitz_known_values() {
        assert!((hurwitz_zeta(2.0, 2.0) - (PI * PI / 6.0 - 1.0)).abs() < 1e-15);
        assert!((hurwitz_zeta(2.0, 0.5) - PI * PI / 2.0).abs() < 1e-13);
        let direct: f64 = (0..100).map(|k| (1000.0 + k as f64).powf(-1.3)).sum::<f64>()
            + hurwitz_zeta(1.3, 1100.0);
        assert!((hurwitz_zeta(1.3, 1000.0) - direct).abs() < 1e-14);
    }

    #[test]
    fn dilog_real_part_is_quadratic() {
        let p = PolylogCircle::new(2.0);
        for &th in &[1e-6, 0.01, 0.5, 1.7, 3.0, 3.14] {
            let want = PI * PI / 6.0 - th * (2.0 * PI - th) / 4.0;
            assert!((p.value(th).re - want).abs() < 1e-14, "{th}");
        }
    }

    #[test]
    fn matches_direct_sums() {
        for &s in &[3.5, 4.0, 2.7] {
            let p = PolylogCircle::new(s);
            for &th in &[0.3, 1.1, 2.9, -0.8] {
                let mut direct = Complex64::new(0.0, 0.0);
                for k in 1..200_000 {
                    direct += Complex64::from_polar((k as f64).powf(-s), k as f64 * th);
                }
                let tol = 2.0 * 200_000f64.powf(1.0 - s);
                assert!((p.value(th) - direct).norm() < tol.max(1e-13), "s={s} th={th}");
            }
        }
    }

    #[test]
    fn small_angle_behaviour() {
        // Li_s(e^{iθ}) − ζ(s) ≈ Γ(1−s)(−iθ)^{s−1} as θ → 0 for 1 < s < 2
        let s = 1.3;
        let p = PolylogCircle::new(s);
        let th = 1e-12f64;
        let lead = Complex64::from_polar(gamma(1.0 - s) * th.powf(s - 1.0), -0.5 * PI * (s - 1.0));
        assert!((p.minus_zeta(th) / lead - 1.0).norm() < 1e-6);
    }

    #[test]
    fn polylog_real_geometric_case() {
        // Li_0(x) = x/(1−x)
        assert!((polylog_real(0.0, 0.3) - 0.3 / 0.7).abs() < 1e-15);
    }
}
