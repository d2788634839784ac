use super::*;
use crate::greens::green_finite;

fn pts(p: &[(i64, f64)]) -> Law {
    Law::points(p).unwrap()
}

#[test]
fn preconditions() {
    assert!(spitzer_integral(&pts(&[(1, 1.0)]), 1e-8).is_err());
    assert!(spitzer_integral(&pts(&[(-2, 0.5), (2, 0.5)]), 1e-8).is_err());
    assert!(spitzer_integral(&pts(&[(-1, 0.5), (1, 0.4)]), 1e-8).is_err());
}

#[test]
fn simple_walk_diverges() {
    let q = spitzer_integral(&pts(&[(-1, 0.5), (1, 0.5)]), 1e-8).unwrap();
    assert_eq!(q.verdict, Verdict::Divergent);
    assert!((q.exponent.unwrap() - 2.0).abs() < 1e-3);
}

#[test]
fn drift_walk_sandwich() {
    let mu = pts(&[(-1, 0.25), (1, 0.75)]);
    let q = spitzer_integral(&mu, 1e-9).unwrap();
    assert_eq!(q.verdict, Verdict::Converged);
    let g = green_finite(&WalkSpec::homogeneous(mu).unwrap(), 10_000, 0).unwrap().get(0);
    assert!((g - 2.0).abs() < 1e-9);
    assert!(PI * g <= q.value && q.value <= 2.0 * PI * g, "{}", q.value);
}

#[test]
fn integrand_is_mirror_symmetric() {
    let laws = [
        pts(&[(-1, 0.25), (1, 0.75)]),
        pts(&[(-3, 0.2), (1, 0.5), (2, 0.3)]),
        Law::zeta(0.8, 1000, true).unwrap(),
        Law::geometric(0.4).unwrap(),
    ];
    for mu in &laws {
        for j in 1..50 {
            let t = 0.06 * j as f64;
            let a = spitzer_integrand(mu, t);
            let b = spitzer_integrand(mu, 2.0 * PI - t);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{a} {b}");
        }
    }
}

#[test]
fn classification_examples() {
    let r = classify_homogeneous(&pts(&[(-1, 0.5), (1, 0.5)]), 1e-8).unwrap();
    assert_eq!(r.regime, Regime::NullRecurrent);
    assert_eq!(r.recurrent, Some(true));
    let r = classify_homogeneous(&pts(&[(-1, 0.3), (1, 0.7)]), 1e-8).unwrap();
    assert_eq!(r.regime, Regime::Transient);
    let ratio = r.find("sandwich-ratio").unwrap().value;
    assert!((1.0..=2.0).contains(&ratio), "{ratio}");
}

#[test]
fn symmetric_heavy_tail_is_transient() {
    // Re(1 − μ̂) ~ c|t|^0.8, so the integrand ~ |t|^{−0.8}
    let mu = Law::zeta(0.8, 1 << 20, true).unwrap();
    let q = spitzer_integral(&mu, 1e-8).unwrap();
    assert_eq!(q.verdict, Verdict::Converged);
    assert!((q.exponent.unwrap() - 0.8).abs() < 0.02);
    // the Cauchy-like a = 1 case is recurrent
    let q = spitzer_integral(&Law::zeta(1.0, 1 << 20, true).unwrap(), 1e-8).unwrap();
    assert_eq!(q.verdict, Verdict::Divergent);
}

#[test]
fn chung_fuchs_positive_steps() {
    let mu = pts(&[(1, 0.5), (2, 0.5)]);
    let cf = chung_fuchs_limit(&mu, &default_s_schedule(), 1e-8).unwrap();
    assert_eq!(cf.verdict, Verdict::Converged);
    assert!((cf.limit - 1.0).abs() < 1e-8, "{}", cf.limit);
    assert!((cf.at_one.value - 2.0 / 3.0).abs() < 1e-8, "{}", cf.at_one.value);
}

#[test]
fn chung_fuchs_regimes() {
    let cf = chung_fuchs_limit(&pts(&[(-1, 0.5), (1, 0.5)]), &default_s_schedule(), 1e-6).unwrap();
    assert_eq!(cf.verdict, Verdict::Divergent);
    let cf = chung_fuchs_limit(&pts(&[(-1, 0.3), (1, 0.7)]), &default_s_schedule(), 1e-6).unwrap();
    assert_eq!(cf.verdict, Verdict::Converged);
    assert!((cf.limit - 2.5).abs() < 1e-3, "{}", cf.limit);
}

#[test]
fn delta_examples() {
    let d = delta_analytic(&pts(&[(-1, 0.5), (1, 0.5)]), 1, 1e-8).unwrap();
    assert!((d.value - 2.0).abs() < 1e-8);
    let mu = pts(&[(1, 0.5), (2, 0.5)]);
    let d = delta_analytic(&mu, 40, 1e-9).unwrap();
    assert!((d.value - 4.0 / 3.0).abs() < 1e-6, "{}", d.value);
}

#[test]
fn renewal_coefficients() {
    let mu = pts(&[(1, 0.5), (2, 0.5)]);
    let c = fourier_coefficient(&mu, 1, Kernel::Cosine, 1e-9).unwrap();
    assert!((c.value + 1.0 / 6.0).abs() < 1e-7, "{}", c.value);
    let s = fourier_coefficient(&mu, 4, Kernel::Sine, 1e-9).unwrap();
    assert!((s.value - 11.0 / 16.0).abs() < 1e-7, "{}", s.value);
    let d = pts(&[(1, 1.0)]);
    for x in 1..5 {
        assert!(fourier_coefficient(&d, x, Kernel::Cosine, 1e-9).unwrap().value.abs() < 1e-7);
        assert!((fourier_coefficient(&d, x, Kernel::Sine, 1e-9).unwrap().value - 1.0).abs() < 1e-7);
    }
}

#[test]
fn identities() {
    let d = pts(&[(1, 1.0)]);
    let h = identity_check(&d, Identity::Herglotz, 1e-8).unwrap();
    assert!(h.pass && (h.lhs - 0.5).abs() < 1e-9);
    let h = identity_check(&pts(&[(1, 0.5), (2, 0.5)]), Identity::Herglotz, 1e-8).unwrap();
    assert!(h.pass && (h.rhs - 2.0 / 3.0).abs() < 1e-15);
    let v = identity_check(&d, Identity::Varia, 1e-8).unwrap();
    let e = (-1.0f64).exp();
    assert!((v.rhs - (0.5f64.tanh() / (1.0 - e) - 0.5)).abs() < 1e-15);
    assert!(v.pass, "{v:?}");
}

#[test]
fn pairing_is_monotone_for_mirrored_factors() {
    let mu = Law::zeta(0.3, 1 << 20, false).unwrap();
    let nu = mu.clone().reflected();
    let mut prev = 0.0;
    for k in 1..12 {
        let s = 1.0 - 0.5f64.powi(k);
        let v = regularized_pairing(&mu, &nu, s, 1e-10).unwrap().value;
        assert!(v.is_finite() && v >= prev);
        prev = v;
    }
    let full = inverse_square_integral(&mu, 1e-10);
    assert!(full.is_finite() && prev <= full.value);
}

#[test]
fn hardy_trend_is_bounded_for_finite_mean() {
    let tr = hardy_l2_trend(&pts(&[(1, 0.5), (2, 0.5)]), 40);
    assert!(tr.convergence.declared);
    let tr = root_integrability_trend(&Law::zeta(0.7, 1 << 20, false).unwrap(), 60);
    assert!(tr.convergence.declared, "{:?}", tr.values.last());
}
