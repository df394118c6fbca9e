use proptest::prelude::*;
use rydberg_core::bounds::{
    coefficient_bound, convergence_ratio, density_ratio_bound, kappa, omega, BoundClass, BoundEnvelope,
};

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn kappa_increases(a in 0.01f64..500.0, step in 0.01f64..10.0) {
        let lo = kappa(a).unwrap();
        let hi = kappa(a + step).unwrap();
        prop_assert!(hi.log_kappa > lo.log_kappa);
    }

    #[test]
    fn residuals_vanish(a in 1e-3f64..1e7) {
        let k = kappa(a).unwrap();
        prop_assert!(k.tau_residual().abs() < 1e-13 * (1.0 + a));
    }

    #[test]
    fn envelope_grows_with_time(l in 4usize..20, t in 0.01f64..0.4) {
        let e = BoundEnvelope::new(l, 1, BoundClass::Density).unwrap();
        prop_assert!(e.log_evaluate(t * 1.1).unwrap() > e.log_evaluate(t).unwrap());
    }
}

#[test]
fn omega_grows_like_log() {
    for a in [1e6, 1e7, 1e8, 1e10, 1e12] {
        let r = omega(a).unwrap() / f64::ln(a);
        assert!((0.8..=1.2).contains(&r), "a = {a}: ω/ln a = {r}");
    }
}

#[test]
fn bound_ratio_diverges() {
    let mut previous = f64::NEG_INFINITY;
    let mut log_b = coefficient_bound(1, 1, BoundClass::Density).unwrap();
    for j in 2..=10_000 {
        let next = coefficient_bound(j, 1, BoundClass::Density).unwrap();
        let log_ratio = log_b - next;
        if j > 50 {
            assert!(log_ratio > previous, "b_(j-1)/b_j stopped growing at j = {j}");
        }
        previous = log_ratio;
        log_b = next;
    }
    // b_(j-1)/b_j ≈ ω_(2j-1) ω_(2j) / 36 ~ (ln 2j)² / 36
    let scale = f64::ln(20_000.0).powi(2) / 36.0;
    let ratio = previous.exp();
    assert!(ratio > 0.5 * scale && ratio < 2.0 * scale, "ratio {ratio} vs (ln 2j)²/36 = {scale}");
}

#[test]
fn envelope_ratio_respects_formula() {
    for l in 10..=40 {
        for t in [0.25, 0.5, 1.0] {
            let a = BoundEnvelope::new(l, 1, BoundClass::Density).unwrap().log_evaluate(t).unwrap();
            let b = BoundEnvelope::new(l - 1, 1, BoundClass::Density).unwrap().log_evaluate(t).unwrap();
            assert!(a - b <= density_ratio_bound(l, t).unwrap().ln(), "L={l} t={t}");
        }
    }
}

#[test]
fn convergence_ratio_decreases_in_size() {
    let mut last = f64::INFINITY;
    for l in [10, 20, 50, 100, 1000] {
        let r = convergence_ratio(l, 1, 1, 1.0).unwrap();
        assert!(r < last);
        last = r;
    }
    let r100 = convergence_ratio(100, 1, 1, 1.0).unwrap();
    assert!((r100 - 12.0 / 50f64.ln()).abs() < 1e-12);
}
