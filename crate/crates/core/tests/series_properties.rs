use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rydberg_core::algebra::{Budget, ModelSpec};
use rydberg_core::bounds::{coefficient_bound, BoundClass};
use rydberg_core::dynamics::taylor_oracle;
use rydberg_core::series::{
    boundary_deficit_q, correlation_coefficients, density_coefficients, observable_coefficients, rational_to_f64,
    universality_threshold,
};
use rydberg_core::{ObservableSpec, Rational};

fn b() -> Budget {
    Budget::default()
}

fn finite_model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (3usize..10, 1usize..3).prop_filter_map("λ_b < L", |(l, lb)| ModelSpec::ring(l, lb).ok()),
        (2usize..10, 1usize..3).prop_filter_map("valid", |(l, lb)| ModelSpec::line(l, lb).ok()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn ring_matches_infinite_line_below_threshold(l in 3usize..11, lb in 1usize..4) {
        prop_assume!(lb < l);
        let ring = ModelSpec::ring(l, lb).unwrap();
        let threshold = universality_threshold(&ring, &ObservableSpec::DensityPerSite).unwrap().min(6);
        let finite = density_coefficients(&ring, threshold, b()).unwrap().values();
        let universal = density_coefficients(&ModelSpec::infinite(lb).unwrap(), threshold, b()).unwrap().values();
        prop_assert_eq!(finite, universal);
    }

    #[test]
    fn first_coefficient_is_one(m in finite_model()) {
        let c = density_coefficients(&m, 1, b()).unwrap().values();
        prop_assert!(c[0].is_one());
    }

    #[test]
    fn oracle_agrees_with_symbolic(m in finite_model(), pick in 0usize..3, d in 2usize..4) {
        let obs = match pick {
            0 => ObservableSpec::DensityPerSite,
            1 => ObservableSpec::LocalNumber(1),
            _ => ObservableSpec::Correlation(d),
        };
        let symbolic = observable_coefficients(&m, &obs, 4, b());
        // correlations outside the symbolic domain are skipped
        if let Ok(symbolic) = symbolic {
            let oracle = taylor_oracle(&m, &obs, 4).unwrap().coefficients;
            prop_assert_eq!(symbolic.values(), oracle.values());
        }
    }

    #[test]
    fn coefficients_within_bounds(m in finite_model()) {
        let lb = m.blockade_range();
        let c = density_coefficients(&m, 5, b()).unwrap().values();
        for (i, v) in c.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let log_b = coefficient_bound(i + 1, lb, BoundClass::Density).unwrap();
            prop_assert!(rational_to_f64(&v.abs()).ln() <= log_b, "{} c_{} = {}", m, i + 1, v);
        }
    }
}

#[test]
fn second_ring_coefficient_is_size_independent() {
    for l in 3..=12 {
        let c = density_coefficients(&ModelSpec::ring(l, 1).unwrap(), 2, b()).unwrap().values();
        assert_eq!(c[1], Rational::from_integer((-1).into()), "L={l}");
    }
}

#[test]
fn open_chain_deficits_describe_every_long_chain() {
    let universal = density_coefficients(&ModelSpec::infinite(1).unwrap(), 4, b()).unwrap().values();
    let q = boundary_deficit_q(4, 6, 1, b()).unwrap();
    for l in 6..=14usize {
        let finite = density_coefficients(&ModelSpec::line(l, 1).unwrap(), 4, b()).unwrap().values();
        for j in 0..4 {
            let q = q[j].clone().unwrap();
            let expected = &universal[j] * (Rational::one() - q / Rational::from_integer(l.into()));
            assert_eq!(finite[j], expected, "L={l} j={}", j + 1);
        }
    }
}

#[test]
fn pair_correlation_starts_at_fourth_power() {
    for (lb, d) in [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)] {
        let c = correlation_coefficients(&ModelSpec::infinite(lb).unwrap(), d, 2, b()).unwrap().values();
        assert!(c[0].is_zero(), "λ_b={lb} d={d}");
        assert!(c[1].is_one(), "λ_b={lb} d={d}");
    }
}

#[test]
fn correlation_bounds_hold() {
    for d in 2..=4 {
        let c = correlation_coefficients(&ModelSpec::infinite(1).unwrap(), d, 5, b()).unwrap().values();
        for (i, v) in c.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let log_b = coefficient_bound(i + 1, 1, BoundClass::Correlation { d }).unwrap();
            assert!(rational_to_f64(&v.abs()).ln() <= log_b, "d={d} j={}", i + 1);
        }
    }
}
