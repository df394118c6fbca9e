use num_traits::Zero;
use proptest::prelude::*;
use rydberg_core::algebra::{ad_power, ad_powers, ad_step_by_symmetrization, Budget, Letter, ModelSpec, Word};
use rydberg_core::bounds::word_count_bound;
use rydberg_core::OperatorSum;

fn number(site: i64) -> OperatorSum {
    OperatorSum::from_word(Word::single(site, Letter::Num))
}

fn model() -> impl Strategy<Value = ModelSpec> {
    prop_oneof![
        (3usize..9, 1usize..3).prop_filter_map("λ_b < L", |(l, lb)| ModelSpec::ring(l, lb).ok()),
        (2usize..9, 1usize..3).prop_filter_map("valid", |(l, lb)| ModelSpec::line(l, lb).ok()),
        (1usize..3).prop_map(|lb| ModelSpec::infinite(lb).unwrap()),
    ]
}

fn letter() -> impl Strategy<Value = Letter> {
    prop_oneof![Just(Letter::Lower), Just(Letter::Raise), Just(Letter::Num), Just(Letter::Proj)]
}

fn word() -> impl Strategy<Value = Word> {
    proptest::collection::btree_map(-3i64..4, letter(), 0..5)
        .prop_map(|m| Word::from_letters(m).expect("distinct sites"))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn adjoint_alternates_with_order(m in model(), k in 1i64..3) {
        let site = m.normalize_site(k).unwrap_or(1);
        let powers = ad_powers(&number(site), &m, 6, Budget::default()).unwrap();
        for (j, x) in powers.iter().enumerate() {
            let expected = if j % 2 == 0 { x.clone() } else { -x };
            prop_assert_eq!(x.adjoint(), expected, "order {}", j);
        }
    }

    #[test]
    fn flip_count_parity_follows_order(m in model()) {
        let powers = ad_powers(&number(1), &m, 6, Budget::default()).unwrap();
        for (j, x) in powers.iter().enumerate() {
            for w in x.words() {
                prop_assert_eq!(w.single_count() % 2, j % 2, "{} in ad^{}", w, j);
            }
        }
    }

    #[test]
    fn odd_orders_have_zero_vacuum_value(m in model()) {
        let powers = ad_powers(&number(1), &m, 7, Budget::default()).unwrap();
        for (j, x) in powers.iter().enumerate().filter(|(j, _)| j % 2 == 1) {
            prop_assert!(x.vacuum_expectation().is_zero(), "order {}", j);
        }
    }

    #[test]
    fn symmetrized_step_equals_direct_commutator(m in model()) {
        let powers = ad_powers(&number(1), &m, 6, Budget::default()).unwrap();
        for j in 1..powers.len() {
            prop_assert_eq!(&ad_step_by_symmetrization(&powers[j - 1], &m, j), &powers[j]);
        }
    }

    #[test]
    fn word_products_are_single_words(a in word(), b in word()) {
        if let Some(p) = a.mul(&b) {
            for (site, l) in p.iter() {
                let composed = match (a.get(site), b.get(site)) {
                    (Some(x), Some(y)) => x.mul(y),
                    (Some(x), None) | (None, Some(x)) => Some(x),
                    (None, None) => None,
                };
                prop_assert_eq!(composed, Some(l));
            }
        } else {
            let killed = a.iter().any(|(s, x)| b.get(s).is_some_and(|y| x.mul(y).is_none()));
            prop_assert!(killed);
        }
    }

    #[test]
    fn adjoint_reverses_products(a in word(), b in word()) {
        let ab = a.mul(&b).map(|w| w.adjoint());
        let ba = b.adjoint().mul(&a.adjoint());
        prop_assert_eq!(ab, ba);
    }
}

#[test]
fn infinite_line_words_are_framed_by_projectors() {
    let m = ModelSpec::infinite(1).unwrap();
    let powers = ad_powers(&number(0), &m, 8, Budget::default()).unwrap();
    for (j, x) in powers.iter().enumerate().skip(1) {
        for w in x.words() {
            let (lo, hi) = (w.min_site().unwrap(), w.max_site().unwrap());
            assert_eq!(w.get(lo), Some(Letter::Proj), "{w} in ad^{j}");
            assert_eq!(w.get(hi), Some(Letter::Proj), "{w} in ad^{j}");
            assert!(w.length() <= j + 2, "{w} in ad^{j}");
        }
    }
}

#[test]
fn term_counts_respect_bound() {
    let m = ModelSpec::infinite(1).unwrap();
    let powers = ad_powers(&number(0), &m, 10, Budget::default()).unwrap();
    for (j, x) in powers.iter().enumerate().skip(1) {
        let bound = word_count_bound(j, 1).unwrap();
        assert!((x.len() as f64).ln() <= bound, "ad^{j}: {} terms vs e^{bound}", x.len());
    }
}

#[test]
fn ring_terms_repeat_under_translation() {
    let m = ModelSpec::ring(7, 1).unwrap();
    let a = ad_power(&number(1), &m, 5, Budget::default()).unwrap();
    let b = ad_power(&number(4), &m, 5, Budget::default()).unwrap();
    let shifted = OperatorSum::from_terms(a.terms().map(|(w, c)| (m.normalize_word(&w.shifted(3)).unwrap(), c.clone())));
    assert_eq!(shifted, b);
}

#[test]
fn letter_table_is_total_and_closed() {
    let all = [Letter::Lower, Letter::Raise, Letter::Num, Letter::Proj];
    for a in all {
        for b in all {
            let composed = |x: bool| b.act(x).and_then(|y| a.act(y));
            let tabled = |x: bool| a.mul(b).and_then(|l| l.act(x));
            assert_eq!([composed(false), composed(true)], [tabled(false), tabled(true)], "{a}·{b}");
        }
    }
}
