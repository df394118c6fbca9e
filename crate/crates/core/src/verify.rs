//! Self-verification suite: each criterion recomputes its quantities from
//! scratch and compares them with frozen reference values at a fixed
//! tolerance.

use std::fmt;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};

use crate::algebra::{ad_power, Budget, Letter, ModelSpec, OperatorSum};
use crate::bounds::{coefficient_bound, density_ratio_bound, kappa, ln_factorial, omega, BoundClass, BoundEnvelope};
use crate::dynamics::{spectral_checks, taylor_oracle, time_grid, Eigensystem, SPECTRAL_SAMPLE_TIMES};
use crate::error::Error;
use crate::series::{
    boundary_deficit_q, correlation_coefficients, density_coefficients, rational_to_f64,
    universality_threshold, ObservableSpec,
};
use crate::space::{fibonacci_dimension, hamiltonian_matrix, observable_matrix, recursion_matrices, BlockadeBasis};
use crate::Rational;

/// `0` is the letter-algebra closure check; `1..=8` are the acceptance
/// criteria.
pub const CRITERIA: [u8; 9] = [0, 1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] C{} {} ({:.1?})", self.id, self.title, self.elapsed)?;
        for d in &self.details {
            write!(f, "\n       {d}")?;
        }
        Ok(())
    }
}

/// Accumulates checks; failures are always listed, passes only when they
/// carry a measured number worth reporting.
struct Checker {
    passed: bool,
    details: Vec<String>,
}

impl Checker {
    fn new() -> Self {
        Checker { passed: true, details: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.passed = false;
            self.details.push(format!("failed: {}", what()));
        }
    }

    fn note(&mut self, what: String) {
        self.details.push(what);
    }

    fn error(&mut self, context: &str, e: Error) {
        self.passed = false;
        self.details.push(format!("error in {context}: {e}"));
    }
}

pub fn run_criterion(id: u8) -> CriterionReport {
    let start = Instant::now();
    let mut c = Checker::new();
    let title = match id {
        0 => {
            letter_algebra(&mut c);
            "letter product table closure"
        }
        1 => {
            table_values(&mut c);
            "universal coefficient table (exact)"
        }
        2 => {
            worked_examples(&mut c);
            "worked operator examples (exact)"
        }
        3 => {
            oracle_equivalence(&mut c);
            "symbolic engine equals matrix oracle on rings (exact)"
        }
        4 => {
            universality_thresholds(&mut c);
            "universality thresholds on rings (exact)"
        }
        5 => {
            high_order_ring(&mut c);
            "ring of 18 sites: 17 coefficients and |Δρ| < 1e-3 for t ≤ 2"
        }
        6 => {
            spectral_suite(&mut c);
            "spectral and parity identities"
        }
        7 => {
            bounds_suite(&mut c);
            "coefficient bounds and error envelopes"
        }
        8 => {
            chain_recursions(&mut c);
            "open-chain dimensions and block recursions"
        }
        _ => {
            c.check(false, || format!("unknown criterion {id}"));
            "unknown"
        }
    };
    CriterionReport { id, title, passed: c.passed, details: c.details, elapsed: start.elapsed() }
}

pub fn run_all() -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&id| run_criterion(id)).collect()
}

/// Every product in the letter table must equal the composition of the
/// single-site actions, and `r² = 0`, `r r† + r† r = 1` must hold.
fn letter_algebra(c: &mut Checker) {
    const ALL: [Letter; 4] = [Letter::Lower, Letter::Raise, Letter::Num, Letter::Proj];
    for a in ALL {
        for b in ALL {
            let composed: Vec<Option<bool>> = [false, true].iter().map(|&x| b.act(x).and_then(|y| a.act(y))).collect();
            let tabled: Vec<Option<bool>> = [false, true].iter().map(|&x| a.mul(b).and_then(|l| l.act(x))).collect();
            c.check(composed == tabled, || format!("closure: {a}·{b} disagrees with the composed action"));
        }
    }
    c.check(Letter::Lower.mul(Letter::Lower).is_none(), || "nilpotency: r·r ≠ 0".into());
    c.check(Letter::Raise.mul(Letter::Raise).is_none(), || "nilpotency: r†·r† ≠ 0".into());
    let anti = [Letter::Lower.mul(Letter::Raise), Letter::Raise.mul(Letter::Lower)];
    c.check(
        matches!(anti, [Some(Letter::Proj), Some(Letter::Num)]),
        || format!("anticommutator: r·r† = {:?}, r†·r = {:?}, expected m and n", anti[0], anti[1]),
    );
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn rationals(pairs: &[(i64, i64)]) -> Vec<Rational> {
    pairs.iter().map(|&(n, d)| q(n, d)).collect()
}

fn budget() -> Budget {
    Budget::default()
}

pub(crate) fn table_density(lambda_b: usize) -> Vec<Rational> {
    match lambda_b {
        1 => rationals(&[(1, 1), (-1, 1), (3, 5), (-81, 280), (3023, 25200)]),
        2 => rationals(&[(1, 1), (-5, 3), (77, 45), (-713, 504)]),
        3 => rationals(&[(1, 1), (-7, 3), (152, 45)]),
        _ => Vec::new(),
    }
}

pub(crate) fn table_correlation(d: usize) -> Vec<Rational> {
    match d {
        2 => rationals(&[(0, 1), (1, 1), (-3, 2), (283, 240), (-739, 1120)]),
        3 => rationals(&[(0, 1), (1, 1), (-2, 1), (61, 30), (-2393, 1680)]),
        _ => Vec::new(),
    }
}

pub(crate) fn table_deficits() -> Vec<Rational> {
    rationals(&[(0, 1), (2, 3), (38, 27), (518, 243), (76016, 27207)])
}

fn compare(c: &mut Checker, what: &str, got: &[Rational], expected: &[Rational]) {
    c.check(got == expected, || {
        let g: Vec<String> = got.iter().map(|x| x.to_string()).collect();
        let e: Vec<String> = expected.iter().map(|x| x.to_string()).collect();
        format!("{what}: got [{}], expected [{}]", g.join(", "), e.join(", "))
    });
}

fn table_values(c: &mut Checker) {
    for lb in 1..=3 {
        let expected = table_density(lb);
        match ModelSpec::infinite(lb).and_then(|m| density_coefficients(&m, expected.len(), budget())) {
            Ok(s) => compare(c, &format!("density λ_b={lb}"), &s.values(), &expected),
            Err(e) => c.error(&format!("density λ_b={lb}"), e),
        }
    }
    for d in [2, 3] {
        let expected = table_correlation(d);
        match ModelSpec::infinite(1).and_then(|m| correlation_coefficients(&m, d, expected.len(), budget())) {
            Ok(s) => compare(c, &format!("correlation d={d}"), &s.values(), &expected),
            Err(e) => c.error(&format!("correlation d={d}"), e),
        }
    }
    match boundary_deficit_q(5, 6, 1, budget()) {
        Ok(qs) => {
            let all: Option<Vec<Rational>> = qs.into_iter().collect();
            c.check(all.is_some(), || "a deficit was undefined".into());
            if let Some(all) = all {
                compare(c, "open-chain deficits (probes 6 and 9)", &all, &table_deficits());
            }
        }
        Err(e) => c.error("open-chain deficits", e),
    }
}

/// Fixture builders for the low-order nested commutators of `n_k`.
pub mod fixtures {
    use crate::algebra::OperatorSum;
    use crate::Rational;

    pub fn op(terms: &[(i64, String)]) -> OperatorSum {
        OperatorSum::from_terms(
            terms.iter().map(|(c, w)| (w.parse().expect("fixture word"), Rational::from_integer((*c).into()))),
        )
    }

    fn sum(parts: &[(i64, OperatorSum)]) -> OperatorSum {
        parts.iter().fold(OperatorSum::zero(), |acc, (c, x)| &acc + &x.scale(&Rational::from_integer((*c).into())))
    }

    /// `m_{k-1} δ_k m_{k+1}` with `δ = n - m`.
    pub fn a1(k: i64) -> OperatorSum {
        op(&[(1, format!("{}:m {k}:n {}:m", k - 1, k + 1)), (-1, format!("{}:m {k}:m {}:m", k - 1, k + 1))])
    }

    pub fn a2(k: i64) -> OperatorSum {
        op(&[
            (1, format!("{}:m {}:r {k}:rd {}:m", k - 2, k - 1, k + 1)),
            (1, format!("{}:m {}:rd {k}:r {}:m", k - 2, k - 1, k + 1)),
        ])
    }

    pub fn b1(k: i64) -> OperatorSum {
        op(&[(1, format!("{}:m {k}:r {}:m", k - 1, k + 1)), (-1, format!("{}:m {k}:rd {}:m", k - 1, k + 1))])
    }

    pub fn b2(k: i64) -> OperatorSum {
        op(&[
            (1, format!("{}:m {}:m {k}:r {}:m", k - 2, k - 1, k + 1)),
            (-1, format!("{}:m {}:m {k}:rd {}:m", k - 2, k - 1, k + 1)),
        ])
    }

    pub fn b3(k: i64) -> OperatorSum {
        op(&[
            (1, format!("{}:m {}:r {k}:m {}:m", k - 2, k - 1, k + 1)),
            (-1, format!("{}:m {}:rd {k}:m {}:m", k - 2, k - 1, k + 1)),
        ])
    }

    pub fn b4(k: i64) -> OperatorSum {
        op(&[
            (1, format!("{}:m {}:rd {}:r {k}:rd {}:m", k - 3, k - 2, k - 1, k + 1)),
            (-1, format!("{}:m {}:r {}:rd {k}:r {}:m", k - 3, k - 2, k - 1, k + 1)),
        ])
    }

    pub fn ad1(k: i64) -> OperatorSum {
        b1(k)
    }

    pub fn ad2(k: i64) -> OperatorSum {
        sum(&[(2, a1(k)), (1, a2(k)), (1, a2(k + 1))])
    }

    pub fn ad3(k: i64) -> OperatorSum {
        sum(&[
            (4, b1(k)),
            (1, b2(k)),
            (3, b2(k + 1)),
            (3, b3(k)),
            (1, b3(k + 1)),
            (1, b4(k)),
            (2, b4(k + 1)),
            (1, b4(k + 2)),
        ])
    }

    /// `δ_1 m_2`, `m_1 δ_2` and `r_1 r†_2 + r†_1 r_2` on two sites.
    fn two_site() -> (OperatorSum, OperatorSum, OperatorSum, OperatorSum, OperatorSum) {
        let d1m2 = op(&[(1, "1:n 2:m".into()), (-1, "1:m 2:m".into())]);
        let m1d2 = op(&[(1, "1:m 2:n".into()), (-1, "1:m 2:m".into())]);
        let hop = op(&[(1, "1:r 2:rd".into()), (1, "1:rd 2:r".into())]);
        let flip1 = op(&[(1, "1:r 2:m".into()), (-1, "1:rd 2:m".into())]);
        let flip2 = op(&[(1, "1:m 2:r".into()), (-1, "1:m 2:rd".into())]);
        (d1m2, m1d2, hop, flip1, flip2)
    }

    pub fn ring2_ad1() -> OperatorSum {
        two_site().3
    }

    pub fn ring2_ad2() -> OperatorSum {
        let (d1m2, _, hop, _, _) = two_site();
        sum(&[(2, d1m2), (1, hop)])
    }

    pub fn ring2_ad3() -> OperatorSum {
        let (_, _, _, flip1, flip2) = two_site();
        sum(&[(5, flip1), (3, flip2)])
    }

    /// As printed the hopping coefficient is [`RING2_AD4_PRINTED_HOPPING`];
    /// the exact expansion has [`RING2_AD4_HOPPING`].
    pub fn ring2_ad4(hopping: i64) -> OperatorSum {
        let (d1m2, m1d2, hop, _, _) = two_site();
        sum(&[(10, d1m2), (6, m1d2), (hopping, hop)])
    }

    pub const RING2_AD4_PRINTED_HOPPING: i64 = 4;
    pub const RING2_AD4_HOPPING: i64 = 8;
}

fn worked_examples(c: &mut Checker) {
    let inf = ModelSpec::infinite(1).expect("valid");
    let n0 = OperatorSum::from_word("0:n".parse().expect("word"));
    let fixtures_inf = [fixtures::ad1(0), fixtures::ad2(0), fixtures::ad3(0)];
    for (j, expected) in (1..=3).zip(&fixtures_inf) {
        match ad_power(&n0, &inf, j, budget()) {
            Ok(got) => c.check(&got == expected, || format!("ad^{j}(n_0) on the infinite line:\n{got}")),
            Err(e) => c.error(&format!("ad^{j}(n_0)"), e),
        }
    }
    for (j, expected) in [(2, q(-2, 1)), (4, q(-24, 1))] {
        match ad_power(&n0, &inf, j, budget()) {
            Ok(got) => {
                let v = got.vacuum_expectation();
                c.check(v == expected, || format!("<ad^{j}(n_k)> = {v}, expected {expected}"));
            }
            Err(e) => c.error(&format!("<ad^{j}(n_k)>"), e),
        }
    }
    let ring2 = ModelSpec::ring(2, 1).expect("valid");
    let n1 = OperatorSum::from_word("1:n".parse().expect("word"));
    let exact4 = fixtures::ring2_ad4(fixtures::RING2_AD4_HOPPING);
    let expected = [fixtures::ring2_ad1(), fixtures::ring2_ad2(), fixtures::ring2_ad3(), exact4];
    for (j, fixture) in (1..=4).zip(&expected) {
        match ad_power(&n1, &ring2, j, budget()) {
            Ok(got) => c.check(&got == fixture, || format!("ad^{j}(n_1) on the two-site ring:\n{got}")),
            Err(e) => c.error(&format!("two-site ad^{j}"), e),
        }
    }
    c.note(format!(
        "two-site ad^4: hopping term r_1 r†_2 + r†_1 r_2 carries {} (printed value {}); <ad^4> = -16 either way",
        fixtures::RING2_AD4_HOPPING,
        fixtures::RING2_AD4_PRINTED_HOPPING
    ));
    match density_coefficients(&ring2, 2, budget()) {
        Ok(s) => compare(c, "two-site ring density", &s.values(), &[q(1, 1), q(-2, 3)]),
        Err(e) => c.error("two-site ring density", e),
    }
}

pub const ORACLE_JMAX: usize = 8;

fn oracle_equivalence(c: &mut Checker) {
    let mut compared = 0;
    for lb in [1usize, 2] {
        for l in 3..=10usize {
            if lb >= l {
                continue;
            }
            let m = ModelSpec::ring(l, lb).expect("valid");
            let sym = density_coefficients(&m, ORACLE_JMAX, budget());
            let mat = taylor_oracle(&m, &ObservableSpec::DensityPerSite, ORACLE_JMAX);
            match (sym, mat) {
                (Ok(s), Ok(o)) => {
                    compare(c, &format!("ring L={l} λ_b={lb}"), &s.values(), &o.coefficients.values());
                    compared += 1;
                }
                (Err(e), _) | (_, Err(e)) => c.error(&format!("ring L={l} λ_b={lb}"), e),
            }
        }
    }
    c.note(format!("{compared} rings compared through order t^{}", 2 * ORACLE_JMAX));
}

fn universality_thresholds(c: &mut Checker) {
    let cases: Vec<(usize, usize)> = (3..=9).map(|l| (l, 1)).chain((5..=9).map(|l| (l, 2))).collect();
    for (l, lb) in cases {
        let ring = ModelSpec::ring(l, lb).expect("valid");
        let threshold = universality_threshold(&ring, &ObservableSpec::DensityPerSite).expect("ring");
        let expected_threshold = if lb == 1 { l - 1 } else { (l - 1) / 2 };
        c.check(threshold == expected_threshold, || format!("threshold L={l} λ_b={lb} is {threshold}"));
        let universal = ModelSpec::infinite(lb).and_then(|m| density_coefficients(&m, threshold, budget()));
        let finite = density_coefficients(&ring, threshold, budget());
        match (universal, finite) {
            (Ok(u), Ok(f)) => compare(c, &format!("density L={l} λ_b={lb}"), &f.values(), &u.values()),
            (Err(e), _) | (_, Err(e)) => c.error(&format!("density L={l} λ_b={lb}"), e),
        }
    }
    for (l, d) in [(7usize, 2usize), (8, 3)] {
        let ring = ModelSpec::ring(l, 1).expect("valid");
        let threshold = universality_threshold(&ring, &ObservableSpec::Correlation(d)).expect("ring");
        c.check(threshold == l - d, || format!("correlation threshold L={l} d={d} is {threshold}"));
        let universal = ModelSpec::infinite(1).and_then(|m| correlation_coefficients(&m, d, threshold, budget()));
        let finite = correlation_coefficients(&ring, d, threshold, budget());
        match (universal, finite) {
            (Ok(u), Ok(f)) => compare(c, &format!("correlation L={l} d={d}"), &f.values(), &u.values()),
            (Err(e), _) | (_, Err(e)) => c.error(&format!("correlation L={l} d={d}"), e),
        }
    }
}

/// Shared ring-of-18 data: exact coefficients and the evolved density.
pub struct RingEighteen {
    pub coefficients: Vec<Rational>,
    pub times: Vec<f64>,
    pub evolved: Vec<f64>,
}

pub const HIGH_ORDER_SITES: usize = 18;
pub const HIGH_ORDER_JMAX: usize = 17;
pub const HIGH_ORDER_TMAX: f64 = 2.0;
pub const HIGH_ORDER_STEPS: usize = 200;
pub const HIGH_ORDER_TOLERANCE: f64 = 1e-3;

pub fn ring_eighteen() -> Result<&'static RingEighteen, String> {
    static CELL: OnceLock<Result<RingEighteen, String>> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = ModelSpec::ring(HIGH_ORDER_SITES, 1).map_err(|e| e.to_string())?;
        let oracle = taylor_oracle(&m, &ObservableSpec::DensityPerSite, HIGH_ORDER_JMAX).map_err(|e| e.to_string())?;
        let sys = Eigensystem::new(&m).map_err(|e| e.to_string())?;
        let times = time_grid(0.0, HIGH_ORDER_TMAX, HIGH_ORDER_STEPS);
        let evolved = sys.evolve(&ObservableSpec::DensityPerSite, &times).map_err(|e| e.to_string())?.values;
        Ok(RingEighteen { coefficients: oracle.coefficients.values(), times, evolved })
    })
    .as_ref()
    .map_err(Clone::clone)
}

fn horner_even(coeffs: &[Rational], t: f64) -> f64 {
    let x = t * t;
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + rational_to_f64(c)) * x
}

fn high_order_ring(c: &mut Checker) {
    let data = match ring_eighteen() {
        Ok(d) => d,
        Err(e) => {
            c.check(false, || format!("ring of 18 sites: {e}"));
            return;
        }
    };
    c.check(data.coefficients.len() == HIGH_ORDER_JMAX, || format!("{} coefficients", data.coefficients.len()));
    compare(c, "first five ring-18 coefficients", &data.coefficients[..5.min(data.coefficients.len())], &table_density(1));
    let mut worst: f64 = 0.0;
    let mut last_within = 0.0;
    let mut first_beyond = None;
    for (&t, &rho) in data.times.iter().zip(&data.evolved) {
        let diff = (rho - horner_even(&data.coefficients, t)).abs();
        worst = worst.max(diff);
        if diff < HIGH_ORDER_TOLERANCE {
            if first_beyond.is_none() {
                last_within = t;
            }
        } else if first_beyond.is_none() {
            first_beyond = Some((t, diff));
        }
    }
    c.note(format!(
        "max |Δρ| on [0, {HIGH_ORDER_TMAX}] = {worst:.3e}; tolerance holds up to t = {last_within:.2}"
    ));
    if let Some((t, diff)) = first_beyond {
        c.check(false, || format!("|Δρ| = {diff:.3e} ≥ {HIGH_ORDER_TOLERANCE:e} at t = {t:.2}"));
    }
}

pub const SPECTRAL_SYMMETRY_TOLERANCE: f64 = 1e-10;
pub const PARITY_WEIGHT_TOLERANCE: f64 = 1e-8;
pub const EVENNESS_TOLERANCE: f64 = 1e-12;
pub const NORM_TOLERANCE: f64 = 1e-12;

fn spectral_suite(c: &mut Checker) {
    let mut models = 0;
    for ring in [true, false] {
        for l in 4..=12 {
            for lb in [1, 2] {
                let m = if ring { ModelSpec::ring(l, lb) } else { ModelSpec::line(l, lb) }.expect("valid");
                match spectral_checks(&m) {
                    Ok(r) => {
                        models += 1;
                        c.check(r.spectrum_symmetry < SPECTRAL_SYMMETRY_TOLERANCE, || {
                            format!("{m}: spectrum asymmetry {:e}", r.spectrum_symmetry)
                        });
                        c.check(r.anticommutes, || format!("{m}: PH + HP ≠ 0"));
                        c.check(r.parity_weight_defect < PARITY_WEIGHT_TOLERANCE, || {
                            format!("{m}: parity weight defect {:e}", r.parity_weight_defect)
                        });
                        c.check(r.evenness_defect < EVENNESS_TOLERANCE, || {
                            format!("{m}: ρ(t) - ρ(-t) = {:e}", r.evenness_defect)
                        });
                        c.check(r.norm_defect < NORM_TOLERANCE, || format!("{m}: norm defect {:e}", r.norm_defect));
                        c.check(r.zero_mode_consistent(), || format!("{m}: odd dimension without zero mode"));
                    }
                    Err(e) => c.error(&m.to_string(), e),
                }
            }
        }
    }
    c.note(format!("{models} models, sample times {SPECTRAL_SAMPLE_TIMES:?}"));
}

pub const KAPPA_TOLERANCE: f64 = 1e-13;

fn within_bound(c: &mut Checker, what: &str, values: &[Rational], lambda_b: usize, class: BoundClass) -> usize {
    let mut checked = 0;
    for (i, v) in values.iter().enumerate() {
        let j = i + 1;
        if v.is_zero() {
            checked += 1;
            continue;
        }
        match coefficient_bound(j, lambda_b, class) {
            Ok(log_b) => {
                let log_c = rational_to_f64(&v.abs()).ln();
                c.check(log_c <= log_b, || format!("{what}: |c_{j}| = e^{log_c:.3} exceeds b_{j} = e^{log_b:.3}"));
                checked += 1;
            }
            Err(e) => c.error(what, e),
        }
    }
    checked
}

fn bounds_suite(c: &mut Checker) {
    match kappa(1.0) {
        Ok(k) => {
            c.check((k.tau - 1.0).abs() < KAPPA_TOLERANCE && k.log_kappa.abs() < KAPPA_TOLERANCE, || {
                format!("κ(1): τ = {}, ln κ = {}", k.tau, k.log_kappa)
            });
        }
        Err(e) => c.error("κ(1)", e),
    }
    // κ_n < n! / (ω_1 ⋯ ω_n)
    let mut ln_omega_prefix = 0.0;
    for n in 1..=100usize {
        match (kappa(n as f64), omega(n as f64)) {
            (Ok(k), Ok(w)) => {
                ln_omega_prefix += w.ln();
                let rhs = ln_factorial(n) - ln_omega_prefix;
                // at n = 1 both sides are exactly zero
                if n > 1 {
                    c.check(k.log_kappa < rhs, || format!("κ_{n}: ln κ = {} ≥ {rhs}", k.log_kappa));
                }
            }
            (Err(e), _) | (_, Err(e)) => c.error(&format!("κ_{n}"), e),
        }
    }

    let mut checked = 0;
    for lb in 1..=3 {
        if let Ok(s) = ModelSpec::infinite(lb).and_then(|m| density_coefficients(&m, table_density(lb).len(), budget())) {
            checked += within_bound(c, &format!("density λ_b={lb}"), &s.values(), lb, BoundClass::Density);
        }
    }
    for d in [2, 3] {
        if let Ok(s) = ModelSpec::infinite(1).and_then(|m| correlation_coefficients(&m, d, 5, budget())) {
            checked += within_bound(c, &format!("correlation d={d}"), &s.values(), 1, BoundClass::Correlation { d });
        }
    }
    for lb in [1usize, 2] {
        for l in 3..=10usize {
            if lb >= l {
                continue;
            }
            if let Ok(s) = ModelSpec::ring(l, lb).and_then(|m| density_coefficients(&m, ORACLE_JMAX, budget())) {
                checked += within_bound(c, &format!("ring L={l} λ_b={lb}"), &s.values(), lb, BoundClass::Density);
            }
        }
    }
    for l in [2usize, 6, 9] {
        let model = if l == 2 { ModelSpec::ring(2, 1) } else { ModelSpec::line(l, 1) };
        if let Ok(s) = model.and_then(|m| density_coefficients(&m, 5, budget())) {
            checked += within_bound(c, &format!("{}", s.model), &s.values(), 1, BoundClass::Density);
        }
    }
    for (l, d) in [(7usize, 2usize), (8, 3)] {
        if let Ok(s) = ModelSpec::ring(l, 1).and_then(|m| correlation_coefficients(&m, d, l - d, budget())) {
            checked += within_bound(c, &format!("ring L={l} d={d}"), &s.values(), 1, BoundClass::Correlation { d });
        }
    }
    match ring_eighteen() {
        Ok(data) => {
            checked += within_bound(c, "ring L=18", &data.coefficients, 1, BoundClass::Density);
            // measured deviation below the certificate wherever it is below 1
            let env = BoundEnvelope::new(HIGH_ORDER_SITES, 1, BoundClass::Density).expect("valid");
            let mut certified_points = 0;
            let mut tightest: f64 = 0.0;
            for (&t, &rho) in data.times.iter().zip(&data.evolved) {
                let Ok(e) = env.evaluate(t) else { continue };
                if e >= 1.0 {
                    continue;
                }
                let diff = (rho - horner_even(&data.coefficients, t)).abs();
                c.check(diff <= e.max(ROUNDING_FLOOR), || format!("t = {t}: |Δρ| = {diff:e} > E = {e:e}"));
                certified_points += 1;
                tightest = tightest.max(t);
            }
            c.note(format!("{certified_points} grid times with envelope < 1 (up to t = {tightest:.2})"));
        }
        Err(e) => c.check(false, || format!("ring of 18 sites: {e}")),
    }
    c.note(format!("{checked} exact coefficients within their bounds"));

    for l in 5..=20 {
        let e1 = BoundEnvelope::new(l, 1, BoundClass::Density).and_then(|e| e.log_evaluate(1.0));
        let e0 = BoundEnvelope::new(l - 1, 1, BoundClass::Density).and_then(|e| e.log_evaluate(1.0));
        match (e1, e0, density_ratio_bound(l, 1.0)) {
            (Ok(a), Ok(b), Ok(r)) => c.check(a - b < r.ln(), || {
                format!("L={l}: E^(L)/E^(L-1) = {:e} ≥ {r:e}", (a - b).exp())
            }),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => c.error(&format!("envelope ratio L={l}"), e),
        }
    }
}

/// Deviations at this level are floating-point rounding in the evolved
/// curve, not finite-size effects.
pub const ROUNDING_FLOOR: f64 = 1e-13;

pub const CHAIN_DIMENSION_MAX: usize = 20;
pub const CHAIN_RECURSION_MAX: usize = 16;

fn chain_recursions(c: &mut Checker) {
    let mut dims = Vec::new();
    for l in 1..=CHAIN_DIMENSION_MAX {
        let m = ModelSpec::line(l, 1).expect("valid");
        match BlockadeBasis::new(&m) {
            Ok(b) => {
                // every bitset with no two adjacent ones
                let brute = (0u64..1 << l).filter(|s| s & (s >> 1) == 0).count();
                let rec = fibonacci_dimension(l);
                c.check(b.dim() == brute && brute as u128 == rec, || {
                    format!("L={l}: basis {} brute force {brute} recursion {rec}", b.dim())
                });
                dims.push(b.dim());
            }
            Err(e) => c.error(&format!("basis L={l}"), e),
        }
    }
    c.check(dims.starts_with(&[2, 3, 5, 8]), || format!("dimensions {dims:?}"));
    for l in 1..=CHAIN_RECURSION_MAX {
        let m = ModelSpec::line(l, 1).expect("valid");
        let Ok(b) = BlockadeBasis::new(&m) else { continue };
        let (h_rec, n_rec) = recursion_matrices(l);
        match (hamiltonian_matrix(&m, &b), observable_matrix(&m, &b, &ObservableSpec::DensityPerSite)) {
            (Ok(h), Ok(n)) => {
                c.check(h == h_rec, || format!("L={l}: Hamiltonian recursion differs from bit-flip construction"));
                c.check(n.matrix == n_rec, || format!("L={l}: number recursion differs from popcount"));
            }
            (Err(e), _) | (_, Err(e)) => c.error(&format!("matrices L={l}"), e),
        }
    }
    let (h1, _) = recursion_matrices(1);
    c.check(h1.entries() == [(0, 1, 1), (1, 0, 1)], || format!("H(1) = {:?}", h1.entries()));
    let (h2, n2) = recursion_matrices(2);
    c.check(h2.entries() == [(0, 1, 1), (0, 2, 1), (1, 0, 1), (2, 0, 1)], || format!("H(2) = {:?}", h2.entries()));
    c.check(n2.diagonal_values() == [0, 1, 1] && n2.is_diagonal(), || format!("N(2) = {:?}", n2.entries()));
    c.note(format!("dimensions {dims:?}"));
}
