//! Exact Taylor coefficients of expectation values in the vacuum.
//!
//! For an observable `A` evolved from the all-ground state,
//!
//! ```text
//! <A(t)> = Σ_j (i^j / j!) <ad_H^j(A)> t^j .
//! ```
//!
//! Observables that conserve the excitation parity give even series; the
//! density and the density-density correlations are stored in the "even"
//! layout, where entry `j` multiplies `t^(2j)` and equals
//! `(-1)^j / (2j)! · <ad^(2j)(A)>`. General words use the full layout, entry
//! `j` multiplying `t^j`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{vacuum_moments, Budget, Letter, ModelSpec, OperatorSum, Topology, Word};
use crate::error::Error;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ObservableSpec {
    /// `<n^(L)>/L`, the Rydberg density.
    DensityPerSite,
    /// `<n_k>` at one site.
    LocalNumber(i64),
    /// `<n_k n_{k+d}>`, translation-averaged on finite lattices.
    Correlation(usize),
    /// Any single word.
    GeneralWord(Word),
}

impl ObservableSpec {
    pub fn label(&self) -> String {
        match self {
            ObservableSpec::DensityPerSite => "density".into(),
            ObservableSpec::LocalNumber(k) => format!("n_{k}"),
            ObservableSpec::Correlation(d) => format!("correlation_d{d}"),
            ObservableSpec::GeneralWord(w) => format!("word[{w}]"),
        }
    }

    /// Whether the series has only even powers of `t`.
    pub fn is_even(&self) -> bool {
        match self {
            ObservableSpec::GeneralWord(w) => w.single_count() % 2 == 0,
            _ => true,
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesLayout {
    /// Entry `j` (from 1) multiplies `t^(2j)`.
    Even,
    /// Entry `j` (from 0) multiplies `t^j`.
    Full,
}

/// One Taylor coefficient. The coefficient equals `value` when `imaginary`
/// is false and `i · value` otherwise; the phase `i^j` is already folded in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesTerm {
    pub order: usize,
    pub value: Rational,
    pub imaginary: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesCoefficients {
    pub observable: ObservableSpec,
    pub model: ModelSpec,
    pub layout: SeriesLayout,
    pub terms: Vec<SeriesTerm>,
    /// Largest order certified equal to the infinite-lattice coefficient;
    /// `None` on the infinite line, where every order is universal.
    pub universal_up_to: Option<usize>,
}

impl SeriesCoefficients {
    /// Real parts in order; the imaginary flag is dropped.
    pub fn values(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.value.clone()).collect()
    }

    pub fn get(&self, order: usize) -> Option<&SeriesTerm> {
        self.terms.iter().find(|t| t.order == order)
    }

    pub fn max_order(&self) -> usize {
        self.terms.last().map_or(0, |t| t.order)
    }

    pub fn is_universal(&self, order: usize) -> bool {
        self.universal_up_to.is_none_or(|u| order <= u)
    }

    /// Power of `t` multiplying the entry of the given order.
    pub fn power(&self, order: usize) -> usize {
        match self.layout {
            SeriesLayout::Even => 2 * order,
            SeriesLayout::Full => order,
        }
    }
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(-1)^j / (2j)! · <ad^(2j)>` for `j = 1..=jmax` from a moment list.
pub(crate) fn even_coefficients(moments: &[Rational], jmax: usize) -> Vec<Rational> {
    (1..=jmax)
        .map(|j| {
            let c = &moments[2 * j] / Rational::from_integer(factorial(2 * j));
            if j % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect()
}

/// `i^j / j! · <ad^j>` folded to a real value and a phase flag.
pub(crate) fn full_terms(moments: &[Rational]) -> Vec<SeriesTerm> {
    moments
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let mut value = m / Rational::from_integer(factorial(j));
            // i^j = (-1)^(j/2) for even j, i·(-1)^((j-1)/2) for odd j.
            if (j / 2) % 2 == 1 {
                value = -value;
            }
            SeriesTerm { order: j, value, imaginary: j % 2 == 1 }
        })
        .collect()
}

fn even_terms(values: Vec<Rational>) -> Vec<SeriesTerm> {
    values
        .into_iter()
        .enumerate()
        .map(|(i, value)| SeriesTerm { order: i + 1, value, imaginary: false })
        .collect()
}

fn number_word(sites: &[i64]) -> Word {
    Word::from_letters(sites.iter().map(|&s| (s, Letter::Num))).expect("distinct sites")
}

/// Sum of per-site moment lists on an open chain. Site groups are keyed by
/// their distance to the nearer edge (reflection symmetry); groups at least
/// `2 λ_b · gmax` away from both edges never see a boundary term and share
/// the infinite-line result.
fn line_moment_sum(
    model: &ModelSpec,
    length: usize,
    span: usize,
    gmax: usize,
    budget: Budget,
) -> Result<(Vec<Rational>, usize), Error> {
    let l = length as i64;
    let span = span as i64;
    let count = l - span;
    if count < 1 {
        return Err(Error::InvalidObservable(format!("pair separation {span} does not fit on {model}")));
    }
    let safe = (2 * model.blockade_range() * gmax) as i64;
    let offsets: Vec<i64> = if span == 0 { vec![0] } else { vec![0, span] };
    let mut memo: HashMap<i64, Vec<Rational>> = HashMap::new();
    let mut total = vec![Rational::zero(); gmax + 1];
    for k in 1..=count {
        let left = k - 1;
        let right = l - (k + span);
        let dist = left.min(right);
        let key = if dist >= safe { -1 } else { dist };
        if !memo.contains_key(&key) {
            let moments = if key < 0 {
                let infinite = ModelSpec::infinite(model.blockade_range())?;
                let sites: Vec<i64> = offsets.to_vec();
                vacuum_moments(&OperatorSum::from_word(number_word(&sites)), &infinite, gmax, budget)?
            } else {
                // representative with the nearer edge on the left
                let start = 1 + dist;
                let sites: Vec<i64> = offsets.iter().map(|o| start + o).collect();
                vacuum_moments(&OperatorSum::from_word(number_word(&sites)), model, gmax, budget)?
            };
            memo.insert(key, moments);
        }
        for (acc, m) in total.iter_mut().zip(&memo[&key]) {
            *acc += m;
        }
    }
    Ok((total, count as usize))
}

/// Taylor coefficients of the Rydberg density, `c_j` multiplying `t^(2j)`.
///
/// Translation invariance reduces rings and the infinite line to a single
/// site; on an open chain every site is summed and divided by `L`.
pub fn density_coefficients(model: &ModelSpec, jmax: usize, budget: Budget) -> Result<SeriesCoefficients, Error> {
    let gmax = 2 * jmax;
    let moments = match model.topology() {
        Topology::InfiniteLine | Topology::Ring(_) => {
            let site = model.normalize_site(1).expect("site 1 exists");
            vacuum_moments(&OperatorSum::from_word(number_word(&[site])), model, gmax, budget)?
        }
        Topology::Line(l) => {
            let (sum, count) = line_moment_sum(model, l, 0, gmax, budget)?;
            let scale = Rational::from_integer(BigInt::from(count));
            sum.into_iter().map(|m| m / &scale).collect()
        }
    };
    let observable = ObservableSpec::DensityPerSite;
    Ok(SeriesCoefficients {
        universal_up_to: universality_threshold(model, &observable),
        observable,
        model: *model,
        layout: SeriesLayout::Even,
        terms: even_terms(even_coefficients(&moments, jmax)),
    })
}

fn check_distance(model: &ModelSpec, d: usize) -> Result<(), Error> {
    let lb = model.blockade_range();
    if d <= lb {
        return Err(Error::InvalidObservable(format!(
            "correlation distance {d} is inside the blockade range {lb}; the correlation vanishes identically"
        )));
    }
    if let Topology::Ring(l) = model.topology() {
        if d >= l || l - d <= lb {
            return Err(Error::InvalidObservable(format!(
                "correlation distance {d} on a ring of {l} sites is blockaded around the ring"
            )));
        }
    }
    Ok(())
}

/// Coefficients of `ρ_d(t) = <n_k(t) n_{k+d}(t)>` in the even layout.
pub fn correlation_coefficients(
    model: &ModelSpec,
    d: usize,
    jmax: usize,
    budget: Budget,
) -> Result<SeriesCoefficients, Error> {
    check_distance(model, d)?;
    let gmax = 2 * jmax;
    let moments = match model.topology() {
        Topology::InfiniteLine | Topology::Ring(_) => {
            let word = model.normalize_word(&number_word(&[1, 1 + d as i64]))?;
            vacuum_moments(&OperatorSum::from_word(word), model, gmax, budget)?
        }
        Topology::Line(l) => {
            let (sum, count) = line_moment_sum(model, l, d, gmax, budget)?;
            let scale = Rational::from_integer(BigInt::from(count));
            sum.into_iter().map(|m| m / &scale).collect()
        }
    };
    let observable = ObservableSpec::Correlation(d);
    Ok(SeriesCoefficients {
        universal_up_to: universality_threshold(model, &observable),
        observable,
        model: *model,
        layout: SeriesLayout::Even,
        terms: even_terms(even_coefficients(&moments, jmax)),
    })
}

/// Coefficients of `<A(t)>` for one word, entries `j = 0..=jmax` multiplying
/// `t^j`. Orders whose parity differs from the number of `r`/`r†` letters
/// vanish exactly.
pub fn word_coefficients(
    model: &ModelSpec,
    word: &Word,
    jmax: usize,
    budget: Budget,
) -> Result<SeriesCoefficients, Error> {
    let word = model.normalize_word(word)?;
    let moments = vacuum_moments(&OperatorSum::from_word(word.clone()), model, jmax, budget)?;
    let observable = ObservableSpec::GeneralWord(word);
    Ok(SeriesCoefficients {
        universal_up_to: universality_threshold(model, &observable),
        observable,
        model: *model,
        layout: SeriesLayout::Full,
        terms: full_terms(&moments),
    })
}

/// Coefficients for any observable, dispatching on its kind.
pub fn observable_coefficients(
    model: &ModelSpec,
    observable: &ObservableSpec,
    jmax: usize,
    budget: Budget,
) -> Result<SeriesCoefficients, Error> {
    match observable {
        ObservableSpec::DensityPerSite => density_coefficients(model, jmax, budget),
        ObservableSpec::Correlation(d) => correlation_coefficients(model, *d, jmax, budget),
        ObservableSpec::LocalNumber(k) => {
            let word = model.normalize_word(&Word::single(*k, Letter::Num))?;
            let moments = vacuum_moments(&OperatorSum::from_word(word), model, 2 * jmax, budget)?;
            Ok(SeriesCoefficients {
                universal_up_to: universality_threshold(model, observable),
                observable: observable.clone(),
                model: *model,
                layout: SeriesLayout::Even,
                terms: even_terms(even_coefficients(&moments, jmax)),
            })
        }
        ObservableSpec::GeneralWord(w) => word_coefficients(model, w, jmax, budget),
    }
}

/// Largest order at which a ring coefficient provably equals the infinite
/// line one, in the layout the observable uses. `Some(0)` on open chains
/// (no strict universality) and `None` on the infinite line.
///
/// * density and local numbers: `j ≤ (L-1)/λ_b`
/// * correlations at `λ_b = 1`: `j ≤ L-d`; at larger range the general word
///   rule applied to `ad^(2j)`, i.e. `2j ≤ (L-d-1)/(2λ_b)`
/// * general words of length `ℓ`: `j ≤ (L-ℓ)/(2λ_b)`
pub fn universality_threshold(model: &ModelSpec, observable: &ObservableSpec) -> Option<usize> {
    let l = match model.topology() {
        Topology::InfiniteLine => return None,
        Topology::Line(_) => return Some(0),
        Topology::Ring(l) => l,
    };
    let lb = model.blockade_range();
    Some(match observable {
        ObservableSpec::DensityPerSite | ObservableSpec::LocalNumber(_) => (l - 1) / lb,
        ObservableSpec::Correlation(d) => {
            if lb == 1 {
                l.saturating_sub(*d)
            } else {
                l.saturating_sub(d + 1) / (2 * lb) / 2
            }
        }
        ObservableSpec::GeneralWord(w) => l.saturating_sub(w.length()) / (2 * lb),
    })
}

/// Open-chain deficits `q_j` defined by `c_j^(L) = c_j (1 - q_j / L)`.
///
/// Evaluated at two chain lengths, `l_probe` and `l_probe + 3`, which must
/// agree exactly; a disagreement means the probe is too short for `jmax`.
/// Orders with `c_j = 0` have no deficit and yield `None`.
pub fn boundary_deficit_q(
    jmax: usize,
    l_probe: usize,
    blockade_range: usize,
    budget: Budget,
) -> Result<Vec<Option<Rational>>, Error> {
    let universal = density_coefficients(&ModelSpec::infinite(blockade_range)?, jmax, budget)?.values();
    let probes = [l_probe, l_probe + 3];
    let mut per_probe = Vec::with_capacity(2);
    for &l in &probes {
        let finite = density_coefficients(&ModelSpec::line(l, blockade_range)?, jmax, budget)?.values();
        let length = Rational::from_integer(BigInt::from(l));
        let q: Vec<Option<Rational>> = universal
            .iter()
            .zip(&finite)
            .map(|(c, cl)| (!c.is_zero()).then(|| &length * (Rational::one() - cl / c)))
            .collect();
        per_probe.push(q);
    }
    for (j, (a, b)) in per_probe[0].iter().zip(&per_probe[1]).enumerate() {
        if a != b {
            return Err(Error::ProbeMismatch { order: j + 1, first: probes[0], second: probes[1] });
        }
    }
    Ok(per_probe.swap_remove(0))
}

/// Real value of the truncated series `Σ_{order ≤ truncation} c t^power`.
///
/// Fails if any retained coefficient is imaginary; see
/// [`eval_series_complex`].
pub fn eval_series(coeffs: &SeriesCoefficients, t: f64, truncation: usize) -> Result<f64, Error> {
    let (re, im_present) = horner(coeffs, t, truncation, false)?;
    if im_present {
        return Err(Error::ComplexSeries);
    }
    Ok(re)
}

/// Real and imaginary parts of the truncated series.
pub fn eval_series_complex(coeffs: &SeriesCoefficients, t: f64, truncation: usize) -> Result<(f64, f64), Error> {
    let (re, _) = horner(coeffs, t, truncation, false)?;
    let (im, _) = horner(coeffs, t, truncation, true)?;
    Ok((re, im))
}

fn horner(coeffs: &SeriesCoefficients, t: f64, truncation: usize, imaginary: bool) -> Result<(f64, bool), Error> {
    if truncation > coeffs.max_order() {
        return Err(Error::TruncationTooHigh { requested: truncation, available: coeffs.max_order() });
    }
    let x = match coeffs.layout {
        SeriesLayout::Even => t * t,
        SeriesLayout::Full => t,
    };
    let first = coeffs.terms.first().map_or(0, |t| t.order);
    let mut acc = 0.0;
    let mut saw_imaginary = false;
    for term in coeffs.terms.iter().rev().filter(|term| term.order <= truncation) {
        if term.imaginary && !term.value.is_zero() {
            saw_imaginary = true;
        }
        let c = if term.imaginary == imaginary { rational_to_f64(&term.value) } else { 0.0 };
        acc = acc * x + c;
    }
    // Even layout starts at t^2, so the Horner sum carries one extra factor.
    let acc = acc * x.powi(first as i32);
    Ok((acc, saw_imaginary))
}

/// Nearest `f64` to an exact rational.
pub fn rational_to_f64(value: &Rational) -> f64 {
    if let Some(v) = value.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // very large operands: scale through the bit lengths
    let n = value.numer();
    let d = value.denom();
    let shift = n.bits() as i64 - d.bits() as i64;
    let (n, d) = if shift > 0 { (n.clone(), d << shift as usize) } else { (n << (-shift) as usize, d.clone()) };
    let mantissa = Rational::new(n, d).to_f64().unwrap_or(f64::NAN);
    let out = mantissa * 2f64.powi(shift as i32);
    if value.is_negative() && out > 0.0 {
        -out
    } else {
        out
    }
}
