//! Commutators with the blockade Hamiltonian and iterated adjoint actions.

use std::borrow::Cow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use super::{ModelSpec, OperatorSum, Topology, Word};
use crate::error::Error;
use crate::Rational;

/// Limits on the symbolic expansion. Word counts grow super-exponentially
/// with the order, so every iterated commutator runs under a budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_order: usize,
    pub max_terms: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_order: 64, max_terms: 20_000_000 }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget { max_order: usize::MAX, max_terms: usize::MAX }
    }
}

/// Local terms `H_k` of a model, cached per site for finite lattices and as a
/// translated template on the infinite line.
pub struct HamiltonianTerms {
    model: ModelSpec,
    finite: Vec<[Word; 2]>,
    template: [Word; 2],
}

impl HamiltonianTerms {
    pub fn new(model: &ModelSpec) -> Self {
        let finite = match model.site_range() {
            Some(range) => range.map(|k| model.term_words(k)).collect(),
            None => Vec::new(),
        };
        let template = match model.topology() {
            Topology::InfiniteLine => model.term_words(0),
            _ => model.term_words(1),
        };
        HamiltonianTerms { model: *model, finite, template }
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    fn words(&self, k: i64) -> Cow<'_, [Word; 2]> {
        match self.model.topology() {
            Topology::InfiniteLine => {
                Cow::Owned([self.template[0].shifted(k), self.template[1].shifted(k)])
            }
            _ => Cow::Borrowed(&self.finite[(k - 1) as usize]),
        }
    }

    /// Expands `[H, word]` into words with coefficient `+1` (`H_k x`) or `-1`
    /// (`x H_k`). Repeated words are emitted separately.
    pub fn for_each_commutator_word<F>(&self, word: &Word, mut emit: F)
    where
        F: FnMut(Word, bool),
    {
        for k in self.model.coupled_sites(word) {
            let terms = self.words(k);
            for h in terms.iter() {
                if let Some(x) = h.mul(word) {
                    emit(x, true);
                }
                if let Some(x) = word.mul(h) {
                    emit(x, false);
                }
            }
        }
    }

    /// `H · word`, the left half of the commutator.
    pub fn for_each_left_product<F>(&self, word: &Word, mut emit: F)
    where
        F: FnMut(Word),
    {
        for k in self.model.coupled_sites(word) {
            for h in self.words(k).iter() {
                if let Some(x) = h.mul(word) {
                    emit(x);
                }
            }
        }
    }
}

/// The local terms `H_k = (r_k + r†_k) Π_{j∈Λ_k} m_j` of a finite lattice.
pub fn hamiltonian_terms(model: &ModelSpec) -> Result<Vec<OperatorSum>, Error> {
    let range = model.site_range().ok_or_else(|| {
        Error::InvalidModel("the infinite line has no finite list of terms".into())
    })?;
    Ok(range
        .map(|k| {
            let [a, b] = model.term_words(k);
            OperatorSum::from_terms([(a, Rational::one()), (b, Rational::one())])
        })
        .collect())
}

/// The full Hamiltonian `Σ_k H_k` of a finite lattice.
pub fn hamiltonian(model: &ModelSpec) -> Result<OperatorSum, Error> {
    let mut h = OperatorSum::zero();
    for term in hamiltonian_terms(model)? {
        h = &h + &term;
    }
    Ok(h)
}

/// `[H, op]`, computed directly as `Σ_k (H_k op - op H_k)` over the terms
/// that touch the support of each word.
pub fn commutator_h(op: &OperatorSum, model: &ModelSpec) -> OperatorSum {
    commutator_with(op, &HamiltonianTerms::new(model))
}

fn commutator_with(op: &OperatorSum, terms: &HamiltonianTerms) -> OperatorSum {
    let mut acc: FxHashMap<Word, Rational> = FxHashMap::default();
    for (word, coeff) in op.terms() {
        terms.for_each_commutator_word(word, |x, positive| {
            let entry = acc.entry(x).or_insert_with(Rational::zero);
            if positive {
                *entry += coeff;
            } else {
                *entry -= coeff;
            }
        });
    }
    OperatorSum::from_terms(acc)
}

/// `ad_H^order(op)`; `ad^0` is `op` itself.
pub fn ad_power(
    op: &OperatorSum,
    model: &ModelSpec,
    order: usize,
    budget: Budget,
) -> Result<OperatorSum, Error> {
    Ok(ad_powers(op, model, order, budget)?.pop().expect("at least ad^0"))
}

/// `[ad^0(op), ad^1(op), ..., ad^max_order(op)]`.
pub fn ad_powers(
    op: &OperatorSum,
    model: &ModelSpec,
    max_order: usize,
    budget: Budget,
) -> Result<Vec<OperatorSum>, Error> {
    if max_order > budget.max_order {
        return Err(Error::BudgetExhausted { reached: budget.max_order, terms: 0 });
    }
    let terms = HamiltonianTerms::new(model);
    let mut out = vec![op.clone()];
    for order in 1..=max_order {
        let next = commutator_with(out.last().expect("non-empty"), &terms);
        if next.len() > budget.max_terms {
            return Err(Error::BudgetExhausted { reached: order - 1, terms: next.len() });
        }
        out.push(next);
    }
    Ok(out)
}

/// `ad^order(A)` from `ad^{order-1}(A)` through the (anti-)symmetrisation
/// `H·x ± (H·x)†`, valid when `A` is self-adjoint. Only used as a cross-check
/// of the direct commutator.
pub fn ad_step_by_symmetrization(previous: &OperatorSum, model: &ModelSpec, order: usize) -> OperatorSum {
    let terms = HamiltonianTerms::new(model);
    let mut left: FxHashMap<Word, Rational> = FxHashMap::default();
    for (word, coeff) in previous.terms() {
        terms.for_each_left_product(word, |x| {
            *left.entry(x).or_insert_with(Rational::zero) += coeff;
        });
    }
    let left = OperatorSum::from_terms(left);
    if order % 2 == 0 {
        &left + &left.adjoint()
    } else {
        &left - &left.adjoint()
    }
}

/// Vacuum expectations `<ad^g(op)>` for `g = 0..=max_order`.
///
/// Words that cannot reach a pure `m` product within the remaining number of
/// commutator steps are dropped as soon as they appear: each step flips one
/// site, an `r`/`r†` letter needs one flip and an `n` letter two. The
/// expectation values are unaffected, and the working set stays far smaller
/// than the full operator.
pub fn vacuum_moments(
    op: &OperatorSum,
    model: &ModelSpec,
    max_order: usize,
    budget: Budget,
) -> Result<Vec<Rational>, Error> {
    if max_order > budget.max_order {
        return Err(Error::BudgetExhausted { reached: budget.max_order, terms: 0 });
    }
    let terms = HamiltonianTerms::new(model);
    let denom = op.terms().fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));

    let mut current: FxHashMap<Word, BigInt> = FxHashMap::default();
    for (word, coeff) in op.terms() {
        if word.flips_to_vacuum() <= max_order {
            let scaled = coeff * Rational::from_integer(denom.clone());
            current.insert(word.clone(), scaled.to_integer());
        }
    }

    let expectation = |set: &FxHashMap<Word, BigInt>| -> BigInt {
        set.iter()
            .filter(|(w, _)| w.is_projector_only())
            .fold(BigInt::zero(), |acc, (_, c)| acc + c)
    };

    let mut moments = vec![Rational::new(expectation(&current), denom.clone())];
    for order in 1..=max_order {
        let remaining = max_order - order;
        let mut next: FxHashMap<Word, BigInt> =
            FxHashMap::with_capacity_and_hasher(current.len() * 2, Default::default());
        for (word, coeff) in &current {
            terms.for_each_commutator_word(word, |x, positive| {
                if x.flips_to_vacuum() > remaining {
                    return;
                }
                let entry = next.entry(x).or_default();
                if positive {
                    *entry += coeff;
                } else {
                    *entry -= coeff;
                }
            });
        }
        next.retain(|_, c| !c.is_zero());
        if next.len() > budget.max_terms {
            return Err(Error::BudgetExhausted { reached: order - 1, terms: next.len() });
        }
        moments.push(Rational::new(expectation(&next), denom.clone()));
        current = next;
    }
    Ok(moments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Letter;

    fn op(text: &str) -> OperatorSum {
        OperatorSum::parse_text(text).unwrap()
    }

    fn int(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    #[test]
    fn ring_terms() {
        let m = ModelSpec::ring(5, 1).unwrap();
        let terms = hamiltonian_terms(&m).unwrap();
        assert_eq!(terms[1], op("1 1:m 2:r 3:m\n1 1:m 2:rd 3:m"));
        let m = ModelSpec::ring(2, 1).unwrap();
        assert_eq!(hamiltonian_terms(&m).unwrap()[0], op("1 1:r 2:m\n1 1:rd 2:m"));
    }

    #[test]
    fn line_terms_truncate_at_edges() {
        let m = ModelSpec::line(3, 1).unwrap();
        assert_eq!(hamiltonian_terms(&m).unwrap()[0], op("1 1:r 2:m\n1 1:rd 2:m"));
        assert_eq!(hamiltonian_terms(&m).unwrap()[2], op("1 2:m 3:r\n1 2:m 3:rd"));
        assert!(hamiltonian_terms(&ModelSpec::infinite(1).unwrap()).is_err());
    }

    #[test]
    fn fully_blockaded_ring() {
        let m = ModelSpec::ring(4, 3).unwrap();
        assert_eq!(hamiltonian_terms(&m).unwrap()[0], op("1 1:r 2:m 3:m 4:m\n1 1:rd 2:m 3:m 4:m"));
    }

    #[test]
    fn first_commutator_of_number() {
        let m = ModelSpec::infinite(1).unwrap();
        let n0 = OperatorSum::from_word(Word::single(0, Letter::Num));
        assert_eq!(commutator_h(&n0, &m), op("1 -1:m 0:r 1:m\n-1 -1:m 0:rd 1:m"));
        let ring2 = ModelSpec::ring(2, 1).unwrap();
        let n1 = OperatorSum::from_word(Word::single(1, Letter::Num));
        assert_eq!(commutator_h(&n1, &ring2), op("1 1:r 2:m\n-1 1:rd 2:m"));
    }

    #[test]
    fn identity_commutes() {
        let m = ModelSpec::ring(4, 1).unwrap();
        assert!(commutator_h(&OperatorSum::identity(), &m).is_zero());
    }

    #[test]
    fn budget_exhaustion_reports_order() {
        let m = ModelSpec::infinite(1).unwrap();
        let n0 = OperatorSum::from_word(Word::single(0, Letter::Num));
        let tight = Budget { max_order: 64, max_terms: 10 };
        match ad_powers(&n0, &m, 6, tight) {
            Err(Error::BudgetExhausted { reached, .. }) => assert!(reached >= 1 && reached < 6),
            other => panic!("expected budget error, got {other:?}"),
        }
        assert!(matches!(
            ad_power(&n0, &m, 5, Budget { max_order: 4, max_terms: 100 }),
            Err(Error::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn pruned_moments_match_full_expansion() {
        for model in [
            ModelSpec::infinite(1).unwrap(),
            ModelSpec::ring(4, 1).unwrap(),
            ModelSpec::line(5, 1).unwrap(),
            ModelSpec::infinite(2).unwrap(),
        ] {
            let a = OperatorSum::from_word(model.normalize_word(&Word::single(2, Letter::Num)).unwrap());
            let full: Vec<Rational> = ad_powers(&a, &model, 7, Budget::default())
                .unwrap()
                .iter()
                .map(OperatorSum::vacuum_expectation)
                .collect();
            let pruned = vacuum_moments(&a, &model, 7, Budget::default()).unwrap();
            assert_eq!(full, pruned, "{model}");
        }
    }

    #[test]
    fn rational_coefficients_survive_pruned_path() {
        let m = ModelSpec::infinite(1).unwrap();
        let a = op("1/3 0:n\n2/5 0:m");
        let full: Vec<Rational> =
            ad_powers(&a, &m, 4, Budget::default()).unwrap().iter().map(|x| x.vacuum_expectation()).collect();
        assert_eq!(vacuum_moments(&a, &m, 4, Budget::default()).unwrap(), full);
        assert_eq!(full[0], Rational::new(2.into(), 5.into()));
        assert_eq!(full[2], int(-2) * Rational::new(1.into(), 3.into()) + int(2) * Rational::new(2.into(), 5.into()));
    }
}
