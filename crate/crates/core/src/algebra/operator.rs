use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Word;
use crate::error::Error;
use crate::Rational;

/// Finite linear combination of words with exact rational coefficients.
///
/// Terms are kept in a `BTreeMap`, so iteration order is the word order and
/// two equal operators always compare and print identically. Zero
/// coefficients are never stored.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct OperatorSum {
    terms: BTreeMap<Word, Rational>,
}

impl OperatorSum {
    pub fn zero() -> Self {
        OperatorSum::default()
    }

    pub fn identity() -> Self {
        OperatorSum::from_word(Word::identity())
    }

    pub fn from_word(word: Word) -> Self {
        let mut op = OperatorSum::zero();
        op.add_term(word, Rational::one());
        op
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, Rational)>,
    {
        let mut op = OperatorSum::zero();
        for (word, coeff) in terms {
            op.add_term(word, coeff);
        }
        op
    }

    pub fn add_term(&mut self, word: Word, coeff: Rational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(word) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Rational)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn coefficient(&self, word: &Word) -> Option<&Rational> {
        self.terms.get(word)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, factor: &Rational) -> OperatorSum {
        if factor.is_zero() {
            return OperatorSum::zero();
        }
        OperatorSum { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * factor)).collect() }
    }

    /// Hermitian adjoint. Coefficients are real, so only the letters change.
    pub fn adjoint(&self) -> OperatorSum {
        OperatorSum::from_terms(self.terms.iter().map(|(w, c)| (w.adjoint(), c.clone())))
    }

    /// Operator product `self · rhs`.
    pub fn product(&self, rhs: &OperatorSum) -> OperatorSum {
        let mut out = OperatorSum::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                if let Some(w) = a.mul(b) {
                    out.add_term(w, ca * cb);
                }
            }
        }
        out
    }

    /// `<0| op |0>` in the all-ground state: the sum of coefficients of words
    /// made of `m` letters only.
    pub fn vacuum_expectation(&self) -> Rational {
        self.terms
            .iter()
            .filter(|(w, _)| w.is_projector_only())
            .fold(Rational::zero(), |acc, (_, c)| acc + c)
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// One term per line, `<num>/<den> <site>:<letter> ...`, in word order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (word, coeff) in &self.terms {
            out.push_str(&format!("{}/{}", coeff.numer(), coeff.denom()));
            if !word.is_identity() {
                out.push(' ');
                out.push_str(&word.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`OperatorSum::to_text`]. Blank lines and `#` comments are
    /// skipped; repeated words are summed.
    pub fn parse_text(text: &str) -> Result<OperatorSum, Error> {
        let mut op = OperatorSum::zero();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
            let (coeff, rest) = match line.split_once(char::is_whitespace) {
                Some((c, r)) => (c, r),
                None => (line, ""),
            };
            let coeff = parse_rational(coeff).map_err(parse_err)?;
            let word: Word = rest.parse().map_err(|e: Error| parse_err(e.to_string()))?;
            op.add_term(word, coeff);
        }
        Ok(op)
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| format!("bad numerator `{num}`"))?;
    let den: BigInt = den.parse().map_err(|_| format!("bad denominator `{den}`"))?;
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(num, den))
}

impl fmt::Debug for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSum[")?;
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}·({w})")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Add for &OperatorSum {
    type Output = OperatorSum;
    fn add(self, rhs: &OperatorSum) -> OperatorSum {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
}

impl Sub for &OperatorSum {
    type Output = OperatorSum;
    fn sub(self, rhs: &OperatorSum) -> OperatorSum {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &OperatorSum {
    type Output = OperatorSum;
    fn neg(self) -> OperatorSum {
        OperatorSum { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c.clone())).collect() }
    }
}

impl Mul for &OperatorSum {
    type Output = OperatorSum;
    fn mul(self, rhs: &OperatorSum) -> OperatorSum {
        self.product(rhs)
    }
}
