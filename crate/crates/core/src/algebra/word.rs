//! Products of letters on distinct sites.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use super::Letter;
use crate::error::Error;

type Slots = SmallVec<[u8; 16]>;

/// A product `x_{k1} x_{k2} ... x_{kn}` with `k1 < k2 < ... < kn`.
///
/// Stored as a contiguous window of slots starting at `start`; a zero slot is
/// the identity. The first and last slot are always letters, and the empty
/// window is the identity operator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    start: i64,
    slots: Slots,
}

impl Word {
    pub fn identity() -> Self {
        Word { start: 0, slots: Slots::new() }
    }

    pub fn single(site: i64, letter: Letter) -> Self {
        let mut slots = Slots::new();
        slots.push(letter.code());
        Word { start: site, slots }
    }

    /// Builds a word from `(site, letter)` pairs in any order. Repeated sites
    /// are rejected; use [`Word::mul`] to multiply letters on one site.
    pub fn from_letters<I>(letters: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (i64, Letter)>,
    {
        let mut pairs: Vec<(i64, Letter)> = letters.into_iter().collect();
        if pairs.is_empty() {
            return Ok(Word::identity());
        }
        pairs.sort_by_key(|&(site, _)| site);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidWord(format!("site {} appears twice", w[0].0)));
        }
        let start = pairs[0].0;
        let end = pairs[pairs.len() - 1].0;
        let mut slots: Slots = SmallVec::from_elem(0, (end - start + 1) as usize);
        for (site, letter) in pairs {
            slots[(site - start) as usize] = letter.code();
        }
        Ok(Word { start, slots })
    }

    pub fn is_identity(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, site: i64) -> Option<Letter> {
        let offset = site.checked_sub(self.start)?;
        if offset < 0 {
            return None;
        }
        self.slots.get(offset as usize).and_then(|&c| Letter::from_code(c))
    }

    /// Letters in increasing site order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Letter)> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter_map(move |(i, &c)| Letter::from_code(c).map(|l| (self.start + i as i64, l)))
    }

    pub fn min_site(&self) -> Option<i64> {
        (!self.is_identity()).then_some(self.start)
    }

    pub fn max_site(&self) -> Option<i64> {
        (!self.is_identity()).then(|| self.start + self.slots.len() as i64 - 1)
    }

    /// `max site - min site + 1`, zero for the identity.
    pub fn length(&self) -> usize {
        self.slots.len()
    }

    /// Number of letters (non-identity sites).
    pub fn letter_count(&self) -> usize {
        self.slots.iter().filter(|&&c| c != 0).count()
    }

    /// Number of `r` and `r†` letters.
    pub fn single_count(&self) -> usize {
        self.slots.iter().filter(|&&c| c == 1 || c == 2).count()
    }

    pub fn number_count(&self) -> usize {
        self.slots.iter().filter(|&&c| c == 3).count()
    }

    /// True for products of `m` letters only (including the identity); these
    /// are exactly the words with a non-zero vacuum expectation, equal to 1.
    pub fn is_projector_only(&self) -> bool {
        self.slots.iter().all(|&c| c == 0 || c == 4)
    }

    /// Minimum number of single-site flips needed before the word can turn into
    /// a product of `m` letters: one per `r`/`r†`, two per `n`.
    pub(crate) fn flips_to_vacuum(&self) -> usize {
        self.slots
            .iter()
            .map(|&c| match c {
                1 | 2 => 1,
                3 => 2,
                _ => 0,
            })
            .sum()
    }

    pub fn adjoint(&self) -> Word {
        let slots = self
            .slots
            .iter()
            .map(|&c| match c {
                1 => 2,
                2 => 1,
                other => other,
            })
            .collect();
        Word { start: self.start, slots }
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.single_count() == 0
    }

    /// Operator product `self · rhs`, `None` if any site product vanishes.
    pub fn mul(&self, rhs: &Word) -> Option<Word> {
        if self.is_identity() {
            return Some(rhs.clone());
        }
        if rhs.is_identity() {
            return Some(self.clone());
        }
        let start = self.start.min(rhs.start);
        let end = (self.start + self.slots.len() as i64).max(rhs.start + rhs.slots.len() as i64);
        let mut slots: Slots = SmallVec::with_capacity((end - start) as usize);
        for site in start..end {
            let a = self.slot(site);
            let b = rhs.slot(site);
            let code = match (a, b) {
                (0, x) | (x, 0) => x,
                (a, b) => {
                    let la = Letter::from_code(a)?;
                    let lb = Letter::from_code(b)?;
                    la.mul(lb)?.code()
                }
            };
            slots.push(code);
        }
        // Both extremes hold letters whose product did not vanish, so the
        // window is already canonical.
        Some(Word { start, slots })
    }

    /// The same word translated by `offset` sites.
    pub fn shifted(&self, offset: i64) -> Word {
        if self.is_identity() {
            return self.clone();
        }
        Word { start: self.start + offset, slots: self.slots.clone() }
    }

    /// Relabels every site through `map`, which must be injective on the
    /// support of the word.
    pub fn relabel<F>(&self, mut map: F) -> Result<Word, Error>
    where
        F: FnMut(i64) -> Result<i64, Error>,
    {
        let pairs = self
            .iter()
            .map(|(site, letter)| map(site).map(|s| (s, letter)))
            .collect::<Result<Vec<_>, _>>()?;
        Word::from_letters(pairs)
    }

    #[inline]
    fn slot(&self, site: i64) -> u8 {
        let offset = site - self.start;
        if offset < 0 || offset as usize >= self.slots.len() {
            0
        } else {
            self.slots[offset as usize]
        }
    }
}

impl Default for Word {
    fn default() -> Self {
        Word::identity()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("1");
        }
        let mut first = true;
        for (site, letter) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{site}:{letter}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Parses the `site:letter` token list used by the text format, e.g.
/// `"1:m 2:r 3:m"`. An empty string or `"1"` is the identity.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::identity());
        }
        let pairs = s
            .split_whitespace()
            .map(|token| {
                let (site, letter) = token
                    .split_once(':')
                    .ok_or_else(|| Error::InvalidWord(format!("expected site:letter, got `{token}`")))?;
                let site: i64 = site
                    .parse()
                    .map_err(|_| Error::InvalidWord(format!("bad site in `{token}`")))?;
                Ok((site, letter.parse::<Letter>()?))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Word::from_letters(pairs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn projector_times_lowering() {
        assert_eq!(w("1:m").mul(&w("1:r")), Some(w("1:r")));
    }

    #[test]
    fn identity_is_neutral() {
        assert_eq!(w("1:m 2:m").mul(&Word::identity()), Some(w("1:m 2:m")));
        assert_eq!(Word::identity().mul(&w("1:m 2:m")), Some(w("1:m 2:m")));
    }

    #[test]
    fn vanishing_site_kills_word() {
        assert_eq!(w("1:r 2:m").mul(&w("1:rd 2:n")), None);
    }

    #[test]
    fn disjoint_sites_merge() {
        assert_eq!(w("1:r").mul(&w("4:n")), Some(w("1:r 4:n")));
        assert_eq!(w("4:n").mul(&w("1:r")), Some(w("1:r 4:n")));
    }

    #[test]
    fn shape_statistics() {
        let x = w("-2:m 0:r 1:n 3:m");
        assert_eq!(x.length(), 6);
        assert_eq!(x.single_count(), 1);
        assert_eq!(x.number_count(), 1);
        assert_eq!(x.letter_count(), 4);
        assert_eq!(x.min_site(), Some(-2));
        assert_eq!(x.max_site(), Some(3));
        assert_eq!(x.get(-1), None);
        assert_eq!(x.get(0), Some(Lower));
        assert_eq!(Word::identity().length(), 0);
    }

    #[test]
    fn duplicate_sites_rejected() {
        assert!(Word::from_letters([(1, Lower), (1, Proj)]).is_err());
    }

    #[test]
    fn adjoint_swaps_single_letters() {
        assert_eq!(w("1:r 2:m").adjoint(), w("1:rd 2:m"));
        assert!(w("1:n 3:m").is_self_adjoint());
    }

    #[test]
    fn display_round_trip() {
        let x = w("-3:rd 0:m 2:n");
        assert_eq!(x.to_string(), "-3:rd 0:m 2:n");
        assert_eq!(x.to_string().parse::<Word>().unwrap(), x);
        assert_eq!(Word::identity().to_string().parse::<Word>().unwrap(), Word::identity());
    }
}
