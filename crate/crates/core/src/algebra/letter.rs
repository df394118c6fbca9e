//! Single-site operator letters.
//!
//! Every site carries a two-level system with lowering operator `r`, raising
//! operator `r†`, and the two projectors `n = r†r` (excited) and `m = 1 - n`
//! (ground). The identity is never stored as a letter; it is the absence of a
//! letter at a site.
//!
//! The four letters are closed under multiplication up to zero. Using the
//! matrix units `r = |g><e|`, `r† = |e><g|`, `n = |e><e|`, `m = |g><g|`, every
//! product is a single matrix unit or vanishes:
//!
//! ```text
//!   a \ b |  r    r†   n    m
//!   ------+--------------------
//!   r     |  0    m    r    0
//!   r†    |  n    0    0    r†
//!   n     |  0    r†   n    0
//!   m     |  r    0    0    m
//! ```
//!
//! The relations `r² = 0` and `{r, r†} = 1` fix every entry, so arbitrary
//! products of words stay words.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    /// `r`, de-excites the site.
    Lower,
    /// `r†`, excites the site.
    Raise,
    /// `n`, projector on the excited state.
    Num,
    /// `m`, projector on the ground state.
    Proj,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::Lower, Letter::Raise, Letter::Num, Letter::Proj];

    /// Product `self · rhs` on one site, `None` when it vanishes.
    pub fn mul(self, rhs: Letter) -> Option<Letter> {
        use Letter::*;
        match (self, rhs) {
            (Lower, Raise) => Some(Proj),
            (Lower, Num) => Some(Lower),
            (Raise, Lower) => Some(Num),
            (Raise, Proj) => Some(Raise),
            (Num, Raise) => Some(Raise),
            (Num, Num) => Some(Num),
            (Proj, Lower) => Some(Lower),
            (Proj, Proj) => Some(Proj),
            _ => None,
        }
    }

    pub fn adjoint(self) -> Letter {
        match self {
            Letter::Lower => Letter::Raise,
            Letter::Raise => Letter::Lower,
            other => other,
        }
    }

    /// `r` and `r†` flip the site; they change the excitation parity.
    pub fn is_single(self) -> bool {
        matches!(self, Letter::Lower | Letter::Raise)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Letter::Lower => "r",
            Letter::Raise => "rd",
            Letter::Num => "n",
            Letter::Proj => "m",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Letter::Lower => 1,
            Letter::Raise => 2,
            Letter::Num => 3,
            Letter::Proj => 4,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Letter> {
        match code {
            1 => Some(Letter::Lower),
            2 => Some(Letter::Raise),
            3 => Some(Letter::Num),
            4 => Some(Letter::Proj),
            _ => None,
        }
    }

    /// Matrix element `<out| letter |in>` on one site, states encoded as
    /// `false` = ground and `true` = excited. Returns the output state.
    pub fn act(self, excited: bool) -> Option<bool> {
        match (self, excited) {
            (Letter::Lower, true) => Some(false),
            (Letter::Raise, false) => Some(true),
            (Letter::Num, true) => Some(true),
            (Letter::Proj, false) => Some(false),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r" => Ok(Letter::Lower),
            "rd" => Ok(Letter::Raise),
            "n" => Ok(Letter::Num),
            "m" => Ok(Letter::Proj),
            other => Err(Error::InvalidWord(format!("unknown letter `{other}`"))),
        }
    }
}
