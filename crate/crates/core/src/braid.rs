//! Braid words, torus braids, and color propagation through a braid.
//!
//! Crossing convention: letters act top to bottom on a horizontal
//! cross-section of colors. At `σ_i` the strand in position `i` passes under
//! the strand in position `i+1`:
//!
//! ```text
//! σ_i   : (x, y) ↦ (y, x * y)
//! σ_i⁻¹ : (x, y) ↦ (y *̄ x, x)
//! ```
//!
//! so the over-strand keeps its color and the under-strand is acted on by it.
//! `σ_i⁻¹` is the exact inverse of `σ_i`, which is what makes the figure-eight
//! `σ1 σ2⁻¹ σ1 σ2⁻¹` come out with 25 colorings over `R_5`. With this handedness
//! the torus braid `(σ1…σ_{p−1})^q` yields the closure relations
//! `y_i = y_p + (−1)^{q+1} y_q + (−1)^q y_{i+q}` over `R_n`, indices mod `p`.
//! The closure identifies bottom position `i` with top position `i`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::error::BraidError;
use crate::linalg::IntMatrix;
use crate::quandle::FiniteQuandle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// One braid generator `σ_i^{±1}`; `generator` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub generator: usize,
    pub sign: Sign,
}

impl Letter {
    pub fn pos(generator: usize) -> Self {
        Letter {
            generator,
            sign: Sign::Positive,
        }
    }

    pub fn neg(generator: usize) -> Self {
        Letter {
            generator,
            sign: Sign::Negative,
        }
    }

    pub fn inverse(self) -> Self {
        let sign = match self.sign {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        };
        Letter { sign, ..self }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Positive => write!(f, "s{}", self.generator),
            Sign::Negative => write!(f, "-s{}", self.generator),
        }
    }
}

impl FromStr for Letter {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BraidError::BadLetter(s.to_string());
        let (sign, rest) = match s.strip_prefix('-') {
            Some(rest) => (Sign::Negative, rest),
            None => (Sign::Positive, s.strip_prefix('+').unwrap_or(s)),
        };
        let digits = rest
            .strip_prefix('s')
            .or_else(|| rest.strip_prefix('σ'))
            .ok_or_else(bad)?;
        let generator: usize = digits.parse().map_err(|_| bad())?;
        if generator == 0 {
            return Err(bad());
        }
        Ok(Letter { generator, sign })
    }
}

/// A word in the braid group on `strands` strands.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<Letter>) -> Result<Self, BraidError> {
        if strands == 0 {
            return Err(BraidError::TooFewStrands { min: 1, got: 0 });
        }
        if let Some(l) = letters.iter().find(|l| l.generator == 0 || l.generator >= strands) {
            return Err(BraidError::GeneratorOutOfRange {
                generator: l.generator,
                strands,
            });
        }
        Ok(BraidWord { strands, letters })
    }

    /// Parses `s1 s2 -s3 ...`. Without an explicit strand count, the word uses
    /// one more strand than its largest generator index.
    pub fn parse(text: &str, strands: Option<usize>) -> Result<Self, BraidError> {
        let letters = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Letter>, _>>()?;
        let strands = strands.unwrap_or_else(|| letters.iter().map(|l| l.generator + 1).max().unwrap_or(1));
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &BraidWord) -> Result<BraidWord, BraidError> {
        if self.strands != other.strands {
            return Err(BraidError::StateLength {
                got: other.strands,
                strands: self.strands,
            });
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(BraidWord {
            strands: self.strands,
            letters,
        })
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The torus link `T(p, q)`: closure of `(σ1…σ_{p−1})^q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusLinkSpec {
    pub p: usize,
    pub q: usize,
}

impl TorusLinkSpec {
    pub fn new(p: usize, q: usize) -> Result<Self, BraidError> {
        if p < 2 {
            return Err(BraidError::TooFewStrands { min: 2, got: p });
        }
        Ok(TorusLinkSpec { p, q })
    }
}

impl fmt::Display for TorusLinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.p, self.q)
    }
}

/// Link input accepted by the command line: `torus:p,q` or a braid word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LinkSpec {
    Torus(TorusLinkSpec),
    Braid(BraidWord),
}

impl LinkSpec {
    pub fn parse(text: &str, strands: Option<usize>) -> Result<Self, BraidError> {
        let text = text.trim();
        if let Some(rest) = text.strip_prefix("torus:") {
            let bad = || BraidError::BadLinkSpec(text.to_string());
            let (p, q) = rest.split_once(',').ok_or_else(bad)?;
            let p = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim().parse().map_err(|_| bad())?;
            return Ok(LinkSpec::Torus(TorusLinkSpec::new(p, q)?));
        }
        Ok(LinkSpec::Braid(BraidWord::parse(text, strands)?))
    }

    pub fn word(&self) -> BraidWord {
        match self {
            LinkSpec::Torus(t) => torus_braid(*t),
            LinkSpec::Braid(w) => w.clone(),
        }
    }

    pub fn torus(&self) -> Option<TorusLinkSpec> {
        match self {
            LinkSpec::Torus(t) => Some(*t),
            LinkSpec::Braid(_) => None,
        }
    }
}

impl fmt::Display for LinkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkSpec::Torus(t) => write!(f, "torus:{},{}", t.p, t.q),
            LinkSpec::Braid(w) => write!(f, "{w}"),
        }
    }
}

/// `(σ1 σ2 … σ_{p−1})^q`, all crossings positive.
pub fn torus_braid(spec: TorusLinkSpec) -> BraidWord {
    let letters = (0..spec.q).flat_map(|_| (1..spec.p).map(Letter::pos)).collect();
    BraidWord {
        strands: spec.p,
        letters,
    }
}

/// One crossing as seen during propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ArcEvent {
    pub letter: usize,
    /// Color of the under-strand entering the crossing.
    pub under_in: usize,
    /// Color of the over-strand (unchanged).
    pub over: usize,
    /// Color of the under-strand leaving the crossing.
    pub under_out: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Propagation {
    pub bottom: Vec<usize>,
    pub arcs: Vec<ArcEvent>,
}

/// Pushes `top` through `word` with colors in `q`, logging every crossing.
pub fn propagate(word: &BraidWord, q: &FiniteQuandle, top: &[usize]) -> Result<Propagation, BraidError> {
    if top.len() != word.strands() {
        return Err(BraidError::StateLength {
            got: top.len(),
            strands: word.strands(),
        });
    }
    for &c in top {
        q.check_element(c)?;
    }
    let mut state = top.to_vec();
    let mut arcs = Vec::with_capacity(word.len());
    for (k, letter) in word.letters().iter().enumerate() {
        let i = letter.generator - 1;
        let (x, y) = (state[i], state[i + 1]);
        let event = match letter.sign {
            Sign::Positive => {
                let out = q.op(x, y);
                state[i] = y;
                state[i + 1] = out;
                ArcEvent {
                    letter: k,
                    under_in: x,
                    over: y,
                    under_out: out,
                }
            }
            Sign::Negative => {
                let out = q.inv_op(y, x);
                state[i] = out;
                state[i + 1] = x;
                ArcEvent {
                    letter: k,
                    under_in: y,
                    over: x,
                    under_out: out,
                }
            }
        };
        arcs.push(event);
    }
    Ok(Propagation { bottom: state, arcs })
}

/// In-place propagation without logging or range checks; the hot loop of the oracle.
#[inline]
pub(crate) fn propagate_in_place(letters: &[(usize, Sign)], q: &FiniteQuandle, state: &mut [usize]) {
    for &(i, sign) in letters {
        let (x, y) = (state[i], state[i + 1]);
        match sign {
            Sign::Positive => {
                state[i] = y;
                state[i + 1] = q.op(x, y);
            }
            Sign::Negative => {
                state[i] = q.inv_op(y, x);
                state[i + 1] = x;
            }
        }
    }
}

pub(crate) fn zero_based_letters(word: &BraidWord) -> Vec<(usize, Sign)> {
    word.letters().iter().map(|l| (l.generator - 1, l.sign)).collect()
}

/// Integer matrix `M` with `bottom = M · top` under the dihedral rule.
///
/// Each positive crossing is `(x, y) ↦ (y, 2y − x)` and each negative one
/// `(x, y) ↦ (2x − y, x)`; `M` is their product in letter order.
pub fn propagation_matrix(word: &BraidWord) -> IntMatrix {
    let p = word.strands();
    let mut m = IntMatrix::identity(p);
    let two = BigInt::from(2);
    for letter in word.letters() {
        let i = letter.generator - 1;
        for c in 0..p {
            let x = m.get(i, c).clone();
            let y = m.get(i + 1, c).clone();
            let (new_x, new_y) = match letter.sign {
                Sign::Positive => {
                    let out = &two * &y - &x;
                    (y, out)
                }
                Sign::Negative => {
                    let out = &two * &x - &y;
                    (out, x)
                }
            };
            m.set(i, c, new_x);
            m.set(i + 1, c, new_y);
        }
    }
    m
}
