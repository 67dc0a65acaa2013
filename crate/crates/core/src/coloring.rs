//! The coloring set of a braid closure, by brute force or by linear algebra.
//!
//! A coloring is stored by its top-strand vector only. Both backends return
//! colorings in lexicographic order of that vector, so two coloring sets are
//! equal exactly when their lists are.

use rayon::prelude::*;

use crate::braid::{propagate_in_place, propagation_matrix, torus_braid, zero_based_letters, BraidWord, TorusLinkSpec};
use crate::error::{ColoringError, LinalgError};
use crate::linalg::{smith_normal_form, IntMatrix, SnfResult};
use crate::quandle::FiniteQuandle;

/// Default bound on the number of top assignments the oracle will try.
pub const DEFAULT_ORACLE_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColoringClass {
    Trivial,
    Nontrivial,
}

/// Trivial iff every strand carries the same color.
pub fn classify(top: &[usize]) -> ColoringClass {
    match top.split_first() {
        Some((first, rest)) if rest.iter().any(|c| c != first) => ColoringClass::Nontrivial,
        _ => ColoringClass::Trivial,
    }
}

/// A borrowed view of one coloring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Coloring<'a> {
    pub id: usize,
    pub top: &'a [usize],
}

impl Coloring<'_> {
    pub fn class(&self) -> ColoringClass {
        classify(self.top)
    }

    pub fn is_trivial(&self) -> bool {
        self.class() == ColoringClass::Trivial
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringSet {
    word: BraidWord,
    modulus: usize,
    count: u128,
    /// Flattened top vectors, `strands` entries each; `None` for count-only results.
    tops: Option<Vec<usize>>,
}

impl ColoringSet {
    fn enumerated(word: BraidWord, modulus: usize, tops: Vec<usize>) -> Self {
        let count = (tops.len() / word.strands()) as u128;
        ColoringSet {
            word,
            modulus,
            count,
            tops: Some(tops),
        }
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    pub fn strands(&self) -> usize {
        self.word.strands()
    }

    /// Order of the target quandle.
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn count(&self) -> u128 {
        self.count
    }

    pub fn is_enumerated(&self) -> bool {
        self.tops.is_some()
    }

    /// Number of materialized colorings (0 for count-only results).
    pub fn len(&self) -> usize {
        self.tops.as_ref().map_or(0, |t| t.len() / self.strands())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: usize) -> Option<Coloring<'_>> {
        let p = self.strands();
        let tops = self.tops.as_ref()?;
        tops.get(id * p..(id + 1) * p).map(|top| Coloring { id, top })
    }

    pub fn iter(&self) -> impl Iterator<Item = Coloring<'_>> + '_ {
        let p = self.strands();
        self.tops
            .as_deref()
            .unwrap_or(&[])
            .chunks_exact(p)
            .enumerate()
            .map(|(id, top)| Coloring { id, top })
    }

    /// Top vectors as owned rows.
    pub fn tops(&self) -> Vec<Vec<usize>> {
        self.iter().map(|c| c.top.to_vec()).collect()
    }

    /// Id of a coloring by its top vector (binary search in canonical order).
    pub fn index_of(&self, top: &[usize]) -> Option<usize> {
        let p = self.strands();
        let tops = self.tops.as_ref()?;
        if top.len() != p {
            return None;
        }
        let n = tops.len() / p;
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match tops[mid * p..(mid + 1) * p].cmp(top) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn trivial_ids(&self) -> Vec<usize> {
        self.iter().filter(Coloring::is_trivial).map(|c| c.id).collect()
    }

    pub fn nontrivial_ids(&self) -> Vec<usize> {
        self.iter().filter(|c| !c.is_trivial()).map(|c| c.id).collect()
    }

    pub fn trivial_count(&self) -> usize {
        self.iter().filter(Coloring::is_trivial).count()
    }
}

fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base as u128))
}

/// Scans top vectors in lexicographic order and returns, per first-strand
/// color, the flattened tops that close up.
fn oracle_scan(word: &BraidWord, q: &FiniteQuandle, cap: u128) -> Result<Vec<Vec<usize>>, ColoringError> {
    let p = word.strands();
    let m = q.order();
    let candidates = checked_pow(m, p).unwrap_or(u128::MAX);
    if candidates > cap {
        return Err(ColoringError::OracleCapExceeded { candidates, cap });
    }
    let letters = zero_based_letters(word);
    let chunks: Vec<Vec<usize>> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut found = Vec::new();
            let mut top = vec![0usize; p];
            top[0] = first;
            let mut state = vec![0usize; p];
            loop {
                state.copy_from_slice(&top);
                propagate_in_place(&letters, q, &mut state);
                if state == top {
                    found.extend_from_slice(&top);
                }
                // odometer over positions 1..p
                let mut k = p;
                loop {
                    if k == 1 {
                        return found;
                    }
                    k -= 1;
                    top[k] += 1;
                    if top[k] < m {
                        break;
                    }
                    top[k] = 0;
                }
            }
        })
        .collect();
    Ok(chunks)
}

/// Brute force: tries every top assignment in `Q^p` and keeps those whose
/// bottom equals the top.
pub fn enumerate_colorings_oracle(
    word: &BraidWord,
    q: &FiniteQuandle,
    cap: u128,
) -> Result<ColoringSet, ColoringError> {
    let tops = oracle_scan(word, q, cap)?.concat();
    Ok(ColoringSet::enumerated(word.clone(), q.order(), tops))
}

/// Brute-force count without keeping the colorings.
pub fn count_colorings_oracle(word: &BraidWord, q: &FiniteQuandle, cap: u128) -> Result<u128, ColoringError> {
    let p = word.strands();
    Ok(oracle_scan(word, q, cap)?.iter().map(|c| (c.len() / p) as u128).sum())
}

/// The closure system `(M − I)·y ≡ 0` of a braid word under the dihedral
/// rule, with its Smith form computed once and reused for every modulus.
#[derive(Clone, Debug)]
pub struct LinearColoringSystem {
    word: BraidWord,
    system: IntMatrix,
    snf: SnfResult,
}

impl LinearColoringSystem {
    pub fn new(word: &BraidWord) -> Self {
        let m = propagation_matrix(word);
        let system = &m - &IntMatrix::identity(word.strands());
        let snf = smith_normal_form(&system);
        LinearColoringSystem {
            word: word.clone(),
            system,
            snf,
        }
    }

    pub fn torus(spec: TorusLinkSpec) -> Self {
        Self::new(&torus_braid(spec))
    }

    pub fn word(&self) -> &BraidWord {
        &self.word
    }

    /// `M − I`.
    pub fn system(&self) -> &IntMatrix {
        &self.system
    }

    pub fn snf(&self) -> &SnfResult {
        &self.snf
    }

    pub fn count(&self, n: usize) -> Result<u128, ColoringError> {
        Ok(self.snf.kernel_count_mod(n as u64)?)
    }

    /// All colorings over `R_n`; past `cap` the result carries only the count.
    pub fn colorings(&self, n: usize, cap: u128) -> Result<ColoringSet, ColoringError> {
        if n == 1 {
            // Z_1 has a single vector
            return Ok(ColoringSet::enumerated(
                self.word.clone(),
                1,
                vec![0; self.word.strands()],
            ));
        }
        match self.snf.kernel_enumerate_mod(n as u64, cap) {
            Ok(rows) => Ok(ColoringSet::enumerated(self.word.clone(), n, rows.concat())),
            Err(LinalgError::EnumerationTooLarge { count, .. }) => Ok(ColoringSet {
                word: self.word.clone(),
                modulus: n,
                count,
                tops: None,
            }),
            Err(e) => Err(e.into()),
        }
    }
}

/// Colorings of a braid closure by `R_n` as the kernel of `M − I` mod `n`.
pub fn enumerate_colorings_linear(word: &BraidWord, n: usize, cap: u128) -> Result<ColoringSet, ColoringError> {
    LinearColoringSystem::new(word).colorings(n, cap)
}

/// [`enumerate_colorings_linear`] for `T(p, q)`.
pub fn enumerate_torus_colorings_linear(
    spec: TorusLinkSpec,
    n: usize,
    cap: u128,
) -> Result<ColoringSet, ColoringError> {
    LinearColoringSystem::torus(spec).colorings(n, cap)
}
