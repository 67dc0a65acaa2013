//! Closed-form coloring counts for `T(p, q)` over `R_n`, `p` an odd prime,
//! and a sweep that checks them against both computational backends.
//!
//! The general rule depends on `q mod 2p`:
//!
//! | residue              | count                                        |
//! |----------------------|----------------------------------------------|
//! | `0`                  | `n^p`                                        |
//! | odd, `≠ p`           | `n`                                          |
//! | even, `≠ 0`          | `n` if `n = p` or `gcd(n,p) = 1`, `pn` if `n ≥ 2p`, `p ∣ n` |
//! | `p`                  | `n` if `n` odd, `2^{p−1} n` if `n` even       |
//!
//! The per-prime count tables disagree with it in two places. Their even-residue
//! row `n·gcd(p, n)` gives `pn` at `n = p`, and the `p = 7` half-period row
//! keys on `n = 7k, k ≥ 2` instead of parity. Those cells are labelled
//! [`CountCase::Ambiguous`] and carry both values; the sweep records which
//! one the computation picks.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::braid::TorusLinkSpec;
use crate::coloring::{count_colorings_oracle, LinearColoringSystem, DEFAULT_ORACLE_CAP};
use crate::error::CountingError;
use crate::quandle::DihedralQuandle;

/// Regime of the count, one per row of the residue table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountCase {
    /// `q ≡ 0 (mod 2p)`: every top vector closes up.
    Free,
    /// `q` odd, `q ≢ p (mod 2p)`: only constant colorings.
    TrivialOnly,
    /// `q` even, `q ≢ 0 (mod 2p)`: `n` or `pn` depending on `gcd(n, p)`.
    GcdEven,
    /// `q ≡ p (mod 2p)`: `n` or `2^{p−1} n` depending on the parity of `n`.
    HalfPeriod,
    /// The general rule and a per-prime table give different counts.
    Ambiguous,
}

impl CountCase {
    pub fn as_str(self) -> &'static str {
        match self {
            CountCase::Free => "free",
            CountCase::TrivialOnly => "trivial-only",
            CountCase::GcdEven => "gcd-even",
            CountCase::HalfPeriod => "half-period",
            CountCase::Ambiguous => "ambiguous",
        }
    }
}

impl fmt::Display for CountCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Where a candidate count comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    /// The residue rule for general odd prime `p`.
    GeneralRule,
    /// The per-prime tables (`n·gcd(p, n)` for even residues; the `n = 7k` half-period row for `p = 7`).
    PrimeTable,
}

impl CandidateSource {
    pub fn as_str(self) -> &'static str {
        match self {
            CandidateSource::GeneralRule => "general-rule",
            CandidateSource::PrimeTable => "prime-table",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub source: CandidateSource,
    pub count: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountPrediction {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub case: CountCase,
    /// `None` exactly when the case is ambiguous.
    pub count: Option<u128>,
    /// The competing values of an ambiguous cell, general rule first.
    pub candidates: Vec<Candidate>,
    /// `q mod 2p`.
    pub residue: usize,
    pub gcd: usize,
    pub n_even: bool,
}

impl CountPrediction {
    pub fn is_ambiguous(&self) -> bool {
        self.case == CountCase::Ambiguous
    }

    /// Every value this prediction considers possible.
    pub fn possible_counts(&self) -> Vec<u128> {
        match self.count {
            Some(c) => vec![c],
            None => self.candidates.iter().map(|c| c.count).collect(),
        }
    }
}

pub fn is_prime(n: usize) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).pow(exp as u32)
}

/// Predicted number of colorings of `T(p, q)` by `R_n`.
pub fn predict_count(p: usize, q: usize, n: usize) -> Result<CountPrediction, CountingError> {
    if p.is_multiple_of(2) || !is_prime(p) {
        return Err(CountingError::UnsupportedP(p));
    }
    if n < 2 {
        return Err(CountingError::InvalidModulus(n));
    }
    let residue = q % (2 * p);
    let gcd = n.gcd(&p);
    let n_even = n.is_multiple_of(2);
    let nn = n as u128;

    let (case, general, table) = if residue == 0 {
        (CountCase::Free, pow(n, p), None)
    } else if residue == p {
        let general = if n_even { (1u128 << (p - 1)) * nn } else { nn };
        let table = (p == 7).then(|| {
            if n.is_multiple_of(7) && n >= 14 {
                (1u128 << 6) * nn
            } else {
                nn
            }
        });
        (CountCase::HalfPeriod, general, table)
    } else if residue % 2 == 1 {
        (CountCase::TrivialOnly, nn, None)
    } else {
        // gcd is 1 or p, and n = p is the only multiple of p below 2p
        let general = if gcd == 1 || n == p { nn } else { p as u128 * nn };
        (CountCase::GcdEven, general, Some(nn * gcd as u128))
    };

    let mut prediction = CountPrediction {
        p,
        q,
        n,
        case,
        count: Some(general),
        candidates: Vec::new(),
        residue,
        gcd,
        n_even,
    };
    if let Some(table) = table.filter(|&t| t != general) {
        prediction.case = CountCase::Ambiguous;
        prediction.count = None;
        prediction.candidates = vec![
            Candidate {
                source: CandidateSource::GeneralRule,
                count: general,
            },
            Candidate {
                source: CandidateSource::PrimeTable,
                count: table,
            },
        ];
    }
    Ok(prediction)
}

/// Inclusive lists of `p`, `q`, `n` values to sweep.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepGrid {
    pub ps: Vec<usize>,
    pub qs: Vec<usize>,
    pub ns: Vec<usize>,
}

impl SweepGrid {
    pub fn new(ps: Vec<usize>, qs: Vec<usize>, ns: Vec<usize>) -> Self {
        SweepGrid { ps, qs, ns }
    }

    /// Cells in `(p, q, n)` order, duplicates removed.
    pub fn cells(&self) -> Vec<(usize, usize, usize)> {
        let sorted = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v.dedup();
            v
        };
        let (ps, qs, ns) = (sorted(&self.ps), sorted(&self.qs), sorted(&self.ns));
        let mut out = Vec::new();
        for &p in &ps {
            for &q in &qs {
                for &n in &ns {
                    out.push((p, q, n));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepOptions {
    pub linear: bool,
    pub oracle: bool,
    pub oracle_cap: u128,
    /// When the oracle would exceed `oracle_cap`, leave its value out instead of failing.
    /// Cells with no other backend are then dropped.
    pub skip_over_cap: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            linear: true,
            oracle: true,
            oracle_cap: DEFAULT_ORACLE_CAP,
            skip_over_cap: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellStatus {
    Match,
    AmbiguousResolved,
    Mismatch,
}

impl CellStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            CellStatus::Match => "match",
            CellStatus::AmbiguousResolved => "ambiguous-resolved",
            CellStatus::Mismatch => "mismatch",
        }
    }
}

/// One row of a sweep report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: usize,
    pub q: usize,
    pub n: usize,
    pub predicted: Option<u128>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<Candidate>,
    pub case: CountCase,
    pub computed: u128,
    pub computed_linear: Option<u128>,
    pub computed_oracle: Option<u128>,
    pub status: CellStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub winner: Option<CandidateSource>,
}

impl SweepCell {
    pub fn backends_agree(&self) -> bool {
        match (self.computed_linear, self.computed_oracle) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SweepReport {
    pub cells: Vec<SweepCell>,
}

impl SweepReport {
    pub fn count_status(&self, status: CellStatus) -> usize {
        self.cells.iter().filter(|c| c.status == status).count()
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &SweepCell> {
        self.cells.iter().filter(|c| c.status == CellStatus::Mismatch)
    }

    pub fn has_mismatch(&self) -> bool {
        self.mismatches().next().is_some()
    }

    pub fn has_ambiguity(&self) -> bool {
        self.cells.iter().any(|c| c.status == CellStatus::AmbiguousResolved)
    }
}

/// Judges one cell given its prediction and backend counts.
pub fn judge_cell(prediction: &CountPrediction, linear: Option<u128>, oracle: Option<u128>) -> SweepCell {
    let computed = linear.or(oracle).unwrap_or(0);
    let agree = match (linear, oracle) {
        (Some(a), Some(b)) => a == b,
        (None, None) => false,
        _ => true,
    };
    let (status, winner) = if !agree {
        (CellStatus::Mismatch, None)
    } else if let Some(predicted) = prediction.count {
        let status = if predicted == computed {
            CellStatus::Match
        } else {
            CellStatus::Mismatch
        };
        (status, None)
    } else {
        match prediction.candidates.iter().find(|c| c.count == computed) {
            Some(c) => (CellStatus::AmbiguousResolved, Some(c.source)),
            None => (CellStatus::Mismatch, None),
        }
    };
    SweepCell {
        p: prediction.p,
        q: prediction.q,
        n: prediction.n,
        predicted: prediction.count,
        candidates: prediction.candidates.clone(),
        case: prediction.case,
        computed,
        computed_linear: linear,
        computed_oracle: oracle,
        status,
        winner,
    }
}

/// Runs every grid cell through the predictor and the enabled backends.
///
/// Cells run in parallel; the report is in `(p, q, n)` order.
pub fn verify_counts(grid: &SweepGrid, opts: &SweepOptions) -> Result<SweepReport, CountingError> {
    let cells = grid.cells();
    // one Smith form per (p, q)
    let systems: BTreeMap<(usize, usize), LinearColoringSystem> = {
        let keys: Vec<(usize, usize)> = cells
            .iter()
            .map(|&(p, q, _)| (p, q))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        keys.into_par_iter()
            .map(|(p, q)| {
                Ok((
                    (p, q),
                    LinearColoringSystem::torus(TorusLinkSpec::new(p, q).map_err(crate::error::ColoringError::from)?),
                ))
            })
            .collect::<Result<_, CountingError>>()?
    };

    let rows: Vec<Option<SweepCell>> = cells
        .into_par_iter()
        .map(|(p, q, n)| -> Result<Option<SweepCell>, CountingError> {
            let prediction = predict_count(p, q, n)?;
            let system = &systems[&(p, q)];
            let linear = if opts.linear { Some(system.count(n)?) } else { None };
            let oracle = if opts.oracle {
                let quandle = DihedralQuandle::new(n).expect("n >= 2").to_quandle();
                match count_colorings_oracle(system.word(), &quandle, opts.oracle_cap) {
                    Ok(c) => Some(c),
                    Err(crate::error::ColoringError::OracleCapExceeded { .. }) if opts.skip_over_cap => {
                        if linear.is_none() {
                            return Ok(None);
                        }
                        None
                    }
                    Err(e) => return Err(e.into()),
                }
            } else {
                None
            };
            Ok(Some(judge_cell(&prediction, linear, oracle)))
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepReport {
        cells: rows.into_iter().flatten().collect(),
    })
}
