//! Coloring quivers and the block-structured forms that describe them.
//!
//! The quiver of a coloring set has one vertex per coloring and an edge
//! `f → φ∘f` for each endomorphism `φ`; parallel edges are stored as a weight.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::ColoringSet;
use crate::counting::{is_prime, predict_count};
use crate::error::QuiverError;
use crate::quandle::Endomorphism;

/// Sparse weighted digraph on `0..n`. Rows list `(target, weight)` pairs,
/// sorted by target, with zero weights omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightedQuiver {
    n: usize,
    rows: Vec<Vec<(usize, u64)>>,
    /// Top vector of the coloring behind each vertex, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<Vec<usize>>>,
}

impl WeightedQuiver {
    pub fn empty(n: usize) -> Self {
        WeightedQuiver {
            n,
            rows: vec![Vec::new(); n],
            labels: None,
        }
    }

    /// Builds from `(from, to, weight)` triples; repeated pairs add up.
    pub fn from_triples(n: usize, triples: impl IntoIterator<Item = (usize, usize, u64)>) -> Self {
        let mut rows = vec![Vec::new(); n];
        for (from, to, w) in triples {
            assert!(from < n && to < n, "edge {from} -> {to} outside 0..{n}");
            rows[from].push((to, w));
        }
        for row in &mut rows {
            normalize_row(row);
        }
        WeightedQuiver { n, rows, labels: None }
    }

    /// Builds from a dense square matrix.
    pub fn from_dense(matrix: &[Vec<u64>]) -> Self {
        let n = matrix.len();
        let rows = matrix
            .iter()
            .map(|r| {
                assert_eq!(r.len(), n, "weight matrix must be square");
                r.iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0)
                    .map(|(j, &w)| (j, w))
                    .collect()
            })
            .collect();
        WeightedQuiver { n, rows, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<Vec<usize>>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[Vec<usize>]> {
        self.labels.as_deref()
    }

    pub fn label(&self, v: usize) -> Option<&[usize]> {
        self.labels.as_ref().map(|l| l[v].as_slice())
    }

    pub fn row(&self, v: usize) -> &[(usize, u64)] {
        &self.rows[v]
    }

    pub fn weight(&self, from: usize, to: usize) -> u64 {
        let row = &self.rows[from];
        row.binary_search_by_key(&to, |&(t, _)| t).map_or(0, |i| row[i].1)
    }

    pub fn row_sum(&self, v: usize) -> u64 {
        self.rows[v].iter().map(|&(_, w)| w).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn total_weight(&self) -> u64 {
        (0..self.n).map(|v| self.row_sum(v)).sum()
    }

    /// All nonzero `(from, to, weight)` triples in lexicographic order.
    pub fn triples(&self) -> Vec<(usize, usize, u64)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(j, w)| (i, j, w)))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut m = vec![vec![0; self.n]; self.n];
        for (i, j, w) in self.triples() {
            m[i][j] = w;
        }
        m
    }

    /// Incoming `(source, weight)` lists, sorted by source.
    pub fn in_rows(&self) -> Vec<Vec<(usize, u64)>> {
        let mut ins = vec![Vec::new(); self.n];
        for (i, j, w) in self.triples() {
            ins[j].push((i, w));
        }
        ins
    }

    /// The quiver with vertex `v` renamed to `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> WeightedQuiver {
        assert_eq!(perm.len(), self.n);
        let mut out = WeightedQuiver::from_triples(
            self.n,
            self.triples().into_iter().map(|(i, j, w)| (perm[i], perm[j], w)),
        );
        if let Some(labels) = &self.labels {
            let mut moved = vec![Vec::new(); self.n];
            for (v, l) in labels.iter().enumerate() {
                moved[perm[v]] = l.clone();
            }
            out.labels = Some(moved);
        }
        out
    }

    /// Whether `W_self[v][w] = W_other[perm[v]][perm[w]]` for every pair.
    pub fn maps_onto(&self, other: &WeightedQuiver, perm: &[usize]) -> bool {
        if self.n != other.n || perm.len() != self.n || self.edge_count() != other.edge_count() {
            return false;
        }
        self.rows.iter().enumerate().all(|(v, row)| {
            let image = &other.rows[perm[v]];
            image.len() == row.len() && row.iter().all(|&(w, wt)| other.weight(perm[v], perm[w]) == wt)
        })
    }
}

fn normalize_row(row: &mut Vec<(usize, u64)>) {
    row.sort_unstable_by_key(|&(t, _)| t);
    let mut merged: Vec<(usize, u64)> = Vec::with_capacity(row.len());
    for &(t, w) in row.iter() {
        match merged.last_mut() {
            Some(last) if last.0 == t => last.1 += w,
            _ => merged.push((t, w)),
        }
    }
    merged.retain(|&(_, w)| w > 0);
    *row = merged;
}

/// The quiver of `colorings` under `endos`: `W[f][g]` counts the `φ` with `φ∘f = g`.
///
/// Every image is looked up in the coloring set, so an endomorphism list
/// that does not preserve colorings is reported rather than miscounted.
pub fn build_quiver(colorings: &ColoringSet, endos: &[Endomorphism]) -> Result<WeightedQuiver, QuiverError> {
    if !colorings.is_enumerated() && colorings.count() > 0 {
        return Err(QuiverError::NotEnumerated);
    }
    if let Some(e) = endos.iter().find(|e| e.order() != colorings.modulus()) {
        return Err(QuiverError::OrderMismatch {
            endo_order: e.order(),
            modulus: colorings.modulus(),
        });
    }
    let tables: Vec<Vec<usize>> = endos.iter().map(Endomorphism::image_table).collect();
    let rows = (0..colorings.len())
        .into_par_iter()
        .map(|id| {
            let top = colorings.get(id).expect("id in range").top;
            let mut image = vec![0; top.len()];
            let mut row = Vec::with_capacity(tables.len());
            for (k, t) in tables.iter().enumerate() {
                for (dst, &c) in image.iter_mut().zip(top) {
                    *dst = t[c];
                }
                match colorings.index_of(&image) {
                    Some(g) => row.push((g, 1)),
                    None => {
                        return Err(QuiverError::ClosureViolation {
                            endo: k,
                            coloring: top.to_vec(),
                            image,
                        })
                    }
                }
            }
            normalize_row(&mut row);
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(WeightedQuiver {
        n: rows.len(),
        rows,
        labels: Some(colorings.tops()),
    })
}

/// Checks the structural laws of a computed quiver.
///
/// Row sums must equal `endo_count`. No trivial coloring may point at a
/// nontrivial one. With the full affine set (`endo_count = n²`) every pair
/// of trivial colorings must carry weight `n`.
pub fn check_quiver_invariants(
    quiver: &WeightedQuiver,
    colorings: &ColoringSet,
    endo_count: usize,
) -> Result<(), QuiverError> {
    let describe = |v: usize| format!("{v} {:?}", quiver.label(v).unwrap_or(&[]));
    for v in 0..quiver.vertex_count() {
        let sum = quiver.row_sum(v);
        if sum != endo_count as u64 {
            return Err(QuiverError::Invariant(format!(
                "row {} sums to {sum}, expected {endo_count}",
                describe(v)
            )));
        }
    }
    let trivial = colorings.trivial_ids();
    let is_trivial = {
        let mut flags = vec![false; quiver.vertex_count()];
        for &t in &trivial {
            flags[t] = true;
        }
        flags
    };
    for &f in &trivial {
        if let Some(&(g, w)) = quiver.row(f).iter().find(|&&(g, _)| !is_trivial[g]) {
            return Err(QuiverError::Invariant(format!(
                "trivial coloring {} has weight {w} to nontrivial {}",
                describe(f),
                describe(g)
            )));
        }
    }
    let n = colorings.modulus();
    if endo_count == n * n {
        for &f in &trivial {
            for &g in &trivial {
                let w = quiver.weight(f, g);
                if w != n as u64 {
                    return Err(QuiverError::Invariant(format!(
                        "trivial pair {} -> {} has weight {w}, expected {n}",
                        describe(f),
                        describe(g)
                    )));
                }
            }
        }
    }
    Ok(())
}

/// A quiver described by complete blocks, disjoint unions and joins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum QuiverForm {
    Empty,
    /// `(K_size, ŵ)`: every ordered pair, loops included, has weight `weight`.
    Complete {
        size: usize,
        weight: u64,
    },
    /// `copies` disjoint copies of `part`.
    Union {
        copies: usize,
        part: Box<QuiverForm>,
    },
    /// `sink ←∇_weight source`: each source vertex sends `weight` edges to each sink vertex.
    Join {
        sink: Box<QuiverForm>,
        source: Box<QuiverForm>,
        weight: u64,
    },
}

/// One complete block in block-major order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormBlock {
    pub size: usize,
    pub weight: u64,
}

pub fn complete_form(size: usize, weight: u64) -> QuiverForm {
    assert!(
        size >= 1 && weight >= 1,
        "complete block needs positive size and weight"
    );
    QuiverForm::Complete { size, weight }
}

pub fn union_form(copies: usize, part: QuiverForm) -> QuiverForm {
    if copies == 0 || part == QuiverForm::Empty {
        QuiverForm::Empty
    } else if copies == 1 {
        part
    } else {
        QuiverForm::Union {
            copies,
            part: Box::new(part),
        }
    }
}

/// `sink ←∇_d source`. An empty side yields the other side unchanged.
pub fn join_form(sink: QuiverForm, source: QuiverForm, d: u64) -> QuiverForm {
    assert!(d >= 1, "join weight must be positive");
    match (sink, source) {
        (QuiverForm::Empty, other) | (other, QuiverForm::Empty) => other,
        (sink, source) => QuiverForm::Join {
            sink: Box::new(sink),
            source: Box::new(source),
            weight: d,
        },
    }
}

impl QuiverForm {
    pub fn vertex_count(&self) -> usize {
        match self {
            QuiverForm::Empty => 0,
            QuiverForm::Complete { size, .. } => *size,
            QuiverForm::Union { copies, part } => copies * part.vertex_count(),
            QuiverForm::Join { sink, source, .. } => sink.vertex_count() + source.vertex_count(),
        }
    }

    pub fn block_count(&self) -> usize {
        match self {
            QuiverForm::Empty => 0,
            QuiverForm::Complete { .. } => 1,
            QuiverForm::Union { copies, part } => copies * part.block_count(),
            QuiverForm::Join { sink, source, .. } => sink.block_count() + source.block_count(),
        }
    }

    /// Complete blocks in realization order.
    pub fn blocks(&self) -> Vec<FormBlock> {
        let mut out = Vec::new();
        self.collect_blocks(&mut out);
        out
    }

    fn collect_blocks(&self, out: &mut Vec<FormBlock>) {
        match self {
            QuiverForm::Empty => {}
            QuiverForm::Complete { size, weight } => out.push(FormBlock {
                size: *size,
                weight: *weight,
            }),
            QuiverForm::Union { copies, part } => {
                for _ in 0..*copies {
                    part.collect_blocks(out);
                }
            }
            QuiverForm::Join { sink, source, .. } => {
                sink.collect_blocks(out);
                source.collect_blocks(out);
            }
        }
    }

    fn emit(&self, offset: usize, triples: &mut Vec<(usize, usize, u64)>) {
        match self {
            QuiverForm::Empty => {}
            QuiverForm::Complete { size, weight } => {
                for i in offset..offset + size {
                    for j in offset..offset + size {
                        triples.push((i, j, *weight));
                    }
                }
            }
            QuiverForm::Union { copies, part } => {
                let step = part.vertex_count();
                for c in 0..*copies {
                    part.emit(offset + c * step, triples);
                }
            }
            QuiverForm::Join { sink, source, weight } => {
                let s = sink.vertex_count();
                sink.emit(offset, triples);
                source.emit(offset + s, triples);
                for i in offset + s..offset + s + source.vertex_count() {
                    for j in offset..offset + s {
                        triples.push((i, j, *weight));
                    }
                }
            }
        }
    }
}

impl fmt::Display for QuiverForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuiverForm::Empty => f.write_str("∅"),
            QuiverForm::Complete { size, weight } => write!(f, "(K_{size}, {weight})"),
            QuiverForm::Union { copies, part } => write!(f, "⊔_{copies}{part}"),
            QuiverForm::Join { sink, source, weight } => {
                let wrap = |x: &QuiverForm| match x {
                    QuiverForm::Join { .. } | QuiverForm::Union { .. } => format!("[{x}]"),
                    _ => x.to_string(),
                };
                write!(f, "{} <-∇_{weight} {}", wrap(sink), wrap(source))
            }
        }
    }
}

/// Expands a form into a concrete quiver, blocks laid out in order.
pub fn realize(form: &QuiverForm) -> WeightedQuiver {
    let mut triples = Vec::new();
    form.emit(0, &mut triples);
    WeightedQuiver::from_triples(form.vertex_count(), triples)
}

/// Closed-form quiver for a torus link whose coloring count is `count`.
///
/// Four counts have a known shape: `n`, `pn` (with `p ∣ n`), `2^{p−1} n`
/// (with `n` even) and `n^p` (with `n` prime).
pub fn quiver_form_for_count(p: usize, n: usize, count: u128) -> Result<QuiverForm, QuiverError> {
    let unsupported = || QuiverError::Unsupported { p, n, count };
    if n == 0 || p < 2 {
        return Err(unsupported());
    }
    let nn = n as u128;
    let trivial = complete_form(n, n as u64);
    if count == nn {
        return Ok(trivial);
    }
    if count == p as u128 * nn && n.is_multiple_of(p) {
        let d = (n / p) as u64;
        return Ok(join_form(trivial, complete_form((p - 1) * n, d), d));
    }
    if n.is_multiple_of(2) && p < 64 && count == (1u128 << (p - 1)) * nn {
        let d = (n / 2) as u64;
        let copies = (1usize << (p - 1)) - 1;
        return Ok(join_form(trivial, union_form(copies, complete_form(n, d)), d));
    }
    if is_prime(n) && nn.checked_pow(p as u32) == Some(count) {
        let m = (count - nn) / (nn * (nn - 1));
        return Ok(join_form(
            trivial,
            union_form(m as usize, complete_form(n * (n - 1), 1)),
            1,
        ));
    }
    Err(unsupported())
}

/// The predicted quiver of `T(p, q)` over `R_n`, `p` an odd prime.
///
/// Fails when the count itself is ambiguous and when `N = n^p` with `n`
/// composite, where no closed form is known.
pub fn predict_quiver(p: usize, q: usize, n: usize) -> Result<QuiverForm, QuiverError> {
    let prediction = predict_count(p, q, n)?;
    let count = prediction.count.ok_or_else(|| {
        let values: Vec<String> = prediction.possible_counts().iter().map(u128::to_string).collect();
        QuiverError::Ambiguous(format!("T({p},{q}) over R_{n} has count {}", values.join(" or ")))
    })?;
    quiver_form_for_count(p, n, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::TorusLinkSpec;
    use crate::coloring::enumerate_torus_colorings_linear;
    use crate::linalg::DEFAULT_ENUMERATION_CAP;
    use crate::quandle::affine_endomorphisms;

    fn torus_quiver(p: usize, q: usize, n: usize) -> (ColoringSet, WeightedQuiver) {
        let set =
            enumerate_torus_colorings_linear(TorusLinkSpec::new(p, q).unwrap(), n, DEFAULT_ENUMERATION_CAP).unwrap();
        let quiver = build_quiver(&set, &affine_endomorphisms(n)).unwrap();
        (set, quiver)
    }

    #[test]
    fn complete_form_realizations() {
        assert_eq!(realize(&complete_form(1, 4)).to_dense(), vec![vec![4]]);
        assert_eq!(realize(&complete_form(5, 5)).to_dense(), vec![vec![5; 5]; 5]);
        let k20 = realize(&complete_form(20, 1));
        assert_eq!(k20.edge_count(), 400);
        assert!(k20.triples().iter().all(|&(_, _, w)| w == 1));
    }

    #[test]
    fn join_realization() {
        let form = join_form(complete_form(2, 2), complete_form(1, 1), 3);
        assert_eq!(
            realize(&form).to_dense(),
            vec![vec![2, 2, 0], vec![2, 2, 0], vec![3, 3, 1]]
        );
        assert_eq!(
            join_form(complete_form(3, 1), QuiverForm::Empty, 2),
            complete_form(3, 1)
        );
    }

    #[test]
    fn half_period_form_for_r6() {
        let form = quiver_form_for_count(5, 6, 96).unwrap();
        assert_eq!(form.to_string(), "(K_6, 6) <-∇_3 [⊔_15(K_6, 3)]");
        assert_eq!(form.vertex_count(), 96);
        assert_eq!(form.block_count(), 16);
        let q = realize(&form);
        assert!((0..96).all(|v| q.row_sum(v) == 36));
    }

    #[test]
    fn predicted_forms() {
        assert_eq!(predict_quiver(5, 7, 4).unwrap(), complete_form(4, 4));
        let form = predict_quiver(5, 10, 3).unwrap();
        assert_eq!(
            form,
            join_form(complete_form(3, 3), union_form(40, complete_form(6, 1)), 1)
        );
        assert!(matches!(predict_quiver(5, 2, 5), Err(QuiverError::Ambiguous(_))));
        assert!(matches!(
            predict_quiver(5, 10, 4),
            Err(QuiverError::Unsupported { count: 1024, .. })
        ));
    }

    #[test]
    fn trivial_only_quiver_is_complete() {
        let (set, quiver) = torus_quiver(5, 1, 3);
        assert_eq!(set.count(), 3);
        assert_eq!(quiver.to_dense(), vec![vec![3; 3]; 3]);
        check_quiver_invariants(&quiver, &set, 9).unwrap();
    }

    #[test]
    fn nontrivial_to_trivial_weights() {
        let (set, quiver) = torus_quiver(5, 2, 5);
        assert_eq!(quiver.vertex_count(), 25);
        check_quiver_invariants(&quiver, &set, 25).unwrap();
        for f in set.nontrivial_ids() {
            for g in set.trivial_ids() {
                assert_eq!(quiver.weight(f, g), 1);
            }
        }
    }

    #[test]
    fn closure_violation_is_reported() {
        let set = enumerate_torus_colorings_linear(TorusLinkSpec::new(3, 1).unwrap(), 3, 100).unwrap();
        // swaps 0 and 1, fixes 2: an automorphism of R_3, so closure holds
        let ok = Endomorphism::Table(vec![1, 0, 2]);
        assert!(build_quiver(&set, &[ok]).is_ok());
        // squaring is not an endomorphism of R_5 and leaves the figure-eight colorings
        let word = crate::braid::BraidWord::parse("s1 -s2 s1 -s2", None).unwrap();
        let set = crate::coloring::enumerate_colorings_linear(&word, 5, 100).unwrap();
        assert_eq!(set.count(), 25);
        let bad = Endomorphism::Table(vec![0, 1, 4, 4, 1]);
        assert!(matches!(
            build_quiver(&set, &[bad]),
            Err(QuiverError::ClosureViolation { .. })
        ));
    }

    #[test]
    fn permutation_round_trip() {
        let q = realize(&join_form(complete_form(2, 2), complete_form(3, 1), 1));
        let perm = vec![4, 2, 0, 1, 3];
        let moved = q.permuted(&perm);
        assert!(q.maps_onto(&moved, &perm));
        assert!(!q.maps_onto(&moved, &[0, 1, 2, 3, 4]));
    }
}
