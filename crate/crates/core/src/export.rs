//! DOT, JSON and CSV output for quivers, colorings and sweep reports.
//!
//! Every ordering written here is sorted, so identical inputs give
//! byte-identical files regardless of thread count.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::coloring::ColoringSet;
use crate::counting::{CountCase, SweepReport};
use crate::error::ExportError;
use crate::quiver::WeightedQuiver;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Dot,
    Json,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(ExportFormat::Dot),
            "json" => Ok(ExportFormat::Json),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(ExportError::UnknownFormat(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExportOptions {
    pub format: ExportFormat,
    pub collapse_blocks: bool,
    pub include_loops: bool,
    /// `None` means standard output.
    pub output: Option<PathBuf>,
}

impl Default for ExportOptions {
    fn default() -> Self {
        ExportOptions {
            format: ExportFormat::Json,
            collapse_blocks: false,
            include_loops: true,
            output: None,
        }
    }
}

impl ExportOptions {
    pub fn validate(&self) -> Result<(), ExportError> {
        if self.collapse_blocks && self.format != ExportFormat::Dot {
            return Err(ExportError::CollapseRequiresDot);
        }
        Ok(())
    }
}

/// A maximal set of vertices joined by edges in both directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: usize,
    pub size: usize,
    /// Common weight of every ordered pair inside the block, loops included; `None` if they differ.
    pub weight: Option<u64>,
    pub vertices: Vec<usize>,
}

/// All edges from one block to another.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossEdge {
    pub from: usize,
    pub to: usize,
    /// Common weight of every vertex pair across the two blocks; `None` if they differ or some pair is missing.
    pub weight: Option<u64>,
    pub edges: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub blocks: Vec<Block>,
    pub cross: Vec<CrossEdge>,
}

impl BlockSummary {
    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Groups vertices into blocks of mutual reachability by single edges and
/// summarizes the edges between blocks. Blocks are numbered by their
/// smallest vertex.
pub fn detect_blocks(q: &WeightedQuiver) -> BlockSummary {
    let n = q.vertex_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for (i, j, _) in q.triples() {
        if i != j && q.weight(j, i) > 0 {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri != rj {
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut block_of = vec![usize::MAX; n];
    let mut blocks: Vec<Block> = Vec::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        if block_of[root] == usize::MAX {
            block_of[root] = blocks.len();
            blocks.push(Block {
                id: blocks.len(),
                size: 0,
                weight: None,
                vertices: Vec::new(),
            });
        }
        let b = block_of[root];
        block_of[v] = b;
        blocks[b].vertices.push(v);
        blocks[b].size += 1;
    }

    for block in &mut blocks {
        let first = block.vertices[0];
        let w = q.weight(first, first);
        let uniform = w > 0
            && block
                .vertices
                .iter()
                .all(|&i| block.vertices.iter().all(|&j| q.weight(i, j) == w));
        block.weight = uniform.then_some(w);
    }

    let mut pairs: std::collections::BTreeMap<(usize, usize), (Vec<u64>, usize)> = Default::default();
    for (i, j, w) in q.triples() {
        let (bi, bj) = (block_of[i], block_of[j]);
        if bi != bj {
            let entry = pairs.entry((bi, bj)).or_default();
            entry.0.push(w);
            entry.1 += 1;
        }
    }
    let cross = pairs
        .into_iter()
        .map(|((from, to), (weights, edges))| {
            let full = edges == blocks[from].size * blocks[to].size;
            let weight = (full && weights.iter().all(|&w| w == weights[0])).then(|| weights[0]);
            CrossEdge {
                from,
                to,
                weight,
                edges,
            }
        })
        .collect();
    BlockSummary { blocks, cross }
}

fn dot_label(q: &WeightedQuiver, v: usize) -> String {
    match q.label(v) {
        Some(top) => top.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        None => v.to_string(),
    }
}

fn weight_text(w: Option<u64>) -> String {
    w.map_or_else(|| "mixed".to_string(), |w| w.to_string())
}

/// Graphviz text for a quiver.
///
/// The full view has one node per coloring and one edge per ordered pair
/// with nonzero weight. The collapsed view has one node per block and one
/// edge per pair of connected blocks.
pub fn to_dot(q: &WeightedQuiver, opts: &ExportOptions) -> String {
    let mut out = String::from("digraph quiver {\n");
    if opts.collapse_blocks {
        let summary = detect_blocks(q);
        for b in &summary.blocks {
            writeln!(
                out,
                "  b{} [label=\"K{} w={}\", size={}];",
                b.id,
                b.size,
                weight_text(b.weight),
                b.size
            )
            .unwrap();
        }
        for c in &summary.cross {
            writeln!(
                out,
                "  b{} -> b{} [label=\"d={}\"];",
                c.from,
                c.to,
                weight_text(c.weight)
            )
            .unwrap();
        }
    } else {
        for v in 0..q.vertex_count() {
            writeln!(out, "  v{v} [label=\"{}\"];", dot_label(q, v)).unwrap();
        }
        for (i, j, w) in q.triples() {
            if i != j || opts.include_loops {
                writeln!(out, "  v{i} -> v{j} [label={w}];").unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub p: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    pub n: usize,
}

/// JSON shape of a coloring set and its quiver.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuiverDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Params>,
    pub count: u128,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CountCase>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colorings: Option<Vec<Vec<usize>>>,
    pub weights: Vec<(usize, usize, u64)>,
    #[serde(default, skip_serializing_if = "BlockSummary::is_empty")]
    pub blocks: BlockSummary,
}

impl QuiverDocument {
    pub fn from_quiver(q: &WeightedQuiver) -> Self {
        QuiverDocument {
            params: None,
            count: q.vertex_count() as u128,
            case: None,
            colorings: q.labels().map(<[Vec<usize>]>::to_vec),
            weights: q.triples(),
            blocks: detect_blocks(q),
        }
    }

    /// A document with colorings only, for sets too large to build a quiver on.
    pub fn from_colorings(set: &ColoringSet) -> Self {
        QuiverDocument {
            params: None,
            count: set.count(),
            case: None,
            colorings: set.is_enumerated().then(|| set.tops()),
            weights: Vec::new(),
            blocks: BlockSummary::default(),
        }
    }

    pub fn with_params(mut self, params: Params, case: Option<CountCase>) -> Self {
        self.params = Some(params);
        self.case = case;
        self
    }

    pub fn to_quiver(&self) -> Result<WeightedQuiver, ExportError> {
        let n = usize::try_from(self.count)
            .map_err(|_| ExportError::Malformed(format!("count {} too large", self.count)))?;
        if let Some(&(i, j, _)) = self.weights.iter().find(|&&(i, j, _)| i >= n || j >= n) {
            return Err(ExportError::Malformed(format!("edge {i} -> {j} outside 0..{n}")));
        }
        let q = WeightedQuiver::from_triples(n, self.weights.iter().copied());
        match &self.colorings {
            Some(c) if c.len() == n => Ok(q.with_labels(c.clone())),
            Some(c) => Err(ExportError::Malformed(format!(
                "{} colorings for {n} vertices",
                c.len()
            ))),
            None => Ok(q),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("result types serialize");
    s.push('\n');
    s
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ExportError> {
    serde_json::from_str(text).map_err(|e| ExportError::Malformed(e.to_string()))
}

pub const CSV_HEADER: &str = "p,q,n,predicted,case,computed,status,winner";

/// One row per sweep cell. Ambiguous predictions list their candidates joined by `|`.
pub fn to_csv(report: &SweepReport) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER.split(',')).expect("in-memory write");
    for c in &report.cells {
        let predicted = match c.predicted {
            Some(v) => v.to_string(),
            None => c
                .candidates
                .iter()
                .map(|k| k.count.to_string())
                .collect::<Vec<_>>()
                .join("|"),
        };
        w.write_record([
            c.p.to_string(),
            c.q.to_string(),
            c.n.to_string(),
            predicted,
            c.case.to_string(),
            c.computed.to_string(),
            c.status.as_str().to_string(),
            c.winner.map_or("", |w| w.as_str()).to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii fields")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::{judge_cell, predict_count};
    use crate::quiver::{complete_form, join_form, realize, union_form};

    #[test]
    fn full_dot_of_k2() {
        let dot = to_dot(&realize(&complete_form(2, 2)), &ExportOptions::default());
        assert_eq!(dot.matches(" -> ").count(), 4);
        assert_eq!(dot.matches("label=2]").count(), 4);
        assert!(dot.contains("v0 -> v0"));
        let opts = ExportOptions {
            include_loops: false,
            ..ExportOptions::default()
        };
        assert_eq!(to_dot(&realize(&complete_form(2, 2)), &opts).matches(" -> ").count(), 2);
    }

    #[test]
    fn collapsed_dot_counts_blocks() {
        let opts = ExportOptions {
            format: ExportFormat::Dot,
            collapse_blocks: true,
            ..ExportOptions::default()
        };
        let fig4 = realize(&join_form(complete_form(6, 6), union_form(15, complete_form(6, 3)), 3));
        let dot = to_dot(&fig4, &opts);
        assert_eq!(dot.matches("[label=\"K6").count(), 16);
        assert_eq!(dot.matches("-> b0 [label=\"d=3\"]").count(), 15);
    }

    #[test]
    fn block_detection() {
        let q = realize(&join_form(complete_form(5, 5), complete_form(20, 1), 1));
        let summary = detect_blocks(&q);
        assert_eq!(summary.blocks.len(), 2);
        assert_eq!((summary.blocks[0].size, summary.blocks[0].weight), (5, Some(5)));
        assert_eq!((summary.blocks[1].size, summary.blocks[1].weight), (20, Some(1)));
        assert_eq!(summary.cross.len(), 1);
        assert_eq!(
            (summary.cross[0].from, summary.cross[0].to, summary.cross[0].weight),
            (1, 0, Some(1))
        );
    }

    #[test]
    fn empty_quiver_json() {
        let doc = QuiverDocument::from_quiver(&WeightedQuiver::empty(0));
        let compact = serde_json::to_string(&doc).unwrap();
        assert_eq!(compact, r#"{"count":0,"weights":[]}"#);
    }

    #[test]
    fn json_round_trip() {
        let q = realize(&join_form(complete_form(2, 2), complete_form(3, 1), 1)).with_labels(vec![vec![0]; 5]);
        let doc =
            QuiverDocument::from_quiver(&q).with_params(Params { p: 3, q: Some(2), n: 2 }, Some(CountCase::Ambiguous));
        let text = to_json(&doc);
        let back: QuiverDocument = from_json(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_quiver().unwrap(), q);
    }

    #[test]
    fn csv_rows() {
        let cell = judge_cell(&predict_count(5, 2, 5).unwrap(), Some(25), Some(25));
        let csv = to_csv(&SweepReport { cells: vec![cell] });
        assert_eq!(
            csv,
            format!("{CSV_HEADER}\n5,2,5,5|25,ambiguous,25,ambiguous-resolved,prime-table\n")
        );
    }

    #[test]
    fn collapse_needs_dot() {
        let opts = ExportOptions {
            format: ExportFormat::Json,
            collapse_blocks: true,
            ..ExportOptions::default()
        };
        assert_eq!(opts.validate(), Err(ExportError::CollapseRequiresDot));
    }
}
