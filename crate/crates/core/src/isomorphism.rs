//! Exact isomorphism of weighted quivers by colour refinement and backtracking.
//!
//! Both quivers are refined together on their disjoint union, so a colour
//! means the same thing on either side. If some class holds unequal numbers
//! of vertices from the two sides, no bijection exists. Otherwise vertices of
//! the first quiver are matched one at a time, each to a vertex of the same
//! class whose edges to the already matched vertices agree exactly. Vertices
//! are taken in order of how many matched neighbours they have, so a block
//! is finished before the next one starts and candidates come from the
//! neighbourhood of a matched vertex.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::quiver::WeightedQuiver;

/// Default bound on search nodes before giving up.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    /// `perm[v]` is the image in the second quiver of vertex `v` of the first.
    Isomorphic(Vec<usize>),
    NotIsomorphic,
    /// The node budget ran out first.
    Undecided,
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic(_))
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            IsoVerdict::Isomorphic(_) => "true",
            IsoVerdict::NotIsomorphic => "false",
            IsoVerdict::Undecided => "undecided",
        }
    }
}

pub fn isomorphic(a: &WeightedQuiver, b: &WeightedQuiver) -> IsoVerdict {
    isomorphic_with_budget(a, b, DEFAULT_NODE_BUDGET)
}

pub fn isomorphic_with_budget(a: &WeightedQuiver, b: &WeightedQuiver, budget: u64) -> IsoVerdict {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() || a.total_weight() != b.total_weight() {
        return IsoVerdict::NotIsomorphic;
    }
    let joint = Joint::new(a, b);
    let colours: Vec<u32> = (0..2 * n)
        .map(|v| if v < n { a.weight(v, v) } else { b.weight(v - n, v - n) })
        .map(|w| w as u32)
        .collect();
    let colours = refine(&joint, canonical_relabel(&colours));
    let classes = classes(&colours, n);
    if classes.iter().any(|(xs, ys)| xs.len() != ys.len()) {
        return IsoVerdict::NotIsomorphic;
    }
    let matcher = Matcher {
        joint: &joint,
        colours: &colours,
        classes: &classes,
    };
    match matcher.run(budget) {
        Ok(Some(perm)) => {
            debug_assert!(a.maps_onto(b, &perm));
            IsoVerdict::Isomorphic(perm)
        }
        Ok(None) => IsoVerdict::NotIsomorphic,
        Err(Exhausted) => IsoVerdict::Undecided,
    }
}

/// The disjoint union `A ⊔ B`, with `B` shifted by `n`.
struct Joint {
    n: usize,
    out: Vec<Vec<(usize, u64)>>,
    inn: Vec<Vec<(usize, u64)>>,
}

impl Joint {
    fn new(a: &WeightedQuiver, b: &WeightedQuiver) -> Self {
        let n = a.vertex_count();
        let mut out = Vec::with_capacity(2 * n);
        let mut inn = vec![Vec::new(); 2 * n];
        for (q, shift) in [(a, 0), (b, n)] {
            for v in 0..n {
                let row: Vec<(usize, u64)> = q.row(v).iter().map(|&(t, w)| (t + shift, w)).collect();
                for &(t, w) in &row {
                    inn[t].push((v + shift, w));
                }
                out.push(row);
            }
        }
        Joint { n, out, inn }
    }

    fn degree(&self, v: usize) -> usize {
        self.out[v].len() + self.inn[v].len()
    }
}

fn lookup(edges: &[(usize, u64)], v: usize) -> u64 {
    edges.binary_search_by_key(&v, |&(t, _)| t).map_or(0, |i| edges[i].1)
}

struct Exhausted;

const UNMAPPED: usize = usize::MAX;

struct Matcher<'a> {
    joint: &'a Joint,
    colours: &'a [u32],
    classes: &'a [(Vec<usize>, Vec<usize>)],
}

impl Matcher<'_> {
    /// First-side vertices, each next one the unvisited vertex with the most
    /// visited neighbours (ties: smaller class, then lower index).
    fn order(&self) -> Vec<usize> {
        let n = self.joint.n;
        let class_size = |v: usize| self.classes[self.colours[v] as usize].0.len();
        let mut links = vec![0usize; n];
        let mut done = vec![false; n];
        let mut heap: BinaryHeap<(usize, Reverse<usize>, Reverse<usize>)> =
            (0..n).map(|v| (0, Reverse(class_size(v)), Reverse(v))).collect();
        let mut order = Vec::with_capacity(n);
        while let Some((l, _, Reverse(v))) = heap.pop() {
            if done[v] || l != links[v] {
                continue;
            }
            done[v] = true;
            order.push(v);
            for &(u, _) in self.joint.out[v].iter().chain(&self.joint.inn[v]) {
                if !done[u] {
                    links[u] += 1;
                    heap.push((links[u], Reverse(class_size(u)), Reverse(u)));
                }
            }
        }
        order
    }

    /// Possible images of `x`: neighbours of the image of its sparsest
    /// matched neighbour, or its whole class when nothing nearby is matched.
    fn candidates(&self, x: usize, map: &[usize], rev: &[usize]) -> Vec<usize> {
        let j = self.joint;
        // (degree of the image, the image's edge list to draw from, required weight)
        let mut best = None;
        for (edges, flip) in [(&j.out[x], false), (&j.inn[x], true)] {
            for &(u, w) in edges.iter() {
                if u == x || map[u] == UNMAPPED {
                    continue;
                }
                let image = map[u];
                // x -> u means the candidate must point at image, so look at image's in-edges
                let pool = if flip { &j.out[image] } else { &j.inn[image] };
                if best.is_none_or(|(d, _, _)| j.degree(image) < d) {
                    best = Some((j.degree(image), pool, w));
                }
            }
        }
        let colour = self.colours[x];
        let free = |y: &usize| rev[*y - j.n] == UNMAPPED && self.colours[*y] == colour;
        match best {
            Some((_, pool, w)) => pool
                .iter()
                .filter(|&&(y, wy)| wy == w && free(&y))
                .map(|&(y, _)| y)
                .collect(),
            None => self.classes[colour as usize].1.iter().copied().filter(free).collect(),
        }
    }

    /// Whether mapping `x` to `y` keeps every edge among matched vertices.
    fn feasible(&self, x: usize, y: usize, map: &[usize], rev: &[usize]) -> bool {
        let j = self.joint;
        let n = j.n;
        for (ex, ey) in [(&j.out[x], &j.out[y]), (&j.inn[x], &j.inn[y])] {
            let mut matched = 0;
            for &(u, w) in ex.iter() {
                if u == x {
                    if lookup(ey, y) != w {
                        return false;
                    }
                    continue;
                }
                if map[u] != UNMAPPED {
                    if lookup(ey, map[u]) != w {
                        return false;
                    }
                    matched += 1;
                }
            }
            let matched_y = ey.iter().filter(|&&(v, _)| v != y && rev[v - n] != UNMAPPED).count();
            if matched != matched_y {
                return false;
            }
        }
        true
    }

    fn run(&self, budget: u64) -> Result<Option<Vec<usize>>, Exhausted> {
        let n = self.joint.n;
        if n == 0 {
            return Ok(Some(Vec::new()));
        }
        let order = self.order();
        let mut map = vec![UNMAPPED; n];
        let mut rev = vec![UNMAPPED; n];
        // candidates and the next one to try, per matched position
        let mut levels: Vec<(Vec<usize>, usize)> = vec![(self.candidates(order[0], &map, &rev), 0)];
        let mut nodes = 0u64;
        while !levels.is_empty() {
            let k = levels.len() - 1;
            let (cands, next) = &mut levels[k];
            let x = order[k];
            if map[x] != UNMAPPED {
                rev[map[x] - n] = UNMAPPED;
                map[x] = UNMAPPED;
            }
            let mut placed = false;
            while *next < cands.len() {
                let y = cands[*next];
                *next += 1;
                nodes += 1;
                if nodes > budget {
                    return Err(Exhausted);
                }
                if self.feasible(x, y, &map, &rev) {
                    map[x] = y;
                    rev[y - n] = x;
                    placed = true;
                    break;
                }
            }
            if !placed {
                levels.pop();
            } else if k + 1 == n {
                return Ok(Some(map.iter().map(|&y| y - n).collect()));
            } else {
                let c = self.candidates(order[k + 1], &map, &rev);
                levels.push((c, 0));
            }
        }
        Ok(None)
    }
}

/// Vertices of each colour class, split by side and sorted, in colour order.
fn classes(colours: &[u32], n: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let k = colours.iter().max().map_or(0, |&c| c as usize + 1);
    let mut out = vec![(Vec::new(), Vec::new()); k];
    for (v, &c) in colours.iter().enumerate() {
        if v < n {
            out[c as usize].0.push(v);
        } else {
            out[c as usize].1.push(v);
        }
    }
    out
}

/// Renames colours to `0..k` in sorted order of the old values.
fn canonical_relabel(colours: &[u32]) -> Vec<u32> {
    let mut values: Vec<u32> = colours.to_vec();
    values.sort_unstable();
    values.dedup();
    colours
        .iter()
        .map(|c| values.binary_search(c).expect("present") as u32)
        .collect()
}

type Signature = (u32, Vec<(u64, u32)>, Vec<(u64, u32)>);

/// Splits classes by `(colour, out-weights by colour, in-weights by colour)` until stable.
fn refine(joint: &Joint, mut colours: Vec<u32>) -> Vec<u32> {
    let mut count = colours.iter().max().map_or(0, |&c| c + 1);
    loop {
        let signatures: Vec<Signature> = (0..colours.len())
            .map(|v| {
                let side = |edges: &[(usize, u64)]| {
                    let mut s: Vec<(u64, u32)> = edges.iter().map(|&(u, w)| (w, colours[u])).collect();
                    s.sort_unstable();
                    s
                };
                (colours[v], side(&joint.out[v]), side(&joint.inn[v]))
            })
            .collect();
        let mut distinct: Vec<&Signature> = signatures.iter().collect();
        distinct.sort_unstable();
        distinct.dedup();
        let ids: HashMap<&Signature, u32> = distinct.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        let next: Vec<u32> = signatures.iter().map(|s| ids[s]).collect();
        let next_count = distinct.len() as u32;
        colours = next;
        if next_count == count {
            return colours;
        }
        count = next_count;
    }
}
