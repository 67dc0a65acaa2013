//! Finite quandles given by Cayley tables, the dihedral family `R_n`, axiom
//! checking, and endomorphism enumeration.

use std::fmt;

use crate::error::QuandleError;

/// Default node budget for [`brute_force_endomorphisms`].
pub const DEFAULT_ENDO_SEARCH_CAP: u64 = 1_000_000;

/// A raw binary operation on `0..order`, not yet known to be a quandle.
///
/// `table[x * order + y]` is `x * y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CayleyTable {
    order: usize,
    table: Vec<usize>,
}

impl CayleyTable {
    pub fn new(order: usize, table: Vec<usize>) -> Result<Self, QuandleError> {
        if table.len() != order * order {
            return Err(QuandleError::TableSize {
                got: table.len(),
                expected: order * order,
            });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= order) {
            return Err(QuandleError::OutOfRange { element: bad, order });
        }
        Ok(CayleyTable { order, table })
    }

    pub fn from_fn(order: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self, QuandleError> {
        let table = (0..order)
            .flat_map(|x| (0..order).map(move |y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self::new(order, table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table[x * self.order + y]
    }

    pub fn set(&mut self, x: usize, y: usize, value: usize) {
        assert!(value < self.order);
        self.table[x * self.order + y] = value;
    }
}

/// Per-axiom outcome of [`verify_quandle_axioms`], each with the first counterexample found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    /// `(x*y)*z != (x*z)*(y*z)` at `[x, y, z]`.
    pub distributivity: Option<[usize; 3]>,
    /// Right translation by `y` is not injective: `x1*y == x2*y`, reported as `[y, x1, x2]`.
    pub invertibility: Option<[usize; 3]>,
    /// `x*x != x`.
    pub idempotency: Option<usize>,
}

impl AxiomReport {
    pub fn is_quandle(&self) -> bool {
        self.distributivity.is_none() && self.invertibility.is_none() && self.idempotency.is_none()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.distributivity {
            None => writeln!(f, "right distributivity: pass")?,
            Some([x, y, z]) => writeln!(f, "right distributivity: FAIL at (x, y, z) = ({x}, {y}, {z})")?,
        }
        match self.invertibility {
            None => writeln!(f, "invertibility: pass")?,
            Some([y, a, b]) => writeln!(f, "invertibility: FAIL, {a}*{y} = {b}*{y}")?,
        }
        match self.idempotency {
            None => write!(f, "idempotency: pass"),
            Some(x) => write!(f, "idempotency: FAIL, {x}*{x} != {x}"),
        }
    }
}

pub fn verify_quandle_axioms(t: &CayleyTable) -> AxiomReport {
    let m = t.order();
    let mut distributivity = None;
    'outer: for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                if t.op(t.op(x, y), z) != t.op(t.op(x, z), t.op(y, z)) {
                    distributivity = Some([x, y, z]);
                    break 'outer;
                }
            }
        }
    }

    let mut invertibility = None;
    'cols: for y in 0..m {
        let mut seen = vec![usize::MAX; m];
        for x in 0..m {
            let img = t.op(x, y);
            if seen[img] != usize::MAX {
                invertibility = Some([y, seen[img], x]);
                break 'cols;
            }
            seen[img] = x;
        }
    }

    let idempotency = (0..m).find(|&x| t.op(x, x) != x);

    AxiomReport {
        distributivity,
        invertibility,
        idempotency,
    }
}

/// A finite quandle with its operation and the inverse operation `x *̄ y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuandle {
    table: CayleyTable,
    inverse: Vec<usize>,
}

impl FiniteQuandle {
    /// Checks all three axioms; the error carries the axiom report.
    pub fn new(table: CayleyTable) -> Result<Self, QuandleError> {
        let report = verify_quandle_axioms(&table);
        if !report.is_quandle() {
            return Err(QuandleError::NotAQuandle(report.to_string().replace('\n', "; ")));
        }
        let m = table.order();
        let mut inverse = vec![0; m * m];
        for y in 0..m {
            for x in 0..m {
                inverse[table.op(x, y) * m + y] = x;
            }
        }
        Ok(FiniteQuandle { table, inverse })
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn table(&self) -> &CayleyTable {
        &self.table
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.table.op(x, y)
    }

    /// `x *̄ y`, the unique `z` with `z * y = x`.
    #[inline]
    pub fn inv_op(&self, x: usize, y: usize) -> usize {
        self.inverse[x * self.order() + y]
    }

    pub fn is_kei(&self) -> bool {
        let m = self.order();
        (0..m).all(|x| (0..m).all(|y| self.op(self.op(x, y), y) == x))
    }

    pub fn check_element(&self, x: usize) -> Result<usize, QuandleError> {
        if x < self.order() {
            Ok(x)
        } else {
            Err(QuandleError::OutOfRange {
                element: x,
                order: self.order(),
            })
        }
    }

    /// First pair `(x, y)` where `f(x*y) != f(x)*f(y)`, if any.
    pub fn homomorphism_violation(&self, f: &[usize]) -> Option<(usize, usize)> {
        let m = self.order();
        (0..m)
            .flat_map(|x| (0..m).map(move |y| (x, y)))
            .find(|&(x, y)| f[self.op(x, y)] != self.op(f[x], f[y]))
    }
}

/// `R_n`: `Z_n` with `x * y = 2y − x mod n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DihedralQuandle {
    n: usize,
}

impl DihedralQuandle {
    pub fn new(n: usize) -> Result<Self, QuandleError> {
        if n == 0 {
            return Err(QuandleError::ZeroModulus);
        }
        Ok(DihedralQuandle { n })
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        (2 * y + self.n - x % self.n) % self.n
    }

    pub fn cayley_table(&self) -> CayleyTable {
        CayleyTable::from_fn(self.n, |x, y| self.op(x, y)).expect("dihedral table is in range")
    }

    pub fn to_quandle(&self) -> FiniteQuandle {
        FiniteQuandle::new(self.cayley_table()).expect("dihedral quandles satisfy the axioms")
    }
}

/// `x * y = 2y − x mod n`, with range checking.
pub fn dihedral_op(n: usize, x: usize, y: usize) -> Result<usize, QuandleError> {
    let q = DihedralQuandle::new(n)?;
    for e in [x, y] {
        if e >= n {
            return Err(QuandleError::OutOfRange { element: e, order: n });
        }
    }
    Ok(q.op(x, y))
}

/// A quandle endomorphism, verified when constructed.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endomorphism {
    /// `x ↦ a·x + b (mod n)` on `R_n`.
    Affine { n: usize, a: usize, b: usize },
    /// Explicit image table.
    Table(Vec<usize>),
}

impl Endomorphism {
    /// The affine map `x ↦ ax + b` on `R_n`, checked against the homomorphism equation.
    pub fn affine(n: usize, a: usize, b: usize) -> Result<Self, QuandleError> {
        let q = DihedralQuandle::new(n)?;
        let e = Endomorphism::Affine { n, a: a % n, b: b % n };
        let img = e.image_table();
        for x in 0..n {
            for y in 0..n {
                if img[q.op(x, y)] != q.op(img[x], img[y]) {
                    return Err(QuandleError::NotAHomomorphism { x, y });
                }
            }
        }
        Ok(e)
    }

    /// An explicit map, checked against the homomorphism equation of `q`.
    pub fn from_table(q: &FiniteQuandle, images: Vec<usize>) -> Result<Self, QuandleError> {
        if images.len() != q.order() {
            return Err(QuandleError::TableSize {
                got: images.len(),
                expected: q.order(),
            });
        }
        for &v in &images {
            q.check_element(v)?;
        }
        if let Some((x, y)) = q.homomorphism_violation(&images) {
            return Err(QuandleError::NotAHomomorphism { x, y });
        }
        Ok(Endomorphism::Table(images))
    }

    pub fn order(&self) -> usize {
        match self {
            Endomorphism::Affine { n, .. } => *n,
            Endomorphism::Table(t) => t.len(),
        }
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        match *self {
            Endomorphism::Affine { n, a, b } => (a * x + b) % n,
            Endomorphism::Table(ref t) => t[x],
        }
    }

    pub fn image_table(&self) -> Vec<usize> {
        (0..self.order()).map(|x| self.apply(x)).collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism) -> Endomorphism {
        match (self, other) {
            (&Endomorphism::Affine { n, a: a1, b: b1 }, &Endomorphism::Affine { n: n2, a: a2, b: b2 }) if n == n2 => {
                Endomorphism::Affine {
                    n,
                    a: (a1 * a2) % n,
                    b: (a1 * b2 + b1) % n,
                }
            }
            _ => Endomorphism::Table(other.image_table().into_iter().map(|x| self.apply(x)).collect()),
        }
    }
}

impl fmt::Display for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endomorphism::Affine { a, b, .. } => write!(f, "x -> {a}x + {b}"),
            Endomorphism::Table(t) => write!(f, "{t:?}"),
        }
    }
}

/// The `n²` affine maps `x ↦ ax + b` of `R_n`, in `(a, b)` lexicographic order.
pub fn affine_endomorphisms(n: usize) -> Vec<Endomorphism> {
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| Endomorphism::affine(n, a, b).unwrap_or_else(|e| panic!("affine map ({a}, {b}) on R_{n}: {e}")))
        .collect()
}

/// Every homomorphism `Q → Q`, by depth-first assignment of images with
/// pruning on fully assigned products. Results come out in lexicographic
/// order of their image tables. `cap` bounds the number of search nodes.
pub fn brute_force_endomorphisms(q: &FiniteQuandle, cap: u64) -> Result<Vec<Endomorphism>, QuandleError> {
    let mut found = Vec::new();
    let mut images = vec![0usize; q.order()];
    let mut nodes = 0u64;
    search(q, 0, &mut images, &mut nodes, cap, &mut found)?;
    debug_assert!(found.windows(2).all(|w| w[0] < w[1]));
    Ok(found.into_iter().map(Endomorphism::Table).collect())
}

fn search(
    q: &FiniteQuandle,
    k: usize,
    images: &mut Vec<usize>,
    nodes: &mut u64,
    cap: u64,
    found: &mut Vec<Vec<usize>>,
) -> Result<(), QuandleError> {
    let m = q.order();
    if k == m {
        found.push(images.clone());
        return Ok(());
    }
    for v in 0..m {
        *nodes += 1;
        if *nodes > cap {
            return Err(QuandleError::SearchBudgetExceeded { cap });
        }
        images[k] = v;
        // every product among 0..=k that involves k and lands in 0..=k
        let consistent = (0..=k).all(|x| {
            let pairs = [(x, k), (k, x)];
            pairs.iter().all(|&(a, b)| {
                let c = q.op(a, b);
                c > k || images[c] == q.op(images[a], images[b])
            })
        });
        if consistent {
            search(q, k + 1, images, nodes, cap, found)?;
        }
    }
    Ok(())
}

/// Comparison of the affine family against exhaustive search on `R_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndomorphismAudit {
    pub n: usize,
    pub affine: usize,
    pub brute_force: usize,
    /// Homomorphisms found by search that are not affine.
    pub surplus: Vec<Vec<usize>>,
    /// Affine maps the search missed (always empty unless something is broken).
    pub missing: Vec<Vec<usize>>,
}

impl EndomorphismAudit {
    pub fn affine_is_complete(&self) -> bool {
        self.surplus.is_empty() && self.missing.is_empty()
    }
}

pub fn audit_affine_endomorphisms(n: usize, cap: u64) -> Result<EndomorphismAudit, QuandleError> {
    let q = DihedralQuandle::new(n)?.to_quandle();
    let mut affine: Vec<Vec<usize>> = affine_endomorphisms(n).iter().map(Endomorphism::image_table).collect();
    affine.sort();
    affine.dedup();
    let brute: Vec<Vec<usize>> = brute_force_endomorphisms(&q, cap)?
        .iter()
        .map(Endomorphism::image_table)
        .collect();
    let surplus = brute
        .iter()
        .filter(|t| affine.binary_search(t).is_err())
        .cloned()
        .collect();
    let missing = affine
        .iter()
        .filter(|t| brute.binary_search(t).is_err())
        .cloned()
        .collect();
    Ok(EndomorphismAudit {
        n,
        affine: affine.len(),
        brute_force: brute.len(),
        surplus,
        missing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_op_examples() {
        assert_eq!(dihedral_op(5, 1, 3).unwrap(), 0);
        assert_eq!(dihedral_op(7, 4, 4).unwrap(), 4);
        assert_eq!(dihedral_op(6, 5, 1).unwrap(), 3);
        assert!(matches!(
            dihedral_op(6, 6, 1),
            Err(QuandleError::OutOfRange { element: 6, order: 6 })
        ));
    }

    #[test]
    fn dihedral_eight_passes_axioms() {
        assert!(verify_quandle_axioms(&DihedralQuandle::new(8).unwrap().cayley_table()).is_quandle());
    }

    #[test]
    fn trivial_quandle_passes() {
        let t = CayleyTable::new(1, vec![0]).unwrap();
        assert!(verify_quandle_axioms(&t).is_quandle());
        assert_eq!(
            brute_force_endomorphisms(&FiniteQuandle::new(t).unwrap(), 10)
                .unwrap()
                .len(),
            1
        );
    }

    #[test]
    fn patched_table_reports_witness() {
        let mut t = DihedralQuandle::new(3).unwrap().cayley_table();
        t.set(0, 1, 0);
        let report = verify_quandle_axioms(&t);
        assert!(!report.is_quandle());
        // column 1 now sends both 0 and 2 to 0
        assert_eq!(report.invertibility, Some([1, 0, 2]));
        let [x, y, z] = report.distributivity.expect("distributivity breaks too");
        assert_ne!(t.op(t.op(x, y), z), t.op(t.op(x, z), t.op(y, z)));
        assert!(FiniteQuandle::new(t).is_err());
    }

    #[test]
    fn idempotency_failure_is_reported() {
        let t = CayleyTable::from_fn(2, |x, _| 1 - x).unwrap();
        assert_eq!(verify_quandle_axioms(&t).idempotency, Some(0));
    }

    #[test]
    fn affine_counts_and_constants() {
        assert_eq!(affine_endomorphisms(2).len(), 4);
        assert_eq!(affine_endomorphisms(3).len(), 9);
        let c = Endomorphism::affine(5, 0, 2).unwrap();
        assert_eq!(c.image_table(), vec![2; 5]);
    }

    #[test]
    fn brute_force_small_orders() {
        let r2 = DihedralQuandle::new(2).unwrap().to_quandle();
        assert_eq!(
            brute_force_endomorphisms(&r2, DEFAULT_ENDO_SEARCH_CAP).unwrap().len(),
            4
        );

        let audit = audit_affine_endomorphisms(3, DEFAULT_ENDO_SEARCH_CAP).unwrap();
        assert_eq!(audit.brute_force, 9);
        assert!(audit.affine_is_complete());
    }

    #[test]
    fn search_budget_is_enforced() {
        let r5 = DihedralQuandle::new(5).unwrap().to_quandle();
        assert_eq!(
            brute_force_endomorphisms(&r5, 10),
            Err(QuandleError::SearchBudgetExceeded { cap: 10 })
        );
    }

    #[test]
    fn inverse_op_undoes_op() {
        // a non-kei quandle: Alexander quandle Z_5 with t = 2, x*y = 2x - y
        let t = CayleyTable::from_fn(5, |x, y| (2 * x + 5 - y) % 5).unwrap();
        let q = FiniteQuandle::new(t).unwrap();
        assert!(!q.is_kei());
        for x in 0..5 {
            for y in 0..5 {
                assert_eq!(q.inv_op(q.op(x, y), y), x);
                assert_eq!(q.op(q.inv_op(x, y), y), x);
            }
        }
    }

    #[test]
    fn rejects_non_homomorphism() {
        let r4 = DihedralQuandle::new(4).unwrap().to_quandle();
        assert!(matches!(
            Endomorphism::from_table(&r4, vec![0, 1, 1, 0]),
            Err(QuandleError::NotAHomomorphism { .. })
        ));
    }
}
