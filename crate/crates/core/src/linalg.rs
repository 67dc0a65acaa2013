//! Exact integer linear algebra: Smith normal form and solution counting /
//! enumeration for homogeneous systems over `Z_n`.
//!
//! Everything here is exact. Matrix entries are arbitrary-precision integers;
//! counts are `u128` with checked arithmetic, so an overflow surfaces as an
//! error instead of a wrong number.

use std::fmt;
use std::ops::{Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::LinalgError;

/// Default upper bound on the number of vectors `kernel_enumerate_mod` will materialize.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        IntMatrix { rows, cols, entries }
    }

    /// Builds a matrix from small-integer rows. All rows must have the same length.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::RaggedRows);
        }
        Ok(Self::from_fn(rows.len(), cols, |r, c| BigInt::from(rows[r][c])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigInt) {
        self.entries[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[BigInt] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    /// Entries reduced into `0..n`.
    pub fn reduce_mod(&self, n: u64) -> Vec<Vec<u64>> {
        let modulus = BigInt::from(n);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|e| e.mod_floor(&modulus).to_u64().expect("residue fits in u64"))
                    .collect()
            })
            .collect()
    }

    /// `self · v` reduced mod `n`, for a vector already reduced mod `n`.
    pub fn mul_vec_mod(&self, v: &[usize], n: usize) -> Vec<usize> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let modulus = BigInt::from(n);
        (0..self.rows)
            .map(|r| {
                let acc: BigInt = self.row(r).iter().zip(v).map(|(a, &x)| a * BigInt::from(x)).sum();
                acc.mod_floor(&modulus).to_usize().expect("residue fits in usize")
            })
            .collect()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Option<BigInt> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(BigInt::one());
        }
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return Some(BigInt::zero());
                };
                for c in 0..n {
                    a.swap(k * n + c, swap * n + c);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        Some(sign * &a[n * n - 1])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += factor * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for c in 0..self.cols {
            let delta = factor * &self.entries[src * self.cols + c];
            self.entries[dst * self.cols + c] += delta;
        }
    }

    /// col[dst] += factor * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for r in 0..self.rows {
            let delta = factor * &self.entries[r * self.cols + src];
            self.entries[r * self.cols + dst] += delta;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for c in 0..self.cols {
            let v = -std::mem::take(&mut self.entries[r * self.cols + c]);
            self.entries[r * self.cols + c] = v;
        }
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        IntMatrix::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).map(|k| self.get(r, k) * rhs.get(k, c)).sum()
        })
    }
}

impl Sub for &IntMatrix {
    type Output = IntMatrix;

    fn sub(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "dimension mismatch");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// `left · A · right = diag(diag)` with `left`, `right` unimodular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub diag: Vec<BigInt>,
    pub rank: usize,
    pub left: IntMatrix,
    pub right: IntMatrix,
    cols: usize,
}

impl SnfResult {
    /// The diagonal matrix `D` with the same shape as the input.
    pub fn diagonal_matrix(&self) -> IntMatrix {
        let mut d = IntMatrix::zeros(self.left.rows(), self.cols);
        for (i, v) in self.diag.iter().enumerate() {
            d.set(i, i, v.clone());
        }
        d
    }

    /// Number of `y ∈ Z_n^cols` with `A·y ≡ 0 (mod n)`.
    pub fn kernel_count_mod(&self, n: u64) -> Result<u128, LinalgError> {
        if n < 2 {
            return Err(LinalgError::InvalidModulus(n));
        }
        let modulus = BigInt::from(n);
        let mut count: u128 = 1;
        for d in &self.diag[..self.rank] {
            let g = d.gcd(&modulus).to_u128().expect("gcd bounded by modulus");
            count = count.checked_mul(g).ok_or(LinalgError::CountOverflow)?;
        }
        for _ in self.rank..self.cols {
            count = count.checked_mul(n as u128).ok_or(LinalgError::CountOverflow)?;
        }
        Ok(count)
    }

    /// All solutions of `A·y ≡ 0 (mod n)` in lexicographic order.
    ///
    /// Solutions are parametrized in the diagonal coordinates `z = right⁻¹·y`:
    /// `d_i z_i ≡ 0` leaves `gcd(d_i, n)` choices for each pivot coordinate
    /// and `n` for each free one. `right` is invertible mod `n`, so `y = right·z`
    /// is a bijection onto the solution set.
    pub fn kernel_enumerate_mod(&self, n: u64, cap: u128) -> Result<Vec<Vec<usize>>, LinalgError> {
        let count = self.kernel_count_mod(n)?;
        if count > cap {
            return Err(LinalgError::EnumerationTooLarge { count, cap });
        }
        let modulus = BigInt::from(n);
        let n_us = n as usize;
        // (step, choices) per z-coordinate
        let axes: Vec<(usize, usize)> = (0..self.cols)
            .map(|i| {
                if i < self.rank {
                    let g = self.diag[i].gcd(&modulus).to_usize().expect("gcd bounded by modulus");
                    (n_us / g, g)
                } else {
                    (1, n_us)
                }
            })
            .collect();
        let v = self.right.reduce_mod(n);
        let dim = self.cols;
        let mut out = Vec::with_capacity(count as usize);
        let mut odometer = vec![0usize; dim];
        loop {
            let y: Vec<usize> = (0..dim)
                .map(|r| {
                    let acc: u128 = (0..dim)
                        .map(|c| v[r][c] as u128 * (odometer[c] * axes[c].0) as u128)
                        .sum();
                    (acc % n as u128) as usize
                })
                .collect();
            out.push(y);
            // advance
            let mut k = dim;
            loop {
                if k == 0 {
                    out.sort_unstable();
                    return Ok(out);
                }
                k -= 1;
                odometer[k] += 1;
                if odometer[k] < axes[k].1 {
                    break;
                }
                odometer[k] = 0;
            }
        }
    }
}

/// Smith normal form over the integers, with the transforms.
///
/// Elimination picks the smallest nonzero entry as pivot, reduces its row and
/// column by Euclidean division, and folds in any row whose entries the pivot
/// does not divide, so the resulting diagonal is a divisibility chain.
pub fn smith_normal_form(a: &IntMatrix) -> SnfResult {
    let (m, k) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut left = IntMatrix::identity(m);
    let mut right = IntMatrix::identity(k);
    let steps = m.min(k);
    let mut t = 0;

    while t < steps {
        // global pivot for this step
        let Some((pr, pc)) = min_abs_nonzero(&d, (t..m).flat_map(|r| (t..k).map(move |c| (r, c)))) else {
            break;
        };
        d.swap_rows(t, pr);
        left.swap_rows(t, pr);
        d.swap_cols(t, pc);
        right.swap_cols(t, pc);

        loop {
            let cross = std::iter::once((t, t))
                .chain((t + 1..m).map(|r| (r, t)))
                .chain((t + 1..k).map(|c| (t, c)));
            let (pr, pc) = min_abs_nonzero(&d, cross).expect("pivot row/column is nonzero");
            d.swap_rows(t, pr);
            left.swap_rows(t, pr);
            d.swap_cols(t, pc);
            right.swap_cols(t, pc);

            let pivot = d.get(t, t).clone();
            for r in t + 1..m {
                if !d.get(r, t).is_zero() {
                    let q = -(d.get(r, t) / &pivot);
                    d.add_row_multiple(r, t, &q);
                    left.add_row_multiple(r, t, &q);
                }
            }
            for c in t + 1..k {
                if !d.get(t, c).is_zero() {
                    let q = -(d.get(t, c) / &pivot);
                    d.add_col_multiple(c, t, &q);
                    right.add_col_multiple(c, t, &q);
                }
            }

            let clean = (t + 1..m).all(|r| d.get(r, t).is_zero()) && (t + 1..k).all(|c| d.get(t, c).is_zero());
            if !clean {
                continue;
            }
            let pivot = d.get(t, t).clone();
            let offender = (t + 1..m).find(|&r| (t + 1..k).any(|c| !d.get(r, c).is_multiple_of(&pivot)));
            match offender {
                Some(r) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, r, &one);
                    left.add_row_multiple(t, r, &one);
                }
                None => break,
            }
        }

        if d.get(t, t).is_negative() {
            d.negate_row(t);
            left.negate_row(t);
        }
        t += 1;
    }

    let diag: Vec<BigInt> = (0..steps).map(|i| d.get(i, i).clone()).collect();
    let rank = diag.iter().take_while(|v| !v.is_zero()).count();
    SnfResult {
        diag,
        rank,
        left,
        right,
        cols: k,
    }
}

fn min_abs_nonzero(d: &IntMatrix, cells: impl Iterator<Item = (usize, usize)>) -> Option<(usize, usize)> {
    cells
        .filter(|&(r, c)| !d.get(r, c).is_zero())
        .min_by(|&(r1, c1), &(r2, c2)| d.get(r1, c1).abs().cmp(&d.get(r2, c2).abs()))
}

/// Number of `y ∈ Z_n^cols` with `A·y ≡ 0 (mod n)`: `∏ gcd(d_i, n) · n^(cols − rank)`.
pub fn kernel_count_mod(a: &IntMatrix, n: u64) -> Result<u128, LinalgError> {
    if n < 2 {
        return Err(LinalgError::InvalidModulus(n));
    }
    smith_normal_form(a).kernel_count_mod(n)
}

/// All solutions of `A·y ≡ 0 (mod n)`, lexicographically ordered.
pub fn kernel_enumerate_mod(a: &IntMatrix, n: u64, cap: u128) -> Result<Vec<Vec<usize>>, LinalgError> {
    if n < 2 {
        return Err(LinalgError::InvalidModulus(n));
    }
    smith_normal_form(a).kernel_enumerate_mod(n, cap)
}
