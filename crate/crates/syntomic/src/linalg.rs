//! Exact linear algebra over the rationals.
//!
//! Everything in this crate reduces to kernels, images and solves of
//! matrices with `BigRational` entries. There are no tolerances: two
//! matrices are equal when every entry is equal. Basis choices are
//! deterministic (pivot-ordered), so repeated runs produce identical
//! representatives.

use num::{BigInt, BigRational, One, Signed, Zero};
use std::fmt;

pub type Rat = BigRational;

pub fn rat_i(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses the canonical `"a/b"` (or `"a"`) form.
pub fn rat_parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let num: BigInt = a.parse().ok()?;
            let den: BigInt = b.parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().ok()?;
            Some(BigRational::from_integer(num))
        }
    }
}

/// Canonical `"a/b"` form: reduced, denominator positive, integers bare.
pub fn rat_string(x: &Rat) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// p-adic valuation of a rational, `None` for zero.
pub fn rat_valuation(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut v: i64 = 0;
    let mut n = x.numer().abs();
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    let mut d = x.denom().abs();
    while (&d % &p).is_zero() {
        d /= &p;
        v -= 1;
    }
    Some(v)
}

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| rat_string(self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        QMat { rows, cols, data }
    }

    pub fn from_rows_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        Self::from_fn(r, c, |i, j| rat_i(rows[i][j]))
    }

    pub fn at(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.at(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.at(i, j) + a * b;
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c) + other.at(r, c))
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c) - other.at(r, c))
    }

    pub fn neg(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| -self.at(r, c).clone())
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c) * s)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols { self.at(r, c).clone() } else { other.at(r, c - self.cols).clone() }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows { self.at(r, c).clone() } else { other.at(r - self.rows, c).clone() }
        })
    }

    pub fn block_diag(blocks: &[&QMat]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(ro + r, co + c, b.at(r, c).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    /// Kronecker product, compatible with `vec(x ⊗ y) = (A ⊗ B) vec` for
    /// the row-major vectorisation used throughout.
    pub fn kronecker(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |r, c| {
            let (r1, r2) = (r / other.rows, r % other.rows);
            let (c1, c2) = (c / other.cols, c % other.cols);
            self.at(r1, c1) * other.at(r2, c2)
        })
    }

    pub fn column(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn from_columns(rows: usize, cols: &[Vec<Rat>]) -> Self {
        Self::from_fn(rows, cols.len(), |r, c| cols[c][r].clone())
    }

    pub fn submatrix_cols(&self, keep: &[usize]) -> Self {
        Self::from_fn(self.rows, keep.len(), |r, c| self.at(r, keep[c]).clone())
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            // first nonzero entry in this column at or below `row`
            let pick = (row..m.rows).find(|&r| !m.at(r, col).is_zero());
            let Some(pr) = pick else { continue };
            if pr != row {
                for c in 0..m.cols {
                    let a = m.at(row, c).clone();
                    let b = m.at(pr, c).clone();
                    m.set(row, c, b);
                    m.set(pr, c, a);
                }
            }
            let inv = m.at(row, col).recip();
            for c in 0..m.cols {
                let v = m.at(row, c) * &inv;
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let factor = m.at(r, col).clone();
                    for c in 0..m.cols {
                        let v = m.at(r, c) - &factor * m.at(row, c);
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the kernel, one column per free variable, in column order.
    pub fn kernel(&self) -> QMat {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = QMat::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            out.set(fc, k, Rat::one());
            for (prow, &pcol) in pivots.iter().enumerate() {
                out.set(pcol, k, -r.at(prow, fc).clone());
            }
        }
        out
    }

    /// Pivot columns of `self`: a deterministic basis of the column space.
    pub fn column_space(&self) -> QMat {
        let (_, pivots) = self.rref();
        self.submatrix_cols(&pivots)
    }

    /// Solves `self * x = b` for each column of `b`; `None` if inconsistent.
    pub fn solve(&self, b: &QMat) -> Option<QMat> {
        assert_eq!(self.rows, b.rows);
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        // pivot in the b-part means inconsistent
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = QMat::zeros(self.cols, b.cols);
        for (prow, &pcol) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pcol, j, r.at(prow, self.cols + j).clone());
            }
        }
        Some(x)
    }
}

/// Canonical basis of the span of the given columns (pivot columns kept).
pub fn span_basis(gens: &QMat) -> QMat {
    gens.column_space()
}

/// Does `v` lie in the column span of `basis`?
pub fn in_span(basis: &QMat, v: &QMat) -> bool {
    basis.solve(v).is_some()
}

/// Is `span(a) ⊆ span(b)`?
pub fn span_contained(a: &QMat, b: &QMat) -> bool {
    b.solve(a).is_some()
}

/// Basis of `span(a) ∩ span(b)`.
pub fn span_intersect(a: &QMat, b: &QMat) -> QMat {
    if a.cols == 0 || b.cols == 0 {
        return QMat::zeros(a.rows, 0);
    }
    // x = a u = b w  <=>  [a | -b] (u, w)^t = 0
    let stacked = a.hstack(&b.neg());
    let ker = stacked.kernel();
    let mut cols = Vec::new();
    for j in 0..ker.cols {
        let u = QMat::from_fn(a.cols, 1, |r, _| ker.at(r, j).clone());
        cols.push(a.mul(&u).column(0));
    }
    span_basis(&QMat::from_columns(a.rows, &cols))
}

/// Basis of `span(a) + span(b)`.
pub fn span_sum(a: &QMat, b: &QMat) -> QMat {
    span_basis(&a.hstack(b))
}

/// Preimage `{x : m x ∈ span(s)}` as a column basis.
pub fn preimage(m: &QMat, s: &QMat) -> QMat {
    // m x - s y = 0
    let stacked = m.hstack(&s.neg());
    let ker = stacked.kernel();
    let mut cols = Vec::new();
    for j in 0..ker.cols {
        cols.push((0..m.cols).map(|r| ker.at(r, j).clone()).collect());
    }
    span_basis(&QMat::from_columns(m.cols, &cols))
}

/// Columns of `extra` that extend `span(base)`, chosen greedily in order.
/// Returns the selected column indices.
pub fn extend_basis(base: &QMat, extra: &QMat) -> Vec<usize> {
    let mut acc = base.clone();
    let mut picked = Vec::new();
    for j in 0..extra.cols {
        let v = QMat::from_fn(extra.rows, 1, |r, _| extra.at(r, j).clone());
        if !in_span(&acc, &v) {
            acc = acc.hstack(&v);
            picked.push(j);
        }
    }
    picked
}

/// Deterministic complement of `sub` inside the full ambient space:
/// standard basis vectors extending a basis of `sub`.
pub fn standard_complement(sub: &QMat, ambient_dim: usize) -> QMat {
    let id = QMat::identity(ambient_dim);
    let picked = extend_basis(&span_basis(sub), &id);
    id.submatrix_cols(&picked)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rref_and_kernel() {
        let m = QMat::from_rows_i64(&[&[1, 2, 3], &[2, 4, 6], &[1, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.cols, 1);
        assert!(m.mul(&k).is_zero());
    }

    #[test]
    fn solve_roundtrip() {
        let a = QMat::from_rows_i64(&[&[2, 1], &[1, 3]]);
        let b = QMat::from_rows_i64(&[&[5], &[10]]);
        let x = a.solve(&b).unwrap();
        assert_eq!(a.mul(&x), b);
        let singular = QMat::from_rows_i64(&[&[1, 1], &[1, 1]]);
        let bad = QMat::from_rows_i64(&[&[0], &[1]]);
        assert!(singular.solve(&bad).is_none());
    }

    #[test]
    fn intersect_and_sum() {
        let a = QMat::from_rows_i64(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b = QMat::from_rows_i64(&[&[0, 0], &[1, 0], &[0, 1]]);
        let cap = span_intersect(&a, &b);
        assert_eq!(cap.cols, 1);
        let sum = span_sum(&a, &b);
        assert_eq!(sum.cols, 3);
    }

    #[test]
    fn valuation() {
        assert_eq!(rat_valuation(&rat_frac(12, 5), 2), Some(2));
        assert_eq!(rat_valuation(&rat_frac(5, 8), 2), Some(-3));
        assert_eq!(rat_valuation(&rat_i(0), 2), None);
    }

    #[test]
    fn rat_round_trip() {
        let x = rat_frac(-6, 4);
        assert_eq!(rat_string(&x), "-3/2");
        assert_eq!(rat_parse("-3/2").unwrap(), x);
        assert_eq!(rat_parse("7").unwrap(), rat_i(7));
    }
}
