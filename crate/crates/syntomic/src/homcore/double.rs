//! Commutative double complexes and their total complexes.
//!
//! The convention throughout is the *commutative* one: horizontal and
//! vertical differentials commute, `d₁∘d₂ = d₂∘d₁`, and the total complex
//! carries `d̃ = d̃₁ + d̃₂` with `d̃₁ = d₁` and `d̃₂^{p,q} = (-1)^p d₂^{p,q}`.

use crate::homcore::complex::{Complex, HomError};
use crate::linalg::{QMat, Rat};
use num::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DoubleError {
    #[error("horizontal differential does not square to zero at ({0},{1})")]
    HorizontalSquare(i64, i64),
    #[error("vertical differential does not square to zero at ({0},{1})")]
    VerticalSquare(i64, i64),
    #[error("commutativity convention d₁d₂ = d₂d₁ violated at ({0},{1})")]
    NotCommutative(i64, i64),
    #[error("component shape mismatch at ({0},{1})")]
    Shape(i64, i64),
    #[error(transparent)]
    Complex(#[from] HomError),
}

/// A bounded bigraded double complex `K^{p,q}`.
#[derive(Clone, Debug)]
pub struct DoubleComplex {
    pub pmin: i64,
    pub pmax: i64,
    pub qmin: i64,
    pub qmax: i64,
    dims: BTreeMap<(i64, i64), usize>,
    d1: BTreeMap<(i64, i64), QMat>,
    d2: BTreeMap<(i64, i64), QMat>,
}

impl DoubleComplex {
    pub fn new(
        dims: BTreeMap<(i64, i64), usize>,
        d1: BTreeMap<(i64, i64), QMat>,
        d2: BTreeMap<(i64, i64), QMat>,
    ) -> Result<Self, DoubleError> {
        let pmin = dims.keys().map(|k| k.0).min().unwrap_or(0);
        let pmax = dims.keys().map(|k| k.0).max().unwrap_or(0);
        let qmin = dims.keys().map(|k| k.1).min().unwrap_or(0);
        let qmax = dims.keys().map(|k| k.1).max().unwrap_or(0);
        let dc = DoubleComplex { pmin, pmax, qmin, qmax, dims, d1, d2 };
        for p in dc.pmin..=dc.pmax {
            for q in dc.qmin..=dc.qmax {
                let h = dc.d1(p, q);
                if h.rows != dc.dim(p + 1, q) || h.cols != dc.dim(p, q) {
                    return Err(DoubleError::Shape(p, q));
                }
                let v = dc.d2(p, q);
                if v.rows != dc.dim(p, q + 1) || v.cols != dc.dim(p, q) {
                    return Err(DoubleError::Shape(p, q));
                }
                if !dc.d1(p + 1, q).mul(&dc.d1(p, q)).is_zero() {
                    return Err(DoubleError::HorizontalSquare(p, q));
                }
                if !dc.d2(p, q + 1).mul(&dc.d2(p, q)).is_zero() {
                    return Err(DoubleError::VerticalSquare(p, q));
                }
                let a = dc.d2(p + 1, q).mul(&dc.d1(p, q));
                let b = dc.d1(p, q + 1).mul(&dc.d2(p, q));
                if a != b {
                    return Err(DoubleError::NotCommutative(p, q));
                }
            }
        }
        Ok(dc)
    }

    pub fn dim(&self, p: i64, q: i64) -> usize {
        self.dims.get(&(p, q)).copied().unwrap_or(0)
    }

    pub fn d1(&self, p: i64, q: i64) -> QMat {
        self.d1
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| QMat::zeros(self.dim(p + 1, q), self.dim(p, q)))
    }

    pub fn d2(&self, p: i64, q: i64) -> QMat {
        self.d2
            .get(&(p, q))
            .cloned()
            .unwrap_or_else(|| QMat::zeros(self.dim(p, q + 1), self.dim(p, q)))
    }

    /// Columns as complexes (fixed `p`, vertical differential).
    pub fn column(&self, p: i64) -> Complex {
        let dims: Vec<usize> = (self.qmin..=self.qmax).map(|q| self.dim(p, q)).collect();
        let diffs: Vec<QMat> = (self.qmin..self.qmax).map(|q| self.d2(p, q)).collect();
        Complex::new(self.qmin, dims, diffs).expect("column of a valid double complex")
    }

    /// Blocks `(p, q)` with `p + q = n`, ordered by increasing `p`.
    pub fn blocks_of_total_degree(&self, n: i64) -> Vec<(i64, i64)> {
        (self.pmin..=self.pmax)
            .map(|p| (p, n - p))
            .filter(|&(p, q)| q >= self.qmin && q <= self.qmax && self.dim(p, q) > 0)
            .collect()
    }

    pub fn total_dim(&self, n: i64) -> usize {
        self.blocks_of_total_degree(n).iter().map(|&(p, q)| self.dim(p, q)).sum()
    }

    /// Offset of block `(p, n-p)` inside `Tot^n`.
    pub fn block_offset(&self, n: i64, p: i64) -> usize {
        self.blocks_of_total_degree(n)
            .iter()
            .take_while(|&&(bp, _)| bp < p)
            .map(|&(bp, bq)| self.dim(bp, bq))
            .sum()
    }

    /// Includes a block vector into `Tot^n` coordinates.
    pub fn embed_block(&self, n: i64, p: i64, v: &QMat) -> QMat {
        let off = self.block_offset(n, p);
        let total = self.total_dim(n);
        QMat::from_fn(total, v.cols, |r, c| {
            if r >= off && r < off + v.rows { v.at(r - off, c).clone() } else { Rat::zero() }
        })
    }

    /// Extracts the `(p, n-p)` block of a `Tot^n` vector.
    pub fn project_block(&self, n: i64, p: i64, v: &QMat) -> QMat {
        let off = self.block_offset(n, p);
        let d = self.dim(p, n - p);
        QMat::from_fn(d, v.cols, |r, c| v.at(off + r, c).clone())
    }

    /// The total differential `Tot^n → Tot^{n+1}`.
    pub fn total_d(&self, n: i64) -> QMat {
        let src = self.blocks_of_total_degree(n);
        let dst = self.blocks_of_total_degree(n + 1);
        let mut m = QMat::zeros(self.total_dim(n + 1), self.total_dim(n));
        for &(p, q) in &src {
            let col_off = self.block_offset(n, p);
            // horizontal part into (p+1, q)
            if dst.contains(&(p + 1, q)) {
                let row_off = self.block_offset(n + 1, p + 1);
                let h = self.d1(p, q);
                for r in 0..h.rows {
                    for c in 0..h.cols {
                        m.set(row_off + r, col_off + c, h.at(r, c).clone());
                    }
                }
            }
            // vertical part into (p, q+1) with sign (-1)^p
            if dst.contains(&(p, q + 1)) {
                let row_off = self.block_offset(n + 1, p);
                let v = self.d2(p, q);
                let sign = if p.rem_euclid(2) == 0 { 1 } else { -1 };
                for r in 0..v.rows {
                    for c in 0..v.cols {
                        let val = if sign == 1 { v.at(r, c).clone() } else { -v.at(r, c).clone() };
                        m.set(row_off + r, col_off + c, val);
                    }
                }
            }
        }
        m
    }

    pub fn total_range(&self) -> (i64, i64) {
        (self.pmin + self.qmin, self.pmax + self.qmax)
    }

    /// The associated total complex; squares to zero by the commutativity
    /// convention, asserted on construction.
    pub fn total_complex(&self) -> Result<Complex, DoubleError> {
        let (nmin, nmax) = self.total_range();
        let dims: Vec<usize> = (nmin..=nmax).map(|n| self.total_dim(n)).collect();
        let diffs: Vec<QMat> = (nmin..nmax).map(|n| self.total_d(n)).collect();
        Ok(Complex::new(nmin, dims, diffs)?)
    }

    /// Basis (as `Tot^n` columns) of the column filtration
    /// `F^p Tot^n = ⊕_{p' ≥ p} K^{p', n-p'}`.
    pub fn filtration_basis(&self, n: i64, p: i64) -> QMat {
        let total = self.total_dim(n);
        let mut cols: Vec<Vec<Rat>> = Vec::new();
        for &(bp, bq) in &self.blocks_of_total_degree(n) {
            if bp >= p {
                let off = self.block_offset(n, bp);
                for k in 0..self.dim(bp, bq) {
                    let mut v = vec![Rat::zero(); total];
                    v[off + k] = crate::linalg::rat_i(1);
                    cols.push(v);
                }
            }
        }
        QMat::from_columns(total, &cols)
    }

    /// Builds a two-column double complex from a degree-zero chain map
    /// `f: A → B`: column 0 is `A`, column 1 is `B`, `d₁ = f`.
    pub fn from_two_columns(
        a: &Complex,
        b: &Complex,
        f: &crate::homcore::complex::ChainMap,
    ) -> Result<Self, DoubleError> {
        let mut dims = BTreeMap::new();
        let mut d1 = BTreeMap::new();
        let mut d2 = BTreeMap::new();
        let qmin = a.min_deg().min(b.min_deg());
        let qmax = a.max_deg().max(b.max_deg());
        for q in qmin..=qmax {
            dims.insert((0, q), a.dim(q));
            dims.insert((1, q), b.dim(q));
            d1.insert((0, q), f.mat_sized(a, b, q));
            d2.insert((0, q), a.d(q));
            d2.insert((1, q), b.d(q));
        }
        Self::new(dims, d1, d2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homcore::complex::ChainMap;
    use crate::linalg::rat_i;

    #[test]
    fn total_of_two_columns_squares_to_zero() {
        // two-column D with d₂ = 0 everywhere: Tot differential is block d₁
        let a = Complex::new(0, vec![2, 2], vec![QMat::zeros(2, 2)]).unwrap();
        let b = Complex::new(0, vec![2, 2], vec![QMat::zeros(2, 2)]).unwrap();
        let f = ChainMap::new(&a, &b, 0, |_| QMat::identity(2)).unwrap();
        let dc = DoubleComplex::from_two_columns(&a, &b, &f).unwrap();
        let tot = dc.total_complex().unwrap();
        for n in 0..2 {
            assert!(tot.d(n + 1).mul(&tot.d(n)).is_zero());
        }
    }

    #[test]
    fn unit_square_total_differential() {
        // 1×1 square with all four maps the identity: the commutative
        // convention holds and the (-1)^p twist makes d̃² vanish.
        let mut dims = BTreeMap::new();
        for p in 0..2i64 {
            for q in 0..2i64 {
                dims.insert((p, q), 1usize);
            }
        }
        let mut d1 = BTreeMap::new();
        let mut d2 = BTreeMap::new();
        for q in 0..2i64 {
            d1.insert((0, q), QMat::identity(1));
        }
        for p in 0..2i64 {
            d2.insert((p, 0), QMat::identity(1));
        }
        let dc = DoubleComplex::new(dims, d1, d2).unwrap();
        let tot = dc.total_complex().unwrap();
        assert!(tot.d(1).mul(&tot.d(0)).is_zero());
        assert_eq!(tot.dim(1), 2);
    }

    #[test]
    fn commutativity_violation_is_named() {
        let mut dims = BTreeMap::new();
        for p in 0..2i64 {
            for q in 0..2i64 {
                dims.insert((p, q), 1usize);
            }
        }
        let mut d1 = BTreeMap::new();
        let mut d2 = BTreeMap::new();
        for q in 0..2i64 {
            d1.insert((0, q), QMat::identity(1));
        }
        d2.insert((0, 0), QMat::identity(1));
        d2.insert((1, 0), QMat::from_fn(1, 1, |_, _| rat_i(2)));
        let err = DoubleComplex::new(dims, d1, d2).unwrap_err();
        assert_eq!(err, DoubleError::NotCommutative(0, 0));
    }
}
