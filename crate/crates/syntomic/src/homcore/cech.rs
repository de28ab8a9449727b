//! Indexed families of differential graded algebras over a finite totally
//! ordered index set, the double complexes they generate, and the signed
//! front/back cup product.
//!
//! The horizontal differential is the alternating face sum
//! `(δs)_t = Σ_j (-1)^j ρ(s_{t(j)})`; the vertical differential is the DGA
//! one. In the associated total complex the vertical part is twisted by
//! `(-1)^p`, so the total differential of a component over a `(p+1)`-tuple
//! is `Σ_j (-1)^j s_{t(j)} + (-1)^p d_t(s_t)`.

use crate::homcore::double::{DoubleComplex, DoubleError};
use crate::linalg::QMat;
use num::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

pub type Tuple = Vec<usize>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CechError {
    #[error("missing algebra for tuple {0:?}")]
    MissingAlgebra(Tuple),
    #[error("missing restriction {0:?} → {1:?}")]
    MissingRestriction(Tuple, Tuple),
    #[error("restriction {0:?} → {1:?} is not a chain map")]
    RestrictionNotChainMap(Tuple, Tuple),
    #[error("restriction {0:?} → {1:?} is not multiplicative")]
    RestrictionNotMultiplicative(Tuple, Tuple),
    #[error("face identities fail between {0:?} and {1:?}")]
    FaceIdentity(Tuple, Tuple),
    #[error("product of {0:?} violates the graded Leibniz rule at degrees ({1},{2})")]
    LeibnizFailure(Tuple, i64, i64),
    #[error("product of {0:?} is not associative at degrees ({1},{2},{3})")]
    NotAssociative(Tuple, i64, i64, i64),
    #[error(transparent)]
    Double(#[from] DoubleError),
}

/// A graded algebra with differential; products are stored as matrices on
/// Kronecker-vectorized tensors.
#[derive(Clone, Debug)]
pub struct Dga {
    pub min_deg: i64,
    pub dims: Vec<usize>,
    pub diffs: Vec<QMat>,
    /// `(m, n) ↦` matrix `dim(m+n) × dim(m)·dim(n)`
    pub products: BTreeMap<(i64, i64), QMat>,
}

impl Dga {
    pub fn max_deg(&self) -> i64 {
        self.min_deg + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, m: i64) -> usize {
        if m < self.min_deg || m > self.max_deg() {
            0
        } else {
            self.dims[(m - self.min_deg) as usize]
        }
    }

    pub fn d(&self, m: i64) -> QMat {
        let i = m - self.min_deg;
        if i >= 0 && (i as usize) < self.diffs.len() {
            self.diffs[i as usize].clone()
        } else {
            QMat::zeros(self.dim(m + 1), self.dim(m))
        }
    }

    pub fn product(&self, m: i64, n: i64) -> QMat {
        self.products
            .get(&(m, n))
            .cloned()
            .unwrap_or_else(|| QMat::zeros(self.dim(m + n), self.dim(m) * self.dim(n)))
    }

    /// Graded Leibniz rule `d(xy) = dx·y + (-1)^m x·dy` as a matrix identity.
    pub fn leibniz_holds(&self, m: i64, n: i64) -> bool {
        let lhs = self.d(m + n).mul(&self.product(m, n));
        let t1 = self.product(m + 1, n).mul(&self.d(m).kronecker(&QMat::identity(self.dim(n))));
        let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
        let t2 = self
            .product(m, n + 1)
            .mul(&QMat::identity(self.dim(m)).kronecker(&self.d(n)))
            .scale(&crate::linalg::rat_i(sign));
        lhs == t1.add(&t2)
    }

    pub fn associative(&self, m: i64, n: i64, k: i64) -> bool {
        // (xy)z vs x(yz) on vectorized triples
        let left = self
            .product(m + n, k)
            .mul(&self.product(m, n).kronecker(&QMat::identity(self.dim(k))));
        let right = self
            .product(m, n + k)
            .mul(&QMat::identity(self.dim(m)).kronecker(&self.product(n, k)));
        left == right
    }
}

/// All strictly increasing nonempty tuples over `0..b`, grouped by length.
pub fn tuples(b: usize) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![];
    for mask in 1u32..(1 << b) {
        let t: Tuple = (0..b).filter(|i| mask & (1 << i) != 0).collect();
        out.push(t);
    }
    out.sort_by_key(|t| (t.len(), t.clone()));
    out
}

/// A Čech system: one DGA per tuple and one restriction per face inclusion.
#[derive(Clone, Debug)]
pub struct CechSystem {
    pub b: usize,
    pub algebras: BTreeMap<Tuple, Dga>,
    /// single-step restrictions `(s, t)` with `s ⊂ t`, `|t| = |s| + 1`;
    /// entry `k` of the vector is the degree `min_deg + k` component
    pub restrictions: BTreeMap<(Tuple, Tuple), Vec<QMat>>,
    pub qmin: i64,
    pub qmax: i64,
}

impl CechSystem {
    pub fn new(
        b: usize,
        algebras: BTreeMap<Tuple, Dga>,
        restrictions: BTreeMap<(Tuple, Tuple), Vec<QMat>>,
    ) -> Result<Self, CechError> {
        let qmin = algebras.values().map(|a| a.min_deg).min().unwrap_or(0);
        let qmax = algebras.values().map(|a| a.max_deg()).max().unwrap_or(0);
        let sys = CechSystem { b, algebras, restrictions, qmin, qmax };
        for t in tuples(b) {
            if !sys.algebras.contains_key(&t) {
                return Err(CechError::MissingAlgebra(t));
            }
            let a = &sys.algebras[&t];
            for m in sys.qmin..=sys.qmax {
                for n in sys.qmin..=sys.qmax {
                    if !a.leibniz_holds(m, n) {
                        return Err(CechError::LeibnizFailure(t.clone(), m, n));
                    }
                    for k in sys.qmin..=sys.qmax {
                        if !a.associative(m, n, k) {
                            return Err(CechError::NotAssociative(t.clone(), m, n, k));
                        }
                    }
                }
            }
        }
        // single-step restrictions: presence, chain map, multiplicativity
        for s in tuples(b) {
            for t in tuples(b) {
                if t.len() == s.len() + 1 && s.iter().all(|i| t.contains(i)) {
                    let key = (s.clone(), t.clone());
                    let Some(_) = sys.restrictions.get(&key) else {
                        return Err(CechError::MissingRestriction(s.clone(), t.clone()));
                    };
                    let src = &sys.algebras[&s];
                    let dst = &sys.algebras[&t];
                    for q in sys.qmin..=sys.qmax {
                        let lhs = sys.restriction_step(&s, &t, q + 1).mul(&src.d(q));
                        let rhs = dst.d(q).mul(&sys.restriction_step(&s, &t, q));
                        if lhs != rhs {
                            return Err(CechError::RestrictionNotChainMap(s.clone(), t.clone()));
                        }
                        for n in sys.qmin..=sys.qmax {
                            let a = dst
                                .product(q, n)
                                .mul(&sys.restriction_step(&s, &t, q).kronecker(
                                    &sys.restriction_step(&s, &t, n),
                                ));
                            let b2 = sys.restriction_step(&s, &t, q + n).mul(&src.product(q, n));
                            if a != b2 {
                                return Err(CechError::RestrictionNotMultiplicative(
                                    s.clone(),
                                    t.clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        // cosimplicial face identities: two-step paths agree
        for s in tuples(b) {
            for t in tuples(b) {
                if t.len() == s.len() + 2 && s.iter().all(|i| t.contains(i)) {
                    let mids: Vec<Tuple> = tuples(b)
                        .into_iter()
                        .filter(|m| {
                            m.len() == s.len() + 1
                                && s.iter().all(|i| m.contains(i))
                                && m.iter().all(|i| t.contains(i))
                        })
                        .collect();
                    assert_eq!(mids.len(), 2);
                    for q in sys.qmin..=sys.qmax {
                        let a = sys
                            .restriction_step(&mids[0], &t, q)
                            .mul(&sys.restriction_step(&s, &mids[0], q));
                        let b2 = sys
                            .restriction_step(&mids[1], &t, q)
                            .mul(&sys.restriction_step(&s, &mids[1], q));
                        if a != b2 {
                            return Err(CechError::FaceIdentity(s.clone(), t.clone()));
                        }
                    }
                }
            }
        }
        Ok(sys)
    }

    fn restriction_step(&self, s: &Tuple, t: &Tuple, q: i64) -> QMat {
        let src = &self.algebras[s];
        let dst = &self.algebras[t];
        let i = q - self.qmin;
        match self.restrictions.get(&(s.clone(), t.clone())) {
            Some(v) if i >= 0 && (i as usize) < v.len() => {
                let m = &v[i as usize];
                if m.rows == dst.dim(q) && m.cols == src.dim(q) {
                    return m.clone();
                }
                QMat::zeros(dst.dim(q), src.dim(q))
            }
            _ => QMat::zeros(dst.dim(q), src.dim(q)),
        }
    }

    /// Restriction along an arbitrary inclusion `s ⊆ t`, composed along a
    /// canonical path (paths agree by the validated face identities).
    pub fn restriction(&self, s: &Tuple, t: &Tuple, q: i64) -> QMat {
        if s == t {
            return QMat::identity(self.algebras[s].dim(q));
        }
        // insert the missing indices one at a time, smallest first
        let missing: Vec<usize> =
            t.iter().copied().filter(|i| !s.contains(i)).collect();
        let mut cur = s.clone();
        let mut acc = QMat::identity(self.algebras[s].dim(q));
        for idx in missing {
            let mut next = cur.clone();
            next.push(idx);
            next.sort_unstable();
            acc = self.restriction_step(&cur, &next, q).mul(&acc);
            cur = next;
        }
        acc
    }

    /// Tuples of length `p+1`, the index blocks of column `p`.
    pub fn blocks(&self, p: i64) -> Vec<Tuple> {
        if p < 0 {
            return vec![];
        }
        tuples(self.b).into_iter().filter(|t| t.len() as i64 == p + 1).collect()
    }

    /// The generated double complex: `K^{p,q} = ⊕_{|t|=p+1} Ω_t^q`.
    pub fn double_complex(&self) -> Result<DoubleComplex, CechError> {
        let mut dims = BTreeMap::new();
        let mut d1 = BTreeMap::new();
        let mut d2 = BTreeMap::new();
        let pmax = self.b as i64 - 1;
        for p in 0..=pmax {
            let blocks = self.blocks(p);
            for q in self.qmin..=self.qmax {
                let dim: usize = blocks.iter().map(|t| self.algebras[t].dim(q)).sum();
                dims.insert((p, q), dim);
                // vertical: block diagonal DGA differentials
                let diag: Vec<QMat> = blocks.iter().map(|t| self.algebras[t].d(q)).collect();
                let refs: Vec<&QMat> = diag.iter().collect();
                d2.insert((p, q), QMat::block_diag(&refs));
                // horizontal: alternating face sums into length p+2 tuples
                if p < pmax {
                    let tgt_blocks = self.blocks(p + 1);
                    let rows: usize = tgt_blocks.iter().map(|t| self.algebras[t].dim(q)).sum();
                    let mut m = QMat::zeros(rows, dim);
                    let mut col_off = 0;
                    for s in &blocks {
                        let scols = self.algebras[s].dim(q);
                        let mut row_off = 0;
                        for t in &tgt_blocks {
                            let trows = self.algebras[t].dim(q);
                            // s must be t with one index deleted
                            if s.iter().all(|i| t.contains(i)) {
                                let j = t
                                    .iter()
                                    .position(|i| !s.contains(i))
                                    .expect("one extra index");
                                let sign = if j % 2 == 0 { 1 } else { -1 };
                                let rest = self.restriction_step(s, t, q);
                                for r in 0..trows {
                                    for c in 0..scols {
                                        let v = rest.at(r, c).clone()
                                            * crate::linalg::rat_i(sign);
                                        if !v.is_zero() {
                                            m.set(row_off + r, col_off + c, v);
                                        }
                                    }
                                }
                            }
                            row_off += trows;
                        }
                        col_off += scols;
                    }
                    d1.insert((p, q), m);
                }
            }
        }
        Ok(DoubleComplex::new(dims, d1, d2)?)
    }

    /// Offset of the block of tuple `t` inside `K^{p,q}`.
    pub fn block_offset(&self, t: &Tuple, q: i64) -> usize {
        let p = t.len() as i64 - 1;
        self.blocks(p)
            .iter()
            .take_while(|s| *s != t)
            .map(|s| self.algebras[s].dim(q))
            .sum()
    }
}

/// A pairing of Čech systems `Ω(1) ⊗ Ω(2) → Ω(3)` over a common index set:
/// per-tuple, per-bidegree product maps commuting with restrictions and
/// satisfying the Leibniz rule index by index.
pub struct CechPairing<'a> {
    pub sys1: &'a CechSystem,
    pub sys2: &'a CechSystem,
    pub sys3: &'a CechSystem,
    /// `(t, (m, n)) ↦` matrix `dim₃(m+n) × dim₁(m)·dim₂(n)`
    pub products: BTreeMap<(Tuple, (i64, i64)), QMat>,
}

impl<'a> CechPairing<'a> {
    pub fn product(&self, t: &Tuple, m: i64, n: i64) -> QMat {
        let d3 = self.sys3.algebras[t].dim(m + n);
        let d1 = self.sys1.algebras[t].dim(m);
        let d2 = self.sys2.algebras[t].dim(n);
        self.products
            .get(&(t.clone(), (m, n)))
            .cloned()
            .unwrap_or_else(|| QMat::zeros(d3, d1 * d2))
    }

    /// Index-by-index compatibility: restrictions and Leibniz.
    pub fn validate(&self) -> Result<(), CechError> {
        assert_eq!(self.sys1.b, self.sys2.b);
        assert_eq!(self.sys1.b, self.sys3.b);
        for s in tuples(self.sys1.b) {
            for t in tuples(self.sys1.b) {
                if t.len() == s.len() + 1 && s.iter().all(|i| t.contains(i)) {
                    for m in self.sys1.qmin..=self.sys1.qmax {
                        for n in self.sys2.qmin..=self.sys2.qmax {
                            let a = self.sys3.restriction(&s, &t, m + n).mul(&self.product(
                                &s, m, n,
                            ));
                            let b2 = self.product(&t, m, n).mul(
                                &self
                                    .sys1
                                    .restriction(&s, &t, m)
                                    .kronecker(&self.sys2.restriction(&s, &t, n)),
                            );
                            if a != b2 {
                                return Err(CechError::RestrictionNotMultiplicative(
                                    s.clone(),
                                    t.clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        for t in tuples(self.sys1.b) {
            let a1 = &self.sys1.algebras[&t];
            let a2 = &self.sys2.algebras[&t];
            let a3 = &self.sys3.algebras[&t];
            for m in self.sys1.qmin..=self.sys1.qmax {
                for n in self.sys2.qmin..=self.sys2.qmax {
                    let lhs = a3.d(m + n).mul(&self.product(&t, m, n));
                    let t1 = self
                        .product(&t, m + 1, n)
                        .mul(&a1.d(m).kronecker(&QMat::identity(a2.dim(n))));
                    let sign = if m.rem_euclid(2) == 0 { 1 } else { -1 };
                    let t2 = self
                        .product(&t, m, n + 1)
                        .mul(&QMat::identity(a1.dim(m)).kronecker(&a2.d(n)))
                        .scale(&crate::linalg::rat_i(sign));
                    if lhs != t1.add(&t2) {
                        return Err(CechError::LeibnizFailure(t.clone(), m, n));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The sign exponent of the front/back formula at the unique surviving term
/// `r = p₁`: `(p₁+p₂+r)(p₁+q₁) + r(p₁+p₂) + r`. It reduces to `q₁p₂ mod 2`,
/// the standard twist between the bigraded cup and the total-complex cup.
pub fn front_back_sign_exponent(p1: i64, q1: i64, p2: i64) -> i64 {
    let r = p1;
    (p1 + p2 + r) * (p1 + q1) + r * (p1 + p2) + r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homcore::spectral::SpectralSequence;
    use crate::linalg::rat_i;

    /// Constant system: every tuple carries the same one-dimensional algebra
    /// in degree 0 with identity restrictions.
    pub fn constant_system(b: usize) -> CechSystem {
        let mut algebras = BTreeMap::new();
        let mut restrictions = BTreeMap::new();
        let mut prods = BTreeMap::new();
        prods.insert((0i64, 0i64), QMat::identity(1));
        let dga = Dga { min_deg: 0, dims: vec![1], diffs: vec![], products: prods };
        for t in tuples(b) {
            algebras.insert(t, dga.clone());
        }
        for s in tuples(b) {
            for t in tuples(b) {
                if t.len() == s.len() + 1 && s.iter().all(|i| t.contains(i)) {
                    restrictions.insert((s.clone(), t.clone()), vec![QMat::identity(1)]);
                }
            }
        }
        CechSystem::new(b, algebras, restrictions).unwrap()
    }

    #[test]
    fn single_index_system() {
        let sys = constant_system(1);
        let dc = sys.double_complex().unwrap();
        assert_eq!(dc.dim(0, 0), 1);
        let tot = dc.total_complex().unwrap();
        assert_eq!(tot.betti(0), 1);
    }

    #[test]
    fn two_set_cover_equalizer() {
        // two-index cover of a one-term algebra with identity restrictions:
        // H⁰ is the equalizer (dimension 1), higher cohomology vanishes
        let sys = constant_system(2);
        let dc = sys.double_complex().unwrap();
        let tot = dc.total_complex().unwrap();
        assert_eq!(tot.betti(0), 1);
        assert_eq!(tot.betti(1), 0);
    }

    #[test]
    fn three_cover_acyclic_and_converges() {
        let sys = constant_system(3);
        let dc = sys.double_complex().unwrap();
        let tot = dc.total_complex().unwrap();
        assert_eq!(tot.betti(0), 1);
        assert_eq!(tot.betti(1), 0);
        assert_eq!(tot.betti(2), 0);
        assert!(SpectralSequence::converges(&dc));
    }

    #[test]
    fn sign_exponent_reduces_to_q1_p2() {
        for p1 in 0..4i64 {
            for q1 in 0..4i64 {
                for p2 in 0..4i64 {
                    let e = front_back_sign_exponent(p1, q1, p2);
                    assert_eq!(e.rem_euclid(2), (q1 * p2).rem_euclid(2));
                }
            }
        }
        let _ = rat_i(0);
    }
}
