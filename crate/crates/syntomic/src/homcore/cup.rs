//! Cup products of commutative double complexes.
//!
//! A cup product is a family `∪^{p₁,q₁;p₂,q₂}: K₁ ⊗ K₂ → K₃` satisfying the
//! two Leibniz identities
//! `d₁(x∪y) = d₁x∪y + (-1)^{p₁} x∪d₁y` and
//! `d₂(x∪y) = d₂x∪y + (-1)^{q₁} x∪d₂y`.
//! The associated total cup `∪̃ = (-1)^{q₁p₂} ∪` is then a cup product of
//! the total complexes for the Koszul sign `(-1)^{n₁}`, and it induces
//! products on cohomology and on every page of the column spectral
//! sequences.

use crate::homcore::cech::{front_back_sign_exponent, CechPairing, Tuple};
use crate::homcore::double::DoubleComplex;
use crate::homcore::spectral::{Page, SpectralSequence};
use crate::linalg::{rat_i, span_basis, span_sum, QMat, Rat};
use num::Zero;
use std::collections::BTreeMap;

/// Which Leibniz identity failed, and where.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeibnizViolation {
    pub horizontal: bool,
    pub at: (i64, i64, i64, i64),
}

pub struct CupFamily<'a> {
    pub k1: &'a DoubleComplex,
    pub k2: &'a DoubleComplex,
    pub k3: &'a DoubleComplex,
    /// `(p₁,q₁,p₂,q₂) ↦` matrix `dim₃(p₁+p₂, q₁+q₂) × dim₁·dim₂`
    pub maps: BTreeMap<(i64, i64, i64, i64), QMat>,
}

impl<'a> CupFamily<'a> {
    pub fn map(&self, p1: i64, q1: i64, p2: i64, q2: i64) -> QMat {
        self.maps.get(&(p1, q1, p2, q2)).cloned().unwrap_or_else(|| {
            QMat::zeros(self.k3.dim(p1 + p2, q1 + q2), self.k1.dim(p1, q1) * self.k2.dim(p2, q2))
        })
    }

    /// The full Leibniz audit over every bidegree pair; empty result means
    /// the family is a cup product of double complexes.
    pub fn leibniz_check(&self) -> Vec<LeibnizViolation> {
        let mut violations = Vec::new();
        for p1 in self.k1.pmin..=self.k1.pmax {
            for q1 in self.k1.qmin..=self.k1.qmax {
                for p2 in self.k2.pmin..=self.k2.pmax {
                    for q2 in self.k2.qmin..=self.k2.qmax {
                        let id1 = QMat::identity(self.k1.dim(p1, q1));
                        let id2 = QMat::identity(self.k2.dim(p2, q2));
                        // horizontal identity
                        let lhs = self.k3.d1(p1 + p2, q1 + q2).mul(&self.map(p1, q1, p2, q2));
                        let t1 =
                            self.map(p1 + 1, q1, p2, q2).mul(&self.k1.d1(p1, q1).kronecker(&id2));
                        let sgn = rat_i(if p1.rem_euclid(2) == 0 { 1 } else { -1 });
                        let t2 = self
                            .map(p1, q1, p2 + 1, q2)
                            .mul(&id1.kronecker(&self.k2.d1(p2, q2)))
                            .scale(&sgn);
                        if lhs != t1.add(&t2) {
                            violations.push(LeibnizViolation {
                                horizontal: true,
                                at: (p1, q1, p2, q2),
                            });
                        }
                        // vertical identity
                        let lhs = self.k3.d2(p1 + p2, q1 + q2).mul(&self.map(p1, q1, p2, q2));
                        let t1 =
                            self.map(p1, q1 + 1, p2, q2).mul(&self.k1.d2(p1, q1).kronecker(&id2));
                        let sgn = rat_i(if q1.rem_euclid(2) == 0 { 1 } else { -1 });
                        let t2 = self
                            .map(p1, q1, p2, q2 + 1)
                            .mul(&id1.kronecker(&self.k2.d2(p2, q2)))
                            .scale(&sgn);
                        if lhs != t1.add(&t2) {
                            violations.push(LeibnizViolation {
                                horizontal: false,
                                at: (p1, q1, p2, q2),
                            });
                        }
                    }
                }
            }
        }
        violations
    }

    /// The total cup `x ∪̃ y` of two total-complex vectors, with the
    /// `(-1)^{q₁p₂}` twist on each block pair.
    pub fn total_cup(&self, n1: i64, x: &QMat, n2: i64, y: &QMat) -> QMat {
        assert_eq!(x.cols, 1);
        assert_eq!(y.cols, 1);
        let mut out = QMat::zeros(self.k3.total_dim(n1 + n2), 1);
        for &(p1, q1) in &self.k1.blocks_of_total_degree(n1) {
            let xb = self.k1.project_block(n1, p1, x);
            if xb.is_zero() {
                continue;
            }
            for &(p2, q2) in &self.k2.blocks_of_total_degree(n2) {
                let yb = self.k2.project_block(n2, p2, y);
                if yb.is_zero() {
                    continue;
                }
                let prod = self.map(p1, q1, p2, q2).mul(&xb.kronecker(&yb));
                let sign = rat_i(if (q1 * p2).rem_euclid(2) == 0 { 1 } else { -1 });
                let embedded = self.k3.embed_block(n1 + n2, p1 + p2, &prod.scale(&sign));
                out = out.add(&embedded);
            }
        }
        out
    }

    /// Chain-map property of the total cup for the Koszul sign:
    /// `d̃(x∪̃y) = d̃x∪̃y + (-1)^{n₁} x∪̃d̃y`, verified on all block basis
    /// vectors.
    pub fn total_cup_is_chain_map(&self) -> bool {
        let (n1min, n1max) = self.k1.total_range();
        let (n2min, n2max) = self.k2.total_range();
        for n1 in n1min..=n1max {
            for n2 in n2min..=n2max {
                let d1 = self.k1.total_d(n1);
                let d2 = self.k2.total_d(n2);
                let d3 = self.k3.total_d(n1 + n2);
                let sgn = rat_i(if n1.rem_euclid(2) == 0 { 1 } else { -1 });
                for i in 0..self.k1.total_dim(n1) {
                    let x = unit_vec(self.k1.total_dim(n1), i);
                    let dx = d1.mul(&x);
                    for j in 0..self.k2.total_dim(n2) {
                        let y = unit_vec(self.k2.total_dim(n2), j);
                        let dy = d2.mul(&y);
                        let lhs = d3.mul(&self.total_cup(n1, &x, n2, &y));
                        let rhs = self
                            .total_cup(n1 + 1, &dx, n2, &y)
                            .add(&self.total_cup(n1, &x, n2 + 1, &dy).scale(&sgn));
                        if lhs != rhs {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The induced pairing `H^{n₁}(Tot K₁) ⊗ H^{n₂}(Tot K₂) → H^{n₁+n₂}`,
    /// as a matrix on the chosen representative bases (columns indexed by
    /// pairs `(i, j)` with `j` fastest).
    pub fn cohomology_pairing(&self, n1: i64, n2: i64) -> QMat {
        let t1 = self.k1.total_complex().expect("valid");
        let t2 = self.k2.total_complex().expect("valid");
        let t3 = self.k3.total_complex().expect("valid");
        let h1 = t1.cohomology(n1);
        let h2 = t2.cohomology(n2);
        let h3 = t3.cohomology(n1 + n2);
        let mut cols = Vec::new();
        for i in 0..h1.dim() {
            let x = QMat::from_fn(h1.ambient_dim, 1, |r, _| h1.reps.at(r, i).clone());
            for j in 0..h2.dim() {
                let y = QMat::from_fn(h2.ambient_dim, 1, |r, _| h2.reps.at(r, j).clone());
                let z = self.total_cup(n1, &x, n2, &y);
                let cls = h3.class_of(&z).expect("cup of cocycles is a cocycle");
                cols.push(cls.column(0));
            }
        }
        QMat::from_columns(h3.dim(), &cols)
    }

    /// Representative independence of the cohomology pairing: perturbing
    /// either argument by a coboundary does not change the class.
    pub fn representative_independent(&self, n1: i64, n2: i64, w: &QMat, v: &QMat) -> bool {
        let t1 = self.k1.total_complex().expect("valid");
        let t2 = self.k2.total_complex().expect("valid");
        let t3 = self.k3.total_complex().expect("valid");
        let h1 = t1.cohomology(n1);
        let h2 = t2.cohomology(n2);
        let h3 = t3.cohomology(n1 + n2);
        let dw = t1.d(n1 - 1).mul(w);
        let dv = t2.d(n2 - 1).mul(v);
        for i in 0..h1.dim() {
            let x = QMat::from_fn(h1.ambient_dim, 1, |r, _| h1.reps.at(r, i).clone());
            let x2 = x.add(&dw);
            for j in 0..h2.dim() {
                let y = QMat::from_fn(h2.ambient_dim, 1, |r, _| h2.reps.at(r, j).clone());
                let y2 = y.add(&dv);
                let a = h3.class_of(&self.total_cup(n1, &x, n2, &y));
                let b = h3.class_of(&self.total_cup(n1, &x2, n2, &y2));
                match (a, b) {
                    (Ok(a), Ok(b)) if a == b => {}
                    _ => return false,
                }
            }
        }
        true
    }

    /// Filtration compatibility on cohomology:
    /// `F^{p₁}H ⊗ F^{p₂}H → F^{p₁+p₂}H` (membership of cups of filtered
    /// cocycles).
    pub fn filtration_compatible(&self) -> bool {
        let (n1min, n1max) = self.k1.total_range();
        let (n2min, n2max) = self.k2.total_range();
        for n1 in n1min..=n1max {
            for n2 in n2min..=n2max {
                let ker1 = self.k1.total_d(n1).kernel();
                let ker2 = self.k2.total_d(n2).kernel();
                for p1 in self.k1.pmin..=self.k1.pmax {
                    let f1 = self.k1.filtration_basis(n1, p1);
                    let zf1 = crate::linalg::span_intersect(&ker1, &f1);
                    for p2 in self.k2.pmin..=self.k2.pmax {
                        let f2 = self.k2.filtration_basis(n2, p2);
                        let zf2 = crate::linalg::span_intersect(&ker2, &f2);
                        let target_f = self.k3.filtration_basis(n1 + n2, p1 + p2);
                        let target_im = span_basis(&self.k3.total_d(n1 + n2 - 1));
                        let allowed = span_sum(&target_f, &target_im);
                        for i in 0..zf1.cols {
                            let x = QMat::from_fn(zf1.rows, 1, |r, _| zf1.at(r, i).clone());
                            for j in 0..zf2.cols {
                                let y = QMat::from_fn(zf2.rows, 1, |r, _| zf2.at(r, j).clone());
                                let z = self.total_cup(n1, &x, n2, &y);
                                if !crate::linalg::in_span(&allowed, &z) {
                                    return false;
                                }
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Pairings on a spectral-sequence page, as matrices in the page
    /// representative bases, checked for the `d_r`-Leibniz rule.
    pub fn page_products(&self, r: i64) -> PageProducts {
        let page1 = SpectralSequence::page(self.k1, r);
        let page2 = SpectralSequence::page(self.k2, r);
        let page3 = SpectralSequence::page(self.k3, r);
        let mut pairings = BTreeMap::new();
        for (&(p1, q1), e1) in &page1.entries {
            for (&(p2, q2), e2) in &page2.entries {
                let Some(e3) = page3.entries.get(&(p1 + p2, q1 + q2)) else {
                    continue;
                };
                if e1.dim() == 0 || e2.dim() == 0 {
                    continue;
                }
                let mut cols = Vec::new();
                let mut ok = true;
                for i in 0..e1.dim() {
                    let x = QMat::from_fn(e1.reps.rows, 1, |rr, _| e1.reps.at(rr, i).clone());
                    for j in 0..e2.dim() {
                        let y =
                            QMat::from_fn(e2.reps.rows, 1, |rr, _| e2.reps.at(rr, j).clone());
                        let z = self.total_cup(e1.n, &x, e2.n, &y);
                        match e3.class_of(&z) {
                            Some(c) => cols.push(c.column(0)),
                            None => {
                                ok = false;
                                cols.push(vec![Rat::zero(); e3.dim()]);
                            }
                        }
                    }
                }
                pairings.insert(
                    (p1, q1, p2, q2),
                    PagePairing {
                        matrix: QMat::from_columns(e3.dim(), &cols),
                        well_defined: ok,
                    },
                );
            }
        }
        PageProducts { r, page1, page2, page3, pairings }
    }
}

fn unit_vec(n: usize, i: usize) -> QMat {
    QMat::from_fn(n, 1, |r, _| if r == i { rat_i(1) } else { Rat::zero() })
}

#[derive(Debug)]
pub struct PagePairing {
    /// columns indexed by pairs `(i, j)` with `j` fastest
    pub matrix: QMat,
    pub well_defined: bool,
}

pub struct PageProducts {
    pub r: i64,
    pub page1: Page,
    pub page2: Page,
    pub page3: Page,
    pub pairings: BTreeMap<(i64, i64, i64, i64), PagePairing>,
}

impl PageProducts {
    pub fn all_well_defined(&self) -> bool {
        self.pairings.values().all(|p| p.well_defined)
    }

    /// The page-r Leibniz rule
    /// `d_r(x∪y) = d_r x ∪ y + (-1)^{p₁+q₁} x ∪ d_r y` as matrix identities.
    pub fn leibniz_for_dr(&self) -> bool {
        for (&(p1, q1, p2, q2), pairing) in &self.pairings {
            let r = self.r;
            let src_dims = (self.page1.dim(p1, q1), self.page2.dim(p2, q2));
            if src_dims.0 == 0 || src_dims.1 == 0 {
                continue;
            }
            let d3 = self
                .page3
                .differentials
                .get(&(p1 + p2, q1 + q2))
                .cloned()
                .unwrap_or_else(|| QMat::zeros(0, pairing.matrix.rows));
            let lhs = d3.mul(&pairing.matrix);
            let d1 = self
                .page1
                .differentials
                .get(&(p1, q1))
                .cloned()
                .unwrap_or_else(|| QMat::zeros(0, src_dims.0));
            let d2 = self
                .page2
                .differentials
                .get(&(p2, q2))
                .cloned()
                .unwrap_or_else(|| QMat::zeros(0, src_dims.1));
            let t1 = self
                .pairings
                .get(&(p1 + r, q1 - r + 1, p2, q2))
                .map(|p| p.matrix.mul(&d1.kronecker(&QMat::identity(src_dims.1))))
                .unwrap_or_else(|| QMat::zeros(lhs.rows, lhs.cols));
            let sgn = rat_i(if (p1 + q1).rem_euclid(2) == 0 { 1 } else { -1 });
            let t2 = self
                .pairings
                .get(&(p1, q1, p2 + r, q2 - r + 1))
                .map(|p| p.matrix.mul(&QMat::identity(src_dims.0).kronecker(&d2)).scale(&sgn))
                .unwrap_or_else(|| QMat::zeros(lhs.rows, lhs.cols));
            if lhs != t1.add(&t2) {
                return false;
            }
        }
        true
    }
}

/// The front/back cup of Čech double complexes: on bihomogeneous components
/// the only surviving term of the signed-sum formula is `r = p₁`, the sign
/// exponent reducing to `q₁p₂ mod 2`; this function returns the *unsigned*
/// bigraded family (the one satisfying the two Leibniz identities), whose
/// associated total cup carries exactly the formula's sign.
pub fn cech_cup<'a>(
    pairing: &CechPairing<'_>,
    k1: &'a DoubleComplex,
    k2: &'a DoubleComplex,
    k3: &'a DoubleComplex,
) -> CupFamily<'a> {
    let sys1 = pairing.sys1;
    let sys2 = pairing.sys2;
    let sys3 = pairing.sys3;
    let mut maps = BTreeMap::new();
    let pmax = sys1.b as i64 - 1;
    for p1 in 0..=pmax {
        for p2 in 0..=(pmax - p1) {
            let p3 = p1 + p2;
            for q1 in sys1.qmin..=sys1.qmax {
                for q2 in sys2.qmin..=sys2.qmax {
                    let rows = k3.dim(p3, q1 + q2);
                    let cols = k1.dim(p1, q1) * k2.dim(p2, q2);
                    if rows == 0 || cols == 0 {
                        continue;
                    }
                    let mut m = QMat::zeros(rows, cols);
                    for t in sys3.blocks(p3) {
                        // front face (β₀..β_{p₁}) and back face (β_{p₁}..)
                        let front: Tuple = t[0..=(p1 as usize)].to_vec();
                        let back: Tuple = t[(p1 as usize)..].to_vec();
                        let rho1 = sys1.restriction(&front, &t, q1);
                        let rho2 = sys2.restriction(&back, &t, q2);
                        let prod = pairing.product(&t, q1, q2).mul(&rho1.kronecker(&rho2));
                        // scatter into block coordinates
                        let row_off = sys3.block_offset(&t, q1 + q2);
                        let col1_off = sys1.block_offset(&front, q1);
                        let col2_off = sys2.block_offset(&back, q2);
                        let d1f = sys1.algebras[&front].dim(q1);
                        let d2b = sys2.algebras[&back].dim(q2);
                        let w2 = k2.dim(p2, q2);
                        for rr in 0..prod.rows {
                            for a in 0..d1f {
                                for b2 in 0..d2b {
                                    let v = prod.at(rr, a * d2b + b2).clone();
                                    if !v.is_zero() {
                                        let col = (col1_off + a) * w2 + (col2_off + b2);
                                        let cur = m.at(row_off + rr, col).clone();
                                        m.set(row_off + rr, col, cur + v);
                                    }
                                }
                            }
                        }
                    }
                    maps.insert((p1, q1, p2, q2), m);
                }
            }
        }
    }
    CupFamily { k1, k2, k3, maps }
}

/// Evaluates the literal signed formula (sum over `r` of front/back products
/// with exponent `(p₁+p₂+r)(p₁+q₁)+r(p₁+p₂)+r`) on a bihomogeneous pair and
/// confirms it equals the total cup `∪̃` of the family built by
/// [`cech_cup`]; used by the audits.
pub fn cech_formula_matches(
    family: &CupFamily<'_>,
    p1: i64,
    q1: i64,
    p2: i64,
    q2: i64,
) -> bool {
    let d1 = family.k1.dim(p1, q1);
    let d2 = family.k2.dim(p2, q2);
    let e = front_back_sign_exponent(p1, q1, p2);
    let sign = rat_i(if e.rem_euclid(2) == 0 { 1 } else { -1 });
    let formula = family.map(p1, q1, p2, q2).scale(&sign);
    for i in 0..d1 {
        let x = unit_vec(d1, i);
        let xt = family.k1.embed_block(p1 + q1, p1, &x);
        for j in 0..d2 {
            let y = unit_vec(d2, j);
            let yt = family.k2.embed_block(p2 + q2, p2, &y);
            let total = family.total_cup(p1 + q1, &xt, p2 + q2, &yt);
            let blk = family.k3.project_block(p1 + q1 + p2 + q2, p1 + p2, &total);
            let direct = formula.mul(&x.kronecker(&y));
            if blk != direct {
                return false;
            }
        }
    }
    true
}
