//! The syntomic polynomial double complex `K_{P,r}`: two columns, with
//! `d₁ = (P(Φ), γ̄)` from the analytic side into the analytic side plus the
//! filtered de Rham quotient, and the kernel/cokernel decomposition of its
//! cohomology.

use crate::engine::package::{GeometricPackage, PackageError};
use crate::homcore::complex::{ChainMap, Complex};
use crate::homcore::double::DoubleComplex;
use crate::linalg::{extend_basis, span_basis, standard_complement, QMat};
use crate::scalars::qpoly::QPoly;
use num::Zero;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SynError {
    #[error("polynomial must have constant term 1")]
    NotUnitConstantTerm,
    #[error("P(Φ) is not invertible on cohomology in degree {0}")]
    NotInvertible(i64),
    #[error("exact division failed: P does not divide Q")]
    DivisionFailed,
    #[error("s must not exceed r")]
    BadTwistOrder,
    #[error(transparent)]
    Package(#[from] PackageError),
    #[error(transparent)]
    Hom(#[from] crate::homcore::complex::HomError),
    #[error(transparent)]
    Double(#[from] crate::homcore::double::DoubleError),
}

/// Concrete model of `C/Fil^r`: a chosen deterministic complement `W_q` of
/// `Fil^r ∩ C^q`, with the induced differential `π ∘ d ∘ ℓ`. The projection
/// is a chain map whatever the complement, so cohomology is the quotient
/// cohomology on the nose.
#[derive(Clone, Debug)]
pub struct QuotientModel {
    pub ambient: Complex,
    pub fil_basis: Vec<QMat>,
    pub complement: Vec<QMat>,
    pub complex: Complex,
}

impl QuotientModel {
    pub fn new(ambient: &Complex, fil_basis_by_degree: Vec<QMat>) -> Self {
        let min = ambient.min_deg();
        let max = ambient.max_deg();
        let mut complement = Vec::new();
        for q in min..=max {
            let fil = &fil_basis_by_degree[(q - min) as usize];
            complement.push(standard_complement(fil, ambient.dim(q)));
        }
        let dims: Vec<usize> = complement.iter().map(|w| w.cols).collect();
        let mut diffs = Vec::new();
        for q in min..max {
            let i = (q - min) as usize;
            let lifted = ambient.d(q).mul(&complement[i]);
            let proj = Self::project_with(
                &complement[i + 1],
                &fil_basis_by_degree[i + 1],
                &lifted,
            );
            diffs.push(proj);
        }
        let complex = Complex::new(min, dims, diffs).expect("quotient differential squares");
        QuotientModel { ambient: ambient.clone(), fil_basis: fil_basis_by_degree, complement, complex }
    }

    fn project_with(w: &QMat, fil: &QMat, v: &QMat) -> QMat {
        // coordinates of v in the [W | Fil] basis, W-part
        let basis = w.hstack(fil);
        let sol = basis.solve(v).expect("W ⊕ Fil spans the ambient space");
        QMat::from_fn(w.cols, v.cols, |r, c| sol.at(r, c).clone())
    }

    pub fn project(&self, q: i64, v: &QMat) -> QMat {
        let i = (q - self.ambient.min_deg()) as usize;
        Self::project_with(&self.complement[i], &self.fil_basis[i], v)
    }

    pub fn lift(&self, q: i64, w: &QMat) -> QMat {
        let i = (q - self.ambient.min_deg()) as usize;
        self.complement[i].mul(w)
    }

    /// The projection as a chain map `ambient → quotient`.
    pub fn projection_map(&self) -> ChainMap {
        ChainMap::new(&self.ambient, &self.complex, 0, |q| {
            self.project(q, &QMat::identity(self.ambient.dim(q)))
        })
        .expect("projection along a subcomplex is a chain map")
    }
}

/// The syntomic double complex of a package with a polynomial `P` and a
/// twist `r`.
pub struct SynComplex {
    pub p_poly: QPoly,
    pub r: i64,
    pub dc: DoubleComplex,
    pub quot: QuotientModel,
    pub an: Complex,
    pub p_phi: ChainMap,
    pub gamma_bar_mats: Vec<QMat>,
}

impl SynComplex {
    pub fn gamma_bar(&self, q: i64) -> QMat {
        let i = q - self.an.min_deg();
        if i >= 0 && (i as usize) < self.gamma_bar_mats.len() {
            self.gamma_bar_mats[i as usize].clone()
        } else {
            QMat::zeros(self.quot.complex.dim(q), self.an.dim(q))
        }
    }

    pub fn total(&self) -> Complex {
        self.dc.total_complex().expect("validated double complex")
    }

    /// Tot-degree-n vector from column-1 data `(x, w)`.
    pub fn column1_vector(&self, q: i64, x: &QMat, w: &QMat) -> QMat {
        let v = x.vstack(w);
        self.dc.embed_block(q + 1, 1, &v)
    }

    /// Splits a `Tot^n` vector into `(u, x, w)` parts.
    pub fn split_vector(&self, n: i64, v: &QMat) -> (QMat, QMat, QMat) {
        let u = self.dc.project_block(n, 0, v);
        let col1 = self.dc.project_block(n, 1, v);
        let an_dim = self.an.dim(n - 1);
        let x = QMat::from_fn(an_dim, 1, |r, _| col1.at(r, 0).clone());
        let w = QMat::from_fn(col1.rows - an_dim, 1, |r, _| col1.at(an_dim + r, 0).clone());
        (u, x, w)
    }
}

/// Builds `K_{P,r}`: columns `C_an` and `C_an ⊕ (C_dR/Fil^r)`, horizontal
/// differential `(P(Φ), γ̄)`.
pub fn build_syn(pkg: &GeometricPackage, p_poly: &QPoly, r: i64) -> Result<SynComplex, SynError> {
    if !p_poly.has_unit_constant_term() {
        return Err(SynError::NotUnitConstantTerm);
    }
    pkg.validate()?;
    let an = &pkg.c_an;
    let dr = &pkg.c_dr;
    let fil_basis: Vec<QMat> =
        (dr.min_deg()..=dr.max_deg()).map(|q| pkg.fil.basis_at(dr, r, q)).collect();
    let quot = QuotientModel::new(dr, fil_basis);
    let p_phi = pkg.p_of_phi(p_poly);

    let qmin = an.min_deg().min(quot.complex.min_deg());
    let qmax = an.max_deg().max(quot.complex.max_deg());
    let mut dims = BTreeMap::new();
    let mut d1 = BTreeMap::new();
    let mut d2 = BTreeMap::new();
    let mut gamma_bar_mats = Vec::new();
    for q in an.min_deg()..=an.max_deg() {
        let g = pkg.gamma.mat_sized(an, dr, q);
        gamma_bar_mats.push(if quot.complex.dim(q) > 0 || g.rows > 0 {
            let i = (q - dr.min_deg()) as usize;
            if i < quot.complement.len() {
                quot.project(q, &g)
            } else {
                QMat::zeros(0, an.dim(q))
            }
        } else {
            QMat::zeros(0, an.dim(q))
        });
    }
    for q in qmin..=qmax {
        let a_dim = an.dim(q);
        let w_dim = quot.complex.dim(q);
        dims.insert((0, q), a_dim);
        dims.insert((1, q), a_dim + w_dim);
        // d1: (P(Φ), γ̄)
        let top = p_phi.mat_sized(an, an, q);
        let bot = {
            let i = q - an.min_deg();
            if i >= 0 && (i as usize) < gamma_bar_mats.len() {
                gamma_bar_mats[i as usize].clone()
            } else {
                QMat::zeros(w_dim, a_dim)
            }
        };
        d1.insert((0, q), top.vstack(&bot));
        // d2 on both columns
        d2.insert((0, q), an.d(q));
        d2.insert((1, q), QMat::block_diag(&[&an.d(q), &quot.complex.d(q)]));
    }
    let dc = DoubleComplex::new(dims, d1, d2)?;
    Ok(SynComplex {
        p_poly: p_poly.clone(),
        r,
        dc,
        quot,
        an: an.clone(),
        p_phi,
        gamma_bar_mats,
    })
}

/// The cokernel/kernel decomposition of `H^i(K_{P,r})`:
/// `F¹ = coker[(P(Φ), γ̄): H^{i-1}(an) → H^{i-1}(an) ⊕ H^{i-1}(dR/Fil)]`,
/// `F⁰ = ker` of the same map one degree up, sitting in the exact sequence
/// `0 → F¹ → H^i(Tot) → F⁰ → 0`.
pub struct FDecomposition {
    pub f1_dim: usize,
    pub f0_dim: usize,
    pub total_dim: usize,
    pub exact: bool,
    /// classes of `F¹`-representatives inside `H^i(Tot)` (coordinates)
    pub f1_classes: QMat,
    /// matrix of the projection `H^i(Tot) → F0 ⊆ H^i(an)`
    pub projection: QMat,
}

/// The map `(P(Φ), γ̄)` on cohomology in degree `q`.
pub fn alpha_on_cohomology(syn: &SynComplex, pkg: &GeometricPackage, q: i64) -> QMat {
    let an = &syn.an;
    let top = syn.p_phi.on_cohomology(an, an, q);
    // γ̄ on cohomology
    let h_an = an.cohomology(q);
    let h_q = syn.quot.complex.cohomology(q);
    let mut cols = Vec::new();
    for j in 0..h_an.dim() {
        let v = QMat::from_fn(h_an.ambient_dim, 1, |r, _| h_an.reps.at(r, j).clone());
        let img = syn.gamma_bar(q).mul(&v);
        let cls = h_q.class_of(&img).expect("γ̄ of a cocycle is a cocycle");
        cols.push(cls.column(0));
    }
    let bot = QMat::from_columns(h_q.dim(), &cols);
    let _ = pkg;
    top.vstack(&bot)
}

pub fn f_filtration(syn: &SynComplex, pkg: &GeometricPackage, i: i64) -> FDecomposition {
    let an = &syn.an;
    let tot = syn.total();
    let h_tot = tot.cohomology(i);

    let alpha_prev = alpha_on_cohomology(syn, pkg, i - 1);
    let alpha_here = alpha_on_cohomology(syn, pkg, i);
    let f1_dim = alpha_prev.rows - span_basis(&alpha_prev).cols;
    let f0_dim = alpha_here.kernel().cols;

    // F¹ classes inside H^i(Tot): column-1 cocycles representing coker
    let h_an_prev = an.cohomology(i - 1);
    let h_q_prev = syn.quot.complex.cohomology(i - 1);
    let im = span_basis(&alpha_prev);
    let coker_reps = extend_basis(&im, &QMat::identity(alpha_prev.rows));
    let mut cols = Vec::new();
    for &k in &coker_reps {
        // the k-th basis vector of H^{i-1}(an) ⊕ H^{i-1}(Q) as a cochain
        let (x, w) = if k < h_an_prev.dim() {
            let x = QMat::from_fn(h_an_prev.ambient_dim, 1, |r, _| h_an_prev.reps.at(r, k).clone());
            (x, QMat::zeros(h_q_prev.ambient_dim, 1))
        } else {
            let w = QMat::from_fn(h_q_prev.ambient_dim, 1, |r, _| {
                h_q_prev.reps.at(r, k - h_an_prev.dim()).clone()
            });
            (QMat::zeros(h_an_prev.ambient_dim, 1), w)
        };
        let v = syn.column1_vector(i - 1, &x, &w);
        let cls = h_tot.class_of(&v).expect("column-1 cocycle");
        cols.push(cls.column(0));
    }
    let f1_classes = QMat::from_columns(h_tot.dim(), &cols);

    // projection H^i(Tot) → H^i(an), landing in ker(α_i)
    let h_an_here = an.cohomology(i);
    let mut proj_cols = Vec::new();
    let mut in_kernel = true;
    for j in 0..h_tot.dim() {
        let v = QMat::from_fn(h_tot.ambient_dim, 1, |r, _| h_tot.reps.at(r, j).clone());
        let u = syn.dc.project_block(i, 0, &v);
        let cls = h_an_here.class_of(&u).expect("u-part of a total cocycle is a cocycle");
        if !alpha_here.mul(&cls).is_zero() {
            in_kernel = false;
        }
        proj_cols.push(cls.column(0));
    }
    let projection = QMat::from_columns(h_an_here.dim(), &proj_cols);

    // exactness: dims add up, F¹ injects, projection kills F¹ and is onto F⁰
    let exact = h_tot.dim() == f1_dim + f0_dim
        && span_basis(&f1_classes).cols == f1_dim
        && projection.mul(&f1_classes).is_zero()
        && span_basis(&projection).cols == f0_dim
        && in_kernel;

    FDecomposition {
        f1_dim,
        f0_dim,
        total_dim: h_tot.dim(),
        exact,
        f1_classes,
        projection,
    }
}

/// The morphism of double complexes `K_{P,r} → K_{Q,s}` for `P | Q`,
/// `s ≤ r`: the identity on column 0 and `(x, y) ↦ (P'(Φ)x, ȳ)` on column 1.
pub struct CompareMorphism {
    pub factor: QPoly,
    /// per-degree block matrices on the total complexes
    pub on_total: Vec<QMat>,
    pub total_min_deg: i64,
}

pub fn compare_prq(
    syn_p: &SynComplex,
    pkg: &GeometricPackage,
    q_poly: &QPoly,
    s: i64,
) -> Result<(SynComplex, CompareMorphism), SynError> {
    if s > syn_p.r {
        return Err(SynError::BadTwistOrder);
    }
    let (factor, rem) = q_poly.div_rem(&syn_p.p_poly);
    if !rem.is_zero() {
        return Err(SynError::DivisionFailed);
    }
    let syn_q = build_syn(pkg, q_poly, s)?;
    let an = &syn_p.an;
    let fac_phi = pkg.p_of_phi(&factor);
    let tot_p = syn_p.total();
    let tot_q = syn_q.total();
    let (nmin, nmax) = (tot_p.min_deg().min(tot_q.min_deg()), tot_p.max_deg().max(tot_q.max_deg()));
    let mut mats = Vec::new();
    for n in nmin..=nmax {
        let mut m = QMat::zeros(tot_q.dim(n), tot_p.dim(n));
        // column 0 block: identity on C_an^n
        let u_dim = syn_p.dc.dim(0, n);
        let src_u = syn_p.dc.block_offset(n, 0);
        let dst_u = syn_q.dc.block_offset(n, 0);
        for k in 0..u_dim.min(syn_q.dc.dim(0, n)) {
            m.set(dst_u + k, src_u + k, crate::linalg::rat_i(1));
        }
        // column 1 block: (x, y) ↦ (P'(Φ)x, project_{r→s} y)
        let src_c1 = syn_p.dc.block_offset(n, 1);
        let dst_c1 = syn_q.dc.block_offset(n, 1);
        let qdeg = n - 1;
        let an_dim = an.dim(qdeg);
        if syn_p.dc.dim(1, qdeg) > 0 && syn_q.dc.dim(1, qdeg) > 0 {
            let fm = fac_phi.mat_sized(an, an, qdeg);
            for r in 0..fm.rows {
                for c in 0..fm.cols {
                    if !fm.at(r, c).is_zero() {
                        m.set(dst_c1 + r, src_c1 + c, fm.at(r, c).clone());
                    }
                }
            }
            // y-part: lift from the r-model, project into the s-model
            let idx = qdeg - pkg.c_dr.min_deg();
            if idx < 0 || idx as usize >= syn_p.quot.complement.len() {
                mats.push(m);
                continue;
            }
            let lift = &syn_p.quot.complement[idx as usize];
            if lift.cols > 0 {
                let proj = syn_q.quot.project(qdeg, lift);
                for r in 0..proj.rows {
                    for c in 0..proj.cols {
                        if !proj.at(r, c).is_zero() {
                            m.set(dst_c1 + an_dim + r, src_c1 + an_dim + c, proj.at(r, c).clone());
                        }
                    }
                }
            }
        }
        mats.push(m);
    }
    // chain-map property against the total differentials
    for n in nmin..nmax {
        let i = (n - nmin) as usize;
        let lhs = mats[i + 1].mul(&tot_p.d(n));
        let rhs = tot_q.d(n).mul(&mats[i]);
        assert_eq!(lhs, rhs, "comparison morphism must be a chain map");
    }
    Ok((syn_q, CompareMorphism { factor, on_total: mats, total_min_deg: nmin }))
}

impl CompareMorphism {
    pub fn mat(&self, n: i64) -> Option<&QMat> {
        let i = n - self.total_min_deg;
        if i >= 0 { self.on_total.get(i as usize) } else { None }
    }
}

/// The two-sided inverse of `H^{i-1}(dR/Fil^r) → F¹H^i` available when
/// `P(Φ)` is invertible on `H^{i-1}(an)`: `[(x, y)] ↦ y - γ̄(P(Φ)⁻¹x)`.
pub struct F1Inverse {
    /// the natural map `H^{i-1}(quot) → H^i(Tot)` (classes of `(0, w)`)
    pub forward: QMat,
    /// the inverse on `F¹`-classes, in `H^{i-1}(quot)` coordinates
    pub backward_on_f1: QMat,
    pub round_trip_identity: bool,
    pub f0_prev_vanishes: bool,
}

pub fn f1_inverse(
    syn: &SynComplex,
    pkg: &GeometricPackage,
    i: i64,
) -> Result<F1Inverse, SynError> {
    let an = &syn.an;
    let p_phi_h = syn.p_phi.on_cohomology(an, an, i - 1);
    if p_phi_h.kernel().cols != 0 || p_phi_h.rank() != p_phi_h.rows {
        return Err(SynError::NotInvertible(i - 1));
    }
    let inv = QMat::identity(p_phi_h.rows);
    let p_inv = p_phi_h.solve(&inv).expect("invertible");

    let tot = syn.total();
    let h_tot = tot.cohomology(i);
    let h_q = syn.quot.complex.cohomology(i - 1);
    let h_an = an.cohomology(i - 1);

    // forward: [w] ↦ class of (0, w)
    let mut fwd_cols = Vec::new();
    for j in 0..h_q.dim() {
        let w = QMat::from_fn(h_q.ambient_dim, 1, |r, _| h_q.reps.at(r, j).clone());
        let v = syn.column1_vector(i - 1, &QMat::zeros(an.dim(i - 1), 1), &w);
        let cls = h_tot.class_of(&v).expect("column-1 cocycle");
        fwd_cols.push(cls.column(0));
    }
    let forward = QMat::from_columns(h_tot.dim(), &fwd_cols);

    // backward on H^i(Tot): rep (u, x, w) ↦ [w] - γ̄_*(P(Φ)⁻¹ [x])
    let gamma_bar_h = {
        let mut cols = Vec::new();
        for j in 0..h_an.dim() {
            let v = QMat::from_fn(h_an.ambient_dim, 1, |r, _| h_an.reps.at(r, j).clone());
            let img = syn.gamma_bar(i - 1).mul(&v);
            cols.push(h_q.class_of(&img).expect("cocycle").column(0));
        }
        QMat::from_columns(h_q.dim(), &cols)
    };
    let mut back_cols = Vec::new();
    for j in 0..h_tot.dim() {
        let v = QMat::from_fn(h_tot.ambient_dim, 1, |r, _| h_tot.reps.at(r, j).clone());
        let (_, x, w) = syn.split_vector(i, &v);
        let x_cls = h_an.class_of(&x).expect("x-part of a total cocycle is a cocycle");
        let w_cls = h_q.class_of(&w).expect("w-part is a quotient cocycle");
        let val = w_cls.sub(&gamma_bar_h.mul(&p_inv.mul(&x_cls)));
        back_cols.push(val.column(0));
    }
    let backward = QMat::from_columns(h_q.dim(), &back_cols);

    // round trips: backward ∘ forward = id on H^{i-1}(quot); and
    // forward ∘ backward = id on the F¹ part = all of the image of forward
    let bf = backward.mul(&forward);
    let round1 = bf == QMat::identity(h_q.dim());
    let fb = forward.mul(&backward).mul(&forward);
    let round2 = fb == forward;
    // F⁰H^{i-1} of the syntomic complex vanishes
    let alpha_prev = alpha_on_cohomology(syn, pkg, i - 1);
    let f0_prev_vanishes = alpha_prev.kernel().cols == 0;

    Ok(F1Inverse {
        forward,
        backward_on_f1: backward,
        round_trip_identity: round1 && round2,
        f0_prev_vanishes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::package::{FieldActions, Filtration, Support};
    use crate::linalg::{rat_frac, rat_i};

    /// The point package: both sides one-dimensional in degree 0, Φ = id,
    /// Fil¹ = 0, γ = id.
    pub fn point_package(p: u64) -> GeometricPackage {
        let c = Complex::concentrated(0, 1);
        let phi = ChainMap::new(&c, &c, 0, |_| QMat::identity(1)).unwrap();
        let c_dr = Complex::concentrated(0, 1);
        let gamma = ChainMap::new(&c, &c_dr, 0, |_| QMat::identity(1)).unwrap();
        GeometricPackage {
            p,
            f: 1,
            c_an: c,
            phi,
            monodromy: None,
            c_dr: c_dr.clone(),
            fil: Filtration::trivial(&c_dr),
            gamma,
            d: 0,
            support: Support::Plain,
            actions: FieldActions::default(),
        }
    }

    #[test]
    fn point_package_cohomology() {
        // P = 1 - X/p, r = 1: H⁰ = 0, H¹ one-dimensional
        let pkg = point_package(2);
        let p_poly = QPoly::new(vec![rat_i(1), rat_frac(-1, 2)]);
        let syn = build_syn(&pkg, &p_poly, 1).unwrap();
        let tot = syn.total();
        assert_eq!(tot.betti(0), 0);
        assert_eq!(tot.betti(1), 1);
        assert_eq!(tot.betti(2), 0);
        let dec = f_filtration(&syn, &pkg, 1);
        assert!(dec.exact);
        assert_eq!(dec.f1_dim, 1);
        assert_eq!(dec.f0_dim, 0);
    }

    #[test]
    fn phi_pr_fixed_points() {
        // Φ = p^r id, P = 1 - X/p^r, γ = 0, Fil^r trivial quotient:
        // P(Φ) = 0 so H⁰ and H¹ both pick up one dimension per generator
        let p = 3u64;
        let c = Complex::concentrated(0, 1);
        let phi = ChainMap::new(&c, &c, 0, |_| QMat::from_fn(1, 1, |_, _| rat_i(3))).unwrap();
        let c_dr = Complex::zero();
        let gamma = ChainMap::zero(&c, &c_dr, 0);
        let pkg = GeometricPackage {
            p,
            f: 1,
            c_an: c,
            phi,
            monodromy: None,
            c_dr: c_dr.clone(),
            fil: Filtration::trivial(&c_dr),
            gamma,
            d: 0,
            support: Support::Plain,
            actions: FieldActions::default(),
        };
        let p_poly = QPoly::new(vec![rat_i(1), rat_frac(-1, 3)]);
        let syn = build_syn(&pkg, &p_poly, 1).unwrap();
        let tot = syn.total();
        assert_eq!(tot.betti(0), 1);
        assert_eq!(tot.betti(1), 1);
        let dec0 = f_filtration(&syn, &pkg, 0);
        assert!(dec0.exact);
        assert_eq!(dec0.f0_dim, 1);
        assert_eq!(dec0.f1_dim, 0);
    }

    #[test]
    fn zero_package_vanishes() {
        let c = Complex::zero();
        let phi = ChainMap::zero(&c, &c, 0);
        let gamma = ChainMap::zero(&c, &c, 0);
        let pkg = GeometricPackage {
            p: 2,
            f: 1,
            c_an: c.clone(),
            phi,
            monodromy: None,
            c_dr: c.clone(),
            fil: Filtration::trivial(&c),
            gamma,
            d: 0,
            support: Support::Plain,
            actions: FieldActions::default(),
        };
        let syn = build_syn(&pkg, &QPoly::one(), 1).unwrap();
        let tot = syn.total();
        for q in -1..3 {
            assert_eq!(tot.betti(q), 0);
        }
    }

    #[test]
    fn compare_identity_and_p_one() {
        let pkg = point_package(2);
        let p_poly = QPoly::new(vec![rat_i(1), rat_frac(-1, 2)]);
        let syn = build_syn(&pkg, &p_poly, 1).unwrap();
        // Q = P, s = r: identity morphism
        let (_, m) = compare_prq(&syn, &pkg, &p_poly, 1).unwrap();
        assert!(m.factor.is_one());
        for n in 0..2i64 {
            let mat = m.mat(n).unwrap();
            assert_eq!(*mat, QMat::identity(mat.rows));
        }
        // P = 1: (x,y) ↦ (Q(Φ)x, y)
        let syn_one = build_syn(&pkg, &QPoly::one(), 1).unwrap();
        let (_, m) = compare_prq(&syn_one, &pkg, &p_poly, 1).unwrap();
        assert_eq!(m.factor, p_poly);
    }

    #[test]
    fn composition_over_divisor_chain() {
        // P | PQ | PQR: composite of morphisms equals the direct morphism
        let pkg = point_package(2);
        let p1 = QPoly::new(vec![rat_i(1), rat_i(-2)]);
        let p2 = QPoly::new(vec![rat_i(1), rat_i(-3)]);
        let p3 = QPoly::new(vec![rat_i(1), rat_frac(1, 2)]);
        let q12 = p1.mul(&p2);
        let q123 = q12.mul(&p3);
        let syn1 = build_syn(&pkg, &p1, 2).unwrap();
        let (_, m_12) = compare_prq(&syn1, &pkg, &q12, 1).unwrap();
        let syn12 = build_syn(&pkg, &q12, 1).unwrap();
        let (_, m_123) = compare_prq(&syn12, &pkg, &q123, 0).unwrap();
        let (_, direct) = compare_prq(&syn1, &pkg, &q123, 0).unwrap();
        for n in 0..2i64 {
            let composite = m_123.mat(n).unwrap().mul(m_12.mat(n).unwrap());
            assert_eq!(&composite, direct.mat(n).unwrap());
        }
    }

    #[test]
    fn f1_inverse_point() {
        let pkg = point_package(2);
        let p_poly = QPoly::new(vec![rat_i(1), rat_frac(-1, 2)]);
        let syn = build_syn(&pkg, &p_poly, 1).unwrap();
        let inv = f1_inverse(&syn, &pkg, 1).unwrap();
        assert!(inv.round_trip_identity);
        assert!(inv.f0_prev_vanishes);
        // non-invertible P(Φ) declines: P = 1 - X kills Φ = id
        let p_kill = QPoly::from_i64(&[1, -1]);
        let syn2 = build_syn(&pkg, &p_kill, 1).unwrap();
        assert!(matches!(f1_inverse(&syn2, &pkg, 1), Err(SynError::NotInvertible(_))));
    }
}
