//! Abstract geometric packages: a Frobenius-equipped complex, a filtered
//! de Rham-side complex, and a comparison map between them. Everything is
//! flattened to exact rational vector spaces; the σ-semilinearity of the
//! Frobenius and the base-field linearity of the comparison map are checked
//! constraints carried by optional generator-action matrices, not structural
//! types.

use crate::homcore::complex::{cone, ChainMap, Complex, ConeData, HomError};
use crate::linalg::{rat_i, span_basis, span_contained, QMat};
use crate::scalars::qpoly::QPoly;
use thiserror::Error;
use std::collections::BTreeMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PackageError {
    #[error("differential does not square to zero ({0})")]
    BadComplex(String),
    #[error("Frobenius is not a chain map in degree {0}")]
    FrobeniusNotChainMap(i64),
    #[error("monodromy is not a chain map in degree {0}")]
    MonodromyNotChainMap(i64),
    #[error("monodromy relation NΦ = pΦN fails in degree {0}")]
    MonodromyRelation(i64),
    #[error("comparison map is not a chain map in degree {0}")]
    GammaNotChainMap(i64),
    #[error("filtration is not decreasing at level {0}, degree {1}")]
    FiltrationNotDecreasing(i64, i64),
    #[error("filtration is not differential-stable at level {0}, degree {1}")]
    FiltrationNotStable(i64, i64),
    #[error("generator action violates {0} in degree {1}")]
    ActionConstraint(&'static str, i64),
    #[error("monodromy operator is required but absent")]
    NoMonodromy,
    #[error("Verschiebung does not satisfy ΦV = VΦ = p^h in degree {0}")]
    BadVerschiebung(i64),
    #[error(transparent)]
    Hom(#[from] HomError),
}

/// Decreasing filtration by subcomplexes, given by per-degree spanning sets
/// at finitely many levels; below the smallest level it is everything,
/// above the largest it is zero.
#[derive(Clone, Debug)]
pub struct Filtration {
    pub levels: BTreeMap<i64, Vec<QMat>>,
    min_deg: i64,
}

impl Filtration {
    pub fn new(min_deg: i64, levels: BTreeMap<i64, Vec<QMat>>) -> Self {
        Filtration { levels, min_deg }
    }

    /// The trivial filtration `F^r = 0` for `r ≥ 1`, everything below.
    pub fn trivial(c: &Complex) -> Self {
        let mut levels = BTreeMap::new();
        levels.insert(
            1,
            (c.min_deg()..=c.max_deg()).map(|q| QMat::zeros(c.dim(q), 0)).collect::<Vec<_>>(),
        );
        Filtration { levels, min_deg: c.min_deg() }
    }

    /// Basis of `Fil^r` in degree `q` inside the ambient complex `c`.
    pub fn basis_at(&self, c: &Complex, r: i64, q: i64) -> QMat {
        let dim = c.dim(q);
        // the relevant stored level: the largest level ≤ r; above all
        // levels the filtration has run out (zero)
        let mut chosen: Option<&Vec<QMat>> = None;
        for (&lvl, mats) in &self.levels {
            if lvl <= r {
                chosen = Some(mats);
            }
        }
        match chosen {
            None => QMat::identity(dim), // below every stored level: full
            Some(mats) => {
                if r > *self.levels.keys().max().unwrap() {
                    return QMat::zeros(dim, 0);
                }
                let i = q - self.min_deg;
                if i >= 0 && (i as usize) < mats.len() {
                    let m = &mats[i as usize];
                    if m.rows == dim {
                        return m.clone();
                    }
                }
                QMat::zeros(dim, 0)
            }
        }
    }

    pub fn validate(&self, c: &Complex) -> Result<(), PackageError> {
        let lo = self.levels.keys().min().copied().unwrap_or(0) - 1;
        let hi = self.levels.keys().max().copied().unwrap_or(0) + 1;
        for r in lo..=hi {
            for q in c.min_deg()..=c.max_deg() {
                let cur = self.basis_at(c, r, q);
                let next = self.basis_at(c, r + 1, q);
                if !span_contained(&next, &cur) {
                    return Err(PackageError::FiltrationNotDecreasing(r, q));
                }
                let img = c.d(q).mul(&cur);
                let target = self.basis_at(c, r, q + 1);
                if !span_contained(&img, &target) {
                    return Err(PackageError::FiltrationNotStable(r, q));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    Plain,
    Compact,
}

/// Optional generator actions recording the base-field structure on the
/// flattened spaces: `zeta_an` is the action of the field generator on the
/// analytic side, `zeta_dr` on the de Rham side.
#[derive(Clone, Debug, Default)]
pub struct FieldActions {
    pub zeta_an: Option<Vec<QMat>>,
    pub zeta_dr: Option<Vec<QMat>>,
}

/// The abstract input package: `(C_an, Φ, N?)` over the unramified side,
/// `(C_dR, Fil)` over the ramified side, and the comparison map `γ`.
#[derive(Clone, Debug)]
pub struct GeometricPackage {
    pub p: u64,
    pub f: u32,
    pub c_an: Complex,
    pub phi: ChainMap,
    pub monodromy: Option<ChainMap>,
    pub c_dr: Complex,
    pub fil: Filtration,
    pub gamma: ChainMap,
    pub d: u32,
    pub support: Support,
    pub actions: FieldActions,
}

impl GeometricPackage {
    /// Validates every structural invariant. The chain-map conditions are
    /// re-checked here rather than trusted from construction so that parsed
    /// packages go through the same gate.
    pub fn validate(&self) -> Result<(), PackageError> {
        let an = &self.c_an;
        let dr = &self.c_dr;
        for q in an.min_deg() - 1..=an.max_deg() {
            let lhs = self.phi.mat_sized(an, an, q + 1).mul(&an.d(q));
            let rhs = an.d(q).mul(&self.phi.mat_sized(an, an, q));
            if lhs != rhs {
                return Err(PackageError::FrobeniusNotChainMap(q));
            }
            let lg = self.gamma.mat_sized(an, dr, q + 1).mul(&an.d(q));
            let rg = dr.d(q).mul(&self.gamma.mat_sized(an, dr, q));
            if lg != rg {
                return Err(PackageError::GammaNotChainMap(q));
            }
        }
        if let Some(n) = &self.monodromy {
            for q in an.min_deg() - 1..=an.max_deg() {
                let lhs = n.mat_sized(an, an, q + 1).mul(&an.d(q));
                let rhs = an.d(q).mul(&n.mat_sized(an, an, q));
                if lhs != rhs {
                    return Err(PackageError::MonodromyNotChainMap(q));
                }
            }
            for q in an.min_deg()..=an.max_deg() {
                let np = n.mat_sized(an, an, q).mul(&self.phi.mat_sized(an, an, q));
                let pn = self
                    .phi
                    .mat_sized(an, an, q)
                    .mul(&n.mat_sized(an, an, q))
                    .scale(&rat_i(self.p as i64));
                if np != pn {
                    return Err(PackageError::MonodromyRelation(q));
                }
            }
        }
        self.fil.validate(dr)?;
        self.validate_actions()?;
        Ok(())
    }

    /// Semilinearity and base-linearity constraints carried by the optional
    /// generator actions: `Φ∘Z = Z^p∘Φ`, `γ∘Z_an = Z_dr∘γ`, `m(Z) = 0`.
    fn validate_actions(&self) -> Result<(), PackageError> {
        let modulus = if self.f == 1 {
            None
        } else {
            Some(crate::scalars::field::cyclotomic(self.p.pow(self.f) - 1))
        };
        if let Some(zs) = &self.actions.zeta_an {
            for (i, z) in zs.iter().enumerate() {
                let q = self.c_an.min_deg() + i as i64;
                if z.rows != self.c_an.dim(q) || z.cols != self.c_an.dim(q) {
                    return Err(PackageError::ActionConstraint("shape", q));
                }
                if let Some(m) = &modulus {
                    if !m.eval_mat(z).is_zero() {
                        return Err(PackageError::ActionConstraint("modulus", q));
                    }
                }
                // commutes with the differential
                if i + 1 < zs.len() {
                    let lhs = zs[i + 1].mul(&self.c_an.d(q));
                    let rhs = self.c_an.d(q).mul(z);
                    if lhs != rhs {
                        return Err(PackageError::ActionConstraint("chain", q));
                    }
                }
                // σ-semilinearity: Φ Z = Z^p Φ
                let phi = self.phi.mat_sized(&self.c_an, &self.c_an, q);
                let zp = pow_mat_poly(self.p).eval_mat(z);
                if phi.mul(z) != zp.mul(&phi) {
                    return Err(PackageError::ActionConstraint("semilinearity", q));
                }
                // γ is base-linear when the de Rham action is recorded too
                if let Some(zdr) = &self.actions.zeta_dr {
                    let j = (q - self.c_dr.min_deg()) as usize;
                    if let Some(zd) = zdr.get(j) {
                        let g = self.gamma.mat_sized(&self.c_an, &self.c_dr, q);
                        if g.mul(z) != zd.mul(&g) {
                            return Err(PackageError::ActionConstraint("base-linearity", q));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// `P(Φ)` as a chain map on the analytic side.
    pub fn p_of_phi(&self, p_poly: &QPoly) -> ChainMap {
        let an = &self.c_an;
        ChainMap::new(an, an, 0, |q| p_poly.eval_mat(&self.phi.mat_sized(an, an, q)))
            .expect("polynomial in a chain map is a chain map")
    }

    /// Optional non-degeneracy certificate: a Verschiebung `V` with
    /// `ΦV = VΦ = p^h` on every degree.
    pub fn check_verschiebung(&self, v: &ChainMap, h: u32) -> Result<(), PackageError> {
        let an = &self.c_an;
        let ph = rat_i((self.p as i64).pow(h));
        for q in an.min_deg()..=an.max_deg() {
            let phi = self.phi.mat_sized(an, an, q);
            let vm = v.mat_sized(an, an, q);
            let want = QMat::identity(an.dim(q)).scale(&ph);
            if phi.mul(&vm) != want || vm.mul(&phi) != want {
                return Err(PackageError::BadVerschiebung(q));
            }
        }
        Ok(())
    }
}

fn pow_mat_poly(p: u64) -> QPoly {
    // X^p as a polynomial, used to express Z ↦ Z^p
    let mut coeffs = vec![crate::linalg::rat_i(0); p as usize + 1];
    coeffs[p as usize] = crate::linalg::rat_i(1);
    QPoly::new(coeffs)
}

/// The mapping cone of the monodromy operator, its Frobenius `(Φ, pΦ)`,
/// and the structural maps.
pub struct AbsCone {
    pub cone: ConeData,
    pub frobenius: ChainMap,
}

/// Builds the cone of `N` with the twisted Frobenius; the twisted map is a
/// chain map exactly because of the relation `NΦ = pΦN`.
pub fn abs_cone(pkg: &GeometricPackage) -> Result<AbsCone, PackageError> {
    let n = pkg.monodromy.as_ref().ok_or(PackageError::NoMonodromy)?;
    let an = &pkg.c_an;
    let cone_data = cone(n, an, an)?;
    let p = rat_i(pkg.p as i64);
    let frobenius = ChainMap::new(&cone_data.cone, &cone_data.cone, 0, |q| {
        let a = pkg.phi.mat_sized(an, an, q + 1);
        let b = pkg.phi.mat_sized(an, an, q).scale(&p);
        QMat::block_diag(&[&a, &b])
    })
    .map_err(|_| PackageError::MonodromyRelation(0))?;
    Ok(AbsCone { cone: cone_data, frobenius })
}

/// The verified three-term sequence
/// `0 → coker(N on H^{i-1}) → H^{i-1}(Cone N) → ker(N on H^i) → 0`, with
/// Frobenius equivariance where the cokernel part carries `pΦ` (the `(-1)`
/// twist) and the kernel part carries `Φ`.
pub struct HkSequence {
    pub coker_dim: usize,
    pub middle_dim: usize,
    pub ker_dim: usize,
    pub exact: bool,
    pub frobenius_equivariant: bool,
}

pub fn hk_exact_sequence(pkg: &GeometricPackage, i: i64) -> Result<HkSequence, PackageError> {
    let n = pkg.monodromy.as_ref().ok_or(PackageError::NoMonodromy)?;
    let an = &pkg.c_an;
    let data = abs_cone(pkg)?;
    let cone_cx = &data.cone.cone;

    let n_prev = n.on_cohomology(an, an, i - 1);
    let n_here = n.on_cohomology(an, an, i);
    let phi_prev = pkg.phi.on_cohomology(an, an, i - 1);
    let phi_here = pkg.phi.on_cohomology(an, an, i);

    let h_mid = cone_cx.cohomology(i - 1);
    let h_prev = an.cohomology(i - 1);
    let h_here = an.cohomology(i);

    // inclusion: [b] ↦ [(0, b)], defined on cohomology of the previous degree
    let mut inc_cols = Vec::new();
    for j in 0..h_prev.dim() {
        let b = QMat::from_fn(h_prev.ambient_dim, 1, |r, _| h_prev.reps.at(r, j).clone());
        let cocycle = data.cone.include_target.mat_sized(an, cone_cx, i - 1).mul(&b);
        let cls = h_mid.class_of(&cocycle).expect("(0,b) is a cone cocycle");
        inc_cols.push(cls.column(0));
    }
    let inc = QMat::from_columns(h_mid.dim(), &inc_cols);

    // projection: [(a,b)] ↦ [a]
    let mut proj_cols = Vec::new();
    for j in 0..h_mid.dim() {
        let v = QMat::from_fn(h_mid.ambient_dim, 1, |r, _| h_mid.reps.at(r, j).clone());
        let a = data.cone.project_source_shift.mat_sized(cone_cx, an, i - 1).mul(&v);
        let cls = h_here.class_of(&a).expect("source part of a cone cocycle is a cocycle");
        proj_cols.push(cls.column(0));
    }
    let proj = QMat::from_columns(h_here.dim(), &proj_cols);

    // exactness by ranks: image of inc = coker(N) part injects, kernel of
    // proj = that image, image of proj = ker(N on H^i)
    let im_n_prev = span_basis(&n_prev);
    let coker_dim = h_prev.dim() - im_n_prev.cols;
    let ker_n = n_here.kernel();
    let ker_dim = ker_n.cols;
    let middle_dim = h_mid.dim();

    // inc kills exactly im(N): rank of inc restricted
    let inc_on_im = inc.mul(&im_n_prev);
    let inc_rank_total = inc.rank();
    let exact = inc_on_im.is_zero()
        && inc_rank_total == coker_dim
        && middle_dim == coker_dim + ker_dim
        && {
            // im(inc) = ker(proj), im(proj) = ker(N)
            let ker_proj = proj.kernel();
            let im_inc = span_basis(&inc);
            let ok1 = im_inc.cols == ker_proj.cols && span_contained(&im_inc, &ker_proj);
            let im_proj = span_basis(&proj);
            let ok2 =
                im_proj.cols == ker_dim && span_contained(&im_proj, &span_basis(&ker_n));
            ok1 && ok2
        };

    // Frobenius equivariance: inc∘(pΦ) = F∘inc and proj∘F = Φ∘proj
    let f_mid = data.frobenius.on_cohomology(cone_cx, cone_cx, i - 1);
    let p = rat_i(pkg.p as i64);
    let lhs1 = inc.mul(&phi_prev.scale(&p));
    let rhs1 = f_mid.mul(&inc);
    let lhs2 = proj.mul(&f_mid);
    let rhs2 = phi_here.mul(&proj);
    let frobenius_equivariant = lhs1 == rhs1 && lhs2 == rhs2;

    Ok(HkSequence { coker_dim, middle_dim, ker_dim, exact, frobenius_equivariant })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_i;

    fn point_package(p: u64, phi_scalar: i64, n_scalar: Option<i64>) -> GeometricPackage {
        let c = Complex::concentrated(0, 1);
        let phi = ChainMap::new(&c, &c, 0, |_| QMat::from_fn(1, 1, |_, _| rat_i(phi_scalar)))
            .unwrap();
        let monodromy = n_scalar.map(|s| {
            ChainMap::new(&c, &c, 0, |_| QMat::from_fn(1, 1, |_, _| rat_i(s))).unwrap()
        });
        let c_dr = Complex::concentrated(0, 1);
        let gamma = ChainMap::new(&c, &c_dr, 0, |_| QMat::identity(1)).unwrap();
        GeometricPackage {
            p,
            f: 1,
            c_an: c.clone(),
            phi,
            monodromy,
            c_dr: c_dr.clone(),
            fil: Filtration::trivial(&c_dr),
            gamma,
            d: 0,
            support: Support::Plain,
            actions: FieldActions::default(),
        }
    }

    #[test]
    fn monodromy_relation_enforced() {
        // N = nonzero scalar with Φ = scalar: NΦ = pΦN forces (p-1)ΦN = 0
        let pkg = point_package(2, 3, Some(1));
        assert_eq!(pkg.validate().unwrap_err(), PackageError::MonodromyRelation(0));
        let pkg = point_package(2, 3, Some(0));
        pkg.validate().unwrap();
    }

    #[test]
    fn abs_cone_of_zero_monodromy() {
        // N = 0 on a degree-0 point: H^{-1}(abs) ≅ H^0 with Φ, H^0(abs) ≅ H^0 with pΦ
        let pkg = point_package(3, 5, Some(0));
        let data = abs_cone(&pkg).unwrap();
        assert_eq!(data.cone.cone.betti(-1), 1);
        assert_eq!(data.cone.cone.betti(0), 1);
        let f = data.frobenius.on_cohomology(&data.cone.cone, &data.cone.cone, -1);
        assert_eq!(*f.at(0, 0), rat_i(5));
        let f = data.frobenius.on_cohomology(&data.cone.cone, &data.cone.cone, 0);
        assert_eq!(*f.at(0, 0), rat_i(15));
    }

    #[test]
    fn hk_sequence_split_case() {
        // N = 0: dim H^{i-1}(abs) = dim H^{i-1} + dim H^i for every i
        let pkg = point_package(2, 1, Some(0));
        for i in 0..2i64 {
            let seq = hk_exact_sequence(&pkg, i).unwrap();
            assert!(seq.exact);
            assert!(seq.frobenius_equivariant);
            assert_eq!(seq.middle_dim, seq.coker_dim + seq.ker_dim);
            assert_eq!(
                seq.middle_dim,
                pkg.c_an.betti(i - 1) + pkg.c_an.betti(i)
            );
        }
    }

    #[test]
    fn hk_sequence_nilpotent_monodromy() {
        // two-dimensional H with N strictly upper triangular, Φ diag(1, p)
        // satisfies NΦ = pΦN
        let c = Complex::concentrated(0, 2);
        let p = 2u64;
        let phi = ChainMap::new(&c, &c, 0, |_| {
            QMat::from_rows_i64(&[&[1, 0], &[0, 2]])
        })
        .unwrap();
        let n = ChainMap::new(&c, &c, 0, |_| QMat::from_rows_i64(&[&[0, 1], &[0, 0]]))
            .unwrap();
        let c_dr = Complex::concentrated(0, 2);
        let gamma = ChainMap::new(&c, &c_dr, 0, |_| QMat::identity(2)).unwrap();
        let pkg = GeometricPackage {
            p,
            f: 1,
            c_an: c.clone(),
            phi,
            monodromy: Some(n),
            c_dr: c_dr.clone(),
            fil: Filtration::trivial(&c_dr),
            gamma,
            d: 0,
            support: Support::Plain,
            actions: FieldActions::default(),
        };
        pkg.validate().unwrap();
        let seq = hk_exact_sequence(&pkg, 0).unwrap();
        assert!(seq.exact);
        assert!(seq.frobenius_equivariant);
        // coker(N on H^{-1}=0) = 0, ker(N on H^0) = 1-dimensional
        assert_eq!(seq.coker_dim, 0);
        assert_eq!(seq.ker_dim, 1);
    }
}
