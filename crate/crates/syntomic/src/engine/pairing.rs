//! Cup products of syntomic double complexes, trace maps, and the syntomic
//! pairing.
//!
//! The product table, for `u ∈ K^{0,·}` and `(x, y) ∈ K^{1,·}`:
//!   `u₁ ∪ u₂ = u₁ ⊗ u₂`
//!   `u₁ ∪ (x₂,y₂) = (p₂(Φ₁,Φ₂)(u₁⊗x₂), (1-λ)·γ(u₁)⊗y₂)`
//!   `(x₁,y₁) ∪ u₂ = (p₁(Φ₁,Φ₂)(x₁⊗u₂), λ·y₁⊗γ(u₂))`
//!   `(x₁,y₁) ∪ (x₂,y₂) = 0`,
//! where `(p₁, p₂)` is a Bezout splitting of the composed product and
//! `λ` a scalar. The horizontal Leibniz rule in the only nontrivial
//! bidegree is exactly the splitting identity.

use crate::engine::package::GeometricPackage;
use crate::engine::syn::SynComplex;
use crate::homcore::cup::CupFamily;
use crate::linalg::{rat_i, QMat, Rat};
use crate::scalars::ops::BezoutSplitting;
use num::{One, Zero};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PairingError {
    #[error("cochain cup violates the Leibniz rule on the {0} side at ({1},{2})")]
    CupNotLeibniz(&'static str, i64, i64),
    #[error("cup is not Frobenius-compatible at ({0},{1})")]
    NotFrobeniusCompatible(i64, i64),
    #[error("cup does not commute with the comparison maps at ({0},{1})")]
    NotGammaCompatible(i64, i64),
    #[error("filtration multiplicativity Fil^a·Fil^b ⊆ Fil^(a+b) fails at ({0},{1})")]
    NotFiltered(i64, i64),
    #[error("Bezout splitting identity has nonzero residual")]
    SplittingResidual,
    #[error("admissibility certificate missing or negative")]
    NotAdmissible,
    #[error("trace functional does not descend (d or Fil not annihilated)")]
    TraceNotDescending,
    #[error("P(Φ) is not invertible on the top analytic cohomology")]
    TraceNotInvertible,
}

/// Cochain-level bilinear data pairing two packages into a third.
#[derive(Clone, Debug)]
pub struct PairingData {
    /// `(a, b) ↦` matrix `C_an(3)^{a+b} ← C_an(1)^a ⊗ C_an(2)^b`
    pub an_cup: BTreeMap<(i64, i64), QMat>,
    pub dr_cup: BTreeMap<(i64, i64), QMat>,
    pub lambda: Rat,
    pub splitting: BezoutSplitting,
}

impl PairingData {
    pub fn an_cup_at(
        &self,
        p1: &GeometricPackage,
        p2: &GeometricPackage,
        p3: &GeometricPackage,
        a: i64,
        b: i64,
    ) -> QMat {
        self.an_cup.get(&(a, b)).cloned().unwrap_or_else(|| {
            QMat::zeros(p3.c_an.dim(a + b), p1.c_an.dim(a) * p2.c_an.dim(b))
        })
    }

    pub fn dr_cup_at(
        &self,
        p1: &GeometricPackage,
        p2: &GeometricPackage,
        p3: &GeometricPackage,
        a: i64,
        b: i64,
    ) -> QMat {
        self.dr_cup.get(&(a, b)).cloned().unwrap_or_else(|| {
            QMat::zeros(p3.c_dr.dim(a + b), p1.c_dr.dim(a) * p2.c_dr.dim(b))
        })
    }

    /// Validates every invariant: graded Leibniz for both cups, Frobenius
    /// compatibility, the comparison-map square, filtration
    /// multiplicativity, and the splitting identity.
    pub fn validate(
        &self,
        pkg1: &GeometricPackage,
        pkg2: &GeometricPackage,
        pkg3: &GeometricPackage,
        p1_poly: &crate::scalars::qpoly::QPoly,
        p2_poly: &crate::scalars::qpoly::QPoly,
    ) -> Result<(), PairingError> {
        if !self.splitting.verify(p1_poly, p2_poly) {
            return Err(PairingError::SplittingResidual);
        }
        let leib = |c1: &crate::homcore::complex::Complex,
                    c2: &crate::homcore::complex::Complex,
                    c3: &crate::homcore::complex::Complex,
                    cup: &dyn Fn(i64, i64) -> QMat,
                    side: &'static str|
         -> Result<(), PairingError> {
            for a in c1.min_deg()..=c1.max_deg() {
                for b in c2.min_deg()..=c2.max_deg() {
                    let lhs = c3.d(a + b).mul(&cup(a, b));
                    let t1 = cup(a + 1, b).mul(&c1.d(a).kronecker(&QMat::identity(c2.dim(b))));
                    let sgn = rat_i(if a.rem_euclid(2) == 0 { 1 } else { -1 });
                    let t2 = cup(a, b + 1)
                        .mul(&QMat::identity(c1.dim(a)).kronecker(&c2.d(b)))
                        .scale(&sgn);
                    if lhs != t1.add(&t2) {
                        return Err(PairingError::CupNotLeibniz(side, a, b));
                    }
                }
            }
            Ok(())
        };
        leib(
            &pkg1.c_an,
            &pkg2.c_an,
            &pkg3.c_an,
            &|a, b| self.an_cup_at(pkg1, pkg2, pkg3, a, b),
            "analytic",
        )?;
        leib(
            &pkg1.c_dr,
            &pkg2.c_dr,
            &pkg3.c_dr,
            &|a, b| self.dr_cup_at(pkg1, pkg2, pkg3, a, b),
            "de Rham",
        )?;
        // Φ₃(a ∪ b) = Φ₁a ∪ Φ₂b
        for a in pkg1.c_an.min_deg()..=pkg1.c_an.max_deg() {
            for b in pkg2.c_an.min_deg()..=pkg2.c_an.max_deg() {
                let cup = self.an_cup_at(pkg1, pkg2, pkg3, a, b);
                let lhs = pkg3.phi.mat_sized(&pkg3.c_an, &pkg3.c_an, a + b).mul(&cup);
                let rhs = cup.mul(
                    &pkg1
                        .phi
                        .mat_sized(&pkg1.c_an, &pkg1.c_an, a)
                        .kronecker(&pkg2.phi.mat_sized(&pkg2.c_an, &pkg2.c_an, b)),
                );
                if lhs != rhs {
                    return Err(PairingError::NotFrobeniusCompatible(a, b));
                }
                // γ₃(a ∪ b) = γ₁a ∪ γ₂b
                let g3 = pkg3.gamma.mat_sized(&pkg3.c_an, &pkg3.c_dr, a + b);
                let lhs = g3.mul(&cup);
                let rhs = self.dr_cup_at(pkg1, pkg2, pkg3, a, b).mul(
                    &pkg1
                        .gamma
                        .mat_sized(&pkg1.c_an, &pkg1.c_dr, a)
                        .kronecker(&pkg2.gamma.mat_sized(&pkg2.c_an, &pkg2.c_dr, b)),
                );
                if lhs != rhs {
                    return Err(PairingError::NotGammaCompatible(a, b));
                }
            }
        }
        // Fil^a · Fil^b ⊆ Fil^{a+b} (tested over the stored levels)
        let levels: Vec<i64> = {
            let mut ls: Vec<i64> = pkg1
                .fil
                .levels
                .keys()
                .chain(pkg2.fil.levels.keys())
                .copied()
                .collect();
            ls.push(0);
            ls.sort_unstable();
            ls.dedup();
            ls
        };
        for &la in &levels {
            for &lb in &levels {
                for a in pkg1.c_dr.min_deg()..=pkg1.c_dr.max_deg() {
                    for b in pkg2.c_dr.min_deg()..=pkg2.c_dr.max_deg() {
                        let fa = pkg1.fil.basis_at(&pkg1.c_dr, la, a);
                        let fb = pkg2.fil.basis_at(&pkg2.c_dr, lb, b);
                        if fa.cols == 0 || fb.cols == 0 {
                            continue;
                        }
                        let img = self.dr_cup_at(pkg1, pkg2, pkg3, a, b).mul(&fa.kronecker(&fb));
                        let target = pkg3.fil.basis_at(&pkg3.c_dr, la + lb, a + b);
                        if !crate::linalg::span_contained(&img, &target) {
                            return Err(PairingError::NotFiltered(a, b));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Evaluates a two-variable polynomial at the pair of Frobenii through a
/// bilinear analytic cup: `Σ c_{ij} (Φ₁^i x₁) ∪ (Φ₂^j x₂)` as a matrix on
/// the vectorized tensor.
fn poly2_at_phis(
    poly: &crate::scalars::qpoly::QPoly2,
    pd: &PairingData,
    pkg1: &GeometricPackage,
    pkg2: &GeometricPackage,
    pkg3: &GeometricPackage,
    a: i64,
    b: i64,
) -> QMat {
    let cup = pd.an_cup_at(pkg1, pkg2, pkg3, a, b);
    let mut acc = QMat::zeros(cup.rows, cup.cols);
    let phi1 = pkg1.phi.mat_sized(&pkg1.c_an, &pkg1.c_an, a);
    let phi2 = pkg2.phi.mat_sized(&pkg2.c_an, &pkg2.c_an, b);
    let mut pow1 = QMat::identity(phi1.rows);
    for i in 0..=poly.deg_x1().unwrap_or(0) {
        let mut pow2 = QMat::identity(phi2.rows);
        for j in 0..=poly.deg_x2().unwrap_or(0) {
            let c = poly.coeff(i, j);
            if !c.is_zero() {
                acc = acc.add(&cup.mul(&pow1.kronecker(&pow2)).scale(&c));
            }
            pow2 = phi2.mul(&pow2);
        }
        pow1 = phi1.mul(&pow1);
    }
    acc
}

/// Assembles the cup product of syntomic double complexes from the table.
/// The family is returned for the triple `(syn1, syn2, syn3)`; run
/// `leibniz_check` on it to audit the two Leibniz identities.
pub fn syntomic_cup<'a>(
    syn1: &'a SynComplex,
    syn2: &'a SynComplex,
    syn3: &'a SynComplex,
    pkg1: &GeometricPackage,
    pkg2: &GeometricPackage,
    pkg3: &GeometricPackage,
    pd: &PairingData,
) -> CupFamily<'a> {
    let mut maps = BTreeMap::new();
    let one_minus_lambda = Rat::one() - pd.lambda.clone();
    for q1 in syn1.dc.qmin..=syn1.dc.qmax {
        for q2 in syn2.dc.qmin..=syn2.dc.qmax {
            // (0,q1) × (0,q2) → (0, q1+q2): the analytic cup
            maps.insert((0i64, q1, 0i64, q2), pd.an_cup_at(pkg1, pkg2, pkg3, q1, q2));

            // (0,q1) × (1,q2) → (1, q1+q2)
            {
                let a1 = syn1.an.dim(q1);
                let a2 = syn2.an.dim(q2);
                let w2 = syn2.quot.complex.dim(q2);
                let a3 = syn3.an.dim(q1 + q2);
                let w3 = syn3.quot.complex.dim(q1 + q2);
                let mut m = QMat::zeros(a3 + w3, a1 * (a2 + w2));
                // analytic output p₂(Φ₁,Φ₂)(u₁ ⊗ x₂)
                let an_part = poly2_at_phis(&pd.splitting.p2, pd, pkg1, pkg2, pkg3, q1, q2);
                for r in 0..a3 {
                    for i1 in 0..a1 {
                        for j in 0..a2 {
                            let v = an_part.at(r, i1 * a2 + j).clone();
                            if !v.is_zero() {
                                m.set(r, i1 * (a2 + w2) + j, v);
                            }
                        }
                    }
                }
                // de Rham output (1-λ)·π₃(γ₁u₁ ∪ ℓ₂y₂)
                if w3 > 0 && w2 > 0 {
                    let g1 = pkg1.gamma.mat_sized(&pkg1.c_an, &pkg1.c_dr, q1);
                    let l2 = &syn2.quot.complement[(q2 - pkg2.c_dr.min_deg()) as usize];
                    let dr = pd.dr_cup_at(pkg1, pkg2, pkg3, q1, q2).mul(&g1.kronecker(l2));
                    let proj = syn3.quot.project(q1 + q2, &dr).scale(&one_minus_lambda);
                    for r in 0..w3 {
                        for i1 in 0..a1 {
                            for j in 0..w2 {
                                let v = proj.at(r, i1 * w2 + j).clone();
                                if !v.is_zero() {
                                    m.set(a3 + r, i1 * (a2 + w2) + a2 + j, v);
                                }
                            }
                        }
                    }
                }
                maps.insert((0, q1, 1, q2), m);
            }

            // (1,q1) × (0,q2) → (1, q1+q2)
            {
                let a1 = syn1.an.dim(q1);
                let w1 = syn1.quot.complex.dim(q1);
                let a2 = syn2.an.dim(q2);
                let a3 = syn3.an.dim(q1 + q2);
                let w3 = syn3.quot.complex.dim(q1 + q2);
                let mut m = QMat::zeros(a3 + w3, (a1 + w1) * a2);
                let an_part = poly2_at_phis(&pd.splitting.p1, pd, pkg1, pkg2, pkg3, q1, q2);
                for r in 0..a3 {
                    for i1 in 0..a1 {
                        for j in 0..a2 {
                            let v = an_part.at(r, i1 * a2 + j).clone();
                            if !v.is_zero() {
                                m.set(r, i1 * a2 + j, v);
                            }
                        }
                    }
                }
                if w3 > 0 && w1 > 0 {
                    let l1 = &syn1.quot.complement[(q1 - pkg1.c_dr.min_deg()) as usize];
                    let g2 = pkg2.gamma.mat_sized(&pkg2.c_an, &pkg2.c_dr, q2);
                    let dr = pd.dr_cup_at(pkg1, pkg2, pkg3, q1, q2).mul(&l1.kronecker(&g2));
                    let proj = syn3.quot.project(q1 + q2, &dr).scale(&pd.lambda);
                    for r in 0..w3 {
                        for i1 in 0..w1 {
                            for j in 0..a2 {
                                let v = proj.at(r, i1 * a2 + j).clone();
                                if !v.is_zero() {
                                    m.set(a3 + r, (a1 + i1) * a2 + j, v);
                                }
                            }
                        }
                    }
                }
                maps.insert((1, q1, 0, q2), m);
            }
            // (1,·) × (1,·) → column 2: zero by the table; the target has
            // no column 2, so the zero map is forced and omitted.
        }
    }
    CupFamily { k1: &syn1.dc, k2: &syn2.dc, k3: &syn3.dc, maps }
}

/// Trace data on the unit object: a functional on the top-degree de Rham
/// cochains that kills coboundaries and the `r`-th filtration step, plus an
/// admissibility certificate supplied by the caller.
#[derive(Clone, Debug)]
pub struct TraceContext {
    pub top_degree: i64,
    pub tr_dr: QMat,
    pub admissible: bool,
}

impl TraceContext {
    pub fn validate(&self, unit: &GeometricPackage, r: i64) -> Result<(), PairingError> {
        let dr = &unit.c_dr;
        let q = self.top_degree;
        if self.tr_dr.rows != 1 || self.tr_dr.cols != dr.dim(q) {
            return Err(PairingError::TraceNotDescending);
        }
        if !self.tr_dr.mul(&dr.d(q - 1)).is_zero() {
            return Err(PairingError::TraceNotDescending);
        }
        let fil = unit.fil.basis_at(dr, r, q);
        if !self.tr_dr.mul(&fil).is_zero() {
            return Err(PairingError::TraceNotDescending);
        }
        // nonzero on the designated top class
        let h = dr.cohomology(q);
        if h.dim() == 0 || self.tr_dr.mul(&h.reps).is_zero() {
            return Err(PairingError::TraceNotDescending);
        }
        Ok(())
    }
}

/// The trace `Tr_{P,r}` of a class in the top syntomic cohomology of the
/// unit object, computed as `Tr_dR(y - γ(P(Φ)⁻¹x))` on a representative
/// `(x, y)`; requires the admissibility certificate and the invertibility
/// of `P(Φ)` on the top analytic cohomology.
pub fn trace_map(
    syn_unit: &SynComplex,
    unit: &GeometricPackage,
    ctx: &TraceContext,
    class_rep: &QMat,
) -> Result<Rat, PairingError> {
    if !ctx.admissible {
        return Err(PairingError::NotAdmissible);
    }
    let top = ctx.top_degree;
    let n = top + 1;
    let (u, x, w) = syn_unit.split_vector(n, class_rep);
    assert!(u.is_zero(), "top syntomic classes live in the second column");
    let h_an = syn_unit.an.cohomology(top);
    let p_phi_h = syn_unit.p_phi.on_cohomology(&syn_unit.an, &syn_unit.an, top);
    if p_phi_h.rank() != p_phi_h.rows || p_phi_h.kernel().cols != 0 {
        return Err(PairingError::TraceNotInvertible);
    }
    let x_cls = h_an.class_of(&x).map_err(|_| PairingError::TraceNotDescending)?;
    let z_cls = p_phi_h.solve(&x_cls).expect("invertible");
    let z = h_an.rep_of(&z_cls);
    let gamma_z = unit.gamma.mat_sized(&unit.c_an, &unit.c_dr, top).mul(&z);
    let y_lift = syn_unit.quot.lift(top, &w);
    let val = ctx.tr_dr.mul(&y_lift.sub(&gamma_z));
    Ok(val.at(0, 0).clone())
}

/// The syntomic pairing `⟨α, β⟩ = Tr_{P₁∗P₂, r₁+r₂}(α ∪̃ β)` as a matrix of
/// scalars over the chosen bases of `H^i(K₁)` and `H^{n-i}(K₂)`.
pub struct SynPairing {
    pub values: QMat,
}

pub fn syntomic_pairing(
    family: &CupFamily<'_>,
    syn3: &SynComplex,
    unit: &GeometricPackage,
    ctx: &TraceContext,
    i: i64,
) -> Result<SynPairing, PairingError> {
    if !ctx.admissible {
        return Err(PairingError::NotAdmissible);
    }
    let n2 = ctx.top_degree + 1 - i;
    let t1 = family.k1.total_complex().expect("valid");
    let t2 = family.k2.total_complex().expect("valid");
    let h1 = t1.cohomology(i);
    let h2 = t2.cohomology(n2);
    let mut values = QMat::zeros(h1.dim(), h2.dim());
    for a in 0..h1.dim() {
        let x = QMat::from_fn(h1.ambient_dim, 1, |r, _| h1.reps.at(r, a).clone());
        for b in 0..h2.dim() {
            let y = QMat::from_fn(h2.ambient_dim, 1, |r, _| h2.reps.at(r, b).clone());
            let z = family.total_cup(i, &x, n2, &y);
            let v = trace_map(syn3, unit, ctx, &z)?;
            values.set(a, b, v);
        }
    }
    Ok(SynPairing { values })
}

/// Both sides of the compatibility square between the syntomic pairing
/// restricted to `F¹ ⊗ F⁰` and the de Rham pairing through the trace: for a
/// class `a ∈ H^{i-1}(dR₁/Fil^{r₁})` and a cochain-level `F⁰` vector on the
/// second factor (a cocycle killed by `(P(Φ), γ̄)`), the syntomic value
/// `⟨ι(a), β⟩` against `Tr_dR(ℓa ∪_dR γβ)`. The table scales the `F¹⊗F⁰`
/// block by `λ`, so the square is the `λ = 1` normalization of the pairing;
/// callers pass pairing data accordingly.
pub fn duality_square_check(
    family: &CupFamily<'_>,
    syn1: &SynComplex,
    syn2: &SynComplex,
    syn3: &SynComplex,
    pkg1: &GeometricPackage,
    pkg2: &GeometricPackage,
    pkg3: &GeometricPackage,
    pd: &PairingData,
    ctx: &TraceContext,
    i: i64,
) -> Result<bool, PairingError> {
    let n2 = ctx.top_degree + 1 - i;
    let h_q1 = syn1.quot.complex.cohomology(i - 1);
    // cochain-level F⁰ vectors: cocycles of C_an(2)^{n2} killed by both
    // P(Φ) and γ̄
    let stack = syn2
        .p_phi
        .mat_sized(&syn2.an, &syn2.an, n2)
        .vstack(&syn2.gamma_bar(n2))
        .vstack(&syn2.an.d(n2));
    let f0_vectors = stack.kernel();
    for a in 0..h_q1.dim() {
        let w = QMat::from_fn(h_q1.ambient_dim, 1, |r, _| h_q1.reps.at(r, a).clone());
        let ia = syn1.column1_vector(i - 1, &QMat::zeros(syn1.an.dim(i - 1), 1), &w);
        for b in 0..f0_vectors.cols {
            let u2 = QMat::from_fn(f0_vectors.rows, 1, |r, _| f0_vectors.at(r, b).clone());
            let beta = syn2.dc.embed_block(n2, 0, &u2);
            // side one: the syntomic pairing
            let z = family.total_cup(i, &ia, n2, &beta);
            let syn_value = trace_map(syn3, pkg3, ctx, &z)?;
            // side two: de Rham cup through the trace
            let la = syn1.quot.lift(i - 1, &w);
            let g2 = pkg2.gamma.mat_sized(&pkg2.c_an, &pkg2.c_dr, n2).mul(&u2);
            let dr = pd
                .dr_cup_at(pkg1, pkg2, pkg3, i - 1, n2)
                .mul(&la.kronecker(&g2));
            let dr_value = ctx.tr_dr.mul(&dr).at(0, 0).clone();
            if syn_value != dr_value {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::syn::build_syn;
    use crate::engine::synthetic::{random_diagonal_spec, tensor_setup, unit_point_package};
    use crate::linalg::rat_frac;
    use crate::scalars::ops::{bezout_split, bezout_split_alt, is_admissible_q};
    use crate::scalars::qpoly::QPoly;
    use rand::SeedableRng;

    fn simple_polys(p: u64) -> (QPoly, QPoly) {
        // inverse roots away from 1 and p powers
        let p1 = QPoly::new(vec![Rat::one(), -rat_i(2 * p as i64).recip()]);
        let p2 = QPoly::new(vec![Rat::one(), -rat_i(3).recip()]);
        (p1, p2)
    }

    #[test]
    fn table_cup_is_leibniz_on_tensor_setup() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let p = 2u64;
        for _ in 0..5 {
            let spec1 = random_diagonal_spec(&mut rng, p, 1, 2, 2);
            let spec2 = random_diagonal_spec(&mut rng, p, 1, 2, 1);
            let (p1, p2) = simple_polys(p);
            let split = bezout_split(&p1, &p2).unwrap();
            for lambda in [Rat::zero(), Rat::one(), rat_frac(1, 2)] {
                let setup = tensor_setup(
                    p, 0, &spec1, &spec2, &p1, &p2, 2, 1, lambda, split.clone(),
                );
                setup
                    .data
                    .validate(&setup.pkg1, &setup.pkg2, &setup.pkg3, &p1, &p2)
                    .unwrap();
                let (s1, s2, s3) = setup.syn_complexes();
                let fam = syntomic_cup(
                    &s1, &s2, &s3, &setup.pkg1, &setup.pkg2, &setup.pkg3, &setup.data,
                );
                let violations = fam.leibniz_check();
                assert!(violations.is_empty(), "violations: {violations:?}");
                assert!(fam.total_cup_is_chain_map());
            }
        }
    }

    #[test]
    fn deliberately_flipped_sign_fails() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let p = 2u64;
        let spec1 = random_diagonal_spec(&mut rng, p, 1, 2, 2);
        let spec2 = random_diagonal_spec(&mut rng, p, 1, 2, 1);
        let (p1, p2) = simple_polys(p);
        let split = bezout_split(&p1, &p2).unwrap();
        let setup = tensor_setup(p, 0, &spec1, &spec2, &p1, &p2, 2, 1, Rat::zero(), split);
        let (s1, s2, s3) = setup.syn_complexes();
        let mut fam = syntomic_cup(
            &s1, &s2, &s3, &setup.pkg1, &setup.pkg2, &setup.pkg3, &setup.data,
        );
        // flip one nonzero entry's sign
        let key = fam
            .maps
            .iter()
            .find(|(_, m)| !m.is_zero())
            .map(|(k, _)| *k)
            .expect("some nonzero cup entry");
        let flipped = fam.maps[&key].neg();
        fam.maps.insert(key, flipped);
        assert!(!fam.leibniz_check().is_empty());
    }

    #[test]
    fn point_unit_trace_and_pairing() {
        // unit ⊗ unit at a point: H⁰(K₁) ⊗ H¹(K₂) pairs to a nondegenerate
        // 1×1 form; trace kills boundary representatives
        let p = 2u64;
        let (unit, cups) = unit_point_package(p);
        let p1 = QPoly::from_i64(&[1, -1]); // kills Φ = 1 so H⁰ survives
        let p2 = QPoly::new(vec![Rat::one(), -rat_i((p * p) as i64).recip()]);
        let p3 = crate::scalars::ops::composed_product(&p1, &p2).unwrap();
        let split = bezout_split(&p1, &p2).unwrap();
        let data = PairingData {
            an_cup: cups.clone(),
            dr_cup: cups,
            lambda: Rat::zero(),
            splitting: split,
        };
        // r₁ = 0 makes the first factor's quotient vanish, which pins
        // λ = 0: the λ-weighted term would need the missing lift
        let s1 = build_syn(&unit, &p1, 0).unwrap();
        let s2 = build_syn(&unit, &p2, 1).unwrap();
        let s3 = build_syn(&unit, &p3, 1).unwrap();
        data.validate(&unit, &unit, &unit, &p1, &p2).unwrap();
        let fam = syntomic_cup(&s1, &s2, &s3, &unit, &unit, &unit, &data);
        assert!(fam.leibniz_check().is_empty());
        let adm = is_admissible_q(p, 1, &p3, 1, 0, None);
        assert!(adm.admissible);
        let ctx = TraceContext { top_degree: 0, tr_dr: QMat::identity(1), admissible: true };
        ctx.validate(&unit, 1).unwrap();
        let pairing = syntomic_pairing(&fam, &s3, &unit, &ctx, 0).unwrap();
        assert_eq!(pairing.values.rows, 1);
        assert_eq!(pairing.values.cols, 1);
        assert!(!pairing.values.at(0, 0).is_zero());
        // representative independence: boundary perturbations of the rep
        let tot3 = s3.total();
        let h1 = tot3.cohomology(1);
        let rep = QMat::from_fn(h1.ambient_dim, 1, |r, _| h1.reps.at(r, 0).clone());
        let v0 = trace_map(&s3, &unit, &ctx, &rep).unwrap();
        let boundary = tot3.d(0);
        for j in 0..boundary.cols {
            let pert = QMat::from_fn(boundary.rows, 1, |r, _| boundary.at(r, j).clone());
            let v1 = trace_map(&s3, &unit, &ctx, &rep.add(&pert)).unwrap();
            assert_eq!(v0, v1);
        }
        // exact-cancellation representative (x, γP(Φ)⁻¹x) traces to zero
        let phi_top = s3.p_phi.mat_sized(&s3.an, &s3.an, 0);
        let x = QMat::identity(1);
        let inv = phi_top.solve(&x).unwrap();
        let y = s3.quot.project(0, &unit.gamma.mat_sized(&unit.c_an, &unit.c_dr, 0).mul(&inv));
        let vec = s3.column1_vector(0, &x, &y);
        let v = trace_map(&s3, &unit, &ctx, &vec).unwrap();
        assert!(v.is_zero());
    }

    #[test]
    fn duality_square_on_point_units() {
        // F¹ ⊗ F⁰ block of the pairing against the de Rham trace (λ = 1)
        let p = 3u64;
        let (unit, cups) = unit_point_package(p);
        let p1 = QPoly::new(vec![Rat::one(), -rat_i((p * p) as i64).recip()]);
        let p2 = QPoly::from_i64(&[1, -1]);
        let p3 = crate::scalars::ops::composed_product(&p1, &p2).unwrap();
        let split = bezout_split(&p1, &p2).unwrap();
        let data = PairingData {
            an_cup: cups.clone(),
            dr_cup: cups,
            lambda: Rat::one(),
            splitting: split,
        };
        let s1 = build_syn(&unit, &p1, 1).unwrap();
        let s2 = build_syn(&unit, &p2, 0).unwrap();
        let s3 = build_syn(&unit, &p3, 1).unwrap();
        let fam = syntomic_cup(&s1, &s2, &s3, &unit, &unit, &unit, &data);
        assert!(fam.leibniz_check().is_empty(), "{:?}", fam.leibniz_check());
        let ctx = TraceContext { top_degree: 0, tr_dr: QMat::identity(1), admissible: true };
        let ok = duality_square_check(
            &fam, &s1, &s2, &s3, &unit, &unit, &unit, &data, &ctx, 1,
        )
        .unwrap();
        assert!(ok);
        let alt = bezout_split_alt(&p1, &p2).unwrap();
        let _ = alt;
    }
}
