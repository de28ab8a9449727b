//! Composed products, Bezout splittings of them, annihilator polynomials of
//! Frobenius blocks, and the eigenvalue-avoidance admissibility tests.
//!
//! All polynomials here have constant term 1; such a polynomial of degree n
//! factors as `∏ (1 - αᵢ⁻¹ X)` over the algebraic closure and we refer to
//! the `αᵢ` as its inverse roots. Nothing is ever factored: root conditions
//! are decided through resultants and gcds.

use crate::linalg::{rat_i, QMat, Rat};
use crate::scalars::field::{EigenData, K0Field, K0Poly};
use crate::scalars::qpoly::{charpoly, resultant, QPoly, QPoly2};
use num::One;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScalarOpError {
    #[error("polynomial must have constant term 1")]
    NotUnitConstantTerm,
    #[error("Frobenius block {0} is degenerate (non-invertible)")]
    DegenerateFrobenius(usize),
    #[error("Bezout splitting identity failed to verify")]
    SplittingResidual,
}

fn require_unit_ct(p: &QPoly) -> Result<(), ScalarOpError> {
    if p.has_unit_constant_term() { Ok(()) } else { Err(ScalarOpError::NotUnitConstantTerm) }
}

/// Composed product `(P₁∗P₂)(X) = ∏ (1 - α₁α₂ X)` over pairs of inverse
/// roots, computed as the reversed characteristic polynomial of the
/// Kronecker product of the companion matrices.
pub fn composed_product(p1: &QPoly, p2: &QPoly) -> Result<QPoly, ScalarOpError> {
    require_unit_ct(p1)?;
    require_unit_ct(p2)?;
    let n1 = p1.degree().unwrap();
    let n2 = p2.degree().unwrap();
    if n1 == 0 || n2 == 0 {
        return Ok(QPoly::one());
    }
    // reversed polynomials are monic with the inverse roots as their roots
    let c1 = p1.reverse(n1).companion();
    let c2 = p2.reverse(n2).companion();
    let chi = charpoly(&c1.kronecker(&c2));
    Ok(chi.reverse(n1 * n2))
}

/// Composed product through the resultant
/// `∏_{α₁} P₂(X·α₁) = Res_Y(rev P₁, P₂(XY))`, evaluated at enough sample
/// points and interpolated. Must agree with [`composed_product`].
pub fn composed_product_resultant(p1: &QPoly, p2: &QPoly) -> Result<QPoly, ScalarOpError> {
    require_unit_ct(p1)?;
    require_unit_ct(p2)?;
    let n1 = p1.degree().unwrap();
    let n2 = p2.degree().unwrap();
    if n1 == 0 || n2 == 0 {
        return Ok(QPoly::one());
    }
    let rev1 = p1.reverse(n1);
    let deg = n1 * n2;
    let points: Vec<Rat> = (0..=deg as i64).map(rat_i).collect();
    let values: Vec<Rat> = points
        .iter()
        .map(|t| {
            let p2_ty = p2.scale_variable(t);
            resultant(&rev1, &p2_ty)
        })
        .collect();
    Ok(lagrange_interpolate(&points, &values))
}

fn lagrange_interpolate(xs: &[Rat], ys: &[Rat]) -> QPoly {
    let mut acc = QPoly::zero();
    for (i, xi) in xs.iter().enumerate() {
        let mut basis = QPoly::one();
        let mut denom = Rat::one();
        for (j, xj) in xs.iter().enumerate() {
            if i != j {
                basis = basis.mul(&QPoly::new(vec![-xj.clone(), Rat::one()]));
                denom *= xi - xj;
            }
        }
        acc = acc.add(&basis.scale(&(ys[i].clone() / denom)));
    }
    acc
}

/// A Bezout splitting: `(P₁∗P₂)(X₁X₂) = p₁(X₁,X₂)·P₁(X₁) + p₂(X₁,X₂)·P₂(X₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BezoutSplitting {
    pub p1: QPoly2,
    pub p2: QPoly2,
}

impl BezoutSplitting {
    /// Exact check of the splitting identity against the given factors.
    pub fn verify(&self, big_p1: &QPoly, big_p2: &QPoly) -> bool {
        let composed = match composed_product(big_p1, big_p2) {
            Ok(c) => c,
            Err(_) => return false,
        };
        let target = QPoly2::diagonal_substitution(&composed);
        let lhs = self
            .p1
            .mul(&QPoly2::from_poly_x1(big_p1))
            .add(&self.p2.mul(&QPoly2::from_poly_x2(big_p2)));
        lhs == target
    }
}

/// Canonical Bezout splitting, pinned by reducing first along `X₂` modulo
/// `P₂(X₂)` and then dividing exactly by `P₁(X₁)`; the outcome is the unique
/// solution with `deg_{X₂} p₁ < deg P₂`.
pub fn bezout_split(p1: &QPoly, p2: &QPoly) -> Result<BezoutSplitting, ScalarOpError> {
    require_unit_ct(p1)?;
    require_unit_ct(p2)?;
    let composed = composed_product(p1, p2)?;
    let target = QPoly2::diagonal_substitution(&composed);
    let n2 = p2.degree().unwrap();
    let (small1, small2);
    if n2 == 0 {
        small1 = QPoly2::zero();
        small2 = target;
    } else {
        let (q, rho) = target.div_rem_x2(p2);
        let (s1, rem) = rho.div_rem_x1(p1);
        if !rem.is_zero() {
            return Err(ScalarOpError::SplittingResidual);
        }
        small1 = s1;
        small2 = q;
    }
    let out = BezoutSplitting { p1: small1, p2: small2 };
    if !out.verify(p1, p2) {
        return Err(ScalarOpError::SplittingResidual);
    }
    Ok(out)
}

/// The mirror-image canonical splitting (reduce along `X₁` first). Distinct
/// from [`bezout_split`] in general; both satisfy the same identity.
pub fn bezout_split_alt(p1: &QPoly, p2: &QPoly) -> Result<BezoutSplitting, ScalarOpError> {
    require_unit_ct(p1)?;
    require_unit_ct(p2)?;
    let composed = composed_product(p1, p2)?;
    let target = QPoly2::diagonal_substitution(&composed);
    let n1 = p1.degree().unwrap();
    let (small1, small2);
    if n1 == 0 {
        small1 = target;
        small2 = QPoly2::zero();
    } else {
        let (q, rho) = target.div_rem_x1(p1);
        let (s2, rem) = rho.div_rem_x2(p2);
        if !rem.is_zero() {
            return Err(ScalarOpError::SplittingResidual);
        }
        small1 = q;
        small2 = s2;
    }
    let out = BezoutSplitting { p1: small1, p2: small2 };
    if !out.verify(p1, p2) {
        return Err(ScalarOpError::SplittingResidual);
    }
    Ok(out)
}

/// Annihilator polynomial of a family of invertible σ-semilinear blocks:
/// with `M(T)` the product of the characteristic polynomials of the
/// linearizations `Φ^m`, returns `P(T) = M(T^m)/M(0)`, of constant term 1
/// and with `P(Φ) = 0` on every block.
pub fn annihilator_poly(
    field: &K0Field,
    blocks: &[EigenData],
    m: u32,
) -> Result<K0Poly, ScalarOpError> {
    assert!(m >= 1);
    let mut big_m = K0Poly::one(field);
    for (idx, block) in blocks.iter().enumerate() {
        let lin = block.mat.semilinear_power(field, m);
        let chi = lin.charpoly(field);
        if field.is_zero(&chi.coeff(field, 0)) {
            return Err(ScalarOpError::DegenerateFrobenius(idx));
        }
        big_m = big_m.mul(field, &chi);
    }
    let m0 = big_m.coeff(field, 0);
    let inv = field.inv(&m0).expect("constant term checked nonzero");
    Ok(big_m.compose_power(field, m as usize).scale(field, &inv))
}

/// Evaluates `P(Φ)` on a σ-semilinear block and reports whether it vanishes.
/// `P(Φ) = Σ c_k Φ^k` with the coefficients acting by left multiplication.
pub fn annihilates(field: &K0Field, p: &K0Poly, block: &EigenData) -> bool {
    use crate::scalars::field::K0Mat;
    let n = block.mat.rows;
    let mut acc = K0Mat::zeros(field, n, n);
    for (k, c) in p.coeffs.iter().enumerate() {
        let pow = block.mat.semilinear_power(field, k as u32);
        acc = acc.add(field, &pow.scale(field, c));
    }
    (0..n).all(|i| (0..n).all(|j| field.is_zero(acc.at(i, j))))
}

/// Why a pair `(P, r)` fails to be admissible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdmissibilityFailure {
    /// `r < d + 1`.
    TwistTooSmall,
    /// some inverse root satisfies `αᶠ = p^{df}`.
    RootAtWeightD,
    /// some inverse root satisfies `αᶠ = p^{(d+1)f}`.
    RootAtWeightDPlusOne,
    /// some inverse root collides with `λ⁻¹p^{d+1}` for an eigenvalue `λ`
    /// of the degree-one Frobenius.
    RootMeetsH1Eigenvalue,
    /// (sufficient criterion only) some inverse root satisfies
    /// `α^{2f} = p^{(2d+1)f}`.
    RootAtHalfWeight,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub reason: Option<AdmissibilityFailure>,
}

impl Admissibility {
    fn ok() -> Self {
        Admissibility { admissible: true, reason: None }
    }
    fn fail(reason: AdmissibilityFailure) -> Self {
        Admissibility { admissible: false, reason: Some(reason) }
    }
}

/// `X^f - c` over the base field.
fn power_minus_const(field: &K0Field, f: u32, c: Rat) -> K0Poly {
    let mut coeffs = vec![field.zero(); f as usize + 1];
    coeffs[0] = field.from_rat(-c);
    coeffs[f as usize] = field.one();
    K0Poly::new(field, coeffs)
}

fn p_power(p: u64, e: u32) -> Rat {
    rat_i(p as i64).pow(e as i32)
}

fn shares_root(field: &K0Field, p: &K0Poly, q: &K0Poly) -> bool {
    p.gcd(field, q).degree().map_or(false, |d| d > 0)
}

/// Admissibility of `(P, r)` for relative dimension `d` and residue degree
/// `f`: requires `r ≥ d+1` and that no inverse root of `P` hits `p^d ζ`,
/// `p^{d+1} ζ` (`ζ ∈ μ_f`, eliminated by taking `f`-th powers), nor
/// `λ⁻¹p^{d+1}` for an eigenvalue `λ` of the supplied degree-one Frobenius
/// block; the last test is performed on the linearization `Φ^f`.
pub fn is_admissible(
    field: &K0Field,
    p_poly: &K0Poly,
    r: i64,
    d: u32,
    f: u32,
    hk1: Option<&EigenData>,
) -> Admissibility {
    let p = field.p;
    if r < d as i64 + 1 {
        return Admissibility::fail(AdmissibilityFailure::TwistTooSmall);
    }
    // (i) αᶠ = p^{df}
    if shares_root(field, p_poly, &power_minus_const(field, f, p_power(p, d * f))) {
        return Admissibility::fail(AdmissibilityFailure::RootAtWeightD);
    }
    // (ii) αᶠ = p^{(d+1)f}
    if shares_root(field, p_poly, &power_minus_const(field, f, p_power(p, (d + 1) * f))) {
        return Admissibility::fail(AdmissibilityFailure::RootAtWeightDPlusOne);
    }
    // (iii) (p^{d+1}/α)ᶠ an eigenvalue of the linearization of the
    // degree-one Frobenius: common root of P and X^{fm}·h(p^{(d+1)f}/X^f).
    if let Some(block) = hk1 {
        let lin = block.mat.semilinear_power(field, f);
        let h = lin.charpoly(field);
        let m = h.degree().unwrap();
        if m > 0 {
            let c = field.from_rat(p_power(p, (d + 1) * f));
            let mut coeffs = vec![field.zero(); f as usize * m + 1];
            let mut cpow = field.one();
            for j in 0..=m {
                // coefficient of X^{f(m-j)} is h_j · p^{(d+1)f·j}
                coeffs[f as usize * (m - j)] = field.mul(&h.coeff(field, j), &cpow);
                cpow = field.mul(&cpow, &c);
            }
            let hx = K0Poly::new(field, coeffs);
            if shares_root(field, p_poly, &hx) {
                return Admissibility::fail(AdmissibilityFailure::RootMeetsH1Eigenvalue);
            }
        }
    }
    Admissibility::ok()
}

/// The sufficient criterion using only archimedean weights: `r ≥ d+1` and no
/// inverse root of the form `p^d ζ`, `p^{d+1/2} ζ`, `p^{d+1} ζ`.
pub fn weil_admissibility(
    field: &K0Field,
    p_poly: &K0Poly,
    r: i64,
    d: u32,
    f: u32,
) -> Admissibility {
    let p = field.p;
    if r < d as i64 + 1 {
        return Admissibility::fail(AdmissibilityFailure::TwistTooSmall);
    }
    if shares_root(field, p_poly, &power_minus_const(field, f, p_power(p, d * f))) {
        return Admissibility::fail(AdmissibilityFailure::RootAtWeightD);
    }
    if shares_root(field, p_poly, &power_minus_const(field, 2 * f, p_power(p, (2 * d + 1) * f))) {
        return Admissibility::fail(AdmissibilityFailure::RootAtHalfWeight);
    }
    if shares_root(field, p_poly, &power_minus_const(field, f, p_power(p, (d + 1) * f))) {
        return Admissibility::fail(AdmissibilityFailure::RootAtWeightDPlusOne);
    }
    Admissibility::ok()
}

/// Rational-coefficient convenience wrappers used by the engine. Gcds are
/// insensitive to field extension, so testing rational data inside the
/// rational field with the residue degree passed formally is exact.
pub fn is_admissible_q(
    p: u64,
    f: u32,
    p_poly: &QPoly,
    r: i64,
    d: u32,
    hk1: Option<&QMat>,
) -> Admissibility {
    let field = K0Field::new(p, 1).expect("valid prime");
    let kp = K0Poly::from_qpoly(&field, p_poly);
    let block = hk1.map(|m| {
        let km = crate::scalars::field::K0Mat::from_fn(m.rows, m.cols, |i, j| {
            field.from_rat(m.at(i, j).clone())
        });
        EigenData::new(&field, km)
    });
    is_admissible(&field, &kp, r, d, f, block.as_ref())
}

pub fn weil_admissibility_q(p: u64, f: u32, p_poly: &QPoly, r: i64, d: u32) -> Admissibility {
    let field = K0Field::new(p, 1).expect("valid prime");
    let kp = K0Poly::from_qpoly(&field, p_poly);
    weil_admissibility(&field, &kp, r, d, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_frac;
    use crate::scalars::field::K0Mat;
    use num::Zero;

    // Oracle: expand ∏(1 - α₁α₂X) from explicitly known inverse roots.
    fn from_inverse_roots(alphas: &[Rat]) -> QPoly {
        let mut acc = QPoly::one();
        for a in alphas {
            acc = acc.mul(&QPoly::new(vec![Rat::one(), -a.clone()]));
        }
        acc
    }

    #[test]
    fn composed_single_roots_multiply() {
        let p1 = from_inverse_roots(&[rat_i(2)]);
        let p2 = from_inverse_roots(&[rat_i(3)]);
        assert_eq!(composed_product(&p1, &p2).unwrap(), from_inverse_roots(&[rat_i(6)]));
    }

    #[test]
    fn composed_empty_root_set() {
        let p = from_inverse_roots(&[rat_i(2), rat_frac(1, 3)]);
        assert_eq!(composed_product(&QPoly::one(), &p).unwrap(), QPoly::one());
        assert_eq!(composed_product(&p, &QPoly::one()).unwrap(), QPoly::one());
    }

    #[test]
    fn composed_from_factored_inputs() {
        // oracle: enumerate root pairs of the factored inputs and expand
        let p1 = from_inverse_roots(&[rat_i(1), rat_i(2)]);
        let p2 = from_inverse_roots(&[rat_i(3)]);
        let expected = from_inverse_roots(&[rat_i(3), rat_i(6)]);
        assert_eq!(composed_product(&p1, &p2).unwrap(), expected);
        assert_eq!(composed_product_resultant(&p1, &p2).unwrap(), expected);
    }

    #[test]
    fn composed_rejects_bad_constant_term() {
        let bad = QPoly::from_i64(&[2, 1]);
        assert_eq!(
            composed_product(&bad, &QPoly::one()).unwrap_err(),
            ScalarOpError::NotUnitConstantTerm
        );
    }

    #[test]
    fn bezout_rank_one_example() {
        // (1 - aX₁, 1 - bX₂) → p₁ = 1, p₂ = aX₁
        let a = rat_i(5);
        let b = rat_i(7);
        let p1 = QPoly::new(vec![Rat::one(), -a.clone()]);
        let p2 = QPoly::new(vec![Rat::one(), -b]);
        let s = bezout_split(&p1, &p2).unwrap();
        assert_eq!(s.p1, QPoly2::one());
        let expected_p2 = QPoly2::new(vec![vec![Rat::zero()], vec![a]]);
        assert_eq!(s.p2, expected_p2);
    }

    #[test]
    fn bezout_trivial_factor() {
        let p2 = from_inverse_roots(&[rat_i(2), rat_i(5)]);
        let s = bezout_split(&QPoly::one(), &p2).unwrap();
        assert_eq!(s.p1, QPoly2::one());
        assert!(s.p2.is_zero());
    }

    #[test]
    fn bezout_degree_two_pair_verifies() {
        let p1 = from_inverse_roots(&[rat_i(2), rat_frac(1, 2)]);
        let p2 = from_inverse_roots(&[rat_i(-1), rat_i(3)]);
        let s = bezout_split(&p1, &p2).unwrap();
        assert!(s.verify(&p1, &p2));
        let alt = bezout_split_alt(&p1, &p2).unwrap();
        assert!(alt.verify(&p1, &p2));
        assert_ne!(s, alt);
    }

    #[test]
    fn annihilator_single_block() {
        // single 1×1 block (p), m = 1 → 1 - T/p
        let field = K0Field::new(3, 1).unwrap();
        let block = EigenData::new(&field, {
            let mut m = K0Mat::zeros(&field, 1, 1);
            m.set(0, 0, field.from_rat(rat_i(3)));
            m
        });
        let p = annihilator_poly(&field, &[block.clone()], 1).unwrap();
        let expected =
            K0Poly::from_qpoly(&field, &QPoly::new(vec![Rat::one(), rat_frac(-1, 3)]));
        assert_eq!(p, expected);
        assert!(annihilates(&field, &p, &block));
    }

    #[test]
    fn annihilator_empty_and_pair() {
        let field = K0Field::new(3, 1).unwrap();
        assert_eq!(annihilator_poly(&field, &[], 1).unwrap(), K0Poly::one(&field));

        let b1 = EigenData::new(&field, {
            let mut m = K0Mat::zeros(&field, 1, 1);
            m.set(0, 0, field.from_rat(rat_i(3)));
            m
        });
        let b2 = EigenData::new(&field, {
            let mut m = K0Mat::zeros(&field, 1, 1);
            m.set(0, 0, field.one());
            m
        });
        let p = annihilator_poly(&field, &[b1.clone(), b2.clone()], 1).unwrap();
        // (T-3)(T-1)/3 normalized: constant term 1, kills both blocks
        assert!(p.has_unit_constant_term(&field));
        assert!(annihilates(&field, &p, &b1));
        assert!(annihilates(&field, &p, &b2));
        // degenerate block rejected
        let zero_block = EigenData::new(&field, K0Mat::zeros(&field, 1, 1));
        assert_eq!(
            annihilator_poly(&field, &[zero_block], 1).unwrap_err(),
            ScalarOpError::DegenerateFrobenius(0)
        );
    }

    #[test]
    fn admissibility_examples() {
        let p = 2u64;
        // single α = p², d = 0, f = 1, r = 2, no hk1 → admissible
        let poly = QPoly::new(vec![Rat::one(), rat_frac(-1, 4)]); // 1 - X/4
        let v = is_admissible_q(p, 1, &poly, 2, 0, None);
        assert!(v.admissible);
        // α = p^d exactly → (i)
        let poly = QPoly::new(vec![Rat::one(), rat_i(-1)]); // α = 1 = p^0
        let v = is_admissible_q(p, 1, &poly, 2, 0, None);
        assert_eq!(v.reason, Some(AdmissibilityFailure::RootAtWeightD));
        // α = p^{d+1} → (ii)
        let poly = QPoly::new(vec![Rat::one(), rat_frac(-1, 2)]); // α = 2
        let v = is_admissible_q(p, 1, &poly, 2, 0, None);
        assert_eq!(v.reason, Some(AdmissibilityFailure::RootAtWeightDPlusOne));
    }

    #[test]
    fn weil_examples() {
        let p = 2u64;
        let d = 1u32;
        // α = 2·p^{d+1}: admissible at r = d+1
        let alpha = rat_i(2 * 4);
        let poly = QPoly::new(vec![Rat::one(), -alpha.recip()]);
        assert!(weil_admissibility_q(p, 1, &poly, 2, d).admissible);
        // α² = p^{2d+1}: the half-integer case, encoded without factoring
        let poly = QPoly::new(vec![Rat::one(), Rat::zero(), rat_frac(-1, 8)]); // 1 - X²/8
        let v = weil_admissibility_q(p, 1, &poly, 2, d);
        assert_eq!(v.reason, Some(AdmissibilityFailure::RootAtHalfWeight));
        // no roots, r ≥ d+1: vacuously admissible
        assert!(weil_admissibility_q(p, 1, &QPoly::one(), 2, d).admissible);
    }

    #[test]
    fn weil_implies_admissible_with_weil_eigenvalues() {
        // hk1 block with charpoly Y² - p (eigenvalues of norm √p)
        let p = 3u64;
        let field = K0Field::new(p, 1).unwrap();
        let hk1 = QMat::from_rows_i64(&[&[0, 1], &[3, 0]]);
        for (num, den) in [(1i64, 5i64), (7, 1), (5, 9), (18, 1)] {
            let alpha = rat_frac(num, den);
            let poly = QPoly::new(vec![Rat::one(), -alpha.recip()]);
            for d in 0..2u32 {
                let w = weil_admissibility_q(p, 1, &poly, d as i64 + 1, d);
                if w.admissible {
                    let full = is_admissible_q(p, 1, &poly, d as i64 + 1, d, Some(&hk1));
                    assert!(full.admissible, "weil admissible must imply admissible");
                }
            }
        }
        let _ = &field;
    }
}
