//! Truncated p-adic rings `O_{n,r} = O[Z₁…Z_r, T₁…T_r]/(Zᵢⁿ - pTᵢ)` with
//! Frobenius `Zᵢ ↦ Zᵢᵖ` (hence `Tᵢ ↦ p^{p-1}Tᵢᵖ`), and the constructive
//! inversion of `P(Φ)` on the augmentation-ideal part of a free module.
//!
//! Elements are stored with exact field coefficients on canonical monomials
//! (all `Z`-exponents `< n`, total degree `≤ D`); every equality statement
//! is modulo `(p^M, degree > D)`. Keeping the coefficients exact makes the
//! two halves of the inversion argument literal: the finitely many steps on
//! the quotient by `(T)^m` are exact identities, and the geometric series on
//! `(T)^m` terminates because each pass gains a factor of `p`.

use crate::scalars::field::{K0Elt, K0Field, K0Poly};
use rand::Rng;
use thiserror::Error;

use std::collections::BTreeMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PadicError {
    #[error("target does not lie in the augmentation ideal")]
    NotInMaxIdeal,
    #[error("geometric series failed to contract within the precision budget at index {0}")]
    PrecisionExhausted(usize),
    #[error("nilpotency step left the quotient part nonzero")]
    NilpotencyFailed,
    #[error("element has a coefficient outside the working field")]
    BadCoefficient,
}

/// Canonical monomial: `Z` exponents (each `< n`) followed by `T` exponents.
pub type Mono = (Vec<u32>, Vec<u32>);

/// The ring `O_{n,r}` at precision `(p^M, degree ≤ D)`.
#[derive(Clone, Debug)]
pub struct TruncRing {
    pub field: K0Field,
    pub n: u32,
    pub r: usize,
    pub precision: u32,
    pub degree_bound: u32,
}

/// Sparse ring element in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElt {
    terms: BTreeMap<Mono, K0Elt>,
}

impl RingElt {
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &K0Elt)> {
        self.terms.iter()
    }
}

impl TruncRing {
    pub fn new(field: K0Field, n: u32, r: usize, precision: u32, degree_bound: u32) -> Self {
        assert!(n >= 1 && r >= 1);
        TruncRing { field, n, r, precision, degree_bound }
    }

    pub fn p(&self) -> u64 {
        self.field.p
    }

    pub fn zero(&self) -> RingElt {
        RingElt { terms: BTreeMap::new() }
    }

    pub fn one(&self) -> RingElt {
        self.from_coeff(self.field.one())
    }

    pub fn from_coeff(&self, c: K0Elt) -> RingElt {
        let mut e = self.zero();
        self.accumulate(&mut e, (vec![0; self.r], vec![0; self.r]), c);
        e
    }

    pub fn var_z(&self, i: usize) -> RingElt {
        let mut z = vec![0; self.r];
        z[i] = 1;
        let mut e = self.zero();
        self.accumulate(&mut e, (z, vec![0; self.r]), self.field.one());
        e
    }

    pub fn var_t(&self, i: usize) -> RingElt {
        let mut t = vec![0; self.r];
        t[i] = 1;
        let mut e = self.zero();
        self.accumulate(&mut e, (vec![0; self.r], t), self.field.one());
        e
    }

    fn degree(m: &Mono) -> u32 {
        m.0.iter().sum::<u32>() + m.1.iter().sum::<u32>()
    }

    /// T-total degree, the grading of the `(T)^m` submodules.
    pub fn t_degree(m: &Mono) -> u32 {
        m.1.iter().sum::<u32>()
    }

    /// Adds `c · monomial` after carrying `Zᵢⁿ → pTᵢ` and truncating.
    fn accumulate(&self, target: &mut RingElt, mono: Mono, coeff: K0Elt) {
        if self.field.is_zero(&coeff) {
            return;
        }
        let (mut z, mut t) = mono;
        let mut c = coeff;
        for i in 0..self.r {
            let q = z[i] / self.n;
            if q > 0 {
                z[i] %= self.n;
                t[i] += q;
                let pq = self.field.from_rat(crate::linalg::rat_i(self.p() as i64).pow(q as i32));
                c = self.field.mul(&c, &pq);
            }
        }
        let key = (z, t);
        if Self::degree(&key) > self.degree_bound {
            return;
        }
        let entry = self.field.add(target.terms.get(&key).unwrap_or(&self.field.zero()), &c);
        if self.field.is_zero(&entry) {
            target.terms.remove(&key);
        } else {
            target.terms.insert(key, entry);
        }
    }

    pub fn add(&self, a: &RingElt, b: &RingElt) -> RingElt {
        let mut out = a.clone();
        for (m, c) in &b.terms {
            self.accumulate(&mut out, m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, a: &RingElt) -> RingElt {
        RingElt { terms: a.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(c))).collect() }
    }

    pub fn sub(&self, a: &RingElt, b: &RingElt) -> RingElt {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &RingElt, s: &K0Elt) -> RingElt {
        let mut out = self.zero();
        for (m, c) in &a.terms {
            self.accumulate(&mut out, m.clone(), self.field.mul(c, s));
        }
        out
    }

    pub fn mul(&self, a: &RingElt, b: &RingElt) -> RingElt {
        let mut out = self.zero();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let z: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(x, y)| x + y).collect();
                let t: Vec<u32> = ma.1.iter().zip(&mb.1).map(|(x, y)| x + y).collect();
                self.accumulate(&mut out, (z, t), self.field.mul(ca, cb));
            }
        }
        out
    }

    /// The Frobenius endomorphism: `σ` on coefficients, `Zᵢ ↦ Zᵢᵖ`,
    /// `Tᵢ ↦ p^{p-1}Tᵢᵖ`.
    pub fn frobenius(&self, a: &RingElt) -> RingElt {
        let p = self.p() as u32;
        let mut out = self.zero();
        for (m, c) in &a.terms {
            let z: Vec<u32> = m.0.iter().map(|&e| e * p).collect();
            let t: Vec<u32> = m.1.iter().map(|&e| e * p).collect();
            let tsum: u32 = m.1.iter().sum();
            let scale = crate::linalg::rat_i(self.p() as i64).pow(((p - 1) * tsum) as i32);
            let coeff = self.field.mul(&self.field.frobenius(c), &self.field.from_rat(scale));
            self.accumulate(&mut out, (z, t), coeff);
        }
        out
    }

    /// The augmentation `Zᵢ, Tᵢ ↦ 0`.
    pub fn augmentation(&self, a: &RingElt) -> K0Elt {
        a.terms
            .get(&(vec![0; self.r], vec![0; self.r]))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Zero modulo `(p^M, degree > D)`: every coefficient has p-valuation
    /// at least `M`.
    pub fn is_zero_mod(&self, a: &RingElt) -> bool {
        a.terms
            .values()
            .all(|c| self.field.valuation(c).map_or(true, |v| v >= self.precision as i64))
    }

    /// Minimal p-valuation over the coefficients, `None` when exactly zero.
    pub fn min_valuation(&self, a: &RingElt) -> Option<i64> {
        a.terms.values().filter_map(|c| self.field.valuation(c)).min()
    }

    /// All monomials have `T`-degree at least `m`.
    pub fn in_t_power(&self, a: &RingElt, m: u32) -> bool {
        a.terms.keys().all(|k| Self::t_degree(k) >= m)
    }

    /// Exactly zero constant term, the membership test for `𝔪 M`.
    pub fn in_max_ideal(&self, a: &RingElt) -> bool {
        self.field.is_zero(&self.augmentation(a))
    }
}

/// Free module of finite rank with a Frobenius-semilinear operator
/// `Φ₀(v) = A · φ(v)`; semilinearity is structural in this shape.
#[derive(Clone, Debug)]
pub struct TruncPadicModule {
    pub ring: TruncRing,
    pub rank: usize,
    pub phi_matrix: Vec<Vec<RingElt>>,
}

pub type ModElt = Vec<RingElt>;

impl TruncPadicModule {
    pub fn new(ring: TruncRing, rank: usize, phi_matrix: Vec<Vec<RingElt>>) -> Self {
        assert_eq!(phi_matrix.len(), rank);
        for row in &phi_matrix {
            assert_eq!(row.len(), rank);
        }
        TruncPadicModule { ring, rank, phi_matrix }
    }

    pub fn zero_elt(&self) -> ModElt {
        vec![self.ring.zero(); self.rank]
    }

    pub fn add(&self, a: &ModElt, b: &ModElt) -> ModElt {
        a.iter().zip(b).map(|(x, y)| self.ring.add(x, y)).collect()
    }

    pub fn sub(&self, a: &ModElt, b: &ModElt) -> ModElt {
        a.iter().zip(b).map(|(x, y)| self.ring.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &ModElt) -> ModElt {
        a.iter().map(|x| self.ring.neg(x)).collect()
    }

    pub fn apply_phi(&self, v: &ModElt) -> ModElt {
        let fv: Vec<RingElt> = v.iter().map(|x| self.ring.frobenius(x)).collect();
        (0..self.rank)
            .map(|i| {
                let mut acc = self.ring.zero();
                for j in 0..self.rank {
                    acc = self.ring.add(&acc, &self.ring.mul(&self.phi_matrix[i][j], &fv[j]));
                }
                acc
            })
            .collect()
    }

    /// `P(Φ)(v) = Σ c_k Φ^k(v)` with left coefficient action.
    pub fn apply_poly_phi(&self, p: &K0Poly, v: &ModElt) -> ModElt {
        let mut acc = self.zero_elt();
        let mut pow = v.clone();
        for (k, c) in p.coeffs.iter().enumerate() {
            if k > 0 {
                pow = self.apply_phi(&pow);
            }
            let term: ModElt = pow.iter().map(|x| self.ring.scale(x, c)).collect();
            acc = self.add(&acc, &term);
        }
        acc
    }

    /// `Q(Φ)(v)` for `P = 1 + Q`: everything but the identity term.
    fn apply_q_phi(&self, p: &K0Poly, v: &ModElt) -> ModElt {
        let full = self.apply_poly_phi(p, v);
        self.sub(&full, v)
    }

    pub fn is_zero_mod(&self, v: &ModElt) -> bool {
        v.iter().all(|x| self.ring.is_zero_mod(x))
    }

    pub fn in_max_ideal(&self, v: &ModElt) -> bool {
        v.iter().all(|x| self.ring.in_max_ideal(x))
    }

    pub fn in_t_power(&self, v: &ModElt, m: u32) -> bool {
        v.iter().all(|x| self.ring.in_t_power(x, m))
    }

    /// `h` with `p^h Q` integral: the worst denominator valuation of the
    /// nonconstant coefficients.
    pub fn denominator_exponent(&self, p_poly: &K0Poly) -> u32 {
        let mut h = 0i64;
        for c in p_poly.coeffs.iter().skip(1) {
            if let Some(v) = self.ring.field.valuation(c) {
                h = h.max(-v);
            }
        }
        h.max(0) as u32
    }

    /// Solves `P(Φ)(y) ≡ target` on `𝔪M`, following the two-step argument:
    /// the truncated alternating sum `Σ_{i=0}^{2mnr} (-1)^i Q(Φ)^i` handles
    /// the quotient by `(T)^m` exactly, then a geometric series absorbs the
    /// `(T)^m` remainder, contracting by `p` each pass.
    pub fn p_phi_invert(&self, p_poly: &K0Poly, target: &ModElt) -> Result<ModElt, PadicError> {
        if !self.in_max_ideal(target) {
            return Err(PadicError::NotInMaxIdeal);
        }
        assert!(
            p_poly.has_unit_constant_term(&self.ring.field),
            "P must have constant term 1"
        );
        let h = self.denominator_exponent(p_poly);
        let m = h + 1;
        let nilpotency_steps =
            2 * (m as usize) * (self.ring.n as usize) * self.ring.r;
        // quotient part: finite alternating sum
        let mut y = self.zero_elt();
        let mut term = target.clone();
        let mut sign = false;
        for _ in 0..=nilpotency_steps {
            y = if sign { self.sub(&y, &term) } else { self.add(&y, &term) };
            term = self.apply_q_phi(p_poly, &term);
            sign = !sign;
        }
        // the remainder now lies in (T)^m exactly
        let e = self.sub(&self.apply_poly_phi(p_poly, &y), target);
        if !self.in_t_power(&e, m) {
            return Err(PadicError::NilpotencyFailed);
        }
        // geometric series on (T)^m: y₂ = Σ (-1)^i Q(Φ)^i (-e)
        let cap = (self.ring.precision as usize) * (self.ring.degree_bound as usize + 1);
        let mut term = self.neg(&e);
        let mut sign = false;
        let mut i = 0usize;
        loop {
            if self.is_zero_mod(&term) {
                break;
            }
            if i > cap {
                return Err(PadicError::PrecisionExhausted(i));
            }
            y = if sign { self.sub(&y, &term) } else { self.add(&y, &term) };
            term = self.apply_q_phi(p_poly, &term);
            sign = !sign;
            i += 1;
        }
        Ok(y)
    }

    /// Random element of `𝔪M₀` with small integer coefficients.
    pub fn random_max_ideal_elt(&self, rng: &mut impl Rng) -> ModElt {
        let ring = &self.ring;
        (0..self.rank)
            .map(|_| {
                let mut e = ring.zero();
                for _ in 0..4 {
                    let mut z = vec![0u32; ring.r];
                    let mut t = vec![0u32; ring.r];
                    // at least one variable appears
                    let which = rng.gen_range(0..2 * ring.r);
                    if which < ring.r {
                        z[which] = rng.gen_range(1..=ring.n.min(ring.degree_bound).max(1));
                    } else {
                        t[which - ring.r] = rng.gen_range(1..=2.min(ring.degree_bound).max(1));
                    }
                    // sprinkle extra factors
                    if ring.degree_bound > 3 && rng.gen_bool(0.5) {
                        let j = rng.gen_range(0..ring.r);
                        t[j] += 1;
                    }
                    let c = ring.field.from_rat(crate::linalg::rat_i(rng.gen_range(-3..=3)));
                    let mut single = ring.zero();
                    ring.accumulate(&mut single, (z, t), c);
                    e = ring.add(&e, &single);
                }
                e
            })
            .collect()
    }

    /// Round-trip report for the automorphism property of `P(Φ)` on `𝔪M`.
    pub fn verify_automorphism(
        &self,
        p_poly: &K0Poly,
        samples: usize,
        rng: &mut impl Rng,
    ) -> Result<AutomorphismReport, PadicError> {
        let mut max_residual_valuation: Option<i64> = None;
        let mut failures = 0usize;
        for _ in 0..samples {
            let t = self.random_max_ideal_elt(rng);
            let y = self.p_phi_invert(p_poly, &t)?;
            let back = self.apply_poly_phi(p_poly, &y);
            let res1 = self.sub(&back, &t);
            let image = self.apply_poly_phi(p_poly, &t);
            let y2 = self.p_phi_invert(p_poly, &image)?;
            let res2 = self.sub(&y2, &t);
            for res in [res1, res2] {
                if !self.is_zero_mod(&res) {
                    failures += 1;
                    let v = res.iter().filter_map(|x| self.ring.min_valuation(x)).min();
                    max_residual_valuation = match (max_residual_valuation, v) {
                        (None, v) => v,
                        (Some(a), Some(b)) => Some(a.min(b)),
                        (a, None) => a,
                    };
                }
            }
        }
        Ok(AutomorphismReport { samples, failures, max_residual_valuation })
    }
}

#[derive(Debug)]
pub struct AutomorphismReport {
    pub samples: usize,
    pub failures: usize,
    /// minimal p-valuation seen among nonzero residuals (`None` when all
    /// residuals vanish at the working precision)
    pub max_residual_valuation: Option<i64>,
}

impl AutomorphismReport {
    pub fn all_zero(&self) -> bool {
        self.failures == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat_frac, rat_i};
    use crate::scalars::field::K0Field;
    use crate::scalars::qpoly::QPoly;
    use rand::SeedableRng;

    fn ring(p: u64, n: u32, r: usize, prec: u32, deg: u32) -> TruncRing {
        TruncRing::new(K0Field::new(p, 1).unwrap(), n, r, prec, deg)
    }

    fn identity_module(ring: TruncRing, rank: usize) -> TruncPadicModule {
        let mat = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| if i == j { ring.one() } else { ring.zero() })
                    .collect()
            })
            .collect();
        TruncPadicModule::new(ring, rank, mat)
    }

    #[test]
    fn relation_is_frobenius_compatible() {
        // φ(Zᵢⁿ) = p·φ(Tᵢ) identically
        for (p, n, r) in [(2u64, 2u32, 1usize), (3, 1, 2), (2, 3, 2)] {
            let rg = ring(p, n, r, 8, 10);
            for i in 0..r {
                let zn = {
                    let mut acc = rg.one();
                    for _ in 0..n {
                        acc = rg.mul(&acc, &rg.var_z(i));
                    }
                    acc
                };
                let lhs = rg.frobenius(&zn);
                let rhs = rg.scale(
                    &rg.frobenius(&rg.var_t(i)),
                    &rg.field.from_rat(rat_i(p as i64)),
                );
                assert_eq!(lhs, rhs);
                // and Zⁿ reduces to pT on the nose
                assert_eq!(zn, rg.scale(&rg.var_t(i), &rg.field.from_rat(rat_i(p as i64))));
            }
        }
    }

    #[test]
    fn geometric_series_example() {
        // n = r = 1, rank 1, Φ₀ = φ, P = 1 - X, target Z
        let rg = ring(2, 1, 1, 8, 12);
        let module = identity_module(rg.clone(), 1);
        let p_poly = K0Poly::from_qpoly(&rg.field, &QPoly::from_i64(&[1, -1]));
        let target = vec![rg.var_z(0)];
        let y = module.p_phi_invert(&p_poly, &target).unwrap();
        let res = module.sub(&module.apply_poly_phi(&p_poly, &y), &target);
        assert!(module.is_zero_mod(&res));
    }

    #[test]
    fn trivial_cases() {
        let rg = ring(3, 2, 1, 6, 8);
        let module = identity_module(rg.clone(), 1);
        let p_poly = K0Poly::from_qpoly(&rg.field, &QPoly::from_i64(&[1, -1]));
        // target 0 → 0
        let y = module.p_phi_invert(&p_poly, &module.zero_elt()).unwrap();
        assert!(module.is_zero_mod(&y));
        // P = 1 → identity
        let one = K0Poly::from_qpoly(&rg.field, &QPoly::one());
        let target = vec![rg.var_t(0)];
        let y = module.p_phi_invert(&one, &target).unwrap();
        assert_eq!(y, target);
        // precondition: constant term must vanish
        let bad = vec![rg.one()];
        assert_eq!(
            module.p_phi_invert(&p_poly, &bad).unwrap_err(),
            PadicError::NotInMaxIdeal
        );
    }

    #[test]
    fn round_trips_with_denominator() {
        // P = 1 - X/p (h = 1), rank 1
        let rg = ring(2, 2, 1, 8, 10);
        let module = identity_module(rg.clone(), 1);
        let p_poly = K0Poly::new(
            &rg.field,
            vec![rg.field.one(), rg.field.from_rat(rat_frac(-1, 2))],
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let report = module.verify_automorphism(&p_poly, 6, &mut rng).unwrap();
        assert!(report.all_zero(), "{report:?}");
    }

    #[test]
    fn degenerate_tiny_ring() {
        // precision M = 1, degree D = 1: exhaustive over the basis
        let rg = ring(2, 1, 1, 1, 1);
        let module = identity_module(rg.clone(), 1);
        let p_poly = K0Poly::from_qpoly(&rg.field, &QPoly::from_i64(&[1, -1]));
        for base in [rg.var_z(0), rg.var_t(0)] {
            let t = vec![base];
            let y = module.p_phi_invert(&p_poly, &t).unwrap();
            let res = module.sub(&module.apply_poly_phi(&p_poly, &y), &t);
            assert!(module.is_zero_mod(&res));
        }
    }

    #[test]
    fn contraction_inclusion_on_generators() {
        // Q(Φ)((T)^m M₀) ⊆ p (T)^m M₀ for m ≥ h+1
        let rg = ring(2, 2, 2, 8, 8);
        let module = identity_module(rg.clone(), 1);
        // P = 1 - X/p: h = 1, m = 2
        let p_poly = K0Poly::new(
            &rg.field,
            vec![rg.field.one(), rg.field.from_rat(rat_frac(-1, 2))],
        );
        let m = 2u32;
        for i in 0..rg.r {
            // generator Tᵢ^m
            let mut gen = rg.one();
            for _ in 0..m {
                gen = rg.mul(&gen, &rg.var_t(i));
            }
            let out = module.apply_q_phi(&p_poly, &vec![gen]);
            assert!(module.in_t_power(&out, m));
            for x in &out {
                if let Some(v) = rg.min_valuation(x) {
                    assert!(v >= 1, "expected a factor of p, got valuation {v}");
                }
            }
        }
    }

    #[test]
    fn nilpotency_on_quotient() {
        // Q(Φ)^{2mnr+1} lands in (T)^m from the augmentation ideal
        let rg = ring(2, 2, 1, 6, 8);
        let module = identity_module(rg.clone(), 1);
        let p_poly = K0Poly::from_qpoly(&rg.field, &QPoly::from_i64(&[1, -1])); // h = 0, m = 1
        let steps = 2 * 1 * 2 * 1 + 1;
        let mut v = vec![rg.var_z(0)];
        for _ in 0..steps {
            v = module.apply_q_phi(&p_poly, &v);
        }
        assert!(module.in_t_power(&v, 1));
    }

    #[test]
    fn f2_coefficients_smoke() {
        // base field with a genuine Frobenius of order 2
        let field = K0Field::new(2, 2).unwrap();
        let zeta = field.zeta();
        let rg = TruncRing::new(field.clone(), 2, 1, 6, 8);
        let mut phi_entry = rg.one();
        phi_entry = rg.scale(&phi_entry, &zeta);
        let module = TruncPadicModule::new(rg.clone(), 1, vec![vec![phi_entry]]);
        let p_poly = K0Poly::from_qpoly(&field, &QPoly::from_i64(&[1, -1]));
        let target = vec![rg.var_z(0)];
        let y = module.p_phi_invert(&p_poly, &target).unwrap();
        let res = module.sub(&module.apply_poly_phi(&p_poly, &y), &target);
        assert!(module.is_zero_mod(&res), "residual {res:?}");
    }
}
