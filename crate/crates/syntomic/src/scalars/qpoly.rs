//! Dense polynomials over the rationals, one and two variables.
//!
//! Coefficients are stored constant term first and kept trimmed, so the
//! degree of the zero polynomial is `None` rather than a fake number.

use crate::linalg::{rat_i, QMat, Rat};
use num::{One, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly {
    coeffs: Vec<Rat>,
}

impl QPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| rat_i(c)).collect())
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() { None } else { Some(self.coeffs.len() - 1) }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    /// Constant term equal to one, the shape `1 + X Q(X)`.
    pub fn has_unit_constant_term(&self) -> bool {
        self.coeff(0).is_one()
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, s: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division; panics when dividing by zero.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let lead_inv = divisor.leading().unwrap().recip();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rat::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() >= dd + 1 {
            let k = rem.len() - 1;
            let factor = &rem[k] * &lead_inv;
            if !factor.is_zero() {
                quot[k - dd] = factor.clone();
                for (j, c) in divisor.coeffs.iter().enumerate() {
                    rem[k - dd + j] -= &factor * c;
                }
            }
            rem.pop();
        }
        (Self::new(quot), Self::new(rem))
    }

    /// Monic gcd (1 for coprime inputs).
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        match a.leading() {
            Some(l) => a.scale(&l.recip()),
            None => a,
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Horner evaluation at a square matrix.
    pub fn eval_mat(&self, m: &QMat) -> QMat {
        assert_eq!(m.rows, m.cols);
        let n = m.rows;
        let mut acc = QMat::zeros(n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(m);
            for i in 0..n {
                let v = acc.at(i, i) + c;
                acc.set(i, i, v);
            }
        }
        acc
    }

    /// `P(cX)`.
    pub fn scale_variable(&self, c: &Rat) -> Self {
        let mut pow = Rat::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|a| {
                let v = a * &pow;
                pow = &pow * c;
                v
            })
            .collect();
        Self::new(coeffs)
    }

    /// `X^deg · P(1/X)`, the reversal with the stated formal degree.
    pub fn reverse(&self, formal_degree: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); formal_degree + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            assert!(k <= formal_degree, "reverse: formal degree too small");
            coeffs[formal_degree - k] = c.clone();
        }
        Self::new(coeffs)
    }

    /// Makes the polynomial monic; panics on zero.
    pub fn monic(&self) -> Self {
        self.scale(&self.leading().expect("monic of zero polynomial").recip())
    }

    /// Companion matrix of a monic polynomial.
    pub fn companion(&self) -> QMat {
        let n = self.degree().expect("companion of zero polynomial");
        assert!(self.leading().unwrap().is_one(), "companion needs a monic polynomial");
        let mut m = QMat::zeros(n, n);
        for i in 1..n {
            m.set(i, i - 1, Rat::one());
        }
        for i in 0..n {
            m.set(i, n - 1, -self.coeff(i).clone());
        }
        m
    }

    /// `P(T^m)`.
    pub fn compose_power(&self, m: usize) -> Self {
        assert!(m >= 1);
        let mut coeffs = vec![Rat::zero(); self.coeffs.len().saturating_sub(1) * m + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs[k * m] = c.clone();
        }
        Self::new(coeffs)
    }

    pub fn pow(&self, mut e: usize) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// Characteristic polynomial by the Faddeev–LeVerrier recursion (valid in
/// characteristic zero), monic of degree `n`.
pub fn charpoly(m: &QMat) -> QPoly {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut coeffs = vec![Rat::zero(); n + 1];
    coeffs[n] = Rat::one();
    let mut aux = QMat::identity(n);
    for k in 1..=n {
        aux = m.mul(&aux);
        let trace: Rat = (0..n).map(|i| aux.at(i, i).clone()).sum();
        let c = -trace / rat_i(k as i64);
        coeffs[n - k] = c.clone();
        for i in 0..n {
            let v = aux.at(i, i) + &c;
            aux.set(i, i, v);
        }
    }
    QPoly::new(coeffs)
}

/// Determinant by Gaussian elimination with pivot-swap sign tracking.
pub fn det(m: &QMat) -> Rat {
    assert_eq!(m.rows, m.cols);
    let n = m.rows;
    let mut a = m.clone();
    let mut sign = Rat::one();
    let mut detv = Rat::one();
    for col in 0..n {
        let pick = (col..n).find(|&r| !a.at(r, col).is_zero());
        let Some(pr) = pick else { return Rat::zero() };
        if pr != col {
            for c in 0..n {
                let x = a.at(col, c).clone();
                let y = a.at(pr, c).clone();
                a.set(col, c, y);
                a.set(pr, c, x);
            }
            sign = -sign;
        }
        let pivot = a.at(col, col).clone();
        detv = detv * &pivot;
        let inv = pivot.recip();
        for r in col + 1..n {
            if a.at(r, col).is_zero() {
                continue;
            }
            let factor = a.at(r, col) * &inv;
            for c in col..n {
                let v = a.at(r, c) - &factor * a.at(col, c);
                a.set(r, c, v);
            }
        }
    }
    sign * detv
}

/// Resultant of two rational polynomials via the Sylvester determinant.
/// `Res(f, g) = lc(f)^{deg g} · ∏ g(α)` over the roots of `f`.
pub fn resultant(f: &QPoly, g: &QPoly) -> Rat {
    let df = match f.degree() {
        None => return Rat::zero(),
        Some(d) => d,
    };
    let dg = match g.degree() {
        None => return Rat::zero(),
        Some(d) => d,
    };
    if df == 0 {
        return f.coeff(0).clone().pow(dg as i32);
    }
    if dg == 0 {
        return g.coeff(0).clone().pow(df as i32);
    }
    let n = df + dg;
    let syl = QMat::from_fn(n, n, |r, c| {
        if r < dg {
            // row of f shifted by r: coefficient of X^{n-1-c} in X^{dg-1-r} f
            let k = (n - 1 - c) as i64 - (dg - 1 - r) as i64;
            if k < 0 { Rat::zero() } else { f.coeff(k as usize) }
        } else {
            let r2 = r - dg;
            let k = (n - 1 - c) as i64 - (df - 1 - r2) as i64;
            if k < 0 { Rat::zero() } else { g.coeff(k as usize) }
        }
    });
    det(&syl)
}

/// Two-variable polynomial with a coefficient grid `c[i][j] · X₁^i X₂^j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QPoly2 {
    /// `grid[i][j]` is the coefficient of `X₁^i X₂^j`; trailing zero rows
    /// and columns are trimmed.
    grid: Vec<Vec<Rat>>,
}

impl QPoly2 {
    pub fn new(mut grid: Vec<Vec<Rat>>) -> Self {
        let width = grid.iter().map(|r| r.len()).max().unwrap_or(0);
        for row in &mut grid {
            row.resize(width, Rat::zero());
        }
        // trim zero columns then zero rows
        let mut w = width;
        while w > 0 && grid.iter().all(|r| r[w - 1].is_zero()) {
            w -= 1;
        }
        for row in &mut grid {
            row.truncate(w);
        }
        while grid.last().map_or(false, |r| r.iter().all(|c| c.is_zero())) {
            grid.pop();
        }
        if grid.iter().all(|r| r.is_empty()) {
            grid.clear();
        }
        QPoly2 { grid }
    }

    pub fn zero() -> Self {
        QPoly2 { grid: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![vec![c]])
    }

    pub fn is_zero(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Rat {
        self.grid.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn deg_x1(&self) -> Option<usize> {
        if self.grid.is_empty() { None } else { Some(self.grid.len() - 1) }
    }

    pub fn deg_x2(&self) -> Option<usize> {
        self.grid.first().map(|r| r.len().checked_sub(1)).flatten()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &Rat)> {
        self.grid
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().map(move |(j, c)| (i, j, c)))
            .filter(|(_, _, c)| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let rows = self.grid.len().max(other.grid.len());
        let cols = self
            .grid
            .first()
            .map_or(0, |r| r.len())
            .max(other.grid.first().map_or(0, |r| r.len()));
        Self::new(
            (0..rows)
                .map(|i| (0..cols).map(|j| self.coeff(i, j) + other.coeff(i, j)).collect())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.grid.iter().map(|r| r.iter().map(|c| -c.clone()).collect()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let rows = self.grid.len() + other.grid.len() - 1;
        let cols = self.grid[0].len() + other.grid[0].len() - 1;
        let mut out = vec![vec![Rat::zero(); cols]; rows];
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in other.terms() {
                out[i1 + i2][j1 + j2] += c1 * c2;
            }
        }
        Self::new(out)
    }

    /// Embeds a one-variable polynomial as a polynomial in `X₁`.
    pub fn from_poly_x1(p: &QPoly) -> Self {
        Self::new(p.coeffs().iter().map(|c| vec![c.clone()]).collect())
    }

    /// Embeds a one-variable polynomial as a polynomial in `X₂`.
    pub fn from_poly_x2(p: &QPoly) -> Self {
        Self::new(vec![p.coeffs().to_vec()])
    }

    /// `T(X₁X₂)` for a one-variable `T`.
    pub fn diagonal_substitution(t: &QPoly) -> Self {
        let mut grid = vec![];
        for (k, c) in t.coeffs().iter().enumerate() {
            let mut row = vec![Rat::zero(); k + 1];
            row[k] = c.clone();
            grid.push(row);
        }
        Self::new(grid)
    }

    pub fn eval(&self, x1: &Rat, x2: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for (i, j, c) in self.terms() {
            acc += c * x1.clone().pow(i as i32) * x2.clone().pow(j as i32);
        }
        acc
    }

    /// Collects the coefficient of `X₂^j` as a polynomial in `X₁`.
    pub fn coeff_of_x2(&self, j: usize) -> QPoly {
        QPoly::new(self.grid.iter().map(|r| r.get(j).cloned().unwrap_or_else(Rat::zero)).collect())
    }

    /// Collects the coefficient of `X₁^i` as a polynomial in `X₂`.
    pub fn coeff_of_x1(&self, i: usize) -> QPoly {
        QPoly::new(self.grid.get(i).cloned().unwrap_or_default())
    }

    /// Division by a polynomial in `X₂` alone, coefficients in `Q[X₁]`.
    pub fn div_rem_x2(&self, divisor: &QPoly) -> (QPoly2, QPoly2) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.leading().unwrap().recip();
        let my_deg = match self.deg_x2() {
            None => return (Self::zero(), Self::zero()),
            Some(d) => d,
        };
        if my_deg < dd {
            return (Self::zero(), self.clone());
        }
        let mut rem = self.clone();
        let mut quot = Self::zero();
        for j in (dd..=my_deg).rev() {
            let cj = rem.coeff_of_x2(j); // in Q[X₁]
            if cj.is_zero() {
                continue;
            }
            let factor = cj.scale(&lead_inv);
            // quot += factor · X₂^{j-dd}
            let mut term = vec![vec![Rat::zero(); j - dd + 1]; factor.coeffs().len()];
            for (i, c) in factor.coeffs().iter().enumerate() {
                term[i][j - dd] = c.clone();
            }
            let term = QPoly2::new(term);
            quot = quot.add(&term);
            rem = rem.sub(&term.mul(&QPoly2::from_poly_x2(divisor)));
        }
        (quot, rem)
    }

    /// Division by a polynomial in `X₁` alone, coefficients in `Q[X₂]`.
    pub fn div_rem_x1(&self, divisor: &QPoly) -> (QPoly2, QPoly2) {
        let (q, r) = self.swap_vars().div_rem_x2(divisor);
        (q.swap_vars(), r.swap_vars())
    }

    pub fn swap_vars(&self) -> Self {
        let rows = self.grid.len();
        let cols = self.grid.first().map_or(0, |r| r.len());
        Self::new((0..cols).map(|j| (0..rows).map(|i| self.coeff(i, j)).collect()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_frac;

    #[test]
    fn div_rem_exact() {
        let a = QPoly::from_i64(&[1, 0, -2, 1]); // 1 - 2x^2 + x^3
        let b = QPoly::from_i64(&[-1, 1]); // x - 1
        let (q, r) = a.div_rem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn gcd_of_common_factor() {
        let f = QPoly::from_i64(&[1, -1]); // 1 - x
        let g = QPoly::from_i64(&[1, -3, 2]); // (1-x)(1-2x)
        let d = f.gcd(&g);
        assert_eq!(d.degree(), Some(1));
    }

    #[test]
    fn charpoly_companion() {
        // monic x^2 - 3x + 2
        let p = QPoly::from_i64(&[2, -3, 1]);
        let c = p.companion();
        assert_eq!(charpoly(&c), p);
    }

    #[test]
    fn resultant_common_root() {
        let f = QPoly::from_i64(&[-2, 1]); // x - 2
        let g = QPoly::from_i64(&[-4, 0, 1]); // x^2 - 4
        assert!(resultant(&f, &g).is_zero());
        let h = QPoly::from_i64(&[1, 1]); // x + 1
        assert!(!resultant(&f, &h).is_zero());
    }

    #[test]
    fn poly2_division() {
        // T = (1 + X₁X₂)(1 - 2X₂) + X₁
        let t = QPoly2::new(vec![
            vec![rat_i(1), rat_i(-2)],
            vec![rat_i(1), rat_i(1), rat_i(-2)],
        ]);
        let d = QPoly::from_i64(&[1, -2]);
        let (q, r) = t.div_rem_x2(&d);
        assert_eq!(q.mul(&QPoly2::from_poly_x2(&d)).add(&r), t);
        assert!(r.deg_x2().map_or(true, |d2| d2 < 1));
    }

    #[test]
    fn scale_variable_matches_eval() {
        let p = QPoly::from_i64(&[1, 2, 3]);
        let c = rat_frac(3, 2);
        let q = p.scale_variable(&c);
        let x = rat_frac(5, 7);
        assert_eq!(q.eval(&x), p.eval(&(c * x)));
    }
}
