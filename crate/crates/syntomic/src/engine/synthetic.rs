//! Constructors for small synthetic instances: random packages with genuine
//! differentials, monodromy packages, tensor pairing setups, a curve-like
//! unit object with its trace, and complete Gysin adjunction bundles. Used
//! by the test suites and the command-line demos.

use crate::engine::gysin::{GysinBundle, GysinSide};
use crate::engine::package::{FieldActions, Filtration, GeometricPackage, Support};
use crate::engine::pairing::{syntomic_cup, PairingData, TraceContext};
use crate::engine::syn::{build_syn, SynComplex};
use crate::homcore::complex::{ChainMap, Complex, ShortExact};
use crate::linalg::{rat_i, span_basis, QMat, Rat};
use crate::scalars::ops::{bezout_split, composed_product, BezoutSplitting};
use crate::scalars::qpoly::QPoly;
use num::{One, Zero};
use rand::Rng;
use std::collections::BTreeMap;

fn rand_mat(rng: &mut impl Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> QMat {
    let vals: Vec<i64> = (0..rows * cols).map(|_| rng.gen_range(lo..=hi)).collect();
    QMat::from_fn(rows, cols, |r, c| rat_i(vals[r * cols + c]))
}

/// A random bounded complex with exactly squaring differentials, built by
/// factoring each differential through a complement of the previous image.
pub fn random_complex(rng: &mut impl Rng, min_deg: i64, dims: &[usize]) -> Complex {
    let n = dims.len();
    let mut diffs: Vec<QMat> = Vec::new();
    for q in 0..n.saturating_sub(1) {
        let prev: Option<&QMat> = if q == 0 { None } else { Some(&diffs[q - 1]) };
        let killer = match prev {
            None => QMat::identity(dims[q]),
            Some(d_prev) => {
                // rows spanning a complement of im(d_prev)^⊥… simpler: any
                // map vanishing on im(d_prev): solve via kernel of transpose
                let im = span_basis(d_prev);
                im.transpose().kernel().transpose()
            }
        };
        let r = rand_mat(rng, dims[q + 1], killer.rows, -2, 2);
        diffs.push(r.mul(&killer));
    }
    Complex::new(min_deg, dims.to_vec(), diffs).expect("constructed to square to zero")
}

/// A random chain map of the shape `c·id + d∘h + h∘d` (plus, for direct
/// sums, lower-triangular blocks of the same shape), which is a chain map
/// for free and acts on cohomology by the scalar `c`.
pub fn homotopy_perturbed_scalar(
    rng: &mut impl Rng,
    c: &Rat,
    cx: &Complex,
) -> ChainMap {
    let hs: Vec<QMat> = (cx.min_deg()..=cx.max_deg())
        .map(|q| rand_mat(rng, cx.dim(q - 1), cx.dim(q), -1, 1))
        .collect();
    let h = |q: i64| -> QMat {
        let i = q - cx.min_deg();
        if i >= 0 && (i as usize) < hs.len() {
            hs[i as usize].clone()
        } else {
            QMat::zeros(cx.dim(q - 1), cx.dim(q))
        }
    };
    ChainMap::new(cx, cx, 0, |q| {
        let id = QMat::identity(cx.dim(q)).scale(c);
        id.add(&cx.d(q - 1).mul(&h(q))).add(&h(q + 1).mul(&cx.d(q)))
    })
    .expect("c + dh + hd is always a chain map")
}

/// A random decreasing differential-stable filtration on `c` with levels
/// 1 and 2 (level ≤ 0 is everything, level ≥ 3 is zero).
pub fn random_filtration(rng: &mut impl Rng, c: &Complex) -> Filtration {
    let close_under_d = |gens: Vec<QMat>| -> Vec<QMat> {
        // gens per degree; add d-images until stable
        let mut out = gens;
        for _ in 0..out.len() {
            for i in 0..out.len().saturating_sub(1) {
                let q = c.min_deg() + i as i64;
                let img = c.d(q).mul(&out[i]);
                out[i + 1] = span_basis(&out[i + 1].hstack(&img));
            }
        }
        out
    };
    let n = (c.max_deg() - c.min_deg() + 1) as usize;
    let lvl1: Vec<QMat> = (0..n)
        .map(|i| {
            let dim = c.dim(c.min_deg() + i as i64);
            let k = if dim == 0 { 0 } else { rng.gen_range(0..=dim) };
            rand_mat(rng, dim, k, -2, 2)
        })
        .collect();
    let lvl1 = close_under_d(lvl1);
    // level 2: a sub-selection of level 1 generators, closed again
    let lvl2: Vec<QMat> = lvl1
        .iter()
        .map(|m| {
            let keep: Vec<usize> = (0..m.cols).filter(|_| rng.gen_bool(0.4)).collect();
            m.submatrix_cols(&keep)
        })
        .collect();
    let lvl2 = close_under_d(lvl2);
    let mut levels = BTreeMap::new();
    levels.insert(1, lvl1);
    levels.insert(2, lvl2);
    Filtration::new(c.min_deg(), levels)
}

/// A random package with nonzero differentials: the Frobenius is a direct
/// sum of homotopy-perturbed scalars glued by off-diagonal chain maps, the
/// comparison map embeds the analytic side into a larger de Rham side, and
/// the filtration is a random stable one.
pub fn random_package(rng: &mut impl Rng, p: u64, max_deg: i64, max_dim: usize) -> GeometricPackage {
    let span = (0..=max_deg).map(|_| rng.gen_range(0..=max_dim)).collect::<Vec<_>>();
    let c_an = random_complex(rng, 0, &span);
    let scalars = [rat_i(1), rat_i(p as i64), rat_i((p * p) as i64), rat_i(2)];
    let c = scalars[rng.gen_range(0..scalars.len())].clone();
    let phi = homotopy_perturbed_scalar(rng, &c, &c_an);
    // de Rham side: the analytic side plus a random summand
    let extra_dims: Vec<usize> = (0..=max_deg).map(|_| rng.gen_range(0..=max_dim)).collect();
    let extra = random_complex(rng, 0, &extra_dims);
    let c_dr = c_an.direct_sum(&extra);
    let gcoef = rat_i(rng.gen_range(-2..=2));
    let base = homotopy_perturbed_scalar(rng, &gcoef, &c_an);
    let gamma = ChainMap::new(&c_an, &c_dr, 0, |q| {
        let m = base.mat_sized(&c_an, &c_an, q);
        let mut out = QMat::zeros(c_dr.dim(q), c_an.dim(q));
        for r in 0..m.rows {
            for cc in 0..m.cols {
                out.set(r, cc, m.at(r, cc).clone());
            }
        }
        out
    })
    .expect("inclusion of a chain map is a chain map");
    let fil = random_filtration(rng, &c_dr);
    GeometricPackage {
        p,
        f: 1,
        c_an,
        phi,
        monodromy: None,
        c_dr,
        fil,
        gamma,
        d: 0,
        support: Support::Plain,
        actions: FieldActions::default(),
    }
}

/// A random `(Φ, N)` package with `NΦ = pΦN`: the analytic side is a sum of
/// `m` copies of one random complex, `Φ` acts on the `k`-th copy by
/// `p^k (c + dh + hd)` and `N` is the downward shift.
pub fn random_monodromy_package(rng: &mut impl Rng, p: u64) -> GeometricPackage {
    let dims: Vec<usize> = (0..3).map(|_| rng.gen_range(0..=2)).collect();
    let base = random_complex(rng, 0, &dims);
    let m = rng.gen_range(1..=3usize);
    let mut c_an = Complex::zero();
    for _ in 0..m {
        c_an = c_an.direct_sum(&base);
    }
    let c = rat_i(*[1i64, 2, p as i64].get(rng.gen_range(0..3)).unwrap());
    let block = homotopy_perturbed_scalar(rng, &c, &base);
    let phi = ChainMap::new(&c_an, &c_an, 0, |q| {
        let b = block.mat_sized(&base, &base, q);
        let d = base.dim(q);
        QMat::from_fn(m * d, m * d, |r, cc| {
            let (br, ir) = (r / d, r % d);
            let (bc, ic) = (cc / d, cc % d);
            if br == bc {
                b.at(ir, ic) * rat_i((p as i64).pow(br as u32))
            } else {
                Rat::zero()
            }
        })
    })
    .expect("block scaled chain map");
    let monodromy = ChainMap::new(&c_an, &c_an, 0, |q| {
        let d = base.dim(q);
        QMat::from_fn(m * d, m * d, |r, cc| {
            let (br, ir) = (r / d, r % d);
            let (bc, ic) = (cc / d, cc % d);
            if bc == br + 1 && ir == ic { rat_i(1) } else { Rat::zero() }
        })
    })
    .expect("shift is a chain map");
    let c_dr = c_an.clone();
    let gamma = ChainMap::identity(&c_an);
    GeometricPackage {
        p,
        f: 1,
        c_an: c_an.clone(),
        phi,
        monodromy: Some(monodromy),
        c_dr: c_dr.clone(),
        fil: Filtration::trivial(&c_dr),
        gamma,
        d: 0,
        support: Support::Plain,
        actions: FieldActions::default(),
    }
}

/// Weight data for a diagonal package: one entry per basis vector of each
/// degree, giving the Frobenius eigenvalue exponent-free scalar and the
/// filtration jump.
#[derive(Clone, Debug)]
pub struct DiagonalSpec {
    /// per degree: list of (frobenius scalar, filtration jump weight,
    /// comparison scalar)
    pub degrees: Vec<Vec<(Rat, i64, Rat)>>,
    pub min_deg: i64,
}

/// Builds a zero-differential package whose analytic and de Rham sides have
/// one basis vector per spec entry; `γ` is diagonal; the filtration at level
/// `r` keeps the vectors of jump ≥ r.
pub fn diagonal_package(p: u64, d: u32, spec: &DiagonalSpec) -> GeometricPackage {
    let dims: Vec<usize> = spec.degrees.iter().map(|v| v.len()).collect();
    let n = dims.len();
    let diffs: Vec<QMat> =
        (0..n.saturating_sub(1)).map(|i| QMat::zeros(dims[i + 1], dims[i])).collect();
    let c_an = Complex::new(spec.min_deg, dims.clone(), diffs.clone()).unwrap();
    let c_dr = Complex::new(spec.min_deg, dims.clone(), diffs).unwrap();
    let phi = ChainMap::new(&c_an, &c_an, 0, |q| {
        let i = (q - spec.min_deg) as usize;
        let entries = &spec.degrees[i];
        QMat::from_fn(entries.len(), entries.len(), |r, c| {
            if r == c { entries[r].0.clone() } else { Rat::zero() }
        })
    })
    .unwrap();
    let gamma = ChainMap::new(&c_an, &c_dr, 0, |q| {
        let i = (q - spec.min_deg) as usize;
        let entries = &spec.degrees[i];
        QMat::from_fn(entries.len(), entries.len(), |r, c| {
            if r == c { entries[r].2.clone() } else { Rat::zero() }
        })
    })
    .unwrap();
    // filtration levels from the jumps
    let max_jump = spec
        .degrees
        .iter()
        .flat_map(|v| v.iter().map(|e| e.1))
        .max()
        .unwrap_or(0);
    let mut levels = BTreeMap::new();
    for r in 1..=(max_jump + 1) {
        let mats: Vec<QMat> = spec
            .degrees
            .iter()
            .map(|entries| {
                let keep: Vec<usize> =
                    (0..entries.len()).filter(|&k| entries[k].1 >= r).collect();
                QMat::identity(entries.len()).submatrix_cols(&keep)
            })
            .collect();
        levels.insert(r, mats);
    }
    GeometricPackage {
        p,
        f: 1,
        c_an,
        phi,
        monodromy: None,
        c_dr: c_dr.clone(),
        fil: Filtration::new(spec.min_deg, levels),
        gamma,
        d,
        support: Support::Plain,
        actions: FieldActions::default(),
    }
}

/// The tensor product of two diagonal packages, with the canonical cups
/// (the identity on tensor coordinates) as pairing data.
pub struct TensorSetup {
    pub pkg1: GeometricPackage,
    pub pkg2: GeometricPackage,
    pub pkg3: GeometricPackage,
    pub p1: QPoly,
    pub p2: QPoly,
    pub r1: i64,
    pub r2: i64,
    pub data: PairingData,
}

impl TensorSetup {
    pub fn syn_complexes(&self) -> (SynComplex, SynComplex, SynComplex) {
        let p3 = composed_product(&self.p1, &self.p2).expect("unit constant terms");
        let s1 = build_syn(&self.pkg1, &self.p1, self.r1).expect("valid");
        let s2 = build_syn(&self.pkg2, &self.p2, self.r2).expect("valid");
        let s3 = build_syn(&self.pkg3, &p3, self.r1 + self.r2).expect("valid");
        (s1, s2, s3)
    }
}

/// Builds the tensor setup of two diagonal packages. The third package has
/// `C(3)^q = ⊕_{a+b=q} C(1)^a ⊗ C(2)^b`, Frobenius and comparison maps the
/// tensor ones, filtration jumps added; the cups are the tautological
/// inclusions of tensor coordinates.
pub fn tensor_setup(
    p: u64,
    d3: u32,
    spec1: &DiagonalSpec,
    spec2: &DiagonalSpec,
    p1: &QPoly,
    p2: &QPoly,
    r1: i64,
    r2: i64,
    lambda: Rat,
    splitting: BezoutSplitting,
) -> TensorSetup {
    let pkg1 = diagonal_package(p, 0, spec1);
    let pkg2 = diagonal_package(p, 0, spec2);
    // entries of the tensor package, grouped by total degree
    let min3 = spec1.min_deg + spec2.min_deg;
    let max1 = spec1.min_deg + spec1.degrees.len() as i64 - 1;
    let max2 = spec2.min_deg + spec2.degrees.len() as i64 - 1;
    let max3 = max1 + max2;
    let mut degrees3: Vec<Vec<(Rat, i64, Rat)>> = vec![vec![]; (max3 - min3 + 1) as usize];
    // remember the coordinate offsets: for degree q, pairs (a, i, j)
    let mut layout: BTreeMap<(i64, usize, usize), usize> = BTreeMap::new();
    for a in spec1.min_deg..=max1 {
        for b in spec2.min_deg..=max2 {
            let e1 = &spec1.degrees[(a - spec1.min_deg) as usize];
            let e2 = &spec2.degrees[(b - spec2.min_deg) as usize];
            for (i, x) in e1.iter().enumerate() {
                for (j, y) in e2.iter().enumerate() {
                    let q = a + b;
                    let idx = degrees3[(q - min3) as usize].len();
                    degrees3[(q - min3) as usize].push((
                        x.0.clone() * y.0.clone(),
                        x.1 + y.1,
                        x.2.clone() * y.2.clone(),
                    ));
                    layout.insert((a, i, j), idx + 0);
                    // a identifies the (a, b) block since b = q - a; to keep
                    // keys unique across blocks of the same q we fold b in
                    // through the running index, which `push` already does
                    let _ = idx;
                }
            }
        }
    }
    let spec3 = DiagonalSpec { degrees: degrees3, min_deg: min3 };
    let pkg3 = diagonal_package(p, d3, &spec3);
    // cups: C(1)^a ⊗ C(2)^b → C(3)^{a+b} placing tensor coordinates at
    // their block offsets
    let mut an_cup = BTreeMap::new();
    for a in spec1.min_deg..=max1 {
        for b in spec2.min_deg..=max2 {
            let d1 = spec1.degrees[(a - spec1.min_deg) as usize].len();
            let d2 = spec2.degrees[(b - spec2.min_deg) as usize].len();
            let q = a + b;
            let d3dim = spec3.degrees[(q - min3) as usize].len();
            if d1 == 0 || d2 == 0 {
                continue;
            }
            // offset of block (a, b) inside degree q: blocks ordered by a
            let mut off = 0usize;
            for a2 in spec1.min_deg..a {
                let b2 = q - a2;
                if b2 >= spec2.min_deg && b2 <= max2 {
                    off += spec1.degrees[(a2 - spec1.min_deg) as usize].len()
                        * spec2.degrees[(b2 - spec2.min_deg) as usize].len();
                }
            }
            let m = QMat::from_fn(d3dim, d1 * d2, |r, c| {
                if r >= off && r - off == c { rat_i(1) } else { Rat::zero() }
            });
            an_cup.insert((a, b), m);
        }
    }
    let dr_cup = an_cup.clone();
    let data = PairingData { an_cup, dr_cup, lambda, splitting };
    TensorSetup { pkg1, pkg2, pkg3, p1: p1.clone(), p2: p2.clone(), r1, r2, data }
}

/// Random diagonal spec at a point (degrees 0..=span). The comparison-map
/// scalar is zeroed on entries whose filtration jump reaches
/// `gamma_kill_at`, keeping the image of `γ` transverse to `Fil^r` — the
/// condition that makes the table cup exactly Leibniz and the page pairings
/// independent of the splitting data.
pub fn random_diagonal_spec(
    rng: &mut impl Rng,
    p: u64,
    span: usize,
    max_dim: usize,
    gamma_kill_at: i64,
) -> DiagonalSpec {
    let choices = [
        rat_i(1),
        rat_i(p as i64),
        rat_i(2),
        rat_i(-1),
        Rat::one() / rat_i(p as i64),
    ];
    let degrees = (0..=span)
        .map(|_| {
            (0..rng.gen_range(1..=max_dim))
                .map(|_| {
                    let phi = choices[rng.gen_range(0..choices.len())].clone();
                    let jump = rng.gen_range(0..=2i64);
                    let g = if jump >= gamma_kill_at {
                        Rat::zero()
                    } else {
                        rat_i(rng.gen_range(-2..=2))
                    };
                    (phi, jump, g)
                })
                .collect()
        })
        .collect();
    DiagonalSpec { degrees, min_deg: 0 }
}

/// A random constant-term-one polynomial whose inverse roots are drawn from
/// small rationals (possibly scaled by `p`).
pub fn random_unit_poly(rng: &mut impl Rng, p: u64, max_deg: usize) -> QPoly {
    let deg = rng.gen_range(0..=max_deg);
    let mut acc = QPoly::one();
    for _ in 0..deg {
        let base = [rat_i(2), rat_i(3), rat_i(p as i64), rat_i(-2), rat_i((p * p) as i64)];
        let alpha = base[rng.gen_range(0..base.len())].clone();
        acc = acc.mul(&QPoly::new(vec![Rat::one(), -alpha.recip()]));
    }
    acc
}

/// The curve-like unit package: degrees 0, 1, 2 of dimensions 1, 2, 1 with
/// Frobenius `1`, `[[0,1],[p,0]]`, `p`, zero differentials, identity
/// comparison map, filtration jumps 0, 1, 2.
pub fn unit_curve_package(p: u64) -> (GeometricPackage, BTreeMap<(i64, i64), QMat>) {
    let dims = vec![1usize, 2, 1];
    let diffs = vec![QMat::zeros(2, 1), QMat::zeros(1, 2)];
    let c_an = Complex::new(0, dims.clone(), diffs.clone()).unwrap();
    let c_dr = Complex::new(0, dims.clone(), diffs).unwrap();
    let phi = ChainMap::new(&c_an, &c_an, 0, |q| match q {
        0 => QMat::identity(1),
        1 => QMat::from_rows_i64(&[&[0, 1], &[p as i64, 0]]),
        2 => QMat::from_fn(1, 1, |_, _| rat_i(p as i64)),
        _ => QMat::zeros(0, 0),
    })
    .unwrap();
    let gamma = ChainMap::identity(&c_an);
    let gamma = ChainMap::new(&c_an, &c_dr, 0, |q| gamma.mat_sized(&c_an, &c_an, q)).unwrap();
    let mut levels = BTreeMap::new();
    levels.insert(1, vec![QMat::zeros(1, 0), QMat::identity(2), QMat::identity(1)]);
    levels.insert(2, vec![QMat::zeros(1, 0), QMat::zeros(2, 0), QMat::identity(1)]);
    let pkg = GeometricPackage {
        p,
        f: 1,
        c_an: c_an.clone(),
        phi,
        monodromy: None,
        c_dr,
        fil: Filtration::new(0, levels),
        gamma,
        d: 1,
        support: Support::Plain,
        actions: FieldActions::default(),
    };
    // multiplication table: c_{0,q} and c_{q,0} identities,
    // c_{1,1}(x⊗y) = p·x₁y₁ + x₂y₂ (Frobenius-equivariant pairing into H²)
    let mut cups = BTreeMap::new();
    cups.insert((0i64, 0i64), QMat::identity(1));
    cups.insert((0, 1), QMat::identity(2));
    cups.insert((1, 0), QMat::identity(2));
    cups.insert((0, 2), QMat::identity(1));
    cups.insert((2, 0), QMat::identity(1));
    cups.insert(
        (1, 1),
        QMat::from_fn(1, 4, |_, c| match c {
            0 => rat_i(p as i64),
            3 => rat_i(1),
            _ => Rat::zero(),
        }),
    );
    (pkg, cups)
}

/// The point unit object: one-dimensional everything in degree 0.
pub fn unit_point_package(p: u64) -> (GeometricPackage, BTreeMap<(i64, i64), QMat>) {
    let spec = DiagonalSpec {
        degrees: vec![vec![(Rat::one(), 0, Rat::one())]],
        min_deg: 0,
    };
    let pkg = diagonal_package(p, 0, &spec);
    let mut cups = BTreeMap::new();
    cups.insert((0i64, 0i64), QMat::identity(1));
    (pkg, cups)
}

/// Assembles the full Gysin adjunction bundle over the curve-like unit with
/// residue twist `eta`: both factors are the unit object, `P₁`, `P₂` have a
/// single inverse root each, and every compatibility is validated by the
/// callers through the standard checkers.
pub fn gysin_bundle(p: u64, eta: i64, alpha1: i64, alpha2: i64) -> GysinBundle {
    let (unit, unit_cups) = unit_curve_package(p);
    // the face unit: a point
    let (unit_face, face_cups) = unit_point_package(p);
    let eta_r = rat_i(eta);

    // extension package: C'^q = C^q ⊕ C_F^{q-1}, twist h: C_F^0 → C^2
    let ext_package = |twist: &Rat| -> GeometricPackage {
        let dims = vec![1usize, 3, 1];
        let mut d1 = QMat::zeros(3, 1);
        let _ = &mut d1;
        let d12 = {
            let mut m = QMat::zeros(1, 3);
            m.set(0, 2, twist.clone());
            m
        };
        let c_an = Complex::new(0, dims.clone(), vec![QMat::zeros(3, 1), d12.clone()]).unwrap();
        let c_dr = Complex::new(0, dims.clone(), vec![QMat::zeros(3, 1), d12]).unwrap();
        let phi = ChainMap::new(&c_an, &c_an, 0, |q| match q {
            0 => QMat::identity(1),
            1 => {
                // diag(Φ₁ on the X-part, p·1 on the F-part)
                let mut m = QMat::zeros(3, 3);
                m.set(0, 1, rat_i(1));
                m.set(1, 0, rat_i(p as i64));
                m.set(2, 2, rat_i(p as i64));
                m
            }
            2 => QMat::from_fn(1, 1, |_, _| rat_i(p as i64)),
            _ => QMat::zeros(0, 0),
        })
        .expect("twist intertwines the Frobenii");
        let gamma = ChainMap::new(&c_an, &c_dr, 0, |q| QMat::identity(c_an.dim(q))).unwrap();
        // Fil'^r = Fil^r(X) ⊕ Fil^{r-1}(F): jumps X: (0; 1,1; 2), F-part at
        // slot 1 has jump 0+1 = 1 in the primed numbering
        let mut levels = BTreeMap::new();
        levels.insert(
            1,
            vec![QMat::zeros(1, 0), QMat::identity(3), QMat::identity(1)],
        );
        levels.insert(
            2,
            vec![QMat::zeros(1, 0), QMat::zeros(3, 0), QMat::identity(1)],
        );
        GeometricPackage {
            p,
            f: 1,
            c_an: c_an.clone(),
            phi,
            monodromy: None,
            c_dr,
            fil: Filtration::new(0, levels),
            gamma,
            d: 1,
            support: Support::Plain,
            actions: FieldActions::default(),
        }
    };

    let p1 = QPoly::new(vec![Rat::one(), -rat_i(alpha1).recip()]);
    let p2 = QPoly::new(vec![Rat::one(), -rat_i(alpha2).recip()]);
    let p3 = composed_product(&p1, &p2).unwrap();
    let p1_face = p1.scale_variable(&rat_i(p as i64));
    let p3_face = p3.scale_variable(&rat_i(p as i64));
    let (r1, r2) = (2i64, 1i64);
    let r3 = r1 + r2;

    let e_primed = ext_package(&eta_r);
    let u_primed = ext_package(&eta_r);

    let syn1_inner = build_syn(&unit, &p1, r1).unwrap();
    let syn1_primed = build_syn(&e_primed, &p1, r1).unwrap();
    let syn1_face = build_syn(&unit_face, &p1_face, r1 - 1).unwrap();
    let syn2 = build_syn(&unit, &p2, r2).unwrap();
    let syn2_primed = build_syn(&e_primed, &p2, r2).unwrap();
    let syn2_face = build_syn(&unit_face, &p2, r2).unwrap();
    let syn_u = build_syn(&unit, &p3, r3).unwrap();
    let syn_u_primed = build_syn(&u_primed, &p3, r3).unwrap();
    let syn_u_face = build_syn(&unit_face, &p3_face, r3 - 1).unwrap();

    let ses1 = residue_ses(&syn1_inner, &syn1_primed, &syn1_face);
    let ses_u = residue_ses(&syn_u, &syn_u_primed, &syn_u_face);

    // restriction ι*: degree-0 identity, everything else to zero
    let tot2 = syn2.total();
    let tot2f = syn2_face.total();
    let iota_min = tot2.min_deg().min(tot2f.min_deg());
    let iota: Vec<QMat> = (iota_min..=tot2.max_deg())
        .map(|n| {
            let mut m = QMat::zeros(tot2f.dim(n), tot2.dim(n));
            // block (0, n): C^n → C_F^n nonzero only at n = 0;
            // block (1, n-1): (C ⊕ W) → (C_F ⊕ W_F) at n-1 = 0
            if n == 0 && m.rows > 0 && m.cols > 0 {
                m.set(0, 0, rat_i(1));
            }
            if n == 1 {
                let off2 = syn2.dc.block_offset(1, 1);
                let off2f = syn2_face.dc.block_offset(1, 1);
                // x-part restriction at degree 0
                if syn2_face.dc.dim(1, 0) > 0 && syn2.dc.dim(1, 0) > 0 {
                    m.set(off2f, off2, rat_i(1));
                    // W-parts: unit has W^0 of dim 1 (jump 0 < r2), face too
                    let w2 = syn2.quot.complex.dim(0);
                    let w2f = syn2_face.quot.complex.dim(0);
                    if w2 > 0 && w2f > 0 {
                        m.set(off2f + 1, off2 + syn2.an.dim(0), rat_i(1));
                    }
                }
            }
            m
        })
        .collect();

    // inclusion of syn2 into syn2_primed: X-coordinates into the extension
    let tot2p = syn2_primed.total();
    let inj2_min = tot2.min_deg();
    let inj2: Vec<QMat> = (inj2_min..=tot2.max_deg())
        .map(|n| inclusion_matrix(&syn2, &syn2_primed, n, &tot2, &tot2p))
        .collect();

    // cup maps from the pairing data
    let data_inner = PairingData {
        an_cup: unit_cups.clone(),
        dr_cup: unit_cups.clone(),
        lambda: Rat::one(),
        splitting: bezout_split(&p1, &p2).unwrap(),
    };
    let fam_inner = syntomic_cup(&syn1_inner, &syn2, &syn_u, &unit, &unit, &unit, &data_inner);
    let cup_inner = fam_inner.maps.clone();

    let data_face = PairingData {
        an_cup: face_cups.clone(),
        dr_cup: face_cups.clone(),
        lambda: Rat::one(),
        splitting: bezout_split(&p1_face, &p2).unwrap(),
    };
    let fam_face = syntomic_cup(
        &syn1_face,
        &syn2_face,
        &syn_u_face,
        &unit_face,
        &unit_face,
        &unit_face,
        &data_face,
    );
    let cup_face = fam_face.maps.clone();

    // primed cups: blockwise (X⊗X → X, X⊗F → F, F⊗X → F, F⊗F → 0) with
    // the degree-0 restriction as the mediating map
    let primed_cups = extension_cups(&unit_cups);
    let data_primed = PairingData {
        an_cup: primed_cups.clone(),
        dr_cup: primed_cups,
        lambda: Rat::one(),
        splitting: bezout_split(&p1, &p2).unwrap(),
    };
    let fam_primed = syntomic_cup(
        &syn1_primed,
        &syn2_primed,
        &syn_u_primed,
        &e_primed,
        &e_primed,
        &u_primed,
        &data_primed,
    );
    let cup_primed = fam_primed.maps.clone();

    let trace = TraceContext {
        top_degree: 2,
        tr_dr: QMat::identity(1),
        admissible: crate::scalars::ops::is_admissible_q(p, 1, &p3, r3, 1, None).admissible,
    };
    let trace_face = TraceContext {
        top_degree: 0,
        tr_dr: QMat::identity(1),
        admissible: crate::scalars::ops::is_admissible_q(p, 1, &p3_face, r3 - 1, 0, None)
            .admissible,
    };

    GysinBundle {
        p,
        d: 1,
        side1: GysinSide { inner: syn1_inner, primed: syn1_primed, face: syn1_face, ses: ses1 },
        syn2,
        syn2_primed,
        syn2_face,
        inj2,
        inj2_min,
        iota,
        iota_min,
        unit_side: GysinSide {
            inner: syn_u,
            primed: syn_u_primed,
            face: syn_u_face,
            ses: ses_u,
        },
        unit_pkg: unit,
        unit_face_pkg: unit_face,
        cup_inner,
        cup_primed,
        cup_face,
        trace,
        trace_face,
    }
}

/// The product table on extension packages `C' = C ⊕ C_F[-1]`: inner cup on
/// the X-parts, restriction-mediated products into the F-part, zero on
/// F ⊗ F. Specific to the curve-over-point shape used by [`gysin_bundle`].
fn extension_cups(unit_cups: &BTreeMap<(i64, i64), QMat>) -> BTreeMap<(i64, i64), QMat> {
    // primed dims: degree 0 → 1 (X), degree 1 → 3 (X², F¹), degree 2 → 1 (X)
    let dim = |q: i64| -> usize {
        match q {
            0 => 1,
            1 => 3,
            2 => 1,
            _ => 0,
        }
    };
    // X-part indices per degree, F-part index at degree 1 is 2
    let x_count = |q: i64| -> usize {
        match q {
            0 => 1,
            1 => 2,
            2 => 1,
            _ => 0,
        }
    };
    let mut out = BTreeMap::new();
    for a in 0..=2i64 {
        for b in 0..=2i64 {
            let q = a + b;
            if q > 2 {
                continue;
            }
            let (da, db, dq) = (dim(a), dim(b), dim(q));
            if da == 0 || db == 0 || dq == 0 {
                continue;
            }
            let mut m = QMat::zeros(dq, da * db);
            // X ⊗ X through the unit cup
            if let Some(c) = unit_cups.get(&(a, b)) {
                for r in 0..x_count(q).min(c.rows) {
                    for i in 0..x_count(a) {
                        for j in 0..x_count(b) {
                            let v = c.at(r, i * x_count(b) + j).clone();
                            if !v.is_zero() {
                                m.set(r, i * db + j, v);
                            }
                        }
                    }
                }
            }
            // X ⊗ F → F: ι(x)·f with ι the degree-0 restriction
            if a == 0 && b == 1 {
                // F-part of degree 1 is coordinate 2 on both sides
                m.set(2, 0 * db + 2, rat_i(1));
            }
            // F ⊗ X → F (ε = 1)
            if a == 1 && b == 0 {
                m.set(2, 2 * db + 0, rat_i(1));
            }
            out.insert((a, b), m);
        }
    }
    out
}

/// The residue short exact sequence of total complexes: inner ⊂ primed with
/// quotient the face total reindexed one degree up.
fn residue_ses(inner: &SynComplex, primed: &SynComplex, face: &SynComplex) -> ShortExact {
    let tot_in = inner.total();
    let tot_pr = primed.total();
    let tot_f = face.total();
    // reindexed quotient: Q^n = Tot(face)^{n-1} with the same differential
    let fmin = tot_f.min_deg();
    let fdims: Vec<usize> =
        (fmin..=tot_f.max_deg()).map(|n| tot_f.dim(n)).collect();
    let fdiffs: Vec<QMat> = (fmin..tot_f.max_deg()).map(|n| tot_f.d(n)).collect();
    let quot = Complex::new(fmin + 1, fdims, fdiffs).unwrap();
    let min = tot_pr.min_deg();
    let inj_mats: Vec<QMat> = (tot_in.min_deg()..=tot_in.max_deg())
        .map(|n| inclusion_matrix(inner, primed, n, &tot_in, &tot_pr))
        .collect();
    let inj = ChainMap::from_parts(&tot_in, &tot_pr, 0, tot_in.min_deg(), inj_mats)
        .expect("inclusion of the inner syntomic complex is a chain map");
    let surj_mats: Vec<QMat> = (min..=tot_pr.max_deg())
        .map(|n| projection_matrix(inner, primed, face, n, &tot_pr, &quot))
        .collect();
    let surj = ChainMap::from_parts(&tot_pr, &quot, 0, min, surj_mats)
        .expect("residue projection is a chain map");
    ShortExact::new(tot_in, tot_pr, quot, inj, surj).expect("residue sequence is exact")
}

/// X-part inclusion `Tot(inner)^n → Tot(primed)^n` for extension packages
/// whose primed spaces are X-coordinates followed by F-coordinates.
fn inclusion_matrix(
    inner: &SynComplex,
    primed: &SynComplex,
    n: i64,
    tot_in: &Complex,
    tot_pr: &Complex,
) -> QMat {
    let mut m = QMat::zeros(tot_pr.dim(n), tot_in.dim(n));
    // block (0, n): C^n sits first inside C'^n
    let a_in = inner.dc.dim(0, n);
    if a_in > 0 && primed.dc.dim(0, n) > 0 {
        let src = inner.dc.block_offset(n, 0);
        let dst = primed.dc.block_offset(n, 0);
        for k in 0..a_in {
            m.set(dst + k, src + k, rat_i(1));
        }
    }
    // block (1, n-1): (C ⊕ W) into (C' ⊕ W')
    if inner.dc.dim(1, n - 1) > 0 && primed.dc.dim(1, n - 1) > 0 {
        let src = inner.dc.block_offset(n, 1);
        let dst = primed.dc.block_offset(n, 1);
        let an_in = inner.an.dim(n - 1);
        for k in 0..an_in {
            m.set(dst + k, src + k, rat_i(1));
        }
        // W-part: match complement columns by their ambient vectors (the
        // X block sits first in the primed ambient space)
        let w_in = &inner.quot.complement[(n - 1 - inner.quot.ambient.min_deg()) as usize];
        let w_pr = &primed.quot.complement[(n - 1 - primed.quot.ambient.min_deg()) as usize];
        let an_pr = primed.an.dim(n - 1);
        for c_in in 0..w_in.cols {
            // the ambient vector of this inner complement column, embedded
            // into the primed ambient (X coordinates first), must match a
            // primed complement column
            for c_pr in 0..w_pr.cols {
                let mut matches = true;
                for r in 0..w_pr.rows {
                    let want = if r < w_in.rows { w_in.at(r, c_in).clone() } else { Rat::zero() };
                    if *w_pr.at(r, c_pr) != want {
                        matches = false;
                        break;
                    }
                }
                if matches {
                    m.set(dst + an_pr + c_pr, src + an_in + c_in, rat_i(1));
                    break;
                }
            }
        }
    }
    m
}

/// F-part projection `Tot(primed)^n → Q^n = Tot(face)^{n-1}`.
fn projection_matrix(
    inner: &SynComplex,
    primed: &SynComplex,
    face: &SynComplex,
    n: i64,
    tot_pr: &Complex,
    quot: &Complex,
) -> QMat {
    let mut m = QMat::zeros(quot.dim(n), tot_pr.dim(n));
    let nf = n - 1;
    // block (0, n): F-part of C'^n is the coordinates after the X-part,
    // hitting the face block (0, nf)
    let a_in = inner.dc.dim(0, n);
    let a_pr = primed.dc.dim(0, n);
    let f_an = face.dc.dim(0, nf);
    if f_an > 0 && a_pr > a_in {
        let srcb = primed.dc.block_offset(n, 0);
        let dstb = face.dc.block_offset(nf, 0);
        for k in 0..f_an {
            m.set(dstb + k, srcb + a_in + k, rat_i(1));
        }
    }
    // block (1, n-1) → face block (1, nf-1)
    if primed.dc.dim(1, n - 1) > 0 && face.dc.dim(1, nf - 1) > 0 {
        let srcb = primed.dc.block_offset(n, 1);
        let dstb = face.dc.block_offset(nf, 1);
        let an_in = inner.an.dim(n - 1);
        let an_pr = primed.an.dim(n - 1);
        let an_f = face.an.dim(nf - 1);
        for k in 0..an_f {
            m.set(dstb + k, srcb + an_in + k, rat_i(1));
        }
        // W-parts: primed complement columns with support in the F block
        let w_pr = &primed.quot.complement[(n - 1 - primed.quot.ambient.min_deg()) as usize];
        let w_f_dim = face.quot.complex.dim(nf - 1);
        let x_dim = inner.quot.ambient.dim(n - 1);
        let mut fcol = 0usize;
        for c_pr in 0..w_pr.cols {
            let is_f_col = (0..w_pr.rows).any(|r| r >= x_dim && !w_pr.at(r, c_pr).is_zero())
                && (0..x_dim.min(w_pr.rows)).all(|r| w_pr.at(r, c_pr).is_zero());
            if is_f_col && fcol < w_f_dim {
                m.set(dstb + an_f + fcol, srcb + an_pr + c_pr, rat_i(1));
                fcol += 1;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_packages_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let pkg = random_package(&mut rng, 2, 3, 3);
            pkg.validate().unwrap();
        }
    }

    #[test]
    fn monodromy_packages_validate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let pkg = random_monodromy_package(&mut rng, 2);
            pkg.validate().unwrap();
        }
    }

    #[test]
    fn unit_curve_validates() {
        let (pkg, cups) = unit_curve_package(2);
        pkg.validate().unwrap();
        // Frobenius compatibility of the degree (1,1) product
        let phi1 = pkg.phi.mat_sized(&pkg.c_an, &pkg.c_an, 1);
        let phi2 = pkg.phi.mat_sized(&pkg.c_an, &pkg.c_an, 2);
        let c11 = cups.get(&(1, 1)).unwrap();
        assert_eq!(phi2.mul(&c11.clone()), c11.mul(&phi1.kronecker(&phi1)));
    }
}
