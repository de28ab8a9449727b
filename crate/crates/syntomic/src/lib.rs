//! Syntomic polynomial double complexes over exact scalars.
//!
//! This crate implements, at desk scale and with exact arithmetic, the
//! complex-level machinery of syntomic cohomology with polynomial Frobenius
//! conditions: two-column double complexes built from abstract Frobenius,
//! filtration and comparison data, monodromy cones, Koszul complexes with
//! the nilpotent-residue acyclicity criterion, composed products of
//! polynomials with Bezout splittings, cup products with pinned sign
//! conventions, trace pairings and Gysin adjunction, and truncated p-adic
//! rings in which `P(Φ)` is inverted constructively.
//!
//! The narrative guide lives in `book/`; its code snippets are compiled and
//! run as doctests through [`guide`].

pub mod homcore;
pub mod koszul;
pub mod engine;
pub mod padic;
pub mod linalg;
pub mod scalars;

pub use linalg::{QMat, Rat};
