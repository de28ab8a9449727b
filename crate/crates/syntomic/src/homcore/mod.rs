//! Exact homological algebra: complexes, cones, double complexes, spectral
//! sequences, Čech systems, and cup products with pinned sign conventions.

pub mod cech;
pub mod complex;
pub mod cup;
pub mod double;
pub mod spectral;

pub use cech::{front_back_sign_exponent, CechError, CechPairing, CechSystem, Dga, Tuple};
pub use complex::{
    cone, induces_iso_on_ker_coker, ChainMap, Cohomology, Complex, ConeData, FourTermLadder,
    HomError, ShortExact, TriangleMorphism, TriangleVerdict,
};
pub use cup::{cech_cup, cech_formula_matches, CupFamily, LeibnizViolation, PageProducts};
pub use double::{DoubleComplex, DoubleError};
pub use spectral::{Page, SpectralSequence, Subquotient};
