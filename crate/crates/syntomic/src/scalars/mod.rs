//! Exact scalar models: rational polynomials, the cyclotomic base field with
//! its Frobenius, ramified extensions, and the polynomial operations built
//! on them (composed products, Bezout splittings, annihilators,
//! admissibility).

pub mod field;
pub mod ops;
pub mod qpoly;

pub use field::{cyclotomic, EigenData, FieldError, K0Elt, K0Field, K0Mat, K0Poly, KElt,
                RamifiedExtension};
pub use ops::{annihilates, annihilator_poly, bezout_split, bezout_split_alt, composed_product,
              composed_product_resultant, is_admissible, is_admissible_q, weil_admissibility,
              weil_admissibility_q, Admissibility, AdmissibilityFailure, BezoutSplitting,
              ScalarOpError};
pub use qpoly::{charpoly, det, resultant, QPoly, QPoly2};
