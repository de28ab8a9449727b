//! The syntomic engine: geometric packages, the two-column double complexes
//! `K_{P,r}`, monodromy cones and their exact sequences, trace maps, cup
//! products and pairings, and Gysin adjunction.

pub mod gysin;
pub mod package;
pub mod pairing;
pub mod syn;
pub mod synthetic;

pub use gysin::{gysin_class, AdjunctionReport, GysinBundle, GysinError, GysinSide};
pub use package::{
    abs_cone, hk_exact_sequence, AbsCone, FieldActions, Filtration, GeometricPackage,
    HkSequence, PackageError, Support,
};
pub use pairing::{syntomic_cup, trace_map, PairingData, SynPairing, TraceContext};
pub use syn::{
    alpha_on_cohomology, build_syn, compare_prq, f1_inverse, f_filtration, CompareMorphism,
    F1Inverse, FDecomposition, QuotientModel, SynComplex, SynError,
};
