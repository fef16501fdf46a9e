//! Nilpotent commutative algebras codified by strictly lower triangular
//! matrices: arithmetic, homomorphism checks, elementary triangular
//! operations and isomorphism classification.

pub mod algebra;
pub mod classify;
mod error;
pub mod eto;
pub mod hom;
pub mod matrix;
pub mod scalar;
pub mod sltm;

pub use algebra::{Algebra, Element, Monomial};
pub use classify::{
    census, classify_n2, classify_n3, leader_graph, leaders, lower_bound_witnesses,
    zero_class_certificate, zero_class_check, zero_eto_path, CensusOptions, ClassReport,
    LeaderGraph, ZeroClassVerdict,
};
pub use error::{Error, Restriction, Result};
pub use eto::{apply_sequence, eto_equiv_search, EtoSequence, EtoStep};
pub use hom::{
    direct_hom_check, iso_search, is_isomorphism, key_eq_check, IsoOutcome, IsoSearchOptions,
    Morphism,
};
pub use matrix::Matrix;
pub use scalar::{FieldSpec, Scalar};
pub use sltm::Sltm;
