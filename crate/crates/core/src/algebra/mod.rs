//! Based algebras given by structure constants.
//!
//! Indices are 0-based in code and in the JSON format; human-readable
//! reports (violation messages, CLI text) use 1-based indices.

mod based;
mod build;
mod table;

pub use based::{validate, BasedAlgebra};
pub use build::{
    make_bullet, make_cubic, make_monogenic, make_rank8_local, make_split, make_truncated_local,
    product, quadratic_monomials,
};
pub use table::{StructureTable, TableJson, Violation, ViolationKind};
