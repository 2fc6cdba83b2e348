//! Computations on the moduli space of based commutative algebras of finite
//! rank: structure tables, the GL_n action, local structure, exhaustive
//! classification over small prime fields, deformation and lifting checks,
//! dimension formulas and the reduction from finite rings to algebras.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod bounds;
pub mod budget;
pub mod deform;
pub mod enumerate;
pub mod error;
pub mod exactla;
pub mod localstruct;
pub mod ringlift;
pub mod symmetry;

pub use algebra::{validate, BasedAlgebra, StructureTable};
pub use budget::Budget;
pub use error::{Error, Result};
pub use exactla::{Coeff, Matrix, Subspace, Zn};
