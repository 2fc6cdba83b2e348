//! Exact arithmetic over `F_p` and `Z/p^k`: residues, dense matrices,
//! row reduction, subspaces in canonical form and GL_n iteration.

mod gl;
mod matrix;
mod subspace;
mod zn;

pub use gl::{gl_order, h_generators, h_order, iterate_gl, iterate_h, GlIter};
pub use matrix::{rre_form, solve_affine, AffineSolution, Matrix, MatrixJson, RowReduction};
pub use subspace::Subspace;
pub use zn::{Coeff, Zn};
