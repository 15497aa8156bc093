//! Piecewise-linear finite element machinery.

pub mod assembly;
pub mod dirichlet;
pub mod function;
pub mod quadrature;
pub mod solver;
pub mod sparse;

pub use assembly::{
    assemble_boundary_load, assemble_gradient_load, assemble_load, assemble_weighted_mass,
    assemble_weighted_stiffness, Assembler,
};
pub use dirichlet::{apply_dirichlet, Constraints, ReducedSystem, SparseSystem};
pub use function::{integrate, FeFunction, FieldErrors};
pub use quadrature::{quadrature, EdgePoint, QuadPoint, QuadratureRule};
pub use solver::{conjugate_gradient, solve_spd, CgOptions, CgOutcome, DEFAULT_TOL};
pub use sparse::CsrMatrix;
