//! Piecewise-linear finite elements for a graph surface moving by forced mean
//! curvature flow, coupled to a reaction-diffusion equation posed on the
//! moving surface.
//!
//! The surface is the graph `x ↦ (x, u(x, t))` over a fixed planar domain and
//! the surface quantity `w` is pulled back to that domain. Every time step
//! solves two symmetric positive definite linear systems: one for the new
//! height `u`, then one for `w` on the new surface.
//!
//! Module map:
//!
//! * [`mesh`]: disk and rectangle triangulations, uniform refinement.
//! * [`fem`]: quadrature, P1 functions, sparse assembly, Dirichlet
//!   elimination and preconditioned conjugate gradients.
//! * [`geometry`]: area element, normal and the anisotropic diffusion
//!   matrix of the graph.
//! * [`problems`]: the manufactured-solution examples, the contact angle
//!   demo and the grain boundary scenarios.
//! * [`scheme`]: the coupled backward Euler stepper and the two Ritz
//!   projections used to initialise it.
//! * [`analysis`]: error functionals, convergence orders and studies.
//! * [`io`]: VTK snapshots and CSV time series.
//! * [`checks`]: self-contained invariant suites (used by `graphflow check`).

pub mod analysis;
pub mod checks;
pub mod error;
pub mod exec;
pub mod fem;
pub mod geometry;
pub mod io;
pub mod mesh;
pub mod problems;
pub mod scheme;

pub use error::{Error, Result};
pub use exec::ExecPolicy;
pub use fem::FeFunction;
pub use mesh::{BoundaryTag, Mesh};
pub use problems::ProblemSpec;
pub use scheme::{SchemeConfig, State};
