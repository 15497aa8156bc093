//! The coupled backward Euler scheme.
//!
//! Each time level solves two linear systems in sequence:
//!
//! 1. the height `u^{m+1}` from
//!    `(1/τ)∫(u^{m+1} - u^m)φ/Q(u^m) + ∫∇u^{m+1}·∇φ/Q(u^m) = ∫f(w^m)φ`,
//! 2. the surface quantity `w^{m+1}` from
//!    `(1/τ)[∫w^{m+1}η Q(u^{m+1}) - ∫w^m η Q(u^m)] + ∫E(∇u^{m+1})∇w^{m+1}·∇η
//!     = -∫∇u^{m+1}·∇η V w^m + ∫g(V, w^m) η Q(u^{m+1})`
//!    with `V = (u^{m+1} - u^m) / (τ Q(u^{m+1}))`.
//!
//! Both matrices are symmetric positive definite. The scheme starts from the
//! Ritz projections [`minimal_surface_projection`] and [`w_projection`] of the
//! initial data.

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::fem::{
    conjugate_gradient, quadrature, Assembler, CgOptions, Constraints, FeFunction, QuadPoint,
    QuadratureRule, SparseSystem, DEFAULT_TOL,
};
use crate::geometry::{discrete_velocity, e_matrix, q_of, Sym2};
use crate::mesh::Mesh;
use crate::problems::{GraphBc, ProblemSpec};

/// Degree of the element quadrature used by the scheme and the error
/// functionals.
pub const QUADRATURE_DEGREE: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeConfig {
    pub tau: f64,
    pub t_final: f64,
    /// Relative residual tolerance of every linear solve.
    pub solver_tol: f64,
    /// H¹ increment tolerance of the minimal-surface projection.
    pub projection_tol: f64,
    pub projection_max_iter: usize,
    pub policy: ExecPolicy,
}

impl SchemeConfig {
    pub fn new(tau: f64, t_final: f64) -> Self {
        SchemeConfig {
            tau,
            t_final,
            solver_tol: DEFAULT_TOL,
            projection_tol: 1e-10,
            projection_max_iter: 50,
            policy: ExecPolicy::default(),
        }
    }

    /// Number of steps `M = round(T / τ)`.
    pub fn steps(&self) -> Result<usize> {
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "time step must be positive, got {}",
                self.tau
            )));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "final time must be non-negative, got {}",
                self.t_final
            )));
        }
        Ok((self.t_final / self.tau).round() as usize)
    }

    pub fn cg(&self) -> CgOptions {
        CgOptions {
            tol: self.solver_tol,
            ..CgOptions::default()
        }
    }

    pub fn time(&self, m: usize) -> f64 {
        m as f64 * self.tau
    }
}

/// Discrete solution at time level `m`.
#[derive(Clone, Debug)]
pub struct State<'m> {
    pub m: usize,
    pub t: f64,
    pub u: FeFunction<'m>,
    pub w: FeFunction<'m>,
}

/// Read-only callback invoked once per time level, starting with `m = 0`.
pub trait Observer {
    fn observe(&mut self, state: &State<'_>) -> Result<()>;
}

impl<F> Observer for F
where
    F: FnMut(&State<'_>) -> Result<()>,
{
    fn observe(&mut self, state: &State<'_>) -> Result<()> {
        self(state)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub solver: CgOptions,
    pub policy: ExecPolicy,
}

impl Default for ProjectionOptions {
    fn default() -> Self {
        ProjectionOptions {
            tol: 1e-10,
            max_iter: 50,
            solver: CgOptions::default(),
            policy: ExecPolicy::default(),
        }
    }
}

/// Minimal-surface type projection `û_h` of `u`:
/// `∫∇û·∇φ/Q(û) + ∫ûφ = ∫∇u·∇φ/Q(u) + ∫uφ` for all test functions.
///
/// Solved by freezing `Q` at the previous iterate, starting from the
/// interpolant, until the H¹ norm of the increment drops below `opts.tol`.
/// Vertices in `constraints` keep their prescribed values and are excluded
/// from the test space.
pub fn minimal_surface_projection<'m, U, G>(
    mesh: &'m Mesh,
    rule: &QuadratureRule,
    u: U,
    grad_u: G,
    constraints: &Constraints,
    opts: &ProjectionOptions,
) -> Result<FeFunction<'m>>
where
    U: Fn([f64; 2]) -> f64 + Sync + Send,
    G: Fn([f64; 2]) -> [f64; 2] + Sync + Send,
{
    let asm = Assembler::new(mesh, rule.clone()).with_policy(opts.policy);
    let mut rhs = asm.load(|_, qp| u(qp.x));
    let flux = asm.gradient_load(|_, qp| {
        let p = grad_u(qp.x);
        let q = q_of(p);
        [p[0] / q, p[1] / q]
    });
    rhs.iter_mut().zip(&flux).for_each(|(b, f)| *b += f);

    let mass = asm.mass(|_, _| 1.0);
    let mut h1 = asm.stiffness(|_, _| Sym2::identity());
    h1.add_scaled(1.0, &mass);

    let mut uh = FeFunction::interpolate(mesh, &u);
    for (&k, &g) in constraints {
        uh.values_mut()[k] = g;
    }
    let zero_constraints: Constraints = constraints.keys().map(|&k| (k, 0.0)).collect();
    let mut increment = f64::INFINITY;
    for _ in 0..opts.max_iter {
        let inv_q: Vec<f64> = (0..mesh.num_triangles())
            .map(|t| 1.0 / q_of(uh.gradient(t)))
            .collect();
        let mut a = asm.stiffness(|t, _| Sym2::scaled_identity(inv_q[t]));
        a.add_scaled(1.0, &mass);
        let au = a.matvec(uh.values());
        let residual: Vec<f64> = rhs.iter().zip(&au).map(|(b, x)| b - x).collect();
        let delta = SparseSystem::new(a, residual)
            .with_constraints(zero_constraints.clone())
            .solve(&opts.solver, None)?;
        increment = h1.bilinear(&delta, &delta).max(0.0).sqrt();
        uh.values_mut()
            .iter_mut()
            .zip(&delta)
            .for_each(|(x, d)| *x += d);
        if increment <= opts.tol {
            return Ok(uh);
        }
    }
    Err(Error::ProjectionDiverged {
        iterations: opts.max_iter,
        increment,
    })
}

/// Projection `ŵ_h` of `w` with `∫E(∇û_h)∇ŵ_h·∇η = ∫E(∇u)∇w·∇η` for all
/// test functions vanishing on `dirichlet`, where `ŵ_h` interpolates `w`.
///
/// `grad_u` supplies `∇u` at quadrature points of the right-hand side.
pub fn w_projection<'m, P, W, G>(
    u_hat: &FeFunction<'m>,
    rule: &QuadratureRule,
    grad_u: P,
    w: W,
    grad_w: G,
    dirichlet: &[usize],
    opts: &ProjectionOptions,
) -> Result<FeFunction<'m>>
where
    P: Fn(usize, &QuadPoint) -> [f64; 2] + Sync + Send,
    W: Fn([f64; 2]) -> f64,
    G: Fn([f64; 2]) -> [f64; 2] + Sync + Send,
{
    if dirichlet.is_empty() {
        return Err(Error::InvalidArgument(
            "w projection needs at least one Dirichlet vertex".into(),
        ));
    }
    let mesh = u_hat.mesh();
    let asm = Assembler::new(mesh, rule.clone()).with_policy(opts.policy);
    let e_hat: Vec<Sym2> = (0..mesh.num_triangles())
        .map(|t| e_matrix(u_hat.gradient(t)))
        .collect();
    let a = asm.stiffness(|t, _| e_hat[t]);
    let b = asm.gradient_load(|t, qp| e_matrix(grad_u(t, qp)).apply(grad_w(qp.x)));
    let constraints: Constraints = dirichlet
        .iter()
        .map(|&v| (v, w(mesh.vertices()[v])))
        .collect();
    let values = SparseSystem::new(a, b)
        .with_constraints(constraints)
        .solve(&opts.solver, None)?;
    Ok(FeFunction::from_values(mesh, values))
}

/// Time stepper bound to one problem, mesh and configuration.
pub struct Stepper<'a> {
    problem: &'a ProblemSpec,
    mesh: &'a Mesh,
    config: SchemeConfig,
    asm: Assembler<'a>,
    w_dirichlet: Vec<usize>,
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a ProblemSpec, mesh: &'a Mesh, config: SchemeConfig) -> Result<Self> {
        config.steps()?;
        for &tag in &problem.w_bc.dirichlet_tags {
            if !mesh.has_tag(tag) {
                return Err(Error::UnknownTag(tag));
            }
        }
        if let GraphBc::ContactAngle { tag, .. } = &problem.graph_bc {
            if !mesh.has_tag(*tag) {
                return Err(Error::UnknownTag(*tag));
            }
        }
        let asm = Assembler::new(mesh, quadrature(QUADRATURE_DEGREE)?).with_policy(config.policy);
        Ok(Stepper {
            problem,
            mesh,
            config,
            asm,
            w_dirichlet: mesh.boundary_vertices(&problem.w_bc.dirichlet_tags),
        })
    }

    pub fn mesh(&self) -> &'a Mesh {
        self.mesh
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn rule(&self) -> &QuadratureRule {
        self.asm.rule()
    }

    pub fn assembler(&self) -> &Assembler<'a> {
        &self.asm
    }

    fn projection_options(&self) -> ProjectionOptions {
        ProjectionOptions {
            tol: self.config.projection_tol,
            max_iter: self.config.projection_max_iter,
            solver: self.config.cg(),
            policy: self.config.policy,
        }
    }

    /// Dirichlet constraints on the height at time `t`, if any.
    pub fn u_constraints(&self, t: f64) -> Constraints {
        match &self.problem.graph_bc {
            GraphBc::Dirichlet { value } => self
                .mesh
                .all_boundary_vertices()
                .into_iter()
                .map(|v| (v, value(self.mesh.vertices()[v], t)))
                .collect(),
            _ => Constraints::new(),
        }
    }

    /// Dirichlet constraints on `w` at time `t`.
    pub fn w_constraints(&self, t: f64) -> Constraints {
        self.w_dirichlet
            .iter()
            .map(|&v| (v, (self.problem.w_bc.value)(self.mesh.vertices()[v], t)))
            .collect()
    }

    /// `u⁰_h`, `w⁰_h`: Ritz projections of smooth initial data, nodal
    /// interpolants otherwise.
    pub fn initial_state(&self) -> Result<State<'a>> {
        let mesh = self.mesh;
        let rule = self.rule();
        let opts = self.projection_options();
        let p = self.problem;
        let u = match &p.u0.gradient {
            Some(grad) => minimal_surface_projection(
                mesh,
                rule,
                &*p.u0.value,
                &**grad,
                &self.u_constraints(0.0),
                &opts,
            )?,
            None => FeFunction::interpolate(mesh, &*p.u0.value),
        };
        let w = match &p.w0.gradient {
            Some(grad_w) if !self.w_dirichlet.is_empty() => match &p.u0.gradient {
                Some(grad_u) => w_projection(
                    &u,
                    rule,
                    |_, qp| grad_u(qp.x),
                    &*p.w0.value,
                    &**grad_w,
                    &self.w_dirichlet,
                    &opts,
                )?,
                None => w_projection(
                    &u,
                    rule,
                    |t, _| u.gradient(t),
                    &*p.w0.value,
                    &**grad_w,
                    &self.w_dirichlet,
                    &opts,
                )?,
            },
            _ => FeFunction::interpolate(mesh, &*p.w0.value),
        };
        Ok(State { m: 0, t: 0.0, u, w })
    }

    /// Linear system of the height update, with its constraints.
    pub fn graph_system(&self, state: &State<'a>) -> Result<SparseSystem> {
        let tau = self.config.tau;
        let t_next = self.config.time(state.m + 1);
        let p = self.problem;
        let u_old = &state.u;
        let w_old = &state.w;
        let inv_q: Vec<f64> = (0..self.mesh.num_triangles())
            .map(|t| 1.0 / q_of(u_old.gradient(t)))
            .collect();

        let matrix = self.asm.mass_stiffness(
            |t, _| inv_q[t] / tau,
            |t, _| Sym2::scaled_identity(inv_q[t]),
        );
        let mut rhs = self.asm.load(|t, qp| {
            inv_q[t] / tau * u_old.eval_at(t, qp)
                + (p.f)(w_old.eval_at(t, qp))
                + p.forcing_u(qp.x, t_next)
        });
        if let GraphBc::ContactAngle { tag, cos_alpha } = &p.graph_bc {
            let c = cos_alpha(t_next);
            let boundary = self.asm.boundary_load(*tag, |_, _| c)?;
            rhs.iter_mut().zip(&boundary).for_each(|(b, g)| *b -= g);
        }
        Ok(SparseSystem::new(matrix, rhs).with_constraints(self.u_constraints(t_next)))
    }

    /// Solves for `u^{m+1}_h`.
    pub fn graph_step(&self, state: &State<'a>) -> Result<FeFunction<'a>> {
        let system = self.graph_system(state)?;
        let values = system.solve(&self.config.cg(), Some(state.u.values()))?;
        Ok(FeFunction::from_values(self.mesh, values))
    }

    /// Linear system of the surface update on the new height `u_new`.
    pub fn surface_system(
        &self,
        state: &State<'a>,
        u_new: &FeFunction<'a>,
    ) -> Result<SparseSystem> {
        let tau = self.config.tau;
        let t_next = self.config.time(state.m + 1);
        let p = self.problem;
        let rule = self.rule();
        let nq = rule.len();
        let w_old = &state.w;
        let velocity = discrete_velocity(u_new, &state.u, tau, rule)?;
        let nt = self.mesh.num_triangles();
        let q_old: Vec<f64> = (0..nt).map(|t| q_of(state.u.gradient(t))).collect();
        let grad_new: Vec<[f64; 2]> = (0..nt).map(|t| u_new.gradient(t)).collect();
        let q_new: Vec<f64> = grad_new.iter().map(|&g| q_of(g)).collect();
        let e_new: Vec<Sym2> = grad_new.iter().map(|&g| e_matrix(g)).collect();

        let matrix = self
            .asm
            .mass_stiffness(|t, _| q_new[t] / tau, |t, _| e_new[t]);
        let mut rhs = self.asm.load(|t, qp| {
            let v = velocity[t * nq + qp.index];
            let w = w_old.eval_at(t, qp);
            let mut d = q_old[t] / tau * w + p.g.eval(v, w) * q_new[t];
            if let Some(ex) = &p.exact {
                d += p.forcing_w(qp.x, t_next) * q_of(ex.grad_u(qp.x, t_next));
            }
            d
        });
        let advection = self.asm.gradient_load(|t, qp| {
            let c = velocity[t * nq + qp.index] * w_old.eval_at(t, qp);
            [grad_new[t][0] * c, grad_new[t][1] * c]
        });
        rhs.iter_mut().zip(&advection).for_each(|(b, a)| *b -= a);
        Ok(SparseSystem::new(matrix, rhs).with_constraints(self.w_constraints(t_next)))
    }

    /// Solves for `w^{m+1}_h`.
    pub fn surface_step(
        &self,
        state: &State<'a>,
        u_new: &FeFunction<'a>,
    ) -> Result<FeFunction<'a>> {
        let system = self.surface_system(state, u_new)?;
        let values = system.solve(&self.config.cg(), Some(state.w.values()))?;
        Ok(FeFunction::from_values(self.mesh, values))
    }

    /// One full time level: height first, then the surface quantity.
    pub fn step(&self, state: &State<'a>) -> Result<State<'a>> {
        let u = self.graph_step(state)?;
        let w = self.surface_step(state, &u)?;
        let m = state.m + 1;
        Ok(State {
            m,
            t: self.config.time(m),
            u,
            w,
        })
    }
}

/// Outcome of [`run`].
#[derive(Clone, Debug)]
pub struct RunSummary<'m> {
    pub final_state: State<'m>,
    pub steps: usize,
    pub graph_solves: usize,
    pub surface_solves: usize,
}

/// Initialises by projection and advances `M = round(T/τ)` time levels,
/// handing every level (including the initial one) to each observer.
pub fn run<'a>(
    problem: &'a ProblemSpec,
    mesh: &'a Mesh,
    config: SchemeConfig,
    observers: &mut [&mut dyn Observer],
) -> Result<RunSummary<'a>> {
    let stepper = Stepper::new(problem, mesh, config)?;
    let steps = config.steps()?;
    let mut state = stepper
        .initial_state()
        .map_err(|e| e.at_time_level(0, 0.0))?;
    for obs in observers.iter_mut() {
        obs.observe(&state)?;
    }
    let (mut graph_solves, mut surface_solves) = (0, 0);
    for _ in 0..steps {
        let (m, t) = (state.m + 1, config.time(state.m + 1));
        let u = stepper
            .graph_step(&state)
            .map_err(|e| e.at_time_level(m, t))?;
        graph_solves += 1;
        let w = stepper
            .surface_step(&state, &u)
            .map_err(|e| e.at_time_level(m, t))?;
        surface_solves += 1;
        state = State { m, t, u, w };
        for obs in observers.iter_mut() {
            obs.observe(&state)?;
        }
    }
    Ok(RunSummary {
        final_state: state,
        steps,
        graph_solves,
        surface_solves,
    })
}

/// Convenience wrapper: one height update for `state`.
pub fn graph_step<'a>(
    state: &State<'a>,
    problem: &'a ProblemSpec,
    config: SchemeConfig,
) -> Result<FeFunction<'a>> {
    Stepper::new(problem, state.u.mesh(), config)?.graph_step(state)
}

/// Convenience wrapper: one surface update for `state` on the new height.
pub fn surface_step<'a>(
    state: &State<'a>,
    u_new: &FeFunction<'a>,
    problem: &'a ProblemSpec,
    config: SchemeConfig,
) -> Result<FeFunction<'a>> {
    Stepper::new(problem, state.u.mesh(), config)?.surface_step(state, u_new)
}

/// Runs CG on an already reduced system; exposed for benchmarks.
pub fn solve_system(system: &SparseSystem, opts: &CgOptions) -> Result<Vec<f64>> {
    let reduced = system.reduce();
    let (x, _) = conjugate_gradient(&reduced.matrix, &reduced.rhs, None, opts)?;
    Ok(reduced.extend(&x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{disk_mesh_with_rings, generate_disk_mesh};
    use crate::problems::{example1, GDecomposition, InitialData};
    use std::sync::Arc;

    fn flat_problem(f: f64, u0: f64) -> ProblemSpec {
        let mut p = example1();
        p.key = "flat".into();
        p.exact = None;
        p.f = Arc::new(move |_| f);
        p.g = GDecomposition::zero();
        p.graph_bc = GraphBc::NeumannZero;
        p.u0 = InitialData::constant(u0);
        p.w0 = InitialData::constant(0.0);
        p.w_bc.value = Arc::new(|_, _| 0.0);
        p
    }

    #[test]
    fn steps_rounding_and_validation() {
        assert_eq!(SchemeConfig::new(0.03, 0.1).steps().unwrap(), 3);
        assert_eq!(SchemeConfig::new(0.1, 0.0).steps().unwrap(), 0);
        assert!(SchemeConfig::new(0.0, 0.1).steps().is_err());
        assert!(SchemeConfig::new(-1.0, 0.1).steps().is_err());
    }

    #[test]
    fn constant_height_is_stationary() {
        let mesh = disk_mesh_with_rings(4).unwrap();
        let p = flat_problem(0.0, 0.7);
        let cfg = SchemeConfig::new(0.01, 0.05);
        let stepper = Stepper::new(&p, &mesh, cfg).unwrap();
        let s0 = stepper.initial_state().unwrap();
        let u1 = stepper.graph_step(&s0).unwrap();
        assert!(u1.values().iter().all(|&v| (v - 0.7).abs() < 1e-10));
    }

    #[test]
    fn unit_force_lifts_flat_graph_by_tau() {
        let mesh = disk_mesh_with_rings(4).unwrap();
        let p = flat_problem(1.0, 0.0);
        let tau = 0.02;
        let stepper = Stepper::new(&p, &mesh, SchemeConfig::new(tau, 0.1)).unwrap();
        let s0 = stepper.initial_state().unwrap();
        let u1 = stepper.graph_step(&s0).unwrap();
        assert!(u1
            .values()
            .iter()
            .all(|&v| (v - tau).abs() < 1e-10 * tau.max(1.0)));
    }

    #[test]
    fn zero_is_a_fixed_point_of_the_surface_step() {
        let mesh = disk_mesh_with_rings(3).unwrap();
        let p = flat_problem(0.0, 0.0);
        let stepper = Stepper::new(&p, &mesh, SchemeConfig::new(0.01, 0.1)).unwrap();
        let s0 = stepper.initial_state().unwrap();
        let u1 = stepper.graph_step(&s0).unwrap();
        let w1 = stepper.surface_step(&s0, &u1).unwrap();
        assert!(w1.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_length_run_returns_initial_state() {
        let mesh = generate_disk_mesh(0).unwrap();
        let p = flat_problem(0.0, 0.0);
        let mut seen = Vec::new();
        let mut obs = |s: &State<'_>| {
            seen.push(s.m);
            Ok(())
        };
        let summary = run(&p, &mesh, SchemeConfig::new(0.01, 0.0), &mut [&mut obs]).unwrap();
        assert_eq!(summary.steps, 0);
        assert_eq!(summary.final_state.m, 0);
        assert_eq!(seen, vec![0]);
    }

    #[test]
    fn two_solves_per_level() {
        let mesh = disk_mesh_with_rings(3).unwrap();
        let p = example1();
        let summary = run(&p, &mesh, SchemeConfig::new(0.01, 0.05), &mut []).unwrap();
        assert_eq!(summary.steps, 5);
        assert_eq!((summary.graph_solves, summary.surface_solves), (5, 5));
        assert!((summary.final_state.t - 0.05).abs() < 1e-15);
    }

    #[test]
    fn projections_reproduce_linear_data() {
        let mesh = disk_mesh_with_rings(4).unwrap();
        let rule = quadrature(4).unwrap();
        let opts = ProjectionOptions::default();
        let lin = |x: [f64; 2]| 0.3 * x[0] - 0.8 * x[1] + 0.1;
        let uh = minimal_surface_projection(
            &mesh,
            &rule,
            lin,
            |_| [0.3, -0.8],
            &Constraints::new(),
            &opts,
        )
        .unwrap();
        for (v, x) in uh.values().iter().zip(mesh.vertices()) {
            assert!((v - lin(*x)).abs() < 1e-10);
        }
        let zero = minimal_surface_projection(
            &mesh,
            &rule,
            |_| 0.0,
            |_| [0.0; 2],
            &Constraints::new(),
            &opts,
        )
        .unwrap();
        assert!(zero.values().iter().all(|&v| v == 0.0));

        let flat = FeFunction::zeros(&mesh);
        let bnd = mesh.all_boundary_vertices();
        let wh = w_projection(
            &flat,
            &rule,
            |_, _| [0.0; 2],
            lin,
            |_| [0.3, -0.8],
            &bnd,
            &opts,
        )
        .unwrap();
        for (v, x) in wh.values().iter().zip(mesh.vertices()) {
            assert!((v - lin(*x)).abs() < 1e-10);
        }
        let w0 = w_projection(
            &flat,
            &rule,
            |_, _| [0.0; 2],
            |_| 0.0,
            |_| [0.0; 2],
            &bnd,
            &opts,
        )
        .unwrap();
        assert!(w0.values().iter().all(|&v| v == 0.0));
        assert!(w_projection(
            &flat,
            &rule,
            |_, _| [0.0; 2],
            |_| 0.0,
            |_| [0.0; 2],
            &[],
            &opts
        )
        .is_err());
    }
}
