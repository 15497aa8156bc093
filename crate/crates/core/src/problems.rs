//! Problem definitions: data `f`, `g`, initial and boundary conditions and,
//! for the convergence examples, closed-form solutions with the forcing that
//! makes them exact.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{e_matrix, q_of};
use crate::mesh::{generate_disk_mesh, generate_rect_mesh, BoundaryTag, Mesh, MAX_DISK_LEVEL};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn([f64; 2]) -> f64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn([f64; 2]) -> [f64; 2] + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn([f64; 2], f64) -> f64 + Send + Sync>;

/// Selection keys accepted by [`ProblemSpec::by_key`].
pub const PROBLEM_KEYS: [&str; 5] = [
    "example1",
    "example2",
    "contact-angle",
    "digm-planar",
    "digm-wave",
];

/// `g(r, s) = α(r) β(s) + β̃(s)` with the positively homogeneous
/// `α(r) = α₊|r|` for `r ≥ 0` and `α₋|r|` for `r < 0`.
#[derive(Clone)]
pub struct GDecomposition {
    pub alpha_pos: f64,
    pub alpha_neg: f64,
    pub beta: ScalarFn,
    pub beta_tilde: ScalarFn,
}

impl GDecomposition {
    pub fn alpha(&self, r: f64) -> f64 {
        if r >= 0.0 {
            self.alpha_pos * r.abs()
        } else {
            self.alpha_neg * r.abs()
        }
    }

    pub fn eval(&self, r: f64, s: f64) -> f64 {
        self.alpha(r) * (self.beta)(s) + (self.beta_tilde)(s)
    }

    /// `g(V, w) = V w`.
    pub fn velocity_times_w() -> Self {
        GDecomposition {
            alpha_pos: 1.0,
            alpha_neg: -1.0,
            beta: Arc::new(|s| s),
            beta_tilde: Arc::new(|_| 0.0),
        }
    }

    /// `g(V, w) = |V| w`.
    pub fn abs_velocity_times_w() -> Self {
        GDecomposition {
            alpha_pos: 1.0,
            alpha_neg: 1.0,
            beta: Arc::new(|s| s),
            beta_tilde: Arc::new(|_| 0.0),
        }
    }

    pub fn zero() -> Self {
        GDecomposition {
            alpha_pos: 0.0,
            alpha_neg: 0.0,
            beta: Arc::new(|_| 0.0),
            beta_tilde: Arc::new(|_| 0.0),
        }
    }
}

impl fmt::Debug for GDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GDecomposition")
            .field("alpha_pos", &self.alpha_pos)
            .field("alpha_neg", &self.alpha_neg)
            .finish_non_exhaustive()
    }
}

/// Initial datum. Without a gradient the datum is only interpolated; with
/// one, the Ritz projections are used.
#[derive(Clone)]
pub struct InitialData {
    pub value: SpaceFn,
    pub gradient: Option<GradFn>,
}

impl InitialData {
    pub fn smooth(
        value: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn([f64; 2]) -> [f64; 2] + Send + Sync + 'static,
    ) -> Self {
        InitialData {
            value: Arc::new(value),
            gradient: Some(Arc::new(gradient)),
        }
    }

    pub fn constant(c: f64) -> Self {
        InitialData::smooth(move |_| c, |_| [0.0, 0.0])
    }

    pub fn interpolated(value: impl Fn([f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        InitialData {
            value: Arc::new(value),
            gradient: None,
        }
    }
}

/// Boundary condition of the height equation.
#[derive(Clone)]
pub enum GraphBc {
    /// Right-angle contact: natural condition `∇u · n = 0`.
    NeumannZero,
    /// `∇u · n / Q(u) = -cos α(t)` on the edges carrying `tag`.
    ContactAngle {
        tag: BoundaryTag,
        cos_alpha: ScalarFn,
    },
    /// Prescribed height on the whole boundary.
    Dirichlet { value: SpaceTimeFn },
}

/// Dirichlet data for `w` on the listed tags; natural (zero flux) elsewhere.
#[derive(Clone)]
pub struct WBoundary {
    pub dirichlet_tags: Vec<BoundaryTag>,
    pub value: SpaceTimeFn,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Domain {
    UnitDisk,
    Rectangle { x: (f64, f64), y: (f64, f64) },
}

impl Domain {
    /// Mesh of the given refinement level. Rectangles use square cells of
    /// side `0.5 / 2^level`.
    pub fn mesh(&self, level: usize) -> Result<Mesh> {
        match *self {
            Domain::UnitDisk => generate_disk_mesh(level),
            Domain::Rectangle { x, y } => {
                if level > MAX_DISK_LEVEL {
                    return Err(Error::LevelTooLarge {
                        level,
                        max: MAX_DISK_LEVEL,
                    });
                }
                generate_rect_mesh(x, y, 0.5 / (1u64 << level) as f64)
            }
        }
    }
}

/// A smooth solution `(u, w)` with all derivatives needed to build and
/// verify manufactured forcing terms.
pub trait ExactSolution: Send + Sync {
    fn u(&self, x: [f64; 2], t: f64) -> f64;
    fn grad_u(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn hess_u(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2];
    fn u_t(&self, x: [f64; 2], t: f64) -> f64;
    fn w(&self, x: [f64; 2], t: f64) -> f64;
    fn grad_w(&self, x: [f64; 2], t: f64) -> [f64; 2];
    fn hess_w(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2];
    fn w_t(&self, x: [f64; 2], t: f64) -> f64;
}

/// Radial height profiles `u = 5 sin(t) ψ(|x|²)` of the two convergence
/// examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RadialProfile {
    /// `ψ(s) = 1 - s`
    Dirichlet,
    /// `ψ(s) = 1 + (1 - s)²`
    Neumann,
}

/// `u = 5 sin(t) ψ(|x|²)`, `w = e^{-t} (1 + |x|²)`.
#[derive(Clone, Copy, Debug)]
pub struct ManufacturedSolution {
    pub profile: RadialProfile,
}

impl ManufacturedSolution {
    /// `(ψ, ψ', ψ'')` at `s = |x|²`.
    fn psi(&self, s: f64) -> (f64, f64, f64) {
        match self.profile {
            RadialProfile::Dirichlet => (1.0 - s, -1.0, 0.0),
            RadialProfile::Neumann => (1.0 + (1.0 - s).powi(2), -2.0 * (1.0 - s), 2.0),
        }
    }
}

fn sq(x: [f64; 2]) -> f64 {
    x[0] * x[0] + x[1] * x[1]
}

impl ExactSolution for ManufacturedSolution {
    fn u(&self, x: [f64; 2], t: f64) -> f64 {
        5.0 * t.sin() * self.psi(sq(x)).0
    }

    fn grad_u(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let c = 10.0 * t.sin() * self.psi(sq(x)).1;
        [c * x[0], c * x[1]]
    }

    fn hess_u(&self, x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        let a = 5.0 * t.sin();
        let (_, d1, d2) = self.psi(sq(x));
        let (c, d) = (4.0 * a * d2, 2.0 * a * d1);
        [
            [c * x[0] * x[0] + d, c * x[0] * x[1]],
            [c * x[0] * x[1], c * x[1] * x[1] + d],
        ]
    }

    fn u_t(&self, x: [f64; 2], t: f64) -> f64 {
        5.0 * t.cos() * self.psi(sq(x)).0
    }

    fn w(&self, x: [f64; 2], t: f64) -> f64 {
        (-t).exp() * (1.0 + sq(x))
    }

    fn grad_w(&self, x: [f64; 2], t: f64) -> [f64; 2] {
        let c = 2.0 * (-t).exp();
        [c * x[0], c * x[1]]
    }

    fn hess_w(&self, _x: [f64; 2], t: f64) -> [[f64; 2]; 2] {
        let c = 2.0 * (-t).exp();
        [[c, 0.0], [0.0, c]]
    }

    fn w_t(&self, x: [f64; 2], t: f64) -> f64 {
        -self.w(x, t)
    }
}

/// Variant of the wavy grain-boundary initial height.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ic2Variant {
    /// `ε sin(x₁/ε)` in the middle band, as printed; jumps at the breakpoints.
    #[default]
    Literal,
    /// `1 + ε sin(x₁/ε)` in the middle band; continuous.
    Continuous,
}

impl FromStr for Ic2Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(Ic2Variant::Literal),
            "continuous" => Ok(Ic2Variant::Continuous),
            other => Err(Error::Parse(format!(
                "unknown ic2 variant `{other}` (literal|continuous)"
            ))),
        }
    }
}

#[derive(Clone)]
pub struct ProblemSpec {
    pub key: String,
    pub domain: Domain,
    pub t_final: f64,
    pub f: ScalarFn,
    pub g: GDecomposition,
    pub u0: InitialData,
    pub w0: InitialData,
    pub graph_bc: GraphBc,
    pub w_bc: WBoundary,
    /// When present, manufactured forcing terms are added to both equations.
    pub exact: Option<Arc<dyn ExactSolution>>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("key", &self.key)
            .field("domain", &self.domain)
            .field("t_final", &self.t_final)
            .field("has_exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    pub fn by_key(key: &str, ic2: Ic2Variant) -> Result<Self> {
        match key {
            "example1" => Ok(example1()),
            "example2" => Ok(example2()),
            "contact-angle" => Ok(contact_angle_problem()),
            "digm-planar" => Ok(digm_planar()),
            "digm-wave" => Ok(digm_wave(ic2)),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }

    pub fn exact(&self) -> Result<&Arc<dyn ExactSolution>> {
        self.exact
            .as_ref()
            .ok_or_else(|| Error::MissingExactSolution(self.key.clone()))
    }

    /// Extra source of the height equation; zero without an exact solution.
    pub fn forcing_u(&self, x: [f64; 2], t: f64) -> f64 {
        self.exact.as_ref().map_or(0.0, |ex| {
            let p = ex.grad_u(x, t);
            let q = q_of(p);
            ex.u_t(x, t) / q - mean_curvature(ex.as_ref(), x, t) - (self.f)(ex.w(x, t))
        })
    }

    /// Extra source of the surface equation in its graph form; zero without
    /// an exact solution.
    pub fn forcing_w(&self, x: [f64; 2], t: f64) -> f64 {
        self.exact.as_ref().map_or(0.0, |ex| {
            let p = ex.grad_u(x, t);
            let q = q_of(p);
            let h = mean_curvature(ex.as_ref(), x, t);
            let gw = ex.grad_w(x, t);
            let w = ex.w(x, t);
            let v = ex.u_t(x, t) / q;
            let pgw = p[0] * gw[0] + p[1] * gw[1];
            // div(E ∇w) = E : D²w - H ∇u·∇w because div E(∇u) = -H ∇u
            let div_e_grad_w = e_matrix(p).contract(ex.hess_w(x, t)) - h * pgw;
            let div_w_flux = pgw / q + w * h;
            ex.w_t(x, t) - div_e_grad_w / q - v * div_w_flux - self.g.eval(v, w)
        })
    }
}

/// `H = ∇·(∇u / Q(u))` in non-divergence form.
fn mean_curvature(ex: &dyn ExactSolution, x: [f64; 2], t: f64) -> f64 {
    let p = ex.grad_u(x, t);
    let hs = ex.hess_u(x, t);
    let q = q_of(p);
    let lap = hs[0][0] + hs[1][1];
    let php =
        p[0] * (hs[0][0] * p[0] + hs[0][1] * p[1]) + p[1] * (hs[1][0] * p[0] + hs[1][1] * p[1]);
    lap / q - php / (q * q * q)
}

/// Strong-form residuals `(r_u, r_w)` of the manufactured solution, with the
/// forcing terms included; both vanish when the forcing is consistent.
///
/// Divergences are expanded component by component here, independently of
/// the compact identities used to build the forcing.
pub fn forcing_residual(spec: &ProblemSpec, x: [f64; 2], t: f64) -> Result<(f64, f64)> {
    let ex = spec.exact()?;
    let p = ex.grad_u(x, t);
    let hu = ex.hess_u(x, t);
    let gw = ex.grad_w(x, t);
    let hw = ex.hess_w(x, t);
    let w = ex.w(x, t);
    let q = q_of(p);
    let dq = [0, 1].map(|j| (p[0] * hu[0][j] + p[1] * hu[1][j]) / q);

    // ∂_j (u_i / Q)
    let d_flux = |i: usize, j: usize| hu[i][j] / q - p[i] * dq[j] / (q * q);
    let div_u_flux = d_flux(0, 0) + d_flux(1, 1);

    // Σ_ij ∂_j (E_ij w_i) with E_ij = Q δ_ij - u_i u_j / Q
    let e = |i: usize, j: usize| if i == j { q } else { 0.0 } - p[i] * p[j] / q;
    let de = |i: usize, j: usize| {
        (if i == j { dq[j] } else { 0.0 }) - (hu[i][j] * p[j] + p[i] * hu[j][j]) / q
            + p[i] * p[j] * dq[j] / (q * q)
    };
    let mut div_e_grad_w = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            div_e_grad_w += de(i, j) * gw[i] + e(i, j) * hw[i][j];
        }
    }
    let div_w_flux: f64 = (0..2).map(|i| gw[i] * p[i] / q + w * d_flux(i, i)).sum();

    let u_t = ex.u_t(x, t);
    let v = u_t / q;
    let r_u = u_t / q - div_u_flux - (spec.f)(w) - spec.forcing_u(x, t);
    let r_w =
        ex.w_t(x, t) - div_e_grad_w / q - v * div_w_flux - spec.g.eval(v, w) - spec.forcing_w(x, t);
    Ok((r_u, r_w))
}

fn manufactured(key: &str, profile: RadialProfile) -> ProblemSpec {
    let exact = Arc::new(ManufacturedSolution { profile });
    let (eu, eu_grad, ew, ew_grad) = (exact.clone(), exact.clone(), exact.clone(), exact.clone());
    let graph_bc = match profile {
        RadialProfile::Dirichlet => {
            let e = exact.clone();
            GraphBc::Dirichlet {
                value: Arc::new(move |x, t| e.u(x, t)),
            }
        }
        RadialProfile::Neumann => GraphBc::NeumannZero,
    };
    let wb = exact.clone();
    ProblemSpec {
        key: key.to_string(),
        domain: Domain::UnitDisk,
        t_final: 0.1,
        f: Arc::new(|w| w * w),
        g: GDecomposition::velocity_times_w(),
        u0: InitialData::smooth(move |x| eu.u(x, 0.0), move |x| eu_grad.grad_u(x, 0.0)),
        w0: InitialData::smooth(move |x| ew.w(x, 0.0), move |x| ew_grad.grad_w(x, 0.0)),
        graph_bc,
        w_bc: WBoundary {
            dirichlet_tags: vec![BoundaryTag::Outer],
            value: Arc::new(move |x, t| wb.w(x, t)),
        },
        exact: Some(exact),
    }
}

/// `u = 5 sin(t)(1 - |x|²)`, `w = e^{-t}(1 + |x|²)` on the unit disk,
/// `f(w) = w²`, `g(V, w) = V w`, `u = 0` and `w = 2e^{-t}` on the boundary.
pub fn example1() -> ProblemSpec {
    manufactured("example1", RadialProfile::Dirichlet)
}

/// As [`example1`] with `u = 5 sin(t)(1 + (1 - |x|²)²)`, which meets the
/// boundary at a right angle.
pub fn example2() -> ProblemSpec {
    manufactured("example2", RadialProfile::Neumann)
}

/// Prescribed contact angle with `cos α(t) = cos(2πt - π/2)` on the unit
/// disk; `f(w) = w`, `g(V, w) = |V| w`, `w = 1` on the boundary.
pub fn contact_angle_problem() -> ProblemSpec {
    ProblemSpec {
        key: "contact-angle".into(),
        domain: Domain::UnitDisk,
        t_final: 0.75,
        f: Arc::new(|w| w),
        g: GDecomposition::abs_velocity_times_w(),
        u0: InitialData::constant(0.0),
        w0: InitialData::smooth(|x| 0.5 * (1.0 + sq(x)), |x| [x[0], x[1]]),
        graph_bc: GraphBc::ContactAngle {
            tag: BoundaryTag::Outer,
            cos_alpha: Arc::new(|t| {
                (std::f64::consts::TAU * t - std::f64::consts::FRAC_PI_2).cos()
            }),
        },
        w_bc: WBoundary {
            dirichlet_tags: vec![BoundaryTag::Outer],
            value: Arc::new(|_, _| 1.0),
        },
        exact: None,
    }
}

fn digm(key: &str, t_final: f64, u0: InitialData) -> ProblemSpec {
    ProblemSpec {
        key: key.into(),
        domain: Domain::Rectangle {
            x: (-2.0, 2.0),
            y: (-2.0, 2.0),
        },
        t_final,
        f: Arc::new(|w| w * w),
        g: GDecomposition::abs_velocity_times_w(),
        u0,
        w0: InitialData::interpolated(|_| 0.0),
        graph_bc: GraphBc::NeumannZero,
        w_bc: WBoundary {
            dirichlet_tags: vec![BoundaryTag::LeftRight],
            value: Arc::new(|_, _| 1.0),
        },
        exact: None,
    }
}

/// Grain boundary starting flat at height 1; solute enters at `x₁ = ±2`.
pub fn digm_planar() -> ProblemSpec {
    digm("digm-planar", 0.3, InitialData::constant(1.0))
}

pub const DIGM_WAVE_EPS: f64 = 0.4;

/// Wavy initial grain boundary with breakpoints at `x₁ = ±πε/2`.
pub fn digm_wave_height(x1: f64, variant: Ic2Variant) -> f64 {
    let eps = DIGM_WAVE_EPS;
    let edge = std::f64::consts::FRAC_PI_2 * eps;
    if x1 > edge {
        1.0 + eps
    } else if x1 < -edge {
        1.0 - eps
    } else {
        let wave = eps * (x1 / eps).sin();
        match variant {
            Ic2Variant::Literal => wave,
            Ic2Variant::Continuous => 1.0 + wave,
        }
    }
}

pub fn digm_wave(variant: Ic2Variant) -> ProblemSpec {
    digm(
        "digm-wave",
        0.6,
        InitialData::interpolated(move |x| digm_wave_height(x[0], variant)),
    )
}
