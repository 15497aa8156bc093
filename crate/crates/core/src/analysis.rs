//! Error functionals, convergence orders and convergence studies.
//!
//! With `e_u^m = u(t_m) - u_h^m` and `e_w^m = w(t_m) - w_h^m` the monitored
//! quantities are
//!
//! | name | definition |
//! |------|------------|
//! | `E1` | `max_m ‖e_w^m‖²` |
//! | `E2` | `Σ_{m=1}^{M} τ ‖∇e_w^m‖²` |
//! | `E3` | `max_m ‖e_u^m‖²` |
//! | `E4` | `max_m ‖∇e_u^m‖²` |
//! | `E5` | `Σ_{m=0}^{M-1} τ ‖(e_u^{m+1} - e_u^m)/τ‖²` |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::fem::{quadrature, FeFunction, QuadratureRule};
use crate::mesh::mesh_size;
use crate::problems::{ExactSolution, ProblemSpec};
use crate::scheme::{run, Observer, SchemeConfig, State, QUADRATURE_DEGREE};

/// Squared errors of one time level.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepErrors {
    pub m: usize,
    pub t: f64,
    pub w_l2_sq: f64,
    pub w_h1_sq: f64,
    pub u_l2_sq: f64,
    pub u_h1_sq: f64,
    /// `‖(e_u^m - e_u^{m-1})/τ‖²`, zero at `m = 0`.
    pub du_l2_sq: f64,
}

/// Observer accumulating `E1..E5` over a run.
pub struct ErrorObserver {
    exact: Arc<dyn ExactSolution>,
    rule: QuadratureRule,
    tau: f64,
    errors: [f64; 5],
    previous: Option<(f64, Vec<f64>)>,
    history: Vec<StepErrors>,
}

impl ErrorObserver {
    pub fn new(problem: &ProblemSpec, tau: f64) -> Result<Self> {
        Ok(ErrorObserver {
            exact: problem.exact()?.clone(),
            rule: quadrature(QUADRATURE_DEGREE)?,
            tau,
            errors: [0.0; 5],
            previous: None,
            history: Vec::new(),
        })
    }

    /// Current values of `[E1, E2, E3, E4, E5]`.
    pub fn errors(&self) -> [f64; 5] {
        self.errors
    }

    pub fn history(&self) -> &[StepErrors] {
        &self.history
    }
}

impl Observer for ErrorObserver {
    fn observe(&mut self, state: &State<'_>) -> Result<()> {
        let ex = &*self.exact;
        let t = state.t;
        let ew = state
            .w
            .errors(&self.rule, |x| ex.w(x, t), |x| ex.grad_w(x, t));
        let eu = state
            .u
            .errors(&self.rule, |x| ex.u(x, t), |x| ex.grad_u(x, t));
        let mut rec = StepErrors {
            m: state.m,
            t,
            w_l2_sq: ew.l2_sq,
            w_h1_sq: ew.h1_semi_sq,
            u_l2_sq: eu.l2_sq,
            u_h1_sq: eu.h1_semi_sq,
            du_l2_sq: 0.0,
        };
        if let Some((t_old, u_old)) = &self.previous {
            let old = FeFunction::from_values(state.u.mesh(), u_old.clone());
            let tau = self.tau;
            rec.du_l2_sq = crate::fem::integrate(state.u.mesh(), &self.rule, |k, qp| {
                let dh = state.u.eval_at(k, qp) - old.eval_at(k, qp);
                let d = ex.u(qp.x, t) - ex.u(qp.x, *t_old);
                ((d - dh) / tau).powi(2)
            });
            self.errors[1] += tau * rec.w_h1_sq;
            self.errors[4] += tau * rec.du_l2_sq;
        }
        self.errors[0] = self.errors[0].max(rec.w_l2_sq);
        self.errors[2] = self.errors[2].max(rec.u_l2_sq);
        self.errors[3] = self.errors[3].max(rec.u_h1_sq);
        self.previous = Some((t, state.u.values().to_vec()));
        self.history.push(rec);
        Ok(())
    }
}

/// `log(E_c/E_f) / log(h_c/h_f)`; `None` unless both errors are positive and
/// `h_coarse > h_fine`.
pub fn eoc(coarse: (f64, f64), fine: (f64, f64)) -> Option<f64> {
    let ((hc, ec), (hf, ef)) = (coarse, fine);
    if !(ec > 0.0 && ef > 0.0 && hc > hf && hf > 0.0) {
        return None;
    }
    Some((ec / ef).ln() / (hc / hf).ln())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TauRule {
    /// `τ = h²` with the actual mesh size.
    HSquared,
    Fixed(f64),
}

impl TauRule {
    pub fn tau(&self, h: f64) -> f64 {
        match *self {
            TauRule::HSquared => h * h,
            TauRule::Fixed(tau) => tau,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub level: usize,
    pub h: f64,
    pub tau: f64,
    pub errors: [f64; 5],
    pub eoc: [Option<f64>; 5],
}

/// Result of a study: successful levels in order plus per-level failures.
#[derive(Debug, Default)]
pub struct Study {
    pub reports: Vec<ErrorReport>,
    pub failures: Vec<(usize, Error)>,
}

/// Settings shared by every level of a study.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyOptions {
    pub tau_rule: TauRule,
    pub t_final: Option<f64>,
    pub solver_tol: f64,
    /// Policy used across levels; each run uses it internally as well.
    pub policy: ExecPolicy,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            tau_rule: TauRule::HSquared,
            t_final: None,
            solver_tol: crate::fem::DEFAULT_TOL,
            policy: ExecPolicy::default(),
        }
    }
}

/// Runs one level and returns its error report without EOCs.
pub fn run_level(problem: &ProblemSpec, level: usize, opts: &StudyOptions) -> Result<ErrorReport> {
    problem.exact()?;
    let mesh = problem.domain.mesh(level)?;
    let h = mesh_size(&mesh);
    let tau = opts.tau_rule.tau(h);
    let mut config = SchemeConfig::new(tau, opts.t_final.unwrap_or(problem.t_final));
    config.solver_tol = opts.solver_tol;
    config.policy = opts.policy;
    let mut obs = ErrorObserver::new(problem, tau)?;
    run(problem, &mesh, config, &mut [&mut obs])?;
    Ok(ErrorReport {
        level,
        h,
        tau,
        errors: obs.errors(),
        eoc: [None; 5],
    })
}

/// Runs every level (in parallel when the policy allows) and fills in EOCs
/// between consecutive successful levels.
pub fn convergence_study(problem: &ProblemSpec, levels: &[usize], opts: &StudyOptions) -> Study {
    let outcomes = opts
        .policy
        .map_slice(levels, |&level| run_level(problem, level, opts));
    let mut study = Study::default();
    for (&level, outcome) in levels.iter().zip(outcomes) {
        match outcome {
            Ok(r) => study.reports.push(r),
            Err(e) => study.failures.push((level, e)),
        }
    }
    fill_eocs(&mut study.reports);
    study
}

/// Sets the EOCs of every report against its predecessor.
pub fn fill_eocs(reports: &mut [ErrorReport]) {
    for i in 1..reports.len() {
        let (c, f) = (reports[i - 1], &mut reports[i]);
        for k in 0..5 {
            f.eoc[k] = eoc((c.h, c.errors[k]), (f.h, f.errors[k]));
        }
    }
}

pub const CSV_HEADER: &str = "level,h,tau,E1,E2,E3,E4,E5,eoc1,eoc2,eoc3,eoc4,eoc5";

fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

/// Six significant digits in positional notation, for order-one values.
fn sig6_plain(x: f64) -> String {
    let mag = if x == 0.0 {
        0
    } else {
        x.abs().log10().floor() as i32
    };
    if !(-4..6).contains(&mag) {
        return sig6(x);
    }
    format!("{x:.*}", (5 - mag) as usize)
}

/// CSV table of a study with six significant digits.
pub fn reports_to_csv(reports: &[ErrorReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{},{},{}", r.level, sig6(r.h), sig6(r.tau));
        for e in r.errors {
            let _ = write!(out, ",{}", sig6(e));
        }
        for e in r.eoc {
            out.push(',');
            if let Some(v) = e {
                out.push_str(&sig6_plain(v));
            }
        }
        out.push('\n');
    }
    out
}

fn mirror_key(x: [f64; 2]) -> (i64, i64) {
    ((x[0] * 1e9).round() as i64, (x[1] * 1e9).round() as i64)
}

/// `max_i |f_h(x₁, x₂) - f_h(x₁, -x₂)|` over vertices.
///
/// Fails if some vertex has no mirror image in the mesh.
pub fn symmetry_defect(f: &FeFunction<'_>) -> Result<f64> {
    let verts = f.mesh().vertices();
    let index: HashMap<(i64, i64), usize> = verts
        .iter()
        .enumerate()
        .map(|(i, &x)| (mirror_key(x), i))
        .collect();
    let mut worst = 0.0f64;
    for (i, &x) in verts.iter().enumerate() {
        let j = *index
            .get(&mirror_key([x[0], -x[1]]))
            .ok_or_else(|| Error::InvalidMesh(format!("vertex {i} has no mirror image")))?;
        worst = worst.max((f.values()[i] - f.values()[j]).abs());
    }
    Ok(worst)
}

/// Interface midpoint of `u_h` along `x₂ = 0` on the half `x₁ ≥ 0`.
///
/// Scanning from the right boundary inwards, returns the first `x₁` (by
/// linear interpolation between vertices) where `u_h` crosses the mean of its
/// extremes along that line. `None` when the profile is flat or no vertex lies
/// on the line.
pub fn interface_position(u: &FeFunction<'_>) -> Option<f64> {
    let mut line: Vec<(f64, f64)> = u
        .mesh()
        .vertices()
        .iter()
        .zip(u.values())
        .filter(|(x, _)| x[1].abs() < 1e-12 && x[0] >= -1e-12)
        .map(|(x, &v)| (x[0], v))
        .collect();
    if line.len() < 2 {
        return None;
    }
    line.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (lo, hi) = line
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, v)| {
            (lo.min(v), hi.max(v))
        });
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return None;
    }
    let level = 0.5 * (lo + hi);
    line.windows(2).find_map(|p| {
        let ((x0, v0), (x1, v1)) = (p[0], p[1]);
        if (v0 - level) * (v1 - level) <= 0.0 && v0 != v1 {
            Some(x0 + (level - v0) / (v1 - v0) * (x1 - x0))
        } else {
            None
        }
    })
}
