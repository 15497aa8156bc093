//! Self-contained invariant suites, one per module.
//!
//! Every check is deterministic (sampled checks use a seeded ChaCha stream)
//! and runs on small meshes, so the whole collection takes seconds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{eoc, symmetry_defect};
use crate::error::{Error, Result};
use crate::fem::{
    quadrature, Assembler, CgOptions, Constraints, CsrMatrix, FeFunction, SparseSystem,
};
use crate::geometry::{e_matrix, nu_of, q_of, Sym2};
use crate::io::{surface_vtk_string, Snapshot};
use crate::mesh::{
    disk_mesh_with_rings, generate_disk_mesh, generate_rect_mesh, max_circle_deviation, mesh_size,
    refine_uniform, BoundaryTag,
};
use crate::problems::{
    example1, example2, forcing_residual, ExactSolution, GDecomposition, GraphBc, InitialData,
    ProblemSpec,
};
use crate::scheme::{SchemeConfig, Stepper};

pub const SUITES: [&str; 7] = [
    "mesh", "fem", "geometry", "problems", "scheme", "analysis", "io",
];

/// Reference mesh sizes of disk levels 0 to 4.
pub const DISK_H_SERIES: [f64; 5] = [0.1961, 0.0996, 0.0538, 0.0269, 0.0135];

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|r| r.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.results.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }
}

type Outcome = std::result::Result<String, String>;

struct Suite {
    name: &'static str,
    results: Vec<CheckResult>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            results: Vec::new(),
        }
    }

    fn check(&mut self, name: &'static str, f: impl FnOnce() -> Outcome) {
        let (passed, detail) = match f() {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        self.results.push(CheckResult {
            suite: self.name,
            name,
            passed,
            detail,
        });
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s(e: Error) -> String {
    e.to_string()
}

/// Cholesky factorisation succeeds with positive pivots.
pub fn is_positive_definite(a: &[Vec<f64>]) -> bool {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for j in 0..n {
        let d = a[j][j] - (0..j).map(|k| l[j][k] * l[j][k]).sum::<f64>();
        if !(d > 0.0) {
            return false;
        }
        l[j][j] = d.sqrt();
        for i in j + 1..n {
            let s = a[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            l[i][j] = s / l[j][j];
        }
    }
    true
}

fn reduced_is_spd(system: &SparseSystem) -> bool {
    let r = system.reduce();
    r.matrix.is_symmetric() && is_positive_definite(&r.matrix.to_dense())
}

/// Relative residual `‖A x - b‖ / ‖b‖` of the reduced system at `x`.
pub fn reduced_residual(system: &SparseSystem, x: &[f64]) -> f64 {
    let r = system.reduce();
    let xr = r.restrict(x);
    let ax = r.matrix.matvec(&xr);
    let num = ax
        .iter()
        .zip(&r.rhs)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let den = r.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

fn mesh_suite() -> Vec<CheckResult> {
    let mut s = Suite::new("mesh");
    s.check("disk_h_series", || {
        let mut hs = Vec::new();
        for (level, &target) in DISK_H_SERIES.iter().enumerate().take(4) {
            let h = mesh_size(&generate_disk_mesh(level).map_err(e2s)?);
            ensure((h - target).abs() <= 0.15 * target, || {
                format!("level {level}: h = {h}, reference {target}")
            })?;
            hs.push(h);
        }
        Ok(format!("{hs:.4?}"))
    });
    s.check("disk_boundary_on_circle", || {
        for level in 0..3 {
            let d = max_circle_deviation(&generate_disk_mesh(level).map_err(e2s)?);
            ensure(d <= 1e-12, || format!("level {level}: deviation {d:e}"))?;
        }
        Ok(String::new())
    });
    s.check("disk_level_guard", || match generate_disk_mesh(99) {
        Err(Error::LevelTooLarge { .. }) => Ok(String::new()),
        other => Err(format!("expected LevelTooLarge, got {other:?}")),
    });
    s.check("rect_tags_and_symmetry", || {
        let target = 0.25;
        let mesh = generate_rect_mesh((-2.0, 2.0), (-2.0, 2.0), target).map_err(e2s)?;
        let count = |tag| {
            mesh.boundary_edges()
                .iter()
                .filter(|e| e.tag == tag)
                .count()
        };
        let (lr, tb) = (count(BoundaryTag::LeftRight), count(BoundaryTag::TopBottom));
        ensure(lr == tb, || format!("LEFT_RIGHT {lr} vs TOP_BOTTOM {tb}"))?;
        for e in mesh.boundary_edges() {
            let [a, b] = e.vertices.map(|v| mesh.vertices()[v]);
            let on_lr = a[0].abs() == 2.0 && b[0] == a[0];
            let on_tb = a[1].abs() == 2.0 && b[1] == a[1];
            let ok = match e.tag {
                BoundaryTag::LeftRight => on_lr,
                BoundaryTag::TopBottom => on_tb,
                BoundaryTag::Outer => false,
            };
            ensure(ok, || format!("edge {a:?}-{b:?} tagged {}", e.tag))?;
        }
        let h = mesh.h_max();
        ensure(h <= target * 2f64.sqrt() + 1e-12, || format!("h_max {h}"))?;
        let defect =
            symmetry_defect(&FeFunction::interpolate(&mesh, |x| x[1] * x[1])).map_err(e2s)?;
        ensure(defect < 1e-12, || format!("mirror defect {defect:e}"))?;
        Ok(format!("{lr} edges per tag pair"))
    });
    s.check("refinement_preserves_area", || {
        let coarse = generate_rect_mesh((0.0, 1.0), (0.0, 2.0), 0.5).map_err(e2s)?;
        let fine = refine_uniform(&coarse).map_err(e2s)?;
        ensure(fine.num_triangles() == 4 * coarse.num_triangles(), || {
            "triangle count".into()
        })?;
        let d = (fine.total_area() - coarse.total_area()).abs();
        ensure(d < 1e-12, || format!("area changed by {d:e}"))?;
        Ok(String::new())
    });
    s.results
}

fn fem_suite() -> Vec<CheckResult> {
    let mut s = Suite::new("fem");
    s.check("quadrature_exactness", || {
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        for degree in 1..=4u32 {
            let rule = quadrature(degree as usize).map_err(e2s)?;
            for a in 0..=degree {
                for b in 0..=degree - a {
                    let got = rule.integrate_reference(|x, y| x.powi(a as i32) * y.powi(b as i32));
                    let want = fact(a) * fact(b) / fact(a + b + 2);
                    ensure((got - want).abs() < 1e-14, || {
                        format!("degree {degree} x^{a}y^{b}")
                    })?;
                }
            }
        }
        Ok(String::new())
    });
    let mesh = match disk_mesh_with_rings(5) {
        Ok(m) => m,
        Err(e) => {
            s.check("small_disk", || Err(e.to_string()));
            return s.results;
        }
    };
    let rule = quadrature(4).expect("degree 4");
    let asm = Assembler::new(&mesh, rule);
    s.check("mass_matrix", || {
        let m = asm.mass(|_, _| 1.0);
        ensure(m.is_symmetric(), || "not symmetric".into())?;
        ensure(m.diagonal().iter().all(|&d| d > 0.0), || {
            "non-positive diagonal".into()
        })?;
        let total: f64 = m.values().iter().sum();
        ensure((total - mesh.total_area()).abs() < 1e-12, || {
            format!("sum {total}")
        })?;
        Ok(String::new())
    });
    s.check("stiffness_kernel", || {
        let k = asm.stiffness(|_, _| Sym2::identity());
        ensure(k.is_symmetric(), || "not symmetric".into())?;
        let r = k.matvec(&vec![1.0; mesh.num_vertices()]);
        let worst = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        ensure(worst < 1e-12, || format!("K·1 = {worst:e}"))?;
        Ok(String::new())
    });
    s.check("reduced_matrix_spd", || {
        let mut a = asm.stiffness(|_, _| e_matrix([0.4, -0.3]));
        a.add_scaled(0.1, &asm.mass(|_, _| 1.0));
        let constraints: Constraints = mesh
            .all_boundary_vertices()
            .into_iter()
            .map(|v| (v, 0.0))
            .collect();
        let sys =
            SparseSystem::new(a, vec![0.0; mesh.num_vertices()]).with_constraints(constraints);
        ensure(reduced_is_spd(&sys), || "Cholesky failed".into())?;
        Ok(format!("{} free dofs", sys.reduce().free.len()))
    });
    s.check("laplace_reproduces_linear", || {
        let k = asm.stiffness(|_, _| Sym2::identity());
        let g = |x: [f64; 2]| 2.0 * x[0] - x[1] + 0.5;
        let constraints: Constraints = mesh
            .all_boundary_vertices()
            .into_iter()
            .map(|v| (v, g(mesh.vertices()[v])))
            .collect();
        let x = SparseSystem::new(k, vec![0.0; mesh.num_vertices()])
            .with_constraints(constraints)
            .solve(&CgOptions::default(), None)
            .map_err(e2s)?;
        let worst = x
            .iter()
            .zip(mesh.vertices())
            .fold(0.0f64, |a, (v, p)| a.max((v - g(*p)).abs()));
        ensure(worst < 1e-9, || format!("max error {worst:e}"))?;
        Ok(String::new())
    });
    s.check("identity_solve", || {
        let b = vec![1.0, -2.0, 3.0];
        let x = crate::fem::solve_spd(&CsrMatrix::identity(3), &b, 1e-12).map_err(e2s)?;
        ensure(x == b, || format!("{x:?}"))?;
        Ok(String::new())
    });
    s.results
}

/// Samples of the geometric kernel identities; returns worst deviations.
pub fn kernel_samples(samples: usize, seed: u64) -> std::result::Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut nu_dev, mut det_dev) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
        let p = [
            rng.gen_range(-1.0..1.0) * scale,
            rng.gen_range(-1.0..1.0) * scale,
        ];
        let xi = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let q = q_of(p);
        let nu = nu_of(p);
        let n = (nu[0] * nu[0] + nu[1] * nu[1] + nu[2] * nu[2]).sqrt();
        nu_dev = nu_dev.max((n - 1.0).abs());
        ensure(q >= 1.0 && q >= p[0].hypot(p[1]), || {
            format!("Q({p:?}) = {q}")
        })?;
        let e = e_matrix(p);
        let lhs = e.bilinear(xi, xi);
        let rhs = (xi[0] * xi[0] + xi[1] * xi[1]) / q;
        ensure(lhs >= rhs - 1e-12, || {
            format!("ellipticity at {p:?}: {lhs} < {rhs}")
        })?;
        det_dev = det_dev.max((e.det() - 1.0).abs());
    }
    ensure(nu_dev <= 1e-15, || format!("|ν| deviation {nu_dev:e}"))?;
    ensure(det_dev <= 1e-12, || format!("det E deviation {det_dev:e}"))?;
    Ok(format!(
        "{samples} samples, |ν| dev {nu_dev:.1e}, det dev {det_dev:.1e}"
    ))
}

fn geometry_suite(seed: u64) -> Vec<CheckResult> {
    let mut s = Suite::new("geometry");
    s.check("kernel_properties", || kernel_samples(10_000, seed));
    s.check("e_eigenvalues", || {
        let p = [3.0, 4.0];
        let [lo, hi] = e_matrix(p).eigenvalues();
        let q = q_of(p);
        ensure(
            (lo - 1.0 / q).abs() < 1e-12 && (hi - q).abs() < 1e-12,
            || format!("{lo}, {hi}"),
        )?;
        Ok(String::new())
    });
    s.results
}

/// Space-time sample grid on the unit disk: `nr × nθ` points times `nt` times.
pub fn disk_grid(nr: usize, ntheta: usize, nt: usize, t_final: f64) -> Vec<([f64; 2], f64)> {
    let mut pts = Vec::with_capacity(nr * ntheta * nt);
    for k in 0..nt {
        let t = t_final * (k + 1) as f64 / nt as f64;
        for i in 0..nr {
            let r = 0.95 * (i as f64 + 0.5) / nr as f64;
            for j in 0..ntheta {
                let th = std::f64::consts::TAU * j as f64 / ntheta as f64;
                pts.push(([r * th.cos(), r * th.sin()], t));
            }
        }
    }
    pts
}

/// Largest central-difference mismatch of the analytic derivatives.
pub fn fd_derivative_defect(ex: &dyn ExactSolution, x: [f64; 2], t: f64, step: f64) -> f64 {
    let d = step;
    let shift = |k: usize, s: f64| {
        let mut y = x;
        y[k] += s;
        y
    };
    let mut worst = 0.0f64;
    let mut cmp = |a: f64, b: f64| worst = worst.max((a - b).abs() / b.abs().max(1.0));
    cmp((ex.u(x, t + d) - ex.u(x, t - d)) / (2.0 * d), ex.u_t(x, t));
    cmp((ex.w(x, t + d) - ex.w(x, t - d)) / (2.0 * d), ex.w_t(x, t));
    for k in 0..2 {
        cmp(
            (ex.u(shift(k, d), t) - ex.u(shift(k, -d), t)) / (2.0 * d),
            ex.grad_u(x, t)[k],
        );
        cmp(
            (ex.w(shift(k, d), t) - ex.w(shift(k, -d), t)) / (2.0 * d),
            ex.grad_w(x, t)[k],
        );
        for l in 0..2 {
            let gu = (ex.grad_u(shift(l, d), t)[k] - ex.grad_u(shift(l, -d), t)[k]) / (2.0 * d);
            let gw = (ex.grad_w(shift(l, d), t)[k] - ex.grad_w(shift(l, -d), t)[k]) / (2.0 * d);
            cmp(gu, ex.hess_u(x, t)[k][l]);
            cmp(gw, ex.hess_w(x, t)[k][l]);
        }
    }
    worst
}

fn problems_suite() -> Vec<CheckResult> {
    let mut s = Suite::new("problems");
    for (name, spec) in [
        ("example1_forcing", example1()),
        ("example2_forcing", example2()),
    ] {
        s.check(name, || {
            let ex = spec.exact().map_err(e2s)?;
            let (mut res, mut fd) = (0.0f64, 0.0f64);
            for (x, t) in disk_grid(10, 10, 5, spec.t_final) {
                let (ru, rw) = forcing_residual(&spec, x, t).map_err(e2s)?;
                res = res.max(ru.abs()).max(rw.abs());
                fd = fd.max(fd_derivative_defect(&**ex, x, t, 1e-5));
            }
            ensure(res <= 1e-6, || format!("strong residual {res:e}"))?;
            ensure(fd <= 1e-6, || format!("finite-difference defect {fd:e}"))?;
            Ok(format!("residual {res:.1e}, fd {fd:.1e}"))
        });
    }
    s.check("example2_neumann", || {
        let spec = example2();
        let ex = spec.exact().map_err(e2s)?;
        let mut worst = 0.0f64;
        for k in 0..64 {
            let th = std::f64::consts::TAU * k as f64 / 64.0;
            let n = [th.cos(), th.sin()];
            for t in [0.0, 0.05, 0.1] {
                let g = ex.grad_u(n, t);
                worst = worst.max((g[0] * n[0] + g[1] * n[1]).abs());
            }
        }
        ensure(worst <= 1e-12, || format!("∂u/∂n = {worst:e}"))?;
        Ok(String::new())
    });
    s.check("alpha_homogeneity", || {
        for g in [
            GDecomposition::velocity_times_w(),
            GDecomposition::abs_velocity_times_w(),
        ] {
            for r in [-2.5, -0.1, 0.0, 0.3, 7.0] {
                for lambda in [0.5, 1.0, 3.0] {
                    ensure(g.alpha(lambda * r) == lambda * g.alpha(r), || {
                        format!("α({lambda}·{r})")
                    })?;
                }
            }
        }
        Ok(String::new())
    });
    s.results
}

fn flat_spec(f: f64, u0: f64, w0: InitialData) -> ProblemSpec {
    let mut p = example1();
    p.key = "flat".into();
    p.exact = None;
    p.f = std::sync::Arc::new(move |_| f);
    p.g = GDecomposition::zero();
    p.graph_bc = GraphBc::NeumannZero;
    p.u0 = InitialData::constant(u0);
    p.w0 = w0;
    p.w_bc.value = std::sync::Arc::new(|_, _| 0.0);
    p
}

/// Max drift of a flat graph with `f ≡ 0` after `steps` steps.
pub fn flat_stationarity(steps: usize) -> Result<f64> {
    let mesh = disk_mesh_with_rings(5)?;
    let spec = flat_spec(
        0.0,
        0.3,
        InitialData::interpolated(|x| 1.0 - x[0] * x[0] - x[1] * x[1]),
    );
    let stepper = Stepper::new(&spec, &mesh, SchemeConfig::new(1e-3, steps as f64 * 1e-3))?;
    let mut state = stepper.initial_state()?;
    for _ in 0..steps {
        state = stepper.step(&state)?;
    }
    Ok(state
        .u
        .values()
        .iter()
        .fold(0.0f64, |a, v| a.max((v - 0.3).abs())))
}

/// `‖w^m_h‖` over `steps` steps of the flat heat limit.
pub fn heat_decay(steps: usize) -> Result<Vec<f64>> {
    let mesh = disk_mesh_with_rings(5)?;
    let spec = flat_spec(
        0.0,
        0.0,
        InitialData::interpolated(|x| 1.0 - x[0] * x[0] - x[1] * x[1]),
    );
    let stepper = Stepper::new(&spec, &mesh, SchemeConfig::new(1e-3, steps as f64 * 1e-3))?;
    let rule = quadrature(4)?;
    let mut state = stepper.initial_state()?;
    let mut norms = vec![state.w.l2_norm_sq(&rule).sqrt()];
    for _ in 0..steps {
        state = stepper.step(&state)?;
        norms.push(state.w.l2_norm_sq(&rule).sqrt());
    }
    Ok(norms)
}

fn scheme_suite() -> Vec<CheckResult> {
    let mut s = Suite::new("scheme");
    s.check("flat_stationarity", || {
        let drift = flat_stationarity(100).map_err(e2s)?;
        ensure(drift <= 1e-9, || format!("drift {drift:e}"))?;
        Ok(format!("drift {drift:.1e}"))
    });
    s.check("heat_decay", || {
        let norms = heat_decay(20).map_err(e2s)?;
        ensure(
            norms.windows(2).all(|p| p[1] <= p[0] * (1.0 + 1e-12)),
            || format!("{norms:?}"),
        )?;
        ensure(norms[20] < norms[0], || "no decay".into())?;
        Ok(format!("{:.4} -> {:.4}", norms[0], norms[20]))
    });
    s.check("step_matrices_spd_and_residual", || {
        let mesh = disk_mesh_with_rings(5).map_err(e2s)?;
        let spec = example1();
        let config = SchemeConfig::new(mesh_size(&mesh).powi(2), 0.1);
        let stepper = Stepper::new(&spec, &mesh, config).map_err(e2s)?;
        let mut state = stepper.initial_state().map_err(e2s)?;
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let gs = stepper.graph_system(&state).map_err(e2s)?;
            ensure(reduced_is_spd(&gs), || {
                format!("graph matrix at m={}", state.m)
            })?;
            let u = stepper.graph_step(&state).map_err(e2s)?;
            worst = worst.max(reduced_residual(&gs, u.values()));
            let ss = stepper.surface_system(&state, &u).map_err(e2s)?;
            ensure(reduced_is_spd(&ss), || {
                format!("surface matrix at m={}", state.m)
            })?;
            let w = stepper.surface_step(&state, &u).map_err(e2s)?;
            worst = worst.max(reduced_residual(&ss, w.values()));
            state = crate::scheme::State {
                m: state.m + 1,
                t: config.time(state.m + 1),
                u,
                w,
            };
        }
        ensure(worst <= 10.0 * config.solver_tol, || {
            format!("residual {worst:e}")
        })?;
        Ok(format!("residual {worst:.1e}"))
    });
    s.results
}

fn analysis_suite(seed: u64) -> Vec<CheckResult> {
    let mut s = Suite::new("analysis");
    s.check("eoc_examples", || {
        let q = eoc((0.2, 0.04), (0.1, 0.01)).ok_or("undefined")?;
        ensure((q - 2.0).abs() < 1e-14, || format!("{q}"))?;
        ensure(eoc((0.2, 0.5), (0.1, 0.5)) == Some(0.0), || {
            "equal errors".into()
        })?;
        ensure(eoc((0.2, 0.0), (0.1, 0.5)).is_none(), || {
            "zero error".into()
        })?;
        Ok(String::new())
    });
    s.check("eoc_scale_invariance", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let (hc, hf) = (rng.gen_range(0.05..1.0), rng.gen_range(0.001..0.05));
            let (ec, ef, c) = (
                rng.gen_range(1e-6..1.0),
                rng.gen_range(1e-9..1.0),
                rng.gen_range(1e-3..1e3),
            );
            let a = eoc((hc, ec), (hf, ef)).ok_or("undefined")?;
            let b = eoc((hc, c * ec), (hf, c * ef)).ok_or("undefined")?;
            ensure((a - b).abs() <= 1e-9 * a.abs().max(1.0), || {
                format!("{a} vs {b}")
            })?;
        }
        Ok(String::new())
    });
    s.results
}

fn io_suite() -> Vec<CheckResult> {
    let mut s = Suite::new("io");
    s.check("vtk_structure", || {
        let mesh = generate_disk_mesh(0).map_err(e2s)?;
        let u = vec![1.0; mesh.num_vertices()];
        let w: Vec<f64> = (0..mesh.num_vertices()).map(|i| i as f64).collect();
        let snap = Snapshot::new(0, 0.0, &mesh, &u, &w).map_err(e2s)?;
        let text = surface_vtk_string(&snap);
        ensure(text == surface_vtk_string(&snap), || {
            "non-deterministic".into()
        })?;
        let header = format!("POINTS {} double", mesh.num_vertices());
        ensure(text.contains(&header), || "point header".into())?;
        let n = mesh.num_vertices();
        let z_ok = text
            .lines()
            .skip_while(|l| !l.starts_with("POINTS"))
            .skip(1)
            .take(n)
            .all(|l| {
                l.split_whitespace()
                    .nth(2)
                    .and_then(|z| z.parse::<f64>().ok())
                    == Some(1.0)
            });
        ensure(z_ok, || "z coordinates".into())?;
        Ok(String::new())
    });
    s.results
}

/// Runs one named suite.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CheckResult>> {
    Ok(match name {
        "mesh" => mesh_suite(),
        "fem" => fem_suite(),
        "geometry" => geometry_suite(seed),
        "problems" => problems_suite(),
        "scheme" => scheme_suite(),
        "analysis" => analysis_suite(seed),
        "io" => io_suite(),
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown check suite '{other}'"
            )))
        }
    })
}

/// Runs every suite in [`SUITES`] order.
pub fn run_all(seed: u64) -> CheckReport {
    let results = SUITES
        .iter()
        .flat_map(|name| run_suite(name, seed).expect("known suite"))
        .collect();
    CheckReport { results }
}
