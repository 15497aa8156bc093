use std::sync::Arc;

use graphflow::checks::{flat_stationarity, heat_decay, reduced_residual};
use graphflow::fem::{quadrature, Constraints, FeFunction, SparseSystem};
use graphflow::mesh::{disk_mesh_with_rings, generate_disk_mesh, mesh_size};
use graphflow::problems::*;
use graphflow::scheme::*;
use graphflow::ExecPolicy;
use nalgebra::DMatrix;

fn min_eigenvalue(sys: &SparseSystem) -> f64 {
    let r = sys.reduce();
    assert!(r.matrix.is_symmetric());
    let d = r.matrix.to_dense();
    DMatrix::from_fn(d.len(), d.len(), |i, j| d[i][j])
        .symmetric_eigen()
        .eigenvalues
        .min()
}

#[test]
fn flat_graph_stays_put_for_100_steps() {
    assert!(flat_stationarity(100).unwrap() <= 1e-9);
}

#[test]
fn flat_heat_limit_decays() {
    let norms = heat_decay(30).unwrap();
    assert!(norms.windows(2).all(|p| p[1] <= p[0]));
    assert!(norms[30] < 0.9 * norms[0]);
}

#[test]
fn step_matrices_are_spd_with_small_residuals() {
    let mesh = disk_mesh_with_rings(5).unwrap();
    assert!(mesh.num_vertices() <= 100);
    for spec in [example1(), example2(), contact_angle_problem()] {
        let tau = mesh_size(&mesh).powi(2);
        let config = SchemeConfig::new(tau, 10.0 * tau);
        let stepper = Stepper::new(&spec, &mesh, config).unwrap();
        let mut state = stepper.initial_state().unwrap();
        for m in 0..10 {
            let gs = stepper.graph_system(&state).unwrap();
            assert!(
                min_eigenvalue(&gs) > 0.0,
                "{} graph matrix, m = {m}",
                spec.key
            );
            let u = stepper.graph_step(&state).unwrap();
            assert!(reduced_residual(&gs, u.values()) <= 10.0 * config.solver_tol);
            let ss = stepper.surface_system(&state, &u).unwrap();
            assert!(
                min_eigenvalue(&ss) > 0.0,
                "{} surface matrix, m = {m}",
                spec.key
            );
            let w = stepper.surface_step(&state, &u).unwrap();
            assert!(reduced_residual(&ss, w.values()) <= 10.0 * config.solver_tol);
            state = State {
                m: m + 1,
                t: config.time(m + 1),
                u,
                w,
            };
        }
    }
}

#[test]
fn dirichlet_data_is_imposed() {
    let mesh = generate_disk_mesh(0).unwrap();
    let spec = example1();
    let config = SchemeConfig::new(0.01, 0.03);
    let summary = run(&spec, &mesh, config, &mut []).unwrap();
    let ex = spec.exact().unwrap();
    let s = &summary.final_state;
    for v in mesh.all_boundary_vertices() {
        let x = mesh.vertices()[v];
        assert!(s.u.values()[v].abs() < 1e-14);
        assert!((s.w.values()[v] - ex.w(x, s.t)).abs() < 1e-14);
    }
}

#[test]
fn observers_see_every_level_in_order() {
    let mesh = generate_disk_mesh(0).unwrap();
    let spec = example2();
    let mut seen = Vec::new();
    let mut obs = |s: &State<'_>| {
        seen.push((s.m, s.t));
        Ok(())
    };
    run(&spec, &mesh, SchemeConfig::new(0.02, 0.1), &mut [&mut obs]).unwrap();
    assert_eq!(seen.len(), 6);
    for (k, (m, t)) in seen.iter().enumerate() {
        assert_eq!(*m, k);
        assert!((t - 0.02 * k as f64).abs() < 1e-15);
    }
}

#[test]
fn observer_errors_abort_the_run() {
    let mesh = generate_disk_mesh(0).unwrap();
    let spec = example2();
    let mut obs = |s: &State<'_>| {
        if s.m == 2 {
            Err(graphflow::Error::InvalidArgument("stop".into()))
        } else {
            Ok(())
        }
    };
    assert!(run(&spec, &mesh, SchemeConfig::new(0.02, 0.1), &mut [&mut obs]).is_err());
}

#[test]
fn solver_failures_carry_the_time_level() {
    let mesh = generate_disk_mesh(0).unwrap();
    let mut spec = example2();
    // Make the initial projection trivially exact so the first failure happens while stepping.
    spec.u0 = InitialData::interpolated(|_| 0.0);
    spec.w0 = InitialData::interpolated(|x| 1.0 + x[0] * x[0] + x[1] * x[1]);
    let mut config = SchemeConfig::new(0.01, 0.05);
    config.solver_tol = 1e-300;
    let err = run(&spec, &mesh, config, &mut []).unwrap_err();
    assert!(err.to_string().starts_with("time level 1"), "{err}");
}

#[test]
fn unknown_boundary_tag_is_rejected() {
    let mesh = generate_disk_mesh(0).unwrap();
    let spec = digm_planar();
    assert!(matches!(
        Stepper::new(&spec, &mesh, SchemeConfig::new(0.1, 0.1)),
        Err(graphflow::Error::UnknownTag(_))
    ));
}

#[test]
fn sequential_and_parallel_runs_are_identical() {
    let mesh = generate_disk_mesh(1).unwrap();
    let spec = example1();
    let mut a = SchemeConfig::new(0.005, 0.02);
    a.policy = ExecPolicy::Sequential;
    let mut b = a;
    b.policy = ExecPolicy::Parallel;
    let ra = run(&spec, &mesh, a, &mut []).unwrap();
    let rb = run(&spec, &mesh, b, &mut []).unwrap();
    assert_eq!(ra.final_state.u.values(), rb.final_state.u.values());
    assert_eq!(ra.final_state.w.values(), rb.final_state.w.values());
}

#[test]
fn msproj_respects_constraints_and_satisfies_its_equation() {
    let mesh = disk_mesh_with_rings(6).unwrap();
    let rule = quadrature(4).unwrap();
    let u = |x: [f64; 2]| 0.4 * (1.0 - x[0] * x[0] - x[1] * x[1]) + 0.1 * x[0];
    let gu = |x: [f64; 2]| [-0.8 * x[0] + 0.1, -0.8 * x[1]];
    let constraints: Constraints = mesh
        .all_boundary_vertices()
        .into_iter()
        .map(|v| (v, 0.5))
        .collect();
    let uh = minimal_surface_projection(
        &mesh,
        &rule,
        u,
        gu,
        &constraints,
        &ProjectionOptions::default(),
    )
    .unwrap();
    for (&v, &g) in &constraints {
        assert_eq!(uh.values()[v], g);
    }
    let free = FeFunction::interpolate(&mesh, u);
    assert!(uh
        .values()
        .iter()
        .zip(free.values())
        .any(|(a, b)| (a - b).abs() > 1e-6));
}

#[test]
fn picard_iteration_limit_is_reported() {
    let mesh = disk_mesh_with_rings(4).unwrap();
    let rule = quadrature(4).unwrap();
    let opts = ProjectionOptions {
        max_iter: 1,
        tol: 0.0,
        ..ProjectionOptions::default()
    };
    let err = minimal_surface_projection(
        &mesh,
        &rule,
        |x| x[0] * x[0],
        |x| [2.0 * x[0], 0.0],
        &Constraints::new(),
        &opts,
    )
    .unwrap_err();
    assert!(matches!(
        err,
        graphflow::Error::ProjectionDiverged { iterations: 1, .. }
    ));
}

#[test]
fn steps_follow_rounding_rule() {
    let spec = Arc::new(example1());
    let mesh = generate_disk_mesh(0).unwrap();
    let summary = run(&spec, &mesh, SchemeConfig::new(0.03, 0.1), &mut []).unwrap();
    assert_eq!(summary.steps, 3);
}
