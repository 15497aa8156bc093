use graphflow::fem::*;
use graphflow::geometry::{e_matrix, Sym2};
use graphflow::mesh::*;
use graphflow::ExecPolicy;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense(m: &CsrMatrix) -> DMatrix<f64> {
    let d = m.to_dense();
    DMatrix::from_fn(d.len(), d.len(), |i, j| d[i][j])
}

fn one_triangle(p: [[f64; 2]; 3]) -> Mesh {
    Mesh::from_triangles(p.to_vec(), vec![[0, 1, 2]], BoundaryTag::Outer).unwrap()
}

#[test]
fn element_matrices_match_closed_forms() {
    let p = [[0.1, 0.2], [1.3, 0.0], [0.4, 0.9]];
    let mesh = one_triangle(p);
    let rule = quadrature(4).unwrap();
    let area = 0.5
        * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
            .abs();
    let m = assemble_weighted_mass(&mesh, &rule, |_, _| 1.0);
    let k = assemble_weighted_stiffness(&mesh, &rule, |_, _| Sym2::identity());
    for i in 0..3 {
        for j in 0..3 {
            let want = area / 12.0 * if i == j { 2.0 } else { 1.0 };
            assert!((m.get(i, j) - want).abs() < 1e-15);
        }
    }
    // Cotangent formula for the off-diagonal stiffness entries.
    let cot = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| {
        let (u, v) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
        (u[0] * v[0] + u[1] * v[1]) / (u[0] * v[1] - u[1] * v[0]).abs()
    };
    for (i, j, o) in [(0, 1, 2), (1, 2, 0), (0, 2, 1)] {
        let want = -0.5 * cot(p[o], p[i], p[j]);
        assert!(
            (k.get(i, j) - want).abs() < 1e-13,
            "{} vs {want}",
            k.get(i, j)
        );
    }
}

#[test]
fn weighted_matrices_are_spd_after_constraints() {
    let mesh = disk_mesh_with_rings(5).unwrap();
    assert!(mesh.num_vertices() <= 100);
    let rule = quadrature(4).unwrap();
    let asm = Assembler::new(&mesh, rule);
    let mut a = asm.stiffness(|t, _| e_matrix([0.3 * t as f64 / 100.0, -0.7]));
    a.add_scaled(1.0, &asm.mass(|_, qp| 1.0 + qp.x[0] * qp.x[0]));
    assert!(a.is_symmetric());
    let eig = dense(&a).symmetric_eigen().eigenvalues;
    assert!(eig.min() > 0.0);

    let k = asm.stiffness(|_, _| Sym2::identity());
    let eig = dense(&k).symmetric_eigen().eigenvalues;
    let mut sorted: Vec<f64> = eig.iter().copied().collect();
    sorted.sort_by(f64::total_cmp);
    assert!(
        sorted[0].abs() < 1e-12 && sorted[1] > 1e-3,
        "kernel must be one dimensional: {:?}",
        &sorted[..2]
    );

    let constraints: Constraints = mesh
        .all_boundary_vertices()
        .into_iter()
        .map(|v| (v, 0.0))
        .collect();
    let reduced = SparseSystem::new(k, vec![0.0; mesh.num_vertices()])
        .with_constraints(constraints)
        .reduce();
    assert!(dense(&reduced.matrix).symmetric_eigen().eigenvalues.min() > 0.0);
}

#[test]
fn dirichlet_elimination_matches_dense_solve() {
    let mesh = disk_mesh_with_rings(4).unwrap();
    let rule = quadrature(4).unwrap();
    let asm = Assembler::new(&mesh, rule);
    let mut a = asm.stiffness(|_, _| Sym2::identity());
    a.add_scaled(0.5, &asm.mass(|_, _| 1.0));
    let b = asm.load(|_, qp| qp.x[0].sin() + 1.0);
    let constraints: Constraints = mesh
        .boundary_vertices(&[BoundaryTag::Outer])
        .into_iter()
        .map(|v| (v, mesh.vertices()[v][1]))
        .collect();
    let x = SparseSystem::new(a.clone(), b.clone())
        .with_constraints(constraints.clone())
        .solve(
            &CgOptions {
                tol: 1e-13,
                ..CgOptions::default()
            },
            None,
        )
        .unwrap();

    let n = mesh.num_vertices();
    let mut full = dense(&a);
    let mut rhs = DVector::from_vec(b);
    for (&k, &g) in &constraints {
        full.row_mut(k).fill(0.0);
        full[(k, k)] = 1.0;
        rhs[k] = g;
    }
    let oracle = full.lu().solve(&rhs).unwrap();
    for i in 0..n {
        assert!((x[i] - oracle[i]).abs() < 1e-10, "vertex {i}");
    }
}

#[test]
fn poisson_converges_quadratically() {
    // -Δu = 4 with u = 1 - |x|², zero on the circle.
    let mut errs = Vec::new();
    for level in 0..3 {
        let mesh = generate_disk_mesh(level).unwrap();
        let rule = quadrature(4).unwrap();
        let asm = Assembler::new(&mesh, rule.clone());
        let k = asm.stiffness(|_, _| Sym2::identity());
        let b = asm.load(|_, _| 4.0);
        let constraints: Constraints = mesh
            .all_boundary_vertices()
            .into_iter()
            .map(|v| (v, 0.0))
            .collect();
        let x = SparseSystem::new(k, b)
            .with_constraints(constraints)
            .solve(&CgOptions::default(), None)
            .unwrap();
        let uh = FeFunction::from_values(&mesh, x);
        let e = uh.errors(
            &rule,
            |x| 1.0 - x[0] * x[0] - x[1] * x[1],
            |x| [-2.0 * x[0], -2.0 * x[1]],
        );
        errs.push((mesh_size(&mesh), e.l2_sq.sqrt(), e.h1_semi_sq.sqrt()));
    }
    for w in errs.windows(2) {
        let r = (w[0].0 / w[1].0).ln();
        let l2 = (w[0].1 / w[1].1).ln() / r;
        let h1 = (w[0].2 / w[1].2).ln() / r;
        assert!(l2 > 1.8, "L2 order {l2}");
        assert!(h1 > 0.9, "H1 order {h1}");
    }
}

#[test]
fn boundary_load_integrates_edge_functions() {
    let mesh = generate_rect_mesh((0.0, 2.0), (0.0, 1.0), 0.25).unwrap();
    let lr = assemble_boundary_load(&mesh, BoundaryTag::LeftRight, |_, p| p.x[1] * p.x[1]).unwrap();
    // ∫ x₂² over both vertical faces of height one.
    assert!((lr.iter().sum::<f64>() - 2.0 / 3.0).abs() < 1e-14);
    let tb = assemble_boundary_load(&mesh, BoundaryTag::TopBottom, |_, _| 1.0).unwrap();
    assert!((tb.iter().sum::<f64>() - 4.0).abs() < 1e-14);
    assert!(assemble_boundary_load(&mesh, BoundaryTag::Outer, |_, _| 1.0).is_err());
}

#[test]
fn execution_policies_agree_bitwise() {
    let mesh = generate_disk_mesh(1).unwrap();
    let rule = quadrature(4).unwrap();
    let seq = Assembler::new(&mesh, rule.clone()).with_policy(ExecPolicy::Sequential);
    let par = Assembler::new(&mesh, rule).with_policy(ExecPolicy::Parallel);
    let c = |_: usize, qp: &QuadPoint| e_matrix([qp.x[1], qp.x[0] * qp.x[0]]);
    let w = |_: usize, qp: &QuadPoint| 1.0 + qp.x[0].exp();
    assert_eq!(
        seq.mass_stiffness(w, c).values(),
        par.mass_stiffness(w, c).values()
    );
    assert_eq!(seq.load(w), par.load(w));
    let g = |_: usize, qp: &QuadPoint| [qp.x[1], -qp.x[0]];
    assert_eq!(seq.gradient_load(g), par.gradient_load(g));
}

fn random_spd(n: usize, seed: u64) -> (DMatrix<f64>, CsrMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..i {
            if rng.gen_bool(0.3) {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].abs()).sum();
        a[(i, i)] = off + rng.gen_range(0.1..2.0);
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| a[(i, j)]).collect())
        .collect();
    (a, CsrMatrix::from_dense(&rows))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cg_agrees_with_cholesky(n in 1usize..40, seed in any::<u64>()) {
        let (a, csr) = random_spd(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_spd(&csr, &b, 1e-12).unwrap();
        let oracle = a.cholesky().unwrap().solve(&DVector::from_vec(b));
        for i in 0..n {
            prop_assert!((x[i] - oracle[i]).abs() < 1e-9 * oracle.amax().max(1.0));
        }
    }

    #[test]
    fn assembled_mass_is_symmetric_and_positive(rings in 1usize..6, c in 0.1f64..5.0) {
        let mesh = disk_mesh_with_rings(rings).unwrap();
        let m = assemble_weighted_mass(&mesh, &quadrature(4).unwrap(), |_, qp| c + qp.x[1].powi(2));
        prop_assert!(m.is_symmetric());
        let eig = dense(&m).symmetric_eigen().eigenvalues;
        prop_assert!(eig.min() > 0.0);
    }

    #[test]
    fn quadrature_integrates_random_quartics(coef in prop::collection::vec(-3.0f64..3.0, 15)) {
        // Independent check: compare with the exact monomial integrals.
        let rule = quadrature(4).unwrap();
        let fact = |n: i32| (1..=n).map(f64::from).product::<f64>();
        let mut idx = 0;
        let mut want = 0.0;
        let mut terms = Vec::new();
        for a in 0..=4 {
            for b in 0..=(4 - a) {
                want += coef[idx] * fact(a) * fact(b) / fact(a + b + 2);
                terms.push((coef[idx], a, b));
                idx += 1;
            }
        }
        let got = rule.integrate_reference(|x, y| terms.iter().map(|&(c, a, b)| c * x.powi(a) * y.powi(b)).sum());
        prop_assert!((got - want).abs() < 1e-13);
    }
}
