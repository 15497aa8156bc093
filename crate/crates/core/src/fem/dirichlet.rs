//! Dirichlet constraints by symmetric elimination.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::fem::solver::{conjugate_gradient, CgOptions};
use crate::fem::sparse::CsrMatrix;

/// Prescribed nodal values, keyed by vertex index.
pub type Constraints = BTreeMap<usize, f64>;

/// A linear system together with the Dirichlet data to impose on it.
#[derive(Clone, Debug)]
pub struct SparseSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    pub constraints: Constraints,
}

impl SparseSystem {
    pub fn new(matrix: CsrMatrix, rhs: Vec<f64>) -> Self {
        SparseSystem {
            matrix,
            rhs,
            constraints: Constraints::new(),
        }
    }

    pub fn with_constraints(mut self, constraints: Constraints) -> Self {
        self.constraints = constraints;
        self
    }

    pub fn reduce(&self) -> ReducedSystem {
        apply_dirichlet(&self.matrix, &self.rhs, &self.constraints)
    }

    /// Eliminates the constraints, solves the reduced SPD system and returns
    /// the full nodal vector. `guess` seeds conjugate gradients.
    pub fn solve(&self, opts: &CgOptions, guess: Option<&[f64]>) -> Result<Vec<f64>> {
        let reduced = self.reduce();
        let x0 = guess.map(|g| reduced.restrict(g));
        let (x, _) = conjugate_gradient(&reduced.matrix, &reduced.rhs, x0.as_deref(), opts)?;
        Ok(reduced.extend(&x))
    }
}

/// System restricted to the unconstrained vertices.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Full index of every reduced unknown.
    pub free: Vec<usize>,
    prescribed: Vec<Option<f64>>,
}

impl ReducedSystem {
    /// Full vector: reduced values on free vertices, prescribed values elsewhere.
    pub fn extend(&self, reduced: &[f64]) -> Vec<f64> {
        assert_eq!(reduced.len(), self.free.len());
        let mut full: Vec<f64> = self.prescribed.iter().map(|p| p.unwrap_or(0.0)).collect();
        for (&i, &v) in self.free.iter().zip(reduced) {
            full[i] = v;
        }
        full
    }

    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        self.free.iter().map(|&i| full[i]).collect()
    }
}

/// Removes constrained rows and columns; the right-hand side of every free
/// row `i` is corrected by `-Σ_k A_ik g_k`.
pub fn apply_dirichlet(
    matrix: &CsrMatrix,
    rhs: &[f64],
    constraints: &Constraints,
) -> ReducedSystem {
    let n = matrix.dim();
    assert_eq!(rhs.len(), n);
    let mut prescribed = vec![None; n];
    for (&k, &g) in constraints {
        assert!(
            k < n,
            "constraint on vertex {k} outside a system of size {n}"
        );
        prescribed[k] = Some(g);
    }
    let mut map = vec![usize::MAX; n];
    let mut free = Vec::with_capacity(n - constraints.len());
    for i in 0..n {
        if prescribed[i].is_none() {
            map[i] = free.len();
            free.push(i);
        }
    }

    let mut row_ptr = Vec::with_capacity(free.len() + 1);
    let mut col_idx = Vec::with_capacity(matrix.nnz());
    let mut values = Vec::with_capacity(matrix.nnz());
    let mut b = Vec::with_capacity(free.len());
    row_ptr.push(0);
    for &i in &free {
        let mut bi = rhs[i];
        for (j, v) in matrix.row(i) {
            match prescribed[j] {
                Some(g) => bi -= v * g,
                None => {
                    col_idx.push(map[j]);
                    values.push(v);
                }
            }
        }
        b.push(bi);
        row_ptr.push(col_idx.len());
    }
    ReducedSystem {
        matrix: CsrMatrix::from_parts(free.len(), row_ptr, col_idx, values),
        rhs: b,
        free,
        prescribed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assembly::Assembler;
    use crate::fem::quadrature::quadrature;
    use crate::geometry::Sym2;
    use crate::mesh::generate_rect_mesh;

    #[test]
    fn fully_constrained_system_is_empty() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let c: Constraints = [(0, 1.5), (1, -2.0)].into_iter().collect();
        let sys = SparseSystem::new(a, vec![0.0, 0.0]).with_constraints(c);
        let r = sys.reduce();
        assert_eq!(r.matrix.dim(), 0);
        assert_eq!(
            sys.solve(&CgOptions::default(), None).unwrap(),
            vec![1.5, -2.0]
        );
    }

    #[test]
    fn no_constraints_leave_the_system_unchanged() {
        let a = CsrMatrix::from_dense(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = apply_dirichlet(&a, &[3.0, 3.0], &Constraints::new());
        assert_eq!(r.matrix, a);
        assert_eq!(r.rhs, vec![3.0, 3.0]);
    }

    #[test]
    fn laplace_reproduces_linear_boundary_data() {
        let mesh = generate_rect_mesh((0.0, 1.0), (0.0, 1.0), 0.2).unwrap();
        let asm = Assembler::new(&mesh, quadrature(4).unwrap());
        let k = asm.stiffness(|_, _| Sym2::identity());
        let c: Constraints = mesh
            .all_boundary_vertices()
            .into_iter()
            .map(|v| (v, mesh.vertices()[v][0]))
            .collect();
        let sys = SparseSystem::new(k, vec![0.0; mesh.num_vertices()]).with_constraints(c);
        let opts = CgOptions {
            tol: 1e-14,
            ..CgOptions::default()
        };
        let x = sys.solve(&opts, None).unwrap();
        for (v, xv) in x.iter().enumerate() {
            assert!((xv - mesh.vertices()[v][0]).abs() < 1e-12);
        }
    }
}
