//! Continuous piecewise-linear functions and their error norms.

use crate::fem::quadrature::{QuadPoint, QuadratureRule};
use crate::mesh::Mesh;

/// Nodal values of a continuous P1 function on `mesh`.
#[derive(Clone, Debug)]
pub struct FeFunction<'m> {
    mesh: &'m Mesh,
    values: Vec<f64>,
}

/// Squared error norms against an exact function.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldErrors {
    /// `‖f_h - f‖²_{L²}`
    pub l2_sq: f64,
    /// `‖∇f_h - ∇f‖²_{L²}`
    pub h1_semi_sq: f64,
}

impl<'m> FeFunction<'m> {
    pub fn from_values(mesh: &'m Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.num_vertices(), "one value per vertex");
        FeFunction { mesh, values }
    }

    pub fn constant(mesh: &'m Mesh, c: f64) -> Self {
        FeFunction::from_values(mesh, vec![c; mesh.num_vertices()])
    }

    pub fn zeros(mesh: &'m Mesh) -> Self {
        FeFunction::constant(mesh, 0.0)
    }

    /// Nodal interpolant.
    pub fn interpolate(mesh: &'m Mesh, f: impl Fn([f64; 2]) -> f64) -> Self {
        FeFunction::from_values(mesh, mesh.vertices().iter().map(|&x| f(x)).collect())
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value in triangle `t` at barycentric coordinates `bary`.
    #[inline]
    pub fn eval(&self, t: usize, bary: [f64; 3]) -> f64 {
        let [a, b, c] = self.mesh.triangles()[t];
        bary[0] * self.values[a] + bary[1] * self.values[b] + bary[2] * self.values[c]
    }

    #[inline]
    pub fn eval_at(&self, t: usize, qp: &QuadPoint) -> f64 {
        self.eval(t, qp.bary)
    }

    /// Constant gradient on triangle `t`.
    #[inline]
    pub fn gradient(&self, t: usize) -> [f64; 2] {
        let tri = self.mesh.triangles()[t];
        let g = self.mesh.elements()[t].grads;
        let mut out = [0.0; 2];
        for k in 0..3 {
            let v = self.values[tri[k]];
            out[0] += v * g[k][0];
            out[1] += v * g[k][1];
        }
        out
    }

    /// Point evaluation by locating the containing triangle (linear search).
    pub fn eval_point(&self, x: [f64; 2]) -> Option<f64> {
        let verts = self.mesh.vertices();
        self.mesh
            .triangles()
            .iter()
            .enumerate()
            .find_map(|(t, tri)| {
                let p0 = verts[tri[0]];
                let g = self.mesh.elements()[t].grads;
                let l1 = g[1][0] * (x[0] - p0[0]) + g[1][1] * (x[1] - p0[1]);
                let l2 = g[2][0] * (x[0] - p0[0]) + g[2][1] * (x[1] - p0[1]);
                let l0 = 1.0 - l1 - l2;
                let eps = -1e-12;
                (l0 >= eps && l1 >= eps && l2 >= eps).then(|| self.eval(t, [l0, l1, l2]))
            })
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `‖f_h‖²_{L²}` by quadrature.
    pub fn l2_norm_sq(&self, rule: &QuadratureRule) -> f64 {
        integrate(self.mesh, rule, |t, qp| self.eval_at(t, qp).powi(2))
    }

    /// `‖∇f_h‖²_{L²}`.
    pub fn h1_semi_norm_sq(&self) -> f64 {
        (0..self.mesh.num_triangles())
            .map(|t| {
                let g = self.gradient(t);
                self.mesh.elements()[t].area * (g[0] * g[0] + g[1] * g[1])
            })
            .sum()
    }

    /// Squared L² and H¹-seminorm errors against `exact` and its gradient.
    pub fn errors(
        &self,
        rule: &QuadratureRule,
        exact: impl Fn([f64; 2]) -> f64,
        exact_grad: impl Fn([f64; 2]) -> [f64; 2],
    ) -> FieldErrors {
        let mut out = FieldErrors::default();
        for t in 0..self.mesh.num_triangles() {
            let g = self.gradient(t);
            for qp in rule.points_on(self.mesh, t) {
                let e = self.eval_at(t, &qp) - exact(qp.x);
                let eg = exact_grad(qp.x);
                out.l2_sq += qp.weight * e * e;
                out.h1_semi_sq += qp.weight * ((g[0] - eg[0]).powi(2) + (g[1] - eg[1]).powi(2));
            }
        }
        out
    }
}

/// `∫_Ω f` by element-wise quadrature, accumulated in triangle order.
pub fn integrate(mesh: &Mesh, rule: &QuadratureRule, f: impl Fn(usize, &QuadPoint) -> f64) -> f64 {
    let mut s = 0.0;
    for t in 0..mesh.num_triangles() {
        for qp in rule.points_on(mesh, t) {
            s += qp.weight * f(t, &qp);
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::quadrature::quadrature;
    use crate::mesh::{generate_disk_mesh, generate_rect_mesh};

    #[test]
    fn linear_functions_are_reproduced() {
        let mesh = generate_disk_mesh(0).unwrap();
        let f = |x: [f64; 2]| 1.5 - 2.0 * x[0] + 0.25 * x[1];
        let fh = FeFunction::interpolate(&mesh, f);
        let e = fh.errors(&quadrature(4).unwrap(), f, |_| [-2.0, 0.25]);
        assert!(e.l2_sq < 1e-28 && e.h1_semi_sq < 1e-28);
        assert!((fh.gradient(7)[0] + 2.0).abs() < 1e-13);
    }

    #[test]
    fn zero_against_one() {
        let mesh = generate_rect_mesh((0.0, 1.0), (0.0, 1.0), 1.0).unwrap();
        let e = FeFunction::zeros(&mesh).errors(&quadrature(4).unwrap(), |_| 1.0, |_| [0.0, 0.0]);
        assert!((e.l2_sq - 1.0).abs() < 1e-14);
        assert_eq!(e.h1_semi_sq, 0.0);
    }

    #[test]
    fn point_evaluation() {
        let mesh = generate_rect_mesh((0.0, 1.0), (0.0, 1.0), 0.5).unwrap();
        let fh = FeFunction::interpolate(&mesh, |x| x[0] + 2.0 * x[1]);
        assert!((fh.eval_point([0.3, 0.4]).unwrap() - 1.1).abs() < 1e-14);
        assert!(fh.eval_point([2.0, 0.0]).is_none());
    }
}
