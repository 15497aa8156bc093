//! Assembly of weighted mass, stiffness and load integrals.
//!
//! Element contributions are computed per triangle (in parallel when the
//! policy allows it) and then added into the global arrays sequentially in
//! triangle order, so the result does not depend on the policy.

use crate::error::{Error, Result};
use crate::exec::ExecPolicy;
use crate::fem::quadrature::{edge_gauss, EdgePoint, QuadPoint, QuadratureRule};
use crate::fem::sparse::CsrMatrix;
use crate::geometry::Sym2;
use crate::mesh::{BoundaryTag, Mesh};

type Local = [[f64; 3]; 3];

/// Reusable assembly context: quadrature rule, sparsity pattern and the
/// scatter map from element entries to matrix storage.
#[derive(Clone, Debug)]
pub struct Assembler<'m> {
    mesh: &'m Mesh,
    rule: QuadratureRule,
    policy: ExecPolicy,
    pattern: CsrMatrix,
    scatter: Vec<[usize; 9]>,
}

impl<'m> Assembler<'m> {
    pub fn new(mesh: &'m Mesh, rule: QuadratureRule) -> Self {
        let pattern = CsrMatrix::pattern(mesh);
        let scatter = mesh
            .triangles()
            .iter()
            .map(|tri| {
                let mut pos = [0; 9];
                for a in 0..3 {
                    for b in 0..3 {
                        pos[3 * a + b] = pattern
                            .position(tri[a], tri[b])
                            .expect("pattern covers element");
                    }
                }
                pos
            })
            .collect();
        Assembler {
            mesh,
            rule,
            policy: ExecPolicy::default(),
            pattern,
            scatter,
        }
    }

    pub fn with_policy(mut self, policy: ExecPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn mesh(&self) -> &'m Mesh {
        self.mesh
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    /// All-zero matrix with the mesh sparsity pattern.
    pub fn zero_matrix(&self) -> CsrMatrix {
        self.pattern.clone()
    }

    fn assemble_matrix<F>(&self, local: F) -> CsrMatrix
    where
        F: Fn(usize) -> Local + Sync + Send,
    {
        let locals = self.policy.map(self.mesh.num_triangles(), local);
        let mut out = self.pattern.clone();
        let values = out.values_mut();
        for (pos, m) in self.scatter.iter().zip(&locals) {
            for a in 0..3 {
                for b in 0..3 {
                    values[pos[3 * a + b]] += m[a][b];
                }
            }
        }
        out
    }

    fn local_mass(&self, t: usize, weight: &(impl Fn(usize, &QuadPoint) -> f64 + ?Sized)) -> Local {
        let mut m = [[0.0; 3]; 3];
        for qp in self.rule.points_on(self.mesh, t) {
            let c = qp.weight * weight(t, &qp);
            let l = qp.bary;
            for a in 0..3 {
                for b in a..3 {
                    m[a][b] += c * l[a] * l[b];
                }
            }
        }
        symmetrize(&mut m);
        m
    }

    fn local_stiffness(
        &self,
        t: usize,
        coeff: &(impl Fn(usize, &QuadPoint) -> Sym2 + ?Sized),
    ) -> Local {
        // gradients are constant, so only the integrated coefficient matters
        let mut c = Sym2::zero();
        for qp in self.rule.points_on(self.mesh, t) {
            c = c + coeff(t, &qp) * qp.weight;
        }
        let g = self.mesh.elements()[t].grads;
        let mut m = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in a..3 {
                m[a][b] = c.bilinear(g[a], g[b]);
            }
        }
        symmetrize(&mut m);
        m
    }

    /// `M_ij = ∫ c φ_i φ_j`.
    pub fn mass<F>(&self, weight: F) -> CsrMatrix
    where
        F: Fn(usize, &QuadPoint) -> f64 + Sync + Send,
    {
        self.assemble_matrix(|t| self.local_mass(t, &weight))
    }

    /// `A_ij = ∫ C ∇φ_j · ∇φ_i` for a symmetric matrix coefficient `C`.
    pub fn stiffness<F>(&self, coeff: F) -> CsrMatrix
    where
        F: Fn(usize, &QuadPoint) -> Sym2 + Sync + Send,
    {
        self.assemble_matrix(|t| self.local_stiffness(t, &coeff))
    }

    /// Sum of a weighted mass and a weighted stiffness matrix in one pass.
    pub fn mass_stiffness<F, G>(&self, weight: F, coeff: G) -> CsrMatrix
    where
        F: Fn(usize, &QuadPoint) -> f64 + Sync + Send,
        G: Fn(usize, &QuadPoint) -> Sym2 + Sync + Send,
    {
        self.assemble_matrix(|t| {
            let mut m = self.local_mass(t, &weight);
            let k = self.local_stiffness(t, &coeff);
            for a in 0..3 {
                for b in 0..3 {
                    m[a][b] += k[a][b];
                }
            }
            m
        })
    }

    fn assemble_vector<F>(&self, local: F) -> Vec<f64>
    where
        F: Fn(usize) -> [f64; 3] + Sync + Send,
    {
        let locals = self.policy.map(self.mesh.num_triangles(), local);
        let mut out = vec![0.0; self.mesh.num_vertices()];
        for (tri, v) in self.mesh.triangles().iter().zip(&locals) {
            for a in 0..3 {
                out[tri[a]] += v[a];
            }
        }
        out
    }

    /// `b_i = ∫ d φ_i`.
    pub fn load<F>(&self, density: F) -> Vec<f64>
    where
        F: Fn(usize, &QuadPoint) -> f64 + Sync + Send,
    {
        self.assemble_vector(|t| {
            let mut v = [0.0; 3];
            for qp in self.rule.points_on(self.mesh, t) {
                let d = qp.weight * density(t, &qp);
                for a in 0..3 {
                    v[a] += d * qp.bary[a];
                }
            }
            v
        })
    }

    /// `b_i = ∫ F · ∇φ_i` for a vector field `F`.
    pub fn gradient_load<F>(&self, flux: F) -> Vec<f64>
    where
        F: Fn(usize, &QuadPoint) -> [f64; 2] + Sync + Send,
    {
        self.assemble_vector(|t| {
            let mut acc = [0.0; 2];
            for qp in self.rule.points_on(self.mesh, t) {
                let f = flux(t, &qp);
                acc[0] += qp.weight * f[0];
                acc[1] += qp.weight * f[1];
            }
            let g = self.mesh.elements()[t].grads;
            [0, 1, 2].map(|a| acc[0] * g[a][0] + acc[1] * g[a][1])
        })
    }

    /// `b_i = ∫_Γ d φ_i ds` over the boundary edges carrying `tag`, with a
    /// two-point Gauss rule per edge. The closure receives the index of the
    /// edge in [`Mesh::boundary_edges`].
    pub fn boundary_load<F>(&self, tag: BoundaryTag, density: F) -> Result<Vec<f64>>
    where
        F: Fn(usize, &EdgePoint) -> f64,
    {
        assemble_boundary_load(self.mesh, tag, density)
    }
}

fn symmetrize(m: &mut Local) {
    for a in 0..3 {
        for b in 0..a {
            m[a][b] = m[b][a];
        }
    }
}

pub fn assemble_weighted_mass<F>(mesh: &Mesh, rule: &QuadratureRule, weight: F) -> CsrMatrix
where
    F: Fn(usize, &QuadPoint) -> f64 + Sync + Send,
{
    Assembler::new(mesh, rule.clone()).mass(weight)
}

pub fn assemble_weighted_stiffness<F>(mesh: &Mesh, rule: &QuadratureRule, coeff: F) -> CsrMatrix
where
    F: Fn(usize, &QuadPoint) -> Sym2 + Sync + Send,
{
    Assembler::new(mesh, rule.clone()).stiffness(coeff)
}

pub fn assemble_load<F>(mesh: &Mesh, rule: &QuadratureRule, density: F) -> Vec<f64>
where
    F: Fn(usize, &QuadPoint) -> f64 + Sync + Send,
{
    Assembler::new(mesh, rule.clone()).load(density)
}

pub fn assemble_gradient_load<F>(mesh: &Mesh, rule: &QuadratureRule, flux: F) -> Vec<f64>
where
    F: Fn(usize, &QuadPoint) -> [f64; 2] + Sync + Send,
{
    Assembler::new(mesh, rule.clone()).gradient_load(flux)
}

pub fn assemble_boundary_load<F>(mesh: &Mesh, tag: BoundaryTag, density: F) -> Result<Vec<f64>>
where
    F: Fn(usize, &EdgePoint) -> f64,
{
    if !mesh.has_tag(tag) {
        return Err(Error::UnknownTag(tag));
    }
    let mut out = vec![0.0; mesh.num_vertices()];
    let verts = mesh.vertices();
    for (e, edge) in mesh.boundary_edges().iter().enumerate() {
        if edge.tag != tag {
            continue;
        }
        let [a, b] = edge.vertices;
        let (pa, pb) = (verts[a], verts[b]);
        let len = (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        for (s, w) in edge_gauss() {
            let p = EdgePoint {
                x: [pa[0] + s * (pb[0] - pa[0]), pa[1] + s * (pb[1] - pa[1])],
                s,
                weight: w * len,
            };
            let d = p.weight * density(e, &p);
            out[a] += d * (1.0 - s);
            out[b] += d * s;
        }
    }
    Ok(out)
}
