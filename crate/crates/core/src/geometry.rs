//! Pointwise kernels of the graph parametrisation `x ↦ (x, u(x))`.
//!
//! All quantities depend on the slope `p = ∇u` only. For P1 functions `p`
//! is constant per triangle, so callers evaluate these once per element.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::fem::{FeFunction, QuadratureRule};

/// Symmetric 2×2 matrix `[[xx, xy], [xy, yy]]`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Sym2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Sym2 {
    pub const fn new(xx: f64, xy: f64, yy: f64) -> Self {
        Sym2 { xx, xy, yy }
    }

    pub const fn zero() -> Self {
        Sym2::new(0.0, 0.0, 0.0)
    }

    pub const fn identity() -> Self {
        Sym2::new(1.0, 0.0, 1.0)
    }

    pub fn scaled_identity(s: f64) -> Self {
        Sym2::new(s, 0.0, s)
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.xx * v[0] + self.xy * v[1],
            self.xy * v[0] + self.yy * v[1],
        ]
    }

    /// `a · (S b)`
    pub fn bilinear(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        let sb = self.apply(b);
        a[0] * sb[0] + a[1] * sb[1]
    }

    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let m = 0.5 * self.trace();
        let r = (0.5 * (self.xx - self.yy)).hypot(self.xy);
        [m - r, m + r]
    }

    /// Frobenius inner product `S : H` with a (not necessarily symmetric) matrix.
    pub fn contract(&self, h: [[f64; 2]; 2]) -> f64 {
        self.xx * h[0][0] + self.xy * (h[0][1] + h[1][0]) + self.yy * h[1][1]
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.xy + o.xy, self.yy + o.yy)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.xx * s, self.xy * s, self.yy * s)
    }
}

/// Area element `Q(p) = √(1 + |p|²)`.
#[inline]
pub fn q_of(p: [f64; 2]) -> f64 {
    (1.0 + p[0] * p[0] + p[1] * p[1]).sqrt()
}

/// Upward unit normal `(-p, 1) / Q(p)` of the graph.
#[inline]
pub fn nu_of(p: [f64; 2]) -> [f64; 3] {
    let q = q_of(p);
    [-p[0] / q, -p[1] / q, 1.0 / q]
}

/// `E(p) = Q(p) (I - p⊗p / Q(p)²)`, i.e. `Q` times the inverse metric of
/// the graph. Its eigenvalues are `1/Q` along `p` and `Q` across it.
#[inline]
pub fn e_matrix(p: [f64; 2]) -> Sym2 {
    let q2 = 1.0 + p[0] * p[0] + p[1] * p[1];
    let q = q2.sqrt();
    Sym2::new(q - p[0] * p[0] / q, -p[0] * p[1] / q, q - p[1] * p[1] / q)
}

/// Inverse metric `g^{ij} = I - p⊗p / Q²`.
pub fn inverse_metric(p: [f64; 2]) -> Sym2 {
    let q2 = 1.0 + p[0] * p[0] + p[1] * p[1];
    Sym2::new(
        1.0 - p[0] * p[0] / q2,
        -p[0] * p[1] / q2,
        1.0 - p[1] * p[1] / q2,
    )
}

/// Normal velocity of the discrete surface at every quadrature point,
/// `(u_new - u_old) / (τ Q(∇u_new))`, stored triangle-major with stride
/// `rule.len()`.
pub fn discrete_velocity(
    u_new: &FeFunction<'_>,
    u_old: &FeFunction<'_>,
    tau: f64,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "time step must be positive, got {tau}"
        )));
    }
    if !std::ptr::eq(u_new.mesh(), u_old.mesh()) {
        return Err(Error::InvalidArgument(
            "velocity needs both heights on one mesh".into(),
        ));
    }
    let mesh = u_new.mesh();
    let mut out = Vec::with_capacity(mesh.num_triangles() * rule.len());
    for t in 0..mesh.num_triangles() {
        let denom = tau * q_of(u_new.gradient(t));
        for l in &rule.points {
            out.push((u_new.eval(t, *l) - u_old.eval(t, *l)) / denom);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::quadrature;
    use crate::mesh::generate_disk_mesh;
    use proptest::prelude::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn q_values() {
        assert_eq!(q_of([0.0, 0.0]), 1.0);
        assert_eq!(q_of([3.0, 4.0]), 26f64.sqrt());
        assert_eq!(q_of([1.0, 0.0]), S2);
    }

    #[test]
    fn normal_values() {
        assert_eq!(nu_of([0.0, 0.0]), [0.0, 0.0, 1.0]);
        let n = nu_of([1.0, 0.0]);
        assert!((n[0] + 1.0 / S2).abs() < 1e-16 && n[1] == 0.0 && (n[2] - 1.0 / S2).abs() < 1e-16);
    }

    #[test]
    fn e_matrix_values() {
        assert_eq!(e_matrix([0.0, 0.0]), Sym2::identity());
        let e = e_matrix([1.0, 0.0]);
        assert!((e.xx - 1.0 / S2).abs() < 1e-15 && e.xy == 0.0 && (e.yy - S2).abs() < 1e-15);
    }

    #[test]
    fn e_is_q_times_inverse_metric() {
        let p = [0.7, -1.3];
        let (e, g) = (e_matrix(p), inverse_metric(p) * q_of(p));
        assert!(
            (e.xx - g.xx).abs() < 1e-14
                && (e.xy - g.xy).abs() < 1e-14
                && (e.yy - g.yy).abs() < 1e-14
        );
    }

    #[test]
    fn velocity_cases() {
        let mesh = generate_disk_mesh(0).unwrap();
        let rule = quadrature(4).unwrap();
        let old = FeFunction::interpolate(&mesh, |x| x[1] * 0.1);
        let v = discrete_velocity(&old, &old, 0.1, &rule).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));

        let flat = FeFunction::zeros(&mesh);
        let tau = 0.01;
        let up = FeFunction::constant(&mesh, tau);
        let v = discrete_velocity(&up, &flat, tau, &rule).unwrap();
        assert!(v.iter().all(|&x| (x - 1.0).abs() < 1e-14));

        let ramp = FeFunction::interpolate(&mesh, |x| x[0]);
        let v = discrete_velocity(&ramp, &flat, 1.0, &rule).unwrap();
        for t in 0..mesh.num_triangles() {
            for (q, qp) in rule.points_on(&mesh, t).enumerate() {
                assert!((v[t * rule.len() + q] - qp.x[0] / S2).abs() < 1e-14);
            }
        }
        assert!(matches!(
            discrete_velocity(&ramp, &flat, 0.0, &rule),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #[test]
        fn kernel_identities(px in -50.0..50.0f64, py in -50.0..50.0f64, a in 0.0..std::f64::consts::TAU) {
            let p = [px, py];
            let q = q_of(p);
            prop_assert!(q >= 1.0 && q >= px.hypot(py));
            let n = nu_of(p);
            prop_assert!(((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt() - 1.0).abs() <= 1e-15);
            prop_assert!(n[2] > 0.0);
            let e = e_matrix(p);
            prop_assert!((e.det() - 1.0).abs() <= 1e-12 * q * q);
            let xi = [a.cos(), a.sin()];
            prop_assert!(e.bilinear(xi, xi) - 1.0 / q >= -1e-12 * q);
            let ev = e.eigenvalues();
            prop_assert!((ev[0] - 1.0 / q).abs() <= 1e-12 * q && (ev[1] - q).abs() <= 1e-12 * q);
        }
    }
}
