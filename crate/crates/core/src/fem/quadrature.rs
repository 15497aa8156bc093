//! Symmetric quadrature rules on the reference triangle.

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// Points in barycentric coordinates, weights summing to the reference
/// area 1/2.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub degree: usize,
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

/// A quadrature point mapped to a physical triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadPoint {
    pub x: [f64; 2],
    pub bary: [f64; 3],
    /// Physical weight: reference weight times `2 |T|`.
    pub weight: f64,
    /// Index of the point within the rule.
    pub index: usize,
}

/// A Gauss point on a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgePoint {
    pub x: [f64; 2],
    /// Position along the edge, 0 at the first vertex.
    pub s: f64,
    pub weight: f64,
}

/// Rule exact for polynomials of total degree `degree`.
///
/// Degree 3 reuses the six-point degree-4 rule: the classical four-point
/// degree-3 rule has a negative weight.
pub fn quadrature(degree: usize) -> Result<QuadratureRule> {
    let (points, weights): (Vec<[f64; 3]>, Vec<f64>) = match degree {
        1 => (vec![[1.0 / 3.0; 3]], vec![1.0]),
        2 => {
            let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
            (vec![[a, b, b], [b, a, b], [b, b, a]], vec![1.0 / 3.0; 3])
        }
        3 | 4 => {
            // Strang-Fix / Dunavant six-point rule
            const A1: f64 = 0.445_948_490_915_964_886_32;
            const B1: f64 = 1.0 - 2.0 * A1;
            const W1: f64 = 0.223_381_589_678_011_465_7;
            const A2: f64 = 0.091_576_213_509_770_743_46;
            const B2: f64 = 1.0 - 2.0 * A2;
            const W2: f64 = 0.109_951_743_655_321_867_64;
            (
                vec![
                    [B1, A1, A1],
                    [A1, B1, A1],
                    [A1, A1, B1],
                    [B2, A2, A2],
                    [A2, B2, A2],
                    [A2, A2, B2],
                ],
                vec![W1, W1, W1, W2, W2, W2],
            )
        }
        d => return Err(Error::UnsupportedDegree(d)),
    };
    Ok(QuadratureRule {
        degree,
        points,
        weights: weights.into_iter().map(|w| 0.5 * w).collect(),
    })
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integral over the reference triangle `{x, y ≥ 0, x + y ≤ 1}`.
    pub fn integrate_reference(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(l, w)| w * f(l[1], l[2]))
            .sum()
    }

    /// Quadrature points of triangle `t` in physical coordinates.
    pub fn points_on<'a>(
        &'a self,
        mesh: &'a Mesh,
        t: usize,
    ) -> impl Iterator<Item = QuadPoint> + 'a {
        let [a, b, c] = mesh.triangles()[t];
        let v = mesh.vertices();
        let (pa, pb, pc) = (v[a], v[b], v[c]);
        let scale = 2.0 * mesh.elements()[t].area;
        self.points
            .iter()
            .zip(&self.weights)
            .enumerate()
            .map(move |(index, (l, w))| QuadPoint {
                x: [
                    l[0] * pa[0] + l[1] * pb[0] + l[2] * pc[0],
                    l[0] * pa[1] + l[1] * pb[1] + l[2] * pc[1],
                ],
                bary: *l,
                weight: w * scale,
                index,
            })
    }
}

/// Two-point Gauss rule on `[0, 1]`.
pub(crate) fn edge_gauss() -> [(f64, f64); 2] {
    let d = 0.5 / 3f64.sqrt();
    [(0.5 - d, 0.5), (0.5 + d, 0.5)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    fn monomial_exact(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn degree_one_integrates_constants() {
        let r = quadrature(1).unwrap();
        assert_eq!(r.integrate_reference(|_, _| 1.0), 0.5);
    }

    #[test]
    fn degree_four_closed_forms() {
        let r = quadrature(4).unwrap();
        assert!(r.len() >= 6);
        assert!((r.integrate_reference(|x, y| x * x * y * y) - 1.0 / 180.0).abs() < 1e-14);
        assert!((r.integrate_reference(|x, _| x.powi(4)) - 1.0 / 30.0).abs() < 1e-14);
    }

    #[test]
    fn every_rule_is_exact_to_its_degree() {
        for degree in 1..=4 {
            let r = quadrature(degree).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    let got = r.integrate_reference(|x, y| x.powi(a as i32) * y.powi(b as i32));
                    assert!(
                        (got - monomial_exact(a, b)).abs() < 1e-14,
                        "degree {degree}, x^{a} y^{b}: {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn unsupported_degrees() {
        assert!(matches!(quadrature(0), Err(Error::UnsupportedDegree(0))));
        assert!(matches!(quadrature(5), Err(Error::UnsupportedDegree(5))));
    }

    #[test]
    fn edge_rule_is_exact_for_cubics() {
        let got: f64 = edge_gauss().iter().map(|(s, w)| w * s.powi(3)).sum();
        assert!((got - 0.25).abs() < 1e-15);
    }
}
