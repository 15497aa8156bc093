//! Jacobi-preconditioned conjugate gradients for SPD systems.

use crate::error::{Error, Result};
use crate::fem::sparse::CsrMatrix;

/// Relative residual tolerance used throughout the scheme.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Target for `‖b - Ax‖ / ‖b‖`.
    pub tol: f64,
    /// Iteration cap as a multiple of the system size.
    pub max_iter_factor: usize,
}

impl Default for CgOptions {
    fn default() -> Self {
        CgOptions {
            tol: DEFAULT_TOL,
            max_iter_factor: 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOutcome {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Solves `A x = b` to relative residual `tol`, starting from zero.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let opts = CgOptions {
        tol,
        ..CgOptions::default()
    };
    conjugate_gradient(a, b, None, &opts).map(|(x, _)| x)
}

/// Preconditioned CG. Convergence is declared on the true residual
/// `b - Ax`, recomputed whenever the recursive estimate drops below the
/// tolerance.
pub fn conjugate_gradient(
    a: &CsrMatrix,
    b: &[f64],
    x0: Option<&[f64]>,
    opts: &CgOptions,
) -> Result<(Vec<f64>, CgOutcome)> {
    let n = a.dim();
    assert_eq!(b.len(), n);
    let b_norm = norm(b);
    if n == 0 || b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            CgOutcome {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precondition =
        |r: &[f64]| -> Vec<f64> { r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect() };

    let mut x = x0.map_or_else(|| vec![0.0; n], <[f64]>::to_vec);
    let mut ax = vec![0.0; n];
    a.matvec_into(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, ax)| b - ax).collect();
    let mut residual = norm(&r) / b_norm;
    if residual <= opts.tol {
        return Ok((
            x,
            CgOutcome {
                iterations: 0,
                residual,
            },
        ));
    }
    let mut z = precondition(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let max_iter = opts.max_iter_factor.max(1) * n;

    for it in 1..=max_iter {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        residual = norm(&r) / b_norm;
        if residual <= opts.tol {
            a.matvec_into(&x, &mut ax);
            for i in 0..n {
                r[i] = b[i] - ax[i];
            }
            residual = norm(&r) / b_norm;
            if residual <= opts.tol {
                return Ok((
                    x,
                    CgOutcome {
                        iterations: it,
                        residual,
                    },
                ));
            }
            // restart from the true residual
            z = precondition(&r);
            p.copy_from_slice(&z);
            rz = dot(&r, &z);
            continue;
        }
        z = precondition(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged {
        iterations: max_iter,
        residual,
    })
}
