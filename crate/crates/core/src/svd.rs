//! One-sided Jacobi singular value decomposition for small dense matrices.
//!
//! Cyclic sweeps rotate column pairs of the working matrix until all pairwise
//! inner products vanish relative to the column norms; the rotated columns
//! then carry `U·Σ` and the accumulated rotations form `V`. Accuracy is ample
//! at the ≤ ~600×100 scale this crate targets.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Thin SVD `X = U · diag(σ) · Vᵀ` with `U`: m×p, `σ`: p, `V`: n×p for
/// p = min(m, n), singular values sorted in decreasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

/// Relative off-diagonal tolerance at which a column pair counts as
/// orthogonal.
const ORTHO_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// Decomposes `x`; transposes internally when m < n so the rotation side is
/// always the smaller one.
pub fn jacobi_svd(x: &Matrix) -> Result<Svd> {
    let (m, n) = x.shape();
    if m == 0 || n == 0 {
        return Err(Error::DimensionMismatch {
            context: "jacobi_svd",
            expected: "a non-empty matrix".to_string(),
            found: format!("{m}x{n}"),
        });
    }
    if m < n {
        let svd = jacobi_svd(&x.transpose())?;
        return Ok(Svd {
            u: svd.v,
            singular_values: svd.singular_values,
            v: svd.u,
        });
    }

    // a: m×n working copy whose columns get orthogonalized; v: n×n rotations
    let mut a = x.clone();
    let mut v = Matrix::zeros(n, n);
    for i in 0..n {
        v.set(i, i, 1.0);
    }

    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    let ap = a.get(i, p);
                    let aq = a.get(i, q);
                    alpha += ap * ap;
                    beta += aq * aq;
                    gamma += ap * aq;
                }
                if gamma.abs() <= ORTHO_TOL * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let ap = a.get(i, p);
                    let aq = a.get(i, q);
                    a.set(i, p, c * ap - s * aq);
                    a.set(i, q, s * ap + c * aq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // column norms are the singular values; normalize to get U
    let mut order: Vec<usize> = (0..n).collect();
    let mut sigma = vec![0.0f64; n];
    for (j, s) in sigma.iter_mut().enumerate() {
        *s = (0..m).map(|i| a.get(i, j) * a.get(i, j)).sum::<f64>().sqrt();
    }
    order.sort_by(|&p, &q| sigma[q].partial_cmp(&sigma[p]).unwrap().then(p.cmp(&q)));

    let mut u_out = Matrix::zeros(m, n);
    let mut v_out = Matrix::zeros(n, n);
    let mut sigma_out = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigma[src];
        sigma_out.push(s);
        if s > 0.0 {
            for i in 0..m {
                u_out.set(i, dst, a.get(i, src) / s);
            }
        }
        for i in 0..n {
            v_out.set(i, dst, v.get(i, src));
        }
    }

    Ok(Svd {
        u: u_out,
        singular_values: sigma_out,
        v: v_out,
    })
}
