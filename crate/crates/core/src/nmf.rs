//! Masked non-negative matrix factorization baseline.
//!
//! Multiplicative updates with the given-entry mask as binary weights: the
//! objective is the squared error over given entries only, so missing cells
//! neither contribute gradient nor error. Initialization is either NNDSVD
//! (deterministic, built on the crate's Jacobi SVD of the mean-imputed
//! matrix) or seeded uniform random.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MaskedMatrix};
use crate::svd::jacobi_svd;

/// Denominator floor in the multiplicative updates.
const DIV_GUARD: f64 = 1e-12;
/// Relative objective change at which iteration stops.
const REL_TOL: f64 = 1e-9;
/// Perturbation applied to zero entries after NNDSVD so multiplicative
/// updates cannot lock them at zero.
const ZERO_PERTURBATION: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NmfInit {
    Nndsvd,
    Random,
}

impl NmfInit {
    pub fn name(&self) -> &'static str {
        match self {
            NmfInit::Nndsvd => "nndsvd",
            NmfInit::Random => "random",
        }
    }
}

/// Non-negative factor pair `R ≈ W · H`.
#[derive(Debug, Clone)]
pub struct NmfFactorization {
    w: Matrix,
    h: Matrix,
    rank: usize,
}

impl NmfFactorization {
    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
}

fn check_nonnegative(r: &MaskedMatrix) -> Result<()> {
    for (i, j, v) in r.given_entries() {
        if v < 0.0 {
            return Err(Error::NegativeInput { row: i, col: j, value: v });
        }
    }
    Ok(())
}

/// NNDSVD initialization: missing entries are imputed with the mean of given
/// entries (for the initialization only), the leading `rank` singular
/// triplets are taken from a Jacobi SVD, and the nonnegative sections of each
/// singular vector pair are arranged into `W` and `H`. Zeros are then
/// perturbed to 1e-8.
pub fn nndsvd_init(r: &MaskedMatrix, rank: usize) -> Result<(Matrix, Matrix)> {
    check_nonnegative(r)?;
    let (m, n) = r.shape();
    if rank == 0 || rank > m.min(n) {
        return Err(Error::InvalidRank { rank, rows: m, cols: n });
    }
    let mean = r.given_mean();
    let mut imputed = r.values().clone();
    for i in 0..m {
        for j in 0..n {
            if !r.is_given(i, j) {
                imputed.set(i, j, mean);
            }
        }
    }
    let svd = jacobi_svd(&imputed)?;

    let mut w = Matrix::zeros(m, rank);
    let mut h = Matrix::zeros(rank, n);

    // leading triplet: the singular vectors of a nonnegative matrix can be
    // taken nonnegative, so absolute values are safe here
    let s0 = svd.singular_values[0].max(0.0).sqrt();
    for i in 0..m {
        w.set(i, 0, s0 * svd.u.get(i, 0).abs());
    }
    for j in 0..n {
        h.set(0, j, s0 * svd.v.get(j, 0).abs());
    }

    for k in 1..rank {
        let sk = svd.singular_values[k];
        let u_col: Vec<f64> = (0..m).map(|i| svd.u.get(i, k)).collect();
        let v_col: Vec<f64> = (0..n).map(|j| svd.v.get(j, k)).collect();
        let up: Vec<f64> = u_col.iter().map(|&v| v.max(0.0)).collect();
        let un: Vec<f64> = u_col.iter().map(|&v| (-v).max(0.0)).collect();
        let vp: Vec<f64> = v_col.iter().map(|&v| v.max(0.0)).collect();
        let vn: Vec<f64> = v_col.iter().map(|&v| (-v).max(0.0)).collect();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let (nup, nun, nvp, nvn) = (norm(&up), norm(&un), norm(&vp), norm(&vn));
        let pos_mass = nup * nvp;
        let neg_mass = nun * nvn;
        let (section_u, section_v, nu, nv, mass) = if pos_mass >= neg_mass {
            (&up, &vp, nup, nvp, pos_mass)
        } else {
            (&un, &vn, nun, nvn, neg_mass)
        };
        if mass > 0.0 {
            let scale = (sk * mass).sqrt();
            for i in 0..m {
                w.set(i, k, scale / nu * section_u[i]);
            }
            for j in 0..n {
                h.set(k, j, scale / nv * section_v[j]);
            }
        }
    }

    let bump = |m: &mut Matrix| {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if m.get(i, j) == 0.0 {
                    m.set(i, j, ZERO_PERTURBATION);
                }
            }
        }
    };
    bump(&mut w);
    bump(&mut h);
    Ok((w, h))
}

/// Seeded uniform initialization scaled so `W·H` has roughly the data mean.
fn random_init(r: &MaskedMatrix, rank: usize, seed: u64) -> (Matrix, Matrix) {
    let (m, n) = r.shape();
    let scale = (r.given_mean().max(DIV_GUARD) / rank as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Matrix::zeros(m, rank);
    for i in 0..m {
        for k in 0..rank {
            w.set(i, k, (rng.gen::<f64>() + 1e-4) * scale);
        }
    }
    let mut h = Matrix::zeros(rank, n);
    for k in 0..rank {
        for j in 0..n {
            h.set(k, j, (rng.gen::<f64>() + 1e-4) * scale);
        }
    }
    (w, h)
}

/// Squared error over given entries.
pub fn masked_squared_error(r: &MaskedMatrix, w: &Matrix, h: &Matrix) -> f64 {
    let rank = w.cols();
    let mut sum = 0.0;
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            if r.is_given(i, j) {
                let mut wh = 0.0;
                for k in 0..rank {
                    wh += w.get(i, k) * h.get(k, j);
                }
                let d = r.get(i, j) - wh;
                sum += d * d;
            }
        }
    }
    sum
}

/// One multiplicative-update round (W then H), mask-weighted.
fn update_round(r: &MaskedMatrix, rm: &Matrix, w: &mut Matrix, h: &mut Matrix, wh: &mut Matrix) {
    let (m, n) = r.shape();
    let rank = w.cols();
    product_masked(w, h, r, wh);
    for i in 0..m {
        for k in 0..rank {
            let mut numer = 0.0;
            let mut denom = 0.0;
            for j in 0..n {
                numer += rm.get(i, j) * h.get(k, j);
                denom += wh.get(i, j) * h.get(k, j);
            }
            w.set(i, k, w.get(i, k) * numer / denom.max(DIV_GUARD));
        }
    }
    product_masked(w, h, r, wh);
    for k in 0..rank {
        for j in 0..n {
            let mut numer = 0.0;
            let mut denom = 0.0;
            for i in 0..m {
                numer += w.get(i, k) * rm.get(i, j);
                denom += w.get(i, k) * wh.get(i, j);
            }
            h.set(k, j, h.get(k, j) * numer / denom.max(DIV_GUARD));
        }
    }
}

/// Fits `R ≈ W · H` by mask-weighted multiplicative updates, running
/// `max_iters` rounds or stopping when the relative objective change falls
/// below 1e-9. `seed` matters only for `NmfInit::Random`.
pub fn nmf_fit(
    r: &MaskedMatrix,
    rank: usize,
    max_iters: usize,
    seed: u64,
    init: NmfInit,
) -> Result<NmfFactorization> {
    check_nonnegative(r)?;
    let (m, n) = r.shape();
    if rank == 0 || rank > m.min(n) {
        return Err(Error::InvalidRank { rank, rows: m, cols: n });
    }
    let (mut w, mut h) = match init {
        NmfInit::Nndsvd => nndsvd_init(r, rank)?,
        NmfInit::Random => random_init(r, rank, seed),
    };

    // masked data, with missing entries zeroed so they drop out of products
    let mut rm = Matrix::zeros(m, n);
    for (i, j, v) in r.given_entries() {
        rm.set(i, j, v);
    }

    let mut wh = Matrix::zeros(m, n);
    let mut prev = f64::INFINITY;
    for _ in 0..max_iters {
        update_round(r, &rm, &mut w, &mut h, &mut wh);
        let objective = masked_squared_error(r, &w, &h);
        if (prev - objective).abs() < REL_TOL * prev.max(DIV_GUARD) {
            break;
        }
        prev = objective;
    }

    Ok(NmfFactorization { w, h, rank })
}

/// `WH` zeroed at missing entries, written into `out`.
fn product_masked(w: &Matrix, h: &Matrix, r: &MaskedMatrix, out: &mut Matrix) {
    let rank = w.cols();
    for i in 0..r.rows() {
        for j in 0..r.cols() {
            if r.is_given(i, j) {
                let mut sum = 0.0;
                for k in 0..rank {
                    sum += w.get(i, k) * h.get(k, j);
                }
                out.set(i, j, sum);
            } else {
                out.set(i, j, 0.0);
            }
        }
    }
}

/// Full reconstruction `W · H`.
pub fn nmf_predict(f: &NmfFactorization) -> Matrix {
    let (m, _) = f.w.shape();
    let n = f.h.cols();
    let mut out = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let mut sum = 0.0;
            for k in 0..f.rank {
                sum += f.w.get(i, k) * f.h.get(k, j);
            }
            out.set(i, j, sum);
        }
    }
    out
}

/// Rank-one layers: latent `i` is the outer product of column `i` of `W` and
/// row `i` of `H`. Their entrywise sum reproduces [`nmf_predict`].
pub fn nmf_latent_matrices(f: &NmfFactorization) -> Vec<Matrix> {
    let (m, _) = f.w.shape();
    let n = f.h.cols();
    (0..f.rank)
        .map(|k| {
            let mut out = Matrix::zeros(m, n);
            for i in 0..m {
                let w_ik = f.w.get(i, k);
                for j in 0..n {
                    out.set(i, j, w_ik * f.h.get(k, j));
                }
            }
            out
        })
        .collect()
}
