//! Sparse tropical matrix factorization.
//!
//! Approximates a masked matrix `R` by `U ⊗ V` over (max,+), driving the
//! b-norm of the residual at given entries down by local updates. Each given
//! entry (i, j) proposes candidates: seed one factor entry from the data
//! (`U[i][k] = R[i][j] - V[k][j]` for the left-factor update, mirrored for
//! the right), then re-solve both factors as greatest subsolutions and accept
//! on strict objective decrease. One outer iteration scans all given entries
//! of the column-ordered matrix in row-major order, accepting improvements as
//! it goes; the fit stops when a full scan accepts nothing, when a scan's
//! total improvement drops below tolerance, or at the iteration cap.
//!
//! Because every accepted state ends in a greatest-subsolution solve, the
//! approximation never exceeds the data at given entries, and the accepted
//! objective sequence is strictly decreasing by construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{apply_inverse_to_columns, permute_columns, Matrix, MaskedMatrix, Permutation};
use crate::seeding::derive_seed;
use crate::solver::{solve_left, solve_right};
use crate::tropical::{b_norm, b_norm_of_product, trop_matmul};

/// Column ordering applied before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingStrategy {
    None,
    Random,
    MinAsc,
    MinDesc,
    MaxAsc,
    MaxDesc,
    MeanAsc,
    MeanDesc,
}

impl OrderingStrategy {
    pub const ALL: [OrderingStrategy; 8] = [
        OrderingStrategy::None,
        OrderingStrategy::Random,
        OrderingStrategy::MinAsc,
        OrderingStrategy::MinDesc,
        OrderingStrategy::MaxAsc,
        OrderingStrategy::MaxDesc,
        OrderingStrategy::MeanAsc,
        OrderingStrategy::MeanDesc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OrderingStrategy::None => "none",
            OrderingStrategy::Random => "random",
            OrderingStrategy::MinAsc => "min_asc",
            OrderingStrategy::MinDesc => "min_desc",
            OrderingStrategy::MaxAsc => "max_asc",
            OrderingStrategy::MaxDesc => "max_desc",
            OrderingStrategy::MeanAsc => "mean_asc",
            OrderingStrategy::MeanDesc => "mean_desc",
        }
    }
}

impl std::str::FromStr for OrderingStrategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        OrderingStrategy::ALL
            .iter()
            .find(|v| v.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown ordering strategy '{s}'"))
    }
}

/// Fit parameters. `seed` drives both the random ordering (when selected)
/// and the Random Acol initialization through disjoint derived streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub rank: usize,
    pub max_outer_iterations: usize,
    /// Stop once a full scan improves the objective by less than this.
    pub tolerance: f64,
    pub ordering: OrderingStrategy,
    /// Columns averaged per Random Acol draw; defaults to ⌈n/5⌉.
    pub subset_size: Option<usize>,
    pub seed: u64,
}

impl FitConfig {
    pub fn new(rank: usize) -> Self {
        FitConfig {
            rank,
            max_outer_iterations: 500,
            tolerance: 1e-10,
            ordering: OrderingStrategy::MinAsc,
            subset_size: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ordering(mut self, ordering: OrderingStrategy) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_max_outer_iterations(mut self, iters: usize) -> Self {
        self.max_outer_iterations = iters;
        self
    }
}

/// Result of a fit: `U` (m×r), `V` (r×n, already mapped back to the original
/// column order) and the column permutation used while fitting.
#[derive(Debug, Clone)]
pub struct Factorization {
    u: Matrix,
    v: Matrix,
    rank: usize,
    column_permutation: Permutation,
}

impl Factorization {
    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn column_permutation(&self) -> &Permutation {
        &self.column_permutation
    }
}

/// Why a fit stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    NoSolutionFound,
}

/// Convergence record: the objective after init, the strictly decreasing
/// sequence of accepted objectives, and the stopping reason.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitTrace {
    pub initial_objective: f64,
    pub objective_per_accept: Vec<f64>,
    pub iterations_run: usize,
    pub terminated_by: Termination,
}

impl FitTrace {
    pub fn final_objective(&self) -> f64 {
        self.objective_per_accept
            .last()
            .copied()
            .unwrap_or(self.initial_objective)
    }
}

/// Ranks columns by a per-column statistic over given entries (or shuffles /
/// keeps them for `Random` / `None`). `seed` is consumed only by `Random`.
pub fn order_columns(r: &MaskedMatrix, strategy: OrderingStrategy, seed: u64) -> Permutation {
    let n = r.cols();
    match strategy {
        OrderingStrategy::None => Permutation::identity(n),
        OrderingStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut forward: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                forward.swap(i, j);
            }
            Permutation::from_forward(forward).expect("shuffle yields a permutation")
        }
        _ => {
            let keys = column_stats(r, strategy);
            let mut forward: Vec<usize> = (0..n).collect();
            let descending = matches!(
                strategy,
                OrderingStrategy::MinDesc | OrderingStrategy::MaxDesc | OrderingStrategy::MeanDesc
            );
            if descending {
                forward.sort_by(|&a, &b| keys[b].partial_cmp(&keys[a]).unwrap());
            } else {
                forward.sort_by(|&a, &b| keys[a].partial_cmp(&keys[b]).unwrap());
            }
            Permutation::from_forward(forward).expect("sort yields a permutation")
        }
    }
}

fn column_stats(r: &MaskedMatrix, strategy: OrderingStrategy) -> Vec<f64> {
    let (m, n) = r.shape();
    let mut stats = vec![0.0f64; n];
    for (j, stat) in stats.iter_mut().enumerate() {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in 0..m {
            if r.is_given(i, j) {
                let v = r.get(i, j);
                min = min.min(v);
                max = max.max(v);
                sum += v;
                count += 1;
            }
        }
        *stat = match strategy {
            OrderingStrategy::MinAsc | OrderingStrategy::MinDesc => min,
            OrderingStrategy::MaxAsc | OrderingStrategy::MaxDesc => max,
            _ => sum / count as f64,
        };
    }
    stats
}

/// Random Acol initialization: each column of `U` is the entrywise mean of a
/// random subset of data columns, averaging given entries only. Rows with no
/// given entry across the subset fall back to the global mean of given
/// entries, so the result is always finite.
pub fn random_acol_init(
    r: &MaskedMatrix,
    rank: usize,
    subset_size: usize,
    seed: u64,
) -> Result<Matrix> {
    let (m, n) = r.shape();
    if rank == 0 {
        return Err(Error::InvalidRank { rank, rows: m, cols: n });
    }
    if subset_size == 0 || subset_size > n {
        return Err(Error::DimensionMismatch {
            context: "random_acol_init",
            expected: format!("subset size in 1..={n}"),
            found: format!("{subset_size}"),
        });
    }
    let global_mean = r.given_mean();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = Matrix::zeros(m, rank);
    let mut pool: Vec<usize> = (0..n).collect();
    for k in 0..rank {
        // partial Fisher-Yates, then ascending order so the row means are
        // accumulated in a canonical order
        for t in 0..subset_size {
            let pick = rng.gen_range(t..n);
            pool.swap(t, pick);
        }
        let mut chosen = pool[..subset_size].to_vec();
        chosen.sort_unstable();
        for i in 0..m {
            let mut sum = 0.0;
            let mut count = 0usize;
            for &j in &chosen {
                if r.is_given(i, j) {
                    sum += r.get(i, j);
                    count += 1;
                }
            }
            u.set(i, k, if count > 0 { sum / count as f64 } else { global_mean });
        }
    }
    Ok(u)
}

/// Left-factor update at given entry (i, j): for k in ascending order, seed
/// `U'[i][k] = R[i][j] - V[k][j]`, re-solve `V'` then `U'`, and return the
/// first candidate that strictly decreases the b-norm (`decreased = true`).
/// If no k improves, the last candidate is returned with `decreased = false`.
pub fn ulf(
    r: &MaskedMatrix,
    i: usize,
    j: usize,
    u: &Matrix,
    v: &Matrix,
) -> Result<(Matrix, Matrix, bool)> {
    assert!(r.is_given(i, j), "ulf requires a given entry, ({i}, {j}) is missing");
    let rank = u.cols();
    let current = b_norm(r, &trop_matmul(u, v)?)?;
    let mut last: Option<(Matrix, Matrix)> = None;
    for k in 0..rank {
        let mut u1 = u.clone();
        u1.set(i, k, r.get(i, j) - v.get(k, j));
        let v1 = solve_left(&u1, r)?;
        let u1 = solve_right(&v1, r)?;
        let objective = b_norm(r, &trop_matmul(&u1, &v1)?)?;
        if objective < current {
            return Ok((u1, v1, true));
        }
        last = Some((u1, v1));
    }
    let (u1, v1) = last.expect("rank >= 1");
    Ok((u1, v1, false))
}

/// Right-factor mirror of [`ulf`]: seeds `V'[k][j] = R[i][j] - U[i][k]`,
/// re-solves `U'` then `V'`.
pub fn urf(
    r: &MaskedMatrix,
    i: usize,
    j: usize,
    u: &Matrix,
    v: &Matrix,
) -> Result<(Matrix, Matrix, bool)> {
    assert!(r.is_given(i, j), "urf requires a given entry, ({i}, {j}) is missing");
    let rank = u.cols();
    let current = b_norm(r, &trop_matmul(u, v)?)?;
    let mut last: Option<(Matrix, Matrix)> = None;
    for k in 0..rank {
        let mut v1 = v.clone();
        v1.set(k, j, r.get(i, j) - u.get(i, k));
        let u1 = solve_right(&v1, r)?;
        let v1 = solve_left(&u1, r)?;
        let objective = b_norm(r, &trop_matmul(&u1, &v1)?)?;
        if objective < current {
            return Ok((u1, v1, true));
        }
        last = Some((u1, v1));
    }
    let (u1, v1) = last.expect("rank >= 1");
    Ok((u1, v1, false))
}

// Smallest value, the index attaining it first, and the smallest value over
// the remaining indices (for max-reductions, the mirrored meaning). Lets a
// reduction be re-evaluated with one participant removed or replaced without
// rescanning: min/max are order-independent over finite floats, so the
// reassembled result is bit-identical to a full rescan.
#[derive(Debug, Clone, Copy)]
struct Top2 {
    best: f64,
    arg: usize,
    second: f64,
}

impl Top2 {
    const MIN_EMPTY: Top2 = Top2 {
        best: f64::INFINITY,
        arg: usize::MAX,
        second: f64::INFINITY,
    };
    const MAX_EMPTY: Top2 = Top2 {
        best: f64::NEG_INFINITY,
        arg: usize::MAX,
        second: f64::NEG_INFINITY,
    };

    #[inline]
    fn push_min(&mut self, value: f64, index: usize) {
        if value < self.best {
            self.second = self.best;
            self.best = value;
            self.arg = index;
        } else if value < self.second {
            self.second = value;
        }
    }

    #[inline]
    fn push_max(&mut self, value: f64, index: usize) {
        if value > self.best {
            self.second = self.best;
            self.best = value;
            self.arg = index;
        } else if value > self.second {
            self.second = value;
        }
    }

    /// The reduction's value with index `exclude` removed.
    #[inline]
    fn without(&self, exclude: usize) -> f64 {
        if self.arg == exclude {
            self.second
        } else {
            self.best
        }
    }
}

/// `min_j (R[i][j] - row[j])` per row i — one column of a right solve.
fn minplus_col_from_row(row: &[f64], r: &MaskedMatrix, out: &mut [f64]) -> Result<()> {
    let (m, n) = r.shape();
    for i in 0..m {
        let mask_row = r.mask().row(i);
        let val_row = r.values().row(i);
        let mut best: Option<f64> = None;
        for j in 0..n {
            if mask_row[j] {
                let cand = val_row[j] - row[j];
                best = Some(match best {
                    Some(cur) if cur <= cand => cur,
                    _ => cand,
                });
            }
        }
        match best {
            Some(v) => out[i] = v,
            None => return Err(Error::EmptyMinimum { row: i, col: 0 }),
        }
    }
    Ok(())
}

/// `min_i (R[i][j] - col[i])` per column j — one row of a left solve.
fn minplus_row_from_col(col: &[f64], r: &MaskedMatrix, out: &mut [f64]) -> Result<()> {
    let (m, n) = r.shape();
    let mut seen = vec![false; n];
    for i in 0..m {
        let c_i = col[i];
        let mask_row = r.mask().row(i);
        let val_row = r.values().row(i);
        for j in 0..n {
            if mask_row[j] {
                let cand = val_row[j] - c_i;
                if !seen[j] || cand < out[j] {
                    out[j] = cand;
                    seen[j] = true;
                }
            }
        }
    }
    if let Some(j) = seen.iter().position(|&s| !s) {
        return Err(Error::EmptyMinimum { row: 0, col: j });
    }
    Ok(())
}

/// The per-entry scan state: current factors, their re-solved caches, and
/// the candidate scratch space.
///
/// A candidate seeded at component k differs from the cached solve pair in
/// exactly one row of V and one column of U, so each attempt recomputes only
/// those two vectors (the first via stored exclusion minima, the second via
/// one kernel pass) and evaluates the objective through per-entry top-2 maxima
/// instead of a full product.
struct FitEngine<'a> {
    r: &'a MaskedMatrix,
    rank: usize,
    given: Vec<(usize, usize)>,
    u: Matrix,
    v: Matrix,
    current: f64,
    // ULF path: V' rows come from vs, U'' columns from us2 = solve_right(vs)
    vs: Matrix,
    us2: Matrix,
    // URF path: U' columns come from ur, V'' rows from vr2 = solve_left(ur)
    ur: Matrix,
    vr2: Matrix,
    // exclusion minima: vs_top2 per (k, j) over rows, ur_top2 per (i, k) over columns
    vs_top2: Vec<Top2>,
    ur_top2: Vec<Top2>,
    // per given entry: top-2 over k of u[i][k] + v[k][j] for each cache pair
    norm_ulf: Vec<Top2>,
    norm_urf: Vec<Top2>,
    fresh_col: Vec<f64>,
    fresh_row: Vec<f64>,
}

impl<'a> FitEngine<'a> {
    fn new(r: &'a MaskedMatrix, u: Matrix, v: Matrix, current: f64) -> Result<Self> {
        let (m, n) = r.shape();
        let rank = u.cols();
        let given = r.mask().true_entries();
        let norm_len = given.len();
        let mut engine = FitEngine {
            r,
            rank,
            given,
            u,
            v,
            current,
            vs: Matrix::zeros(rank, n),
            us2: Matrix::zeros(m, rank),
            ur: Matrix::zeros(m, rank),
            vr2: Matrix::zeros(rank, n),
            vs_top2: vec![Top2::MIN_EMPTY; rank * n],
            ur_top2: vec![Top2::MIN_EMPTY; m * rank],
            norm_ulf: vec![Top2::MAX_EMPTY; norm_len],
            norm_urf: vec![Top2::MAX_EMPTY; norm_len],
            fresh_col: vec![0.0; m],
            fresh_row: vec![0.0; n],
        };
        engine.refresh_caches()?;
        Ok(engine)
    }

    /// Recomputes every cache from the current accepted (U, V).
    fn refresh_caches(&mut self) -> Result<()> {
        let (m, n) = self.r.shape();
        // vs = solve_left(u) with exclusion minima over rows
        for k in 0..self.rank {
            let slice = &mut self.vs_top2[k * n..(k + 1) * n];
            slice.fill(Top2::MIN_EMPTY);
            for i in 0..m {
                let u_ik = self.u.get(i, k);
                let mask_row = self.r.mask().row(i);
                let val_row = self.r.values().row(i);
                for j in 0..n {
                    if mask_row[j] {
                        slice[j].push_min(val_row[j] - u_ik, i);
                    }
                }
            }
            for j in 0..n {
                let t = slice[j];
                if t.arg == usize::MAX {
                    return Err(Error::EmptyMinimum { row: k, col: j });
                }
                self.vs.set(k, j, t.best);
            }
        }
        self.us2 = solve_right(&self.vs, self.r)?;
        // ur = solve_right(v) with exclusion minima over columns
        for k in 0..self.rank {
            for i in 0..m {
                let mask_row = self.r.mask().row(i);
                let val_row = self.r.values().row(i);
                let mut t = Top2::MIN_EMPTY;
                for j in 0..n {
                    if mask_row[j] {
                        t.push_min(val_row[j] - self.v.get(k, j), j);
                    }
                }
                if t.arg == usize::MAX {
                    return Err(Error::EmptyMinimum { row: i, col: k });
                }
                self.ur.set(i, k, t.best);
                self.ur_top2[i * self.rank + k] = t;
            }
        }
        self.vr2 = solve_left(&self.ur, self.r)?;
        build_norm_top2(&self.given, &self.us2, &self.vs, &mut self.norm_ulf);
        build_norm_top2(&self.given, &self.ur, &self.vr2, &mut self.norm_urf);
        Ok(())
    }

    /// Tries ULF then URF at the given entry, accepting the first strict
    /// improvement into (U, V). Returns whether something was accepted.
    fn attempt_entry(&mut self, i: usize, j: usize) -> Result<bool> {
        if self.try_family(i, j, true)? || self.try_family(i, j, false)? {
            self.refresh_caches()?;
            return Ok(true);
        }
        Ok(false)
    }

    fn try_family(&mut self, i: usize, j: usize, left: bool) -> Result<bool> {
        let (m, n) = self.r.shape();
        let r_ij = self.r.get(i, j);
        for k in 0..self.rank {
            if left {
                // seed U'[i][k] = R[i][j] - V[k][j]; V' row k by exclusion,
                // U'' column k by one kernel pass
                let seed = r_ij - self.v.get(k, j);
                let mask_row_i = self.r.mask().row(i);
                let val_row_i = self.r.values().row(i);
                let top = &self.vs_top2[k * n..(k + 1) * n];
                for jj in 0..n {
                    let mut val = top[jj].without(i);
                    if mask_row_i[jj] {
                        let term = val_row_i[jj] - seed;
                        if term < val {
                            val = term;
                        }
                    }
                    self.fresh_row[jj] = val;
                }
                minplus_col_from_row(&self.fresh_row, self.r, &mut self.fresh_col)?;
            } else {
                // seed V'[k][j] = R[i][j] - U[i][k]; U' column k by exclusion,
                // V'' row k by one kernel pass
                let seed = r_ij - self.u.get(i, k);
                for ii in 0..m {
                    let mut val = self.ur_top2[ii * self.rank + k].without(j);
                    if self.r.is_given(ii, j) {
                        let term = self.r.get(ii, j) - seed;
                        if term < val {
                            val = term;
                        }
                    }
                    self.fresh_col[ii] = val;
                }
                minplus_row_from_col(&self.fresh_col, self.r, &mut self.fresh_row)?;
            }
            let top2 = if left { &self.norm_ulf } else { &self.norm_urf };
            let objective = candidate_norm(
                self.r,
                &self.given,
                top2,
                &self.fresh_col,
                &self.fresh_row,
                k,
                self.current,
            );
            if objective < self.current {
                let (u_base, v_base) = if left {
                    (&self.us2, &self.vs)
                } else {
                    (&self.ur, &self.vr2)
                };
                let mut u_new = u_base.clone();
                for ii in 0..m {
                    u_new.set(ii, k, self.fresh_col[ii]);
                }
                let mut v_new = v_base.clone();
                v_new.row_mut(k).copy_from_slice(&self.fresh_row[..n]);
                self.u = u_new;
                self.v = v_new;
                self.current = objective;
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn build_norm_top2(given: &[(usize, usize)], u: &Matrix, v: &Matrix, out: &mut [Top2]) {
    let rank = u.cols();
    for (slot, &(i, j)) in out.iter_mut().zip(given) {
        let mut t = Top2::MAX_EMPTY;
        let u_row = u.row(i);
        for (k, &u_ik) in u_row.iter().enumerate().take(rank) {
            t.push_max(u_ik + v.get(k, j), k);
        }
        *slot = t;
    }
}

/// b-norm of the candidate whose component `k_star` is overridden by the
/// fresh column/row, using the stored per-entry top-2 maxima of the cache
/// pair. Bails out above `bail` (the sum only grows).
fn candidate_norm(
    r: &MaskedMatrix,
    given: &[(usize, usize)],
    top2: &[Top2],
    u_fresh_col: &[f64],
    v_fresh_row: &[f64],
    k_star: usize,
    bail: f64,
) -> f64 {
    let mut sum = 0.0;
    for (t, &(i, j)) in top2.iter().zip(given) {
        let fresh = u_fresh_col[i] + v_fresh_row[j];
        let base = t.without(k_star);
        let best = if fresh > base { fresh } else { base };
        sum += (r.get(i, j) - best).abs();
        if sum >= bail {
            return sum;
        }
    }
    sum
}

/// Runs the factorization. Columns are ordered per the config, `U` is
/// Random-Acol initialized, `V` starts as the greatest subsolution of
/// `U ⊗ X = R`, and outer iterations scan the given entries (row-major,
/// left update tried before right) until no scan improves the objective.
pub fn fit(r: &MaskedMatrix, config: &FitConfig) -> Result<(Factorization, FitTrace)> {
    let (m, n) = r.shape();
    if config.rank == 0 {
        return Err(Error::InvalidRank {
            rank: config.rank,
            rows: m,
            cols: n,
        });
    }
    assert!(
        config.max_outer_iterations >= 1,
        "fit requires at least one outer iteration"
    );
    let ordering_seed = derive_seed(config.seed, 0x4f52_4445);
    let acol_seed = derive_seed(config.seed, 0x4143_4f4c);
    let perm = order_columns(r, config.ordering, ordering_seed);
    let rp = permute_columns(r, &perm)?;
    let subset = config
        .subset_size
        .unwrap_or_else(|| std::cmp::max(1, n.div_ceil(5)));
    let u = random_acol_init(&rp, config.rank, subset, acol_seed)?;
    let v = solve_left(&u, &rp)?;
    let initial_objective = b_norm_of_product(&rp, &u, &v, f64::INFINITY);

    let mut engine = FitEngine::new(&rp, u, v, initial_objective)?;
    let entries = engine.given.clone();
    let mut trace = Vec::new();
    let mut iterations_run = 0;
    let mut terminated_by = Termination::MaxIterations;

    for _ in 0..config.max_outer_iterations {
        iterations_run += 1;
        let scan_start = engine.current;
        let mut accepted_in_scan = 0usize;
        for &(i, j) in &entries {
            if engine.attempt_entry(i, j)? {
                trace.push(engine.current);
                accepted_in_scan += 1;
            }
        }
        if accepted_in_scan == 0 {
            terminated_by = Termination::NoSolutionFound;
            break;
        }
        if scan_start - engine.current < config.tolerance {
            terminated_by = Termination::Converged;
            break;
        }
    }

    let v_original_order = apply_inverse_to_columns(&engine.v, &perm)?;
    Ok((
        Factorization {
            u: engine.u,
            v: v_original_order,
            rank: config.rank,
            column_permutation: perm,
        },
        FitTrace {
            initial_objective,
            objective_per_accept: trace,
            iterations_run,
            terminated_by,
        },
    ))
}

/// The model's full reconstruction `U ⊗ V`, in original column order. Serves
/// as the approximation at train entries and the prediction at masked ones.
pub fn predict(f: &Factorization) -> Matrix {
    trop_matmul(&f.u, &f.v).expect("factor shapes agree by construction")
}

/// Single-component reconstructions: `R(i)[a][b] = U[a][i] + V[i][b]`. Their
/// entrywise maximum reproduces [`predict`] exactly.
pub fn latent_matrices(f: &Factorization) -> Vec<Matrix> {
    let (m, _) = f.u.shape();
    let n = f.v.cols();
    (0..f.rank)
        .map(|k| {
            let mut out = Matrix::zeros(m, n);
            for i in 0..m {
                let u_ik = f.u.get(i, k);
                for j in 0..n {
                    out.set(i, j, u_ik + f.v.get(k, j));
                }
            }
            out
        })
        .collect()
}

/// Which component attains the maximum at each entry (row-major), ties going
/// to the smallest index. Partitions the entries of the reconstruction.
pub fn latent_dominance(f: &Factorization) -> Vec<usize> {
    let (m, _) = f.u.shape();
    let n = f.v.cols();
    let mut out = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            let mut best_k = 0;
            let mut best = f.u.get(i, 0) + f.v.get(0, j);
            for k in 1..f.rank {
                let cand = f.u.get(i, k) + f.v.get(k, j);
                if cand > best {
                    best = cand;
                    best_k = k;
                }
            }
            out.push(best_k);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Mask;
    use proptest::prelude::*;
    use rand::Rng;

    fn lattice(rows: usize, cols: usize, seed: u64, scale: f64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..rows * cols)
            .map(|_| rng.gen_range(-2048i32..=2048) as f64 / 1024.0 * scale)
            .collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    fn random_masked(rows: usize, cols: usize, seed: u64) -> MaskedMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let values = lattice(rows, cols, rng.gen(), 1.0);
            let bits: Vec<bool> = (0..rows * cols).map(|_| rng.gen_bool(0.8)).collect();
            let mask = Mask::from_vec(rows, cols, bits).unwrap();
            if let Ok(m) = MaskedMatrix::new(values, mask) {
                return m;
            }
        }
    }

    #[test]
    fn order_none_is_identity() {
        let r = MaskedMatrix::fully_given(lattice(4, 5, 1, 1.0)).unwrap();
        assert!(order_columns(&r, OrderingStrategy::None, 9).is_identity());
    }

    #[test]
    fn order_min_asc_sorts_by_column_minimum() {
        let values = Matrix::from_rows(&[&[3.0, 1.0, 2.0], &[9.0, 9.0, 9.0]]);
        let r = MaskedMatrix::fully_given(values).unwrap();
        let p = order_columns(&r, OrderingStrategy::MinAsc, 0);
        assert_eq!(p.forward(), &[1, 2, 0]);
    }

    #[test]
    fn order_min_desc_reverses_distinct_min_asc() {
        let values = Matrix::from_rows(&[&[3.0, 1.0, 2.0], &[9.0, 9.0, 9.0]]);
        let r = MaskedMatrix::fully_given(values).unwrap();
        let asc = order_columns(&r, OrderingStrategy::MinAsc, 0);
        let desc = order_columns(&r, OrderingStrategy::MinDesc, 0);
        let mut reversed = asc.forward().to_vec();
        reversed.reverse();
        assert_eq!(desc.forward(), reversed.as_slice());
    }

    #[test]
    fn order_stats_skip_missing_entries() {
        // column 0's smallest value is masked out, so its min is 5
        let values = Matrix::from_rows(&[&[0.0, 4.0], &[5.0, 6.0]]);
        let mask = Mask::from_vec(2, 2, vec![false, true, true, true]).unwrap();
        let r = MaskedMatrix::new(values, mask).unwrap();
        let p = order_columns(&r, OrderingStrategy::MinAsc, 0);
        assert_eq!(p.forward(), &[1, 0]);
    }

    #[test]
    fn order_random_is_seeded() {
        let r = MaskedMatrix::fully_given(lattice(3, 12, 2, 1.0)).unwrap();
        let a = order_columns(&r, OrderingStrategy::Random, 5);
        let b = order_columns(&r, OrderingStrategy::Random, 5);
        let c = order_columns(&r, OrderingStrategy::Random, 6);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_acol_full_subset_gives_row_means() {
        let values = lattice(5, 4, 3, 1.0);
        let r = MaskedMatrix::fully_given(values.clone()).unwrap();
        let u = random_acol_init(&r, 3, 4, 11).unwrap();
        for i in 0..5 {
            let mean = values.row(i).iter().sum::<f64>() / 4.0;
            for k in 0..3 {
                assert_eq!(u.get(i, k), mean);
            }
        }
    }

    #[test]
    fn random_acol_is_deterministic_per_seed() {
        let r = random_masked(6, 8, 4);
        let a = random_acol_init(&r, 2, 3, 17).unwrap();
        let b = random_acol_init(&r, 2, 3, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_acol_masked_hand_example() {
        // 4x3, subset picks some columns; verify against the rule by hand
        // using subset_size = 3 (all columns, ascending order).
        let values = Matrix::from_rows(&[
            &[1.0, 2.0, 3.0],
            &[4.0, 0.0, 6.0],
            &[0.0, 8.0, 0.0],
            &[1.0, 1.0, 1.0],
        ]);
        let mask = Mask::from_vec(
            4,
            3,
            vec![
                true, true, false, //
                true, false, true, //
                false, true, false, //
                false, false, true,
            ],
        )
        .unwrap();
        let r = MaskedMatrix::new(values, mask).unwrap();
        let u = random_acol_init(&r, 1, 3, 0).unwrap();
        assert_eq!(u.get(0, 0), 1.5); // (1+2)/2
        assert_eq!(u.get(1, 0), 5.0); // (4+6)/2
        assert_eq!(u.get(2, 0), 8.0);
        assert_eq!(u.get(3, 0), 1.0);
    }

    #[test]
    fn random_acol_fallback_fills_uncovered_subset_rows() {
        // row 2 is given only in column 2; restrict the subset to 1 column
        // and find a seed whose draw misses column 2
        let values = Matrix::from_rows(&[&[1.0, 2.0, 4.0], &[4.0, 5.0, 6.0], &[0.0, 0.0, 9.0]]);
        let mask = Mask::from_vec(
            3,
            3,
            vec![true, true, true, true, true, true, false, false, true],
        )
        .unwrap();
        let r = MaskedMatrix::new(values, mask).unwrap();
        let global = r.given_mean();
        let mut exercised = false;
        for seed in 0..32 {
            let u = random_acol_init(&r, 1, 1, seed).unwrap();
            assert!(u.iter().all(f64::is_finite));
            if u.get(2, 0) == global {
                exercised = true;
            }
        }
        assert!(exercised, "no seed exercised the global-mean fallback");
    }

    #[test]
    fn ulf_cannot_decrease_from_zero_objective() {
        let u0 = lattice(4, 2, 5, 1.0);
        let v0 = lattice(2, 3, 6, 1.0);
        let r = MaskedMatrix::fully_given(trop_matmul(&u0, &v0).unwrap()).unwrap();
        // start from an exact factorization: objective 0
        let v = solve_left(&u0, &r).unwrap();
        let u = solve_right(&v, &r).unwrap();
        assert_eq!(b_norm(&r, &trop_matmul(&u, &v).unwrap()).unwrap(), 0.0);
        let (_, _, decreased) = ulf(&r, 0, 0, &u, &v).unwrap();
        assert!(!decreased);
        let (_, _, decreased) = urf(&r, 0, 0, &u, &v).unwrap();
        assert!(!decreased);
    }

    #[test]
    fn ulf_takes_first_improving_component_not_best() {
        // search a small space for an instance where both components improve
        // and the second improves more; ulf must still return the first
        for seed in 0..200u64 {
            let r = random_masked(3, 3, seed);
            let u = lattice(3, 2, seed.wrapping_add(1000), 1.0);
            let v = solve_left(&u, &r).unwrap();
            let Some((i, j, _)) = r.given_entries().next() else {
                continue;
            };
            let current = b_norm(&r, &trop_matmul(&u, &v).unwrap()).unwrap();
            let mut candidates = Vec::new();
            for k in 0..2 {
                let mut u1 = u.clone();
                u1.set(i, k, r.get(i, j) - v.get(k, j));
                let v1 = solve_left(&u1, &r).unwrap();
                let u1 = solve_right(&v1, &r).unwrap();
                let obj = b_norm(&r, &trop_matmul(&u1, &v1).unwrap()).unwrap();
                candidates.push((u1, v1, obj));
            }
            if candidates[0].2 < current
                && candidates[1].2 < current
                && candidates[1].2 < candidates[0].2
            {
                let (u_got, v_got, decreased) = ulf(&r, i, j, &u, &v).unwrap();
                assert!(decreased);
                assert_eq!(u_got, candidates[0].0);
                assert_eq!(v_got, candidates[0].1);
                return;
            }
        }
        panic!("no instance found where the first component improves and the second improves more");
    }

    #[test]
    fn urf_matches_transposed_ulf() {
        let r = random_masked(4, 5, 77);
        let u = lattice(4, 2, 78, 1.0);
        let v = solve_left(&u, &r).unwrap();
        let Some((i, j, _)) = r.given_entries().next() else {
            panic!("no given entries")
        };
        let (u1, v1, dec1) = urf(&r, i, j, &u, &v).unwrap();

        // transpose the problem: R^T with factors (V^T, U^T), ULF at (j, i)
        let rt_vals = r.values().transpose();
        let mut rt_mask = Mask::filled(5, 4, false);
        for a in 0..4 {
            for b in 0..5 {
                rt_mask.set(b, a, r.is_given(a, b));
            }
        }
        let rt = MaskedMatrix::new(rt_vals, rt_mask).unwrap();
        let (ut, vt, dec2) = ulf(&rt, j, i, &v.transpose(), &u.transpose()).unwrap();
        assert_eq!(dec1, dec2);
        assert_eq!(u1, vt.transpose());
        assert_eq!(v1, ut.transpose());
    }

    #[test]
    fn update_outputs_satisfy_subsolution() {
        for seed in [1u64, 2, 3] {
            let r = random_masked(5, 4, seed);
            let u = lattice(5, 2, seed + 50, 1.0);
            let v = solve_left(&u, &r).unwrap();
            let (i, j, _) = r.given_entries().next().unwrap();
            for (u1, v1) in [
                {
                    let (a, b, _) = ulf(&r, i, j, &u, &v).unwrap();
                    (a, b)
                },
                {
                    let (a, b, _) = urf(&r, i, j, &u, &v).unwrap();
                    (a, b)
                },
            ] {
                let approx = trop_matmul(&u1, &v1).unwrap();
                for (a, b, val) in r.given_entries() {
                    assert!(approx.get(a, b) <= val);
                }
            }
        }
    }

    // Reference implementation of the fit loop built from the public ulf/urf
    // and full solves; the production loop with its incremental caches must
    // match it bit for bit.
    fn naive_fit(r: &MaskedMatrix, config: &FitConfig) -> (Matrix, Matrix, Vec<f64>, Termination) {
        let ordering_seed = derive_seed(config.seed, 0x4f52_4445);
        let acol_seed = derive_seed(config.seed, 0x4143_4f4c);
        let perm = order_columns(r, config.ordering, ordering_seed);
        let rp = permute_columns(r, &perm).unwrap();
        let subset = config
            .subset_size
            .unwrap_or_else(|| std::cmp::max(1, r.cols().div_ceil(5)));
        let mut u = random_acol_init(&rp, config.rank, subset, acol_seed).unwrap();
        let mut v = solve_left(&u, &rp).unwrap();
        let mut current = b_norm(&rp, &trop_matmul(&u, &v).unwrap()).unwrap();
        let given = rp.mask().true_entries();
        let mut trace = Vec::new();
        let mut terminated = Termination::MaxIterations;
        for _ in 0..config.max_outer_iterations {
            let scan_start = current;
            let mut accepts = 0;
            for &(i, j) in &given {
                let (u1, v1, mut decreased) = ulf(&rp, i, j, &u, &v).unwrap();
                let (u1, v1) = if decreased {
                    (u1, v1)
                } else {
                    let (u2, v2, dec2) = urf(&rp, i, j, &u, &v).unwrap();
                    decreased = dec2;
                    (u2, v2)
                };
                if decreased {
                    let objective = b_norm(&rp, &trop_matmul(&u1, &v1).unwrap()).unwrap();
                    u = u1;
                    v = v1;
                    current = objective;
                    trace.push(current);
                    accepts += 1;
                }
            }
            if accepts == 0 {
                terminated = Termination::NoSolutionFound;
                break;
            }
            if scan_start - current < config.tolerance {
                terminated = Termination::Converged;
                break;
            }
        }
        (u, apply_inverse_to_columns(&v, &perm).unwrap(), trace, terminated)
    }

    #[test]
    fn fit_matches_naive_reference_bit_for_bit() {
        for seed in 0..6u64 {
            let r = random_masked(7, 6, 900 + seed);
            let config = FitConfig {
                rank: 2,
                max_outer_iterations: 30,
                tolerance: 1e-10,
                ordering: OrderingStrategy::MinAsc,
                subset_size: None,
                seed,
            };
            let (f, tr) = fit(&r, &config).unwrap();
            let (u_ref, v_ref, trace_ref, term_ref) = naive_fit(&r, &config);
            assert_eq!(f.u, u_ref, "U diverged at seed {seed}");
            assert_eq!(f.v, v_ref, "V diverged at seed {seed}");
            assert_eq!(tr.objective_per_accept, trace_ref, "trace diverged at seed {seed}");
            assert_eq!(tr.terminated_by, term_ref);
        }
    }

    #[test]
    fn fit_recovers_exact_rank_on_fully_given_tropical_data() {
        let u0 = lattice(12, 2, 21, 1.0);
        let v0 = lattice(2, 9, 22, 1.0);
        let r = MaskedMatrix::fully_given(trop_matmul(&u0, &v0).unwrap()).unwrap();
        let config = FitConfig::new(2).with_seed(3);
        let (f, trace) = fit(&r, &config).unwrap();
        // strictly decreasing trace, final at or below the initial objective
        for w in trace.objective_per_accept.windows(2) {
            assert!(w[1] < w[0]);
        }
        assert!(trace.final_objective() <= trace.initial_objective);
        let final_norm = b_norm(&r, &predict(&f)).unwrap();
        assert_eq!(final_norm, trace.final_objective());
    }

    #[test]
    fn fit_is_deterministic() {
        let r = random_masked(8, 7, 31);
        let config = FitConfig::new(2).with_seed(9);
        let (f1, t1) = fit(&r, &config).unwrap();
        let (f2, t2) = fit(&r, &config).unwrap();
        assert_eq!(f1.u, f2.u);
        assert_eq!(f1.v, f2.v);
        assert_eq!(t1.objective_per_accept, t2.objective_per_accept);
    }

    #[test]
    fn fit_rejects_rank_zero() {
        let r = random_masked(4, 3, 1);
        assert!(matches!(
            fit(&r, &FitConfig::new(0)),
            Err(Error::InvalidRank { .. })
        ));
    }

    #[test]
    fn fit_subsolution_holds_at_every_accept() {
        // instrumented indirectly: the final state must satisfy it, and the
        // naive-equality test pins intermediate states to ulf/urf outputs,
        // which are checked above; here, verify the returned factorization
        for seed in 0..4u64 {
            let r = random_masked(6, 5, 40 + seed);
            let (f, _) = fit(&r, &FitConfig::new(2).with_seed(seed)).unwrap();
            let approx = predict(&f);
            for (i, j, val) in r.given_entries() {
                assert!(approx.get(i, j) <= val);
            }
        }
    }

    #[test]
    fn fit_permutation_equivariance() {
        let r = random_masked(6, 8, 55);
        let config = FitConfig::new(2).with_seed(4);
        let (f_a, t_a) = fit(&r, &config).unwrap();

        // manual pre-permutation with the same ordering, then strategy none
        let ordering_seed = derive_seed(config.seed, 0x4f52_4445);
        let perm = order_columns(&r, config.ordering, ordering_seed);
        let pre = permute_columns(&r, &perm).unwrap();
        let mut config_b = config.clone();
        config_b.ordering = OrderingStrategy::None;
        let (f_b, t_b) = fit(&pre, &config_b).unwrap();

        assert_eq!(f_a.u, f_b.u);
        assert_eq!(t_a.objective_per_accept, t_b.objective_per_accept);
        let v_b_original = apply_inverse_to_columns(&f_b.v, &perm).unwrap();
        assert_eq!(f_a.v, v_b_original);
    }

    #[test]
    fn fit_monotone_under_swapped_update_order() {
        // the contract is monotone decrease, not output equality
        let r = random_masked(6, 5, 91);
        let config = FitConfig::new(2).with_seed(8).with_max_outer_iterations(20);
        // swapped-order reference: URF before ULF
        let ordering_seed = derive_seed(config.seed, 0x4f52_4445);
        let acol_seed = derive_seed(config.seed, 0x4143_4f4c);
        let perm = order_columns(&r, config.ordering, ordering_seed);
        let rp = permute_columns(&r, &perm).unwrap();
        let mut u = random_acol_init(&rp, 2, 1, acol_seed).unwrap();
        let mut v = solve_left(&u, &rp).unwrap();
        let given = rp.mask().true_entries();
        let mut trace = Vec::new();
        for _ in 0..config.max_outer_iterations {
            let mut accepts = 0;
            for &(i, j) in &given {
                let (u1, v1, mut dec) = urf(&rp, i, j, &u, &v).unwrap();
                let (u1, v1) = if dec {
                    (u1, v1)
                } else {
                    let (u2, v2, d2) = ulf(&rp, i, j, &u, &v).unwrap();
                    dec = d2;
                    (u2, v2)
                };
                if dec {
                    let objective = b_norm(&rp, &trop_matmul(&u1, &v1).unwrap()).unwrap();
                    u = u1;
                    v = v1;
                    trace.push(objective);
                    accepts += 1;
                }
            }
            if accepts == 0 {
                break;
            }
        }
        for w in trace.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn predict_hand_example() {
        let f = Factorization {
            u: Matrix::from_rows(&[&[0.0], &[1.0]]),
            v: Matrix::from_rows(&[&[0.0, 2.0]]),
            rank: 1,
            column_permutation: Permutation::identity(2),
        };
        let p = predict(&f);
        assert_eq!(p.row(0), &[0.0, 2.0]);
        assert_eq!(p.row(1), &[1.0, 3.0]);
    }

    #[test]
    fn latent_max_reproduces_prediction_exactly() {
        let r = random_masked(6, 5, 70);
        let (f, _) = fit(&r, &FitConfig::new(3).with_seed(5)).unwrap();
        let latents = latent_matrices(&f);
        assert_eq!(latents.len(), 3);
        let p = predict(&f);
        for i in 0..6 {
            for j in 0..5 {
                let max = latents
                    .iter()
                    .map(|l| l.get(i, j))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert_eq!(max, p.get(i, j));
            }
        }
    }

    #[test]
    fn single_latent_equals_prediction_at_rank_one() {
        let r = random_masked(4, 4, 71);
        let (f, _) = fit(&r, &FitConfig::new(1).with_seed(6)).unwrap();
        let latents = latent_matrices(&f);
        assert_eq!(latents.len(), 1);
        assert_eq!(latents[0], predict(&f));
    }

    #[test]
    fn dominance_picks_smallest_index_on_ties() {
        let f = Factorization {
            u: Matrix::from_rows(&[&[1.0, 1.0]]),
            v: Matrix::from_rows(&[&[0.0], &[0.0]]),
            rank: 2,
            column_permutation: Permutation::identity(1),
        };
        assert_eq!(latent_dominance(&f), vec![0]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn fit_trace_strictly_decreasing(seed in 0u64..500) {
            let r = random_masked(5, 5, seed);
            let (_, trace) = fit(&r, &FitConfig::new(2).with_seed(seed)).unwrap();
            let mut prev = trace.initial_objective;
            for &obj in &trace.objective_per_accept {
                prop_assert!(obj < prev);
                prev = obj;
            }
        }

        #[test]
        fn dominance_is_consistent_with_latents(seed in 0u64..200) {
            let r = random_masked(4, 5, seed);
            let (f, _) = fit(&r, &FitConfig::new(2).with_seed(seed)).unwrap();
            let latents = latent_matrices(&f);
            let dom = latent_dominance(&f);
            let p = predict(&f);
            for i in 0..4 {
                for j in 0..5 {
                    let k = dom[i * 5 + j];
                    prop_assert_eq!(latents[k].get(i, j), p.get(i, j));
                }
            }
        }
    }
}
