//! Evaluation suite: masked RMSE, distance correlation, per-row
//! Pearson/Spearman, centered row norms, silhouette score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Mask, Matrix};

/// Metrics gathered for one fitted model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricsReport {
    pub train_rmse: f64,
    pub test_rmse: f64,
    pub dcor: f64,
    pub pearson_rows: RowCorrelationSummary,
    pub spearman_rows: RowCorrelationSummary,
    pub silhouette: Option<f64>,
    pub runtime_seconds: f64,
}

/// Summary over per-row correlations; degenerate (zero-variance) rows are
/// counted and excluded from the statistics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RowCorrelationSummary {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub undefined_rows: usize,
}

impl RowCorrelationSummary {
    /// Summarizes a vector of per-row correlations where NaN marks a
    /// degenerate row.
    pub fn from_rows(rows: &[f64]) -> Self {
        let defined: Vec<f64> = rows.iter().copied().filter(|v| !v.is_nan()).collect();
        let undefined_rows = rows.len() - defined.len();
        if defined.is_empty() {
            return RowCorrelationSummary {
                mean: f64::NAN,
                median: f64::NAN,
                min: f64::NAN,
                max: f64::NAN,
                undefined_rows,
            };
        }
        let mean = defined.iter().sum::<f64>() / defined.len() as f64;
        RowCorrelationSummary {
            mean,
            median: median(&defined),
            min: defined.iter().copied().fold(f64::INFINITY, f64::min),
            max: defined.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            undefined_rows,
        }
    }
}

/// Median with the average-of-two convention for even lengths.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of an empty slice");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Root-mean-square error over the entries selected by `selection`.
pub fn rmse(original: &Matrix, approx: &Matrix, selection: &Mask) -> Result<f64> {
    if original.shape() != approx.shape() || original.shape() != selection.shape() {
        return Err(Error::DimensionMismatch {
            context: "rmse",
            expected: format!("{:?}", original.shape()),
            found: format!("{:?} / {:?}", approx.shape(), selection.shape()),
        });
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..original.rows() {
        for j in 0..original.cols() {
            if selection.get(i, j) {
                let d = original.get(i, j) - approx.get(i, j);
                sum += d * d;
                count += 1;
            }
        }
    }
    if count == 0 {
        return Err(Error::EmptySelection);
    }
    Ok((sum / count as f64).sqrt())
}

fn euclidean_distance_matrix(x: &Matrix) -> Matrix {
    let n = x.rows();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sq = 0.0;
            for (a, b) in x.row(i).iter().zip(x.row(j)) {
                let diff = a - b;
                sq += diff * diff;
            }
            let dist = sq.sqrt();
            d.set(i, j, dist);
            d.set(j, i, dist);
        }
    }
    d
}

/// Double-centers a distance matrix in place: subtract row and column means,
/// add the grand mean.
fn double_center(d: &mut Matrix) {
    let n = d.rows();
    let mut row_mean = vec![0.0; n];
    let mut col_mean = vec![0.0; n];
    let mut grand = 0.0;
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j);
            row_mean[i] += v;
            col_mean[j] += v;
            grand += v;
        }
    }
    for v in row_mean.iter_mut().chain(col_mean.iter_mut()) {
        *v /= n as f64;
    }
    grand /= (n * n) as f64;
    for i in 0..n {
        for j in 0..n {
            let v = d.get(i, j) - row_mean[i] - col_mean[j] + grand;
            d.set(i, j, v);
        }
    }
}

/// Distance correlation between two matrices with equal row counts: the
/// Euclidean distance matrices are double-centered and combined into
/// `sqrt(V²_XY / (V_X · V_Y))`, in [0, 1]. Returns 0 when either distance
/// variance vanishes (constant rows).
pub fn distance_correlation(x: &Matrix, y: &Matrix) -> Result<f64> {
    if x.rows() != y.rows() {
        return Err(Error::RowCountMismatch {
            left: x.rows(),
            right: y.rows(),
        });
    }
    let n = x.rows();
    if n < 2 {
        return Err(Error::RowCountMismatch { left: n, right: n });
    }
    let mut a = euclidean_distance_matrix(x);
    let mut b = euclidean_distance_matrix(y);
    double_center(&mut a);
    double_center(&mut b);
    let n2 = (n * n) as f64;
    let mut vxy = 0.0;
    let mut vxx = 0.0;
    let mut vyy = 0.0;
    for i in 0..n {
        for j in 0..n {
            let av = a.get(i, j);
            let bv = b.get(i, j);
            vxy += av * bv;
            vxx += av * av;
            vyy += bv * bv;
        }
    }
    vxy /= n2;
    vxx /= n2;
    vyy /= n2;
    let vx = vxx.sqrt();
    let vy = vyy.sqrt();
    if vx * vy == 0.0 {
        return Ok(0.0);
    }
    Ok((vxy.max(0.0) / (vx * vy)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Pearson,
    Spearman,
}

/// Per-row correlation between `original` and `approx`. A row with zero
/// variance on either side gets NaN as an undefined marker; summaries skip
/// those rows. Spearman is Pearson on average ranks.
pub fn row_correlations(
    original: &Matrix,
    approx: &Matrix,
    kind: CorrelationKind,
) -> Result<Vec<f64>> {
    if original.shape() != approx.shape() {
        return Err(Error::DimensionMismatch {
            context: "row_correlations",
            expected: format!("{:?}", original.shape()),
            found: format!("{:?}", approx.shape()),
        });
    }
    let mut out = Vec::with_capacity(original.rows());
    for i in 0..original.rows() {
        let (a, b) = (original.row(i), approx.row(i));
        let r = match kind {
            CorrelationKind::Pearson => pearson(a, b),
            CorrelationKind::Spearman => pearson(&average_ranks(a), &average_ranks(b)),
        };
        out.push(r);
    }
    Ok(out)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let mean_a = a.iter().sum::<f64>() / n;
    let mean_b = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return f64::NAN;
    }
    // single sqrt of the product keeps self-correlation at exactly 1.0
    cov / (var_a * var_b).sqrt()
}

/// Ranks with ties averaged (1-based).
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j + 2) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// How matrices are centered before the centered row norms are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Centering {
    /// Subtract each matrix's global mean (default).
    #[default]
    Global,
    /// Subtract each row's own mean.
    PerRow,
}

/// Per-row Euclidean norms of `original - approx`, raw and after centering
/// both matrices (global-mean centering by default; see
/// [`centered_row_norms_with`]).
pub fn centered_row_norms(original: &Matrix, approx: &Matrix) -> Result<(Vec<f64>, Vec<f64>)> {
    centered_row_norms_with(original, approx, Centering::Global)
}

pub fn centered_row_norms_with(
    original: &Matrix,
    approx: &Matrix,
    centering: Centering,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if original.shape() != approx.shape() {
        return Err(Error::DimensionMismatch {
            context: "centered_row_norms",
            expected: format!("{:?}", original.shape()),
            found: format!("{:?}", approx.shape()),
        });
    }
    let row_norm = |a: &Matrix, b: &Matrix, i: usize, shift_a: f64, shift_b: f64| {
        a.row(i)
            .iter()
            .zip(b.row(i))
            .map(|(x, y)| {
                let d = (x - shift_a) - (y - shift_b);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    };
    let m = original.rows();
    let mut raw = Vec::with_capacity(m);
    let mut centered = Vec::with_capacity(m);
    let (global_a, global_b) = (original.mean(), approx.mean());
    for i in 0..m {
        raw.push(row_norm(original, approx, i, 0.0, 0.0));
        let (shift_a, shift_b) = match centering {
            Centering::Global => (global_a, global_b),
            Centering::PerRow => {
                let n = original.cols() as f64;
                (
                    original.row(i).iter().sum::<f64>() / n,
                    approx.row(i).iter().sum::<f64>() / n,
                )
            }
        };
        centered.push(row_norm(original, approx, i, shift_a, shift_b));
    }
    Ok((raw, centered))
}

/// Mean silhouette coefficient over all samples with Euclidean distances:
/// `(b - a) / max(a, b)` per sample, singletons contributing 0. Requires at
/// least two distinct labels.
pub fn silhouette_score(x: &Matrix, labels: &[usize]) -> Result<f64> {
    if labels.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            context: "silhouette_score",
            expected: format!("{} labels", x.rows()),
            found: format!("{}", labels.len()),
        });
    }
    let mut clusters: Vec<usize> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    if clusters.len() < 2 {
        return Err(Error::SingleCluster(clusters.len()));
    }
    let n = x.rows();
    let d = euclidean_distance_matrix(x);
    let counts: Vec<usize> = clusters
        .iter()
        .map(|&c| labels.iter().filter(|&&l| l == c).count())
        .collect();
    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        let own_pos = clusters.iter().position(|&c| c == own).unwrap();
        if counts[own_pos] == 1 {
            continue; // singleton contributes 0
        }
        let mut intra = 0.0;
        let mut inter = vec![0.0f64; clusters.len()];
        for j in 0..n {
            if j == i {
                continue;
            }
            let pos = clusters.iter().position(|&c| c == labels[j]).unwrap();
            if labels[j] == own {
                intra += d.get(i, j);
            } else {
                inter[pos] += d.get(i, j);
            }
        }
        let a = intra / (counts[own_pos] - 1) as f64;
        let b = clusters
            .iter()
            .enumerate()
            .filter(|&(pos, _)| pos != own_pos)
            .map(|(pos, _)| inter[pos] / counts[pos] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let data: Vec<f64> = (0..rows * cols).map(|_| rng.gen_range(-2.0..2.0)).collect();
        Matrix::from_vec(rows, cols, data).unwrap()
    }

    #[test]
    fn rmse_zero_on_exact_match() {
        let a = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let sel = Mask::filled(2, 2, true);
        assert_eq!(rmse(&a, &a, &sel).unwrap(), 0.0);
    }

    #[test]
    fn rmse_hand_value() {
        let a = Matrix::from_rows(&[&[0.0, 0.0]]);
        let b = Matrix::from_rows(&[&[3.0, 4.0]]);
        let sel = Mask::filled(1, 2, true);
        let expect = (25.0f64 / 2.0).sqrt();
        assert!((rmse(&a, &b, &sel).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn rmse_empty_selection_is_an_error() {
        let a = Matrix::zeros(2, 2);
        let sel = Mask::filled(2, 2, false);
        assert!(matches!(rmse(&a, &a, &sel), Err(Error::EmptySelection)));
    }

    #[test]
    fn rmse_invariant_under_entry_ordering() {
        // same multiset of residuals in different positions
        let orig = Matrix::from_rows(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let a = Matrix::from_rows(&[&[3.0, 4.0], &[0.0, 0.0]]);
        let b = Matrix::from_rows(&[&[0.0, 3.0], &[4.0, 0.0]]);
        let sel = Mask::filled(2, 2, true);
        assert_eq!(rmse(&orig, &a, &sel).unwrap(), rmse(&orig, &b, &sel).unwrap());
    }

    // literal four-loop implementation of the definition
    fn dcor_bruteforce(x: &Matrix, y: &Matrix) -> f64 {
        let n = x.rows();
        let dist = |m: &Matrix, i: usize, j: usize| {
            let mut sq = 0.0;
            for c in 0..m.cols() {
                let d = m.get(i, c) - m.get(j, c);
                sq += d * d;
            }
            sq.sqrt()
        };
        let center = |m: &Matrix| {
            let mut a = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    a.set(i, j, dist(m, i, j));
                }
            }
            let mut out = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut row = 0.0;
                    for t in 0..n {
                        row += a.get(i, t);
                    }
                    let mut col = 0.0;
                    for t in 0..n {
                        col += a.get(t, j);
                    }
                    let mut grand = 0.0;
                    for s in 0..n {
                        for t in 0..n {
                            grand += a.get(s, t);
                        }
                    }
                    out.set(
                        i,
                        j,
                        a.get(i, j) - row / n as f64 - col / n as f64 + grand / (n * n) as f64,
                    );
                }
            }
            out
        };
        let a = center(x);
        let b = center(y);
        let mut vxy = 0.0;
        let mut vxx = 0.0;
        let mut vyy = 0.0;
        for i in 0..n {
            for j in 0..n {
                vxy += a.get(i, j) * b.get(i, j);
                vxx += a.get(i, j) * a.get(i, j);
                vyy += b.get(i, j) * b.get(i, j);
            }
        }
        let n2 = (n * n) as f64;
        let vx = (vxx / n2).sqrt();
        let vy = (vyy / n2).sqrt();
        if vx * vy == 0.0 {
            return 0.0;
        }
        ((vxy / n2).max(0.0) / (vx * vy)).sqrt()
    }

    #[test]
    fn dcor_matches_bruteforce_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let n = rng.gen_range(2..=12usize);
            let p = rng.gen_range(1..=5usize);
            let q = rng.gen_range(1..=5usize);
            let x = random_matrix(n, p, &mut rng);
            let y = random_matrix(n, q, &mut rng);
            let got = distance_correlation(&x, &y).unwrap();
            let expect = dcor_bruteforce(&x, &y);
            assert!((got - expect).abs() < 1e-10, "got {got}, expected {expect}");
        }
    }

    #[test]
    fn dcor_self_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random_matrix(8, 3, &mut rng);
        let d = distance_correlation(&x, &x).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dcor_constant_matrix_is_zero() {
        let x = Matrix::filled(6, 3, 2.5);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let y = random_matrix(6, 3, &mut rng);
        assert_eq!(distance_correlation(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn dcor_translation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random_matrix(7, 4, &mut rng);
        let y = random_matrix(7, 2, &mut rng);
        let shifted = x.map(|v| v + 3.25);
        let d1 = distance_correlation(&x, &y).unwrap();
        let d2 = distance_correlation(&shifted, &y).unwrap();
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn dcor_symmetric_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = random_matrix(6, 3, &mut rng);
            let y = random_matrix(6, 3, &mut rng);
            let d1 = distance_correlation(&x, &y).unwrap();
            let d2 = distance_correlation(&y, &x).unwrap();
            assert!((d1 - d2).abs() < 1e-14);
            assert!((0.0..=1.0 + 1e-12).contains(&d1));
        }
    }

    #[test]
    fn dcor_rejects_row_mismatch() {
        let x = Matrix::zeros(3, 2);
        let y = Matrix::zeros(4, 2);
        assert!(matches!(
            distance_correlation(&x, &y),
            Err(Error::RowCountMismatch { .. })
        ));
    }

    #[test]
    fn row_correlations_perfect_and_anti() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random_matrix(5, 6, &mut rng);
        let same = row_correlations(&x, &x, CorrelationKind::Pearson).unwrap();
        assert!(same.iter().all(|&r| (r - 1.0).abs() < 1e-12));
        let neg = x.map(|v| -v);
        let anti = row_correlations(&x, &neg, CorrelationKind::Pearson).unwrap();
        assert!(anti.iter().all(|&r| (r + 1.0).abs() < 1e-12));
    }

    #[test]
    fn spearman_exact_one_under_monotone_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_matrix(4, 7, &mut rng);
        let cubed = x.map(|v| v.powi(3));
        let rs = row_correlations(&x, &cubed, CorrelationKind::Spearman).unwrap();
        for r in rs {
            assert_eq!(r, 1.0);
        }
    }

    #[test]
    fn degenerate_rows_marked_and_excluded() {
        let x = Matrix::from_rows(&[&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]]);
        let y = Matrix::from_rows(&[&[1.0, 2.5, 2.0], &[1.0, 2.0, 3.0]]);
        let rs = row_correlations(&x, &y, CorrelationKind::Pearson).unwrap();
        assert!(!rs[0].is_nan());
        assert!(rs[1].is_nan());
        let summary = RowCorrelationSummary::from_rows(&rs);
        assert_eq!(summary.undefined_rows, 1);
        assert_eq!(summary.mean, rs[0]);
    }

    #[test]
    fn spearman_ties_use_average_ranks() {
        assert_eq!(average_ranks(&[1.0, 2.0, 2.0, 3.0]), vec![1.0, 2.5, 2.5, 4.0]);
    }

    #[test]
    fn centered_norms_zero_on_match() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = random_matrix(4, 5, &mut rng);
        let (raw, centered) = centered_row_norms(&x, &x).unwrap();
        assert!(raw.iter().all(|&v| v == 0.0));
        assert!(centered.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_shift_vanishes_after_centering() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_matrix(4, 9, &mut rng);
        let shifted = x.map(|v| v + 1.5);
        let (raw, centered) = centered_row_norms(&x, &shifted).unwrap();
        let expect = 1.5 * (9.0f64).sqrt();
        for v in raw {
            assert!((v - expect).abs() < 1e-12);
        }
        for v in centered {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn centered_norms_hand_example() {
        let x = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let y = Matrix::from_rows(&[&[2.0, 2.0], &[3.0, 6.0]]);
        let (raw, centered) = centered_row_norms(&x, &y).unwrap();
        assert!((raw[0] - 1.0).abs() < 1e-15);
        assert!((raw[1] - 2.0).abs() < 1e-15);
        // global means: x -> 2.5, y -> 3.25; residuals shift by 0.75
        let r0 = ((1.0f64 - 0.75).powi(2) + 0.75f64.powi(2)).sqrt();
        let r1 = (0.75f64.powi(2) + (2.0f64 - 0.75).powi(2)).sqrt();
        assert!((centered[0] - r0).abs() < 1e-12);
        assert!((centered[1] - r1).abs() < 1e-12);
    }

    #[test]
    fn per_row_centering_kills_row_shifts() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let x = random_matrix(3, 6, &mut rng);
        let mut y = x.clone();
        for j in 0..6 {
            y.set(1, j, y.get(1, j) + 10.0); // shift only row 1
        }
        let (_, centered) =
            centered_row_norms_with(&x, &y, Centering::PerRow).unwrap();
        assert!(centered.iter().all(|&v| v.abs() < 1e-10));
    }

    #[test]
    fn silhouette_well_separated_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..20 {
            rows.push(vec![rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)]);
            labels.push(0);
        }
        for _ in 0..20 {
            rows.push(vec![
                100.0 + rng.gen_range(-0.1..0.1),
                100.0 + rng.gen_range(-0.1..0.1),
            ]);
            labels.push(1);
        }
        let data: Vec<f64> = rows.iter().flatten().copied().collect();
        let x = Matrix::from_vec(40, 2, data).unwrap();
        assert!(silhouette_score(&x, &labels).unwrap() > 0.9);
    }

    #[test]
    fn silhouette_random_labels_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let x = random_matrix(200, 2, &mut rng);
        let labels: Vec<usize> = (0..200).map(|_| rng.gen_range(0..2)).collect();
        let s = silhouette_score(&x, &labels).unwrap();
        assert!(s.abs() < 0.1, "score {s}");
    }

    #[test]
    fn silhouette_midline_sample_near_zero() {
        // two tight clusters, one sample exactly between them
        let x = Matrix::from_rows(&[
            &[0.0, 0.0],
            &[0.0, 0.2],
            &[10.0, 0.0],
            &[10.0, 0.2],
            &[5.0, 0.1],
        ]);
        let d = euclidean_distance_matrix(&x);
        // the midline sample's own-cluster and other-cluster mean distances
        let a = (d.get(4, 0) + d.get(4, 1)) / 2.0;
        let b = (d.get(4, 2) + d.get(4, 3)) / 2.0;
        assert!(((b - a) / a.max(b)).abs() < 0.01);
    }

    #[test]
    fn silhouette_single_cluster_is_error() {
        let x = Matrix::zeros(4, 2);
        assert!(matches!(
            silhouette_score(&x, &[1, 1, 1, 1]),
            Err(Error::SingleCluster(1))
        ));
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[0.3, 0.5, 0.9]), 0.5);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
    }
}
