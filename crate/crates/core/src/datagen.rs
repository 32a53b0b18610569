//! Data preparation: synthetic (max,+) matrices, train/test mask splits,
//! the log2(x+1) transform, and Ward feature agglomeration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Mask, Matrix, MaskedMatrix};
use crate::tropical::trop_matmul;

/// Parameters for synthetic (max,+) data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub rows: usize,
    pub cols: usize,
    pub true_rank: usize,
    pub seed: u64,
}

/// Max-plus product of two uniform[0,1) factor matrices: `R = A ⊗ B` with
/// `A` m×r and `B` r×n, filled row-major from a ChaCha stream so the output
/// is deterministic per seed. All entries land in [0, 2).
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<MaskedMatrix> {
    if spec.true_rank == 0 || spec.true_rank > spec.rows.min(spec.cols) {
        return Err(Error::InvalidRank {
            rank: spec.true_rank,
            rows: spec.rows,
            cols: spec.cols,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a_data: Vec<f64> = (0..spec.rows * spec.true_rank).map(|_| rng.gen::<f64>()).collect();
    let b_data: Vec<f64> = (0..spec.true_rank * spec.cols).map(|_| rng.gen::<f64>()).collect();
    let a = Matrix::from_vec(spec.rows, spec.true_rank, a_data)?;
    let b = Matrix::from_vec(spec.true_rank, spec.cols, b_data)?;
    MaskedMatrix::fully_given(trop_matmul(&a, &b)?)
}

/// Disjoint train/test partition of a matrix's given entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskSplit {
    pub train_mask: Mask,
    pub test_mask: Mask,
    pub test_fraction: f64_bits::F64Eq,
    pub seed: u64,
}

// Mask splits get compared in tests; wrap the fraction so Eq derives.
mod f64_bits {
    #[derive(Debug, Clone, Copy)]
    pub struct F64Eq(pub f64);

    impl PartialEq for F64Eq {
        fn eq(&self, other: &Self) -> bool {
            self.0.to_bits() == other.0.to_bits()
        }
    }
    impl Eq for F64Eq {}
}

impl MaskSplit {
    pub fn test_fraction(&self) -> f64 {
        self.test_fraction.0
    }
}

/// Sidecar schema for persisting a split next to its matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskSplitSidecar {
    pub test_fraction: f64,
    pub seed: u64,
    pub test_indices: Vec<(usize, usize)>,
}

impl MaskSplit {
    pub fn to_sidecar(&self) -> MaskSplitSidecar {
        MaskSplitSidecar {
            test_fraction: self.test_fraction.0,
            seed: self.seed,
            test_indices: self.test_mask.true_entries(),
        }
    }

    /// Rebuilds a split from its sidecar given the source matrix.
    pub fn from_sidecar(sidecar: &MaskSplitSidecar, source: &MaskedMatrix) -> Result<Self> {
        let (rows, cols) = source.shape();
        let mut test_mask = Mask::filled(rows, cols, false);
        for &(i, j) in &sidecar.test_indices {
            if i >= rows || j >= cols || !source.is_given(i, j) {
                return Err(Error::DimensionMismatch {
                    context: "MaskSplit::from_sidecar",
                    expected: format!("given entries of a {rows}x{cols} matrix"),
                    found: format!("({i}, {j})"),
                });
            }
            test_mask.set(i, j, true);
        }
        let mut train_mask = Mask::filled(rows, cols, false);
        for i in 0..rows {
            for j in 0..cols {
                train_mask.set(i, j, source.is_given(i, j) && !test_mask.get(i, j));
            }
        }
        Ok(MaskSplit {
            train_mask,
            test_mask,
            test_fraction: f64_bits::F64Eq(sidecar.test_fraction),
            seed: sidecar.seed,
        })
    }
}

const SPLIT_ATTEMPTS: usize = 1000;

/// Uniformly selects `round(test_fraction · given)` given entries as the test
/// set, re-drawing until every row and column keeps at least one train entry
/// (the coverage the masked solver requires).
pub fn mask_split(r: &MaskedMatrix, test_fraction: f64, seed: u64) -> Result<MaskSplit> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidFraction(test_fraction));
    }
    let (rows, cols) = r.shape();
    let given: Vec<(usize, usize)> = r.mask().true_entries();
    let total = given.len();
    let test_count = ((test_fraction * total as f64).round() as usize).clamp(1, total - 1);
    // every row and column needs a train entry, so this many must remain
    if total - test_count < rows.max(cols) {
        return Err(Error::InfeasibleSplit {
            given: total,
            test_fraction,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..total).collect();
    for _ in 0..SPLIT_ATTEMPTS {
        for t in 0..test_count {
            let pick = rng.gen_range(t..total);
            pool.swap(t, pick);
        }
        let mut test_mask = Mask::filled(rows, cols, false);
        for &idx in &pool[..test_count] {
            let (i, j) = given[idx];
            test_mask.set(i, j, true);
        }
        let mut row_cover = vec![false; rows];
        let mut col_cover = vec![false; cols];
        for &(i, j) in &given {
            if !test_mask.get(i, j) {
                row_cover[i] = true;
                col_cover[j] = true;
            }
        }
        if row_cover.iter().all(|&c| c) && col_cover.iter().all(|&c| c) {
            let mut train_mask = Mask::filled(rows, cols, false);
            for &(i, j) in &given {
                if !test_mask.get(i, j) {
                    train_mask.set(i, j, true);
                }
            }
            return Ok(MaskSplit {
                train_mask,
                test_mask,
                test_fraction: f64_bits::F64Eq(test_fraction),
                seed,
            });
        }
    }
    Err(Error::InfeasibleSplit {
        given: total,
        test_fraction,
    })
}

/// Entrywise `log2(x + 1)` on given entries; the mask is unchanged.
pub fn log_transform(r: &MaskedMatrix) -> Result<MaskedMatrix> {
    let mut values = r.values().clone();
    for (i, j, v) in r.given_entries() {
        if v < 0.0 {
            return Err(Error::NegativeInput { row: i, col: j, value: v });
        }
        values.set(i, j, (v + 1.0).log2());
    }
    MaskedMatrix::new(values, r.mask().clone())
}

/// Ward agglomeration of columns into `n_clusters` meta-columns.
///
/// Nearest-neighbor-chain clustering with the Lance–Williams recurrence on
/// squared Euclidean distances (ties toward the smaller index). Returns the
/// reduced matrix, whose column c is the entrywise mean of its member
/// columns, and the per-column cluster assignment; clusters are numbered by
/// their smallest member column.
pub fn feature_agglomeration(x: &Matrix, n_clusters: usize) -> Result<(Matrix, Vec<usize>)> {
    let (m, g) = x.shape();
    if n_clusters == 0 || n_clusters > g {
        return Err(Error::InvalidClusterCount {
            requested: n_clusters,
            available: g,
        });
    }
    let merges = ward_dendrogram(x);
    let labels = cut_dendrogram(&merges, g, n_clusters);

    let mut reduced = Matrix::zeros(m, n_clusters);
    let mut counts = vec![0usize; n_clusters];
    for (col, &label) in labels.iter().enumerate() {
        counts[label] += 1;
        for i in 0..m {
            reduced.set(i, label, reduced.get(i, label) + x.get(i, col));
        }
    }
    for label in 0..n_clusters {
        for i in 0..m {
            reduced.set(i, label, reduced.get(i, label) / counts[label] as f64);
        }
    }
    Ok((reduced, labels))
}

/// One merge of the dendrogram, in emission order.
#[derive(Debug, Clone, Copy)]
struct Merge {
    a: usize,
    b: usize,
    /// Ward cost (squared-distance scale) at which the clusters fused.
    height: f64,
}

/// Builds the full Ward dendrogram over columns by the nearest-neighbor-chain
/// algorithm. Returned merges reference original column indices through each
/// cluster's smallest member (`a` and `b` are representatives).
fn ward_dendrogram(x: &Matrix) -> Vec<Merge> {
    let g = x.cols();
    if g <= 1 {
        return Vec::new();
    }
    // squared Euclidean distances between active cluster slots
    let mut dist = vec![0.0f64; g * g];
    for a in 0..g {
        for b in (a + 1)..g {
            let mut sq = 0.0;
            for i in 0..x.rows() {
                let d = x.get(i, a) - x.get(i, b);
                sq += d * d;
            }
            dist[a * g + b] = sq;
            dist[b * g + a] = sq;
        }
    }
    let mut alive = vec![true; g];
    let mut size = vec![1usize; g];
    let mut repr: Vec<usize> = (0..g).collect(); // smallest member per slot
    let mut merges = Vec::with_capacity(g - 1);
    let mut chain: Vec<usize> = Vec::with_capacity(g);

    for _ in 0..(g - 1) {
        if chain.is_empty() {
            let start = alive.iter().position(|&a| a).expect("clusters remain");
            chain.push(start);
        }
        loop {
            let top = *chain.last().unwrap();
            // nearest alive neighbor, ties to the smallest slot
            let mut nearest = usize::MAX;
            let mut best = f64::INFINITY;
            for cand in 0..g {
                if cand != top && alive[cand] {
                    let d = dist[top * g + cand];
                    if d < best {
                        best = d;
                        nearest = cand;
                    }
                }
            }
            if chain.len() >= 2 && chain[chain.len() - 2] == nearest {
                // reciprocal pair: merge top and nearest
                chain.pop();
                chain.pop();
                let (a, b) = if top < nearest { (top, nearest) } else { (nearest, top) };
                merges.push(Merge {
                    a: repr[a],
                    b: repr[b],
                    height: best,
                });
                // fuse b into a with the Ward Lance-Williams update
                let (na, nb) = (size[a] as f64, size[b] as f64);
                for other in 0..g {
                    if other != a && other != b && alive[other] {
                        let nx = size[other] as f64;
                        let dax = dist[a * g + other];
                        let dbx = dist[b * g + other];
                        let dab = dist[a * g + b];
                        let merged = ((na + nx) * dax + (nb + nx) * dbx - nx * dab)
                            / (na + nb + nx);
                        dist[a * g + other] = merged;
                        dist[other * g + a] = merged;
                    }
                }
                alive[b] = false;
                size[a] += size[b];
                repr[a] = repr[a].min(repr[b]);
                break;
            }
            chain.push(nearest);
        }
        // drop chain members invalidated by the merge
        chain.retain(|&slot| alive[slot]);
    }
    merges
}

/// Applies the `g - n_clusters` cheapest merges (height order, emission order
/// on ties) and labels columns by cluster, numbered by smallest member.
fn cut_dendrogram(merges: &[Merge], g: usize, n_clusters: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..merges.len()).collect();
    order.sort_by(|&p, &q| {
        merges[p]
            .height
            .partial_cmp(&merges[q].height)
            .unwrap()
            .then(p.cmp(&q))
    });
    let mut parent: Vec<usize> = (0..g).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for &idx in order.iter().take(g - n_clusters) {
        let ra = find(&mut parent, merges[idx].a);
        let rb = find(&mut parent, merges[idx].b);
        // root at the smaller representative
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[drop] = keep;
    }
    // number clusters by smallest member in column order
    let mut label_of_root: Vec<Option<usize>> = vec![None; g];
    let mut labels = vec![0usize; g];
    let mut next = 0usize;
    for col in 0..g {
        let root = find(&mut parent, col);
        let label = match label_of_root[root] {
            Some(l) => l,
            None => {
                let l = next;
                label_of_root[root] = Some(l);
                next += 1;
                l
            }
        };
        labels[col] = label;
    }
    labels
}
