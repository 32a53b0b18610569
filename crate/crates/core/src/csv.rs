//! CSV matrix files and JSON mask-split sidecars.
//!
//! Format: comma-separated, decimal point, row-major; an empty cell is a
//! missing entry ("nan"/"NaN" also accepted on read, empty is canonical on
//! write); the first row is an optional header, detected by a non-numeric
//! first cell. Values are written with 17 significant digits, which
//! round-trips every f64 exactly.

use std::fs;
use std::path::Path;

use crate::datagen::{MaskSplit, MaskSplitSidecar};
use crate::error::{Error, Result};
use crate::matrix::{Mask, Matrix, MaskedMatrix};

/// A parsed CSV matrix with its optional header row.
#[derive(Debug, Clone)]
pub struct CsvMatrix {
    pub matrix: MaskedMatrix,
    pub header: Option<Vec<String>>,
}

fn parse_cell(cell: &str) -> std::result::Result<Option<f64>, ()> {
    let trimmed = cell.trim();
    if trimmed.is_empty() || trimmed.eq_ignore_ascii_case("nan") {
        return Ok(None);
    }
    trimmed.parse::<f64>().map(Some).map_err(|_| ())
}

/// Reads a matrix; empty cells become missing entries. The result must
/// satisfy the masked-matrix coverage invariants.
pub fn read_csv(path: impl AsRef<Path>) -> Result<CsvMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();

    let header = match lines.peek() {
        None => {
            return Err(Error::Parse {
                path: display,
                row: 1,
                col: 1,
                message: "empty file".to_string(),
            })
        }
        Some((_, first)) => {
            let first_cell = first.split(',').next().unwrap_or("");
            if parse_cell(first_cell).is_err() {
                let (_, line) = lines.next().unwrap();
                Some(line.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>())
            } else {
                None
            }
        }
    };

    let mut data: Vec<f64> = Vec::new();
    let mut mask: Vec<bool> = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (line_idx, line) in lines {
        let cells: Vec<&str> = line.split(',').collect();
        match cols {
            None => cols = Some(cells.len()),
            Some(expected) if cells.len() != expected => {
                return Err(Error::RaggedRows {
                    path: display,
                    row: line_idx + 1,
                    expected,
                    found: cells.len(),
                })
            }
            _ => {}
        }
        for (col_idx, cell) in cells.iter().enumerate() {
            match parse_cell(cell) {
                Ok(Some(v)) => {
                    data.push(v);
                    mask.push(true);
                }
                Ok(None) => {
                    data.push(0.0);
                    mask.push(false);
                }
                Err(()) => {
                    return Err(Error::Parse {
                        path: display,
                        row: line_idx + 1,
                        col: col_idx + 1,
                        message: format!("cannot parse '{}' as a number", cell.trim()),
                    })
                }
            }
        }
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::Parse {
        path: display.clone(),
        row: 1,
        col: 1,
        message: "no data rows".to_string(),
    })?;
    if let Some(h) = &header {
        if h.len() != cols {
            return Err(Error::RaggedRows {
                path: display,
                row: 1,
                expected: cols,
                found: h.len(),
            });
        }
    }
    let matrix = MaskedMatrix::new(Matrix::from_vec(rows, cols, data)?, Mask::from_vec(rows, cols, mask)?)?;
    Ok(CsvMatrix { matrix, header })
}

/// Writes a matrix; missing entries become empty cells.
pub fn write_csv(
    path: impl AsRef<Path>,
    matrix: &MaskedMatrix,
    header: Option<&[String]>,
) -> Result<()> {
    let mut out = String::new();
    if let Some(h) = header {
        out.push_str(&h.join(","));
        out.push('\n');
    }
    for i in 0..matrix.rows() {
        for j in 0..matrix.cols() {
            if j > 0 {
                out.push(',');
            }
            if matrix.is_given(i, j) {
                out.push_str(&format!("{:.16e}", matrix.get(i, j)));
            }
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Writes the JSON sidecar describing a mask split.
pub fn write_split_sidecar(path: impl AsRef<Path>, split: &MaskSplit) -> Result<()> {
    let json = serde_json::to_string_pretty(&split.to_sidecar())?;
    fs::write(path, json)?;
    Ok(())
}

/// Reads a mask-split sidecar back.
pub fn read_split_sidecar(path: impl AsRef<Path>) -> Result<MaskSplitSidecar> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{generate_synthetic, mask_split, SyntheticSpec};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tempfile::tempdir;

    #[test]
    fn roundtrip_is_bit_identical() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("m.csv");
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let values: Vec<f64> = (0..6 * 5).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let bits: Vec<bool> = (0..6 * 5).map(|i| i % 7 != 0).collect();
        let m = MaskedMatrix::new(
            Matrix::from_vec(6, 5, values).unwrap(),
            Mask::from_vec(6, 5, bits).unwrap(),
        )
        .unwrap();
        write_csv(&path, &m, None).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.matrix, m);
        assert!(back.header.is_none());
    }

    #[test]
    fn header_preserved_through_roundtrip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("h.csv");
        let m = MaskedMatrix::fully_given(Matrix::from_rows(&[&[1.5, 2.0], &[3.0, 4.25]])).unwrap();
        let header = vec!["gene_a".to_string(), "gene_b".to_string()];
        write_csv(&path, &m, Some(&header)).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back.header.as_deref(), Some(header.as_slice()));
        assert_eq!(back.matrix, m);
    }

    #[test]
    fn empty_cell_and_nan_both_read_as_missing() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.csv");
        fs::write(&path, "1.0,,2.0\n3.0,nan,NaN\n0.5,1.0,2.5\n").unwrap();
        let back = read_csv(&path).unwrap();
        assert!(back.matrix.is_given(0, 0));
        assert!(!back.matrix.is_given(0, 1));
        assert!(!back.matrix.is_given(1, 1));
        assert!(!back.matrix.is_given(1, 2));
        assert_eq!(back.matrix.get(2, 2), 2.5);
    }

    #[test]
    fn parse_error_carries_location() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "1.0,2.0\n3.0,zebra\n").unwrap();
        match read_csv(&path) {
            Err(Error::Parse { row: 2, col: 2, .. }) => {}
            other => panic!("expected parse error at 2:2, got {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("ragged.csv");
        fs::write(&path, "1.0,2.0\n3.0\n").unwrap();
        assert!(matches!(
            read_csv(&path),
            Err(Error::RaggedRows { row: 2, expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn fully_missing_column_violates_coverage() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("gap.csv");
        fs::write(&path, "1.0,\n2.0,\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::UncoveredColumn(1))));
    }

    #[test]
    fn split_sidecar_roundtrips_through_file() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("split.json");
        let r = generate_synthetic(&SyntheticSpec {
            rows: 12,
            cols: 8,
            true_rank: 2,
            seed: 4,
        })
        .unwrap();
        let split = mask_split(&r, 0.2, 9).unwrap();
        write_split_sidecar(&path, &split).unwrap();
        let sidecar = read_split_sidecar(&path).unwrap();
        assert_eq!(sidecar.seed, 9);
        assert_eq!(sidecar.test_fraction, 0.2);
        let rebuilt = MaskSplit::from_sidecar(&sidecar, &r).unwrap();
        assert_eq!(rebuilt, split);
    }
}
