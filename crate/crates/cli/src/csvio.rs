//! Minimal CSV handling for the harness's numeric tables. Fields never
//! contain commas, quotes, or newlines, so no quoting rules are needed.
//! Floats are written with Rust's shortest round-trip formatting.

use crate::{CliError, Result};
use ndarray::{Array2, ArrayView2};
use std::fmt::Write as _;
use std::path::Path;

pub fn write_matrix(path: &Path, m: ArrayView2<f64>) -> Result<()> {
    let mut out = String::new();
    for row in m.rows() {
        let mut first = true;
        for v in row.iter() {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{v}");
            first = false;
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim().parse::<f64>().map_err(|_| {
                    CliError::Runtime(format!(
                        "{}:{}: not a number: {tok:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(CliError::Runtime(format!("{}: empty table", path.display())));
    }
    let ncols = rows[0].len();
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(CliError::Runtime(format!(
            "{}: row {} has {} fields, expected {ncols}",
            path.display(),
            bad + 1,
            rows[bad].len()
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let nrows = flat.len() / ncols;
    Array2::from_shape_vec((nrows, ncols), flat)
        .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

/// Header plus string rows, in file order.
pub fn write_rows(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), header.len());
        out.push_str(&row.join(","));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Runtime(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let row: Vec<String> = line.split(',').map(|s| s.to_string()).collect();
        if row.len() != header.len() {
            return Err(CliError::Runtime(format!(
                "{}:{}: {} fields, expected {}",
                path.display(),
                lineno + 2,
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

/// Index of a named column, with a readable error.
pub fn column(header: &[String], name: &str) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Runtime(format!("missing column {name:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("tvgl-csvio-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn matrix_round_trip_is_exact() {
        let dir = tmpdir("mat");
        let path = dir.join("m.csv");
        let m = array![[1.0, 0.1 + 0.2, -3.5e-12], [0.0, f64::MIN_POSITIVE, 7.25]];
        write_matrix(&path, m.view()).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(m.dim(), back.dim());
        for (a, b) in m.iter().zip(back.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let dir = tmpdir("ragged");
        let path = dir.join("bad.csv");
        std::fs::write(&path, "1,2\n3\n").unwrap();
        assert!(read_matrix(&path).is_err());
        std::fs::remove_dir_all(dir).ok();
    }

    proptest::proptest! {
        #[test]
        fn any_finite_matrix_round_trips(vals in proptest::collection::vec(-1e300f64..1e300, 6)) {
            let dir = tmpdir("prop");
            let path = dir.join("p.csv");
            let m = Array2::from_shape_vec((2, 3), vals).unwrap();
            write_matrix(&path, m.view()).unwrap();
            let back = read_matrix(&path).unwrap();
            for (a, b) in m.iter().zip(back.iter()) {
                proptest::prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            std::fs::remove_dir_all(dir).ok();
        }
    }

    #[test]
    fn rows_round_trip() {
        let dir = tmpdir("rows");
        let path = dir.join("r.csv");
        let rows = vec![
            vec!["a".into(), "1".into()],
            vec!["b".into(), "2".into()],
        ];
        write_rows(&path, &["name", "value"], &rows).unwrap();
        let (header, back) = read_rows(&path).unwrap();
        assert_eq!(header, vec!["name", "value"]);
        assert_eq!(back, rows);
        assert_eq!(column(&header, "value").unwrap(), 1);
        assert!(column(&header, "missing").is_err());
        std::fs::remove_dir_all(dir).ok();
    }
}
