//! Turns raw result tables into small plot-ready CSVs: one mean per
//! (sweep value, method) for experiment runs, one mean wall time per
//! (slot count, worker count) for benchmarks. The input kind is detected
//! from the header, so `plot-data` takes either file.

use crate::{csvio, CliError, Result};
use std::path::{Path, PathBuf};

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| CliError::Runtime(format!("{what}: not a number: {s:?}")))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// distinct values in first-appearance order
fn distinct<'a>(it: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for v in it {
        if !out.iter().any(|x| x == v) {
            out.push(v.to_string());
        }
    }
    out
}

fn aggregate_results(
    header: &[String],
    rows: &[Vec<String>],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let ip = csvio::column(header, "sweep_parameter")?;
    let iv = csvio::column(header, "sweep_value")?;
    let im = csvio::column(header, "method")?;
    let imcc = csvio::column(header, "mcc_mean")?;
    let irel = csvio::column(header, "rel_err_mean")?;

    let param = rows
        .first()
        .map(|r| r[ip].clone())
        .unwrap_or_else(|| "none".into());
    let methods = distinct(rows.iter().map(|r| r[im].as_str()));
    let mut values = distinct(rows.iter().map(|r| r[iv].as_str()));
    // numeric sweep order, not file order
    let mut keyed: Vec<(f64, String)> = values
        .drain(..)
        .map(|v| Ok((parse_f64(&v, "sweep_value")?, v)))
        .collect::<Result<_>>()?;
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values: Vec<String> = keyed.into_iter().map(|(_, v)| v).collect();

    let table = |metric: usize| -> Result<Vec<Vec<String>>> {
        let mut out = Vec::new();
        for v in &values {
            for m in &methods {
                let group: Vec<f64> = rows
                    .iter()
                    .filter(|r| &r[iv] == v && &r[im] == m)
                    .map(|r| parse_f64(&r[metric], &header[metric]))
                    .collect::<Result<_>>()?;
                if group.is_empty() {
                    continue;
                }
                out.push(vec![v.clone(), m.clone(), format!("{}", mean(&group))]);
            }
        }
        Ok(out)
    };

    let mcc_path = out_dir.join(format!("plot_mcc_vs_{param}.csv"));
    csvio::write_rows(
        &mcc_path,
        &["sweep_value", "method", "mean_mcc"],
        &table(imcc)?,
    )?;
    let rel_path = out_dir.join(format!("plot_rel_err_vs_{param}.csv"));
    csvio::write_rows(
        &rel_path,
        &["sweep_value", "method", "mean_rel_err"],
        &table(irel)?,
    )?;
    Ok(vec![mcc_path, rel_path])
}

fn aggregate_bench(
    header: &[String],
    rows: &[Vec<String>],
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let it = csvio::column(header, "t_slots")?;
    let iw = csvio::column(header, "workers")?;
    let iwall = csvio::column(header, "wall_time_s")?;

    let mut keys: Vec<(usize, usize)> = Vec::new();
    for r in rows {
        let t = parse_f64(&r[it], "t_slots")? as usize;
        let w = parse_f64(&r[iw], "workers")? as usize;
        if !keys.contains(&(t, w)) {
            keys.push((t, w));
        }
    }
    keys.sort_unstable();

    let mut out = Vec::new();
    for (t, w) in keys {
        let group: Vec<f64> = rows
            .iter()
            .filter(|r| r[it] == t.to_string() && r[iw] == w.to_string())
            .map(|r| parse_f64(&r[iwall], "wall_time_s"))
            .collect::<Result<_>>()?;
        if group.is_empty() {
            continue;
        }
        out.push(vec![
            t.to_string(),
            w.to_string(),
            format!("{}", mean(&group)),
        ]);
    }
    let path = out_dir.join("plot_time_vs_t.csv");
    csvio::write_rows(&path, &["t_slots", "workers", "mean_wall_time_s"], &out)?;
    Ok(vec![path])
}

/// Reads a results or bench CSV and writes the plot-ready aggregates next to
/// `out_dir`, returning the files written.
pub fn plot_data(input: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let (header, rows) = csvio::read_rows(input)?;
    std::fs::create_dir_all(out_dir)?;
    let has = |name: &str| header.iter().any(|h| h == name);
    if has("t_slots") && has("solution_hash") {
        aggregate_bench(&header, &rows, out_dir)
    } else if has("sweep_parameter") && has("mcc_mean") {
        aggregate_results(&header, &rows, out_dir)
    } else {
        Err(CliError::Runtime(format!(
            "{}: not a results or bench table (columns: {})",
            input.display(),
            header.join(",")
        )))
    }
}
