//! The experiment runner: (method × sweep value × repeat) cells, each
//! generating or reusing a dataset, solving, scoring against ground truth,
//! and appending one row to results.csv.
//!
//! Row order is methods in config order, then sweep values in config order,
//! then repeats ascending. Every random choice descends from the master seed
//! through one fixed derivation, so reruns are byte-identical except for the
//! trailing wall-time column.

use crate::config::{beta_grid_values, config_hash, ExperimentConfig, SweepParameter};
use crate::dataset::Dataset;
use crate::{csvio, CliError, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::PathBuf;
use std::time::Instant;
use tvgl::admm::{solve, Solution};
use tvgl::metrics::{evaluate, EvalReport, DEFAULT_EDGE_THRESHOLD};

pub const RESULTS_HEADER: [&str; 12] = [
    "method",
    "sweep_parameter",
    "sweep_value",
    "repeat",
    "seed",
    "config_hash",
    "beta",
    "mcc_mean",
    "rel_err_mean",
    "iterations",
    "converged",
    "wall_time_s",
];

#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub results_path: PathBuf,
    pub rows: usize,
    pub non_converged: usize,
}

/// One seed per repeat, drawn from a stream rooted at the master seed.
pub fn repeat_seeds(master_seed: u64, repeats: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    (0..repeats).map(|_| rng.random()).collect()
}

// One sweep column: its label and value as written into rows, plus the
// override it applies to a cell.
struct SweepCell {
    label: &'static str,
    text: String,
    n_samples: Option<usize>,
    eta: Option<f64>,
}

fn sweep_cells(cfg: &ExperimentConfig) -> Vec<SweepCell> {
    match &cfg.sweep {
        None => vec![SweepCell {
            label: "none",
            text: "0".into(),
            n_samples: None,
            eta: None,
        }],
        Some(sweep) => sweep
            .values
            .iter()
            .map(|v| {
                let x = v.as_f64();
                match sweep.parameter {
                    SweepParameter::NSamples => SweepCell {
                        label: "n_samples",
                        text: format!("{}", x as usize),
                        n_samples: Some(x as usize),
                        eta: None,
                    },
                    SweepParameter::Eta => SweepCell {
                        label: "eta",
                        text: format!("{x}"),
                        n_samples: None,
                        eta: Some(x),
                    },
                }
            })
            .collect(),
    }
}

// Largest sample count any cell will ask for; datasets are generated once
// per repeat at this size and sliced down (seeded sampling makes the prefix
// identical to a smaller run).
fn max_samples(cfg: &ExperimentConfig) -> usize {
    let mut n = cfg.dataset.n_samples;
    if let Some(sweep) = &cfg.sweep {
        if sweep.parameter == SweepParameter::NSamples {
            for v in &sweep.values {
                n = n.max(v.as_f64() as usize);
            }
        }
    }
    n
}

#[derive(Serialize)]
struct RunManifest {
    config_hash: String,
    master_seed: u64,
    workers: usize,
    repeats: usize,
    methods: Vec<String>,
    sweep_parameter: String,
    sweep_values: Vec<String>,
    rows: usize,
    non_converged: usize,
}

pub fn run(cfg: &ExperimentConfig, config_text: &str, ov: &Overrides) -> Result<RunSummary> {
    let master_seed = ov.seed.unwrap_or(cfg.master_seed);
    let workers = ov.workers.unwrap_or(1);
    if workers == 0 {
        return Err(CliError::Config("--workers must be >= 1".into()));
    }
    let out_dir = ov
        .output_dir
        .clone()
        .unwrap_or_else(|| cfg.output_dir.clone());
    let hash = config_hash(config_text, master_seed);
    std::fs::create_dir_all(&out_dir)?;

    let cells = sweep_cells(cfg);
    let n_max = max_samples(cfg);
    let seeds = repeat_seeds(master_seed, cfg.repeats);

    let loaded: Option<Dataset> = match &cfg.dataset.load_dir {
        Some(dir) => Some(Dataset::load(dir)?),
        None => None,
    };
    let mut cache: Vec<Option<Dataset>> = (0..cfg.repeats).map(|_| None).collect();

    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut non_converged = 0usize;

    for method in &cfg.methods {
        for cell in &cells {
            for (r, &rseed) in seeds.iter().enumerate() {
                let started = Instant::now();
                let ds: &Dataset = match &loaded {
                    Some(l) => l,
                    None => {
                        if cache[r].is_none() {
                            cache[r] = Some(Dataset::generate(&cfg.dataset, rseed, n_max)?);
                        }
                        cache[r].as_ref().unwrap()
                    }
                };
                let n = cell.n_samples.unwrap_or(cfg.dataset.n_samples);
                let eta = cell.eta.unwrap_or(method.eta);
                let slots = ds.slots_with_n(n)?;
                let structure = method.solver_structure(&ds.structure)?;
                let admm = method.admm(eta, workers);

                let (beta, sol, report) = if method.beta_grid {
                    let mut best: Option<(f64, Solution, EvalReport)> = None;
                    for &b in beta_grid_values().iter() {
                        let params = method.objective(b)?;
                        let sol = solve(&slots, &structure, &params, &admm)?;
                        let rep = evaluate(&sol.graphs, &ds.truth, DEFAULT_EDGE_THRESHOLD)?;
                        let better = match &best {
                            None => true,
                            Some((_, _, cur)) => rep.mean_mcc > cur.mean_mcc,
                        };
                        if better {
                            best = Some((b, sol, rep));
                        }
                    }
                    best.expect("grid is never empty")
                } else {
                    let b = method.beta.expect("validated: beta set when grid is off");
                    let params = method.objective(b)?;
                    let sol = solve(&slots, &structure, &params, &admm)?;
                    let rep = evaluate(&sol.graphs, &ds.truth, DEFAULT_EDGE_THRESHOLD)?;
                    (b, sol, rep)
                };
                if !sol.converged {
                    non_converged += 1;
                }
                rows.push(vec![
                    method.name.clone(),
                    cell.label.to_string(),
                    cell.text.clone(),
                    r.to_string(),
                    rseed.to_string(),
                    hash.clone(),
                    format!("{beta}"),
                    format!("{}", report.mean_mcc),
                    format!("{}", report.mean_rel_error),
                    sol.iters.to_string(),
                    sol.converged.to_string(),
                    format!("{:.6}", started.elapsed().as_secs_f64()),
                ]);
            }
        }
    }

    let results_path = out_dir.join("results.csv");
    csvio::write_rows(&results_path, &RESULTS_HEADER, &rows)?;

    let manifest = RunManifest {
        config_hash: hash,
        master_seed,
        workers,
        repeats: cfg.repeats,
        methods: cfg.methods.iter().map(|m| m.name.clone()).collect(),
        sweep_parameter: cells[0].label.to_string(),
        sweep_values: cells.iter().map(|c| c.text.clone()).collect(),
        rows: rows.len(),
        non_converged,
    };
    let json =
        serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(out_dir.join("manifest.json"), json)?;

    Ok(RunSummary {
        results_path,
        rows: rows.len(),
        non_converged,
    })
}

/// Writes one dataset directory per repeat under the output dir.
pub fn gen_data(cfg: &ExperimentConfig, ov: &Overrides) -> Result<Vec<PathBuf>> {
    let master_seed = ov.seed.unwrap_or(cfg.master_seed);
    let out_dir = ov
        .output_dir
        .clone()
        .unwrap_or_else(|| cfg.output_dir.clone());
    std::fs::create_dir_all(&out_dir)?;
    let n_max = max_samples(cfg);
    let mut dirs = Vec::new();
    for (r, seed) in repeat_seeds(master_seed, cfg.repeats).iter().enumerate() {
        let ds = Dataset::generate(&cfg.dataset, *seed, n_max)?;
        let dir = out_dir.join(format!("dataset_r{r}"));
        ds.save(&dir, &cfg.dataset, *seed)?;
        dirs.push(dir);
    }
    Ok(dirs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
output_dir = "unused"
repeats = 2
master_seed = 11

[dataset]
d = 6
t_slots = 2
edges = [[1, 2, 1.0]]
n_samples = 15

[[methods]]
name = "structured"
structure = "dataset"
penalty = "l1"
alpha = 2.0
beta = 0.3
eta = 1.0

[[methods]]
name = "static"
structure = "static"
penalty = "l1"
alpha = 2.0
beta = 0.3
"#;

    fn tmpdir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("tvgl-run-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn parse(text: &str) -> ExperimentConfig {
        let cfg: ExperimentConfig = toml::from_str(text).unwrap();
        cfg.validate().unwrap();
        cfg
    }

    // results.csv content with the timing column blanked
    fn stable_part(path: &std::path::Path) -> String {
        let (header, rows) = csvio::read_rows(path).unwrap();
        assert_eq!(header.last().unwrap(), "wall_time_s");
        let mut out = header[..header.len() - 1].join(",");
        for row in rows {
            out.push('\n');
            out.push_str(&row[..row.len() - 1].join(","));
        }
        out
    }

    #[test]
    fn two_runs_are_identical_modulo_timing() {
        let cfg = parse(SMALL);
        let d1 = tmpdir("det1");
        let d2 = tmpdir("det2");
        let s1 = run(
            &cfg,
            SMALL,
            &Overrides {
                output_dir: Some(d1.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let s2 = run(
            &cfg,
            SMALL,
            &Overrides {
                output_dir: Some(d2.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(s1.rows, 4); // 2 methods x 1 value x 2 repeats
        assert_eq!(
            stable_part(&s1.results_path),
            stable_part(&s2.results_path)
        );
        std::fs::remove_dir_all(d1).ok();
        std::fs::remove_dir_all(d2).ok();
    }

    #[test]
    fn row_order_and_provenance() {
        let cfg = parse(SMALL);
        let dir = tmpdir("order");
        let summary = run(
            &cfg,
            SMALL,
            &Overrides {
                output_dir: Some(dir.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let (header, rows) = csvio::read_rows(&summary.results_path).unwrap();
        assert_eq!(header, RESULTS_HEADER.to_vec());
        let fields: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[3].as_str())).collect();
        assert_eq!(
            fields,
            vec![
                ("structured", "0"),
                ("structured", "1"),
                ("static", "0"),
                ("static", "1"),
            ]
        );
        // same repeat => same dataset seed for every method
        assert_eq!(rows[0][4], rows[2][4]);
        assert_eq!(rows[1][4], rows[3][4]);
        assert_ne!(rows[0][4], rows[1][4]);
        // provenance columns present and constant
        assert!(rows.iter().all(|r| r[5] == rows[0][5]));
        // metrics in range
        for row in &rows {
            let mcc: f64 = row[7].parse().unwrap();
            let rel: f64 = row[8].parse().unwrap();
            assert!((-1.0..=1.0).contains(&mcc));
            assert!(rel >= 0.0);
        }
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn master_seed_override_changes_rows() {
        let cfg = parse(SMALL);
        let d1 = tmpdir("seed1");
        let d2 = tmpdir("seed2");
        let s1 = run(
            &cfg,
            SMALL,
            &Overrides {
                output_dir: Some(d1.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let s2 = run(
            &cfg,
            SMALL,
            &Overrides {
                seed: Some(999),
                output_dir: Some(d2.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        assert_ne!(
            stable_part(&s1.results_path),
            stable_part(&s2.results_path)
        );
        std::fs::remove_dir_all(d1).ok();
        std::fs::remove_dir_all(d2).ok();
    }

    #[test]
    fn eta_sweep_applies_to_coupled_methods() {
        let text = format!(
            "{SMALL}\n[sweep]\nparameter = \"eta\"\nvalues = [0.0, 1000.0]\n"
        );
        let cfg = parse(&text);
        let dir = tmpdir("etasweep");
        let summary = run(
            &cfg,
            &text,
            &Overrides {
                output_dir: Some(dir.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let (_, rows) = csvio::read_rows(&summary.results_path).unwrap();
        assert_eq!(rows.len(), 8); // 2 methods x 2 values x 2 repeats
        assert!(rows.iter().all(|r| r[1] == "eta"));
        // static rows ignore eta: identical metrics for both sweep values
        let stat: Vec<&Vec<String>> = rows.iter().filter(|r| r[0] == "static").collect();
        assert_eq!(stat[0][7], stat[2][7]);
        assert_eq!(stat[1][7], stat[3][7]);
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn sample_sweep_slices_one_dataset() {
        let text = format!(
            "{SMALL}\n[sweep]\nparameter = \"n_samples\"\nvalues = [10, 15]\n"
        );
        let cfg = parse(&text);
        let dir = tmpdir("nsweep");
        let summary = run(
            &cfg,
            &text,
            &Overrides {
                output_dir: Some(dir.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let (_, rows) = csvio::read_rows(&summary.results_path).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r[1] == "n_samples"));
        assert_eq!(rows[0][2], "10");
        assert_eq!(rows[2][2], "15");
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn worker_override_keeps_rows_identical() {
        let cfg = parse(SMALL);
        let d1 = tmpdir("w1");
        let d2 = tmpdir("w2");
        let s1 = run(
            &cfg,
            SMALL,
            &Overrides {
                output_dir: Some(d1.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let s2 = run(
            &cfg,
            SMALL,
            &Overrides {
                workers: Some(2),
                output_dir: Some(d2.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(
            stable_part(&s1.results_path),
            stable_part(&s2.results_path)
        );
        std::fs::remove_dir_all(d1).ok();
        std::fs::remove_dir_all(d2).ok();
    }

    #[test]
    fn beta_grid_reports_a_grid_point() {
        let text = SMALL.replace("beta = 0.3\neta = 1.0", "beta_grid = true\neta = 1.0");
        let cfg = parse(&text);
        let dir = tmpdir("grid");
        let summary = run(
            &cfg,
            &text,
            &Overrides {
                output_dir: Some(dir.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let (_, rows) = csvio::read_rows(&summary.results_path).unwrap();
        let grid = beta_grid_values();
        for row in rows.iter().filter(|r| r[0] == "structured") {
            let beta: f64 = row[6].parse().unwrap();
            assert!(grid.iter().any(|g| (g - beta).abs() < 1e-12));
        }
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn generated_datasets_load_back_into_a_run() {
        let cfg = parse(SMALL);
        let data_dir = tmpdir("gendata");
        let dirs = gen_data(
            &cfg,
            &Overrides {
                output_dir: Some(data_dir.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(dirs.len(), 2);

        let loaded_text = format!(
            r#"
output_dir = "unused"
repeats = 2
master_seed = 11

[dataset]
d = 6
t_slots = 2
edges = [[1, 2, 1.0]]
n_samples = 15
load_dir = "{}"

[[methods]]
name = "structured"
structure = "dataset"
penalty = "l1"
alpha = 2.0
beta = 0.3
eta = 1.0
"#,
            dirs[0].display()
        );
        let cfg2 = parse(&loaded_text);
        let out = tmpdir("loadedrun");
        let summary = run(
            &cfg2,
            &loaded_text,
            &Overrides {
                output_dir: Some(out.clone()),
                ..Default::default()
            },
        )
        .unwrap();
        let (_, rows) = csvio::read_rows(&summary.results_path).unwrap();
        assert_eq!(rows.len(), 2);
        // both repeats reuse the same stored data, so metrics coincide
        assert_eq!(rows[0][7], rows[1][7]);
        std::fs::remove_dir_all(data_dir).ok();
        std::fs::remove_dir_all(out).ok();
    }
}
