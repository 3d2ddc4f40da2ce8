//! Worker-scaling benchmark: one chain-coupled problem per requested slot
//! count, solved with a single worker and again with several, timing both.
//! The per-solution hash lets downstream checks confirm the worker count
//! never changed the answer.

use crate::config::{DatasetConfig, ExperimentConfig, Num};
use crate::dataset::Dataset;
use crate::runner::{repeat_seeds, Overrides};
use crate::{csvio, CliError, Result};
use std::path::PathBuf;
use std::time::Instant;
use tvgl::admm::{solve, Solution};

pub const BENCH_HEADER: [&str; 7] = [
    "t_slots",
    "workers",
    "seed",
    "iterations",
    "converged",
    "solution_hash",
    "wall_time_s",
];

#[derive(Debug)]
pub struct BenchSummary {
    pub results_path: PathBuf,
    pub rows: usize,
}

fn solution_hash(sol: &Solution) -> String {
    use std::collections::hash_map::DefaultHasher;
    use std::hash::{Hash, Hasher};
    let mut h = DefaultHasher::new();
    for g in &sol.graphs {
        for v in g.values() {
            v.to_bits().hash(&mut h);
        }
    }
    format!("{:016x}", h.finish())
}

pub fn bench(cfg: &ExperimentConfig, ov: &Overrides) -> Result<BenchSummary> {
    let spec = cfg
        .bench
        .as_ref()
        .ok_or_else(|| CliError::Config("config has no [bench] table".into()))?;
    let method = cfg
        .methods
        .iter()
        .find(|m| m.name == spec.method)
        .expect("validated: bench.method names a configured method");
    let beta = method.beta.ok_or_else(|| {
        CliError::Config(format!(
            "bench method {:?} must set a fixed beta, not beta_grid",
            method.name
        ))
    })?;

    let master_seed = ov.seed.unwrap_or(cfg.master_seed);
    let out_dir = ov
        .output_dir
        .clone()
        .unwrap_or_else(|| cfg.output_dir.clone());
    std::fs::create_dir_all(&out_dir)?;

    let params = method.objective(beta)?;
    let seeds = repeat_seeds(master_seed, spec.t_values.len());

    let mut rows: Vec<Vec<String>> = Vec::new();
    for (&t, &seed) in spec.t_values.iter().zip(seeds.iter()) {
        // the slot count is the whole point here, so the dataset's own slot
        // layout is replaced by a unit-weight chain of length t
        let chain_edges: Vec<(usize, usize, Num)> =
            (1..t).map(|i| (i, i + 1, Num::F(1.0))).collect();
        let dcfg = DatasetConfig {
            t_slots: t,
            edges: chain_edges,
            load_dir: None,
            ..cfg.dataset.clone()
        };
        let ds = Dataset::generate(&dcfg, seed, dcfg.n_samples)?;
        let slots = ds.slots()?;
        let structure = method.solver_structure(&ds.structure)?;

        let mut worker_counts = vec![1usize];
        let scaled = spec.max_workers.min(t);
        if scaled > 1 {
            worker_counts.push(scaled);
        }
        for workers in worker_counts {
            let admm = method.admm(method.eta, workers);
            let started = Instant::now();
            let sol = solve(&slots, &structure, &params, &admm)?;
            let wall = started.elapsed().as_secs_f64();
            rows.push(vec![
                t.to_string(),
                workers.to_string(),
                seed.to_string(),
                sol.iters.to_string(),
                sol.converged.to_string(),
                solution_hash(&sol),
                format!("{wall:.6}"),
            ]);
        }
    }

    let results_path = out_dir.join("bench.csv");
    csvio::write_rows(&results_path, &BENCH_HEADER, &rows)?;
    Ok(BenchSummary {
        results_path,
        rows: rows.len(),
    })
}
