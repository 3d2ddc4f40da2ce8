//! Benchmark datasets: ground-truth graph sequences plus per-slot signals,
//! generated from a config or read back from a saved directory.
//!
//! On-disk layout (one directory per dataset):
//!   signals_t1.csv .. signals_tT.csv   d rows × N columns
//!   truth.csv                          T rows × p columns
//!   manifest.json                      generation parameters and seed
//!
//! The solver consumes per-sample mean distances (raw squared distances
//! divided by the sample count) so that the fitting scale, and with it every
//! hyperparameter, is comparable across sample sizes.

use crate::config::DatasetConfig;
use crate::{csvio, CliError, Result};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use tvgl::graph::{pairwise_distances, DistanceVector, SlotData, WeightVector};
use tvgl::synthetic::{
    evolve_graphs, gen_rbf_graph, gen_smooth_signals, EvolutionConfig, RbfGraphConfig,
    SignalConfig,
};
use tvgl::temporal::TemporalGraph;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub truth: Vec<WeightVector>,
    /// Raw signals, one d×N matrix per slot.
    pub signals: Vec<Array2<f64>>,
    /// The structure that generated the data (and the prior of
    /// structure-aware methods).
    pub structure: TemporalGraph,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    d: usize,
    t_slots: usize,
    n_samples: usize,
    /// 1-based slot pairs with weights, as in config files.
    edges: Vec<(usize, usize, f64)>,
    kernel_sigma: f64,
    threshold: f64,
    base_changes: f64,
    noise_sigma: f64,
    seed: u64,
}

impl Dataset {
    /// Generates the ground truth and signals for one repeat. All randomness
    /// descends from `seed`; a larger `n_samples` with the same seed extends
    /// each slot's signal matrix column-for-column.
    pub fn generate(cfg: &DatasetConfig, seed: u64, n_samples: usize) -> Result<Dataset> {
        let structure = cfg.structure()?;
        let mut stream = ChaCha8Rng::seed_from_u64(seed);
        let graph_seed: u64 = stream.random();
        let evolution_seed: u64 = stream.random();
        let slot_seeds: Vec<u64> = (0..cfg.t_slots).map(|_| stream.random()).collect();

        let g0 = gen_rbf_graph(&RbfGraphConfig {
            d: cfg.d,
            kernel_sigma: cfg.kernel_sigma,
            threshold: cfg.threshold,
            seed: graph_seed,
        })?;
        let truth = evolve_graphs(
            &g0,
            &structure,
            &EvolutionConfig {
                base_changes: cfg.base_changes,
                kernel_sigma: cfg.kernel_sigma,
                threshold: cfg.threshold,
                seed: evolution_seed,
            },
        )?;
        let signals = truth
            .iter()
            .zip(slot_seeds.iter())
            .map(|(g, &s)| {
                gen_smooth_signals(
                    g,
                    &SignalConfig {
                        n_samples,
                        noise_sigma: cfg.noise_sigma,
                        seed: s,
                    },
                )
            })
            .collect::<tvgl::Result<Vec<_>>>()?;
        Ok(Dataset {
            truth,
            signals,
            structure,
        })
    }

    pub fn d(&self) -> usize {
        self.truth[0].d()
    }

    pub fn n_samples(&self) -> usize {
        self.signals[0].ncols()
    }

    pub fn t_slots(&self) -> usize {
        self.truth.len()
    }

    /// Solver inputs from the first `n` samples of every slot.
    pub fn slots_with_n(&self, n: usize) -> Result<Vec<SlotData>> {
        if n == 0 || n > self.n_samples() {
            return Err(CliError::Runtime(format!(
                "requested {n} samples but the dataset holds {}",
                self.n_samples()
            )));
        }
        self.signals
            .iter()
            .map(|x| {
                let prefix = x.slice(ndarray::s![.., ..n]);
                let raw = pairwise_distances(prefix)?;
                let mean =
                    DistanceVector::new(raw.d(), raw.values().mapv(|v| v / n as f64))?;
                Ok(SlotData::from_distances(mean))
            })
            .collect::<tvgl::Result<Vec<_>>>()
            .map_err(CliError::from)
    }

    /// Solver inputs using every stored sample.
    pub fn slots(&self) -> Result<Vec<SlotData>> {
        self.slots_with_n(self.n_samples())
    }

    pub fn save(&self, dir: &Path, cfg: &DatasetConfig, seed: u64) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (t, x) in self.signals.iter().enumerate() {
            csvio::write_matrix(&dir.join(format!("signals_t{}.csv", t + 1)), x.view())?;
        }
        let p = self.truth[0].p();
        let mut truth = Array2::zeros((self.t_slots(), p));
        for (t, g) in self.truth.iter().enumerate() {
            truth.row_mut(t).assign(&g.values());
        }
        csvio::write_matrix(&dir.join("truth.csv"), truth.view())?;

        let manifest = Manifest {
            d: self.d(),
            t_slots: self.t_slots(),
            n_samples: self.n_samples(),
            edges: self
                .structure
                .edges()
                .iter()
                .map(|e| (e.i + 1, e.j + 1, e.gamma))
                .collect(),
            kernel_sigma: cfg.kernel_sigma,
            threshold: cfg.threshold,
            base_changes: cfg.base_changes,
            noise_sigma: cfg.noise_sigma,
            seed,
        };
        let json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        std::fs::write(dir.join("manifest.json"), json)?;
        Ok(())
    }

    pub fn load(dir: &Path) -> Result<Dataset> {
        let manifest_path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&manifest_path)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", manifest_path.display())))?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", manifest_path.display())))?;

        let zero_based: Vec<(usize, usize, f64)> = manifest
            .edges
            .iter()
            .map(|&(i, j, g)| (i - 1, j - 1, g))
            .collect();
        let structure = TemporalGraph::new(manifest.t_slots, &zero_based)?;

        let truth_mat = csvio::read_matrix(&dir.join("truth.csv"))?;
        let p = manifest.d * (manifest.d - 1) / 2;
        if truth_mat.dim() != (manifest.t_slots, p) {
            return Err(CliError::Runtime(format!(
                "truth.csv is {:?}, manifest says {} slots x {p} pairs",
                truth_mat.dim(),
                manifest.t_slots
            )));
        }
        let truth = truth_mat
            .rows()
            .into_iter()
            .map(|row| WeightVector::new(manifest.d, row.to_owned()))
            .collect::<tvgl::Result<Vec<_>>>()?;

        let mut signals = Vec::with_capacity(manifest.t_slots);
        for t in 0..manifest.t_slots {
            let path = dir.join(format!("signals_t{}.csv", t + 1));
            let x = csvio::read_matrix(&path)?;
            if x.dim() != (manifest.d, manifest.n_samples) {
                return Err(CliError::Runtime(format!(
                    "{}: shape {:?}, manifest says {}x{}",
                    path.display(),
                    x.dim(),
                    manifest.d,
                    manifest.n_samples
                )));
            }
            signals.push(x);
        }
        Ok(Dataset {
            truth,
            signals,
            structure,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> DatasetConfig {
        toml::from_str(
            r#"
d = 8
t_slots = 3
edges = [[1, 2, 1.0], [2, 3, 1.0]]
n_samples = 20
"#,
        )
        .unwrap()
    }

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("tvgl-ds-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn generation_is_deterministic_and_shaped() {
        let c = cfg();
        let a = Dataset::generate(&c, 9, 20).unwrap();
        let b = Dataset::generate(&c, 9, 20).unwrap();
        assert_eq!(a.t_slots(), 3);
        assert_eq!(a.d(), 8);
        assert_eq!(a.n_samples(), 20);
        for (x, y) in a.truth.iter().zip(b.truth.iter()) {
            assert_eq!(x, y);
        }
        for (x, y) in a.signals.iter().zip(b.signals.iter()) {
            assert_eq!(x, y);
        }
        let c2 = Dataset::generate(&c, 10, 20).unwrap();
        assert_ne!(a.signals[0], c2.signals[0]);
    }

    #[test]
    fn sample_prefix_matches_smaller_generation() {
        let c = cfg();
        let big = Dataset::generate(&c, 4, 50).unwrap();
        let small = Dataset::generate(&c, 4, 20).unwrap();
        for (xb, xs) in big.signals.iter().zip(small.signals.iter()) {
            assert_eq!(xb.slice(ndarray::s![.., ..20]), xs.view());
        }
        // and the sliced slots equal the small dataset's slots
        let a = big.slots_with_n(20).unwrap();
        let b = small.slots().unwrap();
        for (sa, sb) in a.iter().zip(b.iter()) {
            for (x, y) in sa
                .distances()
                .values()
                .iter()
                .zip(sb.distances().values().iter())
            {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn slot_distances_are_per_sample_means() {
        let c = cfg();
        let ds = Dataset::generate(&c, 5, 20).unwrap();
        let slots = ds.slots().unwrap();
        let raw = pairwise_distances(ds.signals[0].view()).unwrap();
        for (a, b) in slots[0]
            .distances()
            .values()
            .iter()
            .zip(raw.values().iter())
        {
            assert!((a - b / 20.0).abs() < 1e-15);
        }
    }

    #[test]
    fn out_of_range_sample_counts_are_rejected() {
        let ds = Dataset::generate(&cfg(), 5, 20).unwrap();
        assert!(ds.slots_with_n(0).is_err());
        assert!(ds.slots_with_n(21).is_err());
        assert!(ds.slots_with_n(20).is_ok());
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let c = cfg();
        let ds = Dataset::generate(&c, 11, 20).unwrap();
        let dir = tmpdir("roundtrip");
        ds.save(&dir, &c, 11).unwrap();
        let back = Dataset::load(&dir).unwrap();
        assert_eq!(back.t_slots(), ds.t_slots());
        assert_eq!(back.structure.edges(), ds.structure.edges());
        for (a, b) in ds.truth.iter().zip(back.truth.iter()) {
            for (x, y) in a.values().iter().zip(b.values().iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        for (a, b) in ds.signals.iter().zip(back.signals.iter()) {
            for (x, y) in a.iter().zip(b.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
        std::fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn load_rejects_inconsistent_directories() {
        let c = cfg();
        let ds = Dataset::generate(&c, 12, 20).unwrap();
        let dir = tmpdir("badload");
        ds.save(&dir, &c, 12).unwrap();
        // truncate a signal file to break its shape
        let victim = dir.join("signals_t2.csv");
        let text = std::fs::read_to_string(&victim).unwrap();
        let shorter: Vec<&str> = text.lines().take(4).collect();
        std::fs::write(&victim, shorter.join("\n")).unwrap();
        assert!(Dataset::load(&dir).is_err());
        std::fs::remove_dir_all(&dir).ok();
        assert!(Dataset::load(&dir).is_err());
    }
}
