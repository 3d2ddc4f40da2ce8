//! Experiment configuration: one TOML file describing the dataset, the
//! methods to run, and optional sweep/bench sections.
//!
//! Annotated example (all defaults spelled out):
//!
//! ```toml
//! output_dir = "results/run"    # where results.csv + manifest.json land
//! repeats = 10                  # independent datasets per sweep value
//! master_seed = 42              # root of every RNG stream in the run
//!
//! [dataset]
//! d = 20                        # vertices per slot graph
//! t_slots = 6
//! edges = [[1, 2, 1.0], [1, 6, 1.0]]   # temporal structure, 1-based slots
//! n_samples = 100               # signal columns per slot
//! kernel_sigma = 0.5            # geometric graph kernel bandwidth
//! threshold = 0.75              # kernel cutoff
//! base_changes = 10.0           # edge churn per unit inverse temporal weight
//! noise_sigma = 0.1             # additive signal noise
//! # load_dir = "datasets/fig3"  # skip generation, read a saved dataset
//!
//! [[methods]]
//! name = "structured"
//! structure = "dataset"         # dataset | chain | static
//! penalty = "l1"                # l1 | sql2
//! alpha = 2.0
//! beta = 0.3                    # or beta_grid = true for a log grid search
//! eta = 2.5
//! rho = 0.5                     # consensus penalty
//! tol = 1e-3                    # absolute and relative stopping tolerance
//! max_iters = 1000
//!
//! [sweep]                       # optional
//! parameter = "n_samples"       # n_samples | eta
//! values = [10, 20, 50, 100, 200]
//!
//! [bench]                       # only read by the bench command
//! method = "chain-l1"           # which [[methods]] entry to time
//! t_values = [4, 8, 16]
//! max_workers = 8               # compared against a single worker
//! ```

use crate::{CliError, Result};
use serde::Deserialize;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::{Path, PathBuf};
use tvgl::admm::AdmmConfig;
use tvgl::objective::ObjectiveParams;
use tvgl::prox::PenaltyKind;
use tvgl::temporal::TemporalGraph;

// TOML integers and floats are distinct; accept both where a real is meant.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Num {
    I(i64),
    F(f64),
}

impl Num {
    pub fn as_f64(self) -> f64 {
        match self {
            Num::I(i) => i as f64,
            Num::F(f) => f,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub output_dir: PathBuf,
    pub repeats: usize,
    pub master_seed: u64,
    pub dataset: DatasetConfig,
    pub methods: Vec<MethodConfig>,
    pub sweep: Option<SweepConfig>,
    pub bench: Option<BenchConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub d: usize,
    pub t_slots: usize,
    /// Temporal edges as [from, to, weight] with 1-based slot numbers.
    pub edges: Vec<(usize, usize, Num)>,
    pub n_samples: usize,
    #[serde(default = "default_kernel_sigma")]
    pub kernel_sigma: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_base_changes")]
    pub base_changes: f64,
    #[serde(default = "default_noise_sigma")]
    pub noise_sigma: f64,
    /// Read a previously saved dataset instead of generating one.
    pub load_dir: Option<PathBuf>,
}

fn default_kernel_sigma() -> f64 {
    0.5
}
fn default_threshold() -> f64 {
    0.75
}
fn default_base_changes() -> f64 {
    10.0
}
fn default_noise_sigma() -> f64 {
    0.1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureKind {
    /// Solve with the dataset's own temporal structure.
    Dataset,
    /// Consecutive-slot chain with unit weights.
    Chain,
    /// No coupling at all; each slot solved independently.
    Static,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyName {
    L1,
    Sql2,
}

impl PenaltyName {
    pub fn kind(self) -> PenaltyKind {
        match self {
            PenaltyName::L1 => PenaltyKind::L1,
            PenaltyName::Sql2 => PenaltyKind::SquaredL2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub name: String,
    pub structure: StructureKind,
    pub penalty: PenaltyName,
    pub alpha: f64,
    pub beta: Option<f64>,
    /// Search beta over a log grid, picking the best mean MCC against truth.
    #[serde(default)]
    pub beta_grid: bool,
    #[serde(default)]
    pub eta: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
}

fn default_rho() -> f64 {
    0.5
}
fn default_tol() -> f64 {
    1e-3
}
fn default_max_iters() -> usize {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    NSamples,
    Eta,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::NSamples => "n_samples",
            SweepParameter::Eta => "eta",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<Num>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    /// Name of the [[methods]] entry to time.
    pub method: String,
    pub t_values: Vec<usize>,
    pub max_workers: usize,
}

/// Ten-point logarithmic grid over [0.01, 10] for the beta search.
pub fn beta_grid_values() -> Vec<f64> {
    (0..10)
        .map(|k| 10f64.powf(-2.0 + 3.0 * k as f64 / 9.0))
        .collect()
}

impl ExperimentConfig {
    /// Parses and validates; returns the config along with the raw file text
    /// (hashed into result rows for provenance).
    pub fn from_path(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok((cfg, text))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.repeats == 0 {
            return bad("repeats must be >= 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one [[methods]] entry is required".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            for other in &self.methods[..i] {
                if other.name == m.name {
                    return bad(format!("duplicate method name {:?}", m.name));
                }
            }
            m.validate()?;
        }
        self.dataset.validate()?;
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return bad("sweep.values must not be empty".into());
            }
            for v in &sweep.values {
                let x = v.as_f64();
                match sweep.parameter {
                    SweepParameter::NSamples => {
                        if x < 1.0 || x.fract() != 0.0 {
                            return bad(format!(
                                "sweep over n_samples needs positive integers, got {x}"
                            ));
                        }
                    }
                    SweepParameter::Eta => {
                        if !(x >= 0.0) || !x.is_finite() {
                            return bad(format!("eta sweep values must be >= 0, got {x}"));
                        }
                    }
                }
            }
        }
        if let Some(b) = &self.bench {
            if !self.methods.iter().any(|m| m.name == b.method) {
                return bad(format!("bench.method {:?} is not a configured method", b.method));
            }
            if b.t_values.is_empty() {
                return bad("bench.t_values must not be empty".into());
            }
            if b.t_values.iter().any(|t| *t == 0) {
                return bad("bench.t_values must be >= 1".into());
            }
            if b.max_workers == 0 {
                return bad("bench.max_workers must be >= 1".into());
            }
        }
        Ok(())
    }
}

impl DatasetConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.d < 2 {
            return bad(format!("dataset.d must be >= 2, got {}", self.d));
        }
        if self.t_slots == 0 {
            return bad("dataset.t_slots must be >= 1".into());
        }
        if self.n_samples == 0 {
            return bad("dataset.n_samples must be >= 1".into());
        }
        for &(i, j, g) in &self.edges {
            if i == 0 || j == 0 || i > self.t_slots || j > self.t_slots {
                return bad(format!(
                    "temporal edge ({i}, {j}) out of range 1..={}",
                    self.t_slots
                ));
            }
            if i == j {
                return bad(format!("temporal edge ({i}, {j}) is a self-loop"));
            }
            if !(g.as_f64() > 0.0) {
                return bad(format!(
                    "temporal edge ({i}, {j}) needs weight > 0, got {}",
                    g.as_f64()
                ));
            }
        }
        // the builder enforces the rest (duplicates etc.)
        self.structure().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(())
    }

    /// The data-generating temporal structure (edges are 1-based in the file).
    pub fn structure(&self) -> tvgl::Result<TemporalGraph> {
        let zero_based: Vec<(usize, usize, f64)> = self
            .edges
            .iter()
            .map(|&(i, j, g)| (i - 1, j - 1, g.as_f64()))
            .collect();
        TemporalGraph::new(self.t_slots, &zero_based)
    }
}

impl MethodConfig {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.name.is_empty() || self.name.contains(',') || self.name.contains(char::is_whitespace)
        {
            return bad(format!(
                "method name {:?} must be non-empty, without commas or whitespace",
                self.name
            ));
        }
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return bad(format!("{}: alpha must be > 0", self.name));
        }
        match (self.beta, self.beta_grid) {
            (Some(b), false) => {
                if !(b > 0.0) || !b.is_finite() {
                    return bad(format!("{}: beta must be > 0", self.name));
                }
            }
            (None, true) => {}
            (Some(_), true) => {
                return bad(format!(
                    "{}: beta and beta_grid are mutually exclusive",
                    self.name
                ))
            }
            (None, false) => {
                return bad(format!("{}: set beta or beta_grid = true", self.name))
            }
        }
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return bad(format!("{}: eta must be >= 0", self.name));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return bad(format!("{}: rho must be > 0", self.name));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return bad(format!("{}: tol must be > 0", self.name));
        }
        if self.max_iters == 0 {
            return bad(format!("{}: max_iters must be >= 1", self.name));
        }
        Ok(())
    }

    /// The structure this method hands to the solver, given the structure
    /// that produced the data.
    pub fn solver_structure(&self, data_structure: &TemporalGraph) -> tvgl::Result<TemporalGraph> {
        match self.structure {
            StructureKind::Dataset => Ok(data_structure.clone()),
            StructureKind::Chain => TemporalGraph::chain(data_structure.t_slots(), 1.0),
            StructureKind::Static => TemporalGraph::empty(data_structure.t_slots()),
        }
    }

    pub fn admm(&self, eta: f64, workers: usize) -> AdmmConfig {
        let mut cfg = AdmmConfig::new(eta, self.penalty.kind());
        cfg.rho = self.rho;
        cfg.abs_tol = self.tol;
        cfg.rel_tol = self.tol;
        cfg.max_iters = self.max_iters;
        cfg.workers = workers;
        cfg
    }

    pub fn objective(&self, beta: f64) -> tvgl::Result<ObjectiveParams> {
        ObjectiveParams::new(self.alpha, beta)
    }
}

/// Fingerprint of the effective run inputs, stamped on every result row.
pub fn config_hash(config_text: &str, master_seed: u64) -> String {
    let mut h = DefaultHasher::new();
    config_text.hash(&mut h);
    master_seed.hash(&mut h);
    format!("{:016x}", h.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
output_dir = "out"
repeats = 2
master_seed = 7

[dataset]
d = 6
t_slots = 3
edges = [[1, 2, 1.0], [2, 3, 2]]
n_samples = 25

[[methods]]
name = "structured"
structure = "dataset"
penalty = "l1"
alpha = 2.0
beta = 0.3
eta = 2.5
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg: ExperimentConfig = toml::from_str(MINIMAL).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.dataset.kernel_sigma, 0.5);
        assert_eq!(cfg.dataset.threshold, 0.75);
        assert_eq!(cfg.dataset.base_changes, 10.0);
        assert_eq!(cfg.dataset.noise_sigma, 0.1);
        let m = &cfg.methods[0];
        assert_eq!(m.rho, 0.5);
        assert_eq!(m.tol, 1e-3);
        assert_eq!(m.max_iters, 1000);
        // integer edge weight accepted
        let s = cfg.dataset.structure().unwrap();
        assert_eq!(s.n_edges(), 2);
        assert_eq!(s.edges()[1].gamma, 2.0);
    }

    #[test]
    fn one_based_edges_map_to_zero_based() {
        let cfg: ExperimentConfig = toml::from_str(MINIMAL).unwrap();
        let s = cfg.dataset.structure().unwrap();
        assert_eq!((s.edges()[0].i, s.edges()[0].j), (0, 1));
        assert_eq!((s.edges()[1].i, s.edges()[1].j), (1, 2));
    }

    #[test]
    fn structure_kinds_build_the_right_graphs() {
        let cfg: ExperimentConfig = toml::from_str(MINIMAL).unwrap();
        let data = cfg.dataset.structure().unwrap();
        let mut m = cfg.methods[0].clone();
        assert_eq!(m.solver_structure(&data).unwrap(), data);
        m.structure = StructureKind::Chain;
        let chain = m.solver_structure(&data).unwrap();
        assert_eq!(chain.n_edges(), 2);
        assert!(chain.edges().iter().all(|e| e.gamma == 1.0));
        m.structure = StructureKind::Static;
        assert_eq!(m.solver_structure(&data).unwrap().n_edges(), 0);
    }

    #[test]
    fn rejections() {
        let with = |patch: &str| -> ExperimentConfig {
            toml::from_str(&format!("{MINIMAL}\n{patch}")).unwrap()
        };
        // duplicate method name
        let cfg = with(
            "[[methods]]\nname = \"structured\"\nstructure = \"static\"\npenalty = \"l1\"\nalpha = 1.0\nbeta = 0.1\n",
        );
        assert!(cfg.validate().is_err());
        // sweep value checks
        let cfg = with("[sweep]\nparameter = \"n_samples\"\nvalues = [10.5]\n");
        assert!(cfg.validate().is_err());
        let cfg = with("[sweep]\nparameter = \"eta\"\nvalues = [-1.0]\n");
        assert!(cfg.validate().is_err());
        let cfg = with("[sweep]\nparameter = \"eta\"\nvalues = [0.1, 1, 10]\n");
        cfg.validate().unwrap();
        // bench must point at a real method
        let cfg = with("[bench]\nmethod = \"nope\"\nt_values = [4]\nmax_workers = 2\n");
        assert!(cfg.validate().is_err());
        // unknown field
        assert!(toml::from_str::<ExperimentConfig>(&format!("{MINIMAL}\nbogus = 1\n")).is_err());
        // missing beta
        let text = MINIMAL.replace("beta = 0.3\n", "");
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
        // both beta and grid
        let text = MINIMAL.replace("beta = 0.3", "beta = 0.3\nbeta_grid = true");
        let cfg: ExperimentConfig = toml::from_str(&text).unwrap();
        assert!(cfg.validate().is_err());
        // out-of-range temporal edge
        let cfg: ExperimentConfig =
            toml::from_str(&MINIMAL.replace("[2, 3, 2]", "[2, 9, 1.0]")).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn beta_grid_spans_the_documented_range() {
        let grid = beta_grid_values();
        assert_eq!(grid.len(), 10);
        assert!((grid[0] - 0.01).abs() < 1e-12);
        assert!((grid[9] - 10.0).abs() < 1e-9);
        for w in grid.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn hash_tracks_text_and_seed() {
        let a = config_hash("x", 1);
        assert_eq!(a, config_hash("x", 1));
        assert_ne!(a, config_hash("x", 2));
        assert_ne!(a, config_hash("y", 1));
        assert_eq!(a.len(), 16);
    }
}
