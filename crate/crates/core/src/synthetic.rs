//! Synthetic benchmark data: geometric graphs, their evolution over a
//! temporal structure, and signals that vary smoothly over each slot graph.
//!
//! The pipeline mirrors the usual graph-learning evaluation protocol:
//! 1. drop d vertices uniformly in the unit square, connect by a thresholded
//!    Gaussian (RBF) kernel of the distances;
//! 2. walk a breadth-first tree of the temporal graph from slot 0, rewiring a
//!    number of edge slots inversely proportional to each temporal weight;
//! 3. per slot, draw samples with covariance L† + σ²I so that expected signal
//!    differences follow the graph.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::collections::VecDeque;

use crate::graph::{degree_operator, edge_count, laplacian, WeightVector};
use crate::linalg::symmetric_eigen;
use crate::temporal::TemporalGraph;
use crate::{Error, Result};

/// Thresholded Gaussian-kernel geometric graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RbfGraphConfig {
    pub d: usize,
    /// Kernel bandwidth of exp(−dist²/(2σ²)).
    pub kernel_sigma: f64,
    /// Weights at or below this are dropped; must sit in [0, 1).
    pub threshold: f64,
    pub seed: u64,
}

impl RbfGraphConfig {
    /// Customary defaults: σ = 0.5, threshold = 0.75.
    pub fn new(d: usize, seed: u64) -> Self {
        Self {
            d,
            kernel_sigma: 0.5,
            threshold: 0.75,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 vertices, got {}",
                self.d
            )));
        }
        if !(self.kernel_sigma > 0.0) || !self.kernel_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kernel_sigma must be finite and > 0, got {}",
                self.kernel_sigma
            )));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be in [0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// How far consecutive slot graphs drift along a temporal edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionConfig {
    /// A temporal edge of weight γ changes max(1, round(base_changes/γ))
    /// edge slots between its endpoint graphs.
    pub base_changes: f64,
    /// Kernel bandwidth for freshly added edge weights.
    pub kernel_sigma: f64,
    /// Added weights are resampled until they clear this.
    pub threshold: f64,
    pub seed: u64,
}

impl EvolutionConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            base_changes: 10.0,
            kernel_sigma: 0.5,
            threshold: 0.75,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.base_changes > 0.0) || !self.base_changes.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "base_changes must be finite and > 0, got {}",
                self.base_changes
            )));
        }
        if !(self.kernel_sigma > 0.0) || !self.kernel_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kernel_sigma must be finite and > 0, got {}",
                self.kernel_sigma
            )));
        }
        if !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be in [0, 1), got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

/// Smooth-signal sampler parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalConfig {
    pub n_samples: usize,
    /// Std of the isotropic noise added on top of the graph-smooth component.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SignalConfig {
    pub fn new(n_samples: usize, seed: u64) -> Self {
        Self {
            n_samples,
            noise_sigma: 0.1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

fn rbf_weight(dist_sq: f64, sigma: f64) -> f64 {
    (-dist_sq / (2.0 * sigma * sigma)).exp()
}

/// Random geometric graph: uniform vertices in the unit square, RBF weights,
/// hard threshold, then a repair pass reconnecting any isolated vertex to its
/// nearest neighbor so no degree is zero.
pub fn gen_rbf_graph(cfg: &RbfGraphConfig) -> Result<WeightVector> {
    cfg.validate()?;
    let d = cfg.d;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<(f64, f64)> = (0..d)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();

    let dist_sq = |i: usize, j: usize| -> f64 {
        let dx = points[i].0 - points[j].0;
        let dy = points[i].1 - points[j].1;
        dx * dx + dy * dy
    };

    let mut w = Array1::zeros(edge_count(d));
    let mut k = 0;
    for i in 0..d {
        for j in (i + 1)..d {
            let weight = rbf_weight(dist_sq(i, j), cfg.kernel_sigma);
            if weight > cfg.threshold {
                w[k] = weight;
            }
            k += 1;
        }
    }

    let graph = WeightVector::new(d, w)?;
    let deg = degree_operator(&graph);
    let mut w = graph.into_values();
    for i in 0..d {
        if deg[i] > 0.0 {
            continue;
        }
        // nearest neighbor, smallest index on ties
        let mut best = usize::MAX;
        let mut best_d = f64::INFINITY;
        for j in 0..d {
            if j != i && dist_sq(i, j) < best_d {
                best_d = dist_sq(i, j);
                best = j;
            }
        }
        let k = crate::graph::pair_index(d, i, best);
        w[k] = rbf_weight(best_d, cfg.kernel_sigma);
    }
    WeightVector::new(d, w)
}

// Weight for an edge added during evolution: the kernel weight of a random
// vertex pair in the unit square, resampled until it clears the threshold.
fn fresh_rbf_weight(rng: &mut ChaCha8Rng, sigma: f64, threshold: f64) -> Result<f64> {
    for _ in 0..1_000_000 {
        let dx = rng.random::<f64>() - rng.random::<f64>();
        let dy = rng.random::<f64>() - rng.random::<f64>();
        let w = rbf_weight(dx * dx + dy * dy, sigma);
        if w > threshold {
            return Ok(w);
        }
    }
    Err(Error::Synthetic(
        "could not sample an edge weight above the threshold".into(),
    ))
}

/// One slot graph per temporal node, grown along a breadth-first tree of the
/// temporal structure from slot 0.
///
/// For the tree edge (parent, child) with weight γ the child graph differs
/// from the parent in exactly n = max(1, round(base_changes/γ)) edge slots:
/// changes alternate between deleting a present edge and adding an absent one
/// (fresh kernel weight), each touching a slot not changed before on this
/// edge. Non-tree temporal edges shape the prior only, not the data.
pub fn evolve_graphs(
    g0: &WeightVector,
    structure: &TemporalGraph,
    cfg: &EvolutionConfig,
) -> Result<Vec<WeightVector>> {
    cfg.validate()?;
    let t_slots = structure.t_slots();
    if g0.support(0.0).is_empty() {
        return Err(Error::Synthetic("cannot evolve an empty graph".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut graphs: Vec<Option<WeightVector>> = vec![None; t_slots];
    graphs[0] = Some(g0.clone());

    let mut queue = VecDeque::from([0usize]);
    let mut seen = vec![false; t_slots];
    seen[0] = true;
    while let Some(slot) = queue.pop_front() {
        let parent = graphs[slot].clone().expect("visited slots carry a graph");
        for &next in structure.neighbors(slot).iter() {
            if seen[next] {
                continue;
            }
            seen[next] = true;
            let gamma = structure
                .edges()
                .iter()
                .find(|e| (e.i == slot && e.j == next) || (e.i == next && e.j == slot))
                .expect("neighbor implies an edge")
                .gamma;
            let n_changes = ((cfg.base_changes / gamma).round() as usize).max(1);
            graphs[next] = Some(rewire(&parent, n_changes, cfg, &mut rng)?);
            queue.push_back(next);
        }
    }

    if let Some(slot) = seen.iter().position(|s| !s) {
        return Err(Error::TemporalStructure(format!(
            "slot {slot} is unreachable from slot 0; evolution needs a connected structure"
        )));
    }
    Ok(graphs.into_iter().map(|g| g.unwrap()).collect())
}

// Flips exactly `n_changes` distinct edge slots (or as many as the graph
// allows), alternating delete/add starting with a delete.
fn rewire(
    parent: &WeightVector,
    n_changes: usize,
    cfg: &EvolutionConfig,
    rng: &mut ChaCha8Rng,
) -> Result<WeightVector> {
    let p = parent.p();
    let mut w = parent.values().to_owned();
    let mut touched = vec![false; p];
    let mut deletions = 0usize;
    for step in 0..n_changes {
        let want_delete = step % 2 == 0;
        let present: Vec<usize> = (0..p).filter(|&k| !touched[k] && w[k] > 0.0).collect();
        let absent: Vec<usize> = (0..p).filter(|&k| !touched[k] && w[k] == 0.0).collect();
        let (delete, pool) = match (want_delete, present.is_empty(), absent.is_empty()) {
            (true, false, _) => (true, present),
            (true, true, false) => (false, absent),
            (false, _, false) => (false, absent),
            (false, false, true) => (true, present),
            _ => break, // every slot already touched
        };
        let k = pool[rng.random_range(0..pool.len())];
        if delete {
            w[k] = 0.0;
            deletions += 1;
        } else {
            w[k] = fresh_rbf_weight(rng, cfg.kernel_sigma, cfg.threshold)?;
        }
        touched[k] = true;
    }
    let _ = deletions;
    WeightVector::new(parent.d(), w)
}

/// N samples of x ~ N(0, L† + σ²I) for the graph's Laplacian L, as a d×N
/// matrix. Sample n is column n; a longer run with the same seed extends a
/// shorter one column-for-column.
pub fn gen_smooth_signals(w: &WeightVector, cfg: &SignalConfig) -> Result<Array2<f64>> {
    cfg.validate()?;
    if w.support(0.0).is_empty() {
        return Err(Error::Synthetic(
            "signal model needs at least one edge".into(),
        ));
    }
    let d = w.d();
    let l = laplacian(w);
    let (vals, vecs) = symmetric_eigen(l.view());
    let cutoff = 1e-9 * vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    // factor F with F F^T = L†
    let mut factor = Array2::zeros((d, d));
    for e in 0..d {
        if vals[e] <= cutoff {
            continue;
        }
        let scale = 1.0 / vals[e].sqrt();
        for i in 0..d {
            factor[(i, e)] = vecs[(i, e)] * scale;
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut x = Array2::zeros((d, cfg.n_samples));
    let mut xi = Array1::zeros(d);
    for n in 0..cfg.n_samples {
        for i in 0..d {
            xi[i] = rng.sample::<f64, _>(StandardNormal);
        }
        for i in 0..d {
            let mut smooth = 0.0;
            for e in 0..d {
                smooth += factor[(i, e)] * xi[e];
            }
            let noise: f64 = rng.sample(StandardNormal);
            x[(i, n)] = smooth + cfg.noise_sigma * noise;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{pair_index, weight_to_adjacency};
    use crate::linalg::symmetric_pinv;

    #[test]
    fn kernel_is_one_at_zero_distance() {
        assert_eq!(rbf_weight(0.0, 0.5), 1.0);
        assert!(rbf_weight(1.0, 0.5) < 1.0);
    }

    #[test]
    fn rbf_graph_dimensions_and_determinism() {
        let cfg = RbfGraphConfig::new(20, 42);
        let g1 = gen_rbf_graph(&cfg).unwrap();
        let g2 = gen_rbf_graph(&cfg).unwrap();
        assert_eq!(g1.d(), 20);
        assert_eq!(g1, g2);
        let g3 = gen_rbf_graph(&RbfGraphConfig::new(20, 43)).unwrap();
        assert_ne!(g1, g3);
    }

    #[test]
    fn rbf_density_stays_moderate() {
        // defaults at d=20: measured band across 100 seeds
        for seed in 0..100 {
            let g = gen_rbf_graph(&RbfGraphConfig::new(20, seed)).unwrap();
            let density = g.support(0.0).len() as f64 / g.p() as f64;
            assert!(
                (0.1..=0.6).contains(&density),
                "seed {seed} gave density {density}"
            );
        }
    }

    #[test]
    fn harsh_threshold_triggers_repair() {
        let cfg = RbfGraphConfig {
            d: 12,
            kernel_sigma: 0.5,
            threshold: 0.999,
            seed: 7,
        };
        let g = gen_rbf_graph(&cfg).unwrap();
        let deg = degree_operator(&g);
        assert!(deg.iter().all(|x| *x > 0.0), "repair left an isolated vertex");
    }

    #[test]
    fn kept_weights_clear_the_threshold() {
        let cfg = RbfGraphConfig::new(15, 3);
        let g = gen_rbf_graph(&cfg).unwrap();
        for &k in g.support(0.0).iter() {
            let w = g.values()[k];
            assert!(w <= 1.0);
            // repair edges may sit below the threshold; everything else must clear it
        }
        let deg = degree_operator(&g);
        assert!(deg.iter().all(|x| *x > 0.0));
    }

    fn support_symdiff(a: &WeightVector, b: &WeightVector) -> usize {
        a.values()
            .iter()
            .zip(b.values().iter())
            .filter(|(x, y)| (**x > 0.0) != (**y > 0.0))
            .count()
    }

    #[test]
    fn chain_evolution_changes_exactly_round_c_over_gamma_slots() {
        let g0 = gen_rbf_graph(&RbfGraphConfig::new(20, 1)).unwrap();
        let chain = TemporalGraph::chain(3, 2.0).unwrap();
        let cfg = EvolutionConfig {
            base_changes: 4.0,
            ..EvolutionConfig::new(5)
        };
        let graphs = evolve_graphs(&g0, &chain, &cfg).unwrap();
        assert_eq!(graphs.len(), 3);
        assert_eq!(support_symdiff(&graphs[0], &graphs[1]), 2);
        assert_eq!(support_symdiff(&graphs[1], &graphs[2]), 2);
    }

    #[test]
    fn huge_gamma_means_minimal_change() {
        let g0 = gen_rbf_graph(&RbfGraphConfig::new(10, 2)).unwrap();
        let chain = TemporalGraph::chain(2, 1e9).unwrap();
        let graphs = evolve_graphs(&g0, &chain, &EvolutionConfig::new(6)).unwrap();
        assert_eq!(support_symdiff(&graphs[0], &graphs[1]), 1);
    }

    #[test]
    fn shortcut_slot_stays_close_to_its_parent() {
        // chain 0..4 plus the tie (0,5): slot 5 branches off slot 0
        let structure = TemporalGraph::new(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (0, 5, 1.0)],
        )
        .unwrap();
        let g0 = gen_rbf_graph(&RbfGraphConfig::new(20, 11)).unwrap();
        let graphs = evolve_graphs(&g0, &structure, &EvolutionConfig::new(13)).unwrap();
        assert_eq!(support_symdiff(&graphs[0], &graphs[5]), 10);
        assert!(support_symdiff(&graphs[4], &graphs[5]) > 10);
    }

    #[test]
    fn evolution_preserves_dimensions_and_is_deterministic() {
        let g0 = gen_rbf_graph(&RbfGraphConfig::new(12, 21)).unwrap();
        let chain = TemporalGraph::chain(4, 1.0).unwrap();
        let cfg = EvolutionConfig::new(22);
        let a = evolve_graphs(&g0, &chain, &cfg).unwrap();
        let b = evolve_graphs(&g0, &chain, &cfg).unwrap();
        assert_eq!(a.len(), 4);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(x.d(), 12);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn evolution_rejects_disconnected_structures() {
        let g0 = gen_rbf_graph(&RbfGraphConfig::new(8, 1)).unwrap();
        let disconnected = TemporalGraph::new(3, &[(0, 1, 1.0)]).unwrap();
        assert!(matches!(
            evolve_graphs(&g0, &disconnected, &EvolutionConfig::new(2)),
            Err(Error::TemporalStructure(_))
        ));
    }

    #[test]
    fn evolution_rejects_empty_graph() {
        let g0 = WeightVector::zeros(6);
        let chain = TemporalGraph::chain(2, 1.0).unwrap();
        assert!(evolve_graphs(&g0, &chain, &EvolutionConfig::new(2)).is_err());
    }

    #[test]
    fn signal_energy_matches_trace_law() {
        // mean of x'Lx over many samples ~ (d - k) + sigma^2 tr(L)
        let g = gen_rbf_graph(&RbfGraphConfig::new(8, 9)).unwrap();
        let l = laplacian(&g);
        let cfg = SignalConfig {
            n_samples: 10_000,
            noise_sigma: 0.1,
            seed: 33,
        };
        let x = gen_smooth_signals(&g, &cfg).unwrap();
        let mut mean = 0.0;
        for n in 0..cfg.n_samples {
            let col = x.column(n);
            let mut quad = 0.0;
            for i in 0..8 {
                for j in 0..8 {
                    quad += col[i] * l[(i, j)] * col[j];
                }
            }
            mean += quad;
        }
        mean /= cfg.n_samples as f64;
        let (vals, _) = symmetric_eigen(l.view());
        let cutoff = 1e-9 * vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let rank = vals.iter().filter(|v| **v > cutoff).count() as f64;
        let trace: f64 = (0..8).map(|i| l[(i, i)]).sum();
        let expect = rank + cfg.noise_sigma * cfg.noise_sigma * trace;
        assert!(
            (mean - expect).abs() / expect < 0.05,
            "mean {mean} vs expected {expect}"
        );
    }

    #[test]
    fn noiseless_two_vertex_samples_live_on_the_difference_direction() {
        let g = WeightVector::constant(2, 1.0).unwrap();
        let cfg = SignalConfig {
            n_samples: 4000,
            noise_sigma: 0.0,
            seed: 55,
        };
        let x = gen_smooth_signals(&g, &cfg).unwrap();
        let mut var_diff = 0.0;
        for n in 0..cfg.n_samples {
            // the constant direction carries nothing
            assert!((x[(0, n)] + x[(1, n)]).abs() < 1e-10);
            let proj = (x[(0, n)] - x[(1, n)]) / 2.0f64.sqrt();
            var_diff += proj * proj;
        }
        var_diff /= cfg.n_samples as f64;
        assert!((var_diff - 0.5).abs() < 0.05, "variance {var_diff}");
    }

    #[test]
    fn sample_prefix_is_stable_as_n_grows() {
        let g = gen_rbf_graph(&RbfGraphConfig::new(6, 14)).unwrap();
        let short = gen_smooth_signals(&g, &SignalConfig::new(5, 77)).unwrap();
        let long = gen_smooth_signals(&g, &SignalConfig::new(12, 77)).unwrap();
        for n in 0..5 {
            for i in 0..6 {
                assert_eq!(short[(i, n)], long[(i, n)]);
            }
        }
    }

    #[test]
    fn sampler_covariance_is_permutation_equivariant() {
        // the deterministic factor obeys P L† P^T = (P L P^T)†
        let g = gen_rbf_graph(&RbfGraphConfig::new(6, 25)).unwrap();
        let perm = [3usize, 0, 4, 1, 5, 2];
        let a = weight_to_adjacency(&g);
        let mut wp = Array1::zeros(g.p());
        for i in 0..6 {
            for j in (i + 1)..6 {
                wp[pair_index(6, perm[i], perm[j])] = a[(i, j)];
            }
        }
        let gp = WeightVector::new(6, wp).unwrap();
        let pinv = symmetric_pinv(laplacian(&g).view(), 1e-9);
        let pinv_p = symmetric_pinv(laplacian(&gp).view(), 1e-9);
        for i in 0..6 {
            for j in 0..6 {
                assert!((pinv[(i, j)] - pinv_p[(perm[i], perm[j])]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn smooth_signals_prefer_their_own_graph() {
        // quadratic energy on the generating graph beats a same-size random graph
        use rand::{Rng, SeedableRng};
        let mut wins = 0;
        for trial in 0..30 {
            let g = gen_rbf_graph(&RbfGraphConfig::new(10, 100 + trial)).unwrap();
            let x = gen_smooth_signals(&g, &SignalConfig::new(200, 200 + trial)).unwrap();
            let support = g.support(0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(300 + trial);
            let mut other = Array1::zeros(g.p());
            let mut placed = 0;
            while placed < support.len() {
                let k = rng.random_range(0..g.p());
                if other[k] == 0.0 {
                    other[k] = 1.0;
                    placed += 1;
                }
            }
            let go = WeightVector::new(10, other).unwrap();
            let energy = |graph: &WeightVector| -> f64 {
                let l = laplacian(graph);
                let mut acc = 0.0;
                for n in 0..x.ncols() {
                    let col = x.column(n);
                    for i in 0..10 {
                        for j in 0..10 {
                            acc += col[i] * l[(i, j)] * col[j];
                        }
                    }
                }
                // normalize by total weight so the comparison is fair
                acc / graph.values().sum()
            };
            if energy(&g) < energy(&go) {
                wins += 1;
            }
        }
        assert!(wins >= 27, "smoothness preferred the wrong graph too often: {wins}/30");
    }

    #[test]
    fn signal_sampler_rejects_empty_graph() {
        let g = WeightVector::zeros(4);
        assert!(gen_smooth_signals(&g, &SignalConfig::new(10, 1)).is_err());
    }
}
