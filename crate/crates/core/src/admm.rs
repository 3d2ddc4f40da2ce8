//! Consensus solver for the joint time-varying graph problem.
//!
//! Each time slot keeps its own weight vector w_t; every temporal edge (i,j)
//! owns a consensus pair (z_ij, z_ji) with scaled duals (u_ij, u_ji). One
//! iteration runs three phases:
//!
//! * W: per slot, minimize the smooth-graph objective plus a tether
//!   (m·ρ/2)·‖w − θ_t‖² with θ_t the average of the slot's (z − u) columns,
//!   via projected gradient descent warm-started at the previous w_t;
//! * Z: per temporal edge, the coupling penalty's pair prox applied to
//!   (u_ij + w_i, u_ji + w_j);
//! * U: per edge direction, u += w − z.
//!
//! Units of work inside a phase touch disjoint columns, so phases run on a
//! worker pool and results are written back in index order; reruns are
//! bit-identical for any worker count.

use ndarray::{Array1, Array2};
use rayon::prelude::*;

use crate::graph::{SlotData, WeightVector};
use crate::objective::{eval_f, pgd_solve, ObjectiveParams, PgdConfig};
use crate::prox::{EdgePenalty, PenaltyKind};
use crate::temporal::TemporalGraph;
use crate::{Error, Result};

/// Solver knobs. Defaults follow common practice for this problem family:
/// ρ = 0.5, both tolerances 1e−3, at most 1000 iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmmConfig {
    /// Global scale on the temporal coupling; 0 decouples the slots.
    pub eta: f64,
    /// Consensus penalty parameter.
    pub rho: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iters: usize,
    /// Coupling penalty applied on every temporal edge.
    pub penalty: PenaltyKind,
    pub pgd: PgdConfig,
    /// Worker threads for the phase-parallel updates.
    pub workers: usize,
}

impl AdmmConfig {
    pub fn new(eta: f64, penalty: PenaltyKind) -> Self {
        Self {
            eta,
            rho: 0.5,
            abs_tol: 1e-3,
            rel_tol: 1e-3,
            max_iters: 1000,
            penalty,
            pgd: PgdConfig::default(),
            workers: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "eta must be finite and >= 0, got {}",
                self.eta
            )));
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rho must be finite and > 0, got {}",
                self.rho
            )));
        }
        for (name, v) in [("abs_tol", self.abs_tol), ("rel_tol", self.rel_tol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        Ok(())
    }
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self::new(1.0, PenaltyKind::L1)
    }
}

/// Terminal state of one solve.
#[derive(Debug, Clone)]
pub struct Solution {
    /// One learned graph per time slot.
    pub graphs: Vec<WeightVector>,
    /// Both residuals dropped below their thresholds before max_iters.
    pub converged: bool,
    pub iters: usize,
    pub primal_residuals: Vec<f64>,
    pub dual_residuals: Vec<f64>,
    /// Joint objective (slot terms plus coupling penalties) per iteration.
    pub objective: Vec<f64>,
    /// Every inner solve hit its own tolerance.
    pub pgd_converged: bool,
}

struct Engine<'a> {
    slots: &'a [SlotData],
    structure: &'a TemporalGraph,
    params: &'a ObjectiveParams,
    cfg: &'a AdmmConfig,
    penalties: Vec<EdgePenalty>,
    /// p×T, column t is w_t.
    w: Array2<f64>,
    /// p×2s; edge n owns columns 2n (i side) and 2n+1 (j side).
    z: Array2<f64>,
    u: Array2<f64>,
    pgd_all_converged: bool,
}

impl<'a> Engine<'a> {
    fn new(
        slots: &'a [SlotData],
        structure: &'a TemporalGraph,
        params: &'a ObjectiveParams,
        cfg: &'a AdmmConfig,
    ) -> Self {
        let d = slots[0].d();
        let p = slots[0].distances().p();
        let t_slots = structure.t_slots();
        let s = structure.n_edges();
        let penalties = structure
            .edges()
            .iter()
            .map(|e| EdgePenalty {
                kind: cfg.penalty,
                weight: cfg.eta * e.gamma,
            })
            .collect();

        // cold start: all-ones scaled to unit mean degree, duals at zero,
        // consensus columns copying their owners
        let w0 = 1.0 / (d as f64 - 1.0);
        let w = Array2::from_elem((p, t_slots), w0);
        let mut z = Array2::zeros((p, 2 * s));
        for (n, e) in structure.edges().iter().enumerate() {
            z.column_mut(2 * n).assign(&w.column(e.i));
            z.column_mut(2 * n + 1).assign(&w.column(e.j));
        }
        let u = Array2::zeros((p, 2 * s));
        Engine {
            slots,
            structure,
            params,
            cfg,
            penalties,
            w,
            z,
            u,
            pgd_all_converged: true,
        }
    }

    // Average of (z − u) over the slot's incident edge directions; zeros for
    // isolated slots (the tether weight is zero there, so it is never read).
    fn theta(&self, t: usize) -> Array1<f64> {
        let incident = self.structure.incident(t);
        let p = self.w.nrows();
        let mut theta = Array1::zeros(p);
        if incident.is_empty() {
            return theta;
        }
        for &(n, is_i) in incident {
            let col = if is_i { 2 * n } else { 2 * n + 1 };
            theta += &(&self.z.column(col) - &self.u.column(col));
        }
        theta / incident.len() as f64
    }

    fn w_phase(&mut self) -> Result<()> {
        let columns: Vec<(WeightVector, bool)> = (0..self.structure.t_slots())
            .into_par_iter()
            .map(|t| {
                let warm = WeightVector::new(self.slots[t].d(), self.w.column(t).to_owned())?;
                let m = self.structure.incident(t).len();
                let theta = self.theta(t);
                let out = pgd_solve(
                    &warm,
                    self.slots[t].distances(),
                    self.params,
                    theta.view(),
                    m as f64 * self.cfg.rho,
                    &self.cfg.pgd,
                )?;
                Ok((out.weights, out.converged))
            })
            .collect::<Result<Vec<_>>>()?;
        for (t, (wv, conv)) in columns.into_iter().enumerate() {
            self.w.column_mut(t).assign(&wv.values());
            self.pgd_all_converged &= conv;
        }
        Ok(())
    }

    fn z_phase(&mut self) {
        let pairs: Vec<(Array1<f64>, Array1<f64>)> = (0..self.structure.n_edges())
            .into_par_iter()
            .map(|n| {
                let e = &self.structure.edges()[n];
                let a = &self.u.column(2 * n) + &self.w.column(e.i);
                let b = &self.u.column(2 * n + 1) + &self.w.column(e.j);
                self.penalties[n].prox_pair(a.view(), b.view(), self.cfg.rho)
            })
            .collect();
        for (n, (zi, zj)) in pairs.into_iter().enumerate() {
            self.z.column_mut(2 * n).assign(&zi);
            self.z.column_mut(2 * n + 1).assign(&zj);
        }
    }

    fn u_phase(&mut self) {
        let columns: Vec<Array1<f64>> = (0..2 * self.structure.n_edges())
            .into_par_iter()
            .map(|c| {
                let e = &self.structure.edges()[c / 2];
                let owner = if c % 2 == 0 { e.i } else { e.j };
                &self.u.column(c) + &self.w.column(owner) - &self.z.column(c)
            })
            .collect();
        for (c, col) in columns.into_iter().enumerate() {
            self.u.column_mut(c).assign(&col);
        }
    }

    /// ‖stack of (w_owner − z_c) over edge directions‖_F.
    fn primal_residual(&self) -> f64 {
        let mut acc = 0.0;
        for (n, e) in self.structure.edges().iter().enumerate() {
            for (col, owner) in [(2 * n, e.i), (2 * n + 1, e.j)] {
                let diff = &self.w.column(owner) - &self.z.column(col);
                acc += diff.iter().map(|x| x * x).sum::<f64>();
            }
        }
        acc.sqrt()
    }

    fn dual_residual(&self, z_prev: &Array2<f64>) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.z.iter().zip(z_prev.iter()) {
            acc += (a - b) * (a - b);
        }
        self.cfg.rho * acc.sqrt()
    }

    // Combined absolute/relative thresholds. The primal side compares the
    // stacked slot copies against Z; the dual side scales with the aggregated
    // duals (per slot, the sum of its incident u columns).
    fn thresholds(&self) -> (f64, f64) {
        let p = self.w.nrows();
        let t_slots = self.structure.t_slots();
        let s = self.structure.n_edges();

        let mut stacked_w_sq = 0.0;
        for e in self.structure.edges() {
            for owner in [e.i, e.j] {
                stacked_w_sq += self.w.column(owner).iter().map(|x| x * x).sum::<f64>();
            }
        }
        let z_sq: f64 = self.z.iter().map(|x| x * x).sum();
        let eps_pri = ((2 * s * p) as f64).sqrt() * self.cfg.abs_tol
            + self.cfg.rel_tol * stacked_w_sq.sqrt().max(z_sq.sqrt());

        let mut agg_sq = 0.0;
        for t in 0..t_slots {
            let mut agg = Array1::zeros(p);
            for &(n, is_i) in self.structure.incident(t) {
                let col = if is_i { 2 * n } else { 2 * n + 1 };
                agg += &self.u.column(col);
            }
            agg_sq += agg.iter().map(|x: &f64| x * x).sum::<f64>();
        }
        let eps_dual = ((p * t_slots) as f64).sqrt() * self.cfg.abs_tol
            + self.cfg.rel_tol * self.cfg.rho * agg_sq.sqrt();
        (eps_pri, eps_dual)
    }

    /// Joint objective at the current W: slot fitting terms plus the
    /// penalties on slot differences along temporal edges.
    fn objective(&self) -> Result<f64> {
        let mut total = 0.0;
        for (t, slot) in self.slots.iter().enumerate() {
            let wv = WeightVector::new(slot.d(), self.w.column(t).to_owned())?;
            total += eval_f(&wv, slot.distances(), self.params)?;
        }
        for (n, e) in self.structure.edges().iter().enumerate() {
            let diff = &self.w.column(e.i) - &self.w.column(e.j);
            total += self.penalties[n].eval(diff.view());
        }
        Ok(total)
    }

    fn into_solution(self, converged: bool, iters: usize, history: History) -> Result<Solution> {
        let graphs = (0..self.structure.t_slots())
            .map(|t| WeightVector::new(self.slots[t].d(), self.w.column(t).to_owned()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Solution {
            graphs,
            converged,
            iters,
            primal_residuals: history.primal,
            dual_residuals: history.dual,
            objective: history.objective,
            pgd_converged: self.pgd_all_converged,
        })
    }
}

#[derive(Default)]
struct History {
    primal: Vec<f64>,
    dual: Vec<f64>,
    objective: Vec<f64>,
}

/// Learns one graph per time slot from that slot's pairwise distances, with
/// the temporal structure's edges pulling connected slots together.
///
/// Stops once both residuals clear their thresholds, or flags
/// `converged: false` after `max_iters` and returns the last iterate. The
/// run is deterministic for a fixed input regardless of `workers`.
pub fn solve(
    slots: &[SlotData],
    structure: &TemporalGraph,
    params: &ObjectiveParams,
    cfg: &AdmmConfig,
) -> Result<Solution> {
    cfg.validate()?;
    if slots.len() != structure.t_slots() {
        return Err(Error::DimensionMismatch(format!(
            "{} data slots but the temporal structure has {}",
            slots.len(),
            structure.t_slots()
        )));
    }
    let d = slots[0].d();
    if d < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 vertices per slot".into(),
        ));
    }
    if let Some(t) = slots.iter().position(|s| s.d() != d) {
        return Err(Error::DimensionMismatch(format!(
            "slot 0 has {} vertices but slot {} has {}",
            d,
            t,
            slots[t].d()
        )));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?;
    pool.install(|| solve_on_pool(slots, structure, params, cfg))
}

fn solve_on_pool(
    slots: &[SlotData],
    structure: &TemporalGraph,
    params: &ObjectiveParams,
    cfg: &AdmmConfig,
) -> Result<Solution> {
    let mut engine = Engine::new(slots, structure, params, cfg);
    let mut history = History::default();
    let mut converged = false;
    let mut iters = 0;

    for _ in 0..cfg.max_iters {
        iters += 1;
        let z_prev = engine.z.clone();
        engine.w_phase()?;
        engine.z_phase();
        engine.u_phase();

        let primal = engine.primal_residual();
        let dual = engine.dual_residual(&z_prev);
        history.primal.push(primal);
        history.dual.push(dual);
        history.objective.push(engine.objective()?);

        let (eps_pri, eps_dual) = engine.thresholds();
        if primal <= eps_pri && dual <= eps_dual {
            converged = true;
            break;
        }
    }
    engine.into_solution(converged, iters, history)
}
