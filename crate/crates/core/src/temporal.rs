//! The temporal graph: a meta-graph over time slots.
//!
//! Nodes are slot indices 0..T, weighted edges say which pairs of slot graphs
//! are tied together and how strongly. The chain linking consecutive slots is
//! the classical special case. Edge order is canonical (sorted by endpoint
//! pair), which fixes the column layout of the consensus matrices downstream.

use crate::{Error, Result};

/// One coupling between slots `i < j` with strength `gamma > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TemporalEdge {
    pub i: usize,
    pub j: usize,
    pub gamma: f64,
}

/// Weighted undirected graph over `t_slots` time slots, no self loops or
/// duplicate edges.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalGraph {
    t_slots: usize,
    edges: Vec<TemporalEdge>,
    // per slot: (edge index, slot is the edge's i endpoint)
    incident: Vec<Vec<(usize, bool)>>,
}

impl TemporalGraph {
    /// Builds from 0-based `(i, j, gamma)` triples; endpoint order within a
    /// triple is irrelevant.
    pub fn new(t_slots: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if t_slots == 0 {
            return Err(Error::TemporalStructure("need at least one slot".into()));
        }
        let mut canon: Vec<TemporalEdge> = Vec::with_capacity(edges.len());
        for &(a, b, gamma) in edges {
            if a == b {
                return Err(Error::TemporalStructure(format!("self loop on slot {a}")));
            }
            if a >= t_slots || b >= t_slots {
                return Err(Error::TemporalStructure(format!(
                    "edge ({a},{b}) out of range for {t_slots} slots"
                )));
            }
            if !(gamma > 0.0) || !gamma.is_finite() {
                return Err(Error::TemporalStructure(format!(
                    "edge ({a},{b}) needs a positive finite weight, got {gamma}"
                )));
            }
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            canon.push(TemporalEdge { i, j, gamma });
        }
        canon.sort_by_key(|e| (e.i, e.j));
        for pair in canon.windows(2) {
            if pair[0].i == pair[1].i && pair[0].j == pair[1].j {
                return Err(Error::TemporalStructure(format!(
                    "duplicate edge ({},{})",
                    pair[0].i, pair[0].j
                )));
            }
        }
        let mut incident = vec![Vec::new(); t_slots];
        for (n, e) in canon.iter().enumerate() {
            incident[e.i].push((n, true));
            incident[e.j].push((n, false));
        }
        Ok(Self {
            t_slots,
            edges: canon,
            incident,
        })
    }

    /// Consecutive slots tied with uniform strength; one slot gives no edges.
    pub fn chain(t_slots: usize, gamma: f64) -> Result<Self> {
        let edges: Vec<(usize, usize, f64)> =
            (0..t_slots.saturating_sub(1)).map(|t| (t, t + 1, gamma)).collect();
        Self::new(t_slots, &edges)
    }

    /// No coupling at all: every slot solved independently.
    pub fn empty(t_slots: usize) -> Result<Self> {
        Self::new(t_slots, &[])
    }

    pub fn t_slots(&self) -> usize {
        self.t_slots
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Slots adjacent to `slot`, ascending.
    pub fn neighbors(&self, slot: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incident[slot]
            .iter()
            .map(|&(n, is_i)| {
                let e = &self.edges[n];
                if is_i {
                    e.j
                } else {
                    e.i
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Edges touching `slot` as (edge index, slot == edge.i).
    pub fn incident(&self, slot: usize) -> &[(usize, bool)] {
        &self.incident[slot]
    }
}
