//! Proximal operators for the per-edge consensus updates.
//!
//! Each temporal edge (i,j) updates its pair of consensus columns by solving
//!
//!   min_{z1,z2}  pen(z1 - z2) + 1/2 ||a - z1||^2 + 1/2 ||b - z2||^2
//!
//! with a = u_ij + w_i, b = u_ji + w_j. For the l1 penalty the minimizer is a
//! soft threshold on the difference around the shared mean; for the squared
//! penalty it is a linear blend. Both preserve z1 + z2 = a + b.

use ndarray::{Array1, ArrayView1};

/// sign(v) * max(|v| - lambda, 0), entrywise.
pub fn soft_threshold(v: ArrayView1<f64>, lambda: f64) -> Array1<f64> {
    assert!(lambda >= 0.0, "threshold must be non-negative");
    v.mapv(|x| soft_threshold_scalar(x, lambda))
}

pub fn soft_threshold_scalar(v: f64, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0);
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

/// Minimizer of (kappa/2)||z1-z2||_1 + 1/2||a-z1||^2 + 1/2||b-z2||^2.
///
/// z1 = (a+b)/2 - s/2 and z2 = (a+b)/2 + s/2 with s = soft_threshold(b-a, kappa),
/// so the pair sum equals a + b identically.
pub fn prox_pair_l1(
    a: ArrayView1<f64>,
    b: ArrayView1<f64>,
    kappa: f64,
) -> (Array1<f64>, Array1<f64>) {
    assert_eq!(a.len(), b.len(), "pair inputs must have equal length");
    assert!(kappa >= 0.0, "kappa must be non-negative");
    let n = a.len();
    let mut z1 = Array1::zeros(n);
    let mut z2 = Array1::zeros(n);
    for k in 0..n {
        let half_sum = 0.5 * (a[k] + b[k]);
        let half_shrunk = 0.5 * soft_threshold_scalar(b[k] - a[k], kappa);
        z1[k] = half_sum - half_shrunk;
        z2[k] = half_sum + half_shrunk;
    }
    (z1, z2)
}

/// Minimizer of kappa||z1-z2||^2 + 1/2||a-z1||^2 + 1/2||b-z2||^2.
///
/// First-order conditions give z1 = a - c(a-b), z2 = b + c(a-b) with
/// c = 2*kappa / (1 + 4*kappa); kappa -> inf drives both to the mean.
pub fn prox_pair_sql2(
    a: ArrayView1<f64>,
    b: ArrayView1<f64>,
    kappa: f64,
) -> (Array1<f64>, Array1<f64>) {
    assert_eq!(a.len(), b.len(), "pair inputs must have equal length");
    assert!(kappa >= 0.0, "kappa must be non-negative");
    let c = 2.0 * kappa / (1.0 + 4.0 * kappa);
    let n = a.len();
    let mut z1 = Array1::zeros(n);
    let mut z2 = Array1::zeros(n);
    for k in 0..n {
        let diff = a[k] - b[k];
        z1[k] = a[k] - c * diff;
        z2[k] = b[k] + c * diff;
    }
    (z1, z2)
}

/// Which coupling penalty a temporal edge applies to z1 - z2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    L1,
    SquaredL2,
}

/// A temporal edge's penalty: kind plus weight eta * gamma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePenalty {
    pub kind: PenaltyKind,
    pub weight: f64,
}

impl EdgePenalty {
    /// Consensus update for this edge under step parameter rho.
    pub fn prox_pair(
        &self,
        a: ArrayView1<f64>,
        b: ArrayView1<f64>,
        rho: f64,
    ) -> (Array1<f64>, Array1<f64>) {
        assert!(rho > 0.0, "rho must be positive");
        match self.kind {
            PenaltyKind::L1 => prox_pair_l1(a, b, 2.0 * self.weight / rho),
            PenaltyKind::SquaredL2 => prox_pair_sql2(a, b, self.weight / rho),
        }
    }

    /// Penalty value on a difference vector, for objective bookkeeping.
    pub fn eval(&self, diff: ArrayView1<f64>) -> f64 {
        match self.kind {
            PenaltyKind::L1 => self.weight * diff.iter().map(|x| x.abs()).sum::<f64>(),
            PenaltyKind::SquaredL2 => self.weight * diff.iter().map(|x| x * x).sum::<f64>(),
        }
    }
}
