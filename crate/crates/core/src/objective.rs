//! Per-slot graph learning objective and its projected-gradient solver.
//!
//! For one slot with distance vector r the model is
//!
//!   f(w) = 2 r·w − α Σ_i log((Sw)_i) + β ||w||²,   w ≥ 0,
//!
//! and the consensus solver tethers it to a proximal center θ:
//!
//!   g(w) = f(w) + (m·ρ/2) ||w − θ||².
//!
//! The log barrier keeps every vertex degree positive; f is +∞ whenever some
//! degree hits zero (only reachable when α > 0; α = 0 drops the barrier).

use ndarray::{Array1, ArrayView1};

use crate::graph::{degree_operator_raw, DistanceVector, WeightVector};
use crate::{Error, Result};

/// Weights of the per-slot objective terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams {
    /// Log-barrier weight; zero disables the barrier entirely.
    pub alpha: f64,
    /// l2 regularization weight, strictly positive.
    pub beta: f64,
}

impl ObjectiveParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite and >= 0, got {alpha}"
            )));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta must be finite and > 0, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }
}

/// Step-size policy for the projected gradient loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// Armijo backtracking from a curvature-based initial step. Default.
    Backtracking,
    /// Constant step; still halved when an iterate would kill a degree.
    Fixed(f64),
}

/// Inner-solver knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PgdConfig {
    pub step: StepRule,
    pub max_iters: usize,
    /// Stop once the sup-norm step change drops below this.
    pub tol: f64,
}

impl Default for PgdConfig {
    fn default() -> Self {
        Self {
            step: StepRule::Backtracking,
            max_iters: 10_000,
            tol: 1e-6,
        }
    }
}

impl PgdConfig {
    fn validate(&self) -> Result<()> {
        if let StepRule::Fixed(eps) = self.step {
            if !(eps > 0.0) || !eps.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "fixed step must be finite and > 0, got {eps}"
                )));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "tol must be finite and > 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Result of one PGD run. `converged` is false when max_iters elapsed with the
/// step change still above tol; the last iterate is returned regardless.
#[derive(Debug, Clone)]
pub struct PgdOutcome {
    pub weights: WeightVector,
    pub iters: usize,
    pub converged: bool,
}

const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_SLOPE: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

/// f(w); +∞ when α > 0 and some degree is zero.
pub fn eval_f(w: &WeightVector, r: &DistanceVector, params: &ObjectiveParams) -> Result<f64> {
    check_dims(w.d(), r.d())?;
    Ok(eval_g_raw(
        w.values(),
        r.values(),
        w.d(),
        params,
        None,
        0.0,
    ))
}

/// g(w) = f(w) + (m_rho/2)||w − θ||²; θ is ignored when m_rho is zero.
pub fn eval_g(
    w: &WeightVector,
    r: &DistanceVector,
    params: &ObjectiveParams,
    theta: ArrayView1<f64>,
    m_rho: f64,
) -> Result<f64> {
    check_dims(w.d(), r.d())?;
    check_tether(w.p(), theta.len(), m_rho)?;
    Ok(eval_g_raw(
        w.values(),
        r.values(),
        w.d(),
        params,
        Some(theta),
        m_rho,
    ))
}

/// ∇g(w) = 2r + 2βw + m_rho(w − θ) − α Sᵀ((Sw)^{-1}).
///
/// Errors with [`Error::ZeroDegree`] when the barrier is active and some
/// degree vanishes.
pub fn grad_g(
    w: &WeightVector,
    r: &DistanceVector,
    params: &ObjectiveParams,
    theta: ArrayView1<f64>,
    m_rho: f64,
) -> Result<Array1<f64>> {
    check_dims(w.d(), r.d())?;
    check_tether(w.p(), theta.len(), m_rho)?;
    grad_g_raw(
        w.values(),
        r.values(),
        w.d(),
        params,
        Some(theta),
        m_rho,
    )
}

fn check_dims(wd: usize, rd: usize) -> Result<()> {
    if wd != rd {
        return Err(Error::DimensionMismatch(format!(
            "weights are over {wd} vertices but distances over {rd}"
        )));
    }
    Ok(())
}

fn check_tether(p: usize, theta_len: usize, m_rho: f64) -> Result<()> {
    if !(m_rho >= 0.0) || !m_rho.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "m_rho must be finite and >= 0, got {m_rho}"
        )));
    }
    if m_rho > 0.0 && theta_len != p {
        return Err(Error::DimensionMismatch(format!(
            "theta has {theta_len} entries, weights have {p}"
        )));
    }
    Ok(())
}

fn eval_g_raw(
    w: ArrayView1<f64>,
    r: ArrayView1<f64>,
    d: usize,
    params: &ObjectiveParams,
    theta: Option<ArrayView1<f64>>,
    m_rho: f64,
) -> f64 {
    let mut val = 2.0 * r.dot(&w) + params.beta * w.dot(&w);
    if params.alpha > 0.0 {
        let deg = degree_operator_raw(w, d);
        for i in 0..d {
            if deg[i] <= 0.0 {
                return f64::INFINITY;
            }
            val -= params.alpha * deg[i].ln();
        }
    }
    if m_rho > 0.0 {
        let theta = theta.expect("tether requires theta");
        let mut sq = 0.0;
        for k in 0..w.len() {
            let diff = w[k] - theta[k];
            sq += diff * diff;
        }
        val += 0.5 * m_rho * sq;
    }
    val
}

fn grad_g_raw(
    w: ArrayView1<f64>,
    r: ArrayView1<f64>,
    d: usize,
    params: &ObjectiveParams,
    theta: Option<ArrayView1<f64>>,
    m_rho: f64,
) -> Result<Array1<f64>> {
    let p = w.len();
    let mut g = Array1::zeros(p);
    for k in 0..p {
        g[k] = 2.0 * r[k] + 2.0 * params.beta * w[k];
    }
    if m_rho > 0.0 {
        let theta = theta.expect("tether requires theta");
        for k in 0..p {
            g[k] += m_rho * (w[k] - theta[k]);
        }
    }
    if params.alpha > 0.0 {
        let deg = degree_operator_raw(w, d);
        if let Some(i) = deg.iter().position(|x| *x <= 0.0) {
            return Err(Error::ZeroDegree(i));
        }
        // adjoint applied to the inverse degrees, fused in one pass
        let mut k = 0;
        for i in 0..d {
            for j in (i + 1)..d {
                g[k] -= params.alpha * (1.0 / deg[i] + 1.0 / deg[j]);
                k += 1;
            }
        }
    }
    Ok(g)
}

/// Projected gradient descent on g from `w0`, clamping to the non-negative
/// orthant each step.
///
/// Backtracking starts each iteration at 1/(2β + m_rho + L̂) with L̂ a crude
/// curvature bound for the barrier, then halves until Armijo sufficient
/// decrease holds. Any trial point with a vanished degree is rejected and the
/// step halved, in either step mode, so iterates stay in the barrier's domain.
pub fn pgd_solve(
    w0: &WeightVector,
    r: &DistanceVector,
    params: &ObjectiveParams,
    theta: ArrayView1<f64>,
    m_rho: f64,
    cfg: &PgdConfig,
) -> Result<PgdOutcome> {
    check_dims(w0.d(), r.d())?;
    check_tether(w0.p(), theta.len(), m_rho)?;
    cfg.validate()?;
    let d = w0.d();
    let p = w0.p();
    let barrier = params.alpha > 0.0;
    if barrier {
        let deg = degree_operator_raw(w0.values(), d);
        if let Some(i) = deg.iter().position(|x| *x <= 0.0) {
            return Err(Error::ZeroDegree(i));
        }
    }
    let theta_opt = Some(theta);

    let mut y = w0.values().to_owned();
    let mut converged = false;
    let mut iters = 0;

    for _ in 0..cfg.max_iters {
        iters += 1;
        let grad = grad_g_raw(y.view(), r.values(), d, params, theta_opt, m_rho)?;
        let eps0 = match cfg.step {
            StepRule::Fixed(eps) => eps,
            StepRule::Backtracking => {
                let mut l_hat = 0.0;
                if barrier {
                    let deg = degree_operator_raw(y.view(), d);
                    let max_inv_sq = deg
                        .iter()
                        .map(|x| 1.0 / (x * x))
                        .fold(0.0f64, f64::max);
                    l_hat = params.alpha * max_inv_sq * 2.0 * d as f64;
                }
                1.0 / (2.0 * params.beta + m_rho + l_hat)
            }
        };
        let g_y = match cfg.step {
            StepRule::Backtracking => {
                eval_g_raw(y.view(), r.values(), d, params, theta_opt, m_rho)
            }
            StepRule::Fixed(_) => 0.0, // unused
        };

        let mut eps = eps0;
        let mut next: Option<Array1<f64>> = None;
        for _ in 0..MAX_HALVINGS {
            let cand = Array1::from_iter(
                y.iter()
                    .zip(grad.iter())
                    .map(|(yk, gk)| (yk - eps * gk).max(0.0)),
            );
            if barrier {
                let deg = degree_operator_raw(cand.view(), d);
                if deg.iter().any(|x| *x <= 0.0) {
                    eps *= 0.5;
                    continue;
                }
            }
            match cfg.step {
                StepRule::Fixed(_) => {
                    next = Some(cand);
                    break;
                }
                StepRule::Backtracking => {
                    let g_c = eval_g_raw(cand.view(), r.values(), d, params, theta_opt, m_rho);
                    let mut lin = 0.0;
                    for k in 0..p {
                        lin += grad[k] * (cand[k] - y[k]);
                    }
                    if g_c <= g_y + ARMIJO_SLOPE * lin {
                        next = Some(cand);
                        break;
                    }
                    eps *= ARMIJO_SHRINK;
                }
            }
        }

        let Some(cand) = next else {
            // no acceptable step at fp scale: stationary for our purposes
            converged = true;
            break;
        };
        let mut delta = 0.0f64;
        for k in 0..p {
            delta = delta.max((cand[k] - y[k]).abs());
        }
        y = cand;
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(PgdOutcome {
        weights: WeightVector::new(d, y)?,
        iters,
        converged,
    })
}
