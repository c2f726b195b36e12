//! Stochastic policy tables and online mirror descent over action simplices.

use serde::{Deserialize, Serialize};

use crate::dims::Dims;
use crate::error::{Error, Result};

/// Tolerance for "this row is on the simplex".
pub const SIMPLEX_TOL: f64 = 1e-9;

/// `π_h(a|s)` for every `(h, s)`, stored flat in `[h][s][a]` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyTable {
    dims: Dims,
    pi: Vec<f64>,
}

impl PolicyTable {
    /// Every row `(1/A, …, 1/A)`.
    pub fn uniform(dims: Dims) -> Self {
        Self {
            dims,
            pi: vec![1.0 / dims.actions as f64; dims.len_hsa()],
        }
    }

    /// Point-mass policy; `actions` is indexed by `dims.hs(h, s)`.
    pub fn deterministic(dims: Dims, actions: &[usize]) -> Result<Self> {
        if actions.len() != dims.len_hs() {
            return Err(Error::Dimension(format!(
                "expected {} actions, got {}",
                dims.len_hs(),
                actions.len()
            )));
        }
        let mut pi = vec![0.0; dims.len_hsa()];
        for (cell, &a) in actions.iter().enumerate() {
            if a >= dims.actions {
                return Err(Error::InvalidArgument(format!("action {a} out of range")));
            }
            pi[cell * dims.actions + a] = 1.0;
        }
        Ok(Self { dims, pi })
    }

    pub fn from_flat(dims: Dims, pi: Vec<f64>) -> Result<Self> {
        if pi.len() != dims.len_hsa() {
            return Err(Error::Dimension(format!(
                "policy has {} entries, expected {}",
                pi.len(),
                dims.len_hsa()
            )));
        }
        let table = Self { dims, pi };
        for h in 0..dims.horizon {
            for s in 0..dims.states {
                if !is_on_simplex(table.row(h, s)) {
                    return Err(Error::InvalidArgument(format!(
                        "policy row ({h}, {s}) is not a distribution"
                    )));
                }
            }
        }
        Ok(table)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn row(&self, h: usize, s: usize) -> &[f64] {
        let start = self.dims.hsa(h, s, 0);
        &self.pi[start..start + self.dims.actions]
    }

    #[inline]
    pub fn row_mut(&mut self, h: usize, s: usize) -> &mut [f64] {
        let start = self.dims.hsa(h, s, 0);
        &mut self.pi[start..start + self.dims.actions]
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.pi
    }
}

/// Whether `row` is nonnegative and sums to one within [`SIMPLEX_TOL`].
pub fn is_on_simplex(row: &[f64]) -> bool {
    !row.is_empty()
        && row.iter().all(|&p| p.is_finite() && p >= -SIMPLEX_TOL)
        && (row.iter().sum::<f64>() - 1.0).abs() <= SIMPLEX_TOL
}

/// Learning-rate schedule for the mirror-descent step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepsizeSchedule {
    /// `η_k = 1 / sqrt(A H² k)`.
    DecreasingL2 { actions: usize, horizon: usize },
    /// Constant `η`, chosen as a function of the episode budget.
    FixedKl { eta: f64 },
}

impl StepsizeSchedule {
    pub fn decreasing_l2(dims: Dims) -> Self {
        StepsizeSchedule::DecreasingL2 {
            actions: dims.actions,
            horizon: dims.horizon,
        }
    }

    /// `η = sqrt(2 ln A / (H² K))`. With a single action `ln 2` stands in for
    /// `ln A` so the rate stays positive; the update is trivial there anyway.
    pub fn fixed_kl_default(dims: Dims, episodes: usize) -> Self {
        let log_a = (dims.actions.max(2) as f64).ln();
        let h = dims.horizon as f64;
        StepsizeSchedule::FixedKl {
            eta: (2.0 * log_a / (h * h * episodes.max(1) as f64)).sqrt(),
        }
    }

    /// Step size for episode `k` (one-based).
    pub fn eta(&self, k: usize) -> f64 {
        match *self {
            StepsizeSchedule::DecreasingL2 { actions, horizon } => {
                let h = horizon as f64;
                1.0 / (actions as f64 * h * h * k.max(1) as f64).sqrt()
            }
            StepsizeSchedule::FixedKl { eta } => eta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepsizeSchedule::DecreasingL2 { actions, horizon } if actions == 0 || horizon == 0 => {
                Err(Error::InvalidArgument("schedule needs positive A and H".into()))
            }
            StepsizeSchedule::FixedKl { eta } if !(eta.is_finite() && eta > 0.0) => Err(
                Error::InvalidArgument(format!("fixed step size must be positive, got {eta}")),
            ),
            _ => Ok(()),
        }
    }
}

/// Euclidean projection onto the probability simplex.
///
/// Sort descending, find the largest `j` with
/// `x_(j) - (Σ_{i≤j} x_(i) - 1) / j > 0`, shift by that threshold and clamp at
/// zero.
pub fn project_simplex(x: &[f64]) -> Result<Vec<f64>> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("cannot project an empty row".into()));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("row has non-finite entries".into()));
    }
    let mut sorted = x.to_vec();
    // stable sort keeps ties in input order
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut prefix = 0.0;
    let mut threshold = 0.0;
    for (j, &v) in sorted.iter().enumerate() {
        prefix += v;
        let t = (prefix - 1.0) / (j + 1) as f64;
        if v - t > 0.0 {
            threshold = t;
        }
    }
    Ok(x.iter().map(|&v| (v - threshold).max(0.0)).collect())
}

/// `Π_Δ(π - η q)`.
pub fn omd_step_l2(pi_row: &[f64], q_row: &[f64], eta: f64) -> Result<Vec<f64>> {
    check_step_args(pi_row, q_row, eta)?;
    let shifted: Vec<f64> = pi_row
        .iter()
        .zip(q_row)
        .map(|(p, q)| p - eta * q)
        .collect();
    project_simplex(&shifted)
}

/// Exponentiated-gradient step `π(a) exp(-η q(a))`, renormalized.
pub fn omd_step_kl(pi_row: &[f64], q_row: &[f64], eta: f64) -> Result<Vec<f64>> {
    check_step_args(pi_row, q_row, eta)?;
    if pi_row.iter().any(|&p| p <= 0.0) {
        return Err(Error::DegenerateSupport);
    }
    let q_min = q_row.iter().copied().fold(f64::INFINITY, f64::min);
    let mut out: Vec<f64> = pi_row
        .iter()
        .zip(q_row)
        .map(|(p, q)| p * (-eta * (q - q_min)).exp())
        .collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    if out.iter().any(|&p| p <= 0.0) {
        return Err(Error::DegenerateSupport);
    }
    Ok(out)
}

fn check_step_args(pi_row: &[f64], q_row: &[f64], eta: f64) -> Result<()> {
    if pi_row.len() != q_row.len() {
        return Err(Error::Dimension(format!(
            "policy row has {} entries, gradient has {}",
            pi_row.len(),
            q_row.len()
        )));
    }
    if !(eta.is_finite() && eta >= 0.0) {
        return Err(Error::InvalidArgument(format!("step size {eta} is invalid")));
    }
    Ok(())
}

/// Point mass on the smallest-index minimizer of `q_row`.
pub fn greedy_row(q_row: &[f64]) -> Vec<f64> {
    let mut best = 0;
    for (a, &q) in q_row.iter().enumerate() {
        if q < q_row[best] {
            best = a;
        }
    }
    let mut out = vec![0.0; q_row.len()];
    out[best] = 1.0;
    out
}
