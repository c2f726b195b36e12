//! Exact backward induction on a known MDP: policy evaluation, optimal values
//! and occupancy measures.

use serde::{Deserialize, Serialize};

use crate::dims::{dot, Dims};
use crate::error::Result;
use crate::mdp::MdpSpec;
use crate::policy::PolicyTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueKind {
    Optimal,
    OfPolicy,
}

/// `V[h][s]` for `h` in `0..=H` (row `H` is the zero boundary) and `Q[h][s][a]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction {
    dims: Dims,
    v: Vec<f64>,
    q: Vec<f64>,
    kind: ValueKind,
}

impl ValueFunction {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    #[inline]
    pub fn v(&self, h: usize, s: usize) -> f64 {
        self.v[self.dims.hs(h, s)]
    }

    /// `V[h][·]`; valid for `h` in `0..=H`.
    #[inline]
    pub fn v_row(&self, h: usize) -> &[f64] {
        let start = self.dims.hs(h, 0);
        &self.v[start..start + self.dims.states]
    }

    #[inline]
    pub fn q(&self, h: usize, s: usize, a: usize) -> f64 {
        self.q[self.dims.hsa(h, s, a)]
    }

    #[inline]
    pub fn q_row(&self, h: usize, s: usize) -> &[f64] {
        let start = self.dims.hsa(h, s, 0);
        &self.q[start..start + self.dims.actions]
    }

    /// Value at the first step, averaged over the initial distribution.
    pub fn initial_value(&self, mdp: &MdpSpec) -> f64 {
        dot(&mdp.initial_distribution(), self.v_row(0))
    }
}

/// `Q[h][s][a] = c_h(s,a) + P_h(·|s,a) V[h+1]`, `V[h][s] = <π_h(·|s), Q[h][s][·]>`.
pub fn evaluate_policy(mdp: &MdpSpec, policy: &PolicyTable) -> Result<ValueFunction> {
    let dims = mdp.dims();
    dims.ensure_same(&policy.dims(), "policy vs MDP")?;
    let mut v = vec![0.0; dims.len_value()];
    let mut q = vec![0.0; dims.len_hsa()];
    for h in (0..dims.horizon).rev() {
        let (cur, next) = v.split_at_mut(dims.hs(h + 1, 0));
        let next = &next[..dims.states];
        for s in 0..dims.states {
            for a in 0..dims.actions {
                q[dims.hsa(h, s, a)] = mdp.mean_cost(h, s, a) + dot(mdp.transition_row(h, s, a), next);
            }
            let start = dims.hsa(h, s, 0);
            cur[dims.hs(h, s)] = dot(&q[start..start + dims.actions], policy.row(h, s));
        }
    }
    Ok(ValueFunction {
        dims,
        v,
        q,
        kind: ValueKind::OfPolicy,
    })
}

/// Backward induction with `V[h][s] = min_a Q[h][s][a]`; the returned policy is
/// greedy with ties broken toward the smallest action index.
pub fn solve_optimal(mdp: &MdpSpec) -> (ValueFunction, PolicyTable) {
    let dims = mdp.dims();
    let mut v = vec![0.0; dims.len_value()];
    let mut q = vec![0.0; dims.len_hsa()];
    let mut choice = vec![0usize; dims.len_hs()];
    for h in (0..dims.horizon).rev() {
        let (cur, next) = v.split_at_mut(dims.hs(h + 1, 0));
        let next = &next[..dims.states];
        for s in 0..dims.states {
            let mut best = 0;
            for a in 0..dims.actions {
                let value = mdp.mean_cost(h, s, a) + dot(mdp.transition_row(h, s, a), next);
                q[dims.hsa(h, s, a)] = value;
                if value < q[dims.hsa(h, s, best)] {
                    best = a;
                }
            }
            choice[dims.hs(h, s)] = best;
            cur[dims.hs(h, s)] = q[dims.hsa(h, s, best)];
        }
    }
    let policy = PolicyTable::deterministic(dims, &choice).expect("actions are in range");
    (
        ValueFunction {
            dims,
            v,
            q,
            kind: ValueKind::Optimal,
        },
        policy,
    )
}

/// State distribution `d[h][·]` for `h` in `0..H` when following `policy` from
/// the MDP's initial distribution.
pub fn occupancy(mdp: &MdpSpec, policy: &PolicyTable) -> Result<Vec<Vec<f64>>> {
    occupancy_from(mdp, policy, 0, &mdp.initial_distribution())
}

/// State distribution `d[h][·]` for `h` in `start_step..H`, starting from
/// `start` at step `start_step`. The returned vector is indexed by
/// `h - start_step`.
pub fn occupancy_from(
    mdp: &MdpSpec,
    policy: &PolicyTable,
    start_step: usize,
    start: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let dims = mdp.dims();
    dims.ensure_same(&policy.dims(), "policy vs MDP")?;
    if start.len() != dims.states {
        return Err(crate::Error::Dimension(format!(
            "start distribution has {} entries, expected {}",
            start.len(),
            dims.states
        )));
    }
    let mut out = Vec::with_capacity(dims.horizon.saturating_sub(start_step));
    let mut d = start.to_vec();
    for h in start_step..dims.horizon {
        let mut next = vec![0.0; dims.states];
        for (s, &mass) in d.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (a, &pa) in policy.row(h, s).iter().enumerate() {
                if pa == 0.0 {
                    continue;
                }
                let w = mass * pa;
                for (n, &p) in next.iter_mut().zip(mdp.transition_row(h, s, a)) {
                    *n += w * p;
                }
            }
        }
        out.push(std::mem::replace(&mut d, next));
    }
    Ok(out)
}

/// Ground truth the learners are scored against.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub optimal: ValueFunction,
    pub optimal_policy: PolicyTable,
}

impl GroundTruth {
    pub fn new(mdp: &MdpSpec) -> Self {
        let (optimal, optimal_policy) = solve_optimal(mdp);
        Self {
            optimal,
            optimal_policy,
        }
    }
}
