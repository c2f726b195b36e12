//! Visit counters and empirical cost/transition estimates.

use serde::{Deserialize, Serialize};

use crate::dims::Dims;
use crate::error::{Error, Result};
use crate::mdp::Trajectory;

/// `n_h(s)`, `n_h(s,a)` and `n_h(s,a,s')` after `episodes` episodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    dims: Dims,
    n_s: Vec<u64>,
    n_sa: Vec<u64>,
    n_sas: Vec<u64>,
    episodes: u64,
}

impl Counters {
    pub fn new(dims: Dims) -> Self {
        Self {
            dims,
            n_s: vec![0; dims.len_hs()],
            n_sa: vec![0; dims.len_hsa()],
            n_sas: vec![0; dims.len_hsas()],
            episodes: 0,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    #[inline]
    pub fn n_s(&self, h: usize, s: usize) -> u64 {
        self.n_s[self.dims.hs(h, s)]
    }

    #[inline]
    pub fn n_sa(&self, h: usize, s: usize, a: usize) -> u64 {
        self.n_sa[self.dims.hsa(h, s, a)]
    }

    #[inline]
    pub fn n_sas_row(&self, h: usize, s: usize, a: usize) -> &[u64] {
        let start = self.dims.row(h, s, a);
        &self.n_sas[start..start + self.dims.states]
    }

    /// Checks the marginal-consistency invariants; returns a description of
    /// the first violation.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        let d = self.dims;
        for h in 0..d.horizon {
            let mut per_step = 0;
            for s in 0..d.states {
                let sa: u64 = (0..d.actions).map(|a| self.n_sa(h, s, a)).sum();
                if sa != self.n_s(h, s) {
                    return Err(format!("Σ_a n[{h}][{s}][a] = {sa} != n[{h}][{s}]"));
                }
                for a in 0..d.actions {
                    let sas: u64 = self.n_sas_row(h, s, a).iter().sum();
                    if sas != self.n_sa(h, s, a) {
                        return Err(format!("Σ_s' n[{h}][{s}][{a}][s'] != n[{h}][{s}][{a}]"));
                    }
                }
                per_step += self.n_s(h, s);
            }
            if per_step != self.episodes {
                return Err(format!("Σ_s n[{h}][s] = {per_step} != {}", self.episodes));
            }
        }
        Ok(())
    }
}

/// Counters plus the running sums and ratios they back.
///
/// Rows with `n_h(s,a) = 0` have no estimate; accessors return `None` there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalModel {
    counters: Counters,
    cost_sums: Vec<f64>,
    mean_cost: Vec<f64>,
    transition: Vec<f64>,
}

impl EmpiricalModel {
    pub fn new(dims: Dims) -> Self {
        Self {
            counters: Counters::new(dims),
            cost_sums: vec![0.0; dims.len_hsa()],
            mean_cost: vec![0.0; dims.len_hsa()],
            transition: vec![0.0; dims.len_hsas()],
        }
    }

    pub fn dims(&self) -> Dims {
        self.counters.dims
    }

    pub fn counters(&self) -> &Counters {
        &self.counters
    }

    /// Folds one episode into the counters and refreshes the touched rows.
    pub fn update(&mut self, trajectory: &Trajectory) -> Result<()> {
        let d = self.dims();
        if trajectory.steps.len() != d.horizon {
            return Err(Error::Dimension(format!(
                "trajectory has {} steps, expected H={}",
                trajectory.steps.len(),
                d.horizon
            )));
        }
        if let Some(bad) = trajectory
            .steps
            .iter()
            .find(|st| st.state >= d.states || st.next_state >= d.states || st.action >= d.actions)
        {
            return Err(Error::Dimension(format!("step {bad:?} is out of range")));
        }
        for (h, st) in trajectory.steps.iter().enumerate() {
            let (s, a) = (st.state, st.action);
            let hsa = d.hsa(h, s, a);
            let row = d.row(h, s, a);
            self.counters.n_s[d.hs(h, s)] += 1;
            self.counters.n_sa[hsa] += 1;
            self.counters.n_sas[row + st.next_state] += 1;
            self.cost_sums[hsa] += st.cost;

            let n = self.counters.n_sa[hsa] as f64;
            self.mean_cost[hsa] = self.cost_sums[hsa] / n;
            for y in 0..d.states {
                self.transition[row + y] = self.counters.n_sas[row + y] as f64 / n;
            }
        }
        self.counters.episodes += 1;
        Ok(())
    }

    #[inline]
    pub fn n_sa(&self, h: usize, s: usize, a: usize) -> u64 {
        self.counters.n_sa(h, s, a)
    }

    /// `c̄_h(s,a)`, or `None` if the pair is unvisited.
    #[inline]
    pub fn mean_cost(&self, h: usize, s: usize, a: usize) -> Option<f64> {
        let i = self.dims().hsa(h, s, a);
        (self.counters.n_sa[i] > 0).then(|| self.mean_cost[i])
    }

    /// `P̄_h(·|s,a)`, or `None` if the pair is unvisited.
    #[inline]
    pub fn transition_row(&self, h: usize, s: usize, a: usize) -> Option<&[f64]> {
        let d = self.dims();
        if self.counters.n_sa[d.hsa(h, s, a)] == 0 {
            return None;
        }
        let start = d.row(h, s, a);
        Some(&self.transition[start..start + d.states])
    }

    pub fn cost_sum(&self, h: usize, s: usize, a: usize) -> f64 {
        self.cost_sums[self.dims().hsa(h, s, a)]
    }

    /// Checkpoint encoding (JSON).
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}
