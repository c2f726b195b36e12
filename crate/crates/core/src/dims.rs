//! Flat-tensor indexing shared by every table in the crate.
//!
//! Steps are zero-based internally: `h` ranges over `0..horizon`, and value
//! tables carry one extra boundary row at `h == horizon` that is always zero.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sizes of a tabular episodic problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub states: usize,
    pub actions: usize,
    pub horizon: usize,
}

impl Dims {
    pub fn new(states: usize, actions: usize, horizon: usize) -> Result<Self> {
        if states == 0 || actions == 0 || horizon == 0 {
            return Err(Error::InvalidArgument(format!(
                "S, A and H must be positive (got S={states}, A={actions}, H={horizon})"
            )));
        }
        Ok(Self {
            states,
            actions,
            horizon,
        })
    }

    #[inline]
    pub fn hs(&self, h: usize, s: usize) -> usize {
        h * self.states + s
    }

    #[inline]
    pub fn hsa(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.states + s) * self.actions + a
    }

    /// Start of the `P[h][s][a][·]` row in a flat transition-shaped tensor.
    #[inline]
    pub fn row(&self, h: usize, s: usize, a: usize) -> usize {
        self.hsa(h, s, a) * self.states
    }

    /// Number of `(h, s)` cells.
    pub fn len_hs(&self) -> usize {
        self.horizon * self.states
    }

    /// Number of `(h, s)` cells including the `h = H` boundary row.
    pub fn len_value(&self) -> usize {
        (self.horizon + 1) * self.states
    }

    pub fn len_hsa(&self) -> usize {
        self.horizon * self.states * self.actions
    }

    pub fn len_hsas(&self) -> usize {
        self.len_hsa() * self.states
    }

    pub(crate) fn ensure_same(&self, other: &Dims, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::Dimension(format!(
                "{what}: expected S={}, A={}, H={}, found S={}, A={}, H={}",
                self.states, self.actions, self.horizon, other.states, other.actions, other.horizon
            )));
        }
        Ok(())
    }
}

/// Inner product of two equal-length rows.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
