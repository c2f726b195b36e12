//! Tabular time-inhomogeneous episodic MDPs, trajectory sampling and
//! benchmark generators.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::dims::Dims;
use crate::error::{Error, Result};
use crate::policy::PolicyTable;

const ROW_SUM_TOL: f64 = 1e-12;

/// Distribution of the realized cost `C_h(s,a)` around its mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CostNoise {
    /// The realized cost equals the mean.
    Deterministic,
    /// The realized cost is `Bernoulli(c_h(s,a))`.
    #[default]
    Bernoulli,
}

/// Where each episode starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialState {
    Fixed(usize),
    Distribution(Vec<f64>),
}

/// A finite-horizon MDP with step-dependent transitions and mean costs in
/// `[0, 1]`.
///
/// Tensors are stored flat; see [`Dims`] for the layout. Serializes to a JSON
/// document with keys `S`, `A`, `H`, `transition` (nested `[h][s][a][s']`),
/// `mean_cost` (nested `[h][s][a]`), `cost_noise` and `initial_state`.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpSpec {
    dims: Dims,
    transition: Vec<f64>,
    mean_cost: Vec<f64>,
    cost_noise: CostNoise,
    initial: InitialState,
}

impl MdpSpec {
    /// Builds and validates a spec from flat tensors.
    pub fn new(
        dims: Dims,
        transition: Vec<f64>,
        mean_cost: Vec<f64>,
        cost_noise: CostNoise,
        initial: InitialState,
    ) -> Result<Self> {
        let spec = Self {
            dims,
            transition,
            mean_cost,
            cost_noise,
            initial,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dims;
        Dims::new(d.states, d.actions, d.horizon).map_err(|e| Error::InvalidMdp(e.to_string()))?;
        if self.transition.len() != d.len_hsas() {
            return Err(Error::InvalidMdp(format!(
                "transition has {} entries, expected {}",
                self.transition.len(),
                d.len_hsas()
            )));
        }
        if self.mean_cost.len() != d.len_hsa() {
            return Err(Error::InvalidMdp(format!(
                "mean_cost has {} entries, expected {}",
                self.mean_cost.len(),
                d.len_hsa()
            )));
        }
        for h in 0..d.horizon {
            for s in 0..d.states {
                for a in 0..d.actions {
                    let row = self.transition_row(h, s, a);
                    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
                        return Err(Error::InvalidMdp(format!(
                            "P[{h}][{s}][{a}] has a negative or non-finite entry"
                        )));
                    }
                    let total: f64 = row.iter().sum();
                    if (total - 1.0).abs() > ROW_SUM_TOL {
                        return Err(Error::InvalidMdp(format!(
                            "P[{h}][{s}][{a}] sums to {total}"
                        )));
                    }
                    let c = self.mean_cost(h, s, a);
                    if !(0.0..=1.0).contains(&c) {
                        return Err(Error::InvalidMdp(format!(
                            "c[{h}][{s}][{a}] = {c} is outside [0, 1]"
                        )));
                    }
                }
            }
        }
        match &self.initial {
            InitialState::Fixed(s) if *s >= d.states => Err(Error::InvalidMdp(format!(
                "initial_state {s} out of range for S={}",
                d.states
            ))),
            InitialState::Distribution(p) => {
                if p.len() != d.states {
                    return Err(Error::InvalidMdp(format!(
                        "initial distribution has {} entries, expected {}",
                        p.len(),
                        d.states
                    )));
                }
                if p.iter().any(|x| !x.is_finite() || *x < 0.0)
                    || (p.iter().sum::<f64>() - 1.0).abs() > ROW_SUM_TOL
                {
                    return Err(Error::InvalidMdp(
                        "initial distribution is not a probability vector".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn num_states(&self) -> usize {
        self.dims.states
    }

    pub fn num_actions(&self) -> usize {
        self.dims.actions
    }

    pub fn horizon(&self) -> usize {
        self.dims.horizon
    }

    #[inline]
    pub fn transition_row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let start = self.dims.row(h, s, a);
        &self.transition[start..start + self.dims.states]
    }

    #[inline]
    pub fn mean_cost(&self, h: usize, s: usize, a: usize) -> f64 {
        self.mean_cost[self.dims.hsa(h, s, a)]
    }

    pub fn cost_noise(&self) -> CostNoise {
        self.cost_noise
    }

    pub fn with_cost_noise(mut self, noise: CostNoise) -> Self {
        self.cost_noise = noise;
        self
    }

    pub fn initial(&self) -> &InitialState {
        &self.initial
    }

    /// Distribution of the first state as a dense vector.
    pub fn initial_distribution(&self) -> Vec<f64> {
        match &self.initial {
            InitialState::Fixed(s) => {
                let mut d = vec![0.0; self.dims.states];
                d[*s] = 1.0;
                d
            }
            InitialState::Distribution(p) => p.clone(),
        }
    }

    /// The fixed start state, if the spec has one.
    pub fn fixed_initial_state(&self) -> Option<usize> {
        match self.initial {
            InitialState::Fixed(s) => Some(s),
            InitialState::Distribution(_) => None,
        }
    }

    /// Whether every transition row is a point mass and costs are noiseless.
    pub fn is_deterministic(&self) -> bool {
        self.cost_noise == CostNoise::Deterministic
            && self.transition.iter().all(|&p| p == 0.0 || p == 1.0)
            && matches!(self.initial, InitialState::Fixed(_))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Serialize, Deserialize)]
struct MdpDocument {
    #[serde(rename = "S")]
    states: usize,
    #[serde(rename = "A")]
    actions: usize,
    #[serde(rename = "H")]
    horizon: usize,
    transition: Vec<Vec<Vec<Vec<f64>>>>,
    mean_cost: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    cost_noise: CostNoise,
    initial_state: InitialState,
}

impl Serialize for MdpSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dims;
        let transition = (0..d.horizon)
            .map(|h| {
                (0..d.states)
                    .map(|s| {
                        (0..d.actions)
                            .map(|a| self.transition_row(h, s, a).to_vec())
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mean_cost = (0..d.horizon)
            .map(|h| {
                (0..d.states)
                    .map(|s| (0..d.actions).map(|a| self.mean_cost(h, s, a)).collect())
                    .collect()
            })
            .collect();
        MdpDocument {
            states: d.states,
            actions: d.actions,
            horizon: d.horizon,
            transition,
            mean_cost,
            cost_noise: self.cost_noise,
            initial_state: self.initial.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MdpSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let doc = MdpDocument::deserialize(deserializer)?;
        let dims = Dims {
            states: doc.states,
            actions: doc.actions,
            horizon: doc.horizon,
        };
        let shape_err = |what: &str| D::Error::custom(format!("{what} does not match S, A, H"));
        if doc.transition.len() != dims.horizon || doc.mean_cost.len() != dims.horizon {
            return Err(shape_err("outer dimension"));
        }
        let mut transition = Vec::with_capacity(dims.len_hsas());
        for by_s in &doc.transition {
            if by_s.len() != dims.states {
                return Err(shape_err("transition"));
            }
            for by_a in by_s {
                if by_a.len() != dims.actions {
                    return Err(shape_err("transition"));
                }
                for row in by_a {
                    if row.len() != dims.states {
                        return Err(shape_err("transition"));
                    }
                    transition.extend_from_slice(row);
                }
            }
        }
        let mut mean_cost = Vec::with_capacity(dims.len_hsa());
        for by_s in &doc.mean_cost {
            if by_s.len() != dims.states {
                return Err(shape_err("mean_cost"));
            }
            for row in by_s {
                if row.len() != dims.actions {
                    return Err(shape_err("mean_cost"));
                }
                mean_cost.extend_from_slice(row);
            }
        }
        MdpSpec::new(dims, transition, mean_cost, doc.cost_noise, doc.initial_state)
            .map_err(D::Error::custom)
    }
}

/// One transition of an episode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub state: usize,
    pub action: usize,
    pub cost: f64,
    pub next_state: usize,
}

/// A full episode of exactly `H` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub episode: usize,
    pub steps: Vec<Step>,
}

/// Draws an index from a probability row by inverse-CDF.
pub(crate) fn sample_categorical<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    // u landed in the rounding slack above the cumulative sum
    last_positive
}

/// Rolls out one episode of `policy` in `mdp`.
pub fn sample_episode<R: Rng + ?Sized>(
    mdp: &MdpSpec,
    policy: &PolicyTable,
    episode: usize,
    rng: &mut R,
) -> Result<Trajectory> {
    mdp.dims().ensure_same(&policy.dims(), "policy vs MDP")?;
    let mut state = match &mdp.initial {
        InitialState::Fixed(s) => *s,
        InitialState::Distribution(p) => sample_categorical(p, rng),
    };
    let mut steps = Vec::with_capacity(mdp.horizon());
    for h in 0..mdp.horizon() {
        let action = sample_categorical(policy.row(h, state), rng);
        let mean = mdp.mean_cost(h, state, action);
        let cost = match mdp.cost_noise {
            CostNoise::Deterministic => mean,
            CostNoise::Bernoulli => {
                if rng.random::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
        };
        let next_state = sample_categorical(mdp.transition_row(h, state, action), rng);
        steps.push(Step {
            state,
            action,
            cost,
            next_state,
        });
        state = next_state;
    }
    Ok(Trajectory { episode, steps })
}

/// Random MDP: each row is supported on `branching` uniformly chosen states
/// with symmetric Dirichlet(1) weights; mean costs are uniform on `[0, 1]`.
pub fn make_random_mdp(
    states: usize,
    actions: usize,
    horizon: usize,
    seed: u64,
    branching: usize,
) -> Result<MdpSpec> {
    let dims = Dims::new(states, actions, horizon)?;
    if branching == 0 || branching > states {
        return Err(Error::InvalidArgument(format!(
            "branching factor {branching} must lie in 1..={states}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transition = vec![0.0; dims.len_hsas()];
    let mut mean_cost = vec![0.0; dims.len_hsa()];
    for h in 0..horizon {
        for s in 0..states {
            for a in 0..actions {
                let support = rand::seq::index::sample(&mut rng, states, branching);
                let weights: Vec<f64> = (0..branching).map(|_| Exp1.sample(&mut rng)).collect();
                let total: f64 = weights.iter().sum();
                let start = dims.row(h, s, a);
                for (next, w) in support.iter().zip(&weights) {
                    transition[start + next] = w / total;
                }
                mean_cost[dims.hsa(h, s, a)] = rng.random::<f64>();
            }
        }
    }
    MdpSpec::new(
        dims,
        transition,
        mean_cost,
        CostNoise::Bernoulli,
        InitialState::Fixed(0),
    )
}

/// The two-state, two-action, two-step random MDP (seed 1, full support) used
/// throughout the tests.
pub fn tiny_mdp() -> MdpSpec {
    make_random_mdp(2, 2, 2, 1, 2).expect("fixed parameters are valid")
}

/// Action indices of the RiverSwim chain.
pub const RIVERSWIM_LEFT: usize = 0;
pub const RIVERSWIM_RIGHT: usize = 1;

/// RiverSwim chain in the cost convention `cost = 1 - reward`.
///
/// Swimming left is deterministic. Swimming right succeeds with probability
/// 0.6 from the left bank, 0.35 mid-river (0.05 drift back), and at the right
/// bank stays with probability 0.6. The only rewards are 0.005 for swimming
/// left at state 0 and 1 for swimming right at state `S - 1`.
pub fn make_riverswim(states: usize, horizon: usize) -> Result<MdpSpec> {
    if states < 2 {
        return Err(Error::InvalidArgument(format!(
            "RiverSwim needs at least 2 states, got {states}"
        )));
    }
    let dims = Dims::new(states, 2, horizon)?;
    let last = states - 1;
    let mut transition = vec![0.0; dims.len_hsas()];
    let mut mean_cost = vec![1.0; dims.len_hsa()];
    for h in 0..horizon {
        for s in 0..states {
            let left = dims.row(h, s, RIVERSWIM_LEFT);
            transition[left + s.saturating_sub(1)] = 1.0;

            let right = dims.row(h, s, RIVERSWIM_RIGHT);
            if s == 0 {
                transition[right] = 0.4;
                transition[right + 1] = 0.6;
            } else if s == last {
                transition[right + s] = 0.6;
                transition[right + s - 1] = 0.4;
            } else {
                transition[right + s - 1] = 0.05;
                transition[right + s] = 0.6;
                transition[right + s + 1] = 0.35;
            }
        }
        mean_cost[dims.hsa(h, 0, RIVERSWIM_LEFT)] = 1.0 - 0.005;
        mean_cost[dims.hsa(h, last, RIVERSWIM_RIGHT)] = 0.0;
    }
    MdpSpec::new(
        dims,
        transition,
        mean_cost,
        CostNoise::Bernoulli,
        InitialState::Fixed(0),
    )
}
