//! C ABI for the `rposat` library.
//!
//! Every function returns an [`RposatStatus`]; results come back through out
//! pointers. On failure, [`rposat_last_error`] returns a message describing
//! the most recent error on the calling thread. Handles are opaque and must
//! be released with the matching `*_free` function. Strings handed out by the
//! library are released with [`rposat_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rposat::agent::{Agent, AgentConfig, AgentKind};
use rposat::diagnostics::observe_episode;
use rposat::dp::GroundTruth;
use rposat::experiment::{run_batch, ExperimentConfig};
use rposat::mdp::{make_random_mdp, make_riverswim, MdpSpec};
use rposat::policy::project_simplex;
use rposat::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RposatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Io = 4,
    Dimension = 5,
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RposatAgentKind {
    RpoSat = 0,
    PomdKl = 1,
    GreedyUcb = 2,
    FixedOptimal = 3,
    FixedUniform = 4,
}

impl From<RposatAgentKind> for AgentKind {
    fn from(k: RposatAgentKind) -> Self {
        match k {
            RposatAgentKind::RpoSat => AgentKind::RpoSat,
            RposatAgentKind::PomdKl => AgentKind::PomdKl,
            RposatAgentKind::GreedyUcb => AgentKind::GreedyUcb,
            RposatAgentKind::FixedOptimal => AgentKind::FixedOptimal,
            RposatAgentKind::FixedUniform => AgentKind::FixedUniform,
        }
    }
}

/// Ground-truth measurements of one episode, summed over steps where noted.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RposatEpisodeSummary {
    /// One-based episode index.
    pub k: u64,
    /// Sum of realized costs.
    pub realized_cost: f64,
    /// `V^{π^k}_1(s_1)`.
    pub policy_value: f64,
    /// `V*_1(s_1)`.
    pub optimal_value: f64,
    /// Learner's `V^k_1(s_1)`.
    pub estimated_value: f64,
    pub bonus_sum: f64,
    pub optimism_violations: u64,
    pub visited_cells: u64,
}

/// Opaque MDP handle.
pub struct RposatMdp {
    inner: MdpSpec,
}

/// Opaque agent handle; owns a copy of its environment.
pub struct RposatAgent {
    agent: Agent,
    mdp: MdpSpec,
    truth: GroundTruth,
    cumulative_regret: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: RposatStatus,
    message: String,
}

impl Failure {
    fn new(status: RposatStatus, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Self::new(RposatStatus::NullPointer, format!("`{what}` is null"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Dimension(_) => RposatStatus::Dimension,
            Error::Config { .. } | Error::Json(_) => RposatStatus::Config,
            Error::Io { .. } | Error::Csv(_) => RposatStatus::Io,
            Error::InvalidMdp(_)
            | Error::InvalidArgument(_)
            | Error::DegenerateSupport
            | Error::TooShort { .. }
            | Error::MissingData(_)
            | Error::Mismatch(_) => RposatStatus::InvalidArgument,
        };
        Self::new(status, e.to_string())
    }
}

fn set_last_error(message: &str) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RposatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            RposatStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            RposatStatus::Internal
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(RposatStatus::InvalidArgument, format!("`{what}` is not UTF-8")))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::new(RposatStatus::Internal, "string contains NUL"))
}

fn box_mdp(out: *mut *mut RposatMdp, mdp: MdpSpec) -> Result<(), Failure> {
    let slot = unsafe { out_ref(out, "out")? };
    *slot = Box::into_raw(Box::new(RposatMdp { inner: mdp }));
    Ok(())
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn rposat_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by the library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn rposat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// RiverSwim chain with `states` states and horizon `horizon`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_riverswim(states: usize, horizon: usize, out: *mut *mut RposatMdp) -> RposatStatus {
    guard(|| box_mdp(out, make_riverswim(states, horizon)?))
}

/// Random MDP whose transition rows are supported on `branching` states.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_random(
    states: usize,
    actions: usize,
    horizon: usize,
    seed: u64,
    branching: usize,
    out: *mut *mut RposatMdp,
) -> RposatStatus {
    guard(|| box_mdp(out, make_random_mdp(states, actions, horizon, seed, branching)?))
}

/// Parses an MDP from its JSON encoding.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_from_json(json: *const c_char, out: *mut *mut RposatMdp) -> RposatStatus {
    guard(|| box_mdp(out, MdpSpec::from_json(str_arg(json, "json")?)?))
}

/// JSON encoding of `mdp`; release with [`rposat_string_free`].
///
/// # Safety
/// `mdp` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_to_json(mdp: *const RposatMdp, out: *mut *mut c_char) -> RposatStatus {
    guard(|| {
        let mdp = mdp.as_ref().ok_or_else(|| Failure::null("mdp"))?;
        let slot = out_ref(out, "out")?;
        *slot = into_c_string(mdp.inner.to_json()?)?;
        Ok(())
    })
}

/// # Safety
/// `mdp` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_dims(
    mdp: *const RposatMdp,
    states: *mut usize,
    actions: *mut usize,
    horizon: *mut usize,
) -> RposatStatus {
    guard(|| {
        let mdp = mdp.as_ref().ok_or_else(|| Failure::null("mdp"))?;
        let d = mdp.inner.dims();
        *out_ref(states, "states")? = d.states;
        *out_ref(actions, "actions")? = d.actions;
        *out_ref(horizon, "horizon")? = d.horizon;
        Ok(())
    })
}

/// `V*_1` averaged over the initial distribution.
///
/// # Safety
/// `mdp` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_optimal_value(mdp: *const RposatMdp, out: *mut f64) -> RposatStatus {
    guard(|| {
        let mdp = mdp.as_ref().ok_or_else(|| Failure::null("mdp"))?;
        let truth = GroundTruth::new(&mdp.inner);
        *out_ref(out, "out")? = truth.optimal.initial_value(&mdp.inner);
        Ok(())
    })
}

/// # Safety
/// `mdp` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rposat_mdp_free(mdp: *mut RposatMdp) {
    if !mdp.is_null() {
        drop(Box::from_raw(mdp));
    }
}

/// Euclidean projection of `x[0..len]` onto the probability simplex, written
/// to `out[0..len]`. `x` and `out` may alias.
///
/// # Safety
/// Both pointers must address `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rposat_project_simplex(x: *const f64, len: usize, out: *mut f64) -> RposatStatus {
    guard(|| {
        if x.is_null() {
            return Err(Failure::null("x"));
        }
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let input = std::slice::from_raw_parts(x, len).to_vec();
        let p = project_simplex(&input)?;
        ptr::copy_nonoverlapping(p.as_ptr(), out, len);
        Ok(())
    })
}

/// Creates an agent with the standard configuration for `kind`. The agent
/// keeps its own copy of `mdp`.
///
/// # Safety
/// `mdp` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_agent_new(
    mdp: *const RposatMdp,
    kind: RposatAgentKind,
    episodes: usize,
    delta: f64,
    bonus_scale: f64,
    seed: u64,
    out: *mut *mut RposatAgent,
) -> RposatStatus {
    guard(|| {
        let mdp = mdp.as_ref().ok_or_else(|| Failure::null("mdp"))?;
        let slot = out_ref(out, "out")?;
        let cfg = AgentConfig::new(kind.into(), mdp.inner.dims(), episodes, delta, bonus_scale)?;
        let agent = Agent::new(&mdp.inner, cfg, seed)?;
        *slot = Box::into_raw(Box::new(RposatAgent {
            agent,
            truth: GroundTruth::new(&mdp.inner),
            mdp: mdp.inner.clone(),
            cumulative_regret: 0.0,
        }));
        Ok(())
    })
}

/// Runs one episode and reports its measurements.
///
/// # Safety
/// `agent` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_agent_step(agent: *mut RposatAgent, out: *mut RposatEpisodeSummary) -> RposatStatus {
    guard(|| {
        let a = agent.as_mut().ok_or_else(|| Failure::null("agent"))?;
        let slot = out_ref(out, "out")?;
        let outcome = a.agent.run_episode(&a.mdp)?;
        let rec = observe_episode(&a.mdp, &a.truth, &a.agent, &outcome)?;
        a.cumulative_regret += rec.v_pi[0] - rec.v_star[0];
        *slot = RposatEpisodeSummary {
            k: outcome.k as u64,
            realized_cost: outcome.trajectory.steps.iter().map(|s| s.cost).sum(),
            policy_value: rec.v_pi[0],
            optimal_value: rec.v_star[0],
            estimated_value: rec.v_est[0],
            bonus_sum: rec.bonus_sum,
            optimism_violations: rec.optimism_violations,
            visited_cells: rec.visited_cells,
        };
        Ok(())
    })
}

/// `Σ_k (V^{π^k}_1 - V*_1)(s^k_1)` over the episodes run so far.
///
/// # Safety
/// `agent` must be a live handle; `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_agent_cumulative_regret(agent: *const RposatAgent, out: *mut f64) -> RposatStatus {
    guard(|| {
        let a = agent.as_ref().ok_or_else(|| Failure::null("agent"))?;
        *out_ref(out, "out")? = a.cumulative_regret;
        Ok(())
    })
}

/// Copies the current policy, laid out as `[h][s][a]`, into `out`. `len` must
/// equal `H * S * A`.
///
/// # Safety
/// `agent` must be a live handle; `out` must address `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn rposat_agent_policy(agent: *const RposatAgent, out: *mut f64, len: usize) -> RposatStatus {
    guard(|| {
        let a = agent.as_ref().ok_or_else(|| Failure::null("agent"))?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let flat = a.agent.policy().as_flat();
        if flat.len() != len {
            return Err(Failure::new(
                RposatStatus::Dimension,
                format!("policy has {} entries, buffer has {len}", flat.len()),
            ));
        }
        ptr::copy_nonoverlapping(flat.as_ptr(), out, len);
        Ok(())
    })
}

/// # Safety
/// `agent` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rposat_agent_free(agent: *mut RposatAgent) {
    if !agent.is_null() {
        drop(Box::from_raw(agent));
    }
}

/// Runs a batch described by an experiment config (JSON) and returns the
/// index document as JSON; release it with [`rposat_string_free`].
///
/// # Safety
/// `config_json` must be a NUL-terminated string; `index_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rposat_run_batch(config_json: *const c_char, index_json: *mut *mut c_char) -> RposatStatus {
    guard(|| {
        let cfg = ExperimentConfig::from_json(str_arg(config_json, "config_json")?)?;
        let slot = out_ref(index_json, "index_json")?;
        let index = run_batch(&cfg)?;
        *slot = into_c_string(serde_json::to_string(&index).map_err(Error::from)?)?;
        Ok(())
    })
}
