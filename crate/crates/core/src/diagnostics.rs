//! Measurable versions of the regret analysis: per-step regret and SAT sums,
//! the regret decomposition, failure-event monitoring and the martingale
//! envelope.

use serde::{Deserialize, Serialize};

use crate::agent::{Agent, AgentConfig, EpisodeOutcome, ValueTables};
use crate::bonus::BonusConfig;
use crate::dims::{dot, Dims};
use crate::dp::{evaluate_policy, occupancy_from, GroundTruth};
use crate::error::{Error, Result};
use crate::mdp::{MdpSpec, Trajectory};
use crate::model::EmpiricalModel;
use crate::policy::PolicyTable;

/// Slack for floating-point noise in the optimism checks.
pub const OPTIMISM_TOL: f64 = 1e-10;

/// Minimum log length for curve fitting.
pub const MIN_CURVE_EPISODES: usize = 100;

/// Which failure-event classes were violated in one check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureFlags {
    pub f1: bool,
    pub f2: bool,
    pub f3: bool,
    pub f4: bool,
}

impl FailureFlags {
    pub fn any_f123(&self) -> bool {
        self.f1 || self.f2 || self.f3
    }
}

/// Ground-truth measurements of one episode. Vectors are indexed by step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub k: usize,
    /// `V^{π^k}_h(s_h^k)`.
    pub v_pi: Vec<f64>,
    /// `V^k_h(s_h^k)`.
    pub v_est: Vec<f64>,
    /// `V*_h(s_h^k)`.
    pub v_star: Vec<f64>,
    /// `Σ_h b^k_h(s_h^k, a_h^k)`.
    pub bonus_sum: f64,
    /// Visited pairs checked for optimism this episode.
    pub visited_cells: u64,
    /// Visited pairs with `Q^k - c - P V^k_{h+1} > 0`.
    pub optimism_violations: u64,
    /// Visited pairs with `Q^k - c - P V^k_{h+1} < -2b`.
    pub optimism_lower_violations: u64,
    /// `ζ¹_{k,h}`.
    pub zeta1: Vec<f64>,
    /// `ζ²_{k,h}`.
    pub zeta2: Vec<f64>,
    pub failures: Option<FailureFlags>,
}

/// Per-episode records of one run, plus what is needed to interpret them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretLog {
    pub dims: Dims,
    pub stride: usize,
    pub episodes: usize,
    pub delta: f64,
    pub records: Vec<EpisodeRecord>,
}

impl RegretLog {
    pub fn new(dims: Dims, config: &AgentConfig) -> Self {
        Self {
            dims,
            stride: config.log_stride,
            episodes: config.episodes,
            delta: config.bonus.delta,
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: EpisodeRecord) {
        self.records.push(record);
    }

    /// Cumulative `Regret_h` after each logged episode. With a stride `m > 1`
    /// every logged increment stands in for `m` episodes.
    pub fn regret_curve(&self, h: usize) -> Vec<f64> {
        self.cumulative(|r| (r.v_pi[h] - r.v_star[h]).max(0.0))
    }

    /// Cumulative SAT sum `Σ |V^k_h - V*_h|` at visited states.
    pub fn sat_curve(&self, h: usize) -> Vec<f64> {
        self.cumulative(|r| (r.v_est[h] - r.v_star[h]).abs())
    }

    pub fn bonus_curve(&self) -> Vec<f64> {
        self.cumulative(|r| r.bonus_sum)
    }

    fn cumulative(&self, f: impl Fn(&EpisodeRecord) -> f64) -> Vec<f64> {
        let w = self.stride as f64;
        let mut acc = 0.0;
        self.records
            .iter()
            .map(|r| {
                acc += w * f(r);
                acc
            })
            .collect()
    }

    pub fn episode_indices(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.k).collect()
    }

    /// Final cumulative `Regret_1`.
    pub fn final_regret(&self) -> f64 {
        self.regret_curve(0).last().copied().unwrap_or(0.0)
    }

    /// Fraction of visited-pair checks that broke `Q - c - P V ≤ 0`.
    pub fn optimism_violation_rate(&self) -> f64 {
        let cells: u64 = self.records.iter().map(|r| r.visited_cells).sum();
        let bad: u64 = self.records.iter().map(|r| r.optimism_violations).sum();
        if cells == 0 {
            0.0
        } else {
            bad as f64 / cells as f64
        }
    }

    /// Writes one row per logged episode:
    /// `k, regret_1..regret_H, sat_1..sat_H, bonus_sum, violations`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let h = self.dims.horizon;
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string()];
        header.extend((1..=h).map(|i| format!("regret_{i}")));
        header.extend((1..=h).map(|i| format!("sat_{i}")));
        header.push("bonus_sum".into());
        header.push("violations".into());
        w.write_record(&header)?;
        let regret: Vec<Vec<f64>> = (0..h).map(|i| self.regret_curve(i)).collect();
        let sat: Vec<Vec<f64>> = (0..h).map(|i| self.sat_curve(i)).collect();
        for (row, rec) in self.records.iter().enumerate() {
            let mut fields = vec![rec.k.to_string()];
            fields.extend(regret.iter().map(|c| c[row].to_string()));
            fields.extend(sat.iter().map(|c| c[row].to_string()));
            fields.push(rec.bonus_sum.to_string());
            fields.push(rec.optimism_violations.to_string());
            w.write_record(&fields)?;
        }
        w.flush().map_err(|e| Error::io("<regret csv>", e))?;
        Ok(())
    }
}

/// Measures one finished episode against the true model.
///
/// Must be called right after [`Agent::run_episode`], while the agent's tables
/// still hold `Q^k` and `V^k`.
pub fn observe_episode(
    mdp: &MdpSpec,
    truth: &GroundTruth,
    agent: &Agent,
    outcome: &EpisodeOutcome,
) -> Result<EpisodeRecord> {
    let d = mdp.dims();
    let tables = agent.tables();
    let on_policy = evaluate_policy(mdp, &outcome.rollout_policy)?;
    let steps = &outcome.trajectory.steps;

    let mut v_pi = Vec::with_capacity(d.horizon);
    let mut v_est = Vec::with_capacity(d.horizon);
    let mut v_star = Vec::with_capacity(d.horizon);
    let mut zeta1 = Vec::with_capacity(d.horizon);
    let mut zeta2 = Vec::with_capacity(d.horizon);
    let mut bonus_sum = 0.0;
    for (h, st) in steps.iter().enumerate() {
        let (s, a, s_next) = (st.state, st.action, st.next_state);
        v_pi.push(on_policy.v(h, s));
        v_est.push(tables.v(h, s));
        v_star.push(truth.optimal.v(h, s));
        bonus_sum += tables.bonus(h, s, a);
        zeta1.push((tables.v(h, s) - on_policy.v(h, s)) - (tables.q(h, s, a) - on_policy.q(h, s, a)));
        let p = mdp.transition_row(h, s, a);
        let expected = dot(p, tables.v_row(h + 1)) - dot(p, on_policy.v_row(h + 1));
        let realized = tables.v(h + 1, s_next) - on_policy.v(h + 1, s_next);
        zeta2.push(expected - realized);
    }

    let (visited_cells, optimism_violations, optimism_lower_violations) =
        optimism_check(mdp, agent.model(), tables);
    let failures = if agent.config().monitor_failures {
        Some(failure_event_monitor(mdp, agent.model(), truth, &agent.config().bonus).flags())
    } else {
        None
    };
    Ok(EpisodeRecord {
        k: outcome.k,
        v_pi,
        v_est,
        v_star,
        bonus_sum,
        visited_cells,
        optimism_violations,
        optimism_lower_violations,
        zeta1,
        zeta2,
        failures,
    })
}

/// Checks `-2b ≤ Q^k - c - P V^k_{h+1} ≤ 0` at every visited pair.
///
/// Returns `(visited, upper violations, lower violations)`.
pub fn optimism_check(mdp: &MdpSpec, model: &EmpiricalModel, tables: &ValueTables) -> (u64, u64, u64) {
    let d = mdp.dims();
    let (mut visited, mut upper, mut lower) = (0, 0, 0);
    for h in 0..d.horizon {
        let v_next = tables.v_row(h + 1);
        for s in 0..d.states {
            for a in 0..d.actions {
                if model.n_sa(h, s, a) == 0 {
                    continue;
                }
                visited += 1;
                let gap = optimism_gap(mdp, tables, v_next, h, s, a);
                if gap > OPTIMISM_TOL {
                    upper += 1;
                }
                if gap < -2.0 * tables.bonus(h, s, a) - OPTIMISM_TOL {
                    lower += 1;
                }
            }
        }
    }
    (visited, upper, lower)
}

#[inline]
fn optimism_gap(mdp: &MdpSpec, tables: &ValueTables, v_next: &[f64], h: usize, s: usize, a: usize) -> f64 {
    tables.q(h, s, a) - mdp.mean_cost(h, s, a) - dot(mdp.transition_row(h, s, a), v_next)
}

/// Least-squares slope of `ln y` against `ln x`, over points with `y > 0`.
/// Returns 0 when fewer than two such points exist (a flat curve).
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(&a, &b)| a > 0.0 && b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return 0.0;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Fraction of the run over which slopes are fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeWindow {
    pub start_fraction: f64,
    pub end_fraction: f64,
}

impl Default for SlopeWindow {
    fn default() -> Self {
        Self {
            start_fraction: 0.25,
            end_fraction: 1.0,
        }
    }
}

impl SlopeWindow {
    /// Slope of `curve` (aligned with episode indices `ks`) over the window.
    pub fn slope(&self, ks: &[usize], curve: &[f64]) -> f64 {
        let last = ks.last().copied().unwrap_or(0) as f64;
        let lo = self.start_fraction * last;
        let hi = self.end_fraction * last;
        let (x, y): (Vec<f64>, Vec<f64>) = ks
            .iter()
            .zip(curve)
            .filter(|(&k, _)| (k as f64) >= lo && (k as f64) <= hi)
            .map(|(&k, &c)| (k as f64, c))
            .unzip();
        fit_loglog_slope(&x, &y)
    }
}

/// Per-step cumulative curves and their fitted slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretCurves {
    pub episodes: Vec<usize>,
    pub regret: Vec<Vec<f64>>,
    pub sat: Vec<Vec<f64>>,
    pub regret_slopes: Vec<f64>,
    pub sat_slopes: Vec<f64>,
}

pub fn regret_curves(log: &RegretLog, window: SlopeWindow) -> Result<RegretCurves> {
    if log.records.len() < MIN_CURVE_EPISODES {
        return Err(Error::TooShort {
            needed: MIN_CURVE_EPISODES,
            got: log.records.len(),
        });
    }
    let ks = log.episode_indices();
    let h = log.dims.horizon;
    let regret: Vec<Vec<f64>> = (0..h).map(|i| log.regret_curve(i)).collect();
    let sat: Vec<Vec<f64>> = (0..h).map(|i| log.sat_curve(i)).collect();
    let regret_slopes = regret.iter().map(|c| window.slope(&ks, c)).collect();
    let sat_slopes = sat.iter().map(|c| window.slope(&ks, c)).collect();
    Ok(RegretCurves {
        episodes: ks,
        regret,
        sat,
        regret_slopes,
        sat_slopes,
    })
}

/// Snapshot of one episode sufficient for the regret decomposition.
#[derive(Debug, Clone)]
pub struct EpisodeTrace {
    pub trajectory: Trajectory,
    pub rollout_policy: PolicyTable,
    pub tables: ValueTables,
}

impl EpisodeTrace {
    pub fn capture(agent: &Agent, outcome: &EpisodeOutcome) -> Self {
        Self {
            trajectory: outcome.trajectory.clone(),
            rollout_policy: outcome.rollout_policy.clone(),
            tables: agent.tables().clone(),
        }
    }
}

/// The four terms of the regret decomposition at step `h'` after `K'`
/// episodes, and the directly computed regret they should sum to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `Σ_k Σ_{h≥h'} [c + P V^k_{h+1} - Q^k](s_h^k, a_h^k)`.
    pub i1: f64,
    /// `-Σ_k Σ_{h≥h'} (ζ¹ + ζ²)`.
    pub i2: f64,
    /// `Σ_k Σ_{h≥h'} E_{π*}[<Q^k_h(s,·), π^k_h(·|s) - π*_h(·|s)>]`.
    pub ii1: f64,
    /// `Σ_k Σ_{h≥h'} E_{π*}[Q^k - c - P V^k_{h+1}]`.
    pub ii2: f64,
    /// `Σ_k (V^{π^k}_{h'} - V*_{h'})(s_{h'}^k)`.
    pub direct_regret: f64,
}

impl Decomposition {
    pub fn reconstruction_error(&self) -> f64 {
        (self.i1 + self.i2 + self.ii1 + self.ii2 - self.direct_regret).abs()
    }
}

/// Evaluates the decomposition at step `step` (zero-based) over the first
/// `traces.len()` episodes. Expectations under `π*` are exact, via occupancy.
pub fn decomposition_report(mdp: &MdpSpec, traces: &[EpisodeTrace], step: usize) -> Result<Decomposition> {
    let d = mdp.dims();
    if traces.is_empty() {
        return Err(Error::MissingData("no episode traces".into()));
    }
    if step >= d.horizon {
        return Err(Error::InvalidArgument(format!("step {step} out of range")));
    }
    let truth = GroundTruth::new(mdp);
    let pi_star = &truth.optimal_policy;
    let mut out = Decomposition {
        i1: 0.0,
        i2: 0.0,
        ii1: 0.0,
        ii2: 0.0,
        direct_regret: 0.0,
    };
    for trace in traces {
        let t = &trace.tables;
        if trace.trajectory.steps.len() != d.horizon {
            return Err(Error::MissingData("trace trajectory has wrong length".into()));
        }
        d.ensure_same(&t.dims(), "trace tables")?;
        let on_policy = evaluate_policy(mdp, &trace.rollout_policy)?;
        let start = trace.trajectory.steps[step].state;
        out.direct_regret += on_policy.v(step, start) - truth.optimal.v(step, start);

        for h in step..d.horizon {
            let st = trace.trajectory.steps[h];
            let (s, a) = (st.state, st.action);
            let p = mdp.transition_row(h, s, a);
            out.i1 += mdp.mean_cost(h, s, a) + dot(p, t.v_row(h + 1)) - t.q(h, s, a);
            let z1 = (t.v(h, s) - on_policy.v(h, s)) - (t.q(h, s, a) - on_policy.q(h, s, a));
            let z2 = (dot(p, t.v_row(h + 1)) - dot(p, on_policy.v_row(h + 1)))
                - (t.v(h + 1, st.next_state) - on_policy.v(h + 1, st.next_state));
            out.i2 -= z1 + z2;
        }

        let mut point = vec![0.0; d.states];
        point[start] = 1.0;
        let occ = occupancy_from(mdp, pi_star, step, &point)?;
        for (offset, dist) in occ.iter().enumerate() {
            let h = step + offset;
            for (s, &w) in dist.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let q = t.q_row(h, s);
                let star = pi_star.row(h, s);
                let gap: f64 = q
                    .iter()
                    .zip(trace.rollout_policy.row(h, s).iter().zip(star))
                    .map(|(qa, (pk, ps))| qa * (pk - ps))
                    .sum();
                out.ii1 += w * gap;
                for (a, &pa) in star.iter().enumerate() {
                    if pa == 0.0 {
                        continue;
                    }
                    let slack = t.q(h, s, a)
                        - mdp.mean_cost(h, s, a)
                        - dot(mdp.transition_row(h, s, a), t.v_row(h + 1));
                    out.ii2 += w * pa * slack;
                }
            }
        }
    }
    Ok(out)
}

/// Violation counts of the concentration events at one point in time.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    /// Visited `(h, s, a)` pairs checked by F¹–F³.
    pub cells_checked: u64,
    pub f1_cells: u64,
    pub f2_cells: u64,
    pub f3_cells: u64,
    /// `(h, s, a, s')` entries with `n ≥ 2` checked by F⁴.
    pub f4_checked: u64,
    pub f4_cells: u64,
}

impl FailureReport {
    pub fn flags(&self) -> FailureFlags {
        FailureFlags {
            f1: self.f1_cells > 0,
            f2: self.f2_cells > 0,
            f3: self.f3_cells > 0,
            f4: self.f4_cells > 0,
        }
    }

    pub fn fraction(&self, count: u64, of: u64) -> f64 {
        if of == 0 {
            0.0
        } else {
            count as f64 / of as f64
        }
    }
}

/// Checks the cost (F¹), ℓ1 transition (F²), optimal-value backup (F³) and
/// per-entry Bernstein (F⁴) events at every visited pair.
pub fn failure_event_monitor(
    mdp: &MdpSpec,
    model: &EmpiricalModel,
    truth: &GroundTruth,
    cfg: &BonusConfig,
) -> FailureReport {
    let d = mdp.dims();
    let (s_f, h_f) = (d.states as f64, d.horizon as f64);
    let lt2 = cfg.log_t2();
    let lt3 = cfg.log_t3();
    let lk = cfg.log_k();
    let mut report = FailureReport::default();
    for h in 0..d.horizon {
        let v_star_next = truth.optimal.v_row(h + 1);
        for s in 0..d.states {
            for a in 0..d.actions {
                let (Some(p_hat), Some(c_bar)) = (model.transition_row(h, s, a), model.mean_cost(h, s, a))
                else {
                    continue;
                };
                let n_int = model.n_sa(h, s, a);
                let n = n_int as f64;
                let p = mdp.transition_row(h, s, a);
                report.cells_checked += 1;

                if (mdp.mean_cost(h, s, a) - c_bar).abs() >= (2.0 * lt2 / n).sqrt() {
                    report.f1_cells += 1;
                }
                let l1: f64 = p.iter().zip(p_hat).map(|(x, y)| (x - y).abs()).sum();
                if l1 >= (4.0 * s_f * lt3 / n).sqrt() {
                    report.f2_cells += 1;
                }
                let backup = dot(p, v_star_next) - dot(p_hat, v_star_next);
                if backup.abs() >= h_f * (4.0 * lt3 / n).sqrt() + 2.0 * h_f * lt2 / (3.0 * n) {
                    report.f3_cells += 1;
                }
                if n_int >= 2 {
                    for (&pt, &pe) in p.iter().zip(p_hat) {
                        report.f4_checked += 1;
                        let width = (2.0 * pe * (1.0 - pe) * lk / (n - 1.0)).sqrt() + 7.0 * lk / (3.0 * n);
                        if (pe - pt).abs() >= width {
                            report.f4_cells += 1;
                        }
                    }
                }
            }
        }
    }
    report
}

/// Partial sums of `Σ_{h'≥h} (ζ¹ + ζ²)` checked against the envelope
/// `sqrt(16 H³ K ln(2H/δ'))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleReport {
    pub envelope: f64,
    /// `partial[h][i]` is the sum over the first `i + 1` logged episodes.
    pub partial: Vec<Vec<f64>>,
    pub max_abs: Vec<f64>,
    /// First episode at which the envelope was reached, per step.
    pub violated_at: Vec<Option<usize>>,
}

impl MartingaleReport {
    pub fn any_violation(&self) -> bool {
        self.violated_at.iter().any(Option::is_some)
    }
}

pub fn martingale_sums(log: &RegretLog) -> Result<MartingaleReport> {
    if log.stride != 1 {
        return Err(Error::MissingData(
            "martingale sums need every episode (log stride 1)".into(),
        ));
    }
    let h_count = log.dims.horizon;
    if log.records.iter().any(|r| r.zeta1.len() != h_count || r.zeta2.len() != h_count) {
        return Err(Error::MissingData("records lack per-step ζ values".into()));
    }
    let hf = h_count as f64;
    let delta_prime = log.delta / 5.0;
    let envelope = (16.0 * hf.powi(3) * log.episodes as f64 * (2.0 * hf / delta_prime).ln()).sqrt();
    let mut partial = vec![Vec::with_capacity(log.records.len()); h_count];
    let mut max_abs = vec![0.0f64; h_count];
    let mut violated_at = vec![None; h_count];
    let mut acc = vec![0.0; h_count];
    for rec in &log.records {
        let mut tail = 0.0;
        for h in (0..h_count).rev() {
            tail += rec.zeta1[h] + rec.zeta2[h];
            acc[h] += tail;
            partial[h].push(acc[h]);
            max_abs[h] = max_abs[h].max(acc[h].abs());
            if violated_at[h].is_none() && acc[h].abs() >= envelope {
                violated_at[h] = Some(rec.k);
            }
        }
    }
    Ok(MartingaleReport {
        envelope,
        partial,
        max_abs,
        violated_at,
    })
}

/// Per-run summary written next to the episode CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub episodes_logged: usize,
    pub final_regret: Vec<f64>,
    pub final_sat: Vec<f64>,
    pub regret_slopes: Option<Vec<f64>>,
    pub sat_slopes: Option<Vec<f64>>,
    pub total_bonus: f64,
    pub optimism_violation_rate: f64,
    pub optimism_lower_violations: u64,
    /// Logged episodes in which each failure class was observed.
    pub failure_episodes: Option<FailureCounts>,
    pub martingale_violation: Option<bool>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub f1: u64,
    pub f2: u64,
    pub f3: u64,
    pub f4: u64,
    pub any_f123: u64,
}

impl RunSummary {
    pub fn from_log(log: &RegretLog, window: SlopeWindow) -> Self {
        let h = log.dims.horizon;
        let last = |c: Vec<f64>| c.last().copied().unwrap_or(0.0);
        let curves = regret_curves(log, window).ok();
        let failure_episodes = if log.records.iter().all(|r| r.failures.is_some()) && !log.records.is_empty() {
            let mut c = FailureCounts::default();
            for f in log.records.iter().filter_map(|r| r.failures) {
                c.f1 += f.f1 as u64;
                c.f2 += f.f2 as u64;
                c.f3 += f.f3 as u64;
                c.f4 += f.f4 as u64;
                c.any_f123 += f.any_f123() as u64;
            }
            Some(c)
        } else {
            None
        };
        Self {
            episodes_logged: log.records.len(),
            final_regret: (0..h).map(|i| last(log.regret_curve(i))).collect(),
            final_sat: (0..h).map(|i| last(log.sat_curve(i))).collect(),
            regret_slopes: curves.as_ref().map(|c| c.regret_slopes.clone()),
            sat_slopes: curves.as_ref().map(|c| c.sat_slopes.clone()),
            total_bonus: last(log.bonus_curve()),
            optimism_violation_rate: log.optimism_violation_rate(),
            optimism_lower_violations: log.records.iter().map(|r| r.optimism_lower_violations).sum(),
            failure_episodes,
            martingale_violation: martingale_sums(log).ok().map(|m| m.any_violation()),
        }
    }
}
