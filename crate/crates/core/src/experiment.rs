//! Batch experiments: configuration, seeded fan-out over (agent, seed) pairs,
//! on-disk artifacts and cross-run comparison.
//!
//! Layout of an output directory:
//!
//! ```text
//! a{agent_index}_{agent}_s{seed}.csv           per-episode curves
//! a{agent_index}_{agent}_s{seed}.summary.json  RunSummary plus metadata
//! index.json                                   artifact list, hashes, medians
//! ```
//!
//! Each run draws its randomness from [`derive_run_seed`], so results do not
//! depend on scheduling order.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agent::{run, AgentConfig, AgentKind};
use crate::bonus::BonusMode;
use crate::diagnostics::{RunSummary, SlopeWindow, MIN_CURVE_EPISODES};
use crate::error::{Error, Result};
use crate::mdp::{make_random_mdp, make_riverswim, tiny_mdp, MdpSpec};
use crate::policy::StepsizeSchedule;

pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentSpec {
    Riverswim {
        states: usize,
        horizon: usize,
    },
    Random {
        states: usize,
        actions: usize,
        horizon: usize,
        seed: u64,
        branching: usize,
    },
    /// `make_random_mdp(2, 2, 2, 1, 2)`.
    Tiny,
    Inline {
        mdp: MdpSpec,
    },
}

impl EnvironmentSpec {
    pub fn build(&self) -> Result<MdpSpec> {
        match self {
            EnvironmentSpec::Riverswim { states, horizon } => make_riverswim(*states, *horizon),
            EnvironmentSpec::Random {
                states,
                actions,
                horizon,
                seed,
                branching,
            } => make_random_mdp(*states, *actions, *horizon, *seed, *branching),
            EnvironmentSpec::Tiny => Ok(tiny_mdp()),
            EnvironmentSpec::Inline { mdp } => Ok(mdp.clone()),
        }
    }
}

/// One learner in the batch. Unset fields fall back to the batch defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub kind: AgentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bonus_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bonus_mode: Option<BonusMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<f64>,
    /// Fixed step size; only meaningful for `pomd_kl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl AgentSpec {
    pub fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            bonus_scale: None,
            bonus_mode: None,
            c0: None,
            eta: None,
        }
    }
}

fn default_master_seed() -> u64 {
    0
}
fn default_stride() -> usize {
    1
}
fn default_scale() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    0.1
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("runs")
}
fn default_monitor() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub environment: EnvironmentSpec,
    pub agents: Vec<AgentSpec>,
    pub episodes: usize,
    pub seeds: Vec<u64>,
    #[serde(default = "default_master_seed")]
    pub master_seed: u64,
    #[serde(default = "default_stride")]
    pub log_stride: usize,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_scale")]
    pub bonus_scale: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_monitor")]
    pub monitor_failures: bool,
}

/// Command-line overrides; `Some` fields replace the file's values.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub episodes: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub output_dir: Option<PathBuf>,
    pub bonus_scale: Option<f64>,
    pub log_stride: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(environment: EnvironmentSpec, agents: Vec<AgentSpec>, episodes: usize, seeds: Vec<u64>) -> Self {
        Self {
            environment,
            agents,
            episodes,
            seeds,
            master_seed: default_master_seed(),
            log_stride: default_stride(),
            output_dir: default_output_dir(),
            bonus_scale: default_scale(),
            delta: default_delta(),
            monitor_failures: default_monitor(),
        }
    }

    /// Parses a JSON document; structural errors carry the offending path.
    /// Does not validate.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let field = if path == "." { String::new() } else { path };
            Error::config(field, e.into_inner().to_string())
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path.as_ref()).map_err(|e| Error::io(path.as_ref(), e))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.episodes {
            self.episodes = k;
        }
        if let Some(seeds) = &o.seeds {
            self.seeds = seeds.clone();
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(scale) = o.bonus_scale {
            self.bonus_scale = scale;
        }
        if let Some(m) = o.log_stride {
            self.log_stride = m;
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.resolve().map(|_| ())
    }

    /// Builds the MDP and every agent configuration, reporting the first
    /// invalid field by path.
    pub fn resolve(&self) -> Result<(MdpSpec, Vec<AgentConfig>)> {
        if self.episodes == 0 {
            return Err(Error::config("episodes", "must be at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("seeds", "must not be empty"));
        }
        let mut seen = BTreeSet::new();
        for (i, s) in self.seeds.iter().enumerate() {
            if !seen.insert(s) {
                return Err(Error::config(format!("seeds[{i}]"), format!("duplicate seed {s}")));
            }
        }
        if self.log_stride == 0 {
            return Err(Error::config("log_stride", "must be at least 1"));
        }
        if !(self.bonus_scale.is_finite() && self.bonus_scale >= 0.0) {
            return Err(Error::config("bonus_scale", "must be finite and non-negative"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::config("delta", "must lie in (0, 1)"));
        }
        if self.agents.is_empty() {
            return Err(Error::config("agents", "must not be empty"));
        }
        let mdp = self
            .environment
            .build()
            .map_err(|e| Error::config("environment", e.to_string()))?;
        let agents = self
            .agents
            .iter()
            .enumerate()
            .map(|(i, spec)| {
                self.agent_config(&mdp, spec)
                    .map_err(|e| match e {
                        Error::Config { field, message } => Error::config(format!("agents[{i}].{field}"), message),
                        other => Error::config(format!("agents[{i}]"), other.to_string()),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((mdp, agents))
    }

    fn agent_config(&self, mdp: &MdpSpec, spec: &AgentSpec) -> Result<AgentConfig> {
        let scale = spec.bonus_scale.unwrap_or(self.bonus_scale);
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::config("bonus_scale", "must be finite and non-negative"));
        }
        let mut cfg = AgentConfig::new(spec.kind, mdp.dims(), self.episodes, self.delta, scale)?;
        if let Some(mode) = spec.bonus_mode {
            cfg.bonus = cfg.bonus.with_mode(mode);
        }
        if let Some(c0) = spec.c0 {
            if !(c0.is_finite() && c0 > 0.0) {
                return Err(Error::config("c0", "must be finite and positive"));
            }
            cfg.bonus = cfg.bonus.with_c0(c0);
        }
        if let Some(eta) = spec.eta {
            if spec.kind != AgentKind::PomdKl {
                return Err(Error::config("eta", "only pomd_kl takes a fixed step size"));
            }
            cfg.schedule = StepsizeSchedule::FixedKl { eta };
        }
        cfg.log_stride = self.log_stride;
        cfg.monitor_failures = self.monitor_failures;
        cfg.validate()?;
        Ok(cfg)
    }

    /// SHA-256 of the canonical JSON encoding, with `output_dir` blanked so
    /// that the same experiment written to two places hashes equally.
    pub fn config_hash(&self) -> String {
        let mut canon = self.clone();
        canon.output_dir = PathBuf::new();
        sha256_json(&canon)
    }

    /// Hash of what must agree for runs to be comparable: environment and K.
    pub fn environment_hash(&self) -> String {
        sha256_json(&(&self.environment, self.episodes))
    }
}

fn sha256_json<T: Serialize>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("config types always serialize");
    hex::encode(Sha256::digest(&bytes))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one run: SplitMix64 folded over
/// `(master_seed, agent_index, seed_index, seed)`, i.e.
/// `h0 = mix(master)`, `h_{i+1} = mix(h_i ^ x_i)`.
pub fn derive_run_seed(master_seed: u64, agent_index: usize, seed_index: usize, seed: u64) -> u64 {
    [agent_index as u64, seed_index as u64, seed]
        .into_iter()
        .fold(splitmix64(master_seed), |h, x| splitmix64(h ^ x))
}

pub fn run_stem(agent_index: usize, kind: AgentKind, seed: u64) -> String {
    format!("a{agent_index}_{kind}_s{seed}")
}

/// Contents of a `*.summary.json` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub agent_index: usize,
    pub agent: AgentKind,
    pub seed: u64,
    pub run_seed: u64,
    pub summary: RunSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub agent_index: usize,
    pub agent: AgentKind,
    pub seed_index: usize,
    pub seed: u64,
    pub run_seed: u64,
    pub csv: String,
    pub summary: String,
    pub final_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentAggregate {
    pub agent_index: usize,
    pub agent: AgentKind,
    pub runs: usize,
    pub median_final_regret: f64,
    pub iqr_final_regret: f64,
}

/// Contents of `index.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunIndex {
    pub config_hash: String,
    pub environment_hash: String,
    pub episodes: usize,
    pub horizon: usize,
    pub log_stride: usize,
    pub config: ExperimentConfig,
    pub runs: Vec<RunEntry>,
    pub agents: Vec<AgentAggregate>,
}

impl RunIndex {
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(INDEX_FILE);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Runs every (agent, seed) pair in parallel and writes all artifacts.
pub fn run_batch(cfg: &ExperimentConfig) -> Result<RunIndex> {
    let (mdp, agent_cfgs) = cfg.resolve()?;
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let config_hash = cfg.config_hash();

    let jobs: Vec<(usize, usize, u64)> = (0..agent_cfgs.len())
        .flat_map(|a| cfg.seeds.iter().enumerate().map(move |(i, &s)| (a, i, s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(agent_index, seed_index, seed)| {
            let acfg = &agent_cfgs[agent_index];
            let run_seed = derive_run_seed(cfg.master_seed, agent_index, seed_index, seed);
            let log = run(&mdp, acfg, run_seed)?;
            let stem = run_stem(agent_index, acfg.kind, seed);
            let csv_name = format!("{stem}.csv");
            let summary_name = format!("{stem}.summary.json");

            let csv_path = dir.join(&csv_name);
            let file = fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
            log.write_csv(BufWriter::new(file))?;

            let record = RunRecord {
                config_hash: config_hash.clone(),
                agent_index,
                agent: acfg.kind,
                seed,
                run_seed,
                summary: RunSummary::from_log(&log, SlopeWindow::default()),
            };
            write_json(&dir.join(&summary_name), &record)?;
            Ok(RunEntry {
                agent_index,
                agent: acfg.kind,
                seed_index,
                seed,
                run_seed,
                csv: csv_name,
                summary: summary_name,
                final_regret: log.final_regret(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let agents = agent_cfgs
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let finals: Vec<f64> = runs.iter().filter(|r| r.agent_index == i).map(|r| r.final_regret).collect();
            AgentAggregate {
                agent_index: i,
                agent: a.kind,
                runs: finals.len(),
                median_final_regret: median(&finals),
                iqr_final_regret: iqr(&finals),
            }
        })
        .collect();
    let index = RunIndex {
        config_hash,
        environment_hash: cfg.environment_hash(),
        episodes: cfg.episodes,
        horizon: mdp.horizon(),
        log_stride: cfg.log_stride,
        config: cfg.clone(),
        runs,
        agents,
    };
    write_json(&dir.join(INDEX_FILE), &index)?;
    Ok(index)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Linear-interpolation quantile of unsorted data; NaN when empty.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

pub fn median(values: &[f64]) -> f64 {
    quantile(values, 0.5)
}

pub fn iqr(values: &[f64]) -> f64 {
    quantile(values, 0.75) - quantile(values, 0.25)
}

/// `(k, cumulative Regret_1)` read back from a run CSV.
pub fn read_regret_csv(path: impl AsRef<Path>) -> Result<(Vec<usize>, Vec<f64>)> {
    let path = path.as_ref();
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingData(format!("{}: no `{name}` column", path.display())))
    };
    let (ki, ri) = (col("k")?, col("regret_1")?);
    let mut ks = Vec::new();
    let mut regret = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let parse_err = |what: &str| Error::MissingData(format!("{}: bad {what} value", path.display()));
        ks.push(rec[ki].parse().map_err(|_| parse_err("k"))?);
        regret.push(rec[ri].parse().map_err(|_| parse_err("regret_1"))?);
    }
    Ok((ks, regret))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub run_dir: String,
    pub agent_index: usize,
    pub agent: AgentKind,
    pub runs: usize,
    pub median_final_regret: f64,
    pub iqr_final_regret: f64,
    pub median_regret_slope: Option<f64>,
    pub iqr_regret_slope: Option<f64>,
    /// Median final regret minus that of the same agent in the first directory.
    pub delta_median_final_regret: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub environment_hash: String,
    pub episodes: usize,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "run_dir",
            "agent_index",
            "agent",
            "runs",
            "median_final_regret",
            "iqr_final_regret",
            "median_regret_slope",
            "iqr_regret_slope",
            "delta_median_final_regret",
        ])?;
        let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.rows {
            w.write_record([
                r.run_dir.clone(),
                r.agent_index.to_string(),
                r.agent.to_string(),
                r.runs.to_string(),
                r.median_final_regret.to_string(),
                r.iqr_final_regret.to_string(),
                opt(r.median_regret_slope),
                opt(r.iqr_regret_slope),
                opt(r.delta_median_final_regret),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<comparison csv>", e))?;
        Ok(())
    }
}

/// Per-agent statistics recomputed from the raw CSVs of each directory.
///
/// All directories must share one environment hash, and every summary inside
/// a directory must carry that directory's config hash.
pub fn compare<P: AsRef<Path>>(run_dirs: &[P]) -> Result<Comparison> {
    let mut indices = Vec::with_capacity(run_dirs.len());
    for dir in run_dirs {
        let dir = dir.as_ref();
        let index = RunIndex::load(dir)?;
        for entry in &index.runs {
            let path = dir.join(&entry.summary);
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let record: RunRecord = serde_json::from_str(&text)?;
            if record.config_hash != index.config_hash {
                return Err(Error::Mismatch(format!(
                    "{} has config hash {}, index has {}",
                    path.display(),
                    record.config_hash,
                    index.config_hash
                )));
            }
        }
        indices.push((dir.to_path_buf(), index));
    }
    let Some((_, first)) = indices.first() else {
        return Err(Error::MissingData("no run directories given".into()));
    };
    if indices.iter().map(|(_, i)| i.runs.len()).sum::<usize>() < 2 {
        return Err(Error::MissingData("need at least two completed runs".into()));
    }
    let environment_hash = first.environment_hash.clone();
    let episodes = first.episodes;
    for (dir, index) in &indices {
        if index.environment_hash != environment_hash {
            return Err(Error::Mismatch(format!(
                "{} ran a different environment or episode budget",
                dir.display()
            )));
        }
    }

    let window = SlopeWindow::default();
    let mut rows: Vec<ComparisonRow> = Vec::new();
    for (dir, index) in &indices {
        for agg in &index.agents {
            let mut finals = Vec::new();
            let mut slopes = Vec::new();
            for entry in index.runs.iter().filter(|r| r.agent_index == agg.agent_index) {
                let (ks, regret) = read_regret_csv(dir.join(&entry.csv))?;
                finals.push(regret.last().copied().unwrap_or(0.0));
                if ks.len() >= MIN_CURVE_EPISODES {
                    slopes.push(window.slope(&ks, &regret));
                }
            }
            let have_slopes = !slopes.is_empty() && slopes.len() == finals.len();
            rows.push(ComparisonRow {
                run_dir: dir.display().to_string(),
                agent_index: agg.agent_index,
                agent: agg.agent,
                runs: finals.len(),
                median_final_regret: median(&finals),
                iqr_final_regret: iqr(&finals),
                median_regret_slope: have_slopes.then(|| median(&slopes)),
                iqr_regret_slope: have_slopes.then(|| iqr(&slopes)),
                delta_median_final_regret: None,
            });
        }
    }
    let baseline: Vec<(usize, AgentKind, f64)> = rows
        .iter()
        .filter(|r| r.run_dir == indices[0].0.display().to_string())
        .map(|r| (r.agent_index, r.agent, r.median_final_regret))
        .collect();
    for row in &mut rows {
        row.delta_median_final_regret = baseline
            .iter()
            .find(|(i, k, _)| *i == row.agent_index && *k == row.agent)
            .map(|(_, _, m)| row.median_final_regret - m);
    }
    Ok(Comparison {
        environment_hash,
        episodes,
        rows,
    })
}
