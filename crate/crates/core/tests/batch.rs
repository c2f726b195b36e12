use std::fs;
use std::path::Path;
use std::process::Command;

use rposat::agent::AgentKind;
use rposat::experiment::{
    compare, median, read_regret_csv, run_batch, AgentSpec, EnvironmentSpec, ExperimentConfig, RunIndex,
};
use rposat::Error;

fn config(dir: &Path, agents: &[AgentKind], episodes: usize, seeds: Vec<u64>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        EnvironmentSpec::Riverswim { states: 4, horizon: 6 },
        agents.iter().map(|&k| AgentSpec::new(k)).collect(),
        episodes,
        seeds,
    );
    cfg.output_dir = dir.to_path_buf();
    cfg
}

fn file_names(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

#[test]
fn single_run_writes_two_files_and_index() {
    let tmp = tempfile::tempdir().unwrap();
    run_batch(&config(tmp.path(), &[AgentKind::RpoSat], 10, vec![3])).unwrap();
    assert_eq!(
        file_names(tmp.path()),
        ["a0_rpo_sat_s3.csv", "a0_rpo_sat_s3.summary.json", "index.json"]
    );
    let (ks, regret) = read_regret_csv(tmp.path().join("a0_rpo_sat_s3.csv")).unwrap();
    assert_eq!(ks, (1..=10).collect::<Vec<_>>());
    assert_eq!(regret.len(), 10);
}

#[test]
fn rerun_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let agents = [AgentKind::RpoSat, AgentKind::PomdKl, AgentKind::GreedyUcb];
    run_batch(&config(a.path(), &agents, 150, vec![0, 1, 2, 3])).unwrap();
    run_batch(&config(b.path(), &agents, 150, vec![0, 1, 2, 3])).unwrap();
    let names = file_names(a.path());
    assert_eq!(names, file_names(b.path()));
    for name in names.iter().filter(|n| !n.starts_with("index")) {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let ia = RunIndex::load(a.path()).unwrap();
    let ib = RunIndex::load(b.path()).unwrap();
    assert_eq!(ia.config_hash, ib.config_hash);
    assert_eq!(ia.runs, ib.runs);
}

#[test]
fn three_agents_ten_seeds_and_medians_recompute() {
    let tmp = tempfile::tempdir().unwrap();
    let agents = [AgentKind::RpoSat, AgentKind::PomdKl, AgentKind::GreedyUcb];
    let index = run_batch(&config(tmp.path(), &agents, 120, (0..10).collect())).unwrap();
    assert_eq!(file_names(tmp.path()).len(), 61);
    for agg in &index.agents {
        let finals: Vec<f64> = index
            .runs
            .iter()
            .filter(|r| r.agent_index == agg.agent_index)
            .map(|r| *read_regret_csv(tmp.path().join(&r.csv)).unwrap().1.last().unwrap())
            .collect();
        assert_eq!(finals.len(), 10);
        assert_eq!(median(&finals), agg.median_final_regret);
    }
}

#[test]
fn self_comparison_has_zero_deltas() {
    let tmp = tempfile::tempdir().unwrap();
    run_batch(&config(tmp.path(), &[AgentKind::RpoSat], 200, vec![0, 1])).unwrap();
    let table = compare(&[tmp.path(), tmp.path()]).unwrap();
    assert_eq!(table.rows.len(), 2);
    for row in &table.rows {
        assert_eq!(row.delta_median_final_regret, Some(0.0));
    }
    assert_eq!(table.rows[0].median_final_regret, table.rows[1].median_final_regret);
}

#[test]
fn uniform_is_worse_than_optimal() {
    let tmp = tempfile::tempdir().unwrap();
    run_batch(&config(
        tmp.path(),
        &[AgentKind::FixedOptimal, AgentKind::FixedUniform],
        100,
        vec![0, 1, 2],
    ))
    .unwrap();
    let table = compare(&[tmp.path()]).unwrap();
    assert_eq!(table.rows[0].agent, AgentKind::FixedOptimal);
    assert_eq!(table.rows[0].median_final_regret, 0.0);
    assert!(table.rows[1].median_final_regret > table.rows[0].median_final_regret);
}

#[test]
fn compare_rejects_other_environments_and_mixed_hashes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_batch(&config(a.path(), &[AgentKind::RpoSat], 20, vec![0, 1])).unwrap();
    run_batch(&config(b.path(), &[AgentKind::RpoSat], 30, vec![0, 1])).unwrap();
    assert!(matches!(compare(&[a.path(), b.path()]), Err(Error::Mismatch(_))));

    // splice a summary from a differently configured batch into `a`
    let c = tempfile::tempdir().unwrap();
    let mut other = config(c.path(), &[AgentKind::RpoSat], 20, vec![0, 1]);
    other.bonus_scale = 0.5;
    run_batch(&other).unwrap();
    fs::copy(
        c.path().join("a0_rpo_sat_s0.summary.json"),
        a.path().join("a0_rpo_sat_s0.summary.json"),
    )
    .unwrap();
    assert!(matches!(compare(&[a.path()]), Err(Error::Mismatch(_))));
}

#[test]
fn stride_thins_the_log() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config(tmp.path(), &[AgentKind::RpoSat], 100, vec![0]);
    cfg.log_stride = 10;
    run_batch(&cfg).unwrap();
    let (ks, _) = read_regret_csv(tmp.path().join("a0_rpo_sat_s0.csv")).unwrap();
    assert_eq!(ks, (1..=10).map(|i| i * 10).collect::<Vec<_>>());
}

#[test]
fn unwritable_output_directory_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = config(&blocker.join("sub"), &[AgentKind::RpoSat], 5, vec![0]);
    assert!(matches!(run_batch(&cfg), Err(Error::Io { .. })));
}

#[test]
fn rpo_sat_vs_greedy_table_reproduces_from_csvs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config(tmp.path(), &[AgentKind::RpoSat, AgentKind::GreedyUcb], 50_000, (0..10).collect());
    cfg.bonus_scale = 0.1;
    cfg.monitor_failures = false;
    let index = run_batch(&cfg).unwrap();
    let table = compare(&[tmp.path()]).unwrap();
    for (row, agg) in table.rows.iter().zip(&index.agents) {
        assert_eq!(row.median_final_regret, agg.median_final_regret);
        let slopes: Vec<f64> = index
            .runs
            .iter()
            .filter(|r| r.agent_index == agg.agent_index)
            .map(|r| {
                let (ks, regret) = read_regret_csv(tmp.path().join(&r.csv)).unwrap();
                rposat::diagnostics::SlopeWindow::default().slope(&ks, &regret)
            })
            .collect();
        assert_eq!(row.median_regret_slope, Some(median(&slopes)));
    }
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rposat"))
}

#[test]
fn cli_run_then_compare() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("cfg.json");
    fs::write(
        &cfg_path,
        r#"{"environment":{"kind":"tiny"},"agents":[{"kind":"rpo_sat"}],"episodes":50,"seeds":[1]}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("out");
    let status = cli()
        .args(["run", "--config"])
        .arg(&cfg_path)
        .args(["--seeds", "4,5", "--episodes", "120", "--output-dir"])
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let index = RunIndex::load(&out_dir).unwrap();
    assert_eq!(index.config.seeds, vec![4, 5]);
    assert_eq!(index.episodes, 120);

    let table_path = tmp.path().join("table.csv");
    let status = cli().arg("compare").arg(&out_dir).arg("--output").arg(&table_path).status().unwrap();
    assert!(status.success());
    let text = fs::read_to_string(table_path).unwrap();
    assert!(text.starts_with("run_dir,agent_index,agent,runs,median_final_regret"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn cli_reports_invalid_config_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("cfg.json");
    fs::write(
        &cfg_path,
        r#"{"environment":{"kind":"tiny"},"agents":[{"kind":"rpo_sat","bonus_scale":-1}],"episodes":5,"seeds":[1]}"#,
    )
    .unwrap();
    let out = cli().arg("validate-config").arg("--config").arg(&cfg_path).output().unwrap();
    assert!(!out.status.success());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
    assert_eq!(err["field"], "agents[0].bonus_scale");

    fs::write(&cfg_path, r#"{"environment":{"kind":"tiny"},"agents":[],"episodes":"many","seeds":[1]}"#).unwrap();
    let out = cli().arg("validate-config").arg("--config").arg(&cfg_path).output().unwrap();
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["field"], "episodes");
}

#[test]
fn cli_validate_accepts_good_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg_path = tmp.path().join("cfg.json");
    fs::write(
        &cfg_path,
        r#"{"environment":{"kind":"random","states":3,"actions":2,"horizon":4,"seed":9,"branching":2},
            "agents":[{"kind":"pomd_kl","eta":0.05},{"kind":"greedy_ucb"}],"episodes":5,"seeds":[1]}"#,
    )
    .unwrap();
    let out = cli().arg("validate-config").arg("--config").arg(&cfg_path).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], true);
}
