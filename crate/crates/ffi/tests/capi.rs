use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rposat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rposat_last_error()) }.to_string_lossy().into_owned()
}

fn riverswim(states: usize, horizon: usize) -> *mut RposatMdp {
    let mut mdp = ptr::null_mut();
    assert_eq!(unsafe { rposat_mdp_riverswim(states, horizon, &mut mdp) }, RposatStatus::Ok);
    mdp
}

#[test]
fn mdp_round_trips_through_json() {
    unsafe {
        let mdp = riverswim(4, 6);
        let mut json = ptr::null_mut();
        assert_eq!(rposat_mdp_to_json(mdp, &mut json), RposatStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(rposat_mdp_from_json(json, &mut back), RposatStatus::Ok);
        let (mut s, mut a, mut h) = (0, 0, 0);
        assert_eq!(rposat_mdp_dims(back, &mut s, &mut a, &mut h), RposatStatus::Ok);
        assert_eq!((s, a, h), (4, 2, 6));
        let (mut v1, mut v2) = (0.0, 0.0);
        rposat_mdp_optimal_value(mdp, &mut v1);
        rposat_mdp_optimal_value(back, &mut v2);
        assert_eq!(v1, v2);
        rposat_string_free(json);
        rposat_mdp_free(mdp);
        rposat_mdp_free(back);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let mut mdp = ptr::null_mut();
        assert_eq!(rposat_mdp_random(2, 2, 2, 0, 3, &mut mdp), RposatStatus::InvalidArgument);
        assert!(mdp.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(rposat_mdp_riverswim(4, 6, ptr::null_mut()), RposatStatus::NullPointer);
        assert!(last_error().contains("out"));

        let bad = CString::new("{not json").unwrap();
        assert_eq!(rposat_mdp_from_json(bad.as_ptr(), &mut mdp), RposatStatus::Config);

        let mdp = riverswim(3, 2);
        assert!(last_error().is_empty());
        let mut agent = ptr::null_mut();
        assert_eq!(
            rposat_agent_new(mdp, RposatAgentKind::RpoSat, 0, 0.1, 1.0, 0, &mut agent),
            RposatStatus::InvalidArgument
        );
        rposat_mdp_free(mdp);
    }
}

#[test]
fn projection_matches_library() {
    let x = [0.9, 0.4, -0.2];
    let mut out = [0.0; 3];
    assert_eq!(unsafe { rposat_project_simplex(x.as_ptr(), 3, out.as_mut_ptr()) }, RposatStatus::Ok);
    assert_eq!(out.to_vec(), rposat::policy::project_simplex(&x).unwrap());
    let mut inplace = x;
    let p = inplace.as_mut_ptr();
    assert_eq!(unsafe { rposat_project_simplex(p, 3, p) }, RposatStatus::Ok);
    assert_eq!(inplace, out);
    assert_eq!(unsafe { rposat_project_simplex(x.as_ptr(), 0, out.as_mut_ptr()) }, RposatStatus::InvalidArgument);
}

#[test]
fn agent_steps_match_library_run() {
    unsafe {
        let mdp = riverswim(4, 6);
        let mut agent = ptr::null_mut();
        assert_eq!(
            rposat_agent_new(mdp, RposatAgentKind::RpoSat, 200, 0.1, 0.1, 17, &mut agent),
            RposatStatus::Ok
        );
        let mut summary = RposatEpisodeSummary::default();
        for k in 1..=200u64 {
            assert_eq!(rposat_agent_step(agent, &mut summary), RposatStatus::Ok);
            assert_eq!(summary.k, k);
        }
        let mut regret = 0.0;
        rposat_agent_cumulative_regret(agent, &mut regret);

        let spec = rposat::mdp::make_riverswim(4, 6).unwrap();
        let cfg =
            rposat::agent::AgentConfig::new(rposat::agent::AgentKind::RpoSat, spec.dims(), 200, 0.1, 0.1).unwrap();
        let log = rposat::agent::run(&spec, &cfg, 17).unwrap();
        assert!((regret - log.final_regret()).abs() < 1e-9);

        let mut policy = vec![0.0; 6 * 4 * 2];
        assert_eq!(rposat_agent_policy(agent, policy.as_mut_ptr(), policy.len()), RposatStatus::Ok);
        for row in policy.chunks(2) {
            assert!((row[0] + row[1] - 1.0).abs() < 1e-9);
        }
        assert_eq!(rposat_agent_policy(agent, policy.as_mut_ptr(), 3), RposatStatus::Dimension);
        rposat_agent_free(agent);
        rposat_mdp_free(mdp);
    }
}

#[test]
fn batch_returns_index() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = format!(
        r#"{{"environment":{{"kind":"tiny"}},"agents":[{{"kind":"greedy_ucb"}}],"episodes":20,"seeds":[1,2],"output_dir":{}}}"#,
        serde_json::to_string(tmp.path()).unwrap()
    );
    let cfg = CString::new(cfg).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rposat_run_batch(cfg.as_ptr(), &mut out) }, RposatStatus::Ok);
    let text = unsafe { CStr::from_ptr(out) }.to_str().unwrap().to_owned();
    unsafe { rposat_string_free(out) };
    let index: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(index["runs"].as_array().unwrap().len(), 2);
    assert!(tmp.path().join("index.json").exists());
}

fn header() -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/rposat.h")).unwrap()
}

#[test]
fn header_declares_every_export() {
    let h = header();
    for sym in [
        "rposat_last_error",
        "rposat_string_free",
        "rposat_mdp_riverswim",
        "rposat_mdp_random",
        "rposat_mdp_from_json",
        "rposat_mdp_to_json",
        "rposat_mdp_dims",
        "rposat_mdp_optimal_value",
        "rposat_mdp_free",
        "rposat_project_simplex",
        "rposat_agent_new",
        "rposat_agent_step",
        "rposat_agent_cumulative_regret",
        "rposat_agent_policy",
        "rposat_agent_free",
        "rposat_run_batch",
        "typedef struct RposatMdp RposatMdp;",
        "typedef struct RposatAgent RposatAgent;",
        "RPOSAT_STATUS_OK = 0",
        "RPOSAT_STATUS_INTERNAL = 6",
    ] {
        assert!(h.contains(sym), "header lacks {sym}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "rposat.h"

int main(void) {
    RposatMdp *mdp = NULL;
    if (rposat_mdp_riverswim(4, 6, &mdp) != RPOSAT_STATUS_OK) return 1;
    RposatAgent *agent = NULL;
    if (rposat_agent_new(mdp, RPOSAT_AGENT_KIND_RPO_SAT, 50, 0.1, 0.1, 3, &agent) != RPOSAT_STATUS_OK) return 2;
    RposatEpisodeSummary s;
    for (int k = 0; k < 50; k++) {
        if (rposat_agent_step(agent, &s) != RPOSAT_STATUS_OK) return 3;
    }
    double regret = 0.0;
    rposat_agent_cumulative_regret(agent, &regret);
    if (rposat_mdp_random(2, 2, 2, 0, 9, &mdp) != RPOSAT_STATUS_INVALID_ARGUMENT) return 4;
    printf("%llu %.6f %s\n", (unsigned long long)s.k, regret, rposat_last_error()[0] ? "err" : "none");
    rposat_agent_free(agent);
    rposat_mdp_free(mdp);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    // integration tests live in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("librposat_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());

    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = tmp.path().join("main");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields[0], "50");
    assert!(fields[1].parse::<f64>().unwrap() >= 0.0);
    assert_eq!(fields[2], "err");
}
