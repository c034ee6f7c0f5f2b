//! Black-box tests of the command-line interface: exit codes, artifact
//! files, and their contents.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lineplan(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lineplan"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn solve_writes_concept_solution_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let files = common::write_corridor_csvs(dir.path());
    let out = dir.path().join("out");

    let result = lineplan(
        dir.path(),
        &[
            "solve",
            "--network", files.network.to_str().unwrap(),
            "--od", files.od.to_str().unwrap(),
            "--pool", files.pool.to_str().unwrap(),
            "--formulation", "cost",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    assert!(result.stderr.is_empty(), "diagnostics only on failure");

    // The cheapest plan runs the through line twice and nothing else.
    let concept = std::fs::read_to_string(out.join("concept.csv")).unwrap();
    assert_eq!(concept, "line_id,frequency\nl1,0\nl2,0\nl3,2\n");

    let solution = read_json(&out.join("solution.json"));
    assert_eq!(solution["formulation"], "cost");
    assert_eq!(solution["status"], "optimal");
    assert_eq!(solution["objective"], 3.6);

    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["command"], "solve");
    assert_eq!(manifest["options"]["formulation"], "cost");
    for role in ["network", "od", "pool"] {
        let sha = manifest["inputs"][role]["sha256"].as_str().unwrap();
        assert_eq!(sha.len(), 64, "{role} input must carry a full sha256");
    }
    assert!(out.join("summary.txt").exists());
}

#[test]
fn missing_input_exits_one_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let files = common::write_corridor_csvs(dir.path());
    let result = lineplan(
        dir.path(),
        &[
            "solve",
            "--network", "no_such_file.csv",
            "--od", files.od.to_str().unwrap(),
            "--pool", files.pool.to_str().unwrap(),
            "--formulation", "cost",
            "--out", "out",
        ],
    );
    assert_eq!(result.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&result.stderr);
    assert!(stderr.starts_with("lineplan: "), "got stderr: {stderr}");
}

#[test]
fn unknown_flag_exits_one_and_help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let bad = lineplan(dir.path(), &["solve", "--does-not-exist"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());

    let help = lineplan(dir.path(), &["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&help.stdout);
    for subcommand in ["solve", "evaluate", "generate-pool", "scan"] {
        assert!(stdout.contains(subcommand), "help must list {subcommand}");
    }
}

#[test]
fn infeasible_model_exits_two_without_concept() {
    let dir = tempfile::tempdir().unwrap();
    let files = common::write_corridor_csvs(dir.path());
    // A pool whose only line misses link a2, which demands frequency >= 2:
    // no frequency vector can satisfy the bounds.
    std::fs::write(
        dir.path().join("thin_pool.csv"),
        "line_id,link_ids,cost_per_trip\nonly,a1,1\n",
    )
    .unwrap();
    let out = dir.path().join("out");

    let result = lineplan(
        dir.path(),
        &[
            "solve",
            "--network", files.network.to_str().unwrap(),
            "--od", files.od.to_str().unwrap(),
            "--pool", "thin_pool.csv",
            "--formulation", "cost",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(2));
    let solution = read_json(&out.join("solution.json"));
    assert_eq!(solution["status"], "infeasible");
    assert!(!out.join("concept.csv").exists(), "no concept for an infeasible model");
}

#[test]
fn node_limit_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let files = common::write_corridor_csvs(dir.path());
    let out = dir.path().join("out");
    let result = lineplan(
        dir.path(),
        &[
            "solve",
            "--network", files.network.to_str().unwrap(),
            "--od", files.od.to_str().unwrap(),
            "--pool", files.pool.to_str().unwrap(),
            "--formulation", "cost",
            "--node-limit", "0",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(3));
    let solution = read_json(&out.join("solution.json"));
    assert_eq!(solution["status"], "node-limit");
}

#[test]
fn evaluate_reports_trip_deficit_and_strict_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let files = common::write_corridor_csvs(dir.path());
    let out = dir.path().join("out");

    let base_args = [
        "evaluate",
        "--network", "network.csv",
        "--od", "od.csv",
        "--pool", "pool.csv",
        "--concept", "concept.csv",
        "--level", "trip",
        "--fare", "0.05",
    ];
    let _ = files;

    let mut args: Vec<&str> = base_args.to_vec();
    let out_str = out.to_str().unwrap().to_string();
    args.extend_from_slice(&["--out", &out_str]);
    let result = lineplan(dir.path(), &args);
    assert_eq!(result.status.code(), Some(0), "without --strict violations do not fail the run");
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("feasible: false"));

    // Indicator values of the worked corridor at trip level.
    let indicators = read_json(&out.join("indicators.json"));
    assert_eq!(indicators["variable_cost"], 4.8);
    assert_eq!(indicators["vehicles_required"], 5);
    assert_eq!(indicators["coverage"], 1.0);
    assert_eq!(indicators["direct_travelers"], 60.0);
    assert_eq!(indicators["time"]["driving"], 4800.0);
    assert_eq!(indicators["time"]["transfer"], 600.0);
    assert_eq!(indicators["time"]["total"], 5400.0);
    assert_eq!(indicators["revenue"], 240.0);

    let capacity = read_json(&out.join("capacity_trip.json"));
    assert_eq!(capacity["feasible"], false);
    assert_eq!(capacity["total_deficit"], 30.0);
    let violations = capacity["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1);
    assert_eq!(violations[0]["arc"], "a2:l2:f1");
    assert_eq!(violations[0]["deficit"], 30.0);

    // The CSV twin carries the same indicators as key,value rows.
    let csv = std::fs::read_to_string(out.join("indicators.csv")).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("variable_cost,4.800000\n"));

    // --strict turns the deficit into exit code 4.
    let strict_out = dir.path().join("strict");
    let strict_str = strict_out.to_str().unwrap().to_string();
    let mut strict_args: Vec<&str> = base_args.to_vec();
    strict_args.extend_from_slice(&["--strict", "--out", &strict_str]);
    let strict = lineplan(dir.path(), &strict_args);
    assert_eq!(strict.status.code(), Some(4));
}

#[test]
fn evaluate_covers_scan_uncertainty_and_dissimilarity() {
    let dir = tempfile::tempdir().unwrap();
    let _files = common::write_corridor_csvs(dir.path());
    std::fs::write(
        dir.path().join("box.json"),
        r#"{"kind":"box","bounds":[["s1","s3",120.0,240.0]]}"#,
    )
    .unwrap();
    let out = dir.path().join("out");

    let result = lineplan(
        dir.path(),
        &[
            "evaluate",
            "--network", "network.csv",
            "--od", "od.csv",
            "--pool", "pool.csv",
            "--concept", "concept.csv",
            "--scan", "link-failure",
            "--uncertainty", "box.json",
            "--dissimilar", "concept.csv",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&result.stderr));

    // Both corridor links strand all 120 passengers; ties resolve to a1.
    let scan = read_json(&out.join("failure_scan.json"));
    assert_eq!(scan["worst_link"], "a1");
    assert_eq!(scan["worst_impact"], 14400.0);
    assert_eq!(scan["links"].as_array().unwrap().len(), 2);
    assert!(out.join("failure_scan.csv").exists());

    // The box's worst case doubles demand; the concept is 240 seats short.
    let uncertainty = read_json(&out.join("uncertainty.json"));
    assert_eq!(uncertainty["kind"], "box");
    assert_eq!(uncertainty["worst_total_deficit"], 240.0);
    assert_eq!(uncertainty["worst_objective"], 38400.0);
    assert_eq!(uncertainty["worst_scenario"][0][2], 240.0);

    // A concept compared with itself scores zero on every measure.
    let dissimilarity = read_json(&out.join("dissimilarity.json"));
    for measure in [
        "freq_norm_1",
        "freq_norm_2",
        "freq_norm_inf",
        "line_set_delta",
        "transport_distance",
    ] {
        assert_eq!(dissimilarity[measure], 0.0, "{measure} of identical concepts");
    }
}

#[test]
fn generate_pool_builds_usable_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let _files = common::write_corridor_csvs(dir.path());
    let out = dir.path().join("out");

    // Default terminals are all pairs of dead-end stations (here s1, s3).
    let result = lineplan(
        dir.path(),
        &[
            "generate-pool",
            "--network", "network.csv",
            "--od", "od.csv",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let pool = std::fs::read_to_string(out.join("pool.csv")).unwrap();
    assert!(pool.starts_with("line_id,link_ids,cost_per_trip"));
    assert!(pool.contains("line_1,a1;a2,"), "the corridor has one end-to-end path: {pool}");

    // The generated pool feeds straight back into solve.
    let solve_out = dir.path().join("solved");
    let pool_path = out.join("pool.csv");
    let solve = lineplan(
        dir.path(),
        &[
            "solve",
            "--network", "network.csv",
            "--od", "od.csv",
            "--pool", pool_path.to_str().unwrap(),
            "--formulation", "cost",
            "--out", solve_out.to_str().unwrap(),
        ],
    );
    assert_eq!(solve.status.code(), Some(0));
    let solution = read_json(&solve_out.join("solution.json"));
    assert_eq!(solution["status"], "optimal");
}

#[test]
fn scan_command_reports_worst_link() {
    let dir = tempfile::tempdir().unwrap();
    let _files = common::write_corridor_csvs(dir.path());
    let out = dir.path().join("out");
    let result = lineplan(
        dir.path(),
        &[
            "scan",
            "--network", "network.csv",
            "--od", "od.csv",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let stdout = String::from_utf8_lossy(&result.stdout);
    assert!(stdout.contains("worst link: a1"), "stdout: {stdout}");

    let scan = read_json(&out.join("failure_scan.json"));
    assert_eq!(scan["policy"], "reroute");
    assert_eq!(scan["worst_link"], "a1");

    // Bridging the failed link keeps everyone served.
    let bridged_out = dir.path().join("bridged");
    let bridged = lineplan(
        dir.path(),
        &[
            "scan",
            "--network", "network.csv",
            "--od", "od.csv",
            "--policy", "bridge",
            "--bridge-factor", "2.0",
            "--out", bridged_out.to_str().unwrap(),
        ],
    );
    assert_eq!(bridged.status.code(), Some(0));
    let report = read_json(&bridged_out.join("failure_scan.json"));
    for link in report["links"].as_array().unwrap() {
        assert_eq!(link["unserved"], 0.0);
    }
}

#[test]
fn multiperiod_solve_writes_one_concept_per_season() {
    let dir = tempfile::tempdir().unwrap();
    let _files = common::write_corridor_csvs(dir.path());
    std::fs::write(dir.path().join("summer.csv"), "origin,destination,passengers\ns1,s3,120\n").unwrap();
    std::fs::write(dir.path().join("winter.csv"), "origin,destination,passengers\ns1,s3,240\n").unwrap();
    let out = dir.path().join("out");

    let result = lineplan(
        dir.path(),
        &[
            "solve",
            "--network", "network.csv",
            "--od", "od.csv",
            "--pool", "pool.csv",
            "--formulation", "multiperiod",
            "--season", "summer.csv",
            "--season", "winter.csv",
            "--season-weight", "2",
            "--season-weight", "1",
            "--measure", "freq-norm",
            "--bound", "inf",
            "--out", out.to_str().unwrap(),
        ],
    );
    assert_eq!(result.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&result.stderr));
    let solution = read_json(&out.join("solution.json"));
    assert_eq!(solution["status"], "optimal");
    assert_eq!(solution["seasons"], 2);
    assert_eq!(solution["objective"], 14.4);

    let summer = std::fs::read_to_string(out.join("concept_season_0.csv")).unwrap();
    let winter = std::fs::read_to_string(out.join("concept_season_1.csv")).unwrap();
    assert!(summer.contains("l3,2"), "summer plan: {summer}");
    assert!(winter.contains("l3,4"), "winter plan: {winter}");
}
