use std::path::PathBuf;

use clap::Parser;
use nextpm_service::cli::{run, Cli};
use nextpm_service::ServiceError;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn run_args(args: &[&str]) -> Result<String, ServiceError> {
    let cli = Cli::try_parse_from(std::iter::once("nextpm").chain(args.iter().copied())).expect("arguments parse");
    let mut out = Vec::new();
    run(&cli.command, &mut out)?;
    Ok(String::from_utf8(out).unwrap())
}

#[test]
fn plan_with_higher_setup_cost_groups_everything() {
    let config = fixture("turbine_d10.json");
    let text = run_args(&["plan", "--config", &config, "--seed", "7"]).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let tau = v["plan"]["tau"].as_u64().unwrap();
    assert!((51..=53).contains(&tau), "tau {tau}");
    assert_eq!(v["plan"]["maintained"], serde_json::json!([1, 2, 3, 4]));
    assert_eq!(v["seed"], serde_json::json!(7));
}

#[test]
fn tables_export_one_row_per_component_and_month() {
    let config = fixture("turbine_d5.json");
    let text = run_args(&["tables", "--config", &config, "--reps", "500"]).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "j,t,c,c_stderr,D,D_stderr");
    let rows: Vec<&str> = lines.collect();
    // months s+1..=r plus the deferral slot r+1, for four components
    assert_eq!(rows.len(), 4 * 81);
    assert_eq!(rows[0].split(',').nth(1), Some("1"));
    assert_eq!(rows[80].split(',').nth(1), Some("81"));
    let width = header.split(',').count();
    assert!(rows.iter().all(|r| r.split(',').count() == width));
}

#[test]
fn om_for_a_gearbox_failure() {
    let config = fixture("turbine_d5.json");
    let text = run_args(&["om", "--config", &config, "--reps", "5000", "--component", "3", "--time", "12.4"]).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["repair_month"], serde_json::json!(13));
    assert_eq!(v["event"]["corrective"], serde_json::json!([3]));

    let err = run_args(&["om", "--config", &config, "--component", "8", "--time", "12.4"]).unwrap_err();
    assert!(matches!(err, ServiceError::NotFound(_)));
}

#[test]
fn simulate_repair_only() {
    let config = fixture("turbine_d5.json");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("study.csv");
    let text = run_args(&[
        "simulate",
        "--config",
        &config,
        "--strategy",
        "cm-only",
        "--reps",
        "50",
        "--out",
        csv.to_str().unwrap(),
    ])
    .unwrap();
    assert!(text.starts_with("cm-only"), "{text}");
    let report = std::fs::read_to_string(csv).unwrap();
    assert_eq!(report.lines().count(), 2);
}

#[test]
fn every_subcommand_parses() {
    let config = fixture("turbine_d5.json");
    for args in [
        vec!["plan", "--config", &config],
        vec!["om", "--config", &config, "--component", "1", "--time", "3.5"],
        vec!["simulate", "--config", &config, "--strategy", "both"],
        vec!["tables", "--config", &config, "--out", "x.csv"],
        vec!["pmspic-compare", "--config", &config, "--horizon", "24", "--seconds", "1"],
        vec!["serve", "--config", &config, "--port", "9000"],
    ] {
        Cli::try_parse_from(std::iter::once("nextpm").chain(args.iter().copied())).unwrap();
    }
    assert!(Cli::try_parse_from(["nextpm", "plan"]).is_err());
}

#[test]
fn pmspic_compare_writes_both_strategies() {
    let config = fixture("turbine_d5.json");
    let text = run_args(&["pmspic-compare", "--config", &config, "--reps", "1000", "--horizon", "12", "--seconds", "2"]).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("strategy,horizon,pm_1,pm_2,pm_3,pm_4,monthly_cost"), "{}", lines[0]);
    assert_eq!(lines.len(), 3);
}
