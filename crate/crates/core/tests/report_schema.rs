mod common;

use common::{cli, fixture_str};
use portflow::report::ReportBundle;

fn validator() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/docs/report.schema.json")).unwrap();
    let schema: serde_json::Value = serde_json::from_str(&text).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn assert_valid(args: &[&str]) -> serde_json::Value {
    let out = cli(args);
    assert_eq!(out.code, 0, "{args:?}: {}", out.stderr);
    let value = out.json();
    let v = validator();
    let errors: Vec<String> = v.iter_errors(&value).map(|e| format!("{} at {}", e, e.instance_path)).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:#?}");
    value
}

#[test]
fn every_report_subcommand_matches_schema() {
    let flows = fixture_str("flows_2019_2022.csv");
    let t8 = fixture_str("route_totals.csv");
    let t14 = fixture_str("industry_shares.csv");
    assert_valid(&["validate", "--format", "json", &fixture_str("ingest_rules.csv")]);
    assert_valid(&["analyze", "--format", "json", &t8]);
    assert_valid(&["analyze", "--format", "json", "--dimension", "industry", &flows]);
    assert_valid(&["asymmetry", "--format", "json", &flows]);
    assert_valid(&["asymmetry", "--format", "json", "--dimension", "industry", &t14]);
    assert_valid(&["drift", "--format", "json", &flows]);
    assert_valid(&["profile", "--format", "json", &flows]);
}

#[test]
fn undefined_rank_outcome_matches_schema() {
    // one category per direction: correlations are undefined
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    std::fs::write(
        &path,
        "Year,Direction,Route,Origin_Node,Destination_Node,Industry,FFE\n2019,IMPORT,W1,A,B,C,1\n2019,EXPORT,W1,A,B,C,2\n",
    )
    .unwrap();
    let j = assert_valid(&["asymmetry", "--format", "json", "--dimension", "route", path.to_str().unwrap()]);
    assert_eq!(j["asymmetry"][0]["spearman"]["status"], "undefined");
}

#[test]
fn json_report_round_trips_at_full_precision() {
    let out = cli(&["drift", "--format", "json", &fixture_str("flows_2019_2022.csv")]);
    let bundle = ReportBundle::from_json(out.stdout.as_bytes()).unwrap();
    let again = portflow::report::render(&bundle, portflow::report::ReportFormat::Json).unwrap();
    assert_eq!(String::from_utf8(again).unwrap(), out.stdout);
}

#[test]
fn schema_rejects_null_sections() {
    let out = cli(&["analyze", "--format", "json", &fixture_str("route_totals.csv")]);
    let mut value = out.json();
    value["drift"] = serde_json::Value::Null;
    assert!(!validator().is_valid(&value));
}
