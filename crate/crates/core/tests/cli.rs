mod common;

use common::{cli, fixture_str};

#[test]
fn validate_clean_fixture() {
    let out = cli(&["validate", "--format", "json", &fixture_str("flows_2019_2022.csv")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let j = out.json();
    assert_eq!(j["ingest"]["accepted_count"], 72);
    for v in j["ingest"]["rejected"].as_object().unwrap().values() {
        assert_eq!(v, 0);
    }
}

#[test]
fn validate_tallies_zero_ffe() {
    let out = cli(&["validate", "--format", "json", &fixture_str("zero_ffe.csv")]);
    assert_eq!(out.code, 0);
    let j = out.json();
    assert_eq!(j["ingest"]["rejected"]["nonpositive_ffe"], 1);
    assert_eq!(j["ingest"]["accepted_count"], 2);
}

#[test]
fn validate_empty_file_fails() {
    let out = cli(&["validate", &fixture_str("empty.csv")]);
    assert_ne!(out.code, 0);
    assert_eq!(out.code, 2);
}

#[test]
fn validate_all_rejected_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "Year,Direction,Route,Origin_Node,Destination_Node,Industry,FFE\n2019,IMPORT,W1,A,B,C,0\n").unwrap();
    let out = cli(&["validate", "--format", "json", path.to_str().unwrap()]);
    assert_eq!(out.code, 2);
    assert_eq!(out.json()["ingest"]["rejected"]["nonpositive_ffe"], 1);
}

#[test]
fn missing_column_is_a_data_error() {
    let out = cli(&["validate", &fixture_str("raw_imports.csv")]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("Direction"), "{}", out.stderr);
}

#[test]
fn raw_layouts_map_nodes_by_direction() {
    let out = cli(&[
        "analyze",
        "--format",
        "json",
        "--dimension",
        "origin",
        "--scope",
        "export",
        "--imports",
        &fixture_str("raw_imports.csv"),
        "--exports",
        &fixture_str("raw_exports.csv"),
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let j = out.json();
    let rows = j["shares"][0]["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["category"].as_str().unwrap()).collect();
    assert_eq!(names, ["NOUADHIBOU", "NOUAKCHOTT"]);
    // two export origin categories: CR3 saturates
    assert_eq!(j["concentration"][0]["cr"]["3"], 1.0);
}

#[test]
fn analyze_top3_order() {
    let out = cli(&["analyze", "--format", "json", "--top", "3", &fixture_str("route_totals.csv")]);
    assert_eq!(out.code, 0);
    let j = out.json();
    let rows = j["shares"][0]["rows"].as_array().unwrap();
    let names: Vec<&str> = rows.iter().map(|r| r["category"].as_str().unwrap()).collect();
    assert_eq!(names, ["W3", "W1", "W5"]);
    // no exports in this fixture: the default scope set skips the empty one
    let scopes: Vec<&str> = j["concentration"].as_array().unwrap().iter().map(|c| c["scope"].as_str().unwrap()).collect();
    assert_eq!(scopes, ["ALL", "IMPORT"]);
}

#[test]
fn analyze_explicit_empty_scope_fails() {
    let out = cli(&["analyze", "--scope", "export", &fixture_str("route_totals.csv")]);
    assert_eq!(out.code, 2);
}

#[test]
fn analyze_unknown_dimension_is_usage_error() {
    let out = cli(&["analyze", "--dimension", "vessel", &fixture_str("route_totals.csv")]);
    assert_eq!(out.code, 1);
}

#[test]
fn asymmetry_identical_directions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("same.csv");
    let mut text = String::from("Year,Direction,Route,Origin_Node,Destination_Node,Industry,FFE\n");
    for (route, ffe) in [("W1", 5.0), ("W2", 3.0), ("W3", 1.0)] {
        for dir in ["IMPORT", "EXPORT"] {
            text.push_str(&format!("2019,{dir},{route},A,B,C,{ffe}\n"));
        }
    }
    std::fs::write(&path, text).unwrap();
    let out = cli(&["asymmetry", "--format", "json", "--dimension", "route", path.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let a = &out.json()["asymmetry"][0];
    assert_eq!(a["jsd"], 0.0);
    assert_eq!(a["spearman"]["statistic"], 1.0);
}

#[test]
fn asymmetry_disjoint_nodes() {
    let out = cli(&["asymmetry", "--format", "json", "--dimension", "origin", &fixture_str("disjoint_nodes.csv")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let jsd = out.json()["asymmetry"][0]["jsd"].as_f64().unwrap();
    assert!((jsd - 1.0).abs() < 1e-12);
}

#[test]
fn asymmetry_industry_orientation_signs() {
    let out = cli(&["asymmetry", "--format", "json", "--dimension", "industry", &fixture_str("industry_shares.csv")]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let o = &out.json()["orientation"]["entries"];
    assert!(o["FROZEN FISH & SEAFOOD"].as_f64().unwrap() > 0.0);
    assert!(o["FOOD & BEVERAGE"].as_f64().unwrap() < 0.0);
}

#[test]
fn asymmetry_needs_both_directions() {
    let out = cli(&["asymmetry", &fixture_str("route_totals.csv")]);
    assert_eq!(out.code, 2);
}

#[test]
fn drift_base_year() {
    let f = fixture_str("flows_2019_2022.csv");
    let out = cli(&["drift", "--format", "json", "--dimension", "route", &f]);
    assert_eq!(out.code, 0);
    let d = &out.json()["drift"][0];
    assert_eq!(d["base_year"], 2019);
    assert_eq!(d["rows"][0]["jsd_vs_base"], 0.0);
    assert_eq!(d["rows"].as_array().unwrap().len(), 4);
    assert_eq!(d["adjacent"].as_array().unwrap().len(), 3);

    let out = cli(&["drift", "--format", "json", "--dimension", "route", "--base-year", "2021", &f]);
    assert_eq!(out.json()["drift"][0]["rows"][2]["jsd_vs_base"], 0.0);

    let out = cli(&["drift", "--base-year", "2015", &f]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("2015"));
}

#[test]
fn drift_default_dimensions() {
    let out = cli(&["drift", "--format", "json", "--scope", "export", &fixture_str("flows_2019_2022.csv")]);
    let dims: Vec<String> = out.json()["drift"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["dimension"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(dims, ["ROUTE", "ORIGIN_NODE", "DESTINATION_NODE", "INDUSTRY"]);
}

#[test]
fn profile_writes_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plots = dir.path().join("plots");
    let args = [
        "profile",
        "--format",
        "json",
        "--bins",
        "5",
        "--plot-dir",
        plots.to_str().unwrap(),
        &fixture_str("flows_2019_2022.csv"),
    ];
    let out = cli(&args);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let annual = std::fs::read_to_string(plots.join("annual.csv")).unwrap();
    let hist = std::fs::read_to_string(plots.join("histogram.csv")).unwrap();
    assert_eq!(annual.lines().count(), 1 + 8);
    assert_eq!(annual.lines().next(), Some("year,direction,total_ffe"));
    assert_eq!(hist.lines().count(), 1 + 5);
    assert_eq!(hist.lines().next(), Some("bin_lo,bin_hi,count"));

    assert_eq!(cli(&args).code, 0);
    assert_eq!(std::fs::read_to_string(plots.join("annual.csv")).unwrap(), annual);
    assert_eq!(std::fs::read_to_string(plots.join("histogram.csv")).unwrap(), hist);
}

#[test]
fn synth_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = cli(&["synth", "--target", &fixture_str("route_totals_target.toml"), "--output", path.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stderr);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let sampled = |seed: &str| {
        cli(&["synth", "--target", &fixture_str("route_totals_target.toml"), "--mode", "sampled", "--seed", seed]).stdout
    };
    assert_eq!(sampled("5"), sampled("5"));
    assert_ne!(sampled("5"), sampled("6"));
}

#[test]
fn synth_too_few_records_fails() {
    let out = cli(&["synth", "--target", &fixture_str("too_few_records.toml")]);
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("record_count"), "{}", out.stderr);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("portflow.toml");
    std::fs::write(&cfg, "format = \"json\"\ncr_k = [2]\ntop_n = 2\n[ingest]\nyear_max = 2020\n").unwrap();
    let f = fixture_str("flows_2019_2022.csv");
    let out = cli(&["analyze", "--config", cfg.to_str().unwrap(), "--scope", "all", &f]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let j = out.json();
    assert!(j["concentration"][0]["cr"]["2"].is_number());
    assert_eq!(j["shares"][0]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(j["ingest"]["rejected"]["year_out_of_range"], 36);
    assert_eq!(j["metadata"]["config"]["ingest"]["year_max"], 2020);

    // flags win over the file
    let out = cli(&["analyze", "--config", cfg.to_str().unwrap(), "--top", "3", "--year-max", "2022", "--cr-k", "1,4", &f]);
    let j = out.json();
    assert_eq!(j["shares"][0]["rows"].as_array().unwrap().len(), 3);
    assert_eq!(j["ingest"]["rejected"]["year_out_of_range"], 0);
    assert!(j["concentration"][0]["cr"]["4"].is_number());
    assert_eq!(j["metadata"]["config"]["cr_k"], serde_json::json!([1, 4]));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "epsilon = -1.0\n").unwrap();
    assert_eq!(cli(&["analyze", "--config", bad.to_str().unwrap(), &f]).code, 1);
    assert_eq!(cli(&["analyze", "--cr-k", "5,3", &f]).code, 1);
}

#[test]
fn unsupported_format_is_usage_error() {
    let out = cli(&["analyze", "--format", "xlsx", &fixture_str("route_totals.csv")]);
    assert_eq!(out.code, 1);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.md");
    let out = cli(&["analyze", "-o", path.to_str().unwrap(), &fixture_str("route_totals.csv")]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.is_empty());
    let md = std::fs::read_to_string(path).unwrap();
    assert!(md.contains("| Route | Total FFE | Share |"));
}
