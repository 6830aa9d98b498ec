// Assemble a report bundle and render it as Markdown, CSV and JSON.

use portflow::analysis::concentration_section;
use portflow::config::AnalysisConfig;
use portflow::distribution::{DimensionKey, Scope};
use portflow::fixtures::route_total_records;
use portflow::report::{render, ReportBundle, ReportFormat, ReportMetadata};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let records = route_total_records();
    let config = AnalysisConfig {
        top_n: 3,
        ..AnalysisConfig::default()
    };
    let metadata = ReportMetadata::new(serde_json::to_value(&config)?, &records, "1970-01-01T00:00:00Z".into())?;
    let mut bundle = ReportBundle::new(metadata);
    let (summaries, shares) =
        concentration_section(&records, DimensionKey::Route, &[Scope::All], false, &config)?;
    bundle.concentration = summaries;
    bundle.shares = shares;

    for format in [ReportFormat::Markdown, ReportFormat::Csv] {
        println!("{}", String::from_utf8(render(&bundle, format)?)?);
    }
    let json = render(&bundle, ReportFormat::Json)?;
    let parsed = ReportBundle::from_json(&json)?;
    assert_eq!(parsed, bundle);
    println!("JSON: {} bytes, round trip exact", json.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
