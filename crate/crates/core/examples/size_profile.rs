// Shipment-size summary, annual totals and plot-data export.

use portflow::analysis::profile_section;
use portflow::config::AnalysisConfig;
use portflow::fixtures::{record, ANNUAL_TOTALS};
use portflow::ingest::Direction;
use portflow::report::{emit_plot_data, ReportBundle, ReportMetadata};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    // One record per annual total plus a few small shipments.
    let mut records = Vec::new();
    for (year, exports, imports) in ANNUAL_TOTALS {
        records.push(record(year, Direction::Export, "W3", exports));
        records.push(record(year, Direction::Import, "W1", imports));
        for size in [0.5, 1.0, 1.0, 2.0] {
            records.push(record(year, Direction::Import, "W2", size));
        }
    }

    let config = AnalysisConfig {
        histogram_bins: 6,
        ..AnalysisConfig::default()
    };
    let profile = profile_section(&records, &config)?;
    let s = &profile.summary;
    println!(
        "count {} mean {:.4} std {:.4} median {} p75 {} max {}",
        s.count, s.mean, s.std, s.median, s.p75, s.max
    );
    for row in &profile.annual.rows {
        println!("{} {:<6} {}", row.year, row.direction, row.total_ffe);
    }

    let metadata = ReportMetadata::new(serde_json::to_value(&config)?, &records, "example".into())?;
    let mut bundle = ReportBundle::new(metadata);
    bundle.profile = Some(profile);
    let dir = tempfile::tempdir()?;
    for path in emit_plot_data(&bundle, dir.path())? {
        println!("--- {}", path.file_name().unwrap().to_string_lossy());
        print!("{}", std::fs::read_to_string(path)?);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
