// Ingest raw customs exports for both directions and inspect the tallies.

use portflow::ingest::{Direction, IngestOptions, Ingestor, SourceLayout};

const IMPORTS: &str = "\
Year,Route,Port_of_Loading,Port_of_Discharge,Industry,FFE
2019,W3,Ningbo,Nouakchott,Food & Beverage,2
2019,W3,Ningbo,Nouakchott,Food & Beverage,2
2020,UNKNOWN,Antwerp,Nouakchott,Chemicals,1.5
2020,,Antwerp,Nouakchott,Chemicals,1.5
2021,W1,Valencia,Nouakchott,Chemicals,0
2022,W2,Tanger,Nouakchott,Chemicals,1,5
";

const EXPORTS: &str = "\
Year,Route,Export_Loading_Port,Place_of_Delivery,Industry,FFE
2019,W3,Nouadhibou,Huangpu,Frozen Fish & Seafood,4
2018,W1,Nouakchott,Rotterdam,Agriculture,1
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut ingestor = Ingestor::new(IngestOptions::default());
    ingestor.read_csv(IMPORTS.as_bytes(), SourceLayout::Raw(Direction::Import))?;
    ingestor.read_csv(EXPORTS.as_bytes(), SourceLayout::Raw(Direction::Export))?;
    let (records, report) = ingestor.finish()?;

    println!("accepted {} of {} rows", report.accepted_count, report.raw_row_count());
    for (reason, count) in &report.rejected {
        println!("  {:<18} {count}", reason.as_str());
    }
    println!(
        "duplicates {}, UNKNOWN routes {} ({} FFE)",
        report.duplicate_count, report.unknown_route_count, report.unknown_route_ffe
    );
    for r in &records {
        println!(
            "{} {:<6} {:<7} {:>10} -> {:<10} {}",
            r.year, r.direction, r.route, r.origin_node, r.destination_node, r.ffe
        );
    }
    // a blank route is a missing field; the literal UNKNOWN is kept
    assert_eq!(report.accepted_count, 4);
    assert_eq!(report.duplicate_count, 1);
    assert_eq!(report.unknown_route_count, 1);
    assert_eq!(report.rejected_total(), 4);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
