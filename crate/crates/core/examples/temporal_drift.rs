// Year-by-year route drift against 2019 with adjacent-year rank persistence.

use portflow::distribution::{DimensionKey, Scope};
use portflow::divergence::AsymmetryOptions;
use portflow::fixtures::record;
use portflow::ingest::Direction;
use portflow::temporal::{drift_series, yearly_distributions};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mix = [
        (2019, [6.0, 3.0, 1.0]),
        (2020, [5.5, 3.5, 1.0]),
        (2021, [4.0, 4.0, 2.0]),
        (2022, [3.0, 5.0, 2.0]),
    ];
    let records: Vec<_> = mix
        .iter()
        .flat_map(|(year, ffe)| {
            ["W3", "W1", "W5"]
                .iter()
                .zip(ffe)
                .map(|(route, f)| record(*year, Direction::Import, route, *f))
                .collect::<Vec<_>>()
        })
        .collect();

    let yearly = yearly_distributions(&records, DimensionKey::Route, None)?;
    let report = drift_series(&yearly, Scope::All, Some(2019), &AsymmetryOptions::default())?;
    println!("year   n  total    HHI     JSD vs {}", report.base_year);
    for row in &report.rows {
        println!(
            "{} {:>3} {:>6} {:.4}  {:.4}",
            row.year, row.n, row.total_ffe, row.hhi, row.jsd_vs_base
        );
    }
    for a in &report.adjacent {
        println!("{}->{} rho {:?}", a.from_year, a.to_year, a.spearman.statistic());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
