// Compare import and export industry mixes: Jensen–Shannon distance, rank
// agreement and per-industry orientation.

use portflow::distribution::{DimensionKey, WeightedDistribution};
use portflow::divergence::{asymmetry_report, orientation_index, AsymmetryOptions, DEFAULT_EPSILON};
use portflow::fixtures::INDUSTRY_SHARES;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let imports = WeightedDistribution::from_masses(
        DimensionKey::Industry,
        INDUSTRY_SHARES.iter().map(|(k, i, _)| (*k, *i)),
    )?;
    let exports = WeightedDistribution::from_masses(
        DimensionKey::Industry,
        INDUSTRY_SHARES.iter().map(|(k, _, e)| (*k, *e)),
    )?;

    let report = asymmetry_report(&imports, &exports, &AsymmetryOptions::default())?;
    println!("JSD (base 2) over {} industries: {:.4}", report.union_n, report.jsd);
    println!("Spearman: {:?}", report.spearman);
    println!("Kendall:  {:?}", report.kendall);

    let shares = |col: fn(&(&str, f64, f64)) -> f64| {
        INDUSTRY_SHARES
            .iter()
            .map(|t| (t.0.to_string(), col(t)))
            .collect()
    };
    let table = orientation_index(&shares(|t| t.2), &shares(|t| t.1), DEFAULT_EPSILON)?;
    for (industry, r) in &table.entries {
        println!("{industry:<26} R = {r:+.3}");
    }
    if let Some((k, r)) = table.most_export_oriented() {
        println!("most export-oriented: {k} ({r:.3})");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
