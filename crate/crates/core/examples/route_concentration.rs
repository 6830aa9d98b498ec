// Concentration indices and the top-3 share table for the published route
// totals.

use portflow::concentration::{concentration_summary, DEFAULT_CR_KS};
use portflow::distribution::{build_distribution, top_k, DimensionKey, Scope};
use portflow::fixtures::route_total_records;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let records = route_total_records();
    let routes = build_distribution(&records, DimensionKey::Route, None)?;
    let s = concentration_summary(&routes, Scope::All, &DEFAULT_CR_KS)?;

    println!("routes n={} total={} FFE", s.n, s.total_ffe);
    println!("HHI   {:.4}", s.hhi);
    println!("CR3   {:.4}", s.cr[&3]);
    println!("CR5   {:.4}", s.cr[&5]);
    println!("H     {:.4} nats (normalized {:.3})", s.entropy, s.entropy_norm);
    println!("Gini  {:.4}", s.gini);

    println!("\n| Route | Total FFE | Share |");
    for row in top_k(&routes, 3) {
        println!("| {} | {} | {:.4} |", row.category, row.ffe, row.share);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
