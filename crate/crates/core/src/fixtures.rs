//! Published reference values and small record builders used by the
//! examples and tests.

use crate::ingest::{Direction, ShipmentRecord};

/// Route FFE totals, all directions, 2019–2022.
pub const ROUTE_TOTALS: [(&str, f64); 7] = [
    ("W3", 90_349.0),
    ("W1", 84_678.0),
    ("W5", 24_248.0),
    ("W2", 22_576.0),
    ("W4", 10_776.5),
    ("X6", 4_100.5),
    ("UNKNOWN", 5.5),
];

/// Selected industry shares as `(industry, import share, export share)`.
pub const INDUSTRY_SHARES: [(&str, f64, f64); 5] = [
    ("FROZEN FISH & SEAFOOD", 0.0002, 0.5345),
    ("AGRICULTURE & FORESTRY", 0.1593, 0.2072),
    ("METAL IN SECONDARY FORM", 0.0183, 0.1175),
    ("INDUSTRY NOT CLASSIFIED", 0.1634, 0.0960),
    ("FOOD & BEVERAGE", 0.1384, 0.0098),
];

/// Annual totals as `(year, export FFE, import FFE)`.
pub const ANNUAL_TOTALS: [(i32, f64, f64); 4] = [
    (2019, 16_741.0, 41_678.5),
    (2020, 14_579.5, 44_700.0),
    (2021, 14_121.0, 46_778.5),
    (2022, 12_919.5, 45_215.5),
];

/// A record whose only varying category is the route.
pub fn record(year: i32, direction: Direction, route: &str, ffe: f64) -> ShipmentRecord {
    ShipmentRecord {
        year,
        direction,
        route: route.to_string(),
        origin_node: "ORIGIN".to_string(),
        destination_node: "DESTINATION".to_string(),
        industry: "INDUSTRY".to_string(),
        commodity: None,
        ffe,
    }
}

/// One record per reference route, all tagged 2019 imports.
pub fn route_total_records() -> Vec<ShipmentRecord> {
    ROUTE_TOTALS
        .iter()
        .map(|(route, ffe)| record(2019, Direction::Import, route, *ffe))
        .collect()
}
