//! FFE-weighted categorical distributions.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Direction, ShipmentRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DimensionKey {
    Route,
    OriginNode,
    DestinationNode,
    Industry,
    Year,
    Direction,
}

impl DimensionKey {
    pub const ALL: [DimensionKey; 6] = [
        DimensionKey::Route,
        DimensionKey::OriginNode,
        DimensionKey::DestinationNode,
        DimensionKey::Industry,
        DimensionKey::Year,
        DimensionKey::Direction,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DimensionKey::Route => "ROUTE",
            DimensionKey::OriginNode => "ORIGIN_NODE",
            DimensionKey::DestinationNode => "DESTINATION_NODE",
            DimensionKey::Industry => "INDUSTRY",
            DimensionKey::Year => "YEAR",
            DimensionKey::Direction => "DIRECTION",
        }
    }

    /// Column heading used in rendered tables.
    pub fn label(self) -> &'static str {
        match self {
            DimensionKey::Route => "Route",
            DimensionKey::OriginNode => "Origin node",
            DimensionKey::DestinationNode => "Destination node",
            DimensionKey::Industry => "Industry",
            DimensionKey::Year => "Year",
            DimensionKey::Direction => "Direction",
        }
    }

    /// Category token of `record` along this dimension.
    pub fn category(self, record: &ShipmentRecord) -> String {
        match self {
            DimensionKey::Route => record.route.clone(),
            DimensionKey::OriginNode => record.origin_node.clone(),
            DimensionKey::DestinationNode => record.destination_node.clone(),
            DimensionKey::Industry => record.industry.clone(),
            DimensionKey::Year => record.year.to_string(),
            DimensionKey::Direction => record.direction.as_str().to_string(),
        }
    }
}

impl fmt::Display for DimensionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DimensionKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['-', ' '], "_");
        Ok(match key.as_str() {
            "route" => DimensionKey::Route,
            "origin" | "origin_node" => DimensionKey::OriginNode,
            "destination" | "destination_node" => DimensionKey::DestinationNode,
            "industry" => DimensionKey::Industry,
            "year" => DimensionKey::Year,
            "direction" => DimensionKey::Direction,
            _ => return Err(Error::InvalidParameter(format!("unknown dimension `{s}`"))),
        })
    }
}

/// Direction filter of an analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Scope {
    All,
    Import,
    Export,
}

impl Scope {
    pub const ALL: [Scope; 3] = [Scope::All, Scope::Import, Scope::Export];

    pub fn direction(self) -> Option<Direction> {
        match self {
            Scope::All => None,
            Scope::Import => Some(Direction::Import),
            Scope::Export => Some(Direction::Export),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scope::All => "All",
            Scope::Import => "Imports",
            Scope::Export => "Exports",
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scope::All => "ALL",
            Scope::Import => "IMPORT",
            Scope::Export => "EXPORT",
        })
    }
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Scope::All),
            "import" | "imports" => Ok(Scope::Import),
            "export" | "exports" => Ok(Scope::Export),
            _ => Err(Error::InvalidParameter(format!("unknown scope `{s}`"))),
        }
    }
}

/// Record predicate on direction and/or year.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecordFilter {
    pub direction: Option<Direction>,
    pub year: Option<i32>,
}

impl RecordFilter {
    pub fn scope(scope: Scope) -> Self {
        Self {
            direction: scope.direction(),
            year: None,
        }
    }

    pub fn with_year(mut self, year: i32) -> Self {
        self.year = Some(year);
        self
    }

    pub fn matches(&self, record: &ShipmentRecord) -> bool {
        self.direction.is_none_or(|d| d == record.direction)
            && self.year.is_none_or(|y| y == record.year)
    }
}

impl From<Scope> for RecordFilter {
    fn from(scope: Scope) -> Self {
        Self::scope(scope)
    }
}

/// FFE masses over the categories of one dimension.
///
/// Only categories with positive mass are stored, so `n()` counts observed
/// categories. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDistribution {
    dimension: DimensionKey,
    entries: BTreeMap<String, f64>,
    total: f64,
}

impl WeightedDistribution {
    /// Build directly from category masses. Masses must be positive and finite.
    pub fn from_masses<I, S>(dimension: DimensionKey, masses: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for (category, mass) in masses {
            if !(mass.is_finite() && mass > 0.0) {
                return Err(Error::NonPositiveMass);
            }
            grouped.entry(category.into()).or_default().push(mass);
        }
        Self::from_grouped(dimension, grouped)
    }

    fn from_grouped(dimension: DimensionKey, grouped: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        if grouped.is_empty() {
            return Err(Error::EmptyAfterFilter);
        }
        let entries: BTreeMap<String, f64> = grouped
            .into_iter()
            .map(|(category, mut values)| {
                // Sorted summation makes the mass independent of input order.
                values.sort_by(f64::total_cmp);
                (category, values.iter().sum())
            })
            .collect();
        let total = entries.values().sum();
        Ok(Self {
            dimension,
            entries,
            total,
        })
    }

    pub fn dimension(&self) -> DimensionKey {
        self.dimension
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn mass(&self, category: &str) -> Option<f64> {
        self.entries.get(category).copied()
    }

    pub fn share(&self, category: &str) -> Option<f64> {
        self.mass(category).map(|m| m / self.total)
    }

    /// Categories in lexicographic order.
    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Masses in lexicographic category order.
    pub fn masses(&self) -> Vec<f64> {
        self.entries.values().copied().collect()
    }

    /// Shares in lexicographic category order.
    pub fn shares(&self) -> Vec<f64> {
        self.entries.values().map(|m| m / self.total).collect()
    }

    pub fn share_map(&self) -> BTreeMap<String, f64> {
        self.entries
            .iter()
            .map(|(k, m)| (k.clone(), m / self.total))
            .collect()
    }
}

/// Aggregate record FFE by category along `dimension`.
pub fn build_distribution(
    records: &[ShipmentRecord],
    dimension: DimensionKey,
    filter: Option<&RecordFilter>,
) -> Result<WeightedDistribution> {
    let mut grouped: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records.iter().filter(|r| filter.is_none_or(|f| f.matches(r))) {
        grouped.entry(dimension.category(r)).or_default().push(r.ffe);
    }
    WeightedDistribution::from_grouped(dimension, grouped)
}

/// Two share vectors over the sorted union of supports.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedShares {
    pub categories: Vec<String>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

pub fn align(p: &WeightedDistribution, q: &WeightedDistribution) -> Result<AlignedShares> {
    if p.dimension != q.dimension {
        return Err(Error::DimensionMismatch {
            left: p.dimension.to_string(),
            right: q.dimension.to_string(),
        });
    }
    let mut categories: Vec<String> = p.entries.keys().chain(q.entries.keys()).cloned().collect();
    categories.sort();
    categories.dedup();
    let shares = |d: &WeightedDistribution| -> Vec<f64> {
        categories
            .iter()
            .map(|c| d.share(c).unwrap_or(0.0))
            .collect()
    };
    let (ps, qs) = (shares(p), shares(q));
    Ok(AlignedShares {
        categories,
        p: ps,
        q: qs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareRow {
    pub category: String,
    pub ffe: f64,
    pub share: f64,
}

/// The `k` largest categories by share; ties go to the lexicographically
/// smaller token.
pub fn top_k(dist: &WeightedDistribution, k: usize) -> Vec<ShareRow> {
    let mut rows: Vec<ShareRow> = dist
        .entries
        .iter()
        .map(|(c, m)| ShareRow {
            category: c.clone(),
            ffe: *m,
            share: m / dist.total,
        })
        .collect();
    rows.sort_by(|a, b| {
        b.ffe
            .total_cmp(&a.ffe)
            .then_with(|| a.category.cmp(&b.category))
    });
    rows.truncate(k);
    rows
}
