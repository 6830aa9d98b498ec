//! Per-year distributions, drift against a base year, and adjacent-year
//! rank persistence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::concentration::hhi;
use crate::distribution::{align, build_distribution, DimensionKey, RecordFilter, Scope, WeightedDistribution};
use crate::divergence::{js_distance, spearman_with, AsymmetryOptions, RankOutcome};
use crate::error::{Error, Result};
use crate::ingest::ShipmentRecord;

/// One distribution per observed year. A year filter on `filter` is ignored.
pub fn yearly_distributions(
    records: &[ShipmentRecord],
    dimension: DimensionKey,
    filter: Option<&RecordFilter>,
) -> Result<BTreeMap<i32, WeightedDistribution>> {
    let direction = filter.and_then(|f| f.direction);
    let mut years: Vec<i32> = records
        .iter()
        .filter(|r| direction.is_none_or(|d| d == r.direction))
        .map(|r| r.year)
        .collect();
    years.sort_unstable();
    years.dedup();
    if years.is_empty() {
        return Err(Error::EmptyAfterFilter);
    }
    years
        .into_iter()
        .map(|year| {
            let f = RecordFilter { direction, year: Some(year) };
            build_distribution(records, dimension, Some(&f)).map(|d| (year, d))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftRow {
    pub year: i32,
    pub n: usize,
    pub total_ffe: f64,
    pub hhi: f64,
    pub jsd_vs_base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjacentRank {
    pub from_year: i32,
    pub to_year: i32,
    pub spearman: RankOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftReport {
    pub dimension: DimensionKey,
    pub scope: Scope,
    pub base_year: i32,
    pub log_base: f64,
    pub rows: Vec<DriftRow>,
    pub adjacent: Vec<AdjacentRank>,
}

/// Drift of every year against `base_year` (earliest year when `None`).
///
/// Each comparison aligns the two years' supports only, not the union over
/// all years.
pub fn drift_series(
    yearly: &BTreeMap<i32, WeightedDistribution>,
    scope: Scope,
    base_year: Option<i32>,
    options: &AsymmetryOptions,
) -> Result<DriftReport> {
    let (&first, first_dist) = yearly.iter().next().ok_or(Error::EmptyAfterFilter)?;
    let base_year = base_year.unwrap_or(first);
    let base = yearly.get(&base_year).ok_or(Error::MissingBaseYear(base_year))?;

    let rows = yearly
        .iter()
        .map(|(&year, dist)| {
            let jsd_vs_base = if year == base_year {
                0.0
            } else {
                let aligned = align(base, dist)?;
                js_distance(&aligned.p, &aligned.q, options.log_base)?
            };
            Ok(DriftRow {
                year,
                n: dist.n(),
                total_ffe: dist.total(),
                hhi: hhi(&dist.shares())?,
                jsd_vs_base,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let adjacent = yearly
        .iter()
        .zip(yearly.iter().skip(1))
        .map(|((&from_year, a), (&to_year, b))| {
            let aligned = align(a, b)?;
            Ok(AdjacentRank {
                from_year,
                to_year,
                spearman: spearman_with(&aligned.p, &aligned.q, options.rank).into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(DriftReport {
        dimension: first_dist.dimension(),
        scope,
        base_year,
        log_base: options.log_base,
        rows,
        adjacent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::record;
    use crate::ingest::Direction;
    use approx::assert_abs_diff_eq;

    fn two_year(scale: f64) -> Vec<ShipmentRecord> {
        vec![
            record(2019, Direction::Import, "W1", 6.0),
            record(2019, Direction::Import, "W2", 4.0),
            record(2020, Direction::Import, "W1", 4.0 * scale),
            record(2020, Direction::Import, "W2", 6.0 * scale),
        ]
    }

    #[test]
    fn yearly_split() {
        let mut recs = two_year(1.0);
        recs.push(record(2022, Direction::Export, "W3", 2.0));
        let y = yearly_distributions(&recs, DimensionKey::Route, None).unwrap();
        assert_eq!(y.keys().copied().collect::<Vec<_>>(), [2019, 2020, 2022]);
        assert_eq!(y[&2019].total(), 10.0);
        let f = RecordFilter::scope(Scope::Export);
        let y = yearly_distributions(&recs, DimensionKey::Route, Some(&f)).unwrap();
        assert_eq!(y.len(), 1);
        let f = RecordFilter::scope(Scope::Export);
        assert!(yearly_distributions(&two_year(1.0), DimensionKey::Route, Some(&f)).is_err());
    }

    #[test]
    fn two_year_drift() {
        let y = yearly_distributions(&two_year(1.0), DimensionKey::Route, None).unwrap();
        let r = drift_series(&y, Scope::All, None, &Default::default()).unwrap();
        assert_eq!(r.base_year, 2019);
        assert_eq!(r.rows[0].jsd_vs_base, 0.0);
        assert_abs_diff_eq!(r.rows[1].jsd_vs_base, 0.1704, epsilon = 1e-4);
        assert_eq!(r.adjacent.len(), 1);

        let scaled = yearly_distributions(&two_year(10.0), DimensionKey::Route, None).unwrap();
        let s = drift_series(&scaled, Scope::All, None, &Default::default()).unwrap();
        assert_abs_diff_eq!(s.rows[1].jsd_vs_base, r.rows[1].jsd_vs_base, epsilon = 1e-12);
    }

    #[test]
    fn explicit_and_missing_base_year() {
        let y = yearly_distributions(&two_year(1.0), DimensionKey::Route, None).unwrap();
        let r = drift_series(&y, Scope::All, Some(2020), &Default::default()).unwrap();
        assert_eq!(r.rows[1].jsd_vs_base, 0.0);
        assert!(r.rows[0].jsd_vs_base > 0.0);
        assert!(matches!(
            drift_series(&y, Scope::All, Some(2018), &Default::default()),
            Err(Error::MissingBaseYear(2018))
        ));
    }

    #[test]
    fn identical_years_persist() {
        let recs: Vec<_> = (2019..=2022)
            .flat_map(|y| {
                [("W1", 5.0), ("W2", 3.0), ("W3", 1.0)]
                    .map(|(r, f)| record(y, Direction::Import, r, f))
            })
            .collect();
        let y = yearly_distributions(&recs, DimensionKey::Route, None).unwrap();
        let r = drift_series(&y, Scope::All, None, &Default::default()).unwrap();
        assert!(r.rows.iter().all(|row| row.jsd_vs_base == 0.0));
        assert!(r.adjacent.iter().all(|a| a.spearman.statistic() == Some(1.0)));
    }
}
