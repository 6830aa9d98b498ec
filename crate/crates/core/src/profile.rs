//! Shipment-size summary, annual totals and log-scale histogram data.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{Direction, ShipmentRecord};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfeSummary {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single value.
    pub std: f64,
    pub min: f64,
    pub median: f64,
    pub p75: f64,
    pub max: f64,
}

/// Linear interpolation at position `(n - 1) * q` of sorted values.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn ffe_summary_values(values: &[f64]) -> Result<FfeSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std = if n < 2 {
        0.0
    } else {
        (sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    };
    Ok(FfeSummary {
        count: n,
        // Clamp: rounding in the mean of near-equal values can overshoot.
        mean: mean.clamp(sorted[0], sorted[n - 1]),
        std,
        min: sorted[0],
        median: quantile_sorted(&sorted, 0.5),
        p75: quantile_sorted(&sorted, 0.75),
        max: sorted[n - 1],
    })
}

pub fn ffe_summary(records: &[ShipmentRecord]) -> Result<FfeSummary> {
    ffe_summary_values(&records.iter().map(|r| r.ffe).collect::<Vec<_>>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualRow {
    pub year: i32,
    pub direction: Direction,
    pub total_ffe: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualTotals {
    pub rows: Vec<AnnualRow>,
}

impl AnnualTotals {
    pub fn grand_total(&self) -> f64 {
        self.rows.iter().map(|r| r.total_ffe).sum()
    }

    pub fn total(&self, year: i32, direction: Direction) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.year == year && r.direction == direction)
            .map(|r| r.total_ffe)
    }
}

/// FFE per observed (year, direction), sorted by year then direction.
pub fn annual_totals(records: &[ShipmentRecord]) -> Result<AnnualTotals> {
    if records.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut groups: BTreeMap<(i32, Direction), Vec<f64>> = BTreeMap::new();
    for r in records {
        groups.entry((r.year, r.direction)).or_default().push(r.ffe);
    }
    let rows = groups
        .into_iter()
        .map(|((year, direction), mut values)| {
            values.sort_by(f64::total_cmp);
            AnnualRow {
                year,
                direction,
                total_ffe: values.iter().sum(),
            }
        })
        .collect();
    Ok(AnnualTotals { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub count: usize,
}

/// Bins of equal width in `log10(ffe)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bins: Vec<HistogramBin>,
}

impl HistogramSpec {
    /// Bin edges in FFE units, `bins + 1` values.
    pub fn edges(&self) -> Vec<f64> {
        let mut edges: Vec<f64> = self.bins.iter().map(|b| b.bin_lo).collect();
        edges.extend(self.bins.last().map(|b| b.bin_hi));
        edges
    }

    pub fn counts(&self) -> Vec<usize> {
        self.bins.iter().map(|b| b.count).collect()
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Half-open bins `[lo, hi)` with the last bin closed. A constant input is
/// widened by half a decade on each side.
pub fn log_histogram(values: &[f64], bin_count: usize) -> Result<HistogramSpec> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bin_count == 0 {
        return Err(Error::InvalidParameter("bin_count must be at least 1".into()));
    }
    if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::NonPositiveMass);
    }
    let logs: Vec<f64> = values.iter().map(|v| v.log10()).collect();
    let (mut lo, mut hi) = logs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let degenerate = hi == lo;
    if degenerate {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bin_count as f64;
    let log_edges: Vec<f64> = (0..=bin_count)
        .map(|i| if i == bin_count { hi } else { lo + width * i as f64 })
        .collect();

    let mut counts = vec![0usize; bin_count];
    for v in &logs {
        // number of interior edges <= v
        let idx = log_edges[1..bin_count].partition_point(|e| e <= v);
        counts[idx] += 1;
    }
    let mut edges: Vec<f64> = log_edges.iter().map(|e| 10f64.powf(*e)).collect();
    if !degenerate {
        edges[0] = values.iter().copied().fold(f64::INFINITY, f64::min);
        edges[bin_count] = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            bin_lo: edges[i],
            bin_hi: edges[i + 1],
            count,
        })
        .collect();
    Ok(HistogramSpec { bins })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::record;
    use approx::assert_abs_diff_eq;

    #[test]
    fn singleton_summary() {
        let s = ffe_summary_values(&[2.0]).unwrap();
        assert_eq!(s.count, 1);
        assert_eq!((s.mean, s.std, s.min, s.median, s.p75, s.max), (2.0, 0.0, 2.0, 2.0, 2.0, 2.0));
        assert!(matches!(ffe_summary_values(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn small_summary() {
        // positions: median at 1.5 → 1.5, p75 at 2.25 → 2 + 0.25*2 = 2.5;
        // squared deviations 1+1+0+4 = 6, /3 = 2
        let s = ffe_summary_values(&[4.0, 1.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.median, 1.5);
        assert_eq!(s.p75, 2.5);
        assert_abs_diff_eq!(s.std, 2f64.sqrt(), epsilon = 1e-15);
        let s = ffe_summary_values(&[3.0; 5]).unwrap();
        assert_eq!((s.std, s.min, s.max), (0.0, 3.0, 3.0));
    }

    #[test]
    fn annual_rows_sorted() {
        let recs = [
            record(2020, Direction::Export, "W1", 1.5),
            record(2019, Direction::Import, "W1", 2.0),
            record(2019, Direction::Export, "W1", 1.0),
            record(2019, Direction::Import, "W2", 0.5),
        ];
        let a = annual_totals(&recs).unwrap();
        let keys: Vec<_> = a.rows.iter().map(|r| (r.year, r.direction)).collect();
        assert_eq!(
            keys,
            [(2019, Direction::Import), (2019, Direction::Export), (2020, Direction::Export)]
        );
        assert_eq!(a.total(2019, Direction::Import), Some(2.5));
        assert_eq!(a.grand_total(), 5.0);
    }

    #[test]
    fn histogram_boundary_convention() {
        let h = log_histogram(&[1.0, 10.0, 100.0], 2).unwrap();
        // 10 sits on the interior edge and goes right; 100 closes the last bin
        assert_eq!(h.counts(), vec![1, 2]);
        assert_eq!(h.edges(), vec![1.0, 10.0, 100.0]);
    }

    #[test]
    fn histogram_constant_input() {
        let h = log_histogram(&[4.0; 6], 3).unwrap();
        assert_eq!(h.total(), 6);
        assert_eq!(h.counts().iter().filter(|c| **c > 0).count(), 1);
        let h = log_histogram(&[4.0; 6], 1).unwrap();
        assert_eq!(h.counts(), vec![6]);
    }

    #[test]
    fn histogram_errors() {
        assert!(log_histogram(&[], 3).is_err());
        assert!(log_histogram(&[1.0], 0).is_err());
        assert!(matches!(log_histogram(&[1.0, 0.0], 2), Err(Error::NonPositiveMass)));
    }
}
