//! Builders that turn cleaned records plus a configuration into report
//! sections. The CLI subcommands are thin wrappers over these.

use crate::concentration::{concentration_summary, ConcentrationSummary};
use crate::config::AnalysisConfig;
use crate::distribution::{build_distribution, top_k, DimensionKey, RecordFilter, Scope};
use crate::divergence::{asymmetry_report, orientation_index, AsymmetryReport, OrientationTable};
use crate::error::{Error, Result};
use crate::ingest::ShipmentRecord;
use crate::profile::{annual_totals, ffe_summary, log_histogram};
use crate::report::{ProfileSection, ShareTable};
use crate::temporal::{drift_series, yearly_distributions, DriftReport};

/// Concentration summaries plus top-N share tables for each scope.
///
/// With `skip_empty` a scope with no records is left out; otherwise it is
/// an error.
pub fn concentration_section(
    records: &[ShipmentRecord],
    dimension: DimensionKey,
    scopes: &[Scope],
    skip_empty: bool,
    config: &AnalysisConfig,
) -> Result<(Vec<ConcentrationSummary>, Vec<ShareTable>)> {
    let mut summaries = Vec::new();
    let mut shares = Vec::new();
    for &scope in scopes {
        let dist = match build_distribution(records, dimension, Some(&RecordFilter::scope(scope))) {
            Ok(d) => d,
            Err(Error::EmptyAfterFilter) if skip_empty => continue,
            Err(e) => return Err(e),
        };
        summaries.push(concentration_summary(&dist, scope, &config.cr_k)?);
        shares.push(ShareTable {
            dimension,
            scope,
            total_ffe: dist.total(),
            rows: top_k(&dist, config.top_n),
        });
    }
    Ok((summaries, shares))
}

/// Import-vs-export comparison per dimension, with orientation indices
/// whenever the industry dimension is requested.
pub fn asymmetry_section(
    records: &[ShipmentRecord],
    dimensions: &[DimensionKey],
    config: &AnalysisConfig,
) -> Result<(Vec<AsymmetryReport>, Option<OrientationTable>)> {
    let options = config.asymmetry_options();
    let mut reports = Vec::new();
    let mut orientation = None;
    for &dim in dimensions {
        let imports = build_distribution(records, dim, Some(&RecordFilter::scope(Scope::Import)))?;
        let exports = build_distribution(records, dim, Some(&RecordFilter::scope(Scope::Export)))?;
        reports.push(asymmetry_report(&imports, &exports, &options)?);
        if dim == DimensionKey::Industry {
            orientation = Some(orientation_index(
                &exports.share_map(),
                &imports.share_map(),
                config.epsilon,
            )?);
        }
    }
    Ok((reports, orientation))
}

pub fn drift_section(
    records: &[ShipmentRecord],
    dimensions: &[DimensionKey],
    scope: Scope,
    config: &AnalysisConfig,
) -> Result<Vec<DriftReport>> {
    let options = config.asymmetry_options();
    dimensions
        .iter()
        .map(|&dim| {
            let yearly = yearly_distributions(records, dim, Some(&RecordFilter::scope(scope)))?;
            drift_series(&yearly, scope, config.base_year, &options)
        })
        .collect()
}

pub fn profile_section(records: &[ShipmentRecord], config: &AnalysisConfig) -> Result<ProfileSection> {
    let values: Vec<f64> = records.iter().map(|r| r.ffe).collect();
    Ok(ProfileSection {
        summary: ffe_summary(records)?,
        annual: annual_totals(records)?,
        histogram: log_histogram(&values, config.histogram_bins)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{record, route_total_records};
    use crate::ingest::Direction;

    #[test]
    fn explicit_empty_scope_is_an_error() {
        let recs = route_total_records();
        let cfg = AnalysisConfig::default();
        let (s, _) =
            concentration_section(&recs, DimensionKey::Route, &Scope::ALL, true, &cfg).unwrap();
        assert_eq!(s.len(), 2);
        assert!(matches!(
            concentration_section(&recs, DimensionKey::Route, &[Scope::Export], false, &cfg),
            Err(Error::EmptyAfterFilter)
        ));
    }

    #[test]
    fn orientation_only_for_industry() {
        let mut recs = route_total_records();
        recs.push(record(2019, Direction::Export, "W1", 3.0));
        let cfg = AnalysisConfig::default();
        let (a, o) = asymmetry_section(&recs, &[DimensionKey::Route], &cfg).unwrap();
        assert_eq!(a.len(), 1);
        assert!(o.is_none());
        let (_, o) = asymmetry_section(&recs, &[DimensionKey::Industry], &cfg).unwrap();
        assert_eq!(o.unwrap().entries.len(), 1);
        assert!(asymmetry_section(&route_total_records(), &[DimensionKey::Route], &cfg).is_err());
    }
}
