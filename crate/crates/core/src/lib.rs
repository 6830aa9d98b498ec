//! Concentration, directional asymmetry and temporal drift metrics for
//! FFE-weighted containerized trade flows.
//!
//! The pipeline runs ingest → distribution → metrics → report:
//!
//! ```
//! use portflow::prelude::*;
//!
//! let csv = "Year,Direction,Route,Origin_Node,Destination_Node,Industry,FFE\n\
//!            2019,IMPORT,W3,NINGBO,NOUAKCHOTT,FOOD,3\n\
//!            2019,IMPORT,W1,ANTWERP,NOUAKCHOTT,FOOD,1\n";
//! let (records, report) =
//!     read_records(csv.as_bytes(), SourceLayout::Canonical, &IngestOptions::default()).unwrap();
//! assert_eq!(report.accepted_count, 2);
//! let routes = build_distribution(&records, DimensionKey::Route, None).unwrap();
//! assert_eq!(hhi(&routes.shares()).unwrap(), 0.625);
//! ```

pub mod analysis;
pub mod cli;
pub mod concentration;
pub mod config;
pub mod distribution;
pub mod divergence;
pub mod error;
pub mod fixtures;
pub mod ingest;
pub mod profile;
pub mod report;
pub mod synthgen;
pub mod temporal;

pub use error::{Error, Result};

/// The commonly used types and functions in one import.
pub mod prelude {
    pub use crate::concentration::{
        concentration_ratio, concentration_summary, gini, hhi, shannon_entropy, ConcentrationSummary,
    };
    pub use crate::config::AnalysisConfig;
    pub use crate::distribution::{
        align, build_distribution, top_k, DimensionKey, RecordFilter, Scope, WeightedDistribution,
    };
    pub use crate::divergence::{
        asymmetry_report, js_distance, kendall, orientation_index, spearman, AsymmetryOptions,
        AsymmetryReport, OrientationTable, RankOutcome,
    };
    pub use crate::error::{Error, Result};
    pub use crate::ingest::{
        read_records, write_canonical_csv, ColumnMapping, Direction, IngestOptions, IngestReport,
        Ingestor, ShipmentRecord, SourceLayout,
    };
    pub use crate::profile::{annual_totals, ffe_summary, log_histogram};
    pub use crate::report::{emit_plot_data, render, ReportBundle, ReportFormat, ReportMetadata};
    pub use crate::synthgen::{generate_exact, generate_sampled, SynthMode, SynthTarget};
    pub use crate::temporal::{drift_series, yearly_distributions, DriftReport};
}
