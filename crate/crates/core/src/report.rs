//! Report bundles and their JSON, CSV and Markdown renderings.
//!
//! JSON keeps full precision; CSV and Markdown show floats at four decimal
//! places. Sections that are empty are left out of every rendering.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::concentration::ConcentrationSummary;
use crate::distribution::{DimensionKey, Scope, ShareRow};
use crate::divergence::{AsymmetryReport, OrientationTable, PValueMethod, RankOutcome};
use crate::error::{Error, Result};
use crate::ingest::{write_canonical_csv, ColumnMapping, IngestReport, ShipmentRecord};
use crate::profile::{AnnualTotals, FfeSummary, HistogramSpec};
use crate::temporal::DriftReport;

pub const TOOL_NAME: &str = "portflow";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
            ReportFormat::Markdown => "markdown",
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(Error::UnsupportedFormat(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub tool: String,
    pub tool_version: String,
    /// Effective configuration after flag overrides.
    pub config: serde_json::Value,
    /// `sha256:` digest of the cleaned records, independent of their order.
    pub input_digest: String,
    pub timestamp: String,
}

impl ReportMetadata {
    pub fn new(config: serde_json::Value, records: &[ShipmentRecord], timestamp: String) -> Result<Self> {
        Ok(Self {
            tool: TOOL_NAME.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            config,
            input_digest: input_digest(records)?,
            timestamp,
        })
    }
}

/// SHA-256 over the canonical CSV of the records sorted into a fixed order.
pub fn input_digest(records: &[ShipmentRecord]) -> Result<String> {
    let mut sorted: Vec<&ShipmentRecord> = records.iter().collect();
    sorted.sort_by(|a, b| {
        (a.year, a.direction, &a.route, &a.origin_node, &a.destination_node, &a.industry, &a.commodity)
            .cmp(&(b.year, b.direction, &b.route, &b.origin_node, &b.destination_node, &b.industry, &b.commodity))
            .then(a.ffe.total_cmp(&b.ffe))
    });
    let owned: Vec<ShipmentRecord> = sorted.into_iter().cloned().collect();
    let mut bytes = Vec::new();
    write_canonical_csv(&mut bytes, &owned, &ColumnMapping::default())?;
    Ok(format!("sha256:{}", hex::encode(Sha256::digest(&bytes))))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareTable {
    pub dimension: DimensionKey,
    pub scope: Scope,
    pub total_ffe: f64,
    pub rows: Vec<ShareRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSection {
    pub summary: FfeSummary,
    pub annual: AnnualTotals,
    pub histogram: HistogramSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub metadata: ReportMetadata,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ingest: Option<IngestReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub concentration: Vec<ConcentrationSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shares: Vec<ShareTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub asymmetry: Vec<AsymmetryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation: Option<OrientationTable>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub drift: Vec<DriftReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSection>,
}

impl ReportBundle {
    pub fn new(metadata: ReportMetadata) -> Self {
        Self {
            metadata,
            ingest: None,
            concentration: Vec::new(),
            shares: Vec::new(),
            asymmetry: Vec::new(),
            orientation: None,
            drift: Vec::new(),
            profile: None,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }
}

enum Cell {
    Text(String),
    Int(i64),
    Num(f64),
    P(f64),
}

impl Cell {
    fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn render(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.4}"),
            Cell::P(v) if *v < 1e-4 => "<0.0001".to_string(),
            Cell::P(v) => format!("{v:.4}"),
        }
    }
}

struct Table {
    id: String,
    title: String,
    headers: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(id: impl Into<String>, title: impl Into<String>, headers: &[&str]) -> Self {
        Self {
            id: id.into(),
            title: title.into(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

fn method_label(method: PValueMethod) -> &'static str {
    match method {
        PValueMethod::ExactPermutation => "exact",
        PValueMethod::TDistribution => "t",
        PValueMethod::NormalApproximation => "normal",
    }
}

fn rank_cells(outcome: &RankOutcome) -> [Cell; 3] {
    match outcome {
        RankOutcome::Defined(t) => [
            Cell::Num(t.statistic),
            Cell::P(t.p_value),
            Cell::text(method_label(t.method)),
        ],
        RankOutcome::Undefined { .. } => [
            Cell::text("undefined"),
            Cell::text("undefined"),
            Cell::text("-"),
        ],
    }
}

fn slug(s: &str) -> String {
    s.to_ascii_lowercase()
}

fn tables(bundle: &ReportBundle) -> Vec<Table> {
    let mut out = Vec::new();

    if let Some(ingest) = &bundle.ingest {
        let mut t = Table::new("ingest", "Ingestion", &["Metric", "Value"]);
        t.rows.push(vec![Cell::text("accepted"), Cell::Int(ingest.accepted_count as i64)]);
        for (reason, count) in &ingest.rejected {
            t.rows.push(vec![
                Cell::text(format!("rejected_{}", reason.as_str())),
                Cell::Int(*count as i64),
            ]);
        }
        t.rows.push(vec![Cell::text("duplicates"), Cell::Int(ingest.duplicate_count as i64)]);
        t.rows.push(vec![
            Cell::text("unknown_route_records"),
            Cell::Int(ingest.unknown_route_count as i64),
        ]);
        t.rows.push(vec![Cell::text("unknown_route_ffe"), Cell::Num(ingest.unknown_route_ffe)]);
        out.push(t);
    }

    if !bundle.concentration.is_empty() {
        let mut ks: Vec<usize> = bundle
            .concentration
            .iter()
            .flat_map(|s| s.cr.keys().copied())
            .collect();
        ks.sort_unstable();
        ks.dedup();
        let cr_headers: Vec<String> = ks.iter().map(|k| format!("CR{k}")).collect();
        let mut headers = vec!["Dimension", "Scope", "n", "Total FFE", "HHI"];
        headers.extend(cr_headers.iter().map(String::as_str));
        headers.extend(["Entropy", "Normalized entropy", "Gini"]);
        let mut t = Table::new("concentration", "Concentration", &headers);
        for s in &bundle.concentration {
            let mut row = vec![
                Cell::text(s.dimension.label()),
                Cell::text(s.scope.label()),
                Cell::Int(s.n as i64),
                Cell::Num(s.total_ffe),
                Cell::Num(s.hhi),
            ];
            row.extend(ks.iter().map(|k| match s.cr.get(k) {
                Some(v) => Cell::Num(*v),
                None => Cell::text("-"),
            }));
            row.extend([Cell::Num(s.entropy), Cell::Num(s.entropy_norm), Cell::Num(s.gini)]);
            t.rows.push(row);
        }
        out.push(t);
    }

    for share in &bundle.shares {
        let mut t = Table::new(
            format!("shares.{}.{}", slug(share.dimension.as_str()), slug(&share.scope.to_string())),
            format!("Top shares: {} ({})", share.dimension.label(), share.scope.label()),
            &[share.dimension.label(), "Total FFE", "Share"],
        );
        for row in &share.rows {
            t.rows.push(vec![Cell::text(&row.category), Cell::Num(row.ffe), Cell::Num(row.share)]);
        }
        out.push(t);
    }

    if !bundle.asymmetry.is_empty() {
        let mut t = Table::new(
            "asymmetry",
            "Directional asymmetry (imports vs exports)",
            &[
                "Dimension", "Union n", "JSD", "Spearman rho", "Spearman p", "Spearman method",
                "Kendall tau", "Kendall p", "Kendall method",
            ],
        );
        for a in &bundle.asymmetry {
            let mut row = vec![
                Cell::text(a.dimension.label()),
                Cell::Int(a.union_n as i64),
                Cell::Num(a.jsd),
            ];
            row.extend(rank_cells(&a.spearman));
            row.extend(rank_cells(&a.kendall));
            t.rows.push(row);
        }
        out.push(t);
    }

    if let Some(o) = &bundle.orientation {
        let mut t = Table::new(
            "orientation",
            format!("Orientation index (epsilon = {:e})", o.epsilon),
            &["Industry", "R"],
        );
        let mut entries: Vec<(&String, &f64)> = o.entries.iter().collect();
        entries.sort_by(|a, b| b.1.total_cmp(a.1).then_with(|| a.0.cmp(b.0)));
        for (k, v) in entries {
            t.rows.push(vec![Cell::text(k), Cell::Num(*v)]);
        }
        out.push(t);
    }

    for d in &bundle.drift {
        let id = format!("drift.{}.{}", slug(d.dimension.as_str()), slug(&d.scope.to_string()));
        let mut t = Table::new(
            id.clone(),
            format!(
                "Drift: {} ({}), base year {}",
                d.dimension.label(),
                d.scope.label(),
                d.base_year
            ),
            &["Year", "n", "Total FFE", "HHI", "JSD vs base"],
        );
        for r in &d.rows {
            t.rows.push(vec![
                Cell::Int(r.year.into()),
                Cell::Int(r.n as i64),
                Cell::Num(r.total_ffe),
                Cell::Num(r.hhi),
                Cell::Num(r.jsd_vs_base),
            ]);
        }
        out.push(t);
        let mut t = Table::new(
            format!("{id}.adjacent"),
            format!("Adjacent-year rank persistence: {} ({})", d.dimension.label(), d.scope.label()),
            &["From", "To", "Spearman rho", "p", "Method"],
        );
        for a in &d.adjacent {
            let mut row = vec![Cell::Int(a.from_year.into()), Cell::Int(a.to_year.into())];
            row.extend(rank_cells(&a.spearman));
            t.rows.push(row);
        }
        out.push(t);
    }

    if let Some(p) = &bundle.profile {
        let s = &p.summary;
        let mut t = Table::new("profile.summary", "Shipment size (FFE)", &["Statistic", "Value"]);
        t.rows.push(vec![Cell::text("Count"), Cell::Int(s.count as i64)]);
        for (name, v) in [
            ("Mean", s.mean),
            ("Std", s.std),
            ("Min", s.min),
            ("Median", s.median),
            ("75%", s.p75),
            ("Max", s.max),
        ] {
            t.rows.push(vec![Cell::text(name), Cell::Num(v)]);
        }
        out.push(t);

        let mut t = Table::new("profile.annual", "Annual totals", &["Year", "Direction", "Total FFE"]);
        for r in &p.annual.rows {
            t.rows.push(vec![
                Cell::Int(r.year.into()),
                Cell::text(r.direction.as_str()),
                Cell::Num(r.total_ffe),
            ]);
        }
        out.push(t);

        let mut t = Table::new(
            "profile.histogram",
            "Shipment size histogram (log10 bins)",
            &["Bin low", "Bin high", "Count"],
        );
        for b in &p.histogram.bins {
            t.rows.push(vec![Cell::Num(b.bin_lo), Cell::Num(b.bin_hi), Cell::Int(b.count as i64)]);
        }
        out.push(t);
    }
    out
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn render_markdown(bundle: &ReportBundle) -> Vec<u8> {
    let m = &bundle.metadata;
    let mut s = String::new();
    s.push_str(&format!("# {} report\n\n", m.tool));
    s.push_str(&format!("- Version: {}\n", m.tool_version));
    s.push_str(&format!("- Input digest: {}\n", m.input_digest));
    s.push_str(&format!("- Generated: {}\n", m.timestamp));
    for t in tables(bundle) {
        s.push_str(&format!("\n## {}\n\n", t.title));
        let headers: Vec<String> = t.headers.iter().map(|h| md_escape(h)).collect();
        s.push_str(&format!("| {} |\n", headers.join(" | ")));
        let align: Vec<&str> = (0..t.headers.len())
            .map(|i| match t.rows.first().map(|r| &r[i]) {
                Some(Cell::Text(_)) | None => "---",
                _ => "---:",
            })
            .collect();
        s.push_str(&format!("| {} |\n", align.join(" | ")));
        for row in &t.rows {
            let cells: Vec<String> = row.iter().map(|c| md_escape(&c.render())).collect();
            s.push_str(&format!("| {} |\n", cells.join(" | ")));
        }
    }
    s.into_bytes()
}

fn csv_block(rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Blocks separated by a blank line; each row starts with its table id.
fn render_csv(bundle: &ReportBundle) -> Result<Vec<u8>> {
    let m = &bundle.metadata;
    let mut out = csv_block(
        std::iter::once(vec!["table".into(), "key".into(), "value".into()]).chain(
            [
                ("tool", &m.tool),
                ("tool_version", &m.tool_version),
                ("input_digest", &m.input_digest),
                ("timestamp", &m.timestamp),
            ]
            .into_iter()
            .map(|(k, v)| vec!["metadata".to_string(), k.to_string(), v.clone()]),
        ),
    )?;
    for t in tables(bundle) {
        let header = std::iter::once("table".to_string()).chain(t.headers.iter().cloned());
        let rows = t.rows.iter().map(|row| {
            std::iter::once(t.id.clone())
                .chain(row.iter().map(Cell::render))
                .collect::<Vec<_>>()
        });
        out.push(b'\n');
        out.extend(csv_block(std::iter::once(header.collect()).chain(rows))?);
    }
    Ok(out)
}

/// Serialize `bundle`; identical bundles give identical bytes.
pub fn render(bundle: &ReportBundle, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut bytes = serde_json::to_vec_pretty(bundle)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::Csv => render_csv(bundle),
        ReportFormat::Markdown => Ok(render_markdown(bundle)),
    }
}

/// Replace `path` with `bytes` via a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const ANNUAL_FILE: &str = "annual.csv";

/// Write `histogram.csv` and `annual.csv` for external plotting.
pub fn emit_plot_data(bundle: &ReportBundle, dir: &Path) -> Result<Vec<PathBuf>> {
    let profile = bundle
        .profile
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("report has no profile section".into()))?;
    fs::create_dir_all(dir)?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["bin_lo", "bin_hi", "count"])?;
    for b in &profile.histogram.bins {
        w.write_record([b.bin_lo.to_string(), b.bin_hi.to_string(), b.count.to_string()])?;
    }
    let histogram = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["year", "direction", "total_ffe"])?;
    for r in &profile.annual.rows {
        w.write_record([r.year.to_string(), r.direction.to_string(), r.total_ffe.to_string()])?;
    }
    let annual = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;

    let paths = vec![dir.join(HISTOGRAM_FILE), dir.join(ANNUAL_FILE)];
    write_atomic(&paths[0], &histogram)?;
    write_atomic(&paths[1], &annual)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concentration::{concentration_summary, DEFAULT_CR_KS};
    use crate::distribution::{top_k, WeightedDistribution};
    use crate::fixtures::{route_total_records, ROUTE_TOTALS};

    fn bundle() -> ReportBundle {
        let meta = ReportMetadata::new(serde_json::json!({}), &route_total_records(), "T".into()).unwrap();
        let dist = WeightedDistribution::from_masses(DimensionKey::Route, ROUTE_TOTALS).unwrap();
        let mut b = ReportBundle::new(meta);
        b.concentration
            .push(concentration_summary(&dist, Scope::All, &DEFAULT_CR_KS).unwrap());
        b.shares.push(ShareTable {
            dimension: DimensionKey::Route,
            scope: Scope::All,
            total_ffe: dist.total(),
            rows: top_k(&dist, 7),
        });
        b
    }

    #[test]
    fn markdown_share_table_layout() {
        let md = String::from_utf8(render(&bundle(), ReportFormat::Markdown).unwrap()).unwrap();
        assert!(md.contains("| Route | Total FFE | Share |"));
        let w3 = md.find("| W3 | 90349.0000 | 0.3816 |").unwrap();
        let w1 = md.find("| W1 | 84678.0000 | 0.3577 |").unwrap();
        let w5 = md.find("| W5 | 24248.0000 | 0.1024 |").unwrap();
        assert!(w3 < w1 && w1 < w5);
        assert!(md.contains("| Route | All | 7 | 236733.5000 | 0.2956 | 0.8418 | 0.9827 |"));
    }

    #[test]
    fn empty_sections_omitted() {
        let json = String::from_utf8(render(&bundle(), ReportFormat::Json).unwrap()).unwrap();
        for key in ["\"ingest\"", "\"asymmetry\"", "\"orientation\"", "\"drift\"", "\"profile\""] {
            assert!(!json.contains(key), "{key}");
        }
        assert!(!json.contains("null"));
    }

    #[test]
    fn json_round_trip_and_determinism() {
        let b = bundle();
        let bytes = render(&b, ReportFormat::Json).unwrap();
        assert_eq!(ReportBundle::from_json(&bytes).unwrap(), b);
        for f in [ReportFormat::Json, ReportFormat::Csv, ReportFormat::Markdown] {
            assert_eq!(render(&b, f).unwrap(), render(&b, f).unwrap());
        }
    }

    #[test]
    fn format_parsing() {
        assert_eq!("MD".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert!(matches!("xlsx".parse::<ReportFormat>(), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn digest_ignores_order() {
        let mut recs = route_total_records();
        let a = input_digest(&recs).unwrap();
        recs.reverse();
        assert_eq!(a, input_digest(&recs).unwrap());
        recs[0].ffe += 1.0;
        assert_ne!(a, input_digest(&recs).unwrap());
    }

    #[test]
    fn plot_data_requires_profile() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_plot_data(&bundle(), dir.path()).is_err());
    }
}
