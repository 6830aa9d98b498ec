//! Parsing, normalization and filtering of shipment-level CSV records.
//!
//! Two source layouts are supported. The canonical layout carries one
//! `Direction` column and already-mapped `Origin_Node`/`Destination_Node`
//! columns. The raw layout is direction-specific: import files carry port of
//! loading / port of discharge, export files carry export loading port /
//! place of delivery, and the direction is supplied per file.
//!
//! Filtering never imputes. A record missing any required field, carrying a
//! malformed number, a non-positive FFE or a year outside the configured range
//! is dropped and tallied in [`IngestReport`]. Full-row duplicates and
//! `UNKNOWN` routes are kept.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tokens treated as missing after trimming, compared case-insensitively.
pub const NULL_LIKE_TOKENS: [&str; 5] = ["", "NULL", "N/A", "NA", "-"];

/// Route label the customs data uses for unclassified corridors.
pub const UNKNOWN_ROUTE: &str = "UNKNOWN";

const DEFAULT_TAXONOMY_CSV: &str = include_str!("../data/route_taxonomy.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Direction {
    Import,
    Export,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Import => "IMPORT",
            Direction::Export => "EXPORT",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match normalize_text(s).as_deref() {
            Some("IMPORT") => Ok(Direction::Import),
            Some("EXPORT") => Ok(Direction::Export),
            _ => Err(Error::InvalidParameter(format!("unknown direction `{s}`"))),
        }
    }
}

/// One cleaned containerized movement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShipmentRecord {
    pub year: i32,
    pub direction: Direction,
    pub route: String,
    pub origin_node: String,
    pub destination_node: String,
    pub industry: String,
    pub commodity: Option<String>,
    /// Forty-foot equivalent units, strictly positive.
    pub ffe: f64,
}

/// Trim, collapse internal whitespace and uppercase a raw text field.
///
/// Returns `None` for empty and null-like values (see [`NULL_LIKE_TOKENS`]).
pub fn normalize_text(raw: &str) -> Option<String> {
    let collapsed = raw.split_whitespace().collect::<Vec<_>>().join(" ");
    let upper = collapsed.to_uppercase();
    if NULL_LIKE_TOKENS.contains(&upper.as_str()) {
        None
    } else {
        Some(upper)
    }
}

/// Source column names. Defaults follow the canonical variable names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMapping {
    pub year: String,
    pub direction: String,
    pub route: String,
    pub origin_node: String,
    pub destination_node: String,
    pub industry: String,
    pub commodity: String,
    pub ffe: String,
    pub port_of_loading: String,
    pub port_of_discharge: String,
    pub export_loading_port: String,
    pub place_of_delivery: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        Self {
            year: "Year".into(),
            direction: "Direction".into(),
            route: "Route".into(),
            origin_node: "Origin_Node".into(),
            destination_node: "Destination_Node".into(),
            industry: "Industry".into(),
            commodity: "Commodity".into(),
            ffe: "FFE".into(),
            port_of_loading: "Port_of_Loading".into(),
            port_of_discharge: "Port_of_Discharge".into(),
            export_loading_port: "Export_Loading_Port".into(),
            place_of_delivery: "Place_of_Delivery".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "layout", content = "direction")]
pub enum SourceLayout {
    /// Canonical column names with a per-row direction column.
    Canonical,
    /// Direction-specific customs export; the direction is fixed per file.
    Raw(Direction),
}

/// Parsed state of a numeric field before validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericField<T> {
    Missing,
    Invalid,
    Value(T),
}

/// A harmonized row that has not been validated yet.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRecord {
    pub year: NumericField<i32>,
    pub direction: Option<Direction>,
    pub route: Option<String>,
    pub origin_node: Option<String>,
    pub destination_node: Option<String>,
    pub industry: Option<String>,
    pub commodity: Option<String>,
    pub ffe: NumericField<f64>,
}

fn parse_year(raw: &str) -> NumericField<i32> {
    let Some(token) = normalize_text(raw) else {
        return NumericField::Missing;
    };
    if let Ok(v) = token.parse::<i32>() {
        return NumericField::Value(v);
    }
    // Spreadsheet exports frequently write integral years as `2019.0`.
    match parse_decimal(&token) {
        Some(v) if v.fract() == 0.0 && v.abs() < i32::MAX as f64 => NumericField::Value(v as i32),
        _ => NumericField::Invalid,
    }
}

fn parse_ffe(raw: &str) -> NumericField<f64> {
    match normalize_text(raw) {
        None => NumericField::Missing,
        Some(token) => parse_decimal(&token).map_or(NumericField::Invalid, NumericField::Value),
    }
}

/// Decimal-point numbers only; no locale commas, no `inf`/`NaN`.
fn parse_decimal(token: &str) -> Option<f64> {
    let ok = token
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'E'));
    if !ok {
        return None;
    }
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Column positions resolved once per header.
#[derive(Debug, Clone)]
struct RowSchema {
    layout: SourceLayout,
    year: usize,
    direction: Option<usize>,
    route: usize,
    origin: usize,
    destination: usize,
    industry: usize,
    commodity: Option<usize>,
    ffe: usize,
}

impl RowSchema {
    fn resolve<'a, I>(headers: I, layout: SourceLayout, columns: &ColumnMapping) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let index: HashMap<String, usize> = headers
            .into_iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_lowercase(), i))
            .collect();
        let find = |name: &str| index.get(&name.trim().to_lowercase()).copied();
        let require = |name: &str| {
            find(name).ok_or_else(|| Error::MissingColumn {
                column: name.to_string(),
            })
        };

        let (direction, origin, destination) = match layout {
            SourceLayout::Canonical => (
                Some(require(&columns.direction)?),
                require(&columns.origin_node)?,
                require(&columns.destination_node)?,
            ),
            SourceLayout::Raw(Direction::Import) => (
                None,
                require(&columns.port_of_loading)?,
                require(&columns.port_of_discharge)?,
            ),
            SourceLayout::Raw(Direction::Export) => (
                None,
                require(&columns.export_loading_port)?,
                require(&columns.place_of_delivery)?,
            ),
        };

        Ok(Self {
            layout,
            year: require(&columns.year)?,
            direction,
            route: require(&columns.route)?,
            origin,
            destination,
            industry: require(&columns.industry)?,
            commodity: find(&columns.commodity),
            ffe: require(&columns.ffe)?,
        })
    }

    fn extract<'a>(&self, field: impl Fn(usize) -> Option<&'a str>) -> CandidateRecord {
        let text = |idx: usize| field(idx).and_then(normalize_text);
        let direction = match self.layout {
            SourceLayout::Raw(d) => Some(d),
            // An unrecognized direction token counts as a missing field.
            SourceLayout::Canonical => self
                .direction
                .and_then(&field)
                .and_then(|raw| raw.parse().ok()),
        };
        CandidateRecord {
            year: field(self.year).map_or(NumericField::Missing, parse_year),
            direction,
            route: text(self.route),
            origin_node: text(self.origin),
            destination_node: text(self.destination),
            industry: text(self.industry),
            commodity: self.commodity.and_then(text),
            ffe: field(self.ffe).map_or(NumericField::Missing, parse_ffe),
        }
    }
}

/// Map one raw row (column name → value) to a candidate record.
///
/// Imports take origin/destination from port of loading/discharge; exports
/// from export loading port/place of delivery. Fails only when a configured
/// column is absent from the row's keys.
pub fn harmonize(
    raw_row: &HashMap<String, String>,
    layout: SourceLayout,
    columns: &ColumnMapping,
) -> Result<CandidateRecord> {
    let headers: Vec<&str> = raw_row.keys().map(String::as_str).collect();
    let schema = RowSchema::resolve(headers.iter().copied(), layout, columns)?;
    Ok(schema.extract(|i| raw_row.get(headers[i]).map(String::as_str)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    MissingField,
    InvalidNumeric,
    NonpositiveFfe,
    YearOutOfRange,
}

impl RejectReason {
    pub const ALL: [RejectReason; 4] = [
        RejectReason::MissingField,
        RejectReason::InvalidNumeric,
        RejectReason::NonpositiveFfe,
        RejectReason::YearOutOfRange,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::MissingField => "missing_field",
            RejectReason::InvalidNumeric => "invalid_numeric",
            RejectReason::NonpositiveFfe => "nonpositive_ffe",
            RejectReason::YearOutOfRange => "year_out_of_range",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub accepted_count: usize,
    /// Every reason is always present, zero when unused.
    pub rejected: BTreeMap<RejectReason, usize>,
    /// Informational: duplicates are retained in `accepted_count`.
    pub duplicate_count: usize,
    pub unknown_route_count: usize,
    pub unknown_route_ffe: f64,
}

impl Default for IngestReport {
    fn default() -> Self {
        Self {
            accepted_count: 0,
            rejected: RejectReason::ALL.iter().map(|r| (*r, 0)).collect(),
            duplicate_count: 0,
            unknown_route_count: 0,
            unknown_route_ffe: 0.0,
        }
    }
}

impl IngestReport {
    pub fn rejected_total(&self) -> usize {
        self.rejected.values().sum()
    }

    pub fn raw_row_count(&self) -> usize {
        self.accepted_count + self.rejected_total()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestOptions {
    pub year_min: i32,
    pub year_max: i32,
    /// Single-byte field delimiter.
    pub delimiter: char,
    pub columns: ColumnMapping,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            year_min: 2019,
            year_max: 2022,
            delimiter: ',',
            columns: ColumnMapping::default(),
        }
    }
}

impl IngestOptions {
    fn delimiter_byte(&self) -> Result<u8> {
        u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| Error::Config(format!("delimiter `{}` is not ASCII", self.delimiter)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct RowKey {
    year: i32,
    direction: Direction,
    fields: [String; 4],
    commodity: Option<String>,
    ffe_bits: u64,
}

/// Incremental validator; accepts candidates from any number of sources and
/// keeps survivors in arrival order.
#[derive(Debug)]
pub struct Ingestor {
    options: IngestOptions,
    records: Vec<ShipmentRecord>,
    report: IngestReport,
    seen: HashSet<RowKey>,
    unknown_ffe: Vec<f64>,
}

impl Ingestor {
    pub fn new(options: IngestOptions) -> Self {
        Self {
            options,
            records: Vec::new(),
            report: IngestReport::default(),
            seen: HashSet::new(),
            unknown_ffe: Vec::new(),
        }
    }

    pub fn options(&self) -> &IngestOptions {
        &self.options
    }

    fn reject(&mut self, reason: RejectReason) {
        *self.report.rejected.entry(reason).or_default() += 1;
    }

    pub fn push(&mut self, candidate: CandidateRecord) {
        let CandidateRecord {
            year,
            direction,
            route,
            origin_node,
            destination_node,
            industry,
            commodity,
            ffe,
        } = candidate;

        let (Some(direction), Some(route), Some(origin), Some(destination), Some(industry)) =
            (direction, route, origin_node, destination_node, industry)
        else {
            return self.reject(RejectReason::MissingField);
        };
        let (year, ffe) = match (year, ffe) {
            (NumericField::Missing, _) | (_, NumericField::Missing) => {
                return self.reject(RejectReason::MissingField)
            }
            (NumericField::Invalid, _) | (_, NumericField::Invalid) => {
                return self.reject(RejectReason::InvalidNumeric)
            }
            (NumericField::Value(y), NumericField::Value(f)) => (y, f),
        };
        if ffe <= 0.0 {
            return self.reject(RejectReason::NonpositiveFfe);
        }
        if year < self.options.year_min || year > self.options.year_max {
            return self.reject(RejectReason::YearOutOfRange);
        }

        let key = RowKey {
            year,
            direction,
            fields: [
                route.clone(),
                origin.clone(),
                destination.clone(),
                industry.clone(),
            ],
            commodity: commodity.clone(),
            ffe_bits: ffe.to_bits(),
        };
        if !self.seen.insert(key) {
            self.report.duplicate_count += 1;
        }
        if route == UNKNOWN_ROUTE {
            self.report.unknown_route_count += 1;
            self.unknown_ffe.push(ffe);
        }
        self.report.accepted_count += 1;
        self.records.push(ShipmentRecord {
            year,
            direction,
            route,
            origin_node: origin,
            destination_node: destination,
            industry,
            commodity,
            ffe,
        });
    }

    /// Stream one CSV source through the validator.
    pub fn read_csv<R: Read>(&mut self, reader: R, layout: SourceLayout) -> Result<()> {
        let mut csv = csv::ReaderBuilder::new()
            .delimiter(self.options.delimiter_byte()?)
            .flexible(true)
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        let schema = RowSchema::resolve(headers.iter(), layout, &self.options.columns)?;
        let mut row = csv::StringRecord::new();
        while csv.read_record(&mut row)? {
            let mut candidate = schema.extract(|i| row.get(i));
            // Surplus fields (typically an unquoted `1,5`) misalign the
            // columns, so the numeric fields cannot be trusted.
            if row.len() > headers.len() && candidate.ffe != NumericField::Missing {
                candidate.ffe = NumericField::Invalid;
            }
            self.push(candidate);
        }
        Ok(())
    }

    /// Finish ingestion; errors when nothing survived.
    pub fn finish(self) -> Result<(Vec<ShipmentRecord>, IngestReport)> {
        let (records, report) = self.into_parts();
        if records.is_empty() {
            return Err(Error::NoRecords);
        }
        Ok((records, report))
    }

    /// Like [`Ingestor::finish`] but always returns the tallies.
    pub fn into_parts(mut self) -> (Vec<ShipmentRecord>, IngestReport) {
        // Sorted so the total does not depend on arrival order.
        self.unknown_ffe.sort_by(f64::total_cmp);
        self.report.unknown_route_ffe = self.unknown_ffe.iter().sum();
        (self.records, self.report)
    }
}

/// Validate harmonized candidates, keeping survivors in input order.
pub fn validate_and_filter<I>(
    candidates: I,
    options: &IngestOptions,
) -> Result<(Vec<ShipmentRecord>, IngestReport)>
where
    I: IntoIterator<Item = CandidateRecord>,
{
    let mut ingestor = Ingestor::new(options.clone());
    candidates.into_iter().for_each(|c| ingestor.push(c));
    ingestor.finish()
}

/// Convenience wrapper: ingest one CSV source.
pub fn read_records<R: Read>(
    reader: R,
    layout: SourceLayout,
    options: &IngestOptions,
) -> Result<(Vec<ShipmentRecord>, IngestReport)> {
    let mut ingestor = Ingestor::new(options.clone());
    ingestor.read_csv(reader, layout)?;
    ingestor.finish()
}

/// Write records in the canonical layout.
pub fn write_canonical_csv<W: std::io::Write>(
    writer: W,
    records: &[ShipmentRecord],
    columns: &ColumnMapping,
) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    csv.write_record([
        &columns.year,
        &columns.direction,
        &columns.route,
        &columns.origin_node,
        &columns.destination_node,
        &columns.industry,
        &columns.commodity,
        &columns.ffe,
    ])?;
    for r in records {
        csv.write_record([
            r.year.to_string().as_str(),
            r.direction.as_str(),
            &r.route,
            &r.origin_node,
            &r.destination_node,
            &r.industry,
            r.commodity.as_deref().unwrap_or(""),
            // Shortest representation that round-trips exactly.
            r.ffe.to_string().as_str(),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RouteClass {
    pub code: String,
    pub description: String,
    pub classified: bool,
}

/// Route code → service description lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteTaxonomy {
    entries: BTreeMap<String, String>,
}

impl Default for RouteTaxonomy {
    fn default() -> Self {
        Self::from_csv(DEFAULT_TAXONOMY_CSV.as_bytes()).expect("bundled taxonomy is valid")
    }
}

impl RouteTaxonomy {
    /// Read `code,description` pairs (with header). Codes must be unique.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let mut entries = BTreeMap::new();
        for row in csv.records() {
            let row = row?;
            let (Some(code), Some(desc)) = (row.get(0).and_then(normalize_text), row.get(1)) else {
                return Err(Error::Config("taxonomy rows need code and description".into()));
            };
            if entries.insert(code.clone(), desc.trim().to_string()).is_some() {
                return Err(Error::Config(format!("duplicate route code `{code}`")));
            }
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn classify(&self, code: &str) -> RouteClass {
        match self.entries.get(code) {
            Some(desc) => RouteClass {
                code: code.to_string(),
                description: desc.clone(),
                classified: true,
            },
            None => RouteClass {
                code: code.to_string(),
                description: code.to_string(),
                classified: false,
            },
        }
    }
}

/// Look up a route's service description.
pub fn classify_route(code: &str, taxonomy: &RouteTaxonomy) -> RouteClass {
    taxonomy.classify(code)
}
