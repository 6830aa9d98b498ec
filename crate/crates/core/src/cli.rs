//! Command-line front end. [`run`] is the whole program; the binary only
//! forwards process arguments and the exit code.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{asymmetry_section, concentration_section, drift_section, profile_section};
use crate::config::{AnalysisConfig, CONFIG_ENV};
use crate::distribution::{DimensionKey, Scope};
use crate::error::{Error, Result};
use crate::ingest::{write_canonical_csv, ColumnMapping, Direction, Ingestor, ShipmentRecord, SourceLayout};
use crate::report::{emit_plot_data, render, write_atomic, ReportBundle, ReportFormat, ReportMetadata};
use crate::synthgen::{generate, SynthMode, SynthTarget};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

/// Analyses use the four categorical dimensions unless told otherwise.
const DEFAULT_DIMENSIONS: [DimensionKey; 4] = [
    DimensionKey::Route,
    DimensionKey::OriginNode,
    DimensionKey::DestinationNode,
    DimensionKey::Industry,
];

#[derive(Debug, Parser)]
#[command(name = "portflow", version, about = "FFE-weighted container flow metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Canonical-layout CSV files.
    inputs: Vec<PathBuf>,
    /// Raw import-layout CSV files (port of loading / port of discharge).
    #[arg(long, value_name = "FILE")]
    imports: Vec<PathBuf>,
    /// Raw export-layout CSV files (export loading port / place of delivery).
    #[arg(long, value_name = "FILE")]
    exports: Vec<PathBuf>,
    /// TOML configuration file.
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    #[arg(long)]
    format: Option<ReportFormat>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    year_min: Option<i32>,
    #[arg(long)]
    year_max: Option<i32>,
    #[arg(long)]
    delimiter: Option<char>,
    #[arg(long)]
    jsd_log_base: Option<f64>,
    /// Largest support size given exact permutation p-values.
    #[arg(long)]
    exact_max_n: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest and report acceptance and rejection tallies.
    Validate {
        #[command(flatten)]
        common: Common,
    },
    /// Concentration indices and top-N shares per scope.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "route")]
        dimension: DimensionKey,
        /// Single scope; all three when omitted.
        #[arg(long)]
        scope: Option<Scope>,
        #[arg(long)]
        top: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        cr_k: Vec<usize>,
    },
    /// Import-vs-export divergence and rank agreement.
    Asymmetry {
        #[command(flatten)]
        common: Common,
        /// Repeatable; route, origin, destination and industry by default.
        #[arg(long = "dimension")]
        dimensions: Vec<DimensionKey>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Per-year concentration and drift against a base year.
    Drift {
        #[command(flatten)]
        common: Common,
        #[arg(long = "dimension")]
        dimensions: Vec<DimensionKey>,
        #[arg(long, default_value = "all")]
        scope: Scope,
        #[arg(long)]
        base_year: Option<i32>,
    },
    /// Shipment-size summary, annual totals and histogram.
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        bins: Option<usize>,
        /// Also write histogram.csv and annual.csv here.
        #[arg(long)]
        plot_dir: Option<PathBuf>,
    },
    /// Generate synthetic canonical CSV from a TOML target.
    Synth {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "exact")]
        mode: ModeArg,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidParameter(_) | Error::UnsupportedFormat(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Report timestamp; `SOURCE_DATE_EPOCH` pins it for reproducible output.
pub fn timestamp() -> String {
    let now = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .unwrap_or_else(chrono::Utc::now);
    now.to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

impl Common {
    fn config(&self) -> Result<AnalysisConfig> {
        let mut c = match &self.config {
            Some(path) => AnalysisConfig::load(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?,
            None => AnalysisConfig::default(),
        };
        if let Some(v) = self.format {
            c.format = v;
        }
        if let Some(v) = self.year_min {
            c.ingest.year_min = v;
        }
        if let Some(v) = self.year_max {
            c.ingest.year_max = v;
        }
        if let Some(v) = self.delimiter {
            c.ingest.delimiter = v;
        }
        if let Some(v) = self.jsd_log_base {
            c.jsd_log_base = v;
        }
        if let Some(v) = self.exact_max_n {
            c.p_value_exact_max_n = v;
        }
        Ok(c)
    }

    fn sources(&self) -> Result<Vec<(&Path, SourceLayout)>> {
        let sources: Vec<_> = self
            .inputs
            .iter()
            .map(|p| (p.as_path(), SourceLayout::Canonical))
            .chain(self.imports.iter().map(|p| (p.as_path(), SourceLayout::Raw(Direction::Import))))
            .chain(self.exports.iter().map(|p| (p.as_path(), SourceLayout::Raw(Direction::Export))))
            .collect();
        if sources.is_empty() {
            return Err(Error::InvalidParameter(
                "no input files; pass canonical CSVs or --imports/--exports".into(),
            ));
        }
        Ok(sources)
    }

    fn ingest(&self, config: &AnalysisConfig) -> Result<Ingestor> {
        let mut ingestor = Ingestor::new(config.ingest.clone());
        for (path, layout) in self.sources()? {
            let file = File::open(path).map_err(|e| {
                Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
            })?;
            ingestor.read_csv(BufReader::new(file), layout)?;
        }
        Ok(ingestor)
    }
}

struct Session {
    config: AnalysisConfig,
    records: Vec<ShipmentRecord>,
    bundle: ReportBundle,
}

fn open_session(common: &Common, adjust: impl FnOnce(&mut AnalysisConfig)) -> Result<Session> {
    let mut config = common.config()?;
    adjust(&mut config);
    config.validate()?;
    let (records, report) = common.ingest(&config)?.finish()?;
    let metadata = ReportMetadata::new(serde_json::to_value(&config)?, &records, timestamp())?;
    let mut bundle = ReportBundle::new(metadata);
    bundle.ingest = Some(report);
    Ok(Session {
        config,
        records,
        bundle,
    })
}

fn emit(bytes: &[u8], output: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, bytes),
        None => Ok(stdout.write_all(bytes)?),
    }
}

fn finish_report(session: &Session, common: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let bytes = render(&session.bundle, session.config.format)?;
    emit(&bytes, common.output.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn dimensions_or_default(dimensions: &[DimensionKey]) -> Vec<DimensionKey> {
    if dimensions.is_empty() {
        DEFAULT_DIMENSIONS.to_vec()
    } else {
        dimensions.to_vec()
    }
}

fn validate_cmd(common: &Common, stdout: &mut dyn Write) -> Result<i32> {
    let config = common.config()?;
    config.validate()?;
    let (records, report) = common.ingest(&config)?.into_parts();
    let accepted = report.accepted_count;
    let metadata = ReportMetadata::new(serde_json::to_value(&config)?, &records, timestamp())?;
    let mut bundle = ReportBundle::new(metadata);
    bundle.ingest = Some(report);
    emit(&render(&bundle, config.format)?, common.output.as_deref(), stdout)?;
    Ok(if accepted > 0 { EXIT_OK } else { EXIT_DATA })
}

fn dispatch(command: Command, stdout: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { common } => validate_cmd(&common, stdout),
        Command::Analyze {
            common,
            dimension,
            scope,
            top,
            cr_k,
        } => {
            let mut s = open_session(&common, |c| {
                if let Some(n) = top {
                    c.top_n = n;
                }
                if !cr_k.is_empty() {
                    c.cr_k = cr_k;
                }
            })?;
            let (scopes, skip_empty) = match scope {
                Some(one) => (vec![one], false),
                None => (Scope::ALL.to_vec(), true),
            };
            let (summaries, shares) =
                concentration_section(&s.records, dimension, &scopes, skip_empty, &s.config)?;
            s.bundle.concentration = summaries;
            s.bundle.shares = shares;
            finish_report(&s, &common, stdout)
        }
        Command::Asymmetry {
            common,
            dimensions,
            epsilon,
        } => {
            let mut s = open_session(&common, |c| {
                if let Some(e) = epsilon {
                    c.epsilon = e;
                }
            })?;
            let (reports, orientation) =
                asymmetry_section(&s.records, &dimensions_or_default(&dimensions), &s.config)?;
            s.bundle.asymmetry = reports;
            s.bundle.orientation = orientation;
            finish_report(&s, &common, stdout)
        }
        Command::Drift {
            common,
            dimensions,
            scope,
            base_year,
        } => {
            let mut s = open_session(&common, |c| {
                if base_year.is_some() {
                    c.base_year = base_year;
                }
            })?;
            s.bundle.drift =
                drift_section(&s.records, &dimensions_or_default(&dimensions), scope, &s.config)?;
            finish_report(&s, &common, stdout)
        }
        Command::Profile {
            common,
            bins,
            plot_dir,
        } => {
            let mut s = open_session(&common, |c| {
                if let Some(b) = bins {
                    c.histogram_bins = b;
                }
            })?;
            s.bundle.profile = Some(profile_section(&s.records, &s.config)?);
            if let Some(dir) = &plot_dir {
                emit_plot_data(&s.bundle, dir)?;
            }
            finish_report(&s, &common, stdout)
        }
        Command::Synth {
            target,
            seed,
            mode,
            output,
        } => {
            let text = std::fs::read_to_string(&target)?;
            let mut t = SynthTarget::from_toml(&text)?;
            if let Some(seed) = seed {
                t.seed = seed;
            }
            let mode = match mode {
                ModeArg::Exact => SynthMode::Exact,
                ModeArg::Sampled => SynthMode::Sampled,
            };
            let records = generate(&t, mode)?;
            let mut bytes = Vec::new();
            write_canonical_csv(&mut bytes, &records, &ColumnMapping::default())?;
            emit(&bytes, output.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let text = e.render().to_string();
            return if informational {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            } else {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            };
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
