//! Analysis configuration, loaded from TOML and overridden by CLI flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::concentration::DEFAULT_CR_KS;
use crate::divergence::{
    AsymmetryOptions, RankOptions, DEFAULT_EPSILON, DEFAULT_EXACT_MAX_N, DEFAULT_LOG_BASE,
};
use crate::error::{Error, Result};
use crate::ingest::IngestOptions;
use crate::report::ReportFormat;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "PORTFLOW_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Logarithm base for the Jensen–Shannon distance.
    pub jsd_log_base: f64,
    /// Smoothing term of the orientation index.
    pub epsilon: f64,
    pub cr_k: Vec<usize>,
    /// Drift base year; the earliest observed year when absent.
    pub base_year: Option<i32>,
    /// Largest support size that gets exact permutation p-values.
    pub p_value_exact_max_n: usize,
    pub top_n: usize,
    pub histogram_bins: usize,
    pub format: ReportFormat,
    pub ingest: IngestOptions,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            jsd_log_base: DEFAULT_LOG_BASE,
            epsilon: DEFAULT_EPSILON,
            cr_k: DEFAULT_CR_KS.to_vec(),
            base_year: None,
            p_value_exact_max_n: DEFAULT_EXACT_MAX_N,
            top_n: 10,
            histogram_bins: 20,
            format: ReportFormat::Markdown,
            ingest: IngestOptions::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.jsd_log_base.is_finite() && self.jsd_log_base > 1.0) {
            return bad(format!("jsd_log_base {} must be > 1", self.jsd_log_base));
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return bad(format!("epsilon {} must be > 0", self.epsilon));
        }
        if self.cr_k.is_empty() || self.cr_k[0] == 0 {
            return bad("cr_k needs at least one entry, all >= 1".into());
        }
        if self.cr_k.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!("cr_k {:?} must be strictly increasing", self.cr_k));
        }
        if self.top_n == 0 {
            return bad("top_n must be >= 1".into());
        }
        if self.histogram_bins == 0 {
            return bad("histogram_bins must be >= 1".into());
        }
        if self.ingest.year_min > self.ingest.year_max {
            return bad(format!(
                "year range {}..={} is empty",
                self.ingest.year_min, self.ingest.year_max
            ));
        }
        if !self.ingest.delimiter.is_ascii() {
            return bad(format!("delimiter `{}` is not ASCII", self.ingest.delimiter));
        }
        Ok(())
    }

    pub fn rank_options(&self) -> RankOptions {
        RankOptions {
            exact_max_n: self.p_value_exact_max_n,
        }
    }

    pub fn asymmetry_options(&self) -> AsymmetryOptions {
        AsymmetryOptions {
            log_base: self.jsd_log_base,
            rank: self.rank_options(),
        }
    }
}
