//! Concentration and inequality indices over one distribution.
//!
//! HHI is reported on the sum-of-squared-shares `[0, 1]` scale, entropy in
//! nats, and the Gini coefficient uses the sorted cumulative-mass form
//! `G = (n + 1 - 2 Σ C_i / C_n) / n`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distribution::{DimensionKey, Scope, WeightedDistribution};
use crate::error::{Error, Result};

/// Tolerance on `Σ s_i = 1` accepted by the share-based indices.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-9;

pub(crate) fn check_shares(shares: &[f64]) -> Result<()> {
    if shares.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum: f64 = shares.iter().sum();
    if shares.iter().any(|s| !(s.is_finite() && *s >= 0.0)) || (sum - 1.0).abs() > SHARE_SUM_TOLERANCE
    {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// Herfindahl–Hirschman index, `Σ s_i²`.
pub fn hhi(shares: &[f64]) -> Result<f64> {
    check_shares(shares)?;
    Ok(shares.iter().map(|s| s * s).sum::<f64>().min(1.0))
}

/// Cumulative share of the `k` largest categories.
pub fn concentration_ratio(shares: &[f64], k: usize) -> Result<f64> {
    check_shares(shares)?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if k >= shares.len() {
        return Ok(1.0);
    }
    let mut sorted = shares.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(sorted[..k].iter().sum::<f64>().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropy {
    /// Shannon entropy in nats.
    pub entropy: f64,
    /// `entropy / ln(n)`; defined as 0 for a single category.
    pub normalized: f64,
}

/// Shannon entropy (natural log) and its `ln(n)`-normalized form. Zero
/// shares contribute nothing; `n` is the vector length.
pub fn shannon_entropy(shares: &[f64]) -> Result<Entropy> {
    check_shares(shares)?;
    let entropy = -shares
        .iter()
        .filter(|s| **s > 0.0)
        .map(|s| s * s.ln())
        .sum::<f64>();
    let entropy = entropy.max(0.0);
    let normalized = if shares.len() < 2 {
        0.0
    } else {
        (entropy / (shares.len() as f64).ln()).clamp(0.0, 1.0)
    };
    Ok(Entropy {
        entropy,
        normalized,
    })
}

/// Gini coefficient of positive category masses.
pub fn gini(masses: &[f64]) -> Result<f64> {
    if masses.is_empty() {
        return Err(Error::EmptyInput);
    }
    if masses.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
        return Err(Error::NonPositiveMass);
    }
    let mut sorted = masses.to_vec();
    sorted.sort_by(f64::total_cmp);
    let cumulative: Vec<f64> = sorted
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let c_n = *cumulative.last().expect("non-empty");
    let n = sorted.len() as f64;
    let sum_ratio: f64 = cumulative.iter().map(|c| c / c_n).sum();
    // Equal masses can land a rounding step below zero.
    Ok(((n + 1.0 - 2.0 * sum_ratio) / n).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationSummary {
    pub dimension: DimensionKey,
    pub scope: Scope,
    pub n: usize,
    pub total_ffe: f64,
    pub hhi: f64,
    /// Concentration ratio keyed by `k`.
    pub cr: BTreeMap<usize, f64>,
    pub entropy: f64,
    pub entropy_norm: f64,
    pub gini: f64,
}

/// Default concentration-ratio depths.
pub const DEFAULT_CR_KS: [usize; 2] = [3, 5];

pub fn concentration_summary(
    dist: &WeightedDistribution,
    scope: Scope,
    ks: &[usize],
) -> Result<ConcentrationSummary> {
    let shares = dist.shares();
    let entropy = shannon_entropy(&shares)?;
    let cr = ks
        .iter()
        .map(|&k| concentration_ratio(&shares, k).map(|v| (k, v)))
        .collect::<Result<_>>()?;
    Ok(ConcentrationSummary {
        dimension: dist.dimension(),
        scope,
        n: dist.n(),
        total_ffe: dist.total(),
        hhi: hhi(&shares)?,
        cr,
        entropy: entropy.entropy,
        entropy_norm: entropy.normalized,
        gini: gini(&dist.masses())?,
    })
}
