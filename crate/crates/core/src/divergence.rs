//! Comparing two distributions over the same dimension.
//!
//! * Jensen–Shannon distance (square root of the JS divergence), base 2 by
//!   default so it is bounded by 1.
//! * Spearman's rho (midranks, Pearson on ranks) and Kendall's tau-b, with
//!   two-sided p-values. Small samples use exact permutation enumeration;
//!   larger ones use the t approximation (Spearman) or the tie-corrected
//!   normal approximation (Kendall).
//! * Log-ratio orientation index of export vs import shares.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::concentration::SHARE_SUM_TOLERANCE;
use crate::distribution::{align, DimensionKey, WeightedDistribution};
use crate::error::{Error, Result};

pub const DEFAULT_LOG_BASE: f64 = 2.0;
/// Largest sample size for which p-values are computed by full enumeration.
pub const DEFAULT_EXACT_MAX_N: usize = 9;
pub const DEFAULT_EPSILON: f64 = 1e-9;

fn check_distribution(p: &[f64]) -> Result<()> {
    let sum: f64 = p.iter().sum();
    if p.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

/// `Σ p_i ln(p_i / m_i)` skipping zero-mass terms.
fn kl_nats(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, mi)| pi * (pi / mi).ln())
        .sum()
}

/// Jensen–Shannon distance between two aligned share vectors.
pub fn js_distance(p: &[f64], q: &[f64], base: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    if p.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(base.is_finite() && base > 1.0) {
        return Err(Error::InvalidParameter(format!("log base {base} must exceed 1")));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| (a + b) / 2.0).collect();
    let divergence = 0.5 * (kl_nats(p, &m) + kl_nats(q, &m)) / base.ln();
    Ok(divergence.max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    ExactPermutation,
    TDistribution,
    NormalApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankTest {
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub method: PValueMethod,
    pub n: usize,
}

/// A rank statistic that may be undefined (too few points, zero variance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RankOutcome {
    Defined(RankTest),
    Undefined { reason: String },
}

impl RankOutcome {
    pub fn statistic(&self) -> Option<f64> {
        match self {
            RankOutcome::Defined(t) => Some(t.statistic),
            RankOutcome::Undefined { .. } => None,
        }
    }

    pub fn p_value(&self) -> Option<f64> {
        match self {
            RankOutcome::Defined(t) => Some(t.p_value),
            RankOutcome::Undefined { .. } => None,
        }
    }
}

impl From<Result<RankTest>> for RankOutcome {
    fn from(result: Result<RankTest>) -> Self {
        match result {
            Ok(t) => RankOutcome::Defined(t),
            Err(e) => RankOutcome::Undefined {
                reason: e.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOptions {
    pub exact_max_n: usize,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            exact_max_n: DEFAULT_EXACT_MAX_N,
        }
    }
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations { n: x.len(), min: 3 });
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("non-finite value in rank input".into()));
    }
    Ok(x.len())
}

/// 1-based ranks, ties receiving the mean of the positions they span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Visit every permutation of `items` in place (Heap's algorithm).
fn for_each_permutation<T>(items: &mut [T], mut visit: impl FnMut(&[T])) {
    let n = items.len();
    let mut counters = vec![0usize; n];
    visit(items);
    let mut i = 1;
    while i < n {
        if counters[i] < i {
            let j = if i % 2 == 0 { 0 } else { counters[i] };
            items.swap(j, i);
            visit(items);
            counters[i] += 1;
            i = 1;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<RankTest> {
    spearman_with(x, y, RankOptions::default())
}

pub fn spearman_with(x: &[f64], y: &[f64], options: RankOptions) -> Result<RankTest> {
    let n = check_pair(x, y)?;
    let centre = (n as f64 + 1.0) / 2.0;
    let a: Vec<f64> = midranks(x).into_iter().map(|r| r - centre).collect();
    let mut b: Vec<f64> = midranks(y).into_iter().map(|r| r - centre).collect();
    let sxx: f64 = a.iter().map(|v| v * v).sum();
    let syy: f64 = b.iter().map(|v| v * v).sum();
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let dot = |b: &[f64]| a.iter().zip(b).map(|(u, v)| u * v).sum::<f64>();
    let sxy = dot(&b);
    let rho = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);

    let (p_value, method) = if n <= options.exact_max_n {
        // Centred midranks are multiples of 1/2, so these sums are exact.
        let threshold = sxy.abs() - 1e-9;
        let (mut hits, mut total) = (0u64, 0u64);
        for_each_permutation(&mut b, |perm| {
            total += 1;
            if dot(perm).abs() >= threshold {
                hits += 1;
            }
        });
        (hits as f64 / total as f64, PValueMethod::ExactPermutation)
    } else {
        let p = if rho.abs() > 1.0 - f64::EPSILON {
            0.0
        } else {
            let df = (n - 2) as f64;
            let t = rho * (df / (1.0 - rho * rho)).sqrt();
            let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
            (2.0 * dist.sf(t.abs())).min(1.0)
        };
        (p, PValueMethod::TDistribution)
    };
    Ok(RankTest {
        statistic: rho,
        p_value,
        method,
        n,
    })
}

/// Pair counts needed for tau-b.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct KendallCounts {
    /// concordant minus discordant
    s: i64,
    pairs: i64,
    ties_x: i64,
    ties_y: i64,
}

fn tie_pairs(sorted: &[f64]) -> i64 {
    let mut total = 0i64;
    let mut run = 1i64;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Stable merge sort returning the number of inversions (strict).
fn merge_count(values: &mut [f64], buf: &mut Vec<f64>) -> i64 {
    let n = values.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut values[..mid], buf) + merge_count(&mut values[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if values[j] < values[i] {
            swaps += (mid - i) as i64;
            buf.push(values[j]);
            j += 1;
        } else {
            buf.push(values[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&values[i..mid]);
    buf.extend_from_slice(&values[j..n]);
    values.copy_from_slice(buf);
    swaps
}

/// Knight's O(n log n) pair counting.
fn kendall_counts(x: &[f64], y: &[f64]) -> KendallCounts {
    let n = x.len();
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ties_x = tie_pairs(&xs);
    let mut joint = 0i64;
    let mut run = 1i64;
    for w in pairs.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            joint += run * (run - 1) / 2;
            run = 1;
        }
    }
    joint += run * (run - 1) / 2;

    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = merge_count(&mut ys, &mut Vec::with_capacity(n));
    let ties_y = tie_pairs(&ys);

    let total = (n as i64) * (n as i64 - 1) / 2;
    let s = total - ties_x - ties_y + joint - 2 * swaps;
    KendallCounts {
        s,
        pairs: total,
        ties_x,
        ties_y,
    }
}

fn sign(v: f64) -> i64 {
    match v.partial_cmp(&0.0) {
        Some(Ordering::Greater) => 1,
        Some(Ordering::Less) => -1,
        _ => 0,
    }
}

/// Two-sided normal approximation with the standard tie correction.
fn kendall_normal_p(x: &[f64], y: &[f64], s: i64) -> f64 {
    let n = x.len() as f64;
    let tie_groups = |v: &[f64]| -> Vec<f64> {
        let mut sorted = v.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mut groups = Vec::new();
        let mut run = 1.0;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1.0;
            } else {
                groups.push(run);
                run = 1.0;
            }
        }
        groups.push(run);
        groups
    };
    let (tx, ty) = (tie_groups(x), tie_groups(y));
    let sum = |g: &[f64], f: fn(f64) -> f64| g.iter().map(|&t| f(t)).sum::<f64>();
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vt = sum(&tx, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&ty, |t| t * (t - 1.0) * (2.0 * t + 5.0));
    let v1 = sum(&tx, |t| t * (t - 1.0)) * sum(&ty, |t| t * (t - 1.0)) / (2.0 * n * (n - 1.0));
    let v2 = sum(&tx, |t| t * (t - 1.0) * (t - 2.0)) * sum(&ty, |t| t * (t - 1.0) * (t - 2.0))
        / (9.0 * n * (n - 1.0) * (n - 2.0));
    let var = (v0 - vt - vu) / 18.0 + v1 + v2;
    if var <= 0.0 {
        return 1.0;
    }
    let z = s as f64 / var.sqrt();
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

pub fn kendall(x: &[f64], y: &[f64]) -> Result<RankTest> {
    kendall_with(x, y, RankOptions::default())
}

/// Kendall's tau-b.
pub fn kendall_with(x: &[f64], y: &[f64], options: RankOptions) -> Result<RankTest> {
    let n = check_pair(x, y)?;
    let counts = kendall_counts(x, y);
    let denom = ((counts.pairs - counts.ties_x) as f64) * ((counts.pairs - counts.ties_y) as f64);
    if denom <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let tau = (counts.s as f64 / denom.sqrt()).clamp(-1.0, 1.0);

    let (p_value, method) = if n <= options.exact_max_n {
        // Tie structure is permutation invariant, so only S varies.
        let sx: Vec<i64> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| sign(x[i] - x[j]))
            .collect();
        let observed = counts.s.abs();
        let mut perm = y.to_vec();
        let (mut hits, mut total) = (0u64, 0u64);
        for_each_permutation(&mut perm, |yp| {
            let mut s = 0i64;
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    s += sx[k] * sign(yp[i] - yp[j]);
                    k += 1;
                }
            }
            total += 1;
            if s.abs() >= observed {
                hits += 1;
            }
        });
        (hits as f64 / total as f64, PValueMethod::ExactPermutation)
    } else {
        (kendall_normal_p(x, y, counts.s), PValueMethod::NormalApproximation)
    };
    Ok(RankTest {
        statistic: tau,
        p_value,
        method,
        n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationTable {
    pub epsilon: f64,
    /// Industry → `ln((s_export + ε) / (s_import + ε))`.
    pub entries: BTreeMap<String, f64>,
}

impl OrientationTable {
    /// Entry with the largest index; ties go to the smaller token.
    pub fn most_export_oriented(&self) -> Option<(&str, f64)> {
        self.entries
            .iter()
            .max_by(|a, b| a.1.total_cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(k, v)| (k.as_str(), *v))
    }

    pub fn most_import_oriented(&self) -> Option<(&str, f64)> {
        self.entries
            .iter()
            .min_by(|a, b| a.1.total_cmp(b.1).then_with(|| a.0.cmp(b.0)))
            .map(|(k, v)| (k.as_str(), *v))
    }
}

/// Orientation over the union of industries; absent shares count as 0.
pub fn orientation_index(
    export_shares: &BTreeMap<String, f64>,
    import_shares: &BTreeMap<String, f64>,
    epsilon: f64,
) -> Result<OrientationTable> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must be positive")));
    }
    let valid = |m: &BTreeMap<String, f64>| m.values().all(|s| s.is_finite() && *s >= 0.0);
    if !valid(export_shares) || !valid(import_shares) {
        return Err(Error::InvalidParameter("shares must be finite and non-negative".into()));
    }
    let entries = export_shares
        .keys()
        .chain(import_shares.keys())
        .map(|k| {
            let e = export_shares.get(k).copied().unwrap_or(0.0);
            let i = import_shares.get(k).copied().unwrap_or(0.0);
            // Difference of logs keeps the sign flip under swapping exact.
            (k.clone(), (e + epsilon).ln() - (i + epsilon).ln())
        })
        .collect();
    Ok(OrientationTable { epsilon, entries })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryOptions {
    pub log_base: f64,
    pub rank: RankOptions,
}

impl Default for AsymmetryOptions {
    fn default() -> Self {
        Self {
            log_base: DEFAULT_LOG_BASE,
            rank: RankOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymmetryReport {
    pub dimension: DimensionKey,
    pub jsd: f64,
    pub log_base: f64,
    pub spearman: RankOutcome,
    pub kendall: RankOutcome,
    /// Size of the aligned union support, zero-share categories included.
    pub union_n: usize,
}

/// Compare `p` (imports) with `q` (exports) on their aligned union support.
pub fn asymmetry_report(
    p: &WeightedDistribution,
    q: &WeightedDistribution,
    options: &AsymmetryOptions,
) -> Result<AsymmetryReport> {
    let aligned = align(p, q)?;
    Ok(AsymmetryReport {
        dimension: p.dimension(),
        jsd: js_distance(&aligned.p, &aligned.q, options.log_base)?,
        log_base: options.log_base,
        spearman: spearman_with(&aligned.p, &aligned.q, options.rank).into(),
        kendall: kendall_with(&aligned.p, &aligned.q, options.rank).into(),
        union_n: aligned.categories.len(),
    })
}
