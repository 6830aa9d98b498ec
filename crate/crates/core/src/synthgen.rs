//! Deterministic synthetic shipment records.
//!
//! The generator is seeded with `ChaCha8Rng::seed_from_u64(seed)` and draws
//! from a single stream, visiting cells in the order they are listed.
//!
//! *Exact* mode reproduces every per-dimension target mass: the four
//! dimensions are walked together, each record taking the smallest remaining
//! category mass among the current categories (a north-west-corner
//! allocation). Only marginals are controlled; the seed permutes category
//! order, which changes the joint pairing but never the marginals.
//!
//! *Sampled* mode draws each record's categories independently from the
//! share maps and its size from a log-normal, then rescales sizes so the cell
//! total equals `total_ffe`.

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::LogNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{normalize_text, Direction, ShipmentRecord};

const SHARE_TOLERANCE: f64 = 1e-9;
/// Residues below this fraction of a category's mass are rounding noise.
const SNAP_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthMode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SizeDistribution {
    /// Mean of `ln(ffe)` before rescaling.
    pub log_mu: f64,
    /// Standard deviation of `ln(ffe)`.
    pub log_sigma: f64,
}

impl Default for SizeDistribution {
    fn default() -> Self {
        Self {
            log_mu: 0.0,
            log_sigma: 1.0,
        }
    }
}

/// Target shares for one (year, direction) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthCell {
    pub year: i32,
    pub direction: Direction,
    pub total_ffe: f64,
    pub record_count: usize,
    pub routes: BTreeMap<String, f64>,
    pub origins: BTreeMap<String, f64>,
    pub destinations: BTreeMap<String, f64>,
    pub industries: BTreeMap<String, f64>,
}

impl SynthCell {
    fn maps(&self) -> [(&'static str, &BTreeMap<String, f64>); 4] {
        [
            ("routes", &self.routes),
            ("origins", &self.origins),
            ("destinations", &self.destinations),
            ("industries", &self.industries),
        ]
    }

    /// Target FFE mass per category, `share / Σ shares × total_ffe`.
    pub fn target_masses(&self, map: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
        let sum: f64 = map.values().sum();
        map.iter()
            .map(|(k, s)| (k.clone(), s / sum * self.total_ffe))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthTarget {
    pub seed: u64,
    #[serde(default)]
    pub size_distribution: SizeDistribution,
    pub cells: Vec<SynthCell>,
}

impl SynthTarget {
    pub fn from_toml(text: &str) -> Result<Self> {
        let mut target: SynthTarget = toml::from_str(text)?;
        target.normalize_tokens()?;
        Ok(target)
    }

    fn normalize_tokens(&mut self) -> Result<()> {
        for cell in &mut self.cells {
            for map in [
                &mut cell.routes,
                &mut cell.origins,
                &mut cell.destinations,
                &mut cell.industries,
            ] {
                let mut out = BTreeMap::new();
                for (k, v) in std::mem::take(map) {
                    let token = normalize_text(&k)
                        .ok_or_else(|| Error::InfeasibleTarget(format!("empty category `{k}`")))?;
                    if out.insert(token.clone(), v).is_some() {
                        return Err(Error::InfeasibleTarget(format!(
                            "category `{token}` listed twice"
                        )));
                    }
                }
                *map = out;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let infeasible = |msg: String| Err(Error::InfeasibleTarget(msg));
        if self.cells.is_empty() {
            return infeasible("target has no cells".into());
        }
        let sd = self.size_distribution;
        if !(sd.log_mu.is_finite() && sd.log_sigma.is_finite() && sd.log_sigma >= 0.0) {
            return infeasible("size distribution parameters must be finite, sigma >= 0".into());
        }
        for cell in &self.cells {
            let id = format!("{} {}", cell.year, cell.direction);
            if !(cell.total_ffe.is_finite() && cell.total_ffe > 0.0) {
                return infeasible(format!("{id}: total_ffe must be positive"));
            }
            let mut widest = 0;
            for (name, map) in cell.maps() {
                if map.is_empty() {
                    return infeasible(format!("{id}: {name} is empty"));
                }
                if map.values().any(|s| !(s.is_finite() && *s > 0.0)) {
                    return infeasible(format!("{id}: {name} shares must be positive"));
                }
                let sum: f64 = map.values().sum();
                if (sum - 1.0).abs() > SHARE_TOLERANCE {
                    return infeasible(format!("{id}: {name} shares sum to {sum}"));
                }
                widest = widest.max(map.len());
            }
            if cell.record_count < widest {
                return infeasible(format!(
                    "{id}: record_count {} is below the {widest} categories to cover",
                    cell.record_count
                ));
            }
        }
        Ok(())
    }
}

fn make_record(cell: &SynthCell, cats: [&str; 4], ffe: f64) -> ShipmentRecord {
    ShipmentRecord {
        year: cell.year,
        direction: cell.direction,
        route: cats[0].to_string(),
        origin_node: cats[1].to_string(),
        destination_node: cats[2].to_string(),
        industry: cats[3].to_string(),
        commodity: None,
        ffe,
    }
}

/// Seeded category order with the largest category last, so end-of-walk
/// rounding residue lands on the biggest mass.
fn walk_order(masses: &BTreeMap<String, f64>, rng: &mut ChaCha8Rng) -> Vec<(String, f64)> {
    let mut order: Vec<(String, f64)> = masses.iter().map(|(k, v)| (k.clone(), *v)).collect();
    order.shuffle(rng);
    let largest = order
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1).then_with(|| b.1 .0.cmp(&a.1 .0)))
        .map(|(i, _)| i)
        .expect("non-empty");
    let last = order.remove(largest);
    order.push(last);
    order
}

fn exact_cell(cell: &SynthCell, rng: &mut ChaCha8Rng) -> Result<Vec<ShipmentRecord>> {
    let dims: Vec<Vec<(String, f64)>> = cell
        .maps()
        .iter()
        .map(|(_, m)| walk_order(&cell.target_masses(m), rng))
        .collect();
    let mut cursor = [0usize; 4];
    let mut remaining: [f64; 4] = std::array::from_fn(|d| dims[d][0].1);
    let mut pieces: Vec<([usize; 4], f64)> = Vec::new();

    'walk: loop {
        let x = remaining.iter().copied().fold(f64::INFINITY, f64::min);
        pieces.push((cursor, x));
        for d in 0..4 {
            let full = dims[d][cursor[d]].1;
            let left = remaining[d] - x;
            if left <= SNAP_RELATIVE * full {
                cursor[d] += 1;
                if cursor[d] == dims[d].len() {
                    break 'walk;
                }
                remaining[d] = dims[d][cursor[d]].1;
            } else {
                remaining[d] = left;
            }
        }
    }

    if pieces.len() > cell.record_count {
        return Err(Error::InfeasibleTarget(format!(
            "{} {}: exact allocation needs {} records, record_count is {}",
            cell.year,
            cell.direction,
            pieces.len(),
            cell.record_count
        )));
    }

    // Spread surplus records over pieces in proportion to mass
    // (largest remainder, ties by position).
    let extra = cell.record_count - pieces.len();
    let total: f64 = pieces.iter().map(|p| p.1).sum();
    let quotas: Vec<f64> = pieces.iter().map(|p| extra as f64 * p.1 / total).collect();
    let mut splits: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut by_remainder: Vec<usize> = (0..pieces.len()).collect();
    by_remainder.sort_by(|&a, &b| {
        (quotas[b] - quotas[b].floor())
            .total_cmp(&(quotas[a] - quotas[a].floor()))
            .then(a.cmp(&b))
    });
    let assigned: usize = splits.iter().sum();
    for &i in by_remainder.iter().take(extra - assigned) {
        splits[i] += 1;
    }

    let mut records = Vec::with_capacity(cell.record_count);
    for ((idx, mass), split) in pieces.iter().zip(splits) {
        let cats: [&str; 4] = std::array::from_fn(|d| dims[d][idx[d]].0.as_str());
        let k = split + 1;
        let piece = mass / k as f64;
        for _ in 1..k {
            records.push(make_record(cell, cats, piece));
        }
        records.push(make_record(cell, cats, mass - piece * (k - 1) as f64));
    }
    records.shuffle(rng);
    Ok(records)
}

/// Records whose per-dimension masses equal the target masses.
pub fn generate_exact(target: &SynthTarget) -> Result<Vec<ShipmentRecord>> {
    target.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(target.seed);
    let mut out = Vec::new();
    for cell in &target.cells {
        out.extend(exact_cell(cell, &mut rng)?);
    }
    Ok(out)
}

/// Records drawn from the share maps with log-normal sizes.
pub fn generate_sampled(target: &SynthTarget) -> Result<Vec<ShipmentRecord>> {
    target.validate()?;
    let sd = target.size_distribution;
    let sizes = LogNormal::new(sd.log_mu, sd.log_sigma)
        .map_err(|e| Error::InfeasibleTarget(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(target.seed);
    let mut out = Vec::new();
    for cell in &target.cells {
        let samplers = cell
            .maps()
            .map(|(_, m)| {
                let keys: Vec<&str> = m.keys().map(String::as_str).collect();
                let index = WeightedIndex::new(m.values().copied())
                    .map_err(|e| Error::InfeasibleTarget(e.to_string()))?;
                Ok((keys, index))
            })
            .into_iter()
            .collect::<Result<Vec<_>>>()?;

        let mut drafts = Vec::with_capacity(cell.record_count);
        for _ in 0..cell.record_count {
            let cats: [&str; 4] = std::array::from_fn(|d| {
                let (keys, index) = &samplers[d];
                keys[index.sample(&mut rng)]
            });
            drafts.push((cats, sizes.sample(&mut rng)));
        }
        let raw_total: f64 = drafts.iter().map(|d| d.1).sum();
        let scale = cell.total_ffe / raw_total;
        out.extend(
            drafts
                .into_iter()
                .map(|(cats, raw)| make_record(cell, cats, (raw * scale).max(f64::MIN_POSITIVE))),
        );
    }
    Ok(out)
}

pub fn generate(target: &SynthTarget, mode: SynthMode) -> Result<Vec<ShipmentRecord>> {
    match mode {
        SynthMode::Exact => generate_exact(target),
        SynthMode::Sampled => generate_sampled(target),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{build_distribution, DimensionKey};
    use crate::fixtures::ROUTE_TOTALS;

    fn single(k: &str) -> BTreeMap<String, f64> {
        BTreeMap::from([(k.to_string(), 1.0)])
    }

    fn shares(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        pairs.iter().map(|(k, v)| (k.to_string(), v / total)).collect()
    }

    fn cell(routes: BTreeMap<String, f64>, total: f64, count: usize) -> SynthCell {
        SynthCell {
            year: 2019,
            direction: Direction::Import,
            total_ffe: total,
            record_count: count,
            routes,
            origins: single("NINGBO"),
            destinations: single("NOUAKCHOTT"),
            industries: single("FOOD"),
        }
    }

    #[test]
    fn reference_routes_exact_round_trip() {
        let target = SynthTarget {
            seed: 1,
            size_distribution: Default::default(),
            cells: vec![cell(shares(&ROUTE_TOTALS), 236_733.5, 7)],
        };
        let recs = generate_exact(&target).unwrap();
        assert_eq!(recs.len(), 7);
        let d = build_distribution(&recs, DimensionKey::Route, None).unwrap();
        for (route, mass) in ROUTE_TOTALS {
            let got = d.mass(route).unwrap();
            assert!(((got - mass) / mass).abs() < 1e-12, "{route}: {got}");
        }
    }

    #[test]
    fn single_category_split() {
        let target = SynthTarget {
            seed: 3,
            size_distribution: Default::default(),
            cells: vec![cell(single("W1"), 5.0, 3)],
        };
        let recs = generate_exact(&target).unwrap();
        assert_eq!(recs.len(), 3);
        assert!((recs.iter().map(|r| r.ffe).sum::<f64>() - 5.0).abs() < 1e-12);
        assert!(recs.iter().all(|r| r.ffe > 0.0));
    }

    #[test]
    fn infeasible_counts() {
        let mut c = cell(shares(&[("W1", 1.0), ("W2", 1.0), ("W3", 1.0)]), 3.0, 2);
        let target = SynthTarget {
            seed: 0,
            size_distribution: Default::default(),
            cells: vec![c.clone()],
        };
        assert!(matches!(generate_exact(&target), Err(Error::InfeasibleTarget(_))));

        // thirds against halves cut the line at 1, 1.5 and 2: four pieces
        c.record_count = 3;
        c.industries = shares(&[("A", 1.0), ("B", 1.0)]);
        let target = SynthTarget {
            seed: 0,
            size_distribution: Default::default(),
            cells: vec![c],
        };
        assert!(matches!(generate_exact(&target), Err(Error::InfeasibleTarget(_))));

        let mut t = target.clone();
        t.cells[0].record_count = 0;
        assert!(generate_sampled(&t).is_err());
    }

    #[test]
    fn seeds_are_deterministic() {
        let mut c = cell(shares(&[("W1", 0.7), ("W2", 0.3)]), 100.0, 50);
        c.origins = shares(&[("A", 1.0), ("B", 2.0), ("C", 3.0)]);
        let t = SynthTarget {
            seed: 42,
            size_distribution: Default::default(),
            cells: vec![c],
        };
        assert_eq!(generate_exact(&t).unwrap(), generate_exact(&t).unwrap());
        assert_eq!(generate_sampled(&t).unwrap(), generate_sampled(&t).unwrap());
        let mut other = t.clone();
        other.seed = 43;
        assert_ne!(generate_sampled(&t).unwrap(), generate_sampled(&other).unwrap());
    }

    #[test]
    fn toml_target_normalizes_tokens() {
        let text = r#"
            seed = 9
            [[cells]]
            year = 2020
            direction = "EXPORT"
            total_ffe = 10.0
            record_count = 2
            routes = { " w3 " = 0.5, "w1" = 0.5 }
            origins = { nouadhibou = 1.0 }
            destinations = { huangpu = 1.0 }
            industries = { "frozen fish" = 1.0 }
        "#;
        let t = SynthTarget::from_toml(text).unwrap();
        assert!(t.cells[0].routes.contains_key("W3"));
        let recs = generate_exact(&t).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].origin_node, "NOUADHIBOU");
        assert!(SynthTarget::from_toml("seed = 1\ncells = []\nbogus = 2").is_err());
    }
}
