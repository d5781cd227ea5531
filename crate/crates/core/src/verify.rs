//! Certificates for solver output and brute-force reference solvers.
//!
//! `check_certificate` tests a region against the coverage, moderation and
//! highest-density conditions, the last one through inner and outer
//! boundedness over a finite search set. The oracles solve small finite
//! instances directly: greedy by sorting, and exhaustively by enumerating
//! every subset.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{HdrError, Result};
use crate::mass::MassFunction;
use crate::sequence::SequenceFunction;
use crate::solver::{compensated_sum, HdrResult};

/// Largest support the exhaustive oracle accepts.
pub const EXHAUSTIVE_SUPPORT_CAP: u64 = 22;

/// Absolute tolerance when comparing subset probabilities in the oracles and
/// subset checks.
pub const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionReport {
    pub min_coverage_ok: bool,
    pub moderation_ok: bool,
    pub inner_ok: bool,
    pub outer_ok: bool,
    pub highest_density_ok: bool,
    /// Smallest mass in the region (`+inf` when empty).
    pub nabla_h: f64,
    /// Largest mass among search-set elements outside the region (0 when none).
    pub delta_complement: f64,
    /// `1 - P(search set)`.
    pub outside_mass: f64,
    pub coverage: f64,
}

impl ConditionReport {
    pub fn all_ok(&self) -> bool {
        self.min_coverage_ok && self.moderation_ok && self.highest_density_ok
    }
}

/// The first `n` elements of `seq`.
pub fn visited_elements(seq: &SequenceFunction, n: u64) -> Vec<i64> {
    seq.iter().take(n as usize).collect()
}

/// The search set certified by a solver run.
pub fn search_set(result: &HdrResult, seq: &SequenceFunction) -> Vec<i64> {
    visited_elements(seq, result.search_set_size)
}

pub fn check_certificate(
    mf: &MassFunction,
    region: &[i64],
    cover_prob: f64,
    search_set: &[i64],
) -> Result<ConditionReport> {
    let sorted_unique = |xs: &[i64]| {
        let mut v = xs.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let in_region = sorted_unique(region);
    let in_search = sorted_unique(search_set);
    if let Some(&x) = in_region
        .iter()
        .find(|x| in_search.binary_search(x).is_err())
    {
        return Err(HdrError::NotInSearchSet(x));
    }

    let mut region_masses = Vec::with_capacity(in_region.len());
    for &x in &in_region {
        region_masses.push(mf.mass(x)?);
    }
    let mut search_masses = Vec::with_capacity(in_search.len());
    let mut delta = 0.0f64;
    for &x in &in_search {
        let m = mf.mass(x)?;
        search_masses.push(m);
        if in_region.binary_search(&x).is_err() {
            delta = delta.max(m);
        }
    }
    let coverage = compensated_sum(region_masses.iter().copied());
    let nabla = region_masses.iter().copied().fold(f64::INFINITY, f64::min);
    let outside = 1.0 - compensated_sum(search_masses.iter().copied());

    let inner_ok = nabla >= delta;
    let outer_ok = outside <= nabla;
    Ok(ConditionReport {
        min_coverage_ok: coverage >= cover_prob,
        // Dropping the lightest element gives the heaviest strict subset.
        moderation_ok: region.is_empty() || coverage - nabla < cover_prob,
        inner_ok,
        outer_ok,
        highest_density_ok: inner_ok && outer_ok,
        nabla_h: nabla,
        delta_complement: delta,
        outside_mass: outside,
        coverage,
    })
}

fn finite_masses(mf: &MassFunction, cap: Option<u64>) -> Result<Vec<(i64, f64)>> {
    let support = mf.support();
    let size = support
        .size()
        .ok_or_else(|| HdrError::Spec(format!("oracle needs a finite support, got {support}")))?;
    if let Some(cap) = cap {
        if size > cap {
            return Err(HdrError::SupportTooLarge { size, cap });
        }
    }
    let lo = support.min.unwrap_or_default();
    (0..size as i64)
        .map(|i| mf.mass(lo + i).map(|m| (lo + i, m)))
        .collect()
}

/// Shortest prefix of the support sorted by descending mass (ties by
/// ascending element) that reaches `cover_prob`.
pub fn oracle_greedy(mf: &MassFunction, cover_prob: f64) -> Result<Vec<i64>> {
    let mut items = finite_masses(mf, None)?;
    items.retain(|&(_, m)| m > 0.0);
    items.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut acc = 0.0;
    let mut region = Vec::new();
    for &(x, m) in &items {
        if acc >= cover_prob {
            break;
        }
        acc += m;
        region.push(x);
    }
    if acc < cover_prob && cover_prob - acc > PROB_TOLERANCE {
        return Err(HdrError::ImproperPmf(format!(
            "total mass {acc} is below the cover probability {cover_prob}"
        )));
    }
    region.sort_unstable();
    Ok(region)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveSolution {
    pub optimal_size: usize,
    pub max_coverage: f64,
    /// Every optimal region, each ascending; listed in subset-mask order.
    pub solutions: Vec<Vec<i64>>,
}

/// Subset-enumeration solver for supports of at most
/// [`EXHAUSTIVE_SUPPORT_CAP`] integers. Subset sums are tabulated once and
/// reused across cover probabilities.
#[derive(Debug, Clone)]
pub struct ExhaustiveOracle {
    elements: Vec<i64>,
    sums: Vec<f64>,
}

impl ExhaustiveOracle {
    pub fn new(mf: &MassFunction) -> Result<Self> {
        let items = finite_masses(mf, Some(EXHAUSTIVE_SUPPORT_CAP))?;
        let n = items.len();
        let mut sums = vec![0.0f64; 1usize << n];
        for mask in 1usize..sums.len() {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)] + items[low].1;
        }
        Ok(ExhaustiveOracle {
            elements: items.into_iter().map(|(x, _)| x).collect(),
            sums,
        })
    }

    pub fn solve(&self, cover_prob: f64) -> Result<ExhaustiveSolution> {
        let mut optimal: Option<u32> = None;
        for (mask, &s) in self.sums.iter().enumerate() {
            if s >= cover_prob {
                let c = mask.count_ones();
                optimal = Some(optimal.map_or(c, |o| o.min(c)));
            }
        }
        let optimal = optimal.ok_or_else(|| {
            HdrError::ImproperPmf(format!("no subset reaches cover probability {cover_prob}"))
        })?;
        let max_coverage = self
            .sums
            .iter()
            .enumerate()
            .filter(|(mask, _)| mask.count_ones() <= optimal)
            .map(|(_, &s)| s)
            .fold(f64::NEG_INFINITY, f64::max);
        let solutions = self
            .sums
            .iter()
            .enumerate()
            .filter(|&(mask, &s)| {
                mask.count_ones() == optimal
                    && s >= cover_prob
                    && max_coverage - s <= PROB_TOLERANCE
            })
            .map(|(mask, _)| {
                (0..self.elements.len())
                    .filter(|b| mask >> b & 1 == 1)
                    .map(|b| self.elements[b])
                    .collect()
            })
            .collect();
        Ok(ExhaustiveSolution {
            optimal_size: optimal as usize,
            max_coverage,
            solutions,
        })
    }
}

pub fn oracle_exhaustive(mf: &MassFunction, cover_prob: f64) -> Result<ExhaustiveSolution> {
    ExhaustiveOracle::new(mf)?.solve(cover_prob)
}

/// Randomized check of two subset bounds over `search_set`:
/// any subset smaller than the region misses `cover_prob`, and no subset of
/// the region's size carries more mass than the region.
pub fn check_subset_bounds(
    mf: &MassFunction,
    region: &[i64],
    cover_prob: f64,
    search_set: &[i64],
    trials: usize,
    seed: u64,
) -> Result<bool> {
    let size = region.len();
    if size == 0 {
        return Ok(true);
    }
    let mut masses = Vec::with_capacity(search_set.len());
    for &x in search_set {
        masses.push(mf.mass(x)?);
    }
    let mut region_masses = Vec::with_capacity(size);
    for &x in region {
        region_masses.push(mf.mass(x)?);
    }
    let region_prob = compensated_sum(region_masses);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = masses.len();
    let subset_prob = |rng: &mut ChaCha8Rng, k: usize| {
        compensated_sum(index::sample(rng, n, k).iter().map(|i| masses[i]))
    };
    for _ in 0..trials {
        let smaller = rng.random_range(0..size).min(n);
        if subset_prob(&mut rng, smaller) >= cover_prob {
            return Ok(false);
        }
        let same = rng.random_range(0..=size).min(n);
        if subset_prob(&mut rng, same) > region_prob + PROB_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}
