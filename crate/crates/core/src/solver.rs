//! One-at-a-time search for a canonical smallest covering region.
//!
//! The solver walks the support in sequence order. It keeps a candidate
//! region sorted by descending mass that covers the requested probability
//! and is moderated and inner-bounded with respect to everything visited so
//! far. It stops as soon as the mass not yet visited can no longer beat the
//! lightest element of the candidate.

use std::collections::HashSet;

use itertools::Itertools;

use crate::error::{HdrError, Result};
use crate::mass::MassFunction;
use crate::sequence::{SequenceFunction, SequenceKind, Step};

/// Default limit on the number of visited sequence elements.
pub const DEFAULT_ITER_CAP: u64 = 10_000_000;

/// Default limit on the number of regions `enumerate_canonical` will build.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000;

/// Relative tolerance used to decide that two masses are tied.
pub const TIE_RTOL: f64 = 1e-12;

/// `|a - b| <= 1e-12 * max(1, |a|, |b|)`.
pub fn masses_tie(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * 1f64.max(a.abs()).max(b.abs())
}

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::default();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value()
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    /// Maximum number of sequence elements to visit before giving up.
    pub iter_cap: u64,
    /// Verify the candidate invariants after every step.
    pub check_invariants: bool,
    /// Every this many iterations, replace the running outside mass by
    /// `1 - sum(visited)` computed with compensated summation.
    pub drift_check_every: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            iter_cap: DEFAULT_ITER_CAP,
            check_invariants: false,
            drift_check_every: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub element: i64,
    pub mass: f64,
}

/// Elements sorted by descending mass; equal masses keep visiting order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateRegion {
    entries: Vec<Entry>,
}

impl CandidateRegion {
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Mass of the last entry; `+inf` for an empty candidate.
    pub fn min_mass(&self) -> f64 {
        self.entries.last().map_or(f64::INFINITY, |e| e.mass)
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.mass).sum()
    }

    /// Inserts before the first entry with strictly smaller mass.
    pub fn insert(&mut self, entry: Entry) -> usize {
        let pos = self.entries.partition_point(|e| e.mass >= entry.mass);
        self.entries.insert(pos, entry);
        pos
    }

    /// Truncates to the shortest prefix whose mass reaches `cover_prob` and
    /// returns the largest removed mass (0 if nothing was removed).
    pub fn prune(&mut self, cover_prob: f64) -> f64 {
        let mut acc = 0.0;
        let mut keep = self.entries.len();
        for (i, e) in self.entries.iter().enumerate() {
            acc += e.mass;
            if acc >= cover_prob {
                keep = i + 1;
                break;
            }
        }
        let removed = self.entries.get(keep).map_or(0.0, |e| e.mass);
        self.entries.truncate(keep);
        removed
    }

    pub fn elements_sorted(&self) -> Vec<i64> {
        self.entries.iter().map(|e| e.element).sorted().collect()
    }
}

/// Mutable state of one solver run.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub candidate: CandidateRegion,
    /// Smallest mass in the candidate (`+inf` when empty).
    pub min_prob: f64,
    /// Mass outside the visited search set, clamped at zero.
    pub out_prob: f64,
    /// Iterations beyond the initial block of `initial_size` elements.
    pub iter: u64,
    /// Next sequence index to visit.
    pub next_index: u64,
    initial_size: u64,
    cover_prob: f64,
    visited_mass: CompensatedSum,
    max_excluded: f64,
    seen: Option<HashSet<i64>>,
    exhausted: bool,
}

impl SolverState {
    /// Number of elements in the initial block.
    pub fn initial_size(&self) -> u64 {
        self.initial_size
    }

    /// Size of the visited search set.
    pub fn visited(&self) -> u64 {
        self.initial_size + self.iter
    }

    pub fn cover_prob(&self) -> f64 {
        self.cover_prob
    }

    /// Largest mass among visited elements outside the candidate.
    pub fn max_excluded(&self) -> f64 {
        self.max_excluded
    }

    /// True once the sequence has reported that it has no more elements.
    pub fn is_exhausted(&self) -> bool {
        self.exhausted
    }

    /// Outer-boundedness: the unvisited mass cannot outweigh the candidate's
    /// lightest element.
    pub fn is_done(&self) -> bool {
        self.min_prob >= self.out_prob
    }

    fn next_element(&mut self, seq: &SequenceFunction) -> Result<Step> {
        let idx = self.next_index;
        let step = seq.element(idx)?;
        if let (Step::Element(x), Some(seen)) = (step, self.seen.as_mut()) {
            if !seen.insert(x) {
                return Err(HdrError::DuplicateElement {
                    element: x,
                    index: idx,
                });
            }
        }
        Ok(step)
    }

    fn refresh_min(&mut self) {
        self.min_prob = self.candidate.min_mass();
    }

    /// Visits the next sequence element and updates the candidate.
    pub fn step(&mut self, mf: &MassFunction, seq: &SequenceFunction) -> Result<()> {
        let x = match self.next_element(seq)? {
            Step::Element(x) => x,
            Step::Exhausted => {
                self.exhausted = true;
                self.out_prob = 0.0;
                return Ok(());
            }
        };
        let new_prob = mf.mass(x)?;
        self.visited_mass.add(new_prob);
        self.out_prob = (self.out_prob - new_prob).max(0.0);
        if new_prob > self.min_prob {
            self.candidate.insert(Entry {
                element: x,
                mass: new_prob,
            });
            let removed = self.candidate.prune(self.cover_prob);
            self.max_excluded = self.max_excluded.max(removed);
            self.refresh_min();
        } else {
            self.max_excluded = self.max_excluded.max(new_prob);
        }
        self.iter += 1;
        self.next_index += 1;
        Ok(())
    }

    /// Replaces the running outside mass by a compensated recomputation.
    pub fn recompute_out_prob(&mut self) {
        if !self.exhausted {
            self.out_prob = (1.0 - self.visited_mass.value()).max(0.0);
        }
    }

    /// Checks coverage, moderation and inner-boundedness of the candidate
    /// against the visited search set.
    pub fn check_invariants(&self) -> Result<()> {
        let entries = self.candidate.entries();
        if entries.windows(2).any(|w| w[0].mass < w[1].mass) {
            return Err(HdrError::Invariant("candidate not sorted by mass".into()));
        }
        if entries
            .iter()
            .map(|e| e.element)
            .duplicates()
            .next()
            .is_some()
        {
            return Err(HdrError::Invariant(
                "candidate has repeated elements".into(),
            ));
        }
        let mut prefix = 0.0;
        for (i, e) in entries.iter().enumerate() {
            if i + 1 == entries.len() && prefix >= self.cover_prob {
                return Err(HdrError::Invariant(format!(
                    "moderation fails: {prefix} without the lightest element"
                )));
            }
            prefix += e.mass;
        }
        if prefix < self.cover_prob && !self.exhausted {
            // Sorting can move the total by an ulp; allow that much.
            if self.cover_prob - prefix > 4.0 * f64::EPSILON {
                return Err(HdrError::Invariant(format!(
                    "coverage fails: {prefix} < {}",
                    self.cover_prob
                )));
            }
        }
        if self.candidate.min_mass() < self.max_excluded {
            return Err(HdrError::Invariant(format!(
                "inner-boundedness fails: {} < {}",
                self.candidate.min_mass(),
                self.max_excluded
            )));
        }
        if !(0.0..=1.0).contains(&self.out_prob) {
            return Err(HdrError::Invariant(format!(
                "outside mass {} out of range",
                self.out_prob
            )));
        }
        Ok(())
    }
}

/// Visits the shortest sequence prefix whose mass reaches `cover_prob` and
/// seeds the candidate with it.
///
/// The seeded candidate is sorted and then trimmed to the shortest covering
/// prefix, so moderation holds before the first step.
pub fn initial_candidate(
    mf: &MassFunction,
    seq: &SequenceFunction,
    cover_prob: f64,
    opts: &SolverOptions,
) -> Result<SolverState> {
    check_cover_prob(cover_prob)?;
    let mut state = SolverState {
        candidate: CandidateRegion::default(),
        min_prob: f64::INFINITY,
        out_prob: 1.0,
        iter: 0,
        next_index: 1,
        initial_size: 0,
        cover_prob,
        visited_mass: CompensatedSum::default(),
        max_excluded: 0.0,
        seen: (seq.kind() == SequenceKind::Custom).then(HashSet::new),
        exhausted: false,
    };
    let mut entries = Vec::new();
    let mut cumulative = 0.0;
    while cumulative < cover_prob {
        if state.next_index > opts.iter_cap {
            return Err(HdrError::TerminationNotReached {
                visited: state.next_index - 1,
                out_prob: (1.0 - cumulative).max(0.0),
                min_prob: f64::INFINITY,
            });
        }
        let x = match state.next_element(seq)? {
            Step::Element(x) => x,
            Step::Exhausted => {
                return Err(HdrError::ImproperPmf(format!(
                    "sequence exhausted after {} elements with cumulative mass {cumulative} < {cover_prob}",
                    state.next_index - 1
                )))
            }
        };
        let m = mf.mass(x)?;
        cumulative += m;
        state.visited_mass.add(m);
        if m > 0.0 {
            entries.push(Entry {
                element: x,
                mass: m,
            });
        }
        state.next_index += 1;
    }
    state.initial_size = state.next_index - 1;
    // Stable, so equal masses keep sequence order.
    entries.sort_by(|a, b| b.mass.total_cmp(&a.mass));
    state.candidate = CandidateRegion { entries };
    state.max_excluded = state.candidate.prune(cover_prob);
    state.refresh_min();
    state.out_prob = (1.0 - cumulative).max(0.0);
    Ok(state)
}

/// Final output of the solver.
#[derive(Debug, Clone, PartialEq)]
pub struct HdrResult {
    pub label: String,
    /// The region, ascending.
    pub region: Vec<i64>,
    pub coverage: f64,
    pub cover_prob: f64,
    pub region_size: usize,
    /// Number of sequence elements visited when the search stopped.
    pub search_set_size: u64,
    pub iterations: u64,
    /// Smallest mass inside the region.
    pub min_prob: f64,
    /// Unvisited mass at termination.
    pub out_prob: f64,
    /// Visited elements tied with the region's lightest element, ascending.
    pub variation_set: Vec<i64>,
    /// How many variation-set elements the region holds.
    pub required_from_variation: usize,
    pub warning: Option<String>,
}

/// Warning attached to unit coverage on an unbounded support.
pub const UNIT_COVERAGE_WARNING: &str = "at coverage probability 1 the smallest covering region \
is the support of the distribution, which cannot be enumerated in finitely many steps when the \
support is unbounded; the returned region holds the elements found before the search stopped \
and might not be the smallest covering region";

fn check_cover_prob(cover_prob: f64) -> Result<()> {
    if (0.0..=1.0).contains(&cover_prob) {
        Ok(())
    } else {
        Err(HdrError::CoverProb(cover_prob))
    }
}

/// Computes a canonical smallest covering region with at least
/// `cover_prob` mass.
///
/// When `seq` is `None` the default enumeration for the declared support is
/// used. The variation set is filled in before returning.
pub fn compute_cscr(
    mf: &MassFunction,
    cover_prob: f64,
    seq: Option<&SequenceFunction>,
    opts: &SolverOptions,
) -> Result<HdrResult> {
    check_cover_prob(cover_prob)?;
    let default_seq;
    let seq = match seq {
        Some(s) => s,
        None => {
            default_seq = SequenceFunction::for_support(mf.support())?;
            &default_seq
        }
    };
    if cover_prob == 1.0 {
        return unit_coverage(mf, seq, opts);
    }

    let mut state = initial_candidate(mf, seq, cover_prob, opts)?;
    if opts.check_invariants {
        state.check_invariants()?;
    }
    while !state.is_done() {
        if state.visited() >= opts.iter_cap {
            return Err(HdrError::TerminationNotReached {
                visited: state.visited(),
                out_prob: state.out_prob,
                min_prob: state.min_prob,
            });
        }
        state.step(mf, seq)?;
        if let Some(every) = opts.drift_check_every {
            if every > 0 && state.iter % every == 0 {
                state.recompute_out_prob();
            }
        }
        if opts.check_invariants {
            state.check_invariants()?;
        }
    }

    let entries = state.candidate.entries();
    let mut result = HdrResult {
        label: mf.label().to_string(),
        region: state.candidate.elements_sorted(),
        coverage: compensated_sum(entries.iter().map(|e| e.mass)),
        cover_prob,
        region_size: entries.len(),
        search_set_size: state.visited(),
        iterations: state.iter,
        min_prob: state.min_prob,
        out_prob: state.out_prob,
        variation_set: Vec::new(),
        required_from_variation: 0,
        warning: None,
    };
    fill_variation(&mut result, mf, seq, true, opts.iter_cap)?;
    Ok(result)
}

fn unit_coverage(
    mf: &MassFunction,
    seq: &SequenceFunction,
    opts: &SolverOptions,
) -> Result<HdrResult> {
    // Finite supports are enumerated in full; otherwise walk until the
    // visited mass is 1 to working precision or the cap is hit.
    let bounded = mf.support().is_finite() || seq.support().is_finite();
    let mut region = Vec::new();
    let mut masses = Vec::new();
    let mut visited_mass = CompensatedSum::default();
    let mut visited = 0u64;
    let mut seen = (seq.kind() == SequenceKind::Custom).then(HashSet::new);
    loop {
        if !bounded && 1.0 - visited_mass.value() <= 4.0 * f64::EPSILON {
            break;
        }
        if visited >= opts.iter_cap {
            if bounded {
                return Err(HdrError::TerminationNotReached {
                    visited,
                    out_prob: (1.0 - visited_mass.value()).max(0.0),
                    min_prob: masses.iter().copied().fold(f64::INFINITY, f64::min),
                });
            }
            break;
        }
        let x = match seq.element(visited + 1)? {
            Step::Element(x) => x,
            Step::Exhausted => break,
        };
        if let Some(seen) = seen.as_mut() {
            if !seen.insert(x) {
                return Err(HdrError::DuplicateElement {
                    element: x,
                    index: visited + 1,
                });
            }
        }
        visited += 1;
        let m = mf.mass(x)?;
        visited_mass.add(m);
        if m > 0.0 {
            region.push(x);
            masses.push(m);
        }
    }
    let min_prob = masses.iter().copied().fold(f64::INFINITY, f64::min);
    region.sort_unstable();
    let mut result = HdrResult {
        label: mf.label().to_string(),
        region_size: region.len(),
        region,
        coverage: compensated_sum(masses.iter().copied()),
        cover_prob: 1.0,
        search_set_size: visited,
        iterations: 0,
        min_prob,
        out_prob: (1.0 - visited_mass.value()).max(0.0),
        variation_set: Vec::new(),
        required_from_variation: 0,
        warning: (!bounded).then(|| UNIT_COVERAGE_WARNING.to_string()),
    };
    fill_variation(&mut result, mf, seq, false, opts.iter_cap)?;
    Ok(result)
}

fn fill_variation(
    result: &mut HdrResult,
    mf: &MassFunction,
    seq: &SequenceFunction,
    extend: bool,
    cap: u64,
) -> Result<()> {
    let vs = scan_variation(result, mf, seq, extend, cap)?;
    result.required_from_variation = vs
        .iter()
        .filter(|x| result.region.binary_search(x).is_ok())
        .count();
    result.variation_set = vs;
    Ok(())
}

/// Elements tied in mass with the region's lightest element.
///
/// Scans the search set, then keeps walking the sequence for as long as the
/// unvisited mass is large enough to hide another tied element.
pub fn variation_set(
    result: &HdrResult,
    mf: &MassFunction,
    seq: &SequenceFunction,
) -> Result<Vec<i64>> {
    scan_variation(result, mf, seq, result.cover_prob < 1.0, DEFAULT_ITER_CAP)
}

fn scan_variation(
    result: &HdrResult,
    mf: &MassFunction,
    seq: &SequenceFunction,
    extend: bool,
    cap: u64,
) -> Result<Vec<i64>> {
    if result.region.is_empty() {
        return Ok(Vec::new());
    }
    let mut lightest = f64::INFINITY;
    for &x in &result.region {
        lightest = lightest.min(mf.mass(x)?);
    }
    let threshold = lightest - TIE_RTOL * lightest.max(1.0);
    let mut out = Vec::new();
    let mut visited_mass = CompensatedSum::default();
    let limit = cap.max(result.search_set_size);
    let mut i = 1u64;
    loop {
        if i > result.search_set_size {
            let remaining = 1.0 - visited_mass.value();
            if !extend || remaining < threshold || i > limit {
                break;
            }
        }
        let x = match seq.element(i)? {
            Step::Element(x) => x,
            Step::Exhausted => break,
        };
        let m = mf.mass(x)?;
        visited_mass.add(m);
        if masses_tie(m, lightest) {
            out.push(x);
        }
        i += 1;
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// All canonical solutions: the fixed part of the region plus every
/// `r`-subset of the `n`-element variation set.
pub fn enumerate_canonical(result: &HdrResult, cap: u128) -> Result<Vec<Vec<i64>>> {
    let n = result.variation_set.len();
    let r = result.required_from_variation;
    let count = binomial_count(n as u128, r as u128);
    if count > cap {
        return Err(HdrError::EnumerationTooLarge { count, cap });
    }
    let fixed: Vec<i64> = result
        .region
        .iter()
        .copied()
        .filter(|x| result.variation_set.binary_search(x).is_err())
        .collect();
    Ok(result
        .variation_set
        .iter()
        .copied()
        .combinations(r)
        .map(|pick| fixed.iter().copied().chain(pick).sorted().collect())
        .collect())
}

fn binomial_count(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}
