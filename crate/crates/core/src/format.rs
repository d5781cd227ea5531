//! Interval presentation of integer regions.

use std::fmt;

use serde::Serialize;

use crate::solver::HdrResult;

/// Marker printed for an empty region.
pub const EMPTY_SET: &str = "∅";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Interval {
    pub lower: i64,
    pub upper: i64,
}

impl Interval {
    /// Number of integers in the interval.
    pub fn count(&self) -> u64 {
        (self.upper as i128 - self.lower as i128 + 1) as u64
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lower == self.upper {
            write!(f, "{}", self.lower)
        } else {
            write!(f, "{}..{}", self.lower, self.upper)
        }
    }
}

/// Union of closed integer intervals, sorted and separated by at least one
/// missing integer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegerIntervalSet {
    intervals: Vec<Interval>,
}

impl IntegerIntervalSet {
    /// Collapses maximal runs of consecutive integers. Input order and
    /// repeats do not matter.
    pub fn from_elements<I: IntoIterator<Item = i64>>(elements: I) -> Self {
        let mut xs: Vec<i64> = elements.into_iter().collect();
        xs.sort_unstable();
        xs.dedup();
        let mut intervals: Vec<Interval> = Vec::new();
        for x in xs {
            match intervals.last_mut() {
                Some(last) if last.upper.checked_add(1) == Some(x) => last.upper = x,
                _ => intervals.push(Interval { lower: x, upper: x }),
            }
        }
        IntegerIntervalSet { intervals }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of integers covered.
    pub fn count(&self) -> u64 {
        self.intervals.iter().map(Interval::count).sum()
    }

    pub fn elements(&self) -> impl Iterator<Item = i64> + '_ {
        self.intervals.iter().flat_map(|iv| iv.lower..=iv.upper)
    }

    /// Tabular layout with one closed interval per row.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<14}{:>6}{:>6}{:>7}{:>7}\n",
            "", "Lower", "Upper", "LC", "RC"
        );
        for (i, iv) in self.intervals.iter().enumerate() {
            out.push_str(&format!(
                "{:<14}{:>6}{:>6}{:>7}{:>7}\n",
                format!("Interval[{}]", i + 1),
                iv.lower,
                iv.upper,
                "closed",
                "closed"
            ));
        }
        out
    }
}

impl fmt::Display for IntegerIntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str(EMPTY_SET);
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

/// Percentage with two decimals, rounding halves away from zero.
pub fn percent(p: f64) -> String {
    let scaled = (p * 10_000.0).round() / 100.0;
    format!("{scaled:.2}%")
}

/// Human-readable report: header, method line, blank line, intervals.
pub fn render_text(result: &HdrResult) -> String {
    let set = IntegerIntervalSet::from_elements(result.region.iter().copied());
    let mut out = format!(
        "{} HDR for {}\nComputed using discrete optimisation with minimum coverage probability = {}\n\n{}\n",
        percent(result.coverage),
        result.label,
        percent(result.cover_prob),
        set
    );
    if let Some(w) = &result.warning {
        out.push_str(&format!("\nWarning: {w}\n"));
    }
    out
}
