//! Enumeration of an integer support, one element per positive index.

use std::fmt;
use std::sync::Arc;

use crate::error::{HdrError, Result};
use crate::mass::Support;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceKind {
    /// Both bounds finite; walks left to right and then runs out.
    Finite,
    /// Lower bound only; walks upward from it.
    LeftBounded,
    /// Upper bound only; walks downward from it.
    RightBounded,
    /// No bounds; 0, -1, 1, -2, 2, ...
    Oscillating,
    /// User-supplied map, checked for repeats by the solver.
    Custom,
}

/// Result of looking up one index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Element(i64),
    /// A finite support has no element at this index.
    Exhausted,
}

type Mapping = dyn Fn(u64) -> Option<i64> + Send + Sync;

/// A bijection from the positive integers onto (a superset of) the support.
#[derive(Clone)]
pub struct SequenceFunction {
    kind: SequenceKind,
    support: Support,
    custom: Option<Arc<Mapping>>,
}

impl fmt::Debug for SequenceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceFunction")
            .field("kind", &self.kind)
            .field("support", &self.support)
            .finish()
    }
}

impl SequenceFunction {
    /// Default enumeration for real-valued bounds. Finite bounds are rounded
    /// inward; infinite bounds select the one-sided or oscillating walk.
    pub fn from_bounds(supp_min: f64, supp_max: f64) -> Result<Self> {
        if supp_min.is_nan() || supp_max.is_nan() {
            return Err(HdrError::EmptySupport {
                min: supp_min,
                max: supp_max,
            });
        }
        let lo = supp_min.ceil();
        let hi = supp_max.floor();
        if lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(HdrError::EmptySupport {
                min: supp_min,
                max: supp_max,
            });
        }
        let to_int = |v: f64| v.is_finite().then_some(v as i64);
        Self::for_support(Support::new(to_int(lo), to_int(hi)))
    }

    pub fn for_support(support: Support) -> Result<Self> {
        let kind = match (support.min, support.max) {
            (Some(lo), Some(hi)) => {
                if lo > hi {
                    return Err(HdrError::EmptySupport {
                        min: lo as f64,
                        max: hi as f64,
                    });
                }
                SequenceKind::Finite
            }
            (Some(_), None) => SequenceKind::LeftBounded,
            (None, Some(_)) => SequenceKind::RightBounded,
            (None, None) => SequenceKind::Oscillating,
        };
        Ok(SequenceFunction {
            kind,
            support,
            custom: None,
        })
    }

    /// Wraps a user mapping. Returning `None` signals the end of a finite
    /// enumeration. Injectivity is not checked here.
    pub fn custom<F>(support: Support, f: F) -> Self
    where
        F: Fn(u64) -> Option<i64> + Send + Sync + 'static,
    {
        SequenceFunction {
            kind: SequenceKind::Custom,
            support,
            custom: Some(Arc::new(f)),
        }
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn support(&self) -> Support {
        self.support
    }

    /// `E(i)` for `i >= 1`.
    pub fn element(&self, i: u64) -> Result<Step> {
        if i == 0 {
            return Err(HdrError::Index(i));
        }
        let offset = i as i128 - 1;
        let v: Option<i128> = match self.kind {
            SequenceKind::Finite => {
                let lo = self.support.min.unwrap_or_default() as i128;
                let hi = self.support.max.unwrap_or_default() as i128;
                (lo + offset <= hi).then_some(lo + offset)
            }
            SequenceKind::LeftBounded => {
                Some(self.support.min.unwrap_or_default() as i128 + offset)
            }
            SequenceKind::RightBounded => {
                Some(self.support.max.unwrap_or_default() as i128 - offset)
            }
            SequenceKind::Oscillating => {
                let i = i as i128;
                Some(if i % 2 == 1 { i / 2 } else { -i / 2 })
            }
            SequenceKind::Custom => {
                let f = self.custom.as_ref().expect("custom sequence has a mapping");
                return Ok(f(i).map_or(Step::Exhausted, Step::Element));
            }
        };
        Ok(match v.and_then(|v| i64::try_from(v).ok()) {
            Some(x) => Step::Element(x),
            None => Step::Exhausted,
        })
    }

    /// Iterates `E(1), E(2), ...` until the sequence runs out.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        (1u64..).map_while(move |i| match self.element(i) {
            Ok(Step::Element(x)) => Some(x),
            _ => None,
        })
    }
}
