//! Exact highest density regions for discrete distributions on the integers.
//!
//! A highest density region here is a canonical smallest covering region:
//! among all sets of integers with probability at least `cover_prob`, one of
//! minimal size and, among those, of maximal probability. It is the 0-1
//! knapsack problem with unit weights, solved exactly by walking the support
//! one element at a time until the unvisited mass is provably too small to
//! change the answer. Supports may be countably infinite.
//!
//! ```
//! use discrete_hdr::{compute_cscr, parse_dist_spec, SolverOptions};
//!
//! let mf = parse_dist_spec("binom(10, 0.5)").unwrap();
//! let hdr = compute_cscr(&mf, 0.9, None, &SolverOptions::default()).unwrap();
//! assert_eq!(hdr.region_size, 6);
//! assert_eq!(hdr.variation_set, vec![2, 8]);
//! ```

pub mod cli;
pub mod error;
pub mod format;
pub mod mass;
pub mod sequence;
pub mod solver;
pub mod spec;
pub mod verify;

pub use error::{HdrError, Result};
pub use format::{render_text, IntegerIntervalSet, Interval};
pub use mass::{Family, MassFunction, MixtureSpec, Support};
pub use sequence::{SequenceFunction, SequenceKind, Step};
pub use solver::{
    compute_cscr, enumerate_canonical, initial_candidate, variation_set, CandidateRegion, Entry,
    HdrResult, SolverOptions, SolverState,
};
pub use spec::parse_dist_spec;
pub use verify::{
    check_certificate, check_subset_bounds, oracle_exhaustive, oracle_greedy, ConditionReport,
    ExhaustiveOracle, ExhaustiveSolution,
};
