mod common;

use std::collections::BTreeMap;

use discrete_hdr::format::EMPTY_SET;
use discrete_hdr::solver::DEFAULT_ENUMERATION_CAP;
use discrete_hdr::verify::{search_set, visited_elements, ExhaustiveOracle};
use discrete_hdr::{
    check_certificate, check_subset_bounds, compute_cscr, enumerate_canonical, oracle_greedy,
    Family, IntegerIntervalSet, MassFunction, MixtureSpec, SequenceFunction, SolverOptions,
    Support,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{battery, random_table};

fn checked() -> SolverOptions {
    SolverOptions {
        check_invariants: true,
        ..SolverOptions::default()
    }
}

fn family_strategy() -> impl Strategy<Value = Family> {
    prop_oneof![
        (0.01f64..200.0).prop_map(|l| Family::poisson(l).unwrap()),
        (0u64..300, 0.0f64..=1.0).prop_map(|(n, p)| Family::binomial(n, p).unwrap()),
        (0.02f64..=1.0).prop_map(|p| Family::geometric(p).unwrap()),
        (0.1f64..30.0, 0.05f64..=1.0).prop_map(|(r, p)| Family::negative_binomial(r, p).unwrap()),
        (1u64..400, 0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(n, a, b)| {
            let k = (a * n as f64) as u64;
            let d = (b * n as f64) as u64;
            Family::hypergeometric(n, k, d).unwrap()
        }),
        (-50i64..50, 0i64..100).prop_map(|(a, w)| Family::uniform(a, a + w).unwrap()),
        (-1000i64..1000).prop_map(Family::point),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn family_masses_are_proper(family in family_strategy()) {
        let mf: MassFunction = family.clone().into();
        let support = mf.support();
        let lo = support.min.unwrap();
        let mut cumulative = 0.0;
        let mut x = lo;
        // Walk until the running total reaches the 99.9999% level, then
        // through the rest of the tail.
        loop {
            let m = mf.mass(x).unwrap();
            prop_assert!(m >= 0.0);
            let next = cumulative + m;
            prop_assert!(next >= cumulative);
            cumulative = next;
            if support.max.is_some_and(|hi| x >= hi) || (cumulative >= 0.999_999 && m < 1e-18) {
                break;
            }
            x += 1;
            prop_assert!(x - lo < 100_000, "{family}: runaway tail");
        }
        prop_assert!((cumulative - 1.0).abs() < 1e-9, "{family}: total {cumulative}");
        prop_assert_eq!(mf.mass(lo - 1).unwrap(), 0.0);
    }
}

proptest! {
    #[test]
    fn mixture_is_componentwise_sum(
        a in family_strategy(),
        b in family_strategy(),
        w in 0.01f64..0.99,
        xs in proptest::collection::vec(-100i64..400, 1..20),
    ) {
        let (ma, mb): (MassFunction, MassFunction) = (a.into(), b.into());
        let mix = MassFunction::mixture(MixtureSpec::new().with(w, ma.clone()).with(1.0 - w, mb.clone())).unwrap();
        for x in xs {
            let want = w * ma.mass(x).unwrap() + (1.0 - w) * mb.mass(x).unwrap();
            let got = mix.mass(x).unwrap();
            prop_assert!((got - want).abs() <= 1e-15 * want.abs().max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn table_round_trip(raw in proptest::collection::btree_map(-1000i64..1000, 0.0f64..1.0, 1..40)) {
        let total: f64 = raw.values().sum();
        prop_assume!(total > 0.0);
        let table: BTreeMap<i64, f64> = raw.iter().map(|(&x, &m)| (x, m / total)).collect();
        let text: String = table.iter().map(|(x, m)| format!("{x},{m:?}\n")).collect();
        let mf = MassFunction::load_pmf_table(text.as_bytes(), false).unwrap();
        for (&x, &m) in &table {
            prop_assert_eq!(mf.mass(x).unwrap(), m);
        }
        let lo = *table.keys().next().unwrap();
        let hi = *table.keys().next_back().unwrap();
        prop_assert_eq!(mf.support(), Support::finite(lo, hi));
    }

    #[test]
    fn sequence_prefixes_are_injective_and_in_bounds(
        lo in -1_000_000i64..1_000_000,
        width in 0i64..20_000,
        kind in 0u8..4,
    ) {
        let support = match kind {
            0 => Support::finite(lo, lo + width),
            1 => Support::left_bounded(lo),
            2 => Support::new(None, Some(lo)),
            _ => Support::UNBOUNDED,
        };
        let seq = SequenceFunction::for_support(support).unwrap();
        let n = support.size().unwrap_or(10_000).min(10_000);
        let prefix = visited_elements(&seq, n);
        prop_assert_eq!(prefix.len() as u64, n);
        prop_assert!(prefix.iter().all(|&x| support.contains(x)));
        let mut sorted = prefix.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), prefix.len());
    }

    #[test]
    fn intervals_expand_to_input(xs in proptest::collection::btree_set(-200i64..200, 0..120)) {
        let set = IntegerIntervalSet::from_elements(xs.iter().copied());
        let back: Vec<i64> = set.elements().collect();
        prop_assert_eq!(back, xs.iter().copied().collect::<Vec<_>>());
        prop_assert_eq!(set.count(), xs.len() as u64);
        for w in set.intervals().windows(2) {
            prop_assert!(w[0].upper + 1 < w[1].lower);
        }
        prop_assert_eq!(parse_body(&set.to_string()), xs.into_iter().collect::<Vec<_>>());
    }
}

/// Inverse of the interval body rendering.
fn parse_body(text: &str) -> Vec<i64> {
    if text == EMPTY_SET {
        return Vec::new();
    }
    text.split(", ")
        .flat_map(|part| match part.split_once("..") {
            Some((a, b)) => {
                (a.parse::<i64>().unwrap()..=b.parse::<i64>().unwrap()).collect::<Vec<_>>()
            }
            None => vec![part.parse().unwrap()],
        })
        .collect()
}

#[test]
fn oscillating_prefix_is_symmetric_block() {
    let seq = SequenceFunction::for_support(Support::UNBOUNDED).unwrap();
    let prefix = visited_elements(&seq, 1001);
    for k in 0..=500usize {
        let mut block = prefix[..2 * k + 1].to_vec();
        block.sort_unstable();
        assert_eq!(block, (-(k as i64)..=k as i64).collect::<Vec<_>>());
    }
}

#[test]
fn greedy_matches_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let mf = random_table(&mut rng, 14);
        let oracle = ExhaustiveOracle::new(&mf).unwrap();
        for c in [0.3, 0.5, 0.8, 0.9, 0.95] {
            let sol = oracle.solve(c).unwrap();
            let g = oracle_greedy(&mf, c).unwrap();
            let cov: f64 = g.iter().map(|&x| mf.mass(x).unwrap()).sum();
            assert_eq!(g.len(), sol.optimal_size);
            assert!((cov - sol.max_coverage).abs() <= 1e-12);
        }
    }
}

#[test]
fn certificate_holds_exactly_for_optimal_regions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let mf = random_table(&mut rng, 12);
        let s = mf.support();
        let all: Vec<i64> = (s.min.unwrap()..=s.max.unwrap()).collect();
        let c = [0.5, 0.8, 0.9, 0.95][rng.random_range(0..4)];
        let sol = ExhaustiveOracle::new(&mf).unwrap().solve(c).unwrap();
        for region in &sol.solutions {
            assert!(check_certificate(&mf, region, c, &all).unwrap().all_ok());
        }
        for _ in 0..20 {
            let region: Vec<i64> = all
                .iter()
                .copied()
                .filter(|_| rng.random_bool(0.5))
                .collect();
            let passes = check_certificate(&mf, &region, c, &all).unwrap().all_ok();
            // Zero-mass elements are interchangeable, so compare on positive mass only.
            let positive: Vec<i64> = region
                .iter()
                .copied()
                .filter(|&x| mf.mass(x).unwrap() > 0.0)
                .collect();
            let optimal = sol.solutions.contains(&positive) && positive == region;
            assert_eq!(passes, optimal, "region {region:?}, cover {c}");
        }
    }
}

#[test]
fn certificate_survives_wider_search_set() {
    for mf in battery() {
        let seq = SequenceFunction::for_support(mf.support()).unwrap();
        for c in [0.5, 0.9, 0.99] {
            let res = compute_cscr(&mf, c, Some(&seq), &checked()).unwrap();
            let wider = visited_elements(&seq, res.search_set_size + 5);
            let report = check_certificate(&mf, &res.region, c, &wider).unwrap();
            assert!(report.highest_density_ok, "{} at {c}", mf.label());
        }
    }
}

#[test]
fn subset_bounds_hold_on_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for i in 0..200 {
        let mf = random_table(&mut rng, 16);
        let c = [0.5, 0.8, 0.9, 0.95][i % 4];
        let seq = SequenceFunction::for_support(mf.support()).unwrap();
        let res = compute_cscr(&mf, c, Some(&seq), &checked()).unwrap();
        let search = search_set(&res, &seq);
        assert!(check_subset_bounds(&mf, &res.region, c, &search, 200, i as u64).unwrap());
    }
}

#[test]
fn region_grows_with_cover_prob() {
    let covers = [0.1, 0.3, 0.5, 0.7, 0.8, 0.9, 0.95, 0.99];
    for mf in battery() {
        let results: Vec<_> = covers
            .iter()
            .map(|&c| compute_cscr(&mf, c, None, &checked()).unwrap())
            .collect();
        for w in results.windows(2) {
            assert!(w[0].region_size <= w[1].region_size, "{}", mf.label());
            assert!(w[0].coverage <= w[1].coverage, "{}", mf.label());
        }
    }
}

#[test]
fn canonical_solutions_share_size_and_coverage() {
    let cases: Vec<(MassFunction, f64)> = vec![
        (Family::binomial(10, 0.5).unwrap().into(), 0.9),
        (Family::uniform(1, 4).unwrap().into(), 0.5),
        (Family::uniform(-3, 6).unwrap().into(), 0.35),
        (Family::poisson(1.0).unwrap().into(), 0.5),
        (Family::poisson(3.0).unwrap().into(), 0.2),
        (Family::binomial(20, 0.5).unwrap().into(), 0.75),
    ];
    for (mf, c) in cases {
        let res = compute_cscr(&mf, c, None, &checked()).unwrap();
        let all = enumerate_canonical(&res, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(all.contains(&res.region));
        let covs: Vec<f64> = all
            .iter()
            .map(|r| r.iter().map(|&x| mf.mass(x).unwrap()).sum())
            .collect();
        let spread = covs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
            - covs.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(spread <= 1e-12, "{}: spread {spread}", mf.label());
        assert!(all.iter().all(|r| r.len() == res.region_size));
        if mf.support().size().is_some_and(|s| s <= 22) {
            let sol = ExhaustiveOracle::new(&mf).unwrap().solve(c).unwrap();
            let (mut a, mut b) = (all.clone(), sol.solutions.clone());
            a.sort();
            b.sort();
            assert_eq!(a, b, "{}", mf.label());
        }
    }
}

#[test]
fn invariants_hold_on_random_tables_and_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..300 {
        let mf = random_table(&mut rng, 40);
        let s = mf.support();
        let (lo, hi) = (s.min.unwrap(), s.max.unwrap());
        let mut order: Vec<i64> = (lo..=hi).collect();
        let n = order.len();
        for i in (1..n).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let seq = SequenceFunction::custom(s, move |i| order.get(i as usize - 1).copied());
        let c = rng.random_range(0.0..1.0);
        let res = compute_cscr(&mf, c, Some(&seq), &checked()).unwrap();
        let g = oracle_greedy(&mf, c).unwrap();
        assert_eq!(res.region_size, g.len());
    }
}

#[test]
fn repeating_sequence_is_rejected() {
    let mf: MassFunction = Family::uniform(0, 9).unwrap().into();
    let seq = SequenceFunction::custom(mf.support(), |i| Some(((i - 1) % 3) as i64));
    let err = compute_cscr(&mf, 0.9, Some(&seq), &checked()).unwrap_err();
    assert!(
        matches!(err, discrete_hdr::HdrError::DuplicateElement { .. }),
        "{err:?}"
    );
}
