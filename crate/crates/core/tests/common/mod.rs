#![allow(dead_code)]

use std::collections::BTreeMap;

use discrete_hdr::{parse_dist_spec, Family, MassFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const POISSON_MIXTURE: &str = "mix(0.3:pois(12), 0.3:pois(28), 0.4:pois(40))";

/// Random normalized masses on a run of at most `max_size` integers starting
/// somewhere in -5..=5. About one mass in ten is zero.
pub fn random_table(rng: &mut ChaCha8Rng, max_size: usize) -> MassFunction {
    let n = rng.random_range(1..=max_size);
    let lo: i64 = rng.random_range(-5..=5);
    let mut raw: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.1) {
                0.0
            } else {
                rng.random::<f64>()
            }
        })
        .collect();
    if raw.iter().all(|&m| m == 0.0) {
        raw[0] = 1.0;
    }
    let total: f64 = raw.iter().sum();
    let table: BTreeMap<i64, f64> = raw
        .iter()
        .enumerate()
        .map(|(i, m)| (lo + i as i64, m / total))
        .collect();
    MassFunction::from_table(table, false).unwrap()
}

/// Distribution battery used by the certification checks.
pub fn battery() -> Vec<MassFunction> {
    vec![
        Family::poisson(1.0).unwrap().into(),
        Family::poisson(5.0).unwrap().into(),
        Family::poisson(100.0).unwrap().into(),
        Family::geometric(0.1).unwrap().into(),
        Family::geometric(0.5).unwrap().into(),
        Family::negative_binomial(3.0, 0.4).unwrap().into(),
        Family::negative_binomial(0.5, 0.05).unwrap().into(),
        Family::hypergeometric(20, 7, 12).unwrap().into(),
        Family::hypergeometric(500, 60, 100).unwrap().into(),
        parse_dist_spec(POISSON_MIXTURE).unwrap(),
    ]
}
