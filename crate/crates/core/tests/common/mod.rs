#![allow(dead_code)]

use fairdiv::{Instance, Predictions, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn r(s: &str) -> Rat {
    s.parse().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational in `[0, 1]` with denominator at most 12.
pub fn unit_value(rng: &mut ChaCha8Rng) -> Rat {
    let d: i64 = rng.random_range(1..=12);
    Rat::new(rng.random_range(0..=d), d)
}

/// Values in `[0, 1]` with at least one exact 1 per agent.
pub fn normalized_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let rows = (0..n)
        .map(|_| {
            let mut row: Vec<Rat> = (0..m).map(|_| unit_value(rng)).collect();
            let k = rng.random_range(0..m);
            row[k] = Rat::one();
            row
        })
        .collect();
    Instance::new(rows).unwrap()
}

/// Instance whose maxima lie in `[(1 - eps) p_i, p_i]`, with its predictions.
pub fn contract_instance(rng: &mut ChaCha8Rng, n: usize, m: usize, epsilon: &Rat) -> (Instance, Predictions) {
    let p: Vec<Rat> = (0..n).map(|_| Rat::new(rng.random_range(1..=12), rng.random_range(1..=4))).collect();
    let keep = Rat::one() - epsilon;
    let rows = p
        .iter()
        .map(|pi| {
            let mut row: Vec<Rat> = (0..m).map(|_| unit_value(rng) * &keep * pi).collect();
            // One good in [(1 - eps) p, p]; in steps of eps/8.
            let k = rng.random_range(0..m);
            let u = &keep + epsilon * Rat::new(rng.random_range(0..=8), 8);
            row[k] = u * pi;
            row
        })
        .collect();
    let inst = Instance::new(rows).unwrap();
    let pred = Predictions::new(p, epsilon.clone()).unwrap();
    assert!(fairdiv::check_predictions(&inst, &pred));
    (inst, pred)
}

/// Arbitrary values with denominators at most 6, up to 3.
pub fn small_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let rows = (0..n)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let d: i64 = rng.random_range(1..=6);
                    Rat::new(rng.random_range(0..=3 * d), d)
                })
                .collect()
        })
        .collect();
    Instance::new(rows).unwrap()
}

/// Divides every row by its prediction.
pub fn normalize(inst: &Instance, p: &[Rat]) -> Instance {
    Instance::new(inst.rows().iter().zip(p).map(|(row, pi)| row.iter().map(|v| v / pi).collect()).collect()).unwrap()
}
