use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{validate_column, OnlineAllocator};
use crate::error::Result;
use crate::rat::Rat;

/// Uniformly random assignment from a seeded ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct RandAllocator {
    n: usize,
    rng: ChaCha8Rng,
}

impl RandAllocator {
    pub fn new(n: usize, seed: u64) -> Self {
        RandAllocator { n, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Independent stream `stream` under one master seed; used for trials.
    pub fn with_stream(n: usize, seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RandAllocator { n, rng }
    }

    /// Draws an agent without looking at any values.
    pub fn draw(&mut self) -> usize {
        self.rng.random_range(0..self.n)
    }
}

impl OnlineAllocator for RandAllocator {
    fn n(&self) -> usize {
        self.n
    }

    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        validate_column(column, self.n)?;
        Ok(self.draw())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_identical() {
        let mut a = RandAllocator::new(3, 11);
        let mut b = RandAllocator::new(3, 11);
        let xs: Vec<usize> = (0..200).map(|_| a.draw()).collect();
        let ys: Vec<usize> = (0..200).map(|_| b.draw()).collect();
        assert_eq!(xs, ys);
        let mut c = RandAllocator::with_stream(3, 11, 1);
        let zs: Vec<usize> = (0..200).map(|_| c.draw()).collect();
        assert_ne!(xs, zs);
    }

    #[test]
    fn frequencies_within_three_sigma() {
        let trials = 100_000usize;
        let sigma = (trials as f64 * 0.25).sqrt();
        for seed in 0..5 {
            let mut a = RandAllocator::new(2, seed);
            let ones = (0..trials).filter(|_| a.draw() == 0).count() as f64;
            assert!((ones - trials as f64 / 2.0).abs() <= 3.0 * sigma, "seed {seed}: {ones}");
        }
    }
}
