use super::{validate_column, OnlineAllocator};
use crate::error::Result;
use crate::metrics::Ledger;
use crate::rat::{ExtRat, Rat};

/// Index of the first maximum.
fn first_argmax(scores: &[ExtRat]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Index of the first minimum.
fn first_argmin(scores: &[ExtRat]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s < scores[best] {
            best = i;
        }
    }
    best
}

/// Gives the good to the agent for whom it is the largest share of
/// everything arrived so far.
#[derive(Clone, Debug)]
pub struct Greedy1 {
    ledger: Ledger,
}

impl Greedy1 {
    pub fn new(n: usize) -> Self {
        Greedy1 { ledger: Ledger::new(n) }
    }

    pub fn scores(&self, column: &[Rat]) -> Vec<ExtRat> {
        column
            .iter()
            .zip(self.ledger.agents())
            .map(|(v, s)| {
                let total = &s.total + v;
                if total.is_zero() {
                    ExtRat::Finite(Rat::zero())
                } else {
                    ExtRat::ratio(v, &total)
                }
            })
            .collect()
    }
}

impl OnlineAllocator for Greedy1 {
    fn n(&self) -> usize {
        self.ledger.n()
    }

    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        validate_column(column, self.n())?;
        let who = first_argmax(&self.scores(column));
        self.ledger.record(column, who);
        Ok(who)
    }
}

/// Gives the good to the agent with the lowest held share.
#[derive(Clone, Debug)]
pub struct Greedy2 {
    ledger: Ledger,
}

impl Greedy2 {
    pub fn new(n: usize) -> Self {
        Greedy2 { ledger: Ledger::new(n) }
    }

    pub fn scores(&self, column: &[Rat]) -> Vec<ExtRat> {
        column.iter().zip(self.ledger.agents()).map(|(v, s)| ExtRat::ratio(&s.held, &(&s.total + v))).collect()
    }
}

impl OnlineAllocator for Greedy2 {
    fn n(&self) -> usize {
        self.ledger.n()
    }

    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        validate_column(column, self.n())?;
        let who = first_argmin(&self.scores(column));
        self.ledger.record(column, who);
        Ok(who)
    }
}

/// Gives the good to the agent whose PROP1 quantity would be lowest if it
/// went elsewhere.
#[derive(Clone, Debug)]
pub struct Greedy3 {
    ledger: Ledger,
}

impl Greedy3 {
    pub fn new(n: usize) -> Self {
        Greedy3 { ledger: Ledger::new(n) }
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn scores(&self, column: &[Rat]) -> Vec<ExtRat> {
        column
            .iter()
            .zip(self.ledger.agents())
            .map(|(v, s)| {
                let outside = if *v > s.outside_max { v } else { &s.outside_max };
                ExtRat::ratio(&(&s.held + outside), &(&s.total + v))
            })
            .collect()
    }
}

impl OnlineAllocator for Greedy3 {
    fn n(&self) -> usize {
        self.ledger.n()
    }

    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        validate_column(column, self.n())?;
        let who = first_argmin(&self.scores(column));
        self.ledger.record(column, who);
        Ok(who)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn col(vals: &[&str]) -> Vec<Rat> {
        vals.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn greedy1_examples() {
        let mut g = Greedy1::new(2);
        assert_eq!(g.observe(&col(&["1", "1"])).unwrap(), 0);
        assert_eq!(
            g.scores(&col(&["1", "1/2"])),
            vec![ExtRat::Finite(col(&["1/2"])[0].clone()), ExtRat::Finite(col(&["1/3"])[0].clone())]
        );
        assert_eq!(g.observe(&col(&["1", "1/2"])).unwrap(), 0);
        let mut g = Greedy1::new(2);
        assert_eq!(g.observe(&col(&["0", "0"])).unwrap(), 0);
        assert!(g.observe(&col(&["-1", "0"])).is_err());
    }

    #[test]
    fn greedy2_examples() {
        let mut g = Greedy2::new(2);
        assert_eq!(g.observe(&col(&["1", "1"])).unwrap(), 0);
        assert_eq!(g.observe(&col(&["1", "1/16"])).unwrap(), 1);

        let mut g = Greedy2::new(3);
        g.observe(&col(&["1", "1", "0"])).unwrap();
        // Agent 3 has zero total and scores +inf.
        assert_eq!(g.scores(&col(&["1", "1", "0"]))[2], ExtRat::Infinite);
        assert_eq!(g.observe(&col(&["1", "1", "0"])).unwrap(), 1);
    }

    #[test]
    fn greedy3_opening() {
        let mut g = Greedy3::new(2);
        let owners: Vec<usize> = (0..3).map(|_| g.observe(&col(&["1", "1"])).unwrap()).collect();
        assert_eq!(owners, vec![0, 1, 0]);
        let alphas = g.ledger().alphas();
        assert_eq!(alphas, vec![ExtRat::Finite(Rat::one()), ExtRat::Finite(Rat::new(2, 3))]);
        // Agent 1 holds everything arrived; a zero column ties.
        let mut g = Greedy3::new(2);
        g.observe(&col(&["1", "0"])).unwrap();
        assert_eq!(g.observe(&col(&["0", "0"])).unwrap(), 0);
    }
}
