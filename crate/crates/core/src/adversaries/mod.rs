//! Lower-bound constructions: static instances that defeat the greedy rules
//! and adaptive generators that watch an allocator's decisions.

mod greedy3;
mod impossibility;

pub use greedy3::{greedy3_cycle_bound, Certificate, Greedy3Adversary};
pub use impossibility::{ImpossibilityAdversary, ImpossibilityParams};

use crate::algorithms::{AllocationTrace, OnlineAllocator, Recorder};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rat::Rat;

/// What an adaptive adversary sends next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Emit {
    Column(Vec<Rat>),
    Done,
}

pub trait AdaptiveAdversary {
    fn n(&self) -> usize;

    /// Next column given the owners (zero-based) of every good emitted so
    /// far.
    fn next_column(&mut self, history: &[usize]) -> Result<Emit>;
}

/// Instance realized by an adaptive run together with its trace.
#[derive(Clone, Debug)]
pub struct AdversaryRun {
    pub instance: Instance,
    pub trace: AllocationTrace,
}

/// Plays `adv` against `alloc` until the adversary is done.
pub fn drive<D, A>(adv: &mut D, alloc: &mut A) -> Result<AdversaryRun>
where
    D: AdaptiveAdversary + ?Sized,
    A: OnlineAllocator + ?Sized,
{
    let n = adv.n();
    if alloc.n() != n {
        return Err(Error::InvalidInput(format!("adversary has {n} agents, allocator has {}", alloc.n())));
    }
    let mut rec = Recorder::new(alloc);
    let mut columns = Vec::new();
    while let Emit::Column(col) = adv.next_column(rec.owners())? {
        if col.len() != n || col.iter().any(Rat::is_negative) {
            return Err(Error::AdversaryAssertion(format!("malformed column {col:?}")));
        }
        rec.step(alloc, &col)?;
        columns.push(col);
    }
    Ok(AdversaryRun { instance: Instance::from_columns(n, &columns)?, trace: rec.finish() })
}

fn check_alpha_target(n: usize, alpha: &Rat) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 agents, got {n}")));
    }
    if !alpha.is_positive() || *alpha > Rat::one() {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside (0, 1]")));
    }
    Ok(())
}

/// Smallest integer strictly above `x`.
fn next_integer_above(x: &Rat) -> usize {
    usize::try_from(x.floor() + 1).expect("size fits in usize")
}

fn column_of(n: usize, head: &[Rat]) -> Vec<Rat> {
    let mut col = head.to_vec();
    col.resize(n, Rat::zero());
    col
}

/// Number of goods in [`greedy1_adversary`]: the smallest integer above
/// `1 + 2 (n/alpha - 1)`.
pub fn greedy1_length(n: usize, alpha: &Rat) -> Result<usize> {
    check_alpha_target(n, alpha)?;
    let x = Rat::one() + Rat::from(2i64) * (Rat::from(n) / alpha - Rat::one());
    Ok(next_integer_above(&x))
}

/// Static instance on which the first greedy rule never serves agent 2: one
/// all-ones good, then goods worth 1 to agent 1 and 1/2 to agent 2.
pub fn greedy1_adversary(n: usize, alpha: &Rat) -> Result<Instance> {
    let m = greedy1_length(n, alpha)?;
    let mut columns = vec![vec![Rat::one(); n]];
    columns.extend((1..m).map(|_| column_of(n, &[Rat::one(), Rat::new(1, 2)])));
    Instance::from_columns(n, &columns)
}

/// Number of goods in [`greedy2_adversary`]: the smallest integer above
/// `2n/alpha`, which makes agent 1's final term `2n/m` fall below `alpha`.
pub fn greedy2_length(n: usize, alpha: &Rat) -> Result<usize> {
    check_alpha_target(n, alpha)?;
    Ok(next_integer_above(&(Rat::from(2 * n) / alpha)))
}

/// Static instance on which the second greedy rule gives agent 1 only the
/// first good: one all-ones good, then goods worth 1 to agent 1 and `1/m^2`
/// to agent 2.
pub fn greedy2_adversary(n: usize, alpha: &Rat) -> Result<Instance> {
    let m = greedy2_length(n, alpha)?;
    let tiny = Rat::new(1, (m * m) as i64);
    let mut columns = vec![vec![Rat::one(); n]];
    columns.extend((1..m).map(|_| column_of(n, &[Rat::one(), tiny.clone()])));
    Instance::from_columns(n, &columns)
}
