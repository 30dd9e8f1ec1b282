//! Online allocation rules behind a single streaming interface.

mod greedy;
mod miv;
mod random;
mod robust;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

pub use greedy::{Greedy1, Greedy2, Greedy3};
pub use miv::{phi, MivAllocator, MivStep};
pub use random::RandAllocator;
pub use robust::{robust_beta, Override, Robustified};

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance, Predictions};
use crate::metrics::{prop1_ratio, Ledger};
use crate::rat::{ExtRat, Rat};

/// A rule that assigns each arriving good immediately and irrevocably.
pub trait OnlineAllocator {
    fn n(&self) -> usize;

    /// Sees the values of the arriving good and returns the zero-based
    /// receiving agent.
    fn observe(&mut self, column: &[Rat]) -> Result<usize>;

    /// Current potential, for rules that maintain one.
    fn potential(&self) -> Option<Rat> {
        None
    }
}

impl<A: OnlineAllocator + ?Sized> OnlineAllocator for Box<A> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn observe(&mut self, column: &[Rat]) -> Result<usize> {
        (**self).observe(column)
    }
    fn potential(&self) -> Option<Rat> {
        (**self).potential()
    }
}

pub(crate) fn validate_column(column: &[Rat], n: usize) -> Result<()> {
    if column.len() != n {
        return Err(Error::InvalidInput(format!("column has {} entries, expected {n}", column.len())));
    }
    if let Some(v) = column.iter().find(|v| v.is_negative()) {
        return Err(Error::InvalidInput(format!("negative value {v}")));
    }
    Ok(())
}

/// Selectable allocation rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    Greedy1,
    Greedy2,
    Greedy3,
    Rand,
    Miv,
}

impl AlgoKind {
    pub const ALL: [AlgoKind; 5] =
        [AlgoKind::Greedy1, AlgoKind::Greedy2, AlgoKind::Greedy3, AlgoKind::Rand, AlgoKind::Miv];

    pub fn as_str(self) -> &'static str {
        match self {
            AlgoKind::Greedy1 => "greedy1",
            AlgoKind::Greedy2 => "greedy2",
            AlgoKind::Greedy3 => "greedy3",
            AlgoKind::Rand => "rand",
            AlgoKind::Miv => "miv",
        }
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgoKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AlgoKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm {s:?}")))
    }
}

/// Builds a fresh allocator. `miv` expects values already normalized so
/// every prediction equals 1; see [`build_with_predictions`] for raw input.
pub fn build(kind: AlgoKind, n: usize, seed: Option<u64>) -> Result<Box<dyn OnlineAllocator + Send>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 agents, got {n}")));
    }
    Ok(match kind {
        AlgoKind::Greedy1 => Box::new(Greedy1::new(n)),
        AlgoKind::Greedy2 => Box::new(Greedy2::new(n)),
        AlgoKind::Greedy3 => Box::new(Greedy3::new(n)),
        AlgoKind::Miv => Box::new(MivAllocator::new(n)),
        AlgoKind::Rand => {
            let seed = seed.ok_or_else(|| Error::InvalidInput("the rand rule requires a seed".into()))?;
            Box::new(RandAllocator::new(n, seed))
        }
    })
}

/// Like [`build`], but `miv` is wrapped in [`Robustified`] so it runs on raw
/// values under the given predictions. Other rules ignore predictions.
pub fn build_with_predictions(
    kind: AlgoKind,
    n: usize,
    seed: Option<u64>,
    predictions: &Predictions,
) -> Result<Box<dyn OnlineAllocator + Send>> {
    let inner = build(kind, n, seed)?;
    if kind != AlgoKind::Miv {
        return Ok(inner);
    }
    Ok(Box::new(Robustified::new(inner, predictions)?))
}

/// Perfect predictions for `inst`; agents valuing everything at zero get 1.
pub fn exact_predictions(inst: &Instance) -> Predictions {
    let p = (0..inst.n())
        .map(|i| {
            let top = inst.max_value(i);
            if top.is_zero() {
                Rat::one()
            } else {
                top
            }
        })
        .collect();
    Predictions { p, epsilon: Rat::zero() }
}

/// The record of one streaming run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AllocationTrace {
    pub n: usize,
    /// Zero-based owner of each good.
    pub owners: Vec<usize>,
    /// `alpha[t][i]` is `alpha_i` after good `t` is assigned.
    pub alpha: Vec<Vec<ExtRat>>,
    /// `Phi^0, Phi^1, ...` for rules that keep a potential.
    pub potential: Option<Vec<Rat>>,
}

impl AllocationTrace {
    pub fn allocation(&self) -> Allocation {
        Allocation::new(self.n, self.owners.clone()).expect("trace owners are in range")
    }

    /// JSON with one-based owners; keys sorted.
    pub fn to_json_value(&self, algo: &str, inst: &Instance) -> Value {
        let mut v = json!({
            "algo": algo,
            "n": self.n,
            "m": self.owners.len(),
            "owners": self.owners.iter().map(|o| o + 1).collect::<Vec<_>>(),
            "alpha": self.alpha,
            "prop1_ratio": prop1_ratio(inst, &self.allocation()),
        });
        if let Some(p) = &self.potential {
            v["potential"] = json!(p);
        }
        v
    }
}

/// Builds an [`AllocationTrace`] one good at a time, for callers that choose
/// columns online.
#[derive(Clone, Debug)]
pub struct Recorder {
    ledger: Ledger,
    owners: Vec<usize>,
    alpha: Vec<Vec<ExtRat>>,
    potential: Option<Vec<Rat>>,
}

impl Recorder {
    pub fn new<A: OnlineAllocator + ?Sized>(alloc: &A) -> Self {
        Recorder {
            ledger: Ledger::new(alloc.n()),
            owners: Vec::new(),
            alpha: Vec::new(),
            potential: alloc.potential().map(|p| vec![p]),
        }
    }

    /// Shows `column` to `alloc` and records the outcome.
    pub fn step<A: OnlineAllocator + ?Sized>(&mut self, alloc: &mut A, column: &[Rat]) -> Result<usize> {
        let n = self.ledger.n();
        let owner = alloc.observe(column)?;
        if owner >= n {
            return Err(Error::IndexOutOfRange(format!("allocator chose agent {owner} (n = {n})")));
        }
        self.ledger.record(column, owner);
        self.owners.push(owner);
        self.alpha.push(self.ledger.alphas());
        if let (Some(ps), Some(p)) = (self.potential.as_mut(), alloc.potential()) {
            ps.push(p);
        }
        Ok(owner)
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn owners(&self) -> &[usize] {
        &self.owners
    }

    pub fn finish(self) -> AllocationTrace {
        AllocationTrace { n: self.ledger.n(), owners: self.owners, alpha: self.alpha, potential: self.potential }
    }
}

/// Feeds the goods of `inst` to `alloc` in arrival order.
pub fn run<A: OnlineAllocator + ?Sized>(alloc: &mut A, inst: &Instance) -> Result<AllocationTrace> {
    let n = inst.n();
    if alloc.n() != n {
        return Err(Error::InvalidInput(format!("allocator has {} agents, instance has {n}", alloc.n())));
    }
    let mut rec = Recorder::new(alloc);
    for t in 0..inst.m() {
        rec.step(alloc, &inst.column(t))?;
    }
    Ok(rec.finish())
}
