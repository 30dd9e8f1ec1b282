use serde::{Deserialize, Serialize};

use crate::algorithms::RandAllocator;
use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::metrics::check_alpha_prop1;
use crate::oracles::{rand_alpha_bound, REPORT_DIGITS};
use crate::par::{self, Execution};
use crate::rat::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub m: usize,
    pub totals: Vec<Rat>,
}

impl InstanceSummary {
    pub fn of(inst: &Instance) -> Self {
        InstanceSummary { n: inst.n(), m: inst.m(), totals: (0..inst.n()).map(|i| inst.total(i)).collect() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub n: usize,
    pub delta: Rat,
    pub alpha_used: Rat,
    pub trials: u64,
    pub failures: u64,
    pub failure_rate: Rat,
    pub empirical_failure_rate: f64,
    pub seed: u64,
    pub instance: InstanceSummary,
}

impl MonteCarloReport {
    /// Failure rate at most `delta`.
    pub fn within_delta(&self) -> bool {
        self.failure_rate <= self.delta
    }
}

/// `m` goods worth 1 to every one of `n` agents.
pub fn equal_goods_instance(n: usize, m: usize) -> Result<Instance> {
    Instance::new(vec![vec![Rat::one(); m]; n])
}

/// Runs the random rule `trials` times on a fixed instance, trial `k`
/// drawing from stream `k` of `seed`, and counts allocations that miss
/// PROP1 at the guaranteed factor (truncated down to 30 places).
pub fn montecarlo_rand(
    delta: &Rat,
    inst: &Instance,
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let n = inst.n();
    let alpha_used = rand_alpha_bound(n, delta)?.alpha.lower.truncate_decimal(REPORT_DIGITS);
    let failures = par::fold_range(
        exec,
        trials,
        || 0u64,
        |acc, trial| {
            let mut rng = RandAllocator::with_stream(n, seed, trial);
            let owners = (0..inst.m()).map(|_| rng.draw()).collect();
            let alloc = Allocation::new(n, owners).expect("draws are below n");
            acc + u64::from(!check_alpha_prop1(inst, &alloc, &alpha_used).holds)
        },
        |a, b| a + b,
    );
    let failure_rate = Rat::from_big(failures.into(), trials.into());
    Ok(MonteCarloReport {
        n,
        delta: delta.clone(),
        alpha_used,
        trials,
        failures,
        empirical_failure_rate: failure_rate.to_f64(),
        failure_rate,
        seed,
        instance: InstanceSummary::of(inst),
    })
}
