//! Independent checks: the random rule's closed-form guarantee, its
//! Bernstein tail bound, exact moments, and an exhaustive offline optimum.

mod interval;

pub use interval::{exp_enclosure, ln_enclosure, Enclosure, PRECISION_BITS};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::metrics::{enumeration_guard, prop1_ratio};
use crate::par::{self, Execution};
use crate::rat::Rat;

/// Decimal places reported for transcendental quantities.
pub const REPORT_DIGITS: u32 = 30;

fn check_n_delta(n: usize, delta: &Rat) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 agents, got {n}")));
    }
    if !delta.is_positive() || *delta >= Rat::one() {
        return Err(Error::InvalidInput(format!("delta {delta} outside (0, 1)")));
    }
    Ok(())
}

/// `27 / (128 ln(n/delta))`, the PROP1 factor the random rule attains with
/// probability at least `1 - delta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RandAlphaBound {
    pub n: usize,
    pub delta: Rat,
    pub ln_ratio: Enclosure,
    pub alpha: Enclosure,
    /// Lower endpoint of `alpha`, rounded down to [`REPORT_DIGITS`] places.
    pub decimal: String,
    /// Whether `ln(n/delta) >= 27/32` is certified, i.e. `alpha <= 1/4`.
    pub within_proof_domain: bool,
}

pub fn rand_alpha_bound(n: usize, delta: &Rat) -> Result<RandAlphaBound> {
    check_n_delta(n, delta)?;
    let ln_ratio = ln_enclosure(&(Rat::from(n) / delta))?;
    let k = Rat::new(27, 128);
    let alpha = Enclosure { lower: &k / &ln_ratio.upper, upper: &k / &ln_ratio.lower };
    let decimal = alpha.lower_decimal(REPORT_DIGITS);
    let within_proof_domain = ln_ratio.lower >= Rat::new(27, 32);
    Ok(RandAlphaBound { n, delta: delta.clone(), ln_ratio, alpha, decimal, within_proof_domain })
}

/// Inputs to Bernstein's inequality for one agent's unreceived value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BernsteinParams {
    pub variance_bound: Rat,
    pub term_bound: Rat,
    pub deviation: Rat,
    pub mean: Rat,
}

impl BernsteinParams {
    /// The instantiation used for the random rule: `sigma^2 = alpha G^2/n^2`,
    /// `b = alpha G/n`, `t = (1 - alpha) G/n`, mean `(n-1) G/n`.
    pub fn for_rand(n: usize, alpha: &Rat, total: &Rat) -> Self {
        let n = Rat::from(n);
        let share = total / &n;
        BernsteinParams {
            variance_bound: alpha * &share * &share,
            term_bound: alpha * &share,
            deviation: (Rat::one() - alpha) * &share,
            mean: (&n - Rat::one()) * &share,
        }
    }

    /// `t^2 / (2 sigma^2 + 2 b t / 3)`.
    pub fn exponent(&self) -> Rat {
        let t = &self.deviation;
        t * t / (Rat::from(2i64) * &self.variance_bound + Rat::new(2, 3) * &self.term_bound * t)
    }
}

/// `exp(-t^2 / (2 sigma^2 + 2 b t / 3))`.
pub fn bernstein_tail(params: &BernsteinParams) -> Result<Enclosure> {
    if params.variance_bound.is_negative() || !params.term_bound.is_positive() || !params.deviation.is_positive() {
        return Err(Error::InvalidInput("bernstein needs sigma^2 >= 0, b > 0, t > 0".into()));
    }
    Ok(exp_enclosure(&-params.exponent()))
}

/// One point of the union-bound chain: the tail at the largest admissible
/// `alpha` must not exceed `delta / n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub n: usize,
    pub delta: Rat,
    /// Upper endpoint of the `alpha` enclosure; the tail grows with `alpha`.
    pub alpha: Rat,
    pub tail: Enclosure,
    pub target: Rat,
    pub holds: bool,
}

pub fn bernstein_chain(n: usize, delta: &Rat) -> Result<ChainCheck> {
    let bound = rand_alpha_bound(n, delta)?;
    if !bound.within_proof_domain {
        return Err(Error::InvalidInput(format!("ln({n}/{delta}) is not certified above 27/32")));
    }
    let alpha = bound.alpha.upper.clone();
    // The total cancels from the exponent.
    let tail = bernstein_tail(&BernsteinParams::for_rand(n, &alpha, &Rat::one()))?;
    let target = delta / Rat::from(n);
    let holds = tail.upper <= target;
    Ok(ChainCheck { n, delta: delta.clone(), alpha, tail, target, holds })
}

/// Exact moments of the value an agent does not receive under uniform
/// random assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Moments {
    pub mean: Rat,
    pub variance: Rat,
}

pub fn analytic_moments(inst: &Instance, agent: usize) -> Result<Moments> {
    if agent >= inst.n() {
        return Err(Error::IndexOutOfRange(format!("agent {agent} (n = {})", inst.n())));
    }
    let n = Rat::from(inst.n());
    let miss = (&n - Rat::one()) / &n;
    let row = inst.row(agent);
    let mean = row.iter().sum::<Rat>() * &miss;
    let variance = row.iter().map(|v| v * v).sum::<Rat>() * &miss / &n;
    Ok(Moments { mean, variance })
}

/// `Some(variance <= alpha G^2 / n^2)` when every good is worth at most
/// `alpha G / n`, else `None`.
pub fn small_goods_variance_check(inst: &Instance, agent: usize, alpha: &Rat) -> Result<Option<bool>> {
    let moments = analytic_moments(inst, agent)?;
    let n = Rat::from(inst.n());
    let total = inst.total(agent);
    let cap = alpha * &total / &n;
    if inst.row(agent).iter().any(|v| *v > cap) {
        return Ok(None);
    }
    Ok(Some(moments.variance <= alpha * &total * &total / (&n * &n)))
}

/// Allocation with good `g` owned by base-`n` digit `g` of `code`.
pub fn decode_allocation(n: usize, m: usize, mut code: u64) -> Allocation {
    let owners = (0..m)
        .map(|_| {
            let o = (code % n as u64) as usize;
            code /= n as u64;
            o
        })
        .collect();
    Allocation::new(n, owners).expect("digits are below n")
}

/// Offline optimum of the PROP1 ratio over all `n^m` allocations. Among
/// optima the one with the smallest code is returned.
pub fn best_allocation_search(inst: &Instance, exec: Execution) -> Result<(Allocation, Rat)> {
    let (n, m) = (inst.n(), inst.m());
    let count = enumeration_guard(n, m)?;
    let best = par::fold_range(
        exec,
        count,
        || None::<(u64, Rat)>,
        |best, code| {
            let ratio = prop1_ratio(inst, &decode_allocation(n, m, code));
            match best {
                Some((_, ref r)) if *r >= ratio => best,
                _ => Some((code, ratio)),
            }
        },
        |left, right| match (left, right) {
            (Some(l), Some(r)) => Some(if r.1 > l.1 { r } else { l }),
            (l, r) => l.or(r),
        },
    );
    let (code, ratio) = best.expect("at least one allocation");
    Ok((decode_allocation(n, m, code), ratio))
}
