//! Exact fairness metrics: the running PROP1 quantity, PROP1 / EF1 / PROPX
//! checks with witnesses, and the exhaustive maximin-share oracle.

use std::ops::AddAssign;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Allocation, Instance};
use crate::par::{self, Execution};
use crate::rat::{ExtRat, Rat};

/// Upper limit on `n^m` for exhaustive enumeration.
pub const ENUMERATION_LIMIT: u64 = 10_000_000;

/// One agent's running position: value held, value arrived, and the most
/// valuable arrived good held by someone else (`c_i^(t)`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Standing {
    pub held: Rat,
    pub total: Rat,
    pub outside_max: Rat,
}

impl Standing {
    pub fn new() -> Self {
        Standing { held: Rat::zero(), total: Rat::zero(), outside_max: Rat::zero() }
    }

    /// `(v(A) + c) / v(G)`, or `+inf` when nothing of value has arrived.
    pub fn alpha(&self) -> ExtRat {
        ExtRat::ratio(&(&self.held + &self.outside_max), &self.total)
    }

    pub fn record(&mut self, value: &Rat, received: bool) {
        self.total += value;
        if received {
            self.held += value;
        } else if *value > self.outside_max {
            self.outside_max = value.clone();
        }
    }
}

impl Default for Standing {
    fn default() -> Self {
        Standing::new()
    }
}

/// Incremental per-agent standings for a streaming allocation.
#[derive(Clone, Debug)]
pub struct Ledger {
    agents: Vec<Standing>,
}

impl Ledger {
    pub fn new(n: usize) -> Self {
        Ledger { agents: vec![Standing::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agent(&self, i: usize) -> &Standing {
        &self.agents[i]
    }

    pub fn agents(&self) -> &[Standing] {
        &self.agents
    }

    pub fn record(&mut self, column: &[Rat], owner: usize) {
        for (i, (s, v)) in self.agents.iter_mut().zip(column).enumerate() {
            s.record(v, i == owner);
        }
    }

    pub fn alphas(&self) -> Vec<ExtRat> {
        self.agents.iter().map(Standing::alpha).collect()
    }

    pub fn min_alpha(&self) -> ExtRat {
        self.alphas().into_iter().min().unwrap_or(ExtRat::Infinite)
    }
}

/// `alpha_i^(t)` evaluated from scratch on the first `t` goods.
///
/// `owners` must cover at least goods `0..t`.
pub fn alpha_it(inst: &Instance, owners: &[usize], agent: usize, t: usize) -> ExtRat {
    assert!(t <= owners.len() && t <= inst.m(), "owners missing for prefix {t}");
    let row = &inst.row(agent)[..t];
    let total: Rat = row.iter().sum();
    let held: Rat = row.iter().zip(owners).filter(|(_, &o)| o == agent).map(|(v, _)| v).sum();
    let outside =
        row.iter().zip(owners).filter(|(_, &o)| o != agent).map(|(v, _)| v).max().cloned().unwrap_or_else(Rat::zero);
    ExtRat::ratio(&(held + outside), &total)
}

/// `min(1, n * min_i alpha_i^(m))`. An agent holding everything, or valuing
/// everything at zero, imposes no constraint.
pub fn prop1_ratio(inst: &Instance, alloc: &Allocation) -> Rat {
    let n = Rat::from(inst.n());
    let mut best = Rat::one();
    for i in 0..inst.n() {
        if alloc.owners().iter().all(|&o| o == i) {
            continue;
        }
        if let ExtRat::Finite(a) = alpha_it(inst, alloc.owners(), i, inst.m()) {
            best = best.min(&n * a);
        }
    }
    best
}

/// How an agent meets (or misses) a PROP1-style bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// The agent holds every good.
    WholeSet,
    /// Zero-based index of the extreme outside good.
    Good(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgentBound {
    pub agent: usize,
    pub witness: Witness,
    /// `v_i(A_i ∪ {witness})`, or `v_i(G)` for [`Witness::WholeSet`].
    pub achieved: Rat,
    /// `alpha * v_i(G) / n`.
    pub required: Rat,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub holds: bool,
    pub agents: Vec<AgentBound>,
}

impl BoundCheck {
    pub fn first_violation(&self) -> Option<&AgentBound> {
        self.agents.iter().find(|a| !a.satisfied)
    }
}

fn outside_bound(inst: &Instance, alloc: &Allocation, alpha: &Rat, pick_max: bool) -> BoundCheck {
    let n = Rat::from(inst.n());
    let agents: Vec<AgentBound> = (0..inst.n())
        .map(|i| {
            let row = inst.row(i);
            let total: Rat = row.iter().sum();
            let required = alpha * &total / &n;
            let held: Rat = alloc.bundle(i).iter().map(|&g| &row[g]).sum();
            let outside = (0..inst.m()).filter(|&g| alloc.owner(g) != i);
            // First index among equal extremes.
            let extreme = if pick_max {
                outside.fold(None, |best: Option<usize>, g| match best {
                    Some(b) if row[b] >= row[g] => Some(b),
                    _ => Some(g),
                })
            } else {
                outside.fold(None, |best: Option<usize>, g| match best {
                    Some(b) if row[b] <= row[g] => Some(b),
                    _ => Some(g),
                })
            };
            match extreme {
                None => AgentBound { agent: i, witness: Witness::WholeSet, achieved: total, required, satisfied: true },
                Some(g) => {
                    let achieved = held + &row[g];
                    let satisfied = achieved >= required;
                    AgentBound { agent: i, witness: Witness::Good(g), achieved, required, satisfied }
                }
            }
        })
        .collect();
    BoundCheck { holds: agents.iter().all(|a| a.satisfied), agents }
}

/// alpha-PROP1 with the most valuable outside good as witness.
pub fn check_alpha_prop1(inst: &Instance, alloc: &Allocation, alpha: &Rat) -> BoundCheck {
    outside_bound(inst, alloc, alpha, true)
}

/// alpha-PROPX: the least valuable outside good decides.
pub fn check_alpha_propx(inst: &Instance, alloc: &Allocation, alpha: &Rat) -> BoundCheck {
    outside_bound(inst, alloc, alpha, false)
}

pub fn check_propx(inst: &Instance, alloc: &Allocation) -> BoundCheck {
    check_alpha_propx(inst, alloc, &Rat::one())
}

/// A pair `(envious, envied)` whose envy survives removing the best good.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnvyPair {
    pub envious: usize,
    pub envied: usize,
    /// `v_i(A_i)`.
    pub own_value: Rat,
    /// `v_i(A_j \ {g})` for the good `g` in `A_j` that agent `i` values most.
    pub reduced_value: Rat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ef1Check {
    pub holds: bool,
    pub violation: Option<EnvyPair>,
}

/// alpha-EF1: `v_i(A_i) >= alpha * v_i(A_j \ {g})` for some `g` in `A_j`.
pub fn check_alpha_ef1(inst: &Instance, alloc: &Allocation, alpha: &Rat) -> Ef1Check {
    let bundles = alloc.bundles();
    for i in 0..inst.n() {
        let row = inst.row(i);
        let own: Rat = bundles[i].iter().map(|&g| &row[g]).sum();
        for (j, bundle) in bundles.iter().enumerate() {
            if i == j || bundle.is_empty() {
                continue;
            }
            let sum: Rat = bundle.iter().map(|&g| &row[g]).sum();
            let top = bundle.iter().map(|&g| &row[g]).max().expect("non-empty bundle");
            let reduced = sum - top;
            if own < alpha * &reduced {
                return Ef1Check {
                    holds: false,
                    violation: Some(EnvyPair { envious: i, envied: j, own_value: own, reduced_value: reduced }),
                };
            }
        }
    }
    Ef1Check { holds: true, violation: None }
}

pub fn check_ef1(inst: &Instance, alloc: &Allocation) -> Ef1Check {
    check_alpha_ef1(inst, alloc, &Rat::one())
}

/// Errors unless `n^m` is within the enumeration limit.
pub fn enumeration_guard(n: usize, m: usize) -> Result<u64> {
    let too_large = || Error::InstanceTooLarge { n, m, limit: ENUMERATION_LIMIT };
    let mut count: u64 = 1;
    for _ in 0..m {
        count = count.checked_mul(n as u64).ok_or_else(too_large)?;
        if count > ENUMERATION_LIMIT {
            return Err(too_large());
        }
    }
    Ok(count)
}

/// Exact maximin share of `agent` by exhaustive enumeration of the
/// assignments of goods to `n` parts. Parts are treated as unlabeled (goods
/// only open a new part after all earlier parts are in use), which visits
/// every partition exactly once.
pub fn mms_exact(inst: &Instance, agent: usize) -> Result<Rat> {
    let n = inst.n();
    enumeration_guard(n, inst.m())?;
    if agent >= n {
        return Err(Error::IndexOutOfRange(format!("agent {agent} (n = {n})")));
    }
    let row = inst.row(agent);
    if row.is_empty() {
        return Ok(Rat::zero());
    }
    // Scale to integers over the common denominator.
    let lcm = row.iter().fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = row.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let total: BigInt = ints.iter().sum();
    let best = if total.to_u128().is_some_and(|t| t < u128::MAX / 2) {
        let small: Vec<u128> = ints.iter().map(|v| v.to_u128().expect("bounded by total")).collect();
        BigInt::from(max_min_partition(&small, n))
    } else {
        max_min_partition(&ints, n)
    };
    Ok(Rat::from_big(best, lcm))
}

fn max_min_partition<T>(weights: &[T], parts: usize) -> T
where
    T: Clone + Ord + Zero + for<'a> AddAssign<&'a T>,
{
    fn walk<T>(weights: &[T], g: usize, sums: &mut Vec<T>, used: usize, best: &mut T)
    where
        T: Clone + Ord + Zero + for<'a> AddAssign<&'a T>,
    {
        if g == weights.len() {
            let worst = sums.iter().min().expect("at least one part");
            if *worst > *best {
                *best = worst.clone();
            }
            return;
        }
        let open = (used + 1).min(sums.len());
        for p in 0..open {
            let saved = sums[p].clone();
            sums[p] += &weights[g];
            walk(weights, g + 1, sums, used.max(p + 1), best);
            sums[p] = saved;
        }
    }
    let mut sums = vec![T::zero(); parts];
    let mut best = T::zero();
    walk(weights, 0, &mut sums, 0, &mut best);
    best
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmsProfile {
    pub mms: Vec<Rat>,
}

pub fn mms_profile(inst: &Instance, exec: Execution) -> Result<MmsProfile> {
    enumeration_guard(inst.n(), inst.m())?;
    let mms = par::map_range(exec, inst.n(), |i| mms_exact(inst, i)).into_iter().collect::<Result<_>>()?;
    Ok(MmsProfile { mms })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MmsCheck {
    pub holds: bool,
    /// First agent with `v_i(A_i) < alpha * MMS_i`.
    pub violation: Option<usize>,
    pub profile: MmsProfile,
    /// `min(1, min_i v_i(A_i) / MMS_i)`, agents with `MMS_i = 0` excluded.
    pub ratio: Rat,
}

pub fn check_alpha_mms(inst: &Instance, alloc: &Allocation, alpha: &Rat, exec: Execution) -> Result<MmsCheck> {
    let profile = mms_profile(inst, exec)?;
    Ok(mms_against_profile(inst, alloc, alpha, profile))
}

pub fn mms_against_profile(inst: &Instance, alloc: &Allocation, alpha: &Rat, profile: MmsProfile) -> MmsCheck {
    let mut violation = None;
    let mut ratio = Rat::one();
    for (i, mms) in profile.mms.iter().enumerate() {
        let own = inst.bundle_value(i, alloc.bundle(i)).expect("allocation matches instance");
        if violation.is_none() && own < alpha * mms {
            violation = Some(i);
        }
        if mms.is_positive() {
            ratio = ratio.min(own / mms);
        }
    }
    MmsCheck { holds: violation.is_none(), violation, profile, ratio }
}

/// Which notions a [`FairnessReport`] should evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Prop1,
    Ef1,
    Mms,
    Propx,
}

impl std::str::FromStr for Notion {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "prop1" => Ok(Notion::Prop1),
            "ef1" => Ok(Notion::Ef1),
            "mms" => Ok(Notion::Mms),
            "propx" => Ok(Notion::Propx),
            other => Err(Error::Parse(format!("unknown fairness notion {other:?}"))),
        }
    }
}

/// Per-agent PROP1 witness in one-based labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEntry {
    pub agent: usize,
    /// `"self"` when the agent holds every good, else the one-based good.
    pub witness: String,
    pub achieved: Rat,
    pub required: Rat,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prop1Section {
    pub holds: bool,
    pub witnesses: Vec<WitnessEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ef1Section {
    pub holds: bool,
    /// One-based `[envious, envied]`.
    pub violation: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropxSection {
    pub holds: bool,
    /// One-based `[agent, good]` where the least valuable outside good fails.
    pub violation: Option<[usize; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MmsSection {
    pub holds: bool,
    pub mms: Vec<Rat>,
    pub mms_ratio: Rat,
    pub violation: Option<usize>,
}

/// Wire-format summary of every requested notion at one threshold `alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FairnessReport {
    pub alpha: Rat,
    pub prop1_ratio: Rat,
    pub prop1: Option<Prop1Section>,
    pub ef1: Option<Ef1Section>,
    pub propx: Option<PropxSection>,
    pub mms: Option<MmsSection>,
}

fn witness_label(w: &Witness) -> String {
    match w {
        Witness::WholeSet => "self".to_string(),
        Witness::Good(g) => (g + 1).to_string(),
    }
}

pub fn fairness_report(
    inst: &Instance,
    alloc: &Allocation,
    notions: &[Notion],
    alpha: &Rat,
    exec: Execution,
) -> Result<FairnessReport> {
    alloc.check_against(inst)?;
    if alpha.is_negative() || *alpha > Rat::one() {
        return Err(Error::InvalidInput(format!("alpha {alpha} outside [0, 1]")));
    }
    let wants = |n: Notion| notions.contains(&n);
    let prop1 = wants(Notion::Prop1).then(|| {
        let c = check_alpha_prop1(inst, alloc, alpha);
        Prop1Section {
            holds: c.holds,
            witnesses: c
                .agents
                .iter()
                .map(|a| WitnessEntry {
                    agent: a.agent + 1,
                    witness: witness_label(&a.witness),
                    achieved: a.achieved.clone(),
                    required: a.required.clone(),
                    satisfied: a.satisfied,
                })
                .collect(),
        }
    });
    let ef1 = wants(Notion::Ef1).then(|| {
        let c = check_alpha_ef1(inst, alloc, alpha);
        Ef1Section { holds: c.holds, violation: c.violation.map(|v| [v.envious + 1, v.envied + 1]) }
    });
    let propx = wants(Notion::Propx).then(|| {
        let c = check_alpha_propx(inst, alloc, alpha);
        let violation = c.first_violation().map(|a| match a.witness {
            Witness::Good(g) => [a.agent + 1, g + 1],
            Witness::WholeSet => unreachable!("whole-set agents always satisfy the bound"),
        });
        PropxSection { holds: c.holds, violation }
    });
    let mms = if wants(Notion::Mms) {
        let c = check_alpha_mms(inst, alloc, alpha, exec)?;
        Some(MmsSection {
            holds: c.holds,
            mms: c.profile.mms,
            mms_ratio: c.ratio,
            violation: c.violation.map(|i| i + 1),
        })
    } else {
        None
    };
    Ok(FairnessReport { alpha: alpha.clone(), prop1_ratio: prop1_ratio(inst, alloc), prop1, ef1, propx, mms })
}
