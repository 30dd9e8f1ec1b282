//! Adversary-versus-allocator runs and CSV sweep tables.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::adversaries::{
    drive, greedy1_adversary, greedy2_adversary, greedy3_cycle_bound, Certificate, Greedy3Adversary,
    ImpossibilityAdversary,
};
use crate::algorithms::{build, run, AlgoKind, AllocationTrace};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metrics::{check_alpha_ef1, check_alpha_mms, check_alpha_prop1, check_alpha_propx, prop1_ratio, Notion};
use crate::par::{self, Execution};
use crate::rat::Rat;

/// Default good budget for the adaptive third-greedy construction.
pub const DEFAULT_MAX_STEPS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AdversaryKind {
    #[serde(rename = "greedy1")]
    Greedy1,
    #[serde(rename = "greedy2")]
    Greedy2,
    #[serde(rename = "greedy3")]
    Greedy3,
    #[serde(rename = "miv-impossibility")]
    MivImpossibility,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 4] =
        [AdversaryKind::Greedy1, AdversaryKind::Greedy2, AdversaryKind::Greedy3, AdversaryKind::MivImpossibility];

    pub fn as_str(self) -> &'static str {
        match self {
            AdversaryKind::Greedy1 => "greedy1",
            AdversaryKind::Greedy2 => "greedy2",
            AdversaryKind::Greedy3 => "greedy3",
            AdversaryKind::MivImpossibility => "miv-impossibility",
        }
    }

    /// The rule each construction is built against.
    pub fn default_allocator(self) -> AlgoKind {
        match self {
            AdversaryKind::Greedy1 => AlgoKind::Greedy1,
            AdversaryKind::Greedy2 => AlgoKind::Greedy2,
            AdversaryKind::Greedy3 => AlgoKind::Greedy3,
            AdversaryKind::MivImpossibility => AlgoKind::Miv,
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AdversaryKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown adversary {s:?}")))
    }
}

/// One adversary instantiation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversarySpec {
    pub target: AdversaryKind,
    pub n: usize,
    pub alpha: Rat,
    pub notion: Notion,
    pub max_steps: usize,
}

/// Everything a single adversary run produced.
#[derive(Clone, Debug)]
pub struct AdversaryOutcome {
    pub spec: AdversarySpec,
    pub allocator: AlgoKind,
    pub instance: Instance,
    pub trace: AllocationTrace,
    pub prop1_ratio: Rat,
    pub certificates: Vec<Certificate>,
    pub predicted_cycles: Option<f64>,
}

/// Plays `spec` against a fresh `allocator`.
pub fn adversary_run(spec: &AdversarySpec, allocator: AlgoKind, seed: Option<u64>) -> Result<AdversaryOutcome> {
    if spec.target == AdversaryKind::Greedy3 && allocator != AlgoKind::Greedy3 {
        return Err(Error::InvalidInput("the greedy3 construction only drives the greedy3 rule".into()));
    }
    let mut alloc = build(allocator, spec.n, seed)?;
    let mut certificates = Vec::new();
    let mut predicted_cycles = None;
    let (instance, trace) = match spec.target {
        AdversaryKind::Greedy1 | AdversaryKind::Greedy2 => {
            let inst = if spec.target == AdversaryKind::Greedy1 {
                greedy1_adversary(spec.n, &spec.alpha)?
            } else {
                greedy2_adversary(spec.n, &spec.alpha)?
            };
            let trace = run(&mut alloc, &inst)?;
            (inst, trace)
        }
        AdversaryKind::Greedy3 => {
            let mut adv = Greedy3Adversary::new(spec.n, spec.alpha.clone(), spec.max_steps)?;
            predicted_cycles = Some(greedy3_cycle_bound(spec.n, spec.alpha.to_f64()));
            let out = drive(&mut adv, &mut alloc)?;
            certificates = adv.certificates().to_vec();
            (out.instance, out.trace)
        }
        AdversaryKind::MivImpossibility => {
            let mut adv = ImpossibilityAdversary::new(spec.n, &spec.alpha, spec.notion)?;
            let out = drive(&mut adv, &mut alloc)?;
            (out.instance, out.trace)
        }
    };
    let prop1_ratio = prop1_ratio(&instance, &trace.allocation());
    Ok(AdversaryOutcome { spec: spec.clone(), allocator, instance, trace, prop1_ratio, certificates, predicted_cycles })
}

/// Verdicts of one outcome at the construction's `alpha`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdicts {
    pub prop1_alpha: bool,
    pub prop1_one_over_n: bool,
    pub ef1_alpha: bool,
    /// `None` when the instance is too large for exact MMS.
    pub mms_alpha: Option<bool>,
    pub propx_alpha: bool,
}

pub fn verdicts(outcome: &AdversaryOutcome, exec: Execution) -> Result<Verdicts> {
    let inst = &outcome.instance;
    let alloc = outcome.trace.allocation();
    let alpha = &outcome.spec.alpha;
    let mms_alpha = match check_alpha_mms(inst, &alloc, alpha, exec) {
        Ok(c) => Some(c.holds),
        Err(Error::InstanceTooLarge { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(Verdicts {
        prop1_alpha: check_alpha_prop1(inst, &alloc, alpha).holds,
        prop1_one_over_n: check_alpha_prop1(inst, &alloc, &Rat::new(1, inst.n() as i64)).holds,
        ef1_alpha: check_alpha_ef1(inst, &alloc, alpha).holds,
        mms_alpha,
        propx_alpha: check_alpha_propx(inst, &alloc, alpha).holds,
    })
}

fn default_notion() -> Notion {
    Notion::Ef1
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

fn default_repetitions() -> usize {
    1
}

/// One sweep: the cartesian product of `n` and `alpha`, repeated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignEntry {
    pub adversary: AdversaryKind,
    /// Defaults to the rule the construction targets.
    #[serde(default)]
    pub allocator: Option<AlgoKind>,
    pub n: Vec<usize>,
    pub alpha: Vec<Rat>,
    #[serde(default = "default_notion")]
    pub notion: Notion,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    /// Base seed for the random rule; repetition `k` uses `seed + k`.
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub entries: Vec<CampaignEntry>,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: CampaignConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects incompatible pairings before any run starts.
    pub fn validate(&self) -> Result<()> {
        for (k, e) in self.entries.iter().enumerate() {
            let alloc = e.allocator.unwrap_or(e.adversary.default_allocator());
            if e.adversary == AdversaryKind::Greedy3 && alloc != AlgoKind::Greedy3 {
                return Err(Error::InvalidInput(format!("entry {k}: greedy3 construction needs the greedy3 rule")));
            }
            if alloc == AlgoKind::Rand && e.seed.is_none() {
                return Err(Error::InvalidInput(format!("entry {k}: the rand rule needs a seed")));
            }
            if alloc == AlgoKind::Rand && e.adversary == AdversaryKind::MivImpossibility {
                return Err(Error::InvalidInput(format!("entry {k}: adaptive constructions are not run against rand")));
            }
            if e.repetitions == 0 {
                return Err(Error::InvalidInput(format!("entry {k}: repetitions must be at least 1")));
            }
        }
        Ok(())
    }
}

/// One CSV row. Rationals are `p/q` strings with a float companion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignRow {
    pub adversary: String,
    pub allocator: String,
    pub n: usize,
    pub alpha: Rat,
    pub notion: String,
    pub repetition: usize,
    pub goods: usize,
    pub cycles: Option<usize>,
    pub prop1_ratio: Rat,
    pub prop1_ratio_f64: f64,
    pub ratio_below_alpha: bool,
    pub prop1_alpha: bool,
    pub prop1_one_over_n: bool,
    pub ef1_alpha: bool,
    pub mms_alpha: Option<bool>,
    pub propx_alpha: bool,
    pub assertions_passed: bool,
    pub error: String,
}

struct Job {
    spec: AdversarySpec,
    allocator: AlgoKind,
    repetition: usize,
    seed: Option<u64>,
}

fn expand(cfg: &CampaignConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for e in &cfg.entries {
        let allocator = e.allocator.unwrap_or(e.adversary.default_allocator());
        for &n in &e.n {
            for alpha in &e.alpha {
                for repetition in 0..e.repetitions {
                    jobs.push(Job {
                        spec: AdversarySpec {
                            target: e.adversary,
                            n,
                            alpha: alpha.clone(),
                            notion: e.notion,
                            max_steps: e.max_steps,
                        },
                        allocator,
                        repetition,
                        seed: e.seed.map(|s| s.wrapping_add(repetition as u64)),
                    });
                }
            }
        }
    }
    jobs
}

fn notion_label(n: Notion) -> &'static str {
    match n {
        Notion::Prop1 => "prop1",
        Notion::Ef1 => "ef1",
        Notion::Mms => "mms",
        Notion::Propx => "propx",
    }
}

fn run_job(job: &Job) -> Result<CampaignRow> {
    let mut row = CampaignRow {
        adversary: job.spec.target.to_string(),
        allocator: job.allocator.to_string(),
        n: job.spec.n,
        alpha: job.spec.alpha.clone(),
        notion: notion_label(job.spec.notion).to_string(),
        repetition: job.repetition,
        goods: 0,
        cycles: None,
        prop1_ratio: Rat::zero(),
        prop1_ratio_f64: 0.0,
        ratio_below_alpha: false,
        prop1_alpha: false,
        prop1_one_over_n: false,
        ef1_alpha: false,
        mms_alpha: None,
        propx_alpha: false,
        assertions_passed: true,
        error: String::new(),
    };
    let outcome = match adversary_run(&job.spec, job.allocator, job.seed) {
        Ok(o) => o,
        Err(e) if e.is_invariant_breach() => {
            row.assertions_passed = false;
            row.error = e.to_string();
            return Ok(row);
        }
        Err(e) => return Err(e),
    };
    // Rows already run in parallel.
    let v = verdicts(&outcome, Execution::Sequential)?;
    row.goods = outcome.instance.m();
    row.cycles = (job.spec.target == AdversaryKind::Greedy3).then_some(outcome.certificates.len());
    row.prop1_ratio_f64 = outcome.prop1_ratio.to_f64();
    row.ratio_below_alpha = outcome.prop1_ratio < job.spec.alpha;
    row.prop1_ratio = outcome.prop1_ratio;
    row.prop1_alpha = v.prop1_alpha;
    row.prop1_one_over_n = v.prop1_one_over_n;
    row.ef1_alpha = v.ef1_alpha;
    row.mms_alpha = v.mms_alpha;
    row.propx_alpha = v.propx_alpha;
    Ok(row)
}

/// Runs every job of `cfg`; rows come back in configuration order.
pub fn campaign(cfg: &CampaignConfig, exec: Execution) -> Result<Vec<CampaignRow>> {
    cfg.validate()?;
    let jobs = expand(cfg);
    par::map_slice(exec, &jobs, run_job).into_iter().collect()
}

const HEADER: [&str; 18] = [
    "adversary",
    "allocator",
    "n",
    "alpha",
    "notion",
    "repetition",
    "goods",
    "cycles",
    "prop1_ratio",
    "prop1_ratio_f64",
    "ratio_below_alpha",
    "prop1_alpha",
    "prop1_one_over_n",
    "ef1_alpha",
    "mms_alpha",
    "propx_alpha",
    "assertions_passed",
    "error",
];

/// Writes rows with a header, even when there are none.
pub fn write_csv<W: Write>(rows: &[CampaignRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CampaignRow>> {
    let mut r = csv::Reader::from_reader(input);
    let rows = r.deserialize().collect::<std::result::Result<Vec<CampaignRow>, _>>()?;
    Ok(rows)
}
