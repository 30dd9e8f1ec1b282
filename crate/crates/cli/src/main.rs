//! `fairdiv`: command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or domain errors, 2 when a
//! mathematical invariant or adversary assertion breaks.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairdiv::algorithms::{build_with_predictions, exact_predictions, run, AlgoKind};
use fairdiv::harness::{
    adversary_run, campaign, equal_goods_instance, montecarlo_rand, potential_grid, verdicts, write_csv, AdversaryKind,
    AdversarySpec, CampaignConfig, DEFAULT_MAX_STEPS,
};
use fairdiv::metrics::{fairness_report, Notion};
use fairdiv::oracles::{analytic_moments, bernstein_chain, best_allocation_search, rand_alpha_bound, REPORT_DIGITS};
use fairdiv::{load_instance, Allocation, Error, Execution, Predictions, Rat, Result};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "fairdiv", version, about = "Online fair division of indivisible goods")]
struct Cli {
    /// Run data-parallel loops on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stream an instance through an allocation rule and write its trace.
    Run {
        #[arg(long, value_parser = parse_algo)]
        algo: AlgoKind,
        #[arg(long)]
        instance: PathBuf,
        /// JSON `{"p": [...], "epsilon": "..."}`; miv only.
        #[arg(long)]
        predictions: Option<PathBuf>,
        /// Overrides the prediction error; miv only.
        #[arg(long, value_parser = parse_rat)]
        epsilon: Option<Rat>,
        /// Required by the rand rule.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check an allocation against fairness notions; report on stdout.
    Metrics {
        #[arg(long)]
        instance: PathBuf,
        /// JSON `{"owner": [...]}` with one-based agents.
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_notion, default_value = "prop1,ef1,mms,propx")]
        check: Vec<Notion>,
        #[arg(long, value_parser = parse_rat, default_value = "1")]
        alpha: Rat,
    },
    /// Play an adversarial construction against its allocation rule.
    Adversary {
        #[arg(long, value_parser = parse_adversary)]
        target: AdversaryKind,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, value_parser = parse_rat)]
        alpha: Rat,
        #[arg(long, value_parser = parse_notion, default_value = "ef1")]
        notion: Notion,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Rule to play against; defaults to the construction's target.
        #[arg(long, value_parser = parse_algo)]
        allocator: Option<AlgoKind>,
        #[arg(long)]
        seed: Option<u64>,
        /// Defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified bounds and exhaustive searches.
    Oracle {
        #[arg(long, value_enum)]
        op: OracleOp,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_parser = parse_rat)]
        delta: Option<Rat>,
        /// Input for `moments` and `best-alloc`.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// One-based agent for `moments`; all agents when absent.
        #[arg(long)]
        agent: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo check of the random rule's tail guarantee.
    Montecarlo {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_rat)]
        delta: Rat,
        /// Defaults to `--m` equal-valued goods.
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        m: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an adversary-versus-rule sweep and write a CSV table.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the potential surface over `(a, y a)` as CSV.
    PotentialGrid {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_rat, default_value = "1/20")]
        a_min: Rat,
        #[arg(long, value_parser = parse_rat, default_value = "1")]
        a_max: Rat,
        #[arg(long, value_parser = parse_rat, default_value = "0")]
        ya_min: Rat,
        #[arg(long, value_parser = parse_rat, default_value = "1")]
        ya_max: Rat,
        #[arg(long, default_value_t = 21)]
        resolution: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OracleOp {
    RandAlpha,
    Bernstein,
    Moments,
    BestAlloc,
}

fn parse_rat(s: &str) -> std::result::Result<Rat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algo(s: &str) -> std::result::Result<AlgoKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_adversary(s: &str) -> std::result::Result<AdversaryKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_notion(s: &str) -> std::result::Result<Notion, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn write_json(value: &Value, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn require<T>(v: Option<T>, flag: &str, op: &str) -> Result<T> {
    v.ok_or_else(|| Error::InvalidInput(format!("--{flag} is required for {op}")))
}

fn cmd_run(
    algo: AlgoKind,
    instance: &Path,
    predictions: Option<&Path>,
    epsilon: Option<Rat>,
    seed: Option<u64>,
    out: &Path,
) -> Result<()> {
    if algo == AlgoKind::Rand && seed.is_none() {
        return Err(Error::InvalidInput("--seed is required for --algo rand".into()));
    }
    let inst = load_instance(instance)?;
    let mut pred = match predictions {
        Some(p) => Predictions::from_json(&fs::read_to_string(p)?)?,
        None => exact_predictions(&inst),
    };
    if let Some(e) = epsilon {
        pred = Predictions::new(pred.p, e)?;
    }
    let mut alloc = build_with_predictions(algo, inst.n(), seed, &pred)?;
    let trace = run(&mut alloc, &inst)?;
    write_json(&trace.to_json_value(algo.as_str(), &inst), Some(out))
}

fn cmd_metrics(instance: &Path, allocation: &Path, check: &[Notion], alpha: &Rat, exec: Execution) -> Result<()> {
    let inst = load_instance(instance)?;
    let alloc = Allocation::from_json(&fs::read_to_string(allocation)?, inst.n())?;
    let report = fairness_report(&inst, &alloc, check, alpha, exec)?;
    write_json(&serde_json::to_value(report)?, None)
}

fn cmd_adversary(
    spec: AdversarySpec,
    allocator: Option<AlgoKind>,
    seed: Option<u64>,
    out: Option<&Path>,
    exec: Execution,
) -> Result<()> {
    let allocator = allocator.unwrap_or(spec.target.default_allocator());
    let outcome = adversary_run(&spec, allocator, seed)?;
    let v = verdicts(&outcome, exec)?;
    let certificates: Vec<Value> = outcome
        .certificates
        .iter()
        .map(|c| {
            json!({
                "cycle": c.cycle,
                "goods": c.goods,
                "equalizing_goods": c.equalizing_goods,
                "inverse_alpha": c.inverse_alpha,
                "bound": c.bound,
            })
        })
        .collect();
    let mut value = json!({
        "adversary": spec.target.as_str(),
        "allocator": allocator.as_str(),
        "n": spec.n,
        "alpha": spec.alpha,
        "instance": serde_json::from_str::<Value>(&outcome.instance.to_json())?,
        "trace": outcome.trace.to_json_value(allocator.as_str(), &outcome.instance),
        "prop1_ratio": outcome.prop1_ratio,
        "ratio_below_alpha": outcome.prop1_ratio < spec.alpha,
        "verdicts": {
            "prop1_alpha": v.prop1_alpha,
            "prop1_one_over_n": v.prop1_one_over_n,
            "ef1_alpha": v.ef1_alpha,
            "mms_alpha": v.mms_alpha,
            "propx_alpha": v.propx_alpha,
        },
    });
    if spec.target == AdversaryKind::Greedy3 {
        value["certificates"] = json!(certificates);
        value["cycles"] = json!(outcome.certificates.len());
        value["predicted_cycles"] = json!(outcome.predicted_cycles);
    }
    if spec.target == AdversaryKind::MivImpossibility {
        value["notion"] = json!(spec.notion);
    }
    write_json(&value, out)
}

fn cmd_oracle(
    op: OracleOp,
    n: Option<usize>,
    delta: Option<Rat>,
    instance: Option<&Path>,
    agent: Option<usize>,
    exec: Execution,
) -> Result<Value> {
    Ok(match op {
        OracleOp::RandAlpha => {
            let n = require(n, "n", "rand-alpha")?;
            let delta = require(delta, "delta", "rand-alpha")?;
            let b = rand_alpha_bound(n, &delta)?;
            json!({
                "op": "rand-alpha",
                "n": n,
                "delta": delta,
                "alpha": b.decimal,
                "alpha_lower": b.alpha.lower_decimal(REPORT_DIGITS),
                "alpha_upper": b.alpha.upper_decimal(REPORT_DIGITS),
                "ln_ratio_lower": b.ln_ratio.lower_decimal(REPORT_DIGITS),
                "ln_ratio_upper": b.ln_ratio.upper_decimal(REPORT_DIGITS),
                "within_proof_domain": b.within_proof_domain,
            })
        }
        OracleOp::Bernstein => {
            let n = require(n, "n", "bernstein")?;
            let delta = require(delta, "delta", "bernstein")?;
            let c = bernstein_chain(n, &delta)?;
            json!({
                "op": "bernstein",
                "n": n,
                "delta": delta,
                "alpha_upper": c.alpha.to_decimal_string(REPORT_DIGITS, true),
                "tail_upper": c.tail.upper_decimal(REPORT_DIGITS),
                "target": c.target,
                "holds": c.holds,
            })
        }
        OracleOp::Moments => {
            let inst = load_instance(require(instance, "instance", "moments")?)?;
            let agents: Vec<usize> = match agent {
                Some(0) => return Err(Error::IndexOutOfRange("agents are numbered from 1".into())),
                Some(a) if a > inst.n() => {
                    return Err(Error::IndexOutOfRange(format!("agent {a} outside 1..={}", inst.n())))
                }
                Some(a) => vec![a - 1],
                None => (0..inst.n()).collect(),
            };
            let rows = agents
                .into_iter()
                .map(|i| {
                    let m = analytic_moments(&inst, i)?;
                    Ok(json!({ "agent": i + 1, "mean": m.mean, "variance": m.variance }))
                })
                .collect::<Result<Vec<_>>>()?;
            json!({ "op": "moments", "moments": rows })
        }
        OracleOp::BestAlloc => {
            let inst = load_instance(require(instance, "instance", "best-alloc")?)?;
            let (alloc, ratio) = best_allocation_search(&inst, exec)?;
            json!({
                "op": "best-alloc",
                "owners": alloc.owners().iter().map(|o| o + 1).collect::<Vec<_>>(),
                "prop1_ratio": ratio,
            })
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_montecarlo(
    n: usize,
    delta: &Rat,
    instance: Option<&Path>,
    m: usize,
    trials: u64,
    seed: u64,
    out: &Path,
    exec: Execution,
) -> Result<()> {
    let inst = match instance {
        Some(p) => load_instance(p)?,
        None => equal_goods_instance(n, m)?,
    };
    if inst.n() != n {
        return Err(Error::InvalidInput(format!("--n {n} but the instance has {} agents", inst.n())));
    }
    let report = montecarlo_rand(delta, &inst, trials, seed, exec)?;
    let mut value = serde_json::to_value(&report)?;
    value["within_delta"] = json!(report.within_delta());
    write_json(&value, Some(out))
}

fn dispatch(cli: Cli) -> Result<()> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match cli.command {
        Command::Run { algo, instance, predictions, epsilon, seed, out } => {
            cmd_run(algo, &instance, predictions.as_deref(), epsilon, seed, &out)
        }
        Command::Metrics { instance, allocation, check, alpha } => {
            cmd_metrics(&instance, &allocation, &check, &alpha, exec)
        }
        Command::Adversary { target, n, alpha, notion, max_steps, allocator, seed, out } => {
            let spec = AdversarySpec { target, n, alpha, notion, max_steps };
            cmd_adversary(spec, allocator, seed, out.as_deref(), exec)
        }
        Command::Oracle { op, n, delta, instance, agent, out } => {
            let value = cmd_oracle(op, n, delta, instance.as_deref(), agent, exec)?;
            write_json(&value, out.as_deref())
        }
        Command::Montecarlo { n, delta, instance, m, trials, seed, out } => {
            cmd_montecarlo(n, &delta, instance.as_deref(), m, trials, seed, &out, exec)
        }
        Command::Campaign { config, out } => {
            let cfg = CampaignConfig::from_json(&fs::read_to_string(config)?)?;
            let rows = campaign(&cfg, exec)?;
            write_csv(&rows, fs::File::create(out)?)
        }
        Command::PotentialGrid { n, a_min, a_max, ya_min, ya_max, resolution, out } => {
            let grid = potential_grid(n, (a_min, a_max), (ya_min, ya_max), resolution)?;
            grid.write_csv(fs::File::create(out)?)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_invariant_breach() {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
