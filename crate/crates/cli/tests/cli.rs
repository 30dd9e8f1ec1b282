use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TINY: &str = r#"{"n":2,"m":3,"values":[["1","1/2","1"],["1/3","1","0"]]}"#;

struct Sandbox {
    dir: TempDir,
}

impl Sandbox {
    fn new() -> Self {
        let sb = Sandbox { dir: tempfile::tempdir().unwrap() };
        sb.write("tiny.json", TINY);
        sb
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.path(name)).unwrap()
    }

    fn json(&self, name: &str) -> Value {
        serde_json::from_str(&self.read(name)).unwrap()
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_fairdiv")).current_dir(self.dir.path()).args(args).output().unwrap()
    }

    fn ok(&self, args: &[&str]) -> String {
        let out = self.run(args);
        assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    }

    fn code(&self, args: &[&str]) -> i32 {
        self.run(args).status.code().unwrap()
    }
}

fn owners(v: &Value) -> Vec<u64> {
    v["owners"].as_array().unwrap().iter().map(|o| o.as_u64().unwrap()).collect()
}

#[test]
fn run_miv_writes_trace() {
    let sb = Sandbox::new();
    sb.ok(&["run", "--algo", "miv", "--instance", "tiny.json", "--out", "t.json"]);
    let t = sb.json("t.json");
    assert_eq!(owners(&t), vec![2, 1, 1]);
    assert_eq!(t["potential"][0], "1/3");
    assert_eq!(t["alpha"].as_array().unwrap().len(), 3);
}

#[test]
fn run_every_rule() {
    let sb = Sandbox::new();
    for algo in ["greedy1", "greedy2", "greedy3", "rand"] {
        sb.ok(&["run", "--algo", algo, "--instance", "tiny.json", "--seed", "5", "--out", "t.json"]);
        let t = sb.json("t.json");
        assert_eq!(t["algo"], algo);
        assert_eq!(owners(&t).len(), 3);
        assert!(t.get("potential").is_none());
    }
}

#[test]
fn run_with_predictions() {
    let sb = Sandbox::new();
    sb.write("p.json", r#"{"p":["1","1"],"epsilon":"1/4"}"#);
    sb.ok(&["run", "--algo", "miv", "--instance", "tiny.json", "--predictions", "p.json", "--out", "t.json"]);
    sb.ok(&[
        "run",
        "--algo",
        "miv",
        "--instance",
        "tiny.json",
        "--predictions",
        "p.json",
        "--epsilon",
        "0",
        "--out",
        "u.json",
    ]);
    assert_eq!(owners(&sb.json("u.json")), vec![2, 1, 1]);
    // A value above its prediction is a domain error.
    sb.write("low.json", r#"{"p":["1/2","1"],"epsilon":"0"}"#);
    assert_eq!(
        sb.code(&["run", "--algo", "miv", "--instance", "tiny.json", "--predictions", "low.json", "--out", "t.json"]),
        1
    );
}

#[test]
fn rand_needs_a_seed() {
    let sb = Sandbox::new();
    assert_eq!(sb.code(&["run", "--algo", "rand", "--instance", "tiny.json", "--out", "t.json"]), 1);
    assert!(!sb.path("t.json").exists());
}

#[test]
fn rand_is_reproducible() {
    let sb = Sandbox::new();
    let args = |out: &'static str| ["run", "--algo", "rand", "--instance", "tiny.json", "--seed", "42", "--out", out];
    sb.ok(&args("a.json"));
    sb.ok(&args("b.json"));
    assert_eq!(sb.read("a.json"), sb.read("b.json"));
}

#[test]
fn usage_errors_exit_one() {
    let sb = Sandbox::new();
    assert_eq!(sb.code(&["frobnicate"]), 1);
    assert_eq!(sb.code(&["run", "--algo", "miv", "--instance", "tiny.json", "--out", "t.json", "--bogus"]), 1);
    assert_eq!(sb.code(&["run", "--algo", "best", "--instance", "tiny.json", "--out", "t.json"]), 1);
    assert_eq!(sb.code(&["metrics", "--instance", "tiny.json", "--allocation", "missing.json"]), 1);
    assert_eq!(sb.code(&["oracle", "--op", "rand-alpha", "--n", "2", "--delta", "1/0"]), 1);
    assert_eq!(sb.code(&["--help"]), 0);
}

#[test]
fn metrics_report() {
    let sb = Sandbox::new();
    sb.write("a.json", r#"{"owner":[2,1,1]}"#);
    let out = sb.ok(&[
        "metrics",
        "--instance",
        "tiny.json",
        "--allocation",
        "a.json",
        "--check",
        "prop1,ef1,mms,propx",
        "--alpha",
        "1/2",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["alpha"], "1/2");
    for key in ["prop1", "ef1", "mms", "propx"] {
        assert_eq!(v[key]["holds"], true, "{key}");
    }
    let only: Value = serde_json::from_str(&sb.ok(&[
        "metrics",
        "--instance",
        "tiny.json",
        "--allocation",
        "a.json",
        "--check",
        "ef1",
    ]))
    .unwrap();
    assert!(only["prop1"].is_null());
    sb.write("bad.json", r#"{"owner":[3,1,1]}"#);
    assert_eq!(sb.code(&["metrics", "--instance", "tiny.json", "--allocation", "bad.json"]), 1);
}

#[test]
fn adversary_targets() {
    let sb = Sandbox::new();
    for target in ["greedy1", "greedy2"] {
        let v: Value =
            serde_json::from_str(&sb.ok(&["adversary", "--target", target, "--n", "3", "--alpha", "1/4"])).unwrap();
        assert_eq!(v["ratio_below_alpha"], true, "{target}");
    }
    sb.ok(&["adversary", "--target", "greedy3", "--alpha", "3/5", "--out", "g3.json"]);
    let g3 = sb.json("g3.json");
    assert_eq!(g3["cycles"], 19);
    assert_eq!(g3["instance"]["m"], 90);
    assert_eq!(g3["ratio_below_alpha"], true);
    assert!(g3["predicted_cycles"].as_f64().unwrap() > 0.0);

    sb.ok(&[
        "adversary",
        "--target",
        "miv-impossibility",
        "--n",
        "2",
        "--alpha",
        "1/2",
        "--notion",
        "mms",
        "--out",
        "imp.json",
    ]);
    let imp = sb.json("imp.json");
    assert_eq!(imp["verdicts"]["prop1_one_over_n"], true);
    assert_eq!(imp["verdicts"]["ef1_alpha"], false);
    assert_eq!(imp["verdicts"]["mms_alpha"], false);
    assert_eq!(imp["verdicts"]["propx_alpha"], false);
    assert_eq!(imp["notion"], "mms");
}

#[test]
fn greedy3_rejects_infeasible_target() {
    let sb = Sandbox::new();
    assert_eq!(sb.code(&["adversary", "--target", "greedy3", "--alpha", "9/10"]), 1);
    assert_eq!(sb.code(&["adversary", "--target", "greedy3", "--alpha", "1/2", "--max-steps", "20"]), 1);
    assert_eq!(sb.code(&["adversary", "--target", "miv-impossibility", "--alpha", "1/2", "--notion", "prop1"]), 1);
}

#[test]
fn oracle_ops() {
    let sb = Sandbox::new();
    let v: Value =
        serde_json::from_str(&sb.ok(&["oracle", "--op", "rand-alpha", "--n", "2", "--delta", "1/20"])).unwrap();
    assert_eq!(v["alpha"], "0.057181998659445729473552126449");
    let v: Value =
        serde_json::from_str(&sb.ok(&["oracle", "--op", "bernstein", "--n", "10", "--delta", "1/100"])).unwrap();
    assert_eq!(v["holds"], true);
    let v: Value =
        serde_json::from_str(&sb.ok(&["oracle", "--op", "moments", "--instance", "tiny.json", "--agent", "1"]))
            .unwrap();
    // Mean of the unreceived value is (n - 1)/n of the total.
    assert_eq!(v["moments"][0]["mean"], "5/4");
    sb.ok(&["oracle", "--op", "best-alloc", "--instance", "tiny.json", "--out", "best.json"]);
    assert_eq!(sb.json("best.json")["prop1_ratio"], "1");
    assert_eq!(sb.code(&["oracle", "--op", "moments"]), 1);
    assert_eq!(sb.code(&["oracle", "--op", "moments", "--instance", "tiny.json", "--agent", "3"]), 1);
}

#[test]
fn montecarlo_report() {
    let sb = Sandbox::new();
    let args = |out: &'static str| {
        ["montecarlo", "--n", "2", "--delta", "1/20", "--m", "200", "--trials", "200", "--seed", "9", "--out", out]
    };
    sb.ok(&args("mc1.json"));
    sb.ok(&args("mc2.json"));
    assert_eq!(sb.read("mc1.json"), sb.read("mc2.json"));
    let v = sb.json("mc1.json");
    assert_eq!(v["trials"], 200);
    assert_eq!(v["within_delta"], true);
    let mut seq = args("mc3.json").to_vec();
    seq.push("--sequential");
    sb.ok(&seq);
    assert_eq!(sb.read("mc1.json"), sb.read("mc3.json"));
    assert_eq!(
        sb.code(&[
            "montecarlo",
            "--n",
            "3",
            "--delta",
            "1/20",
            "--instance",
            "tiny.json",
            "--trials",
            "5",
            "--seed",
            "1",
            "--out",
            "x.json"
        ]),
        1
    );
    assert_eq!(sb.code(&["montecarlo", "--n", "2", "--delta", "1/20", "--trials", "5", "--out", "x.json"]), 1);
}

#[test]
fn campaign_csv() {
    let sb = Sandbox::new();
    sb.write(
        "c.json",
        r#"{"entries":[
            {"adversary":"greedy1","n":[2,3],"alpha":["1/2"]},
            {"adversary":"miv-impossibility","n":[2],"alpha":["1/2","1/3"],"notion":"propx"}
        ]}"#,
    );
    sb.ok(&["campaign", "--config", "c.json", "--out", "r.csv"]);
    let text = sb.read("r.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("adversary,allocator,n,alpha"));
    assert!(lines[3].starts_with("miv-impossibility,miv,2,1/2"));
    sb.ok(&["campaign", "--config", "c.json", "--out", "r2.csv"]);
    assert_eq!(text, sb.read("r2.csv"));
    sb.write("bad.json", r#"{"entries":[{"adversary":"greedy1","n":[2],"alpha":["1/2"],"colour":1}]}"#);
    assert_eq!(sb.code(&["campaign", "--config", "bad.json", "--out", "r.csv"]), 1);
}

#[test]
fn potential_grid_csv() {
    let sb = Sandbox::new();
    sb.ok(&["potential-grid", "--n", "2", "--resolution", "5", "--out", "g.csv"]);
    let text = sb.read("g.csv");
    assert_eq!(text.lines().count(), 26);
    assert!(text.starts_with("a,ya,phi,phi_f64,flagged"));
    assert_eq!(sb.code(&["potential-grid", "--n", "1", "--out", "g.csv"]), 1);
}

#[test]
fn outputs_are_byte_identical() {
    let sb = Sandbox::new();
    let a = sb.ok(&["adversary", "--target", "miv-impossibility", "--n", "3", "--alpha", "1/2"]);
    let b = sb.ok(&["adversary", "--target", "miv-impossibility", "--n", "3", "--alpha", "1/2"]);
    assert_eq!(a, b);
    // Keys come out sorted.
    let keys: Vec<&str> =
        a.lines().filter(|l| l.starts_with("  \"")).map(|l| l.trim().split('"').nth(1).unwrap()).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}
