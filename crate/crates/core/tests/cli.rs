use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bullwhip(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bullwhip"))
        .args(args)
        .current_dir(dir)
        .env_remove("BULLWHIP_SEED")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

#[test]
fn run_writes_trace_kpi_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let o = bullwhip(
        &[
            "run",
            "--policy",
            "selfish-rag",
            "--scenario",
            "quality_failure",
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(dir.path().join("r/trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 1 + 150 * 3);
    assert_eq!(
        fs::read_to_string(dir.path().join("r/kpi.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );
    let svg = fs::read_to_string(dir.path().join("r/inventory.svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
}

#[test]
fn seed_precedence() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.json"), r#"{"seed": 5}"#).unwrap();
    let read = |out: &str| fs::read_to_string(dir.path().join(out).join("trace.csv")).unwrap();
    let run = |args: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bullwhip"));
        cmd.args(args)
            .current_dir(dir.path())
            .env_remove("BULLWHIP_SEED");
        if let Some(v) = env {
            cmd.env("BULLWHIP_SEED", v);
        }
        assert!(cmd.output().unwrap().status.success());
    };
    run(&["run", "--config", "c.json", "--out", "a"], None);
    run(&["run", "--seed", "5", "--out", "b"], None);
    run(&["run", "--config", "c.json", "--out", "c"], Some("6"));
    run(&["run", "--seed", "6", "--out", "d"], None);
    run(
        &["run", "--config", "c.json", "--seed", "5", "--out", "e"],
        Some("6"),
    );
    assert_eq!(read("a"), read("b"));
    assert_eq!(read("c"), read("d"));
    assert_ne!(read("a"), read("c"));
    assert_eq!(read("e"), read("a"));
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bullwhip(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&bullwhip(&["run", "--bogus"], dir.path())), 2);

    fs::write(dir.path().join("zero.json"), r#"{"horizon": 0}"#).unwrap();
    assert_eq!(
        code(&bullwhip(&["run", "--config", "zero.json"], dir.path())),
        3
    );
    assert_eq!(
        code(&bullwhip(&["run", "--config", "missing.json"], dir.path())),
        3
    );
    assert_eq!(
        code(&bullwhip(&["run", "--policy", "greedy"], dir.path())),
        3
    );

    fs::write(dir.path().join("blocker"), "not a directory").unwrap();
    let o = bullwhip(&["hoarding-demo", "--out", "blocker/sub"], dir.path());
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("blocker"));

    fs::write(
        dir.path().join("nokb.json"),
        r#"{"kb": {"strategies": "absent.kb"}}"#,
    )
    .unwrap();
    let o = bullwhip(
        &["strategic-choice", "--config", "nokb.json", "--out", "s"],
        dir.path(),
    );
    assert_ne!(code(&o), 0);
}

#[test]
fn suite_and_hoarding_demo() {
    let dir = tempfile::tempdir().unwrap();
    let o = bullwhip(&["suite", "--reps", "2", "--out", "s"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let suite = fs::read_to_string(dir.path().join("s/suite.csv")).unwrap();
    assert_eq!(
        suite.lines().next().unwrap(),
        "scenario,policy,mean_cost,std_cost,mean_service,std_service,n"
    );
    assert_eq!(suite.lines().count(), 9);

    let o = bullwhip(&["hoarding-demo", "--out", "h"], dir.path());
    assert_eq!(code(&o), 0);
    let svg = fs::read_to_string(dir.path().join("h/inventory.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(
        doc.descendants()
            .filter(|n| n.has_tag_name("polyline"))
            .count(),
        3
    );
}
