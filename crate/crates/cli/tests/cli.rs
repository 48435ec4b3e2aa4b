//! End-to-end runs of the `bbcheck` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn bbcheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbcheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn refchild(extra: &str) -> String {
    format!("{} {extra}", env!("CARGO_BIN_EXE_bbcheck-refchild"))
}

/// The formula recorded in a planted fixture's header.
fn header_formula(name: &str) -> String {
    fs::read_to_string(fixture(name))
        .unwrap()
        .lines()
        .find_map(|l| l.strip_prefix("# formula: "))
        .expect("fixture names its formula")
        .to_string()
}

/// `key: value` lines of a report.
fn fields(text: &str) -> BTreeMap<String, String> {
    text.lines()
        .filter_map(|l| l.split_once(": "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn strengthen_prints_the_worked_example() {
    let o = bbcheck(&["strengthen", "(G[2,6) p) || F q", "--horizon", "30"]);
    assert!(o.status.success());
    let golden = fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../core/tests/fixtures/strengthen_example.golden"),
    )
    .unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn strengthen_edge_cases() {
    let o = bbcheck(&["strengthen", "p"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");

    let o = bbcheck(&["strengthen", "G[0,40) p", "--horizon", "30"]);
    assert_eq!(o.status.code(), Some(1));

    let o = bbcheck(&["strengthen", "G (("]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot parse"));

    let o = bbcheck(&["strengthen", "F p", "--chosen"]);
    assert!(stdout(&o).lines().any(|l| l == "chosen: G p"));
}

#[test]
fn planted_campaign_writes_consistent_reports() {
    let dir = tempfile::tempdir().unwrap();
    let machine = fixture("bug00.mealy");
    let formula = header_formula("bug00.mealy");
    let o = bbcheck(&[
        "check",
        "--machine",
        machine.to_str().unwrap(),
        "--formula",
        &formula,
        "--repetitions",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut execs = Vec::new();
    let mut rounds = Vec::new();
    for seed in 0..5 {
        let text = fs::read_to_string(dir.path().join(format!("run-{seed}.txt"))).unwrap();
        let f = fields(&text);
        assert_eq!(f["verdict"], "FALSIFIED");
        assert_eq!(f["seed"], seed.to_string());
        assert_eq!(f["formula"], formula);
        execs.push(f["sut_executions"].parse::<f64>().unwrap());
        rounds.push(f["eq_rounds"].parse::<f64>().unwrap());
    }
    let agg = fs::read_to_string(dir.path().join("aggregate.txt")).unwrap();
    assert_eq!(stdout(&o), agg);
    let a = fields(&agg);
    assert_eq!(a["runs"], "5");
    assert_eq!(a["falsified"], "5");
    let check = |key: &str, xs: &[f64]| {
        let mean = xs.iter().sum::<f64>() / 5.0;
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        let std = (ss / 4.0).sqrt();
        assert_eq!(a[&format!("{key}_mean")], format!("{mean:.3}"));
        assert_eq!(a[&format!("{key}_std")], format!("{std:.3}"));
    };
    check("executions", &execs);
    check("eq_rounds", &rounds);
    assert_eq!(agg.lines().filter(|l| l.starts_with("run: ")).count(), 5);
}

#[test]
fn mode_appears_in_the_report() {
    let machine = fixture("bug02.mealy");
    let formula = header_formula("bug02.mealy");
    for mode in ["baseline", "enhanced"] {
        let o = bbcheck(&[
            "check",
            "--machine",
            machine.to_str().unwrap(),
            "--formula",
            &formula,
            "--mode",
            mode,
        ]);
        assert!(o.status.success());
        let out = stdout(&o);
        assert!(out.starts_with(&format!("FALSIFIED ({mode} mode")), "{out}");
        assert_eq!(fields(&out)["mode"], mode);
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    let machine = fixture("bug04.mealy");
    fs::write(
        &conf,
        format!(
            "# campaign settings\nmachine = {}\nformula = {}\nmode = baseline\nseed = 7\n",
            machine.display(),
            header_formula("bug04.mealy")
        ),
    )
    .unwrap();
    let o = bbcheck(&["check", "--config", conf.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let f = fields(&stdout(&o));
    assert_eq!((f["mode"].as_str(), f["seed"].as_str()), ("baseline", "7"));

    let o = bbcheck(&[
        "check",
        "--config",
        conf.to_str().unwrap(),
        "--mode",
        "enhanced",
        "--seed",
        "2",
    ]);
    let f = fields(&stdout(&o));
    assert_eq!((f["mode"].as_str(), f["seed"].as_str()), ("enhanced", "2"));

    fs::write(&conf, "mode baseline\n").unwrap();
    assert_eq!(
        bbcheck(&["check", "--config", conf.to_str().unwrap()])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn configuration_errors_exit_with_one() {
    let m = fixture("three.mealy");
    let m = m.to_str().unwrap();
    for args in [
        vec![
            "check",
            "--machine",
            m,
            "--formula",
            "G !q",
            "--mode",
            "bogus",
        ],
        vec!["check", "--machine", m, "--formula", "G !q", "--bogus"],
        vec!["check", "--machine", m],
        vec!["check", "--formula", "G !q"],
        vec![
            "check",
            "--machine",
            "/nonexistent.mealy",
            "--formula",
            "G !q",
        ],
        vec!["model-check", "--machine", m, "--formula", "G (("],
    ] {
        assert_eq!(bbcheck(&args).status.code(), Some(1), "{args:?}");
    }
    assert_eq!(bbcheck(&["--help"]).status.code(), Some(0));
}

#[test]
fn process_backend_speaks_the_line_protocol() {
    let o = bbcheck(&[
        "simulate",
        "--process",
        &refchild("--echo"),
        "--inputs",
        "a,b",
        "--propositions",
        "a,b",
        "--word",
        "a b a",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "0 a {a}\n1 b {b}\n2 a {a}\n");

    let o = bbcheck(&[
        "simulate",
        "--process",
        &refchild("--garbage"),
        "--inputs",
        "a",
        "--word",
        "a",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let three = fixture("three.mealy");
    let dying = refchild(&format!("--machine {} --die-after 3", three.display()));
    let o = bbcheck(&[
        "check",
        "--process",
        &dying,
        "--inputs",
        "a,b",
        "--propositions",
        "p,q",
        "--formula",
        "G !q",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn process_and_in_memory_machines_agree() {
    let three = fixture("three.mealy");
    let child = refchild(&format!("--machine {}", three.display()));
    let common = ["--formula", "G (p || q || X p)", "--seed", "3"];
    let via_process = bbcheck(
        &[
            &[
                "check",
                "--process",
                &child,
                "--inputs",
                "a,b",
                "--propositions",
                "p,q",
            ][..],
            &common[..],
        ]
        .concat(),
    );
    let direct = bbcheck(
        &[
            &["check", "--machine", three.to_str().unwrap()][..],
            &common[..],
        ]
        .concat(),
    );
    assert!(via_process.status.success() && direct.status.success());
    assert_eq!(stdout(&via_process), stdout(&direct));
}

#[test]
fn model_check_reports_the_shortest_witness() {
    let m = fixture("three.mealy");
    let o = bbcheck(&[
        "model-check",
        "--machine",
        m.to_str().unwrap(),
        "--formula",
        "G !q",
    ]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o),
        "verdict: VIOLATED\nwitness: a a\noutputs: {p} {p q}\n"
    );

    let o = bbcheck(&[
        "model-check",
        "--machine",
        m.to_str().unwrap(),
        "--formula",
        "G !(p && q && X q)",
    ]);
    assert_eq!(stdout(&o), "verdict: HOLDS\n");
}

#[test]
fn learned_machine_matches_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("learned.mealy");
    let m = fixture("three.mealy");
    let o = bbcheck(&[
        "learn",
        "--machine",
        m.to_str().unwrap(),
        "--eq-strategy",
        "wmethod",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let learned = bbcheck::machine::load_machine(&fs::read_to_string(&out).unwrap()).unwrap();
    let target = bbcheck::machine::load_machine(&fs::read_to_string(&m).unwrap()).unwrap();
    assert!(learned.is_isomorphic(&target));
}

#[test]
fn simulate_reports_the_verdict() {
    let m = fixture("three.mealy");
    let o = bbcheck(&[
        "simulate",
        "--machine",
        m.to_str().unwrap(),
        "--word",
        "a,a,b",
        "--formula",
        "G p",
    ]);
    assert_eq!(
        stdout(&o),
        "0 a {p}\n1 a {p q}\n2 b {p}\nverdict: satisfied\n"
    );

    let o = bbcheck(&[
        "simulate",
        "--simulator",
        "--word",
        "accel accel",
        "--formula",
        "G (v < 100)",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(
        out.contains("verdict: satisfied") && out.contains("robustness: "),
        "{out}"
    );

    let o = bbcheck(&["simulate", "--machine", m.to_str().unwrap(), "--word", "z"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reruns_write_identical_reports() {
    let machine = fixture("bug02.mealy");
    let formula = header_formula("bug02.mealy");
    let run = |dir: &Path, strategy: &str| {
        let o = bbcheck(&[
            "check",
            "--machine",
            machine.to_str().unwrap(),
            "--formula",
            &formula,
            "--eq-strategy",
            strategy,
            "--repetitions",
            "3",
            "--parallel",
            "2",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    };
    for strategy in ["random", "ga", "wmethod"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        run(a.path(), strategy);
        run(b.path(), strategy);
        for name in ["run-0.txt", "run-1.txt", "run-2.txt", "aggregate.txt"] {
            assert_eq!(
                fs::read(a.path().join(name)).unwrap(),
                fs::read(b.path().join(name)).unwrap(),
                "{strategy} {name}"
            );
        }
    }
}
