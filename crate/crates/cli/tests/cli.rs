use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bbdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bbdep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: Output) -> Output {
    assert!(o.status.success(), "exit {:?}\nstderr: {}", o.status.code(), stderr(&o));
    o
}

/// Samples a training and a test corpus and trains model C on the first.
struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new(train_sentences: usize) -> Workspace {
        let dir = TempDir::new().unwrap();
        let w = Workspace { dir };
        let g = fixture("grammar.toml");
        let n = train_sentences.to_string();
        ok(bbdep(&[
            "synth",
            "--grammar",
            s(&g),
            "--sentences",
            &n,
            "--seed",
            "1",
            "--out",
            s(&w.path("train.dep")),
        ]));
        ok(bbdep(&[
            "synth",
            "--grammar",
            s(&g),
            "--sentences",
            "60",
            "--seed",
            "2",
            "--out",
            s(&w.path("test.dep")),
        ]));
        ok(bbdep(&[
            "train",
            "--model",
            "C",
            "--in",
            s(&w.path("train.dep")),
            "--out",
            s(&w.path("c.model")),
        ]));
        w
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        s(&self.path(name)).to_string()
    }
}

#[test]
fn train_parse_eval_compare_round_trip() {
    let w = Workspace::new(300);
    let out = ok(bbdep(&[
        "parse",
        "--model-file",
        &w.p("c.model"),
        "--in",
        &w.p("test.dep"),
        "--out",
        &w.p("c.out"),
        "--exact",
        "--oracle-check",
        "6",
    ]));
    let err = stderr(&out);
    assert!(err.contains("oracle check:") && err.contains(" 0 mismatched"), "{err}");

    let report = stdout(&ok(bbdep(&[
        "eval",
        "--gold",
        &w.p("test.dep"),
        "--system",
        &w.p("c.out"),
        "--model-file",
        &w.p("c.model"),
    ])));
    assert!(report.contains("search_error=0.0"), "{report}");
    assert!(report.contains("<=4"));

    let same = stdout(&ok(bbdep(&[
        "compare",
        "--gold",
        &w.p("test.dep"),
        "--a",
        &w.p("c.out"),
        "--b",
        &w.p("c.out"),
    ])));
    assert!(
        same.contains("p=1.000000") && same.contains("iterations=10000"),
        "{same}"
    );
}

#[test]
fn training_data_gets_search_error_zero_and_perfect_eval_of_gold() {
    let w = Workspace::new(80);
    ok(bbdep(&[
        "parse",
        "--model-file",
        &w.p("c.model"),
        "--in",
        &w.p("train.dep"),
        "--out",
        &w.p("t.out"),
    ]));
    let r = stdout(&ok(bbdep(&[
        "eval",
        "--gold",
        &w.p("train.dep"),
        "--system",
        &w.p("t.out"),
        "--model-file",
        &w.p("c.model"),
    ])));
    assert!(r.contains("search_error=0.0"), "{r}");

    let perfect = stdout(&ok(bbdep(&[
        "eval",
        "--gold",
        &w.p("test.dep"),
        "--system",
        &w.p("test.dep"),
        "--model-file",
        &w.p("c.model"),
    ])));
    for key in [
        "attachment=100.0",
        "tagging=100.0",
        "search_error=0.0",
        "errors.0=100.0",
    ] {
        assert!(perfect.contains(key), "{key} missing from\n{perfect}");
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let w = Workspace::new(150);
    for (workers, name) in [("1", "one.out"), ("4", "four.out")] {
        ok(bbdep(&[
            "parse",
            "--model-file",
            &w.p("c.model"),
            "--in",
            &w.p("test.dep"),
            "--out",
            &w.p(name),
            "--workers",
            workers,
        ]));
    }
    let one = std::fs::read(w.path("one.out")).unwrap();
    assert_eq!(one, std::fs::read(w.path("four.out")).unwrap());
}

#[test]
fn baseline_is_deterministic_and_beam_reports_pruning() {
    let w = Workspace::new(150);
    let base = |name: &str| {
        ok(bbdep(&[
            "parse",
            "--model",
            "BASELINE",
            "--model-file",
            &w.p("c.model"),
            "--in",
            &w.p("test.dep"),
            "--out",
            &w.p(name),
        ]));
        std::fs::read(w.path(name)).unwrap()
    };
    assert_eq!(base("b1.out"), base("b2.out"));
    let out = ok(bbdep(&[
        "parse",
        "--model-file",
        &w.p("c.model"),
        "--in",
        &w.p("test.dep"),
        "--out",
        &w.p("beam.out"),
        "--beam",
        "1",
    ]));
    assert!(stderr(&out).contains("pruning occurred in"), "{}", stderr(&out));
}

#[test]
fn compare_is_reproducible_under_a_seed() {
    let w = Workspace::new(150);
    ok(bbdep(&[
        "parse",
        "--model-file",
        &w.p("c.model"),
        "--in",
        &w.p("test.dep"),
        "--out",
        &w.p("c.out"),
    ]));
    ok(bbdep(&[
        "parse",
        "--model",
        "BASELINE",
        "--model-file",
        &w.p("c.model"),
        "--in",
        &w.p("test.dep"),
        "--out",
        &w.p("b.out"),
    ]));
    let run = || {
        stdout(&ok(bbdep(&[
            "compare",
            "--gold",
            &w.p("test.dep"),
            "--a",
            &w.p("b.out"),
            "--b",
            &w.p("c.out"),
            "--seed",
            "7",
            "--iterations",
            "2000",
        ])))
    };
    let first = run();
    assert!(first.contains("seed=7"));
    assert_eq!(first, run());
}

#[test]
fn missing_parents_exit_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("m.model");
    let out = bbdep(&[
        "train",
        "--model",
        "C",
        "--in",
        s(&fixture("missing_parents.dep")),
        "--out",
        s(&model),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("sentence 2: missing parents"), "{err}");
    assert!(err.contains("sentence 3: missing parents"), "{err}");
    assert!(!model.exists());

    let out = bbdep(&["train", "--in", s(&fixture("partial_parents.dep")), "--out", s(&model)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 9"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(bbdep(&["parse", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(bbdep(&[]).status.code(), Some(1));
    assert_eq!(
        bbdep(&["train", "--model", "Q", "--in", "x", "--out", "y"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bbdep(&["train", "--model", "C", "--distance", "--in", "x", "--out", "y"])
            .status
            .code(),
        Some(1)
    );

    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[parse]\nbeem = 2\n").unwrap();
    assert_eq!(bbdep(&["--config", s(&cfg), "parse"]).status.code(), Some(1));
}

#[test]
fn show_config_merges_file_and_flags() {
    let all = stdout(&ok(bbdep(&["--show-config"])));
    assert!(all.contains("iterations = 10000"), "{all}");

    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[compare]\niterations = 500\nseed = 3\n").unwrap();
    let shown = stdout(&ok(bbdep(&[
        "--config",
        s(&cfg),
        "--show-config",
        "compare",
        "--seed",
        "11",
    ])));
    assert!(
        shown.contains("iterations = 500") && shown.contains("seed = 11"),
        "{shown}"
    );
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = TempDir::new().unwrap();
    let out = bbdep(&[
        "train",
        "--in",
        s(&dir.path().join("nope.dep")),
        "--out",
        s(&dir.path().join("m")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
