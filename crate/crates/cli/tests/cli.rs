use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn gpmetric(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gpmetric"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixture(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let out = dir.path().join(name);
    let mut full = vec!["fixture"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&out)]);
    let o = gpmetric(&full);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

const BAIRE_FREE: &str = r#"{
  "coloring": { "table": {}, "default": "inf" },
  "oracle": { "kind": "clopen_boxes", "boxes": [] }
}"#;

#[test]
fn reduce_cancels_in_the_free_group() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "free.json", &["--kind", "free", "--size", "2"]);
    let w = write(&dir, "w.json", r#"[["a", 1], ["b", 1], ["b", -1]]"#);
    let o = gpmetric(&["reduce", "--graph", s(&g), "--word", s(&w)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a^1");
}

#[test]
fn reduce_sorts_commuting_generators() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "complete.json", &["--kind", "complete", "--orders", "inf,inf"]);
    let w = write(&dir, "w.json", r#"[["b", 1], ["a", 1]]"#);
    let o = gpmetric(&["reduce", "--graph", s(&g), "--word", s(&w)]);
    assert_eq!(stdout(&o).trim(), "a^1 b^1");
    let o = gpmetric(&["--format", "structured", "reduce", "--graph", s(&g), "--word", s(&w)]);
    let line = stdout(&o);
    assert!(line.starts_with(r#"{"command":"reduce","word":"#), "{line}");
    assert!(line.trim_end().ends_with(r#""rendered":"a^1 b^1"}"#), "{line}");
}

#[test]
fn malformed_input_exits_with_2() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "free.json", &["--kind", "free", "--size", "2"]);
    for bad in [r#"[["a", 1"#, r#"[["a", 0]]"#, r#"[["zz", 1]]"#] {
        let w = write(&dir, "bad.json", bad);
        let o = gpmetric(&["reduce", "--graph", s(&g), "--word", s(&w)]);
        assert_eq!(o.status.code(), Some(2), "{bad}");
        assert!(!o.stderr.is_empty());
    }
    let missing = dir.path().join("missing.json");
    let o = gpmetric(&["reduce", "--graph", s(&missing), "--word", s(&g)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unresolvable_vertex_exits_with_3() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "free.json", &["--kind", "free", "--size", "2"]);
    let w = write(&dir, "w.json", r#"[[{"prefix": [9, 9], "tail": 9}, 1]]"#);
    let o = gpmetric(&["reduce", "--graph", s(&g), "--word", s(&w)]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn distances() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", BAIRE_FREE);
    let eta = write(&dir, "eta.json", r#"[[{"prefix": [0, 0], "tail": 0}, 1]]"#);
    let nu = write(&dir, "nu.json", r#"[[{"prefix": [0, 1], "tail": 0}, 1]]"#);
    let far = write(&dir, "far.json", r#"[[{"prefix": [1], "tail": 0}, 1]]"#);
    let dist = |a: &Path, b: &Path| {
        let o = gpmetric(&["--format", "structured", "dist", "--graph", s(&g), "--word", s(a), "--word", s(b)]);
        assert_eq!(o.status.code(), Some(0));
        stdout(&o).trim().to_string()
    };
    assert_eq!(dist(&eta, &eta), r#"{"command":"dist","value":{"kind":"zero"},"decimal":"0"}"#);
    assert_eq!(dist(&eta, &nu), r#"{"command":"dist","value":{"kind":"exp","n":2},"decimal":"0.25"}"#);
    assert_eq!(dist(&eta, &far), r#"{"command":"dist","value":{"kind":"exp","n":1},"decimal":"0.5"}"#);

    let o = gpmetric(&["dist", "--graph", s(&g), "--word", s(&eta)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn norm_reports_depth() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.json", BAIRE_FREE);
    let w = write(
        &dir,
        "w.json",
        r#"[[{"prefix": [0, 0], "tail": 0}, -1], [{"prefix": [0, 1], "tail": 0}, 1]]"#,
    );
    let o = gpmetric(&["--format", "structured", "norm", "--graph", s(&g), "--word", s(&w)]);
    let line = stdout(&o);
    assert!(line.starts_with(r#"{"command":"norm","depth":2,"value":{"kind":"exp","n":2},"decimal":"0.25""#), "{line}");
}

#[test]
fn embed_writes_the_image_graph() {
    let dir = TempDir::new().unwrap();
    let metric = write(
        &dir,
        "two.json",
        r#"{"points": ["a0", "a1"], "metric": [["0", "1/10"], ["1/10", "0"]], "colors": ["2", "2"], "edges": []}"#,
    );
    let out = dir.path().join("out.json");
    let o = gpmetric(&["embed", "--metric", s(&metric), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report = stdout(&o);
    assert_eq!(report.lines().filter(|l| l.starts_with("PASS")).count(), 7, "{report}");
    let g = gpmetric::GraphInstance::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.named_vertices().len(), 2);
}

#[test]
fn embed_half_graph() {
    let dir = TempDir::new().unwrap();
    let metric = write(&dir, "half.json", &gpmetric::embed::half_graph_metric(4).to_json());
    let out = dir.path().join("out.json");
    let o = gpmetric(&["embed", "--metric", s(&metric), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let g = gpmetric::GraphInstance::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(g.named_vertices().len(), 8);
    let a = |i: usize| g.vertex_named(&format!("a{i}")).unwrap().clone();
    let b = |j: usize| g.vertex_named(&format!("b{j}")).unwrap().clone();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(g.adjacent(&a(i), &b(j)).unwrap(), i < j);
        }
    }
}

#[test]
fn embed_rejects_a_non_metric() {
    let dir = TempDir::new().unwrap();
    let metric = write(
        &dir,
        "bad.json",
        r#"{"points": ["x", "y", "z"], "metric": [["0", "1", "3"], ["1", "0", "1"], ["3", "1", "0"]], "colors": ["inf", "inf", "inf"]}"#,
    );
    let o = gpmetric(&["embed", "--metric", s(&metric), "--out", s(&dir.path().join("o.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_is_reproducible() {
    let args = ["--format", "structured", "check", "--suite", "ultranorm", "--samples", "50", "--seed", "9"];
    let a = gpmetric(&args);
    let b = gpmetric(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    assert_eq!(gpmetric(&seq).stdout, a.stdout);
    for line in stdout(&a).lines() {
        assert!(line.starts_with(r#"{"command":"check","suite":"ultranorm","id":"#), "{line}");
    }
}

#[test]
fn unknown_suite_exits_with_2() {
    let o = gpmetric(&["check", "--suite", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_compare_on_two_words() {
    let dir = TempDir::new().unwrap();
    let g = fixture(&dir, "c.json", &["--kind", "complete", "--orders", "2,inf"]);
    let w1 = write(&dir, "w1.json", r#"[["a", 1], ["b", 1], ["a", 1]]"#);
    let w2 = write(&dir, "w2.json", r#"[["b", 1]]"#);
    let o = gpmetric(&["oracle-compare", "--graph", s(&g), "--word", s(&w1), "--word", s(&w2)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "AGREE equal = true, oracle = true");
}

#[test]
fn fixtures_validate() {
    let o = gpmetric(&["fixture", "--kind", "half-graph", "--size", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let g = gpmetric::GraphInstance::from_json(&stdout(&o)).unwrap();
    assert_eq!(g.named_vertices().len(), 8);
    let o = gpmetric(&["fixture", "--kind", "free", "--orders", "6"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gpmetric(&["fixture", "--kind", "nope", "--size", "2"]);
    assert_eq!(o.status.code(), Some(2));
}
