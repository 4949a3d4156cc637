use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use qsep::harness::{parse_chart_points, read_results_csv};
use qsep::detect::Status;

fn qsep(dir: &Path, args: &[&str]) -> Output {
    qsep_seeded(dir, "7", args)
}

fn qsep_seeded(dir: &Path, seed: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsep"))
        .arg("--out-dir")
        .arg(dir)
        .args(["--seed", seed])
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn field<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn gen(dir: &Path, args: &[&str]) {
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    let o = qsep(dir, &full);
    assert!(o.status.success(), "gen failed: {}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn gen_is_deterministic_and_reports_capacity() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["gen", "--construction", "collision-fn", "--n", "65536", "--scales", "3..7", "--c", "0.3"];
    let oa = qsep(a.path(), &args);
    let ob = qsep(b.path(), &args);
    assert_eq!(oa.status.code(), Some(0));
    assert_eq!(stdout(&oa), stdout(&ob));
    let out = stdout(&oa);
    assert!(out.lines().any(|l| l.starts_with("capacity ")));
    let t: u32 = field(&out, "good_index").unwrap().parse().unwrap();
    assert!((3..=7).contains(&t));
    for f in ["instance", "cert", "meta"] {
        let name = format!("collision-fn.{f}.json");
        assert_eq!(
            std::fs::read(a.path().join(&name)).unwrap(),
            std::fs::read(b.path().join(&name)).unwrap()
        );
    }
}

#[test]
fn different_seeds_give_different_instances() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gen", "--construction", "collision-fn", "--n", "4096", "--scales", "2..5", "--name"];
    let a = [&args[..], &["a"]].concat();
    let b = [&args[..], &["b"]].concat();
    assert!(qsep(dir.path(), &a).status.success());
    assert!(qsep_seeded(dir.path(), "8", &b).status.success());
    assert_ne!(
        std::fs::read(dir.path().join("a.instance.json")).unwrap(),
        std::fs::read(dir.path().join("b.instance.json")).unwrap()
    );
}

#[test]
fn prime_shortage_exits_2_with_a_hint() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsep(dir.path(), &["gen", "--construction", "fixedpoint", "--n", "65536"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--widen"));
    let o = qsep(dir.path(), &["gen", "--construction", "fixedpoint", "--n", "65536", "--widen"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn star_instance_verifies_with_distinct_degrees() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--construction", "star", "--n", "4096", "--H", "triangle"]);
    let o = qsep(dir.path(), &["verify", "--instance", "star.instance.json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("degree-uniqueness:") && l.ends_with("[pass]")));
    assert_eq!(field(&out, "verify"), Some("pass"));
}

#[test]
fn cert_collision_finds_a_valid_witness() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--construction", "collision-fn", "--n", "65536", "--scales", "3..7"]);
    let o = qsep(dir.path(), &["run", "--instance", "collision-fn.instance.json", "--detector", "cert-collision"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(field(&out, "status"), Some("found"));
    assert_eq!(field(&out, "valid"), Some("true"));
    let rec: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("collision-fn.cert-collision.run.json")).unwrap()).unwrap();
    assert_eq!(rec["status"], "found");
}

#[test]
fn corrupt_certificate_never_yields_an_invalid_witness() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--construction", "collision-fn", "--n", "16384", "--scales", "2..6"]);
    for seed in ["1", "2", "3", "4"] {
        let o = qsep_seeded(
            dir.path(),
            seed,
            &[
                "run", "--instance", "collision-fn.instance.json", "--detector", "cert-collision",
                "--corrupt-cert", "--budget", "200000",
            ],
        );
        assert_eq!(o.status.code(), Some(0));
        let out = stdout(&o);
        if field(&out, "status") == Some("found") {
            assert_eq!(field(&out, "valid"), Some("true"));
        }
    }
}

#[test]
fn path_search_on_identity_is_exhausted() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--construction", "identity", "--n", "1024"]);
    let o = qsep(dir.path(), &["run", "--instance", "identity.instance.json", "--detector", "path-k", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "status"), Some("exhausted"));
    assert_eq!(field(&out, "queries"), Some("1024"));
}

#[test]
fn function_detector_on_a_graph_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--construction", "star", "--n", "1024"]);
    let o = qsep(dir.path(), &["run", "--instance", "star.instance.json", "--detector", "cert-collision"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_file_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsep(dir.path(), &["verify", "--instance", "nothing.instance.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn corrupted_successor_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    gen(dir.path(), &["--construction", "collision-fn", "--n", "4096", "--scales", "2..5"]);
    let path = dir.path().join("collision-fn.instance.json");
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let succ = find_array(&mut v, "succ").expect("successor table");
    // Point every vertex at 0: the structure collapses.
    for x in succ.iter_mut() {
        *x = 0.into();
    }
    std::fs::write(&path, serde_json::to_vec(&v).unwrap()).unwrap();
    let o = qsep(dir.path(), &["verify", "--instance", "collision-fn.instance.json"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert_eq!(field(&out, "verify"), Some("fail"));
    assert!(out.lines().any(|l| l.starts_with("partition:") && l.ends_with("[FAIL]")));
}

fn find_array<'a>(v: &'a mut serde_json::Value, key: &str) -> Option<&'a mut Vec<serde_json::Value>> {
    match v {
        serde_json::Value::Object(m) => {
            if m.get(key).is_some_and(|x| x.is_array()) {
                return m.get_mut(key)?.as_array_mut();
            }
            m.values_mut().find_map(|x| find_array(x, key))
        }
        _ => None,
    }
}

/// Means of found trials per (detector, s), straight from the CSV.
fn csv_means(path: &Path) -> BTreeMap<(String, usize), f64> {
    let mut acc: BTreeMap<(String, usize), (f64, usize)> = BTreeMap::new();
    for r in read_results_csv(path).unwrap() {
        if r.status == Status::Found {
            let e = acc.entry((r.detector, r.s)).or_default();
            e.0 += r.queries as f64;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(k, (sum, c))| (k, sum / c as f64)).collect()
}

#[test]
fn separation_bench_chart_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sep.json"),
        r#"{"kind":"separation","n":16384,"params":{"i_min":2,"i_max":2},"scale_counts":[2,4,8],"trials":16,"seed":3}"#,
    )
    .unwrap();
    let o = qsep(dir.path(), &["bench", "--battery", "sep.json", "--plot"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("row ")).count(), 3);

    let means = csv_means(&dir.path().join("sep.results.csv"));
    let svg = std::fs::read_to_string(dir.path().join("sep.svg")).unwrap();
    let series = parse_chart_points(&svg);
    assert_eq!(series.len(), 1);
    assert_eq!(series[0].1.len(), 3);
    for &(s, ratio) in &series[0].1 {
        let s = s as usize;
        let recomputed = means[&("multiscale".to_string(), s)] / means[&("cert-collision".to_string(), s)];
        assert!((ratio - recomputed).abs() <= 1e-9 * recomputed, "s={s}: {ratio} vs {recomputed}");
    }

    let first = std::fs::read(dir.path().join("sep.results.csv")).unwrap();
    let o = qsep(dir.path(), &["bench", "--battery", "sep.json"]);
    assert!(o.status.success());
    assert_eq!(first, std::fs::read(dir.path().join("sep.results.csv")).unwrap());

    let o = qsep(dir.path(), &["report", "--results", "sep.results.csv"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ratio ")).count(), 3);
    assert!(dir.path().join("sep.summary.json").exists());
}

#[test]
fn malformed_battery_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), r#"{"kind":"nonsense"}"#).unwrap();
    let o = qsep(dir.path(), &["bench", "--battery", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn adversary_test_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = qsep(dir.path(), &["adversary-test", "--n", "1024", "--i-max", "5", "--sessions", "300", "--probes", "60"]);
    // Small samples can still reject by chance; only the files are checked here.
    assert!(matches!(o.status.code(), Some(0 | 1)));
    let trace = std::fs::read_to_string(dir.path().join("adversary.trace.jsonl")).unwrap();
    assert!(trace.lines().count() >= 60);
    for line in trace.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
    assert!(stdout(&o).lines().any(|l| l.starts_with("transcript chi2=")));
}
