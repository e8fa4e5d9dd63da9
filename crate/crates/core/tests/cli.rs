use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hyptrace(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyptrace"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("HYPTRACE_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn growth_free2_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let run = hyptrace(dir.path(), &["growth", "--preset", "free2", "--radius", "10"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let csv = fs::read_to_string(dir.path().join("growth.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "l,n_l");
    for (l, row) in rows[1..].iter().enumerate() {
        let expect = if l == 0 { 1 } else { 4 * 3u64.pow(l as u32 - 1) };
        assert_eq!(*row, format!("{l},{expect}"));
    }
    let doc = json(&dir.path().join("growth.json"));
    assert_eq!(doc["result"]["verdict"]["kind"], "at_least_exponential");
    assert_eq!(doc["result"]["partial"], false);
}

#[test]
fn growth_of_integers_is_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&hyptrace(dir.path(), &["growth", "--preset", "z", "--radius", "10"])), 0);
    let doc = json(&dir.path().join("growth.json"));
    assert_eq!(doc["result"]["verdict"]["kind"], "polynomial");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cases: &[(&[&str], i32)] = &[
        (&["growth", "--preset", "nope"], 3),
        (&["growth", "--radius", "minus-one"], 3),
        (&["growth", "--s", "-1"], 3),
        (&["conjgrowth", "--preset", "free2", "--element", "q"], 3),
        (&["conjgrowth", "--preset", "free2"], 3),
        (&["growth", "--radius", "12", "--budget-bytes", "100000"], 2),
        (&["certify", "--preset", "paper-example-3", "--element", "a"], 4),
        (&["certify", "--preset", "free2", "--element", "x", "--L", "3"], 5),
        (&["growth", "--radius", "2"], 5),
        (&["--help"], 0),
    ];
    for (args, expect) in cases {
        let run = hyptrace(d, args);
        assert_eq!(code(&run), *expect, "{args:?}: {}", String::from_utf8_lossy(&run.stderr));
        if *expect != 0 {
            assert!(!run.stderr.is_empty(), "{args:?} exits silently");
        }
    }
}

#[test]
fn budget_exhaustion_writes_flagged_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = hyptrace(dir.path(), &["growth", "--radius", "12", "--budget-bytes", "100000"]);
    assert_eq!(code(&run), 2);
    let doc = json(&dir.path().join("growth.json"));
    let result = &doc["result"];
    assert_eq!(result["partial"], true);
    assert_eq!(result["requested_radius"], 12);
    let reached = result["radius"].as_u64().unwrap() as usize;
    assert!(reached < 12);
    assert_eq!(result["counts"].as_array().unwrap().len(), reached + 1);
}

#[test]
fn conjugacy_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&hyptrace(d, &["conjgrowth", "--preset", "free2", "--element", "x", "--L", "21"])), 0);
    let doc = json(&d.join("conjgrowth.json"));
    assert_eq!(doc["result"]["verdict"]["kind"], "at_least_exponential");
    assert_eq!(doc["result"]["exactness"], "exact");

    assert_eq!(code(&hyptrace(d, &["conjgrowth", "--preset", "paper-example-3", "--element", "a"])), 0);
    let verdict = &json(&d.join("conjgrowth.json"))["result"]["verdict"];
    assert_eq!(verdict["kind"], "finite_class");
    assert_eq!(verdict["size"], 2);

    assert_eq!(code(&hyptrace(d, &["conjgrowth", "--preset", "free2", "--element", "e"])), 0);
    let verdict = &json(&d.join("conjgrowth.json"))["result"]["verdict"];
    assert_eq!(verdict["elements"], serde_json::json!(["e"]));
}

#[test]
fn trace_space_and_fc_center() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for (preset, dim) in [("paper-example-3", 2), ("free2", 1), ("z3xfree2", 3)] {
        assert_eq!(code(&hyptrace(d, &["tracespace", "--preset", preset])), 0);
        assert_eq!(json(&d.join("tracespace.json"))["result"]["dimension"], dim, "{preset}");
    }
    assert_eq!(code(&hyptrace(d, &["fccenter", "--preset", "paper-example-3"])), 0);
    let r = &json(&d.join("fccenter.json"))["result"];
    assert_eq!(r["N"].as_array().unwrap().len(), 3);
    assert_eq!(r["quotient_trace_dimension"], 1);
    assert_eq!(code(&hyptrace(d, &["fccenter", "--preset", "free2"])), 0);
    assert_eq!(json(&d.join("fccenter.json"))["result"]["N"], serde_json::json!(["e"]));
}

#[test]
fn outputs_are_deterministic_and_stamped() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let runs: &[(&[&str], &[&str])] = &[
        (&["rd", "--max-n", "3", "--samples", "4", "--seed", "7"], &["rd.csv", "rd.json"]),
        (&["certify", "--element", "x", "--L", "13"], &["certificate.csv", "certificate.json"]),
        (&["growth", "--radius", "10"], &["growth.csv", "growth.json"]),
    ];
    for (args, files) in runs {
        assert_eq!(code(&hyptrace(a.path(), args)), 0, "{args:?}");
        assert_eq!(code(&hyptrace(b.path(), args)), 0, "{args:?}");
        for f in *files {
            let (x, y) = (fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
            assert_eq!(x, y, "{f} differs between runs");
            let text = String::from_utf8(x).unwrap();
            assert!(text.contains(env!("CARGO_PKG_VERSION")) && text.contains("config_hash"), "{f} unstamped");
        }
    }
    assert_eq!(code(&hyptrace(b.path(), &["rd", "--max-n", "3", "--samples", "4", "--seed", "8"])), 0);
    assert_ne!(fs::read(a.path().join("rd.csv")).unwrap(), fs::read(b.path().join("rd.csv")).unwrap());
}

#[test]
fn config_file_round_trip_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let shown = hyptrace(d, &["show-config", "--preset", "z3xfree2", "--radius", "5", "--s", "1.5"]);
    assert_eq!(code(&shown), 0);
    let cfg_path = d.join("run.cfg");
    fs::write(&cfg_path, &shown.stdout).unwrap();

    let again = hyptrace(d, &["show-config", "--config", cfg_path.to_str().unwrap()]);
    assert_eq!(again.stdout, shown.stdout);

    let flagged = hyptrace(d, &["show-config", "--config", cfg_path.to_str().unwrap(), "--radius", "7"]);
    let text = String::from_utf8(flagged.stdout).unwrap();
    assert!(text.contains("radius = 7") && text.contains("s = 1.5") && text.contains("backend = z3xfree2"), "{text}");

    fs::write(&cfg_path, "radius = 4\nbogus = 1\n").unwrap();
    assert_eq!(code(&hyptrace(d, &["growth", "--config", cfg_path.to_str().unwrap()])), 3);
}

#[test]
fn cache_directory_from_environment() {
    let out = tempfile::tempdir().unwrap();
    let cache = tempfile::tempdir().unwrap();
    let run = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_hyptrace"))
            .args(["growth", "--radius", "10", "--out"])
            .arg(dir)
            .env("HYPTRACE_CACHE_DIR", cache.path())
            .output()
            .unwrap()
    };
    assert_eq!(code(&run(out.path())), 0);
    let entries: Vec<_> = fs::read_dir(cache.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".htrc"))
        .collect();
    assert_eq!(entries.len(), 1, "{entries:?}");
    let first = fs::read(out.path().join("growth.csv")).unwrap();

    let entry = cache.path().join(&entries[0]);
    let mut bytes = fs::read(&entry).unwrap();
    let last = bytes.len() - 1;
    bytes[last] ^= 1;
    fs::write(&entry, bytes).unwrap();
    let rerun = run(out.path());
    assert_eq!(code(&rerun), 0);
    assert!(String::from_utf8_lossy(&rerun.stderr).contains("warning"));
    assert_eq!(fs::read(out.path().join("growth.csv")).unwrap(), first);
}
