use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kfib_balance_cli::manifest::{Manifest, Provenance, Status, Verdict};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_kfib-balance"));
    c.env_remove("KFIB_CACHE_DIR");
    c
}

fn run(args: &[&str], cache: &Path) -> Output {
    bin()
        .args(args)
        .env("KFIB_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn smoke(dir: &Path, name: &str, extra: &[&str]) -> (Output, Manifest) {
    let path = dir.join(name);
    let mut args = vec![
        "verify-all",
        "--smoke",
        "--k-range",
        "3..10",
        "--manifest",
        path.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = run(&args, &dir.join("cache"));
    let m = Manifest::load(&path).expect("manifest written");
    (out, m)
}

#[test]
fn smoke_run_passes_and_skips_large_k() {
    let dir = tempfile::tempdir().unwrap();
    let (out, m) = smoke(dir.path(), "m.json", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(m.verdict, Verdict::Pass);
    assert!(m.config.smoke);
    assert_eq!(m.stage("large_k").unwrap().status, Status::Skipped);
    for s in ["sequences", "bounds", "small_k", "search", "certification"] {
        assert_eq!(m.stage(s).unwrap().status, Status::Pass, "{s}");
    }
    let b6 = m.solutions.iter().filter(|r| r.l == 6).count();
    assert_eq!(b6, 2);
    assert!(dir.path().join("cache").join("phi.cache").exists());
    assert!(dir.path().join("campaign-balancing-small.jsonl").exists());
}

#[test]
fn every_number_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let (_, m) = smoke(dir.path(), "m.json", &[]);
    for e in &m.entries {
        if let Some(p) = &e.paper {
            assert_eq!(p.provenance, Provenance::Paper, "{}", e.key);
        }
        if let Some(c) = &e.computed {
            assert_eq!(c.provenance, Provenance::Computed, "{}", e.key);
        }
    }
    let raw: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("m.json")).unwrap()).unwrap();
    assert_eq!(raw["version"], 1);
    assert!(raw["meta"]["started"].is_string());
}

#[test]
fn identical_runs_give_identical_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = smoke(dir.path(), "a.json", &[]);
    let (_, b) = smoke(dir.path(), "b.json", &["--jobs", "2"]);
    assert_eq!(a.deterministic_json(), b.deterministic_json());
    assert_eq!(b.meta.jobs, 2);
    // the second run found the roots of the first
    assert!(b.meta.phi_cache_reused > 0);
    assert_eq!(a.meta.phi_cache_reused, 0);
}

#[test]
fn corrupted_cache_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    fs::create_dir_all(&cache).unwrap();
    fs::write(cache.join("phi.cache"), "phi 5 192 1.9 1e-60\n").unwrap();
    let manifest = dir.path().join("m.json");
    let out = run(
        &[
            "verify-all",
            "--smoke",
            "--manifest",
            manifest.to_str().unwrap(),
        ],
        &cache,
    );
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    let rec: serde_json::Value = serde_json::from_str(err.lines().next().unwrap()).unwrap();
    assert_eq!(rec["kind"], "CacheInvalid");
    assert_eq!(rec["stage"], "sequences");
    let m = Manifest::load(&manifest).unwrap();
    assert_eq!(m.verdict, Verdict::Fail);
    assert_eq!(m.stage("bounds").unwrap().status, Status::NotRun);

    fs::write(cache.join("phi.cache"), "garbage\n").unwrap();
    let out = run(&["phi", "--k", "3"], &cache);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("invalid cache"));
}

#[test]
fn cache_dir_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("from-env");
    let out = run(&["phi", "--k", "2..4", "--digits", "10"], &cache);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("1.6180339887"));
    let text = fs::read_to_string(cache.join("phi.cache")).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("phi 2 192 1.618033988749894848204586834365638117720"));

    let flag = dir.path().join("from-flag");
    let out = run(
        &["phi", "--k", "5", "--cache-dir", flag.to_str().unwrap()],
        &cache,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(flag.join("phi.cache").exists());
}

#[test]
fn report_renders_smoke_manifest_with_skipped_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (_, _) = smoke(dir.path(), "m.json", &[]);
    let out = run(
        &["report", dir.path().join("m.json").to_str().unwrap()],
        &dir.path().join("cache"),
    );
    assert_eq!(out.status.code(), Some(0));
    let table = stdout(&out);
    let skipped: Vec<&str> = table.lines().filter(|l| l.contains("SKIPPED")).collect();
    assert!(skipped.iter().any(|l| l.starts_with("large_k")));
    for v in ["1180", "1082", "4008"] {
        assert!(skipped.iter().any(|l| l.contains(v)), "{v}");
    }
    assert!(table.contains("442.771"));
    assert!(table.trim_end().ends_with("verdict: PASS"));

    let out = run(
        &[
            "report",
            dir.path().join("m.json").to_str().unwrap(),
            "--format",
            "csv",
        ],
        &dir.path().join("cache"),
    );
    let csv = stdout(&out);
    assert!(csv.starts_with("key,quantity,paper,computed,tolerance,status\n"));
    assert!(csv.contains("SKIPPED"));
}

#[test]
fn report_rejects_empty_and_missing_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    fs::write(&empty, "").unwrap();
    let out = run(&["report", empty.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("empty"));

    fs::write(&empty, "{}").unwrap();
    let out = run(&["report", empty.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));

    fs::write(&empty, r#"{"schema":"kfib-balance/manifest","version":99}"#).unwrap();
    let out = run(&["report", empty.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("version"));

    let out = run(
        &["report", dir.path().join("none.json").to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not found"));
}

#[test]
fn seq_prints_values_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["seq", "--kind", "balancing", "--range", "0..6"],
        dir.path(),
    );
    assert_eq!(stdout(&out), "0\n1\n6\n35\n204\n1189\n6930\n");
    let out = run(&["seq", "--kind", "lucas", "--range", "0..2"], dir.path());
    assert_eq!(stdout(&out), "1\n3\n17\n");
    let out = run(
        &[
            "seq", "--kind", "kfib", "--k", "5", "--range", "15", "--format", "jsonl",
        ],
        dir.path(),
    );
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["value"], "6930");
    assert_eq!(v["kind"], "kfib");
    assert_eq!(v["index"], 15);
    let out = run(&["seq", "--kind", "kfib", "--range", "1..3"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn cf_lists_quotients_and_convergents() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["cf", "log(2)/log(gamma)", "--count", "9"], dir.path());
    let a: Vec<String> = stdout(&out)
        .lines()
        .map(|l| l.split(' ').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(a, ["0", "2", "1", "1", "5", "3", "2", "1", "22"]);
    let out = run(&["cf", "7/3"], dir.path());
    assert_eq!(stdout(&out), "0 2 2 1\n1 3 7 3\n");
    let out = run(
        &[
            "cf",
            "(1+sqrt(5))/2",
            "--min-denominator",
            "1000",
            "--format",
            "jsonl",
        ],
        dir.path(),
    );
    let last: serde_json::Value =
        serde_json::from_str(stdout(&out).lines().last().unwrap()).unwrap();
    assert_eq!(last["q"], "1597");
    assert_eq!(last["a"], "1");
}

#[test]
fn cf_reports_precision_exhaustion() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "cf",
            "sqrt(2)",
            "--count",
            "500",
            "--bits",
            "64",
            "--max-bits",
            "128",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("precision exhausted"));
}

#[test]
fn reduce_reads_json_instances() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("inst.jsonl");
    fs::write(
        &input,
        concat!(
            r#"{"tau_spec":"sqrt(2)","mu_spec":"1/3","A":"10","B":"2","M":"1000"}"#,
            "\n",
            r#"{"tau_spec":"log(gamma)/log(phi(3))","mu_spec":"2 + log(f(3)^-2/(4*sqrt(2)))/log(phi(3))","A":17.2,"B":"phi(3)","M":"1e6"}"#,
            "\n"
        ),
    )
    .unwrap();
    let out = run(&["reduce", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let lines: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["status"], "reduced");
    assert!(lines[0]["w_bound"].as_i64().unwrap() > 0);

    fs::write(
        &input,
        r#"{"tau_spec":"sqrt(2)","mu_spec":"0","A":10,"B":2,"M":1000}"#,
    )
    .unwrap();
    let out = run(
        &["reduce", input.to_str().unwrap(), "--no-fallback"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("epsilon_failed"));
    let out = run(&["reduce", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("legendre"));

    fs::write(&input, r#"{"tau_spec":"sqrt(2)"}"#).unwrap();
    let out = run(&["reduce", input.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bounds_emit_one_record_per_k() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["bounds", "--theorem", "2", "--k-range", "2..4"],
        dir.path(),
    );
    let recs: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(recs.len(), 3);
    assert_eq!(recs[0]["theorem"], 2);
    assert_eq!(recs[0]["k"], 2);
    // 3.28e32 · 256 · (log 2)^5 ≈ 1.34e34
    let m = recs[0]["M_k"].as_str().unwrap();
    assert_eq!(m.len(), 35);
    assert!(m.starts_with("134"));
    assert!(recs[0]["l_max"].as_str().unwrap().len() >= 34);
    let out = run(&["bounds", "--theorem", "1", "--k-range", "2"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn campaign_writes_audit_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.jsonl");
    let out = run(
        &[
            "campaign",
            "--theorem",
            "1",
            "--stage",
            "small",
            "--k-range",
            "3",
            "--jobs",
            "2",
            "--out",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = fs::read_to_string(&path).unwrap();
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    for key in ["k", "q_index", "q_digits10", "epsilon", "bound"] {
        assert!(first.get(key).is_some(), "{key}");
    }
    assert!(first.get("m").is_none());
    let with_m = text.lines().nth(1).unwrap();
    assert!(with_m.contains("\"m\":1"));
    let summaries: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(summaries[0]["name"], "m_bound");
    assert_eq!(summaries[1]["name"], "n_bound");

    let out = run(
        &[
            "campaign",
            "--theorem",
            "2",
            "--stage",
            "large",
            "--out",
            path.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.lines().next().unwrap().contains("\"a_max\":\"4008\""));
}

#[test]
fn search_gates_balancing_k2() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "search",
        "--equation",
        "B",
        "--k",
        "2..3",
        "--n-max",
        "20",
        "--l-max",
        "20",
    ];
    let out = run(&args, dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("--out-of-range"));

    let mut with_flag = args.to_vec();
    with_flag.push("--out-of-range");
    let out = run(&with_flag, dir.path());
    assert_eq!(out.status.code(), Some(0));
    let recs: Vec<serde_json::Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(recs
        .iter()
        .filter(|r| r["k"] == 2)
        .all(|r| r["scope"] == "out_of_range"));
    assert!(recs
        .iter()
        .filter(|r| r["k"] == 3)
        .all(|r| r.get("scope").is_none()));
    // B_2 = 6 = F_3 F_4 for ordinary Fibonacci numbers
    assert!(recs.iter().any(|r| r["k"] == 2 && r["l"] == 2));
}

#[test]
fn search_check_and_table_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "search",
            "--equation",
            "B",
            "--k",
            "4..6",
            "--n-max",
            "409",
            "--l-max",
            "327",
            "--check",
            "--format",
            "table",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let table = stdout(&out);
    assert_eq!(table.lines().count(), 11);
    assert!(table.contains("B_6 = F_1^(5) F_15^(5) = 6930"));

    let out = run(
        &[
            "search",
            "--equation",
            "C",
            "--k",
            "2",
            "--n-max",
            "3",
            "--l-max",
            "5",
            "--check",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("Mismatch"));
}

#[test]
fn bad_configuration_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-all", "--smoke", "--jobs", "0"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["verify-all", "--smoke", "--k-range", "3..x"], dir.path());
    assert_ne!(out.status.code(), Some(0));
    let out = run(&["phi", "--bits", "32"], dir.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn full_run_reproduces_published_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("full.json");
    let out = run(
        &["verify-all", "--manifest", path.to_str().unwrap()],
        &dir.path().join("cache"),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let m = Manifest::load(&path).unwrap();
    assert_eq!(m.verdict, Verdict::Pass);
    assert_eq!(m.solutions.len(), 3 * 448 + 2 + 2);
    let entry = |k: &str| m.entry(k).unwrap_or_else(|| panic!("{k}"));
    assert_eq!(
        entry("balancing.large.k_pass1")
            .computed
            .as_ref()
            .unwrap()
            .value,
        "1180"
    );
    assert_eq!(
        entry("lucas.large.k_pass1")
            .computed
            .as_ref()
            .unwrap()
            .value,
        "1082"
    );
    assert_eq!(
        entry("lucas.large.a_max").computed.as_ref().unwrap().value,
        "4008"
    );

    let out = run(&["report", path.to_str().unwrap()], dir.path());
    let table = stdout(&out);
    for v in [
        "442.771", "408.668", "553.311", "567.728", "4008", "1180", "1082",
    ] {
        assert!(
            table.lines().any(|l| l.contains(v) && l.contains("PASS")),
            "{v} row missing"
        );
    }
    assert!(!table.contains("SKIPPED"));
}
