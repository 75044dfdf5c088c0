use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/small")
}

fn hgbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) {
    let out = hgbench(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn csv_rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    let mut rdr = csv::Reader::from_path(path).expect("csv");
    let header = rdr.headers().expect("header").clone();
    rdr.records()
        .map(|r| {
            let r = r.expect("record");
            header
                .iter()
                .map(String::from)
                .zip(r.iter().map(String::from))
                .collect()
        })
        .collect()
}

fn run_fixture(out: &Path) {
    let fx = fixture();
    let attributions = out.join("attributions.csv");
    ok(&[
        "--out",
        s(out),
        "attribute",
        "--in",
        s(&fx),
        "--affinity",
        "affinity.csv",
        "--aliases",
        "aliases.csv",
        "--gold",
        "gold.csv",
    ]);
    ok(&[
        "--out",
        s(out),
        "compute",
        "--in",
        s(&fx),
        "--affinity",
        "affinity.csv",
        "--baselines",
        "baselines.csv",
        "--attributions",
        s(&attributions),
        "--window",
        "2001:2005",
        "--obs-date",
        "2008-03-31",
    ]);
    ok(&["--out", s(out), "benchmark", "--in", s(out)]);
}

#[test]
fn compute_on_fixture_matches_hand_values() {
    let dir = tempfile::tempdir().unwrap();
    run_fixture(dir.path());
    let text = fs::read_to_string(dir.path().join("profiles.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "researcher_id,sds,uda,status,n_pubs,h,g,h_individual,h_m,h_f"
    );
    // Worked by hand from the fixture: citations counted through 2008-03-31,
    // P06 outside the window, P04 a snapshot count, R05/R06 not in role for
    // the whole window, R09 moved to FIS/03 in 2004.
    let expected = [
        "R01,FIS/01,02,ok,2,2,3,0.8,0.8333333333333333,2",
        "R02,FIS/03,02,ok,2,2,3,1.3333333333333333,1.5,2",
        "R03,FIS/01,02,ok,2,2,3,0.8,0.8333333333333333,2",
        "R04,MAT/05,01,ok,2,2,2,1.3333333333333333,1.5,2",
        "R07,FIS/03,02,zero_publications,0,0,0,0,0,0",
        "R08,MAT/05,01,zero_citations,1,0,0,0,0,0",
        "R09,FIS/03,02,ok,1,1,2,0.3333333333333333,0.3333333333333333,1",
    ];
    assert_eq!(text.lines().skip(1).collect::<Vec<_>>(), expected);

    // P10 has no address and an unmapped category, so its only candidate
    // scores 0.2; P09's author is not on the roster.
    let eval = csv_rows(&dir.path().join("evaluation.csv"));
    assert_eq!(eval[0]["true_positive"], "13");
    assert_eq!(eval[0]["false_negative"], "1");
    assert_eq!(eval[0]["false_positive"], "0");
    let residue = fs::read_to_string(dir.path().join("residue.csv")).unwrap();
    assert_eq!(
        residue,
        "pub_id,mention_position,best_score\nP09,0,\nP10,0,0.2000\n"
    );
}

#[test]
fn selected_indices_leave_other_columns_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let fx = fixture();
    ok(&[
        "--out",
        s(out),
        "attribute",
        "--in",
        s(&fx),
        "--aliases",
        "aliases.csv",
    ]);
    ok(&[
        "--out",
        s(out),
        "compute",
        "--in",
        s(&fx),
        "--attributions",
        s(&out.join("attributions.csv")),
        "--indices",
        "h,g",
    ]);
    let text = fs::read_to_string(out.join("profiles.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",,,")));
    ok(&["--out", s(out), "benchmark", "--in", s(out)]);
    assert!(out.join("benchmark_h.csv").exists() && out.join("benchmark_g.csv").exists());
    assert!(!out.join("benchmark_hi.csv").exists());
    let bad = hgbench(&[
        "--out",
        s(out),
        "benchmark",
        "--in",
        s(out),
        "--indices",
        "hm",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let bad_date = hgbench(&["compute", "--obs-date", "2008-13-40"]);
    assert_eq!(bad_date.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_date.stderr).contains("--obs-date"));

    let bad_window = hgbench(&["compute", "--window", "2005:2001"]);
    assert_eq!(bad_window.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_window.stderr).contains("--window"));

    assert_eq!(
        hgbench(&["compare", "--researcher", "R1", "--index", "q"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hgbench(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let missing = hgbench(&[
        "--out",
        s(dir.path()),
        "compute",
        "--in",
        s(&dir.path().join("nope")),
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("publications.jsonl"));

    let broken = dir.path().join("publications.jsonl");
    fs::write(&broken, "{\"pub_id\": \"P1\"}\n").unwrap();
    let out = hgbench(&["--out", s(dir.path()), "ingest", "--in", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn ingest_reports_census() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture();
    ok(&[
        "--out",
        s(dir.path()),
        "ingest",
        "--in",
        s(&fx),
        "--affinity",
        "affinity.csv",
    ]);
    let census = csv_rows(&dir.path().join("census.csv"));
    assert_eq!(census[0]["publications"], "10");
    assert_eq!(census[0]["researchers"], "9");
    assert_eq!(census[0]["mentions"], "15");
    // Two of nine researchers are named Rossi.
    assert_eq!(census[0]["homonym_fraction"], "0.2222");
    // P04 snapshot, ASTRONOMY & ASTROPHYSICS unmapped.
    assert_eq!(census[0]["warnings"], "2");
}

struct SynthRun {
    files: BTreeMap<String, Vec<u8>>,
    run: PathBuf,
}

fn synth_pipeline(root: &Path, format: &str) -> SynthRun {
    let data = root.join("data");
    let run = root.join("run");
    ok(&[
        "--out",
        s(&data),
        "synth",
        "--seed",
        "7",
        "--researchers",
        "800",
    ]);
    ok(&[
        "--out",
        s(&run),
        "attribute",
        "--in",
        s(&data),
        "--affinity",
        "affinity.csv",
        "--aliases",
        "aliases.csv",
        "--gold",
        "gold.csv",
    ]);
    ok(&[
        "--out",
        s(&run),
        "compute",
        "--in",
        s(&data),
        "--affinity",
        "affinity.csv",
        "--baselines",
        "baselines.csv",
        "--attributions",
        s(&run.join("attributions.csv")),
    ]);
    ok(&[
        "--out",
        s(&run),
        "--format",
        format,
        "benchmark",
        "--in",
        s(&run),
    ]);
    let mut files = BTreeMap::new();
    for dir in [&data, &run] {
        for e in fs::read_dir(dir).unwrap() {
            let e = e.unwrap();
            files.insert(
                format!(
                    "{}/{}",
                    dir.file_name().unwrap().to_string_lossy(),
                    e.file_name().to_string_lossy()
                ),
                fs::read(e.path()).unwrap(),
            );
        }
    }
    SynthRun { files, run }
}

#[test]
fn synth_pipeline_accounting_and_reruns() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let first = synth_pipeline(a.path(), "csv");
    let second = synth_pipeline(b.path(), "csv");
    assert_eq!(first.files, second.files, "reruns must be byte-identical");
    assert!(
        first.files.keys().all(|k| !k.contains(".tmp")),
        "no temp files left behind"
    );

    let profiles = csv_rows(&first.run.join("profiles.csv"));
    let filter = csv_rows(&first.run.join("sds_filter.csv"));
    let retained: Vec<&str> = filter
        .iter()
        .filter(|r| r["status"] == "retained")
        .map(|r| r["sds"].as_str())
        .collect();
    let in_retained = profiles
        .iter()
        .filter(|p| retained.contains(&p["sds"].as_str()))
        .count();
    let zero_pubs = profiles
        .iter()
        .filter(|p| retained.contains(&p["sds"].as_str()) && p["status"] == "zero_publications")
        .count();
    let zero_cites = profiles
        .iter()
        .filter(|p| retained.contains(&p["sds"].as_str()) && p["status"] == "zero_citations")
        .count();

    let ex = &csv_rows(&first.run.join("exclusion.csv"))[0];
    let num = |k: &str| ex[k].parse::<usize>().unwrap();
    assert_eq!(num("eligible"), in_retained);
    assert_eq!(num("zero_publications"), zero_pubs);
    assert_eq!(num("zero_citations"), zero_cites);
    assert_eq!(num("excluded_total"), zero_pubs + zero_cites);

    for idx in ["h", "g", "hi", "hm"] {
        let rows = csv_rows(&first.run.join(format!("benchmark_{idx}.csv")));
        let sds_n: usize = rows
            .iter()
            .filter(|r| r["level"] == "SDS")
            .map(|r| r["n"].parse::<usize>().unwrap())
            .sum();
        let uda_n: usize = rows
            .iter()
            .filter(|r| r["level"] == "UDA")
            .map(|r| r["n"].parse::<usize>().unwrap())
            .sum();
        assert_eq!(sds_n, num("eligible") - num("excluded_total"), "{idx}");
        assert_eq!(uda_n, sds_n, "{idx}");
    }
}

#[test]
fn markdown_tables() {
    let dir = tempfile::tempdir().unwrap();
    let r = synth_pipeline(dir.path(), "markdown");
    let text = fs::read_to_string(r.run.join("benchmark_h.md")).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "| level | code | n | q1 | median | q3 | max | mean | variance |"
    );
    assert_eq!(
        lines.next().unwrap(),
        "|---|---|---|---|---|---|---|---|---|"
    );
    assert!(r.run.join("ranges_h.md").exists() && r.run.join("lowcounts_h.md").exists());
}

#[test]
fn compare_ranks_group_maximum_highest() {
    let dir = tempfile::tempdir().unwrap();
    let r = synth_pipeline(dir.path(), "csv");
    let profiles = csv_rows(&r.run.join("profiles.csv"));
    let group: Vec<&BTreeMap<String, String>> = profiles
        .iter()
        .filter(|p| p["sds"] == "FIS/01" && p["status"] == "ok")
        .collect();
    assert!(group.len() > 5);
    let mut pct = Vec::new();
    for p in &group {
        let out = hgbench(&[
            "--out",
            s(&r.run),
            "compare",
            "--in",
            s(&r.run),
            "--researcher",
            &p["researcher_id"],
            "--index",
            "h",
        ]);
        assert!(out.status.success());
        let stdout = String::from_utf8(out.stdout).unwrap();
        let row = stdout.lines().nth(1).unwrap().to_string();
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells[4].parse::<usize>().unwrap(), group.len());
        pct.push((
            p["h"].parse::<u64>().unwrap(),
            cells[6].parse::<f64>().unwrap(),
        ));
    }
    let max_h = pct.iter().map(|(h, _)| *h).max().unwrap();
    let top = pct
        .iter()
        .filter(|(h, _)| *h == max_h)
        .map(|(_, p)| *p)
        .fold(f64::INFINITY, f64::min);
    assert!(pct.iter().all(|(_, p)| *p <= top));

    let excluded = profiles.iter().find(|p| p["status"] != "ok").unwrap();
    let out = hgbench(&[
        "--out",
        s(&r.run),
        "compare",
        "--in",
        s(&r.run),
        "--researcher",
        &excluded["researcher_id"],
        "--index",
        "h",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
