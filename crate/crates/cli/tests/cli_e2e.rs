//! Command-line behaviour: exit codes, stage isolation, and output shapes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn segnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_segnet"))
        .args(args)
        .output()
        .expect("spawn segnet")
}

fn bundled_corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus_500.jsonl")
}

fn run_ok(args: &[&str]) {
    let out = segnet(args);
    assert!(
        out.status.success(),
        "segnet {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

#[test]
fn missing_partition_file_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    let out = segnet(&[
        "ssi",
        "--input",
        corpus.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "expected clap usage error");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("--partition-file"), "stderr: {stderr}");
}

#[test]
fn bad_flag_is_a_usage_error() {
    let out = segnet(&["graph", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stage_failure_exits_one_with_stage_name() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    let out = segnet(&[
        "graph",
        "--input",
        corpus.to_str().unwrap(),
        "--weighting",
        "frequency",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("stage graph failed"), "stderr: {stderr}");

    let out = segnet(&[
        "graph",
        "--input",
        "/nonexistent/corpus.jsonl",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

/// Every stage reruns from persisted files alone and reproduces the
/// pipeline's own artifacts.
#[test]
fn stages_rerun_from_persisted_inputs() {
    let tmp = tempfile::tempdir().unwrap();
    let pipeline_dir = tmp.path().join("pipeline");
    let corpus = bundled_corpus();
    run_ok(&[
        "pipeline",
        "--input",
        corpus.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        pipeline_dir.to_str().unwrap(),
    ]);

    // ssi from the persisted partition.
    let ssi_dir = tmp.path().join("ssi");
    run_ok(&[
        "ssi",
        "--input",
        corpus.to_str().unwrap(),
        "--partition-file",
        pipeline_dir.join("partition.csv").to_str().unwrap(),
        "--out",
        ssi_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        read(&ssi_dir, "ssi_report.csv"),
        read(&pipeline_dir, "ssi_report.csv")
    );

    // cores from partition + report.
    let cores_dir = tmp.path().join("cores");
    run_ok(&[
        "cores",
        "--input",
        corpus.to_str().unwrap(),
        "--partition-file",
        pipeline_dir.join("partition.csv").to_str().unwrap(),
        "--ssi-file",
        pipeline_dir.join("ssi_report.csv").to_str().unwrap(),
        "--out",
        cores_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        read(&cores_dir, "coreness.csv"),
        read(&pipeline_dir, "coreness.csv")
    );

    // compare from the persisted profiles and metrics.
    let compare_dir = tmp.path().join("compare");
    run_ok(&[
        "compare",
        "--profiles",
        pipeline_dir.join("citation_profiles.csv").to_str().unwrap(),
        "--metrics",
        pipeline_dir.join("community_metrics.csv").to_str().unwrap(),
        "--out",
        compare_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        read(&compare_dir, "comparison.csv"),
        read(&pipeline_dir, "comparison.csv")
    );
}

/// One comparison row per (core, productivity range, variable).
#[test]
fn comparison_table_has_expected_row_count() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    run_ok(&[
        "pipeline",
        "--input",
        corpus.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);

    let profiles = read(tmp.path(), "citation_profiles.csv");
    let mut cores = std::collections::BTreeSet::new();
    for line in profiles.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let category = fields[7];
        if category == "highly_segregated" || category == "non_segregated" {
            cores.insert(fields[8].to_string());
        }
    }
    let comparison = read(tmp.path(), "comparison.csv");
    let rows = comparison.lines().count() - 1;
    assert_eq!(rows, cores.len() * 3 * 4, "cores seen: {cores:?}");
}

#[test]
fn external_partition_flows_through_detect() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    let first = tmp.path().join("first");
    run_ok(&[
        "detect",
        "--input",
        corpus.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        first.to_str().unwrap(),
    ]);
    let second = tmp.path().join("second");
    run_ok(&[
        "detect",
        "--input",
        corpus.to_str().unwrap(),
        "--algo",
        "external",
        "--partition-file",
        first.join("partition.csv").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert_eq!(
        read(&first, "partition.csv"),
        read(&second, "partition.csv")
    );
    // Quality metrics are recomputed identically from the imported partition.
    let q1 = read(&first, "partition_quality.csv");
    let q2 = read(&second, "partition_quality.csv");
    let strip = |s: &str| {
        s.lines()
            .map(|l| l.split(',').take(5).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&q1), strip(&q2));
}

#[test]
fn synth_is_deterministic_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        run_ok(&[
            "synth",
            "--teams",
            "6",
            "--mixing",
            "0.2",
            "--seed",
            "9",
            "--out",
            dir.to_str().unwrap(),
        ]);
    }
    assert_eq!(read(&a, "corpus.jsonl"), read(&b, "corpus.jsonl"));
    assert_eq!(read(&a, "teams.csv"), read(&b, "teams.csv"));
    assert_eq!(read(&a, "paper_sources.csv"), read(&b, "paper_sources.csv"));
    assert_eq!(
        read(&a, "manifest_synth.json"),
        read(&b, "manifest_synth.json")
    );
}

#[test]
fn thread_cap_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    let capped = tmp.path().join("capped");
    let wide = tmp.path().join("wide");
    for (dir, threads) in [(&capped, "1"), (&wide, "4")] {
        let out = Command::new(env!("CARGO_BIN_EXE_segnet"))
            .env("SEGNET_THREADS", threads)
            .args([
                "pipeline",
                "--input",
                corpus.to_str().unwrap(),
                "--seed",
                "11",
                "--out",
                dir.to_str().unwrap(),
            ])
            .output()
            .expect("spawn segnet");
        assert!(out.status.success());
    }
    for entry in std::fs::read_dir(&capped).unwrap() {
        let name = entry.unwrap().file_name();
        let name = name.to_string_lossy();
        assert_eq!(
            std::fs::read(capped.join(&*name)).unwrap(),
            std::fs::read(wide.join(&*name)).unwrap(),
            "{name} differs across thread caps"
        );
    }
}

#[test]
fn fastgreedy_algo_produces_a_partition() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    run_ok(&[
        "detect",
        "--input",
        corpus.to_str().unwrap(),
        "--algo",
        "fastgreedy",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let partition = read(tmp.path(), "partition.csv");
    assert!(partition.lines().count() > 100);
    let quality = read(tmp.path(), "partition_quality.csv");
    assert_eq!(quality.lines().count(), 2);
}

#[test]
fn bins_override_controls_zscore_ranges() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = bundled_corpus();
    let pipeline_dir = tmp.path().join("pipeline");
    run_ok(&[
        "pipeline",
        "--input",
        corpus.to_str().unwrap(),
        "--seed",
        "11",
        "--out",
        pipeline_dir.to_str().unwrap(),
    ]);
    let bins_path = tmp.path().join("bins.txt");
    std::fs::write(&bins_path, "3\n6\n12\n").unwrap();
    let compare_dir = tmp.path().join("compare");
    run_ok(&[
        "compare",
        "--profiles",
        pipeline_dir.join("citation_profiles.csv").to_str().unwrap(),
        "--metrics",
        pipeline_dir.join("community_metrics.csv").to_str().unwrap(),
        "--bins-file",
        bins_path.to_str().unwrap(),
        "--out",
        compare_dir.to_str().unwrap(),
    ]);
    let bins = read(&compare_dir, "size_bins.csv");
    let mut lines = bins.lines().skip(1);
    assert_eq!(lines.next().unwrap().split(',').nth(1), Some("3"));
    assert_eq!(lines.next().unwrap().split(',').nth(1), Some("6"));
    assert_eq!(lines.next().unwrap().split(',').nth(1), Some("12"));
}
