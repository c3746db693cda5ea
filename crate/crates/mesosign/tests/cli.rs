//! End-to-end tests of the `mesosign` binary: exit codes, file outputs, and
//! reproducibility contracts.

mod common;

use std::path::Path;
use std::process::{Command, Output};

fn mesosign(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mesosign"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_g2x3(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("g2x3.txt");
    std::fs::write(&path, common::g2x3_file_text()).unwrap();
    path
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn missing_input_exits_1_and_names_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mesosign(
        &["stats", "--input", "no_such_file.txt", "--undirected"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no_such_file.txt"), "{stderr}");
}

#[test]
fn unknown_method_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "analyze",
            "--input",
            "g2x3.txt",
            "--undirected",
            "--method",
            "unknown",
            "--out",
            "o",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn null_with_one_sample_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "null",
            "--input",
            "g2x3.txt",
            "--undirected",
            "--null",
            "sign-shuffle",
            "--samples",
            "1",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_g2x3_reports_balanced_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "analyze",
            "--input",
            "g2x3.txt",
            "--undirected",
            "--method",
            "blockmodel",
            "--seed",
            "7",
            "--bootstrap-k",
            "50",
            "--samples",
            "500",
            "--out",
            "results",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("results");
    for file in [
        "run_meta.json",
        "stats.json",
        "node_labels.csv",
        "partition.csv",
        "partition_score.json",
        "blockmodel_fit.json",
        "densities.json",
        "classification.json",
        "frustration.json",
        "triads.json",
        "robustness.json",
        "zscores.json",
    ] {
        assert!(dir.join(file).exists(), "missing {file}");
    }
    let fit = read_json(&dir.join("blockmodel_fit.json"));
    assert_eq!(fit["data"]["partition"]["block_count"], 2);
    assert_eq!(fit["data"]["p_pos"][0][0], 1.0);
    let classification = read_json(&dir.join("classification.json"));
    assert_eq!(classification["data"]["pairs"][0]["category"], "balanced");
    assert_eq!(classification["data"]["pairs"][0]["score"], 2);
    assert_eq!(classification["data"]["census"]["dominant_type"], "A+|D-");
    assert_eq!(classification["schema_version"], "1");
    assert_eq!(classification["seed"], 7);
    let frustration = read_json(&dir.join("frustration.json"));
    assert_eq!(frustration["data"]["overall"], 0.0);
    let triads = read_json(&dir.join("triads.json"));
    assert_eq!(triads["data"]["dob"], 1.0);
}

#[test]
fn analyze_accepts_imported_partition() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let run = mesosign(
        &[
            "partition", "--input", "g2x3.txt", "--undirected", "--method", "louvain",
            "--seed", "3", "--out", "p",
        ],
        tmp.path(),
    );
    assert_eq!(run.status.code(), Some(0));
    let partition_csv = tmp.path().join("p").join("partition.csv");
    let out = mesosign(
        &[
            "analyze",
            "--input",
            "g2x3.txt",
            "--undirected",
            "--method",
            "import",
            "--partition",
            partition_csv.to_str().unwrap(),
            "--out",
            "results",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let classification = read_json(&tmp.path().join("results").join("classification.json"));
    assert_eq!(classification["data"]["census"]["dominant_type"], "A+|D-");
}

#[test]
fn import_requires_partition_flag() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "analyze", "--input", "g2x3.txt", "--undirected", "--method", "import", "--out", "o",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn synth_rejects_invalid_probabilities_with_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mesosign(
        &[
            "synth", "--n", "30", "--groups", "3", "--p-pos-in", "0.8", "--p-neg-in", "0.5",
            "--out", "s",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("p_pos_in + p_neg_in <= 1"), "{stderr}");
}

#[test]
fn synth_output_loads_back() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mesosign(
        &[
            "synth", "--n", "30", "--groups", "3", "--p-pos-in", "0.4", "--p-neg-out", "0.3",
            "--seed", "5", "--out", "s",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stats = mesosign(
        &[
            "stats",
            "--input",
            tmp.path().join("s").join("planted_edges.txt").to_str().unwrap(),
            "--undirected",
        ],
        tmp.path(),
    );
    assert_eq!(stats.status.code(), Some(0));
}

#[test]
fn sweep_runs_and_is_byte_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--n", "30", "--groups", "3", "--p-pos-in", "0.5", "--p-pos-out", "0.05",
        "--p-neg-out", "0.05", "--ratios", "0,0.5", "--methods", "oracle,louvain",
        "--replicates", "2", "--seed", "11", "--threads", "1",
    ];
    let first = mesosign(&[&args[..], &["--out", "a"]].concat(), tmp.path());
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let second = mesosign(&[&args[..], &["--out", "b"]].concat(), tmp.path());
    assert_eq!(second.status.code(), Some(0));
    let csv_a = std::fs::read(tmp.path().join("a").join("sweep.csv")).unwrap();
    let csv_b = std::fs::read(tmp.path().join("b").join("sweep.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "ratio,method,replicates,nmi_mean,nmi_std,balanced_frac_mean,balanced_frac_std"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn sweep_unknown_method_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mesosign(
        &[
            "sweep", "--ratios", "0", "--methods", "sponge", "--replicates", "1", "--out", "s",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sponge"));
}

#[test]
fn analyze_single_block_partition_degrades_gracefully() {
    let tmp = tempfile::tempdir().unwrap();
    // All-positive clique: every partitioner returns one block.
    std::fs::write(
        tmp.path().join("clique.txt"),
        "0 1 1\n0 2 1\n0 3 1\n1 2 1\n1 3 1\n2 3 1\n",
    )
    .unwrap();
    let out = mesosign(
        &[
            "analyze", "--input", "clique.txt", "--undirected", "--method", "louvain",
            "--bootstrap-k", "20", "--out", "results",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let classification = read_json(&tmp.path().join("results").join("classification.json"));
    assert_eq!(classification["data"]["pairs"].as_array().unwrap().len(), 0);
    assert!(classification["data"]["note"].as_str().unwrap().contains("single block"));
    let frustration = read_json(&tmp.path().join("results").join("frustration.json"));
    assert_eq!(frustration["data"]["overall"], 0.0);
}

#[test]
fn partition_without_out_prints_csv() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "partition", "--input", "g2x3.txt", "--undirected", "--method", "louvain",
            "--seed", "1",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("node,label\n"));
    assert_eq!(stdout.lines().count(), 7);
}

#[test]
fn stats_csv_format() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "stats", "--input", "g2x3.txt", "--undirected", "--format", "csv",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("key,value\n"));
    assert!(stdout.contains("l_neg,9\n"));
}

#[test]
fn directed_input_is_symmetrized() {
    let tmp = tempfile::tempdir().unwrap();
    // Opposite arcs between 0 and 1: the undirected edge must be negative.
    std::fs::write(tmp.path().join("d.txt"), "0 1 2\n1 0 -1\n1 2 1\n").unwrap();
    let out = mesosign(&["stats", "--input", "d.txt"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stats emits JSON");
    assert_eq!(value["data"]["stats"]["l_neg"], 1);
    assert_eq!(value["data"]["stats"]["l_pos"], 1);
}

#[test]
fn robustness_reports_certainty_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let out = mesosign(
        &[
            "robustness", "--input", "g2x3.txt", "--undirected", "--method", "louvain",
            "--bootstrap-k", "100", "--seed", "2", "--out", "r",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("r").join("robustness.json"));
    let c = report["data"]["certainty"][0][1].as_f64().unwrap();
    assert!(c > 0.9 && c <= 1.0);
}

#[test]
fn null_blockmodel_on_exact_fit_is_degenerate() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    std::fs::write(
        tmp.path().join("planted.csv"),
        "node,label\n0,0\n1,0\n2,0\n3,1\n4,1\n5,1\n",
    )
    .unwrap();
    let out = mesosign(
        &[
            "null", "--input", "g2x3.txt", "--undirected", "--null", "blockmodel",
            "--partition", "planted.csv", "--samples", "20", "--seed", "1", "--out", "n",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&tmp.path().join("n").join("dob_zscore.json"));
    assert_eq!(report["data"]["degenerate"], true);
    assert_eq!(report["data"]["z"], serde_json::Value::Null);
}

#[test]
fn analyze_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    write_g2x3(tmp.path());
    let files = [
        "stats.json",
        "partition.csv",
        "densities.json",
        "classification.json",
        "frustration.json",
        "triads.json",
        "zscores.json",
        "robustness.json",
    ];
    let run = || {
        let out = mesosign(
            &[
                "analyze", "--input", "g2x3.txt", "--undirected", "--method", "blockmodel",
                "--seed", "9", "--samples", "200", "--bootstrap-k", "50",
                "--threads", "1", "--out", "z",
            ],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run();
    let snapshot: Vec<Vec<u8>> = files
        .iter()
        .map(|f| std::fs::read(tmp.path().join("z").join(f)).unwrap())
        .collect();
    run();
    for (file, before) in files.iter().zip(snapshot) {
        let after = std::fs::read(tmp.path().join("z").join(file)).unwrap();
        assert_eq!(before, after, "file {file} differs between identical runs");
    }
}
