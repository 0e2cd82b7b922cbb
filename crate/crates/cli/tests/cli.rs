//! End-to-end tests of the `isomech` binary: pipeline correctness on a
//! hand-checked fixture, determinism, and the documented exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn isomech(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isomech"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

/// Three authors, twelve papers with raw scores 1..12: author 1 owns papers
/// 1-6, author 2 owns 5-10, author 3 owns 9-12. Every author ranks their
/// papers worst-score-first, so each fully-owned block pools to its mean.
fn write_fixture(dir: &Path) {
    let owned: [&[u64]; 3] = [&[1, 2, 3, 4, 5, 6], &[5, 6, 7, 8, 9, 10], &[9, 10, 11, 12]];

    let mut network = String::from("paper_id,author_id\n");
    let mut rankings = String::from("author_id,paper_id,rank\n");
    for (author, papers) in owned.iter().enumerate() {
        for (i, paper) in papers.iter().enumerate() {
            network.push_str(&format!("{paper},{}\n", author + 1));
            rankings.push_str(&format!("{},{paper},{}\n", author + 1, i + 1));
        }
    }
    let mut scores = String::from("paper_id,score\n");
    for paper in 1..=12 {
        scores.push_str(&format!("{paper},{paper}\n"));
    }

    fs::write(dir.join("network.csv"), network).unwrap();
    fs::write(dir.join("rankings.csv"), rankings).unwrap();
    fs::write(dir.join("scores.csv"), scores).unwrap();
}

#[test]
fn fixture_pipeline_matches_the_worked_example() {
    let dir = TempDir::new().unwrap();
    write_fixture(dir.path());

    let out = isomech(
        dir.path(),
        &[
            "adjust",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--scores",
            "scores.csv",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("12 papers in 3 blocks"));

    let adjusted = fs::read_to_string(dir.path().join("adjusted.csv")).unwrap();
    let mut lines = adjusted.lines();
    assert_eq!(lines.next(), Some("paper_id,raw,adjusted,modified"));
    for (i, line) in lines.enumerate() {
        let paper = i + 1;
        let expected = match paper {
            1..=6 => 3.5,
            7..=10 => 8.5,
            _ => 11.5,
        };
        assert_eq!(line, format!("{paper},{paper},{expected},true"));
    }

    let blocks = fs::read_to_string(dir.path().join("partition_blocks.csv")).unwrap();
    let members: Vec<&str> = blocks.lines().skip(1).collect();
    assert_eq!(
        members,
        [
            "1,1", "1,2", "1,3", "1,4", "1,5", "1,6", "2,7", "2,8", "2,9", "2,10", "3,11",
            "3,12",
        ]
    );

    let out = isomech(
        dir.path(),
        &[
            "select",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--adjusted",
            "adjusted.csv",
            "--protocol",
            "blind",
            "--quota",
            "2",
            "--winners",
            "1",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("pool of 6 eligible papers"), "{text}");
    assert!(text.contains("winner 1: paper 9 (raw 9, adjusted 8.5)"), "{text}");

    let selection = fs::read_to_string(dir.path().join("selection.csv")).unwrap();
    assert!(selection.starts_with("protocol,rank,paper_id,"));
    assert!(selection.lines().nth(1).unwrap().starts_with("blind,1,9,"));
}

#[test]
fn score_consistent_rankings_change_nothing() {
    let dir = TempDir::new().unwrap();
    write_fixture(dir.path());

    // Re-rank every author best-score-first, agreeing with the raw scores.
    let owned: [&[u64]; 3] = [&[1, 2, 3, 4, 5, 6], &[5, 6, 7, 8, 9, 10], &[9, 10, 11, 12]];
    let mut rankings = String::from("author_id,paper_id,rank\n");
    for (author, papers) in owned.iter().enumerate() {
        for (i, paper) in papers.iter().rev().enumerate() {
            rankings.push_str(&format!("{},{paper},{}\n", author + 1, i + 1));
        }
    }
    fs::write(dir.path().join("rankings.csv"), rankings).unwrap();

    let out = isomech(
        dir.path(),
        &[
            "adjust",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--scores",
            "scores.csv",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("modified 0/12 scores (0.0%)"));

    let adjusted = fs::read_to_string(dir.path().join("adjusted.csv")).unwrap();
    for (i, line) in adjusted.lines().skip(1).enumerate() {
        let paper = i + 1;
        assert_eq!(line, format!("{paper},{paper},{paper},false"));
    }
}

#[test]
fn malformed_input_exits_two_with_a_line_number() {
    let dir = TempDir::new().unwrap();
    write_fixture(dir.path());
    fs::write(dir.path().join("scores.csv"), "paper_id,score\n1,fine\n").unwrap();

    let out = isomech(
        dir.path(),
        &[
            "adjust",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--scores",
            "scores.csv",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn winners_beyond_the_pool_exit_two() {
    let dir = TempDir::new().unwrap();
    write_fixture(dir.path());
    isomech(
        dir.path(),
        &[
            "adjust",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--scores",
            "scores.csv",
        ],
    );
    let out = isomech(
        dir.path(),
        &[
            "select",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--adjusted",
            "adjusted.csv",
            "--protocol",
            "blind",
            "--quota",
            "2",
            "--winners",
            "50",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("50"), "{}", stderr(&out));
}

#[test]
fn benchmark_selection_needs_no_rankings_file() {
    let dir = TempDir::new().unwrap();
    write_fixture(dir.path());
    isomech(
        dir.path(),
        &[
            "adjust",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--scores",
            "scores.csv",
        ],
    );
    let out = isomech(
        dir.path(),
        &[
            "select",
            "--network",
            "network.csv",
            "--adjusted",
            "adjusted.csv",
            "--protocol",
            "benchmark",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    // Benchmark ranks by raw score, so paper 12 wins.
    assert!(stdout(&out).contains("winner 1: paper 12"), "{}", stdout(&out));

    let out = isomech(
        dir.path(),
        &[
            "select",
            "--network",
            "network.csv",
            "--adjusted",
            "adjusted.csv",
            "--protocol",
            "blind",
        ],
    );
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--rankings"), "{}", stderr(&out));
}

const SMALL_CONFIG: &str = r#"
master_seed = 5

[network]
model = "uniform"
num_authors = 30
num_papers = 60
max_authors_per_paper = 4

[noise]
variance = 1.0

[sweep]
epsilons = [1.0]
quotas = [1]
winners = [1]
protocols = ["blind"]
rounds = 6
"#;

#[test]
fn generate_is_deterministic_given_the_seed() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("cfg.toml"), SMALL_CONFIG).unwrap();

    for run in ["a", "b"] {
        let out = isomech(
            dir.path(),
            &["generate", "--config", "cfg.toml", "--out-dir", run],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let out = isomech(
        dir.path(),
        &["generate", "--config", "cfg.toml", "--seed", "6", "--out-dir", "c"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    for file in ["network.csv", "rankings.csv", "scores.csv", "truth.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let a = fs::read(dir.path().join("a/scores.csv")).unwrap();
    let c = fs::read(dir.path().join("c/scores.csv")).unwrap();
    assert_ne!(a, c, "--seed override had no effect");

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/scores.csv.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["tool"], "isomech");
    assert!(meta["config_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn sweep_results_do_not_depend_on_jobs() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("cfg.toml"), SMALL_CONFIG).unwrap();

    for (run, jobs) in [("j1", "1"), ("j4", "4")] {
        let out = isomech(
            dir.path(),
            &["sweep", "--config", "cfg.toml", "--jobs", jobs, "--out-dir", run],
        );
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let a = fs::read(dir.path().join("j1/sweep.csv")).unwrap();
    let b = fs::read(dir.path().join("j4/sweep.csv")).unwrap();
    assert_eq!(a, b, "sweep output depends on --jobs");
}

#[test]
fn config_typos_are_rejected_by_name() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("cfg.toml"),
        "[network]\nmodel = \"uniform\"\nnum_author = 5\nnum_papers = 9\n",
    )
    .unwrap();
    let out = isomech(dir.path(), &["generate", "--config", "cfg.toml"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("num_author"), "{}", stderr(&out));
}

#[test]
fn verify_writes_a_report_and_honours_the_trial_floor() {
    let dir = TempDir::new().unwrap();
    let out = isomech(
        dir.path(),
        &["verify", "--theorem", "majorization", "--trials", "10000"],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["violations"], 0);
    assert!(dir.path().join("report.json.meta.json").exists());

    let out = isomech(
        dir.path(),
        &["verify", "--theorem", "truthfulness", "--n", "3", "--trials", "100"],
    );
    assert_eq!(code(&out), 2, "too few trials must be an input error");
}

#[test]
fn audit_fits_planted_labels_and_rejects_one_class_data() {
    let dir = TempDir::new().unwrap();
    // Deterministic two-class records: successes exactly where the planted
    // curve sigmoid(-6 + 1.2s) exceeds alternating thresholds.
    let mut records = String::from("paper_id,score,outcome,year,scale_lo,scale_hi\n");
    for i in 0..600 {
        let s = 10.0 * (i as f64 + 0.5) / 600.0;
        let p = 1.0 / (1.0 + (6.0 - 1.2 * s).exp());
        let u = (i % 97) as f64 / 97.0;
        let outcome = if p > u { "best" } else { "rejected" };
        records.push_str(&format!("{},{s},{outcome},2021,0,10\n", i + 1));
    }
    fs::write(dir.path().join("records.csv"), records).unwrap();

    let out = isomech(
        dir.path(),
        &[
            "audit",
            "--records",
            "records.csv",
            "--lambda",
            "0.0001",
            "--buckets",
            "uniform:1",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert!(fit["converged"].as_bool().unwrap());
    assert!(fit["beta1"].as_f64().unwrap() > 0.0);
    assert_eq!(fit["lambda"].as_f64().unwrap(), 0.0001);
    let curve = fs::read_to_string(dir.path().join("curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("bucket_lo,bucket_hi,n,p,sem"));
    assert_eq!(curve.lines().count(), 10);
    assert!(dir.path().join("curve.csv.meta.json").exists());
    assert!(dir.path().join("fit.json.meta.json").exists());

    let mut one_class = String::from("paper_id,score,outcome,year,scale_lo,scale_hi\n");
    for i in 0..10 {
        one_class.push_str(&format!("{},{},accepted,2021,0,10\n", i + 1, i));
    }
    fs::write(dir.path().join("one.csv"), one_class).unwrap();
    let out = isomech(
        dir.path(),
        &["audit", "--records", "one.csv", "--outcome", "accepted"],
    );
    assert_eq!(code(&out), 4, "stderr: {}", stderr(&out));
}

#[test]
fn config_sections_supply_flag_defaults() {
    let dir = TempDir::new().unwrap();
    write_fixture(dir.path());
    fs::write(
        dir.path().join("cfg.toml"),
        "[protocol]\nprotocol = \"blind\"\nquota = 2\nwinners = 1\n",
    )
    .unwrap();
    isomech(
        dir.path(),
        &[
            "adjust",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--scores",
            "scores.csv",
        ],
    );
    let out = isomech(
        dir.path(),
        &[
            "select",
            "--network",
            "network.csv",
            "--rankings",
            "rankings.csv",
            "--adjusted",
            "adjusted.csv",
            "--config",
            "cfg.toml",
        ],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("winner 1: paper 9"), "{}", stdout(&out));
}
