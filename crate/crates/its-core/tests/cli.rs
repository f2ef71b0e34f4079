//! End-to-end checks of the command-line interface: exit codes, stream
//! discipline (results on stdout, diagnostics on stderr), pipeline
//! composition, and stable transcripts.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Stdio};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn its(args: &[&str], stdin: Option<&str>) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_its"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    if let Some(text) = stdin {
        child
            .stdin
            .as_mut()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().expect("no signal"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

const EDGELESS_2X4: &str = r#"{
  "blocks": [["a1", "a2", "a3", "a4"], ["b1", "b2", "b3", "b4"]],
  "edges": []
}"#;

const SQUARE: &str = r#"{
  "blocks": [["a1", "a2"], ["b1", "b2"]],
  "edges": [["a1", "b1"]]
}"#;

const COMPLETE_2X2: &str = r#"{
  "blocks": [["a1", "a2"], ["b1", "b2"]],
  "edges": [["a1", "b1"], ["a1", "b2"], ["a2", "b1"], ["a2", "b2"]]
}"#;

#[test]
fn help_and_version_exit_zero() {
    let help = its(&["--help"], None);
    assert_eq!(help.code, 0);
    for sub in [
        "generate",
        "solve",
        "count",
        "verify",
        "complement",
        "reduce",
        "factor",
        "sweep",
    ] {
        assert!(help.stdout.contains(sub), "help does not mention {sub}");
    }
    assert_eq!(its(&["--version"], None).code, 0);
}

#[test]
fn sharp_family_reports_absence() {
    let gen = its(&["generate", "label-cliques", "--s", "2", "--d", "2"], None);
    assert_eq!(gen.code, 0);
    let solve = its(
        &["solve", "--solver", "exhaustive", "--s", "2"],
        Some(&gen.stdout),
    );
    assert_eq!(solve.code, 1, "stderr: {}", solve.stderr);
    assert!(
        solve.stderr.contains("no ITS exists"),
        "stderr: {}",
        solve.stderr
    );
    assert!(solve.stdout.is_empty(), "absence must leave stdout empty");
}

#[test]
fn count_matches_the_edgeless_product() {
    let run = its(&["count", "--t", "4", "--s", "1"], Some(EDGELESS_2X4));
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let doc: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(doc["exact_count"], "16");
    assert_eq!(doc["lower_bound"], "4");
    assert_eq!(doc["hypothesis_met"], true);
}

#[test]
fn solve_verify_round_trip_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = its(
        &[
            "generate",
            "random",
            "--r",
            "4",
            "--n",
            "12",
            "--avg",
            "2",
            "--cap",
            "2",
            "--seed",
            "7",
            "-o",
            inst.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(gen.code, 0);

    let args = [
        "solve",
        "--solver",
        "lll",
        "--seed",
        "3",
        inst.to_str().unwrap(),
    ];
    let first = its(&args, None);
    assert_eq!(first.code, 0, "stderr: {}", first.stderr);
    let cand: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!(cand["s"], 1);

    let verify = its(
        &["verify", "--candidate", "-", inst.to_str().unwrap()],
        Some(&first.stdout),
    );
    assert_eq!(verify.code, 0, "stderr: {}", verify.stderr);
    let report: serde_json::Value = serde_json::from_str(&verify.stdout).unwrap();
    assert_eq!(report["ok"], true);

    let second = its(&args, None);
    assert_eq!(
        first.stdout, second.stdout,
        "same seed must give the same bytes"
    );
}

#[test]
fn verify_rejects_an_adjacent_pair() {
    let candidate =
        r#"{"s":1,"selection":[{"block":0,"vertices":["a1"]},{"block":1,"vertices":["b1"]}]}"#;
    let dir = tempfile::tempdir().unwrap();
    let cand_path = dir.path().join("cand.json");
    fs::write(&cand_path, candidate).unwrap();
    let run = its(
        &["verify", "--candidate", cand_path.to_str().unwrap()],
        Some(SQUARE),
    );
    assert_eq!(run.code, 1);
    let report: serde_json::Value = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(report["ok"], false);
    assert!(!report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn complement_is_an_involution() {
    let gen = its(
        &[
            "generate", "random", "--r", "3", "--n", "4", "--avg", "3/2", "--cap", "2", "--seed",
            "13",
        ],
        None,
    );
    assert_eq!(gen.code, 0);
    let once = its(&["complement"], Some(&gen.stdout));
    assert_eq!(once.code, 0);
    assert_ne!(once.stdout, gen.stdout);
    let twice = its(&["complement"], Some(&once.stdout));
    assert_eq!(
        twice.stdout, gen.stdout,
        "complementing twice must restore the instance"
    );
}

#[test]
fn reduce_blowup_pipes_into_solve() {
    let gen = its(&["generate", "label-cliques", "--s", "2", "--d", "2"], None);
    let reduced = its(
        &["reduce", "--mode", "blowup", "--s", "2"],
        Some(&gen.stdout),
    );
    assert_eq!(reduced.code, 0, "stderr: {}", reduced.stderr);
    // The reduction is faithful: its 1-transversals are the original
    // 2-transversals, so absence carries over.
    let solve = its(
        &["solve", "--solver", "exhaustive", "--s", "1"],
        Some(&reduced.stdout),
    );
    assert_eq!(solve.code, 1);
    assert!(solve.stderr.contains("no ITS exists"));
}

#[test]
fn reduce_quotient_names_merged_groups() {
    let run = its(
        &["reduce", "--mode", "quotient", "--s", "2"],
        Some(EDGELESS_2X4),
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert!(run.stdout.contains("a1+a2"), "stdout: {}", run.stdout);
    assert!(run.stdout.contains("b3+b4"), "stdout: {}", run.stdout);
}

#[test]
fn factor_covers_or_reports_stuck() {
    let good = its(&["factor"], Some(EDGELESS_2X4));
    assert_eq!(good.code, 0, "stderr: {}", good.stderr);
    let doc: serde_json::Value = serde_json::from_str(&good.stdout).unwrap();
    assert_eq!(doc["found"], true);
    assert_eq!(doc["members"].as_array().unwrap().len(), 4);

    let stuck = its(&["factor"], Some(COMPLETE_2X2));
    assert_eq!(stuck.code, 1);
    assert!(
        stuck.stderr.contains("no factor found"),
        "stderr: {}",
        stuck.stderr
    );
}

#[test]
fn sweep_success_rate_is_monotone_in_thickness() {
    let run = its(
        &[
            "sweep", "--r", "4", "--s", "1", "--d", "2", "--trials", "12", "--seed", "0",
            "--solver", "lll",
        ],
        None,
    );
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    let mut lines = run.stdout.lines();
    assert_eq!(
        lines.next(),
        Some("thickness,D,s,r,trials,successes,mean_rounds"),
        "header must be stable"
    );
    let mut last = 0u32;
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 7, "row: {line}");
        assert_eq!(fields[4], "12");
        let successes: u32 = fields[5].parse().unwrap();
        assert!(successes >= last, "successes dropped in row: {line}");
        assert!(fields[6].parse::<f64>().is_ok());
        last = successes;
        rows += 1;
    }
    assert!(rows >= 3, "grid too small: {rows} rows");
}

#[test]
fn sweep_transcript_is_stable() {
    let args = [
        "sweep",
        "--r",
        "3",
        "--s",
        "1",
        "--d",
        "2",
        "--trials",
        "8",
        "--seed",
        "1",
        "--solver",
        "exhaustive",
    ];
    let run = its(&args, None);
    assert_eq!(run.code, 0, "stderr: {}", run.stderr);
    assert_eq!(run.stdout, its(&args, None).stdout, "reruns must agree");

    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/sweep.csv");
    if std::env::var_os("GOLDEN_REWRITE").is_some() {
        fs::write(&path, &run.stdout).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).expect("regenerate with GOLDEN_REWRITE=1");
    assert_eq!(
        run.stdout, want,
        "transcript drifted from tests/golden/sweep.csv"
    );
}

#[test]
fn solver_diagnostics_land_in_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst.json");
    let gen = its(
        &[
            "generate",
            "random",
            "--r",
            "4",
            "--n",
            "4",
            "--avg",
            "2",
            "--cap",
            "1",
            "--seed",
            "5",
            "-o",
            inst.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(gen.code, 0);

    let round_log = dir.path().join("rounds.jsonl");
    let stats = dir.path().join("nibble_stats.json");
    let nib = its(
        &[
            "solve",
            "--solver",
            "nibble",
            "--seed",
            "11",
            "--round-log",
            round_log.to_str().unwrap(),
            "--stats",
            stats.to_str().unwrap(),
            inst.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(nib.code, 0, "stderr: {}", nib.stderr);
    let log_text = fs::read_to_string(&round_log).unwrap();
    assert!(!log_text.is_empty());
    for line in log_text.lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["t", "s_t", "d_t", "accepted", "deleted"] {
            assert!(
                record.get(key).is_some(),
                "round record misses {key}: {line}"
            );
        }
    }
    let stats_text = fs::read_to_string(&stats).unwrap();
    assert!(stats_text.contains("\"rounds\""), "stats: {stats_text}");

    let lll_stats = dir.path().join("lll_stats.json");
    let lll = its(
        &[
            "solve",
            "--solver",
            "lll",
            "--seed",
            "3",
            "--prune-to",
            "4",
            "--stats",
            lll_stats.to_str().unwrap(),
            inst.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(lll.code, 0, "stderr: {}", lll.stderr);
    assert!(fs::read_to_string(&lll_stats)
        .unwrap()
        .contains("resamples"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(its(&["solve", "--no-such-flag"], None).code, 2);
    let missing = its(&["solve", "/definitely/not/here.json"], None);
    assert_eq!(missing.code, 2);
    assert!(
        missing.stderr.contains("error"),
        "stderr: {}",
        missing.stderr
    );
    let garbage = its(&["count"], Some("not json"));
    assert_eq!(garbage.code, 2);
}
