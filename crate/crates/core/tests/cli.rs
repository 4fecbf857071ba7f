use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

use hanabi_tom::card::Color;
use hanabi_tom::fixtures;
use hanabi_tom::game::Action;
use hanabi_tom::harness::{record_turn, EpisodeConfig, PolicySpec, Trajectory, TurnRecord, STATS_CSV_HEADER};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hanabi-tom"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn simulate_to(dir: &TempDir, name: &str, extra: &[&str]) -> (PathBuf, Output) {
    let out = dir.path().join(name);
    let mut args = vec!["simulate", "--out", path_str(&out)];
    args.extend_from_slice(extra);
    let o = run(&args);
    (out, o)
}

#[test]
fn simulate_writes_one_stats_row() {
    let dir = TempDir::new().unwrap();
    let flags = ["--players", "2", "--episodes", "1000", "--policy", "random", "--seed", "7"];
    let (csv_path, o) = simulate_to(&dir, "a.csv", &flags);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("median"));

    let mut reader = csv::Reader::from_path(&csv_path).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.join(","), STATS_CSV_HEADER);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(&row[0], "2");
    assert_eq!(&row[1], "random");
    assert_eq!(&row[4], "1000");
    for i in [2, 5, 6, 7] {
        row[i].parse::<f64>().unwrap();
    }
    assert_eq!(row[3].parse::<u8>().unwrap(), 0);

    let (again, _) = simulate_to(&dir, "b.csv", &flags);
    assert_eq!(std::fs::read(&csv_path).unwrap(), std::fs::read(again).unwrap());
}

#[test]
fn simulate_logs_beta_weighted_rewards() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("t.jsonl");
    let (_, o) = simulate_to(
        &dir,
        "s.csv",
        &[
            "--episodes",
            "2",
            "--policy",
            "belief_greedy",
            "--beta",
            "2",
            "--trajectory-out",
            path_str(&traj),
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&traj).unwrap();
    let required = [
        "seed",
        "turn",
        "actor",
        "action",
        "state_hash",
        "next_state_hash",
        "extrinsic",
        "intrinsic",
        "combined",
        "beliefs_t",
        "beliefs_t1",
        "true_hands",
        "score",
        "return_to_go",
    ];
    let mut any_intrinsic = false;
    for line in text.lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        for key in required {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["reward"]["beta"], 2.0);
        let (e, i, c) = (
            v["extrinsic"].as_f64().unwrap(),
            v["intrinsic"].as_f64().unwrap(),
            v["combined"].as_f64().unwrap(),
        );
        assert!((c - (e + 2.0 * i)).abs() < 1e-12);
        any_intrinsic |= i > 0.0;
    }
    assert!(any_intrinsic);
}

#[test]
fn bad_flags_exit_with_two() {
    for args in [
        &["simulate", "--players", "6"][..],
        &["simulate", "--method", "exact"],
        &["simulate", "--policy", "clever"],
        &["simulate", "--episodes", "0"],
        &["simulate", "--beta", "-1"],
        &["belief"],
        &["oracle-check", "--colors", "2", "--ranks", "3", "--counts", "1"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn belief_on_worked_example() {
    let o = run(&["belief", "--state-json", &data("worked_example.json"), "--level", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let row = &v["own"][0]["probs"];
    assert_eq!(row.as_object().unwrap().len(), 3);
    assert!((row["R3"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((row["R4"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((row["R5"].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!(v.get("nested").is_none());
}

#[test]
fn belief_fully_hinted_is_one_hot_at_both_levels() {
    let o = run(&[
        "belief",
        "--state-json",
        &data("fully_hinted.json"),
        "--level",
        "1",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header.len(), 27);
    let mut labels = Vec::new();
    for rec in reader.records() {
        let rec = rec.unwrap();
        labels.push(rec[0].to_string());
        let values: Vec<f64> = rec.iter().skip(2).map(|x| x.parse().unwrap()).collect();
        assert_eq!(values.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(values.iter().filter(|&&x| x == 0.0).count(), 24);
    }
    assert_eq!(labels.iter().filter(|l| *l == "own").count(), 5);
    assert_eq!(labels.iter().filter(|l| *l == "nested1").count(), 5);
}

#[test]
fn belief_mc_is_reproducible() {
    let args = [
        "belief",
        "--state-json",
        &data("worked_example.json"),
        "--level",
        "1",
        "--method",
        "mc",
        "--samples",
        "300",
        "--seed",
        "4",
    ];
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&run(&args)));
}

#[test]
fn belief_data_errors_exit_with_three() {
    let o = run(&["belief", "--state-json", &data("one_player.json"), "--level", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{\"num_players\": 2}").unwrap();
    assert_eq!(run(&["belief", "--state-json", path_str(&junk)]).status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["belief", "--state-json", path_str(&missing)]).status.code(), Some(3));
    let o = run(&["belief", "--state-json", &data("worked_example.json"), "--viewer", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn oracle_check_reports_every_trial() {
    let args = [
        "oracle-check",
        "--colors",
        "2",
        "--ranks",
        "3",
        "--hand-size",
        "3",
        "--trials",
        "100",
        "--seed",
        "1",
    ];
    let o = run(&args);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("trial")).count(), 100);
    assert!(text.contains("100/100 exact passes"), "{text}");
    assert_eq!(text, stdout(&run(&args)));
}

#[test]
fn oracle_check_degenerate_pool_is_not_a_failure() {
    let o = run(&[
        "oracle-check",
        "--colors",
        "1",
        "--ranks",
        "1",
        "--counts",
        "1",
        "--hand-size",
        "3",
        "--trials",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("0/5 exact passes, 5 with no consistent hands, 0 failures"), "{text}");
}

#[test]
fn oracle_check_budget_exit_code() {
    let o = run(&["oracle-check", "--colors", "3", "--ranks", "3", "--budget", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

fn write_jsonl(path: &Path, turns: &[TurnRecord]) {
    let text: String = turns
        .iter()
        .map(|t| serde_json::to_string(t).unwrap() + "\n")
        .collect();
    std::fs::write(path, text).unwrap();
}

fn trace_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn reward_trace_recomputes_simulated_logs() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("t.jsonl");
    for players in ["2", "4"] {
        let (_, o) = simulate_to(
            &dir,
            "s.csv",
            &[
                "--players",
                players,
                "--episodes",
                "3",
                "--policy",
                "belief_greedy",
                "--belief-level",
                "1",
                "--method",
                "mc",
                "--samples",
                "40",
                "--trajectory-out",
                path_str(&traj),
            ],
        );
        assert_eq!(o.status.code(), Some(0));
        let o = run(&["reward-trace", "--trajectory", path_str(&traj), "--recompute"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        for row in trace_rows(&stdout(&o)) {
            assert!(row[6].parse::<f64>().unwrap() <= 1e-9);
        }
    }
}

#[test]
fn reward_trace_static_beliefs_are_zero() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("t.jsonl");
    let mut turns = hanabi_tom::harness::run_episode(&EpisodeConfig::self_play(2, 3, PolicySpec::Random))
        .unwrap()
        .turns;
    turns.retain(|t| !t.action.is_hint());
    for t in &mut turns {
        t.beliefs_t1 = t.beliefs_t.clone();
        t.intrinsic = 0.0;
    }
    assert!(!turns.is_empty());
    write_jsonl(&traj, &turns);
    let o = run(&["reward-trace", "--trajectory", path_str(&traj), "--recompute"]);
    assert_eq!(o.status.code(), Some(0));
    for row in trace_rows(&stdout(&o)) {
        assert_eq!(row[4].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[5].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn reward_trace_hint_on_worked_example() {
    // Player 0 tells player 1 which cards are red (their R1 R1). From player
    // 0's side, player 1's estimated pool is everything player 0 cannot see,
    // plus player 1's hand, minus player 0's MAP hand R3 G3 R4 B1 B2: 39
    // cards, two of them R1, and five red (R1 R1 R3 R4 R5). Each red slot
    // moves from sqrt(1 - 2/39) to sqrt(1 - 2/5).
    let state = fixtures::worked_example();
    let cfg = EpisodeConfig::self_play(2, 0, PolicySpec::Random);
    let hint = Action::HintColor {
        target_player: 1,
        color: Color::R,
    };
    let (record, _) = record_turn(&state, hint, &cfg, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    let expected = 2.0 * ((37.0f64 / 39.0).sqrt() - (3.0f64 / 5.0).sqrt());

    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("hint.jsonl");
    write_jsonl(&traj, &[record]);
    let o = run(&["reward-trace", "--trajectory", path_str(&traj), "--recompute"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = trace_rows(&stdout(&o));
    let logged: f64 = rows[0][4].parse().unwrap();
    assert!(logged > 0.0);
    assert!((logged - expected).abs() < 1e-12, "{logged} vs {expected}");
}

#[test]
fn reward_trace_flags_tampered_logs() {
    let dir = TempDir::new().unwrap();
    let traj = dir.path().join("t.jsonl");
    let mut turns = hanabi_tom::harness::run_episode(&EpisodeConfig::self_play(2, 8, PolicySpec::belief_greedy()))
        .unwrap()
        .turns;
    turns[0].intrinsic += 1e-6;
    write_jsonl(&traj, &turns);
    let o = run(&["reward-trace", "--trajectory", path_str(&traj), "--recompute"]);
    assert_eq!(o.status.code(), Some(4));
    // Without recomputation the table is still printed.
    assert_eq!(run(&["reward-trace", "--trajectory", path_str(&traj)]).status.code(), Some(0));

    std::fs::write(&traj, "{not json}\n").unwrap();
    assert_eq!(run(&["reward-trace", "--trajectory", path_str(&traj)]).status.code(), Some(3));
    assert!(Trajectory::from_jsonl("{}").is_err());
}

#[test]
fn log_level_variable_is_honoured() {
    let o = bin()
        .args(["oracle-check", "--trials", "1"])
        .env("HANABI_TOM_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let quiet = bin()
        .args(["simulate", "--episodes", "1"])
        .env("HANABI_TOM_LOG", "error")
        .output()
        .unwrap();
    assert!(quiet.stderr.is_empty());
    let chatty = bin()
        .args(["simulate", "--episodes", "1"])
        .env("HANABI_TOM_LOG", "info")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&chatty.stderr).contains("simulating"));
}
