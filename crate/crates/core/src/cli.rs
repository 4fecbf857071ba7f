//! `hanabi-tom` command line.
//!
//! Exit codes: 0 success, 2 bad flags, 3 bad or unusable data, 4 a checked
//! property failed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::belief::{nested_belief, slot_marginals_b0, BeliefMatrix, NestedMethod};
use crate::card::Card;
use crate::encoding::BeliefLevel;
use crate::error::{BeliefError, HarnessError};
use crate::game::{observe, GameState, SlotKnowledge};
use crate::harness::{run_batch_with, stats_csv, EpisodeConfig, PolicySpec, Trajectory};
use crate::oracle::{oracle_check, OracleConfig, TrialOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_PROPERTY: i32 = 4;

/// Environment variable holding the log level.
pub const LOG_ENV: &str = "HANABI_TOM_LOG";

pub const RECOMPUTE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(name = "hanabi-tom", version, about = "Hanabi belief modelling toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Self-play a batch of games and report score statistics.
    Simulate(SimulateArgs),
    /// Print belief matrices for a saved game state.
    Belief(BeliefArgs),
    /// Check that exact hand probabilities sum to one on small decks.
    OracleCheck(OracleArgs),
    /// Tabulate intrinsic rewards from a trajectory log.
    RewardTrace(RewardTraceArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Map,
    Mc,
}

impl MethodArg {
    fn resolve(self, samples: usize) -> NestedMethod {
        match self {
            MethodArg::Map => NestedMethod::Map,
            MethodArg::Mc => NestedMethod::MonteCarlo { samples },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=5))]
    pub players: u8,
    #[arg(long, default_value_t = 1000)]
    pub episodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// random, belief_greedy, or external:<command> [args]
    #[arg(long, default_value = "random")]
    pub policy: PolicySpec,
    #[arg(long, default_value_t = 2.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub belief_level: u8,
    #[arg(long, value_enum, default_value_t = MethodArg::Map)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Stats CSV path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write every turn of every episode as JSONL.
    #[arg(long)]
    pub trajectory_out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub parallelism: usize,
}

#[derive(Debug, Args)]
pub struct BeliefArgs {
    #[arg(long)]
    pub state_json: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub viewer: usize,
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub level: u8,
    #[arg(long, value_enum, default_value_t = MethodArg::Map)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 2)]
    pub colors: usize,
    #[arg(long, default_value_t = 3)]
    pub ranks: usize,
    /// Copies per rank, lowest rank first.
    #[arg(long, default_value = "2,1,1", value_delimiter = ',')]
    pub counts: Vec<u8>,
    #[arg(long, default_value_t = 3)]
    pub hand_size: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Largest number of hands to enumerate per trial.
    #[arg(long, default_value_t = 1_000_000)]
    pub budget: u128,
}

#[derive(Debug, Args)]
pub struct RewardTraceArgs {
    #[arg(long)]
    pub trajectory: PathBuf,
    /// Recompute rewards from the logged beliefs and compare.
    #[arg(long)]
    pub recompute: bool,
}

/// A failure carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(msg: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_USAGE,
            message: msg.into(),
        }
    }

    fn data(msg: impl ToString) -> CliError {
        CliError {
            code: EXIT_DATA,
            message: msg.to_string(),
        }
    }

    fn property(msg: impl Into<String>) -> CliError {
        CliError {
            code: EXIT_PROPERTY,
            message: msg.into(),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) => CliError::usage(e.to_string()),
            other => CliError::data(other),
        }
    }
}

impl From<BeliefError> for CliError {
    fn from(e: BeliefError) -> Self {
        CliError::data(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e)
    }
}

/// Initializes logging from [`LOG_ENV`]; repeated calls are harmless.
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "error");
    let _ = env_logger::Builder::from_env(env).try_init();
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Simulate(a) => simulate(&a, out),
        Command::Belief(a) => belief(&a, out),
        Command::OracleCheck(a) => oracle(&a, out),
        Command::RewardTrace(a) => reward_trace(&a, out),
    }
}

fn simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.episodes == 0 {
        return Err(CliError::usage("--episodes must be at least 1"));
    }
    if a.method == MethodArg::Mc && a.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let mut cfg = EpisodeConfig::self_play(a.players as usize, a.seed, a.policy.clone());
    cfg.level = BeliefLevel::from_index(a.belief_level).expect("range checked by clap");
    cfg.method = a.method.resolve(a.samples);
    cfg.reward.beta = a.beta;
    cfg.reward.validate().map_err(|e| CliError::usage(e.to_string()))?;

    log::info!("simulating {} episodes: {:?}", a.episodes, cfg);
    let keep = a.trajectory_out.is_some();
    let result = run_batch_with(&cfg, a.episodes, a.parallelism, keep)?;
    let csv = stats_csv(&cfg, &result.stats);
    if let Some(path) = &a.trajectory_out {
        let mut text = String::new();
        for t in &result.trajectories {
            text.push_str(&t.to_jsonl()?);
        }
        fs::write(path, text)?;
    }
    let s = &result.stats;
    writeln!(out, "median {:.1}  mean {:.4}  sem {:.4}  (N={})", s.median, s.mean, s.sem, s.n())?;
    match &a.out {
        Some(path) => fs::write(path, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn row_json(row: &[f64]) -> serde_json::Value {
    let probs: serde_json::Map<String, serde_json::Value> = Card::all()
        .zip(row)
        .filter(|(_, &p)| p > 0.0)
        .map(|(c, &p)| (c.to_string(), json!(p)))
        .collect();
    serde_json::Value::Object(probs)
}

fn matrix_json(m: &BeliefMatrix, knowledge: &[SlotKnowledge]) -> serde_json::Value {
    let rows: Vec<_> = m
        .rows()
        .iter()
        .enumerate()
        .map(|(k, row)| {
            json!({
                "slot": k,
                "knowledge": knowledge.get(k).map(|h| h.to_string()),
                "probs": row_json(row),
            })
        })
        .collect();
    json!(rows)
}

fn matrix_csv(out: &mut String, label: &str, m: &BeliefMatrix) {
    for (k, row) in m.rows().iter().enumerate() {
        write!(out, "{label},{k}").unwrap();
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
}

/// Own-hand belief of `viewer`, plus the nested belief about every teammate
/// when `level` is 1.
pub struct BeliefReport {
    pub own: BeliefMatrix,
    pub nested: BTreeMap<usize, BeliefMatrix>,
}

pub fn belief_report(
    state: &GameState,
    viewer: usize,
    level: BeliefLevel,
    method: NestedMethod,
    seed: u64,
) -> Result<BeliefReport, HarnessError> {
    let obs = observe(state, viewer)?;
    let own = slot_marginals_b0(&obs)?;
    let mut nested = BTreeMap::new();
    if level == BeliefLevel::Nested {
        if obs.others_hands.is_empty() {
            return Err(BeliefError::InvalidTarget(viewer).into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for h in &obs.others_hands {
            nested.insert(h.player, nested_belief(&obs, h.player, method, &mut rng)?);
        }
    }
    Ok(BeliefReport { own, nested })
}

fn belief(a: &BeliefArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if a.method == MethodArg::Mc && a.samples == 0 {
        return Err(CliError::usage("--samples must be at least 1"));
    }
    let text = fs::read_to_string(&a.state_json)?;
    let state: GameState = serde_json::from_str(&text).map_err(CliError::data)?;
    if a.viewer >= state.num_players || state.hands.len() != state.num_players {
        return Err(CliError::data(format!(
            "viewer {} not in a {}-player state",
            a.viewer, state.num_players
        )));
    }
    let level = BeliefLevel::from_index(a.level).expect("range checked by clap");
    let report = belief_report(&state, a.viewer, level, a.method.resolve(a.samples), a.seed)?;
    let knowledge = state.hands[a.viewer].knowledge();
    match a.format {
        FormatArg::Json => {
            let mut v = json!({
                "viewer": a.viewer,
                "level": a.level,
                "own": matrix_json(&report.own, &knowledge),
            });
            if level == BeliefLevel::Nested {
                let nested: serde_json::Map<String, serde_json::Value> = report
                    .nested
                    .iter()
                    .map(|(j, m)| (j.to_string(), matrix_json(m, &state.hands[*j].knowledge())))
                    .collect();
                v["nested"] = serde_json::Value::Object(nested);
            }
            writeln!(out, "{}", serde_json::to_string_pretty(&v).map_err(CliError::data)?)?;
        }
        FormatArg::Csv => {
            let mut text = String::from("matrix,slot");
            for c in Card::all() {
                write!(text, ",{c}").unwrap();
            }
            text.push('\n');
            matrix_csv(&mut text, "own", &report.own);
            for (j, m) in &report.nested {
                matrix_csv(&mut text, &format!("nested{j}"), m);
            }
            out.write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn knowledge_label(k: &[SlotKnowledge]) -> String {
    k.iter().map(|h| h.to_string()).collect::<Vec<_>>().join(" ")
}

fn oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = OracleConfig {
        colors: a.colors,
        ranks: a.ranks,
        counts: a.counts.clone(),
        hand_size: a.hand_size,
        trials: a.trials,
        seed: a.seed,
        budget: a.budget,
    };
    cfg.validate().map_err(|e| CliError::usage(e.to_string()))?;
    let report = oracle_check(&cfg)?;
    for t in &report.trials {
        let label = match t.outcome {
            TrialOutcome::Pass => "pass",
            TrialOutcome::NoConsistentHands => "empty",
            TrialOutcome::Fail => "FAIL",
        };
        writeln!(
            out,
            "trial {:>4}: {label:<5} pool={} knowledge=[{}] hands={} consistent={} sum={}",
            t.index,
            t.pool.total(),
            knowledge_label(&t.knowledge),
            t.hands_enumerated,
            t.consistent_hands,
            t.sum
        )?;
    }
    let (pass, empty, fail) = (
        report.count(TrialOutcome::Pass),
        report.count(TrialOutcome::NoConsistentHands),
        report.count(TrialOutcome::Fail),
    );
    writeln!(
        out,
        "{pass}/{} exact passes, {empty} with no consistent hands, {fail} failures",
        report.trials.len()
    )?;
    if fail > 0 {
        return Err(CliError::property(format!("{fail} trials did not sum to 1")));
    }
    Ok(())
}

fn reward_trace(a: &RewardTraceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.trajectory)?;
    let turns = Trajectory::from_jsonl(&text).map_err(CliError::data)?;
    if a.recompute {
        writeln!(out, "seed,turn,actor,action,intrinsic,recomputed,deviation")?;
    } else {
        writeln!(out, "seed,turn,actor,action,intrinsic")?;
    }
    let (mut logged_total, mut recomputed_total, mut max_dev) = (0.0, 0.0, 0.0f64);
    for t in &turns {
        logged_total += t.intrinsic;
        if a.recompute {
            let r = t.recompute_intrinsic().map_err(CliError::data)?;
            let dev = (r - t.intrinsic).abs();
            recomputed_total += r;
            max_dev = max_dev.max(dev);
            writeln!(
                out,
                "{},{},{},{},{},{},{:e}",
                t.seed, t.turn, t.actor, t.action, t.intrinsic, r, dev
            )?;
        } else {
            writeln!(out, "{},{},{},{},{}", t.seed, t.turn, t.actor, t.action, t.intrinsic)?;
        }
    }
    if a.recompute {
        eprintln!(
            "{} turns, logged total {logged_total}, recomputed total {recomputed_total}, max deviation {max_dev:e}",
            turns.len()
        );
        if max_dev > RECOMPUTE_TOLERANCE || (logged_total - recomputed_total).abs() > RECOMPUTE_TOLERANCE {
            return Err(CliError::property(format!(
                "recomputed intrinsic rewards deviate by {max_dev:e}"
            )));
        }
    }
    Ok(())
}
