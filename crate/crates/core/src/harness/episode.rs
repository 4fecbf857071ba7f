use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::batch::derive_seed;
use super::policy::{teammate_beliefs, Decision, PolicySpec};
use crate::belief::{map_hand, BeliefMatrix, NestedMethod};
use crate::card::Card;
use crate::encoding::{encode, BeliefLevel, EncodeOptions, TeammateSelection};
use crate::error::{HarnessError, RewardError};
use crate::game::{
    apply_action, legal_actions, new_game_with, observe, score_and_terminal, Action, BombScoring, GameConfig,
    GameEvent, GameState, Observation, TerminalCause, MAX_PLAYERS, MIN_PLAYERS,
};
use crate::reward::{combined_reward, teammate_gains, RewardConfig};

pub const DEFAULT_GAMMA: f64 = 0.99;

// Stream indices for seeds derived from the episode seed.
const BELIEF_STREAM: u64 = 1;
const POLICY_STREAM: u64 = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeConfig {
    pub num_players: usize,
    pub seed: u64,
    pub level: BeliefLevel,
    pub method: NestedMethod,
    pub reward: RewardConfig,
    /// One entry per seat, or a single entry used for every seat.
    pub policies: Vec<PolicySpec>,
    pub gamma: f64,
    #[serde(default)]
    pub bomb_scoring: BombScoring,
    /// Store each actor's observation in the turn records.
    #[serde(default)]
    pub record_observations: bool,
}

impl EpisodeConfig {
    /// Self-play with one policy in every seat.
    pub fn self_play(num_players: usize, seed: u64, policy: PolicySpec) -> EpisodeConfig {
        EpisodeConfig {
            num_players,
            seed,
            level: BeliefLevel::Own,
            method: NestedMethod::Map,
            reward: RewardConfig::default(),
            policies: vec![policy],
            gamma: DEFAULT_GAMMA,
            bomb_scoring: BombScoring::Zero,
            record_observations: false,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !(MIN_PLAYERS..=MAX_PLAYERS).contains(&self.num_players) {
            return Err(HarnessError::Config(format!("{} players", self.num_players)));
        }
        if self.policies.len() != 1 && self.policies.len() != self.num_players {
            return Err(HarnessError::Config(format!(
                "{} policies for {} seats",
                self.policies.len(),
                self.num_players
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(HarnessError::Config(format!("gamma {}", self.gamma)));
        }
        self.reward.validate()?;
        Ok(())
    }

    pub fn policy_for(&self, seat: usize) -> &PolicySpec {
        if self.policies.len() == 1 {
            &self.policies[0]
        } else {
            &self.policies[seat]
        }
    }

    fn encode_options(&self) -> EncodeOptions {
        EncodeOptions {
            level: self.level,
            method: self.method,
            teammates: TeammateSelection::Next,
        }
    }
}

/// One logged turn. Beliefs are the actor's estimates of each teammate's
/// own-hand belief before and after the action.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurnRecord {
    /// Seed of the episode this turn belongs to.
    pub seed: u64,
    pub turn: u32,
    pub actor: usize,
    pub action: Action,
    pub state_hash: String,
    pub next_state_hash: String,
    pub extrinsic: f64,
    pub intrinsic: f64,
    pub combined: f64,
    pub teammate_gains: BTreeMap<usize, f64>,
    pub beliefs_t: BTreeMap<usize, BeliefMatrix>,
    pub beliefs_t1: BTreeMap<usize, BeliefMatrix>,
    pub true_hands: BTreeMap<usize, Vec<Card>>,
    /// Actor's MAP own hand before and after the action.
    pub map_before: Vec<Card>,
    pub map_after: Vec<Card>,
    pub events: Vec<GameEvent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<Observation>,
    pub score: u32,
    pub terminal: bool,
    pub reward: RewardConfig,
    /// Discounted sum of combined rewards from this turn on.
    pub return_to_go: f64,
}

impl TurnRecord {
    /// Intrinsic reward re-derived from the logged beliefs and hands.
    pub fn recompute_intrinsic(&self) -> Result<f64, RewardError> {
        let gains = teammate_gains(&self.beliefs_t, &self.beliefs_t1, &self.true_hands, &self.reward)?;
        Ok(gains.values().copied().reduce(f64::max).unwrap_or(0.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub config: EpisodeConfig,
    pub turns: Vec<TurnRecord>,
    pub final_score: u32,
    pub cause: TerminalCause,
}

impl Trajectory {
    /// One JSON object per turn.
    pub fn to_jsonl(&self) -> Result<String, HarnessError> {
        let mut out = String::new();
        for t in &self.turns {
            out.push_str(&serde_json::to_string(t)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_jsonl(text: &str) -> Result<Vec<TurnRecord>, HarnessError> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| Ok(serde_json::from_str(l)?))
            .collect()
    }
}

/// Applies `action` in `state` and logs the turn from the actor's point of
/// view. Returns the record and the successor state. `return_to_go` is left
/// at zero.
pub fn record_turn<R: Rng + ?Sized>(
    state: &GameState,
    action: Action,
    cfg: &EpisodeConfig,
    belief_rng: &mut R,
) -> Result<(TurnRecord, GameState), HarnessError> {
    let actor = state.current_player;
    let obs = observe(state, actor)?;
    let beliefs_t = teammate_beliefs(&obs, cfg.method, belief_rng)?;
    let map_before = map_hand(&obs)?;
    let (next, events) = apply_action(state, action)?;
    let next_obs = observe(&next, actor)?;
    let beliefs_t1 = teammate_beliefs(&next_obs, cfg.method, belief_rng)?;
    let map_after = map_hand(&next_obs)?;
    let true_hands: BTreeMap<usize, Vec<Card>> = obs.others_hands.iter().map(|h| (h.player, h.cards())).collect();

    let gains = teammate_gains(&beliefs_t, &beliefs_t1, &true_hands, &cfg.reward)?;
    let intrinsic = gains.values().copied().reduce(f64::max).unwrap_or(0.0);
    let outcome = score_and_terminal(&next);
    let extrinsic = outcome.score as f64 - score_and_terminal(state).score as f64;
    let record = TurnRecord {
        seed: cfg.seed,
        turn: state.turn,
        actor,
        action,
        state_hash: state.state_hash(),
        next_state_hash: next.state_hash(),
        extrinsic,
        intrinsic,
        combined: combined_reward(extrinsic, intrinsic, &cfg.reward),
        teammate_gains: gains,
        beliefs_t,
        beliefs_t1,
        true_hands,
        map_before,
        map_after,
        events,
        observation: cfg.record_observations.then_some(obs),
        score: outcome.score,
        terminal: outcome.terminal,
        reward: cfg.reward,
        return_to_go: 0.0,
    };
    Ok((record, next))
}

/// Plays one game to the end, logging every turn.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<Trajectory, HarnessError> {
    cfg.validate()?;
    let game_cfg = GameConfig {
        bomb_scoring: cfg.bomb_scoring,
        ..GameConfig::standard(cfg.num_players)
    };
    let mut state = new_game_with(cfg.num_players, cfg.seed, game_cfg)?;
    let mut belief_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, BELIEF_STREAM));
    let mut policies = (0..cfg.num_players)
        .map(|seat| {
            let seed = derive_seed(cfg.seed, POLICY_STREAM + seat as u64);
            cfg.policy_for(seat).build(seed, cfg.method, cfg.reward)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let opts = cfg.encode_options();

    let mut turns = Vec::new();
    let mut outcome = score_and_terminal(&state);
    while !outcome.terminal {
        let actor = state.current_player;
        let obs = observe(&state, actor)?;
        let legal = legal_actions(&state);
        let encoded = encode(&obs, &opts, &mut belief_rng)?;
        let action = policies[actor].act(&Decision {
            observation: &obs,
            encoded: &encoded,
            legal: &legal,
        })?;
        if !legal.contains(&action) {
            return Err(HarnessError::Protocol(format!("policy chose illegal action {action}")));
        }

        let (record, next) = record_turn(&state, action, cfg, &mut belief_rng)?;
        let next_outcome = score_and_terminal(&next);
        turns.push(record);
        state = next;
        outcome = next_outcome;
    }

    let mut g = 0.0;
    for t in turns.iter_mut().rev() {
        g = t.combined + cfg.gamma * g;
        t.return_to_go = g;
    }
    Ok(Trajectory {
        config: cfg.clone(),
        turns,
        final_score: outcome.score,
        cause: outcome.cause,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::new_game;

    fn random_cfg(seed: u64) -> EpisodeConfig {
        EpisodeConfig::self_play(2, seed, PolicySpec::Random)
    }

    #[test]
    fn same_seed_same_trajectory() {
        let a = run_episode(&random_cfg(9)).unwrap().to_jsonl().unwrap();
        let b = run_episode(&random_cfg(9)).unwrap().to_jsonl().unwrap();
        assert_eq!(a, b);
        assert_ne!(a, run_episode(&random_cfg(10)).unwrap().to_jsonl().unwrap());
    }

    #[test]
    fn replay_reproduces_hashes() {
        let traj = run_episode(&EpisodeConfig::self_play(3, 4, PolicySpec::belief_greedy())).unwrap();
        let mut s = new_game(3, 4).unwrap();
        for t in &traj.turns {
            assert_eq!(s.state_hash(), t.state_hash);
            s = apply_action(&s, t.action).unwrap().0;
            assert_eq!(s.state_hash(), t.next_state_hash);
        }
        assert!(s.is_terminal());
        assert_eq!(score_and_terminal(&s).score, traj.final_score);
    }

    #[test]
    fn zero_beta_combined_equals_extrinsic() {
        let traj = run_episode(&EpisodeConfig::self_play(2, 1, PolicySpec::belief_greedy())).unwrap();
        assert!(traj.final_score <= 25);
        for t in &traj.turns {
            assert_eq!(t.combined, t.extrinsic);
        }
    }

    #[test]
    fn beta_scales_intrinsic_and_discounts_returns() {
        let mut cfg = EpisodeConfig::self_play(2, 2, PolicySpec::belief_greedy());
        cfg.reward = RewardConfig::with_beta(2.0);
        let traj = run_episode(&cfg).unwrap();
        assert!(traj.turns.iter().any(|t| t.intrinsic > 0.0));
        for t in &traj.turns {
            assert!((t.combined - (t.extrinsic + 2.0 * t.intrinsic)).abs() < 1e-12);
        }
        let n = traj.turns.len();
        let last = &traj.turns[n - 1];
        assert_eq!(last.return_to_go, last.combined);
        let prev = &traj.turns[n - 2];
        assert!((prev.return_to_go - (prev.combined + 0.99 * last.return_to_go)).abs() < 1e-12);
    }

    #[test]
    fn jsonl_round_trips() {
        let mut cfg = random_cfg(3);
        cfg.record_observations = true;
        let traj = run_episode(&cfg).unwrap();
        let text = traj.to_jsonl().unwrap();
        assert_eq!(text.lines().count(), traj.turns.len());
        let back = Trajectory::from_jsonl(&text).unwrap();
        assert_eq!(back, traj.turns);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut cfg = random_cfg(0);
        cfg.num_players = 6;
        assert!(run_episode(&cfg).is_err());
        let mut cfg = random_cfg(0);
        cfg.policies = vec![PolicySpec::Random; 3];
        assert!(run_episode(&cfg).is_err());
    }

    #[test]
    fn nested_level_runs_with_mc() {
        let mut cfg = random_cfg(6);
        cfg.level = BeliefLevel::Nested;
        cfg.method = NestedMethod::MonteCarlo { samples: 50 };
        let traj = run_episode(&cfg).unwrap();
        assert!(traj.final_score <= 25);
    }
}
