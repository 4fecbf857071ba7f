use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::external::ExternalPolicy;
use crate::belief::{nested_belief, slot_marginals_b0, BeliefMatrix, NestedMethod};
use crate::encoding::EncodedObservation;
use crate::error::HarnessError;
use crate::game::{Action, Observation};
use crate::reward::{intrinsic_reward, RewardConfig};

/// Everything a policy sees when choosing a move.
pub struct Decision<'a> {
    pub observation: &'a Observation,
    pub encoded: &'a EncodedObservation,
    pub legal: &'a [Action],
}

pub trait Policy: Send {
    fn act(&mut self, decision: &Decision<'_>) -> Result<Action, HarnessError>;
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreedyThresholds {
    pub play_p: f64,
    pub discard_p: f64,
}

impl Default for GreedyThresholds {
    fn default() -> Self {
        GreedyThresholds {
            play_p: 0.8,
            discard_p: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicySpec {
    Random,
    BeliefGreedy {
        #[serde(flatten)]
        thresholds: GreedyThresholds,
    },
    External {
        command: String,
        #[serde(default)]
        args: Vec<String>,
    },
}

impl PolicySpec {
    pub fn belief_greedy() -> PolicySpec {
        PolicySpec::BeliefGreedy {
            thresholds: GreedyThresholds::default(),
        }
    }

    /// Short label for stats tables.
    pub fn label(&self) -> String {
        match self {
            PolicySpec::Random => "random".into(),
            PolicySpec::BeliefGreedy { .. } => "belief_greedy".into(),
            PolicySpec::External { command, .. } => format!("external:{command}"),
        }
    }

    /// Instantiates the policy for one seat. `seed` drives any randomness the
    /// policy itself uses.
    pub fn build(&self, seed: u64, method: NestedMethod, reward: RewardConfig) -> Result<Box<dyn Policy>, HarnessError> {
        Ok(match self {
            PolicySpec::Random => Box::new(RandomPolicy::new(seed)),
            PolicySpec::BeliefGreedy { thresholds } => {
                Box::new(BeliefGreedyPolicy::new(*thresholds, method, reward, seed))
            }
            PolicySpec::External { command, args } => Box::new(ExternalPolicy::spawn(command, args)?),
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PolicySpec {
    type Err = HarnessError;

    /// `random`, `belief_greedy`, or `external:<command> [args..]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(PolicySpec::Random),
            "belief_greedy" | "belief-greedy" => Ok(PolicySpec::belief_greedy()),
            _ => {
                let rest = s
                    .strip_prefix("external:")
                    .ok_or_else(|| HarnessError::Config(format!("unknown policy {s:?}")))?;
                let mut words = rest.split_whitespace().map(String::from);
                let command = words
                    .next()
                    .ok_or_else(|| HarnessError::Config("external policy needs a command".into()))?;
                Ok(PolicySpec::External {
                    command,
                    args: words.collect(),
                })
            }
        }
    }
}

pub struct RandomPolicy {
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(seed: u64) -> RandomPolicy {
        RandomPolicy {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Policy for RandomPolicy {
    fn act(&mut self, decision: &Decision<'_>) -> Result<Action, HarnessError> {
        decision
            .legal
            .choose(&mut self.rng)
            .copied()
            .ok_or_else(|| HarnessError::Config("no legal actions".into()))
    }
}

/// Plays confident cards, otherwise gives the hint that most improves a
/// teammate's estimated belief, otherwise discards the likeliest dead card.
pub struct BeliefGreedyPolicy {
    thresholds: GreedyThresholds,
    method: NestedMethod,
    reward: RewardConfig,
    rng: ChaCha8Rng,
}

impl BeliefGreedyPolicy {
    pub fn new(thresholds: GreedyThresholds, method: NestedMethod, reward: RewardConfig, seed: u64) -> BeliefGreedyPolicy {
        BeliefGreedyPolicy {
            thresholds,
            method,
            reward,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

/// Probability mass each slot puts on cards matching `pred`.
fn slot_mass(b0: &BeliefMatrix, pred: impl Fn(crate::card::Card) -> bool) -> Vec<f64> {
    b0.rows()
        .iter()
        .map(|row| {
            crate::card::Card::all()
                .filter(|&c| pred(c))
                .map(|c| row[c.index()])
                .sum()
        })
        .collect()
}

/// First index holding the maximum.
fn argmax(values: &[f64]) -> Option<usize> {
    values
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((i, v)),
        })
        .map(|(i, _)| i)
}

/// Nested beliefs for every teammate of the viewer.
pub fn teammate_beliefs<R: Rng + ?Sized>(
    obs: &Observation,
    method: NestedMethod,
    rng: &mut R,
) -> Result<BTreeMap<usize, BeliefMatrix>, HarnessError> {
    obs.others_hands
        .iter()
        .map(|h| Ok((h.player, nested_belief(obs, h.player, method, rng)?)))
        .collect()
}

/// Communication reward the viewer would earn from `hint`, judged from the
/// viewer's own observation.
pub fn simulated_hint_reward<R: Rng + ?Sized>(
    obs: &Observation,
    hint: &Action,
    before: &BTreeMap<usize, BeliefMatrix>,
    method: NestedMethod,
    cfg: &RewardConfig,
    rng: &mut R,
) -> Result<f64, HarnessError> {
    let Some(after_obs) = obs.with_hint(hint) else {
        return Ok(f64::NEG_INFINITY);
    };
    let after = teammate_beliefs(&after_obs, method, rng)?;
    let hands = obs.others_hands.iter().map(|h| (h.player, h.cards())).collect();
    Ok(intrinsic_reward(before, &after, &hands, cfg)?)
}

impl BeliefGreedyPolicy {
    /// Scores every legal hint; the result lines up with the hints in `legal`.
    pub fn hint_scores(&mut self, obs: &Observation, legal: &[Action]) -> Result<Vec<(Action, f64)>, HarnessError> {
        let before = teammate_beliefs(obs, self.method, &mut self.rng)?;
        legal
            .iter()
            .filter(|a| a.is_hint())
            .map(|a| {
                let r = simulated_hint_reward(obs, a, &before, self.method, &self.reward, &mut self.rng)?;
                Ok((*a, r))
            })
            .collect()
    }
}

impl Policy for BeliefGreedyPolicy {
    fn act(&mut self, decision: &Decision<'_>) -> Result<Action, HarnessError> {
        let obs = decision.observation;
        let legal = decision.legal;
        let b0 = slot_marginals_b0(obs)?;

        let playable = slot_mass(&b0, |c| obs.is_playable(c));
        if let Some(k) = argmax(&playable) {
            if playable[k] > self.thresholds.play_p && legal.contains(&Action::Play { slot: k }) {
                return Ok(Action::Play { slot: k });
            }
        }

        if obs.info_tokens > 0 {
            let scores = self.hint_scores(obs, legal)?;
            let values: Vec<f64> = scores.iter().map(|(_, r)| *r).collect();
            if let Some(i) = argmax(&values) {
                return Ok(scores[i].0);
            }
        }

        let dead = slot_mass(&b0, |c| obs.is_dead(c));
        if let Some(k) = argmax(&dead) {
            let discard = Action::Discard { slot: k };
            if dead[k] >= self.thresholds.discard_p && legal.contains(&discard) {
                return Ok(discard);
            }
        }

        // Nothing above: play the likeliest playable card.
        let fallback = argmax(&playable).map(|slot| Action::Play { slot });
        fallback
            .filter(|a| legal.contains(a))
            .or_else(|| legal.first().copied())
            .ok_or_else(|| HarnessError::Config("no legal actions".into()))
    }
}
