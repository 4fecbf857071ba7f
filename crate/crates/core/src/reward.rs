//! Communication reward: how much an action moves teammates' estimated
//! beliefs toward their true hands, measured with a Wasserstein distance.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::belief::BeliefMatrix;
use crate::card::{Card, NUM_CARD_TYPES};
use crate::error::RewardError;

const ROW_SUM_TOLERANCE: f64 = 1e-6;

/// Point mass on one card type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OneHot(Card);

impl OneHot {
    pub fn new(card: Card) -> OneHot {
        OneHot(card)
    }

    pub fn card(self) -> Card {
        self.0
    }

    pub fn to_vec(self) -> [f64; NUM_CARD_TYPES] {
        let mut v = [0.0; NUM_CARD_TYPES];
        v[self.0.index()] = 1.0;
        v
    }
}

/// Distance between card types underlying the transport cost.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundMetric {
    /// 0 between identical cards, 1 otherwise.
    #[default]
    Discrete,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub p: f64,
    pub beta: f64,
    #[serde(default)]
    pub ground_metric: GroundMetric,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            p: 2.0,
            beta: 0.0,
            ground_metric: GroundMetric::Discrete,
        }
    }
}

impl RewardConfig {
    pub fn with_beta(beta: f64) -> RewardConfig {
        RewardConfig {
            beta,
            ..RewardConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), RewardError> {
        if !self.p.is_finite() || self.p < 1.0 {
            return Err(RewardError::InvalidOrder(self.p));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(RewardError::InvalidBeta(self.beta));
        }
        Ok(())
    }
}

/// `W_p` between a point mass on the true card and a belief row.
///
/// Under the discrete metric every unit of mass not already on the true card
/// moves at cost 1, so `W_p = (1 - b(truth))^(1/p)`.
pub fn slot_distance(truth: OneHot, marginal: &[f64], cfg: &RewardConfig) -> Result<f64, RewardError> {
    cfg.validate()?;
    if marginal.len() != NUM_CARD_TYPES || marginal.iter().any(|v| !v.is_finite() || *v < -ROW_SUM_TOLERANCE) {
        return Err(RewardError::InvalidEntry);
    }
    let sum: f64 = marginal.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
        return Err(RewardError::MalformedMarginal { sum });
    }
    match cfg.ground_metric {
        GroundMetric::Discrete => {
            let moved = (1.0 - marginal[truth.card().index()]).clamp(0.0, 1.0);
            Ok(moved.powf(1.0 / cfg.p))
        }
    }
}

/// Summed distance decrease over the slots teammate `j` holds at both times.
pub fn teammate_gain(
    before: &BeliefMatrix,
    after: &BeliefMatrix,
    hand: &[Card],
    cfg: &RewardConfig,
) -> Result<f64, RewardError> {
    let live = hand.len().min(before.num_slots()).min(after.num_slots());
    let mut gain = 0.0;
    for (k, &card) in hand.iter().enumerate().take(live) {
        let truth = OneHot::new(card);
        gain += slot_distance(truth, before.row(k), cfg)? - slot_distance(truth, after.row(k), cfg)?;
    }
    Ok(gain)
}

/// Per-teammate gains, keyed like the belief maps.
pub fn teammate_gains(
    before: &BTreeMap<usize, BeliefMatrix>,
    after: &BTreeMap<usize, BeliefMatrix>,
    true_hands: &BTreeMap<usize, Vec<Card>>,
    cfg: &RewardConfig,
) -> Result<BTreeMap<usize, f64>, RewardError> {
    if let Some(&j) = after.keys().find(|j| !before.contains_key(j)) {
        return Err(RewardError::KeyMismatch(j));
    }
    before
        .iter()
        .map(|(&j, b)| {
            let a = after.get(&j).ok_or(RewardError::KeyMismatch(j))?;
            let hand = true_hands.get(&j).ok_or(RewardError::MissingHand(j))?;
            Ok((j, teammate_gain(b, a, hand, cfg)?))
        })
        .collect()
}

/// Largest per-teammate decrease in distance between estimated beliefs and
/// true hands. Zero when there are no teammates.
pub fn intrinsic_reward(
    before: &BTreeMap<usize, BeliefMatrix>,
    after: &BTreeMap<usize, BeliefMatrix>,
    true_hands: &BTreeMap<usize, Vec<Card>>,
    cfg: &RewardConfig,
) -> Result<f64, RewardError> {
    let gains = teammate_gains(before, after, true_hands, cfg)?;
    Ok(gains.values().copied().reduce(f64::max).unwrap_or(0.0))
}

pub fn combined_reward(extrinsic: f64, intrinsic: f64, cfg: &RewardConfig) -> f64 {
    extrinsic + cfg.beta * intrinsic
}
