//! Level-1 beliefs: the viewer's estimate of what a teammate believes about
//! the teammate's own hand.
//!
//! From teammate `j`'s seat the viewer's hand is visible and `j`'s own hand is
//! not, so `j`'s unseen pool is the viewer's pool plus `j`'s hand minus a
//! hypothesis for the viewer's hand. The hypothesis is either the viewer's
//! most probable hand or a weighted set of sampled hands.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::map::map_hand_for;
use super::matrix::{restricted_row, BeliefMatrix};
use super::pool::{unseen_pool, UnseenPool};
use super::probability::enumerate_hands;
use super::sampling::sample_hands_from;
use crate::card::{Card, CardMultiset, NUM_CARD_TYPES};
use crate::error::BeliefError;
use crate::game::{Observation, VisibleHand};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum NestedMethod {
    Map,
    MonteCarlo { samples: usize },
}

/// A teammate's unseen pool under a hypothesis for the viewer's hand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PerspectiveCounts {
    pub adjusted: CardMultiset,
    /// Cards whose count would have gone negative and was clamped to zero.
    pub clamped: Vec<Card>,
}

impl PerspectiveCounts {
    pub fn was_clamped(&self) -> bool {
        !self.clamped.is_empty()
    }
}

fn target_hand(obs: &Observation, target: usize) -> Result<&VisibleHand, BeliefError> {
    if target == obs.viewer {
        return Err(BeliefError::InvalidTarget(target));
    }
    obs.hand_of(target).ok_or(BeliefError::InvalidTarget(target))
}

pub fn perspective_counts(
    obs: &Observation,
    hypothesized_own_hand: &[Card],
    target: usize,
) -> Result<PerspectiveCounts, BeliefError> {
    if hypothesized_own_hand.len() != obs.own_knowledge.len() {
        return Err(BeliefError::LengthMismatch {
            hand: hypothesized_own_hand.len(),
            knowledge: obs.own_knowledge.len(),
        });
    }
    let pool = unseen_pool(obs)?;
    let hand = target_hand(obs, target)?;
    Ok(adjust_counts(pool.base(), &hand.cards(), hypothesized_own_hand))
}

fn adjust_counts(pool: &CardMultiset, target_cards: &[Card], hypothesis: &[Card]) -> PerspectiveCounts {
    let with_target = pool.union(&CardMultiset::from_cards(target_cards));
    let removed = CardMultiset::from_cards(hypothesis);
    let mut counts = [0u8; NUM_CARD_TYPES];
    let mut clamped = Vec::new();
    for c in Card::all() {
        let (have, take) = (with_target.count(c), removed.count(c));
        if take > have {
            clamped.push(c);
        }
        counts[c.index()] = have.saturating_sub(take);
    }
    PerspectiveCounts {
        adjusted: CardMultiset::from_counts(counts),
        clamped,
    }
}

/// Teammate `target`'s slot marginals under one hypothesis for the viewer's
/// hand. A slot whose restriction is empty after clamping falls back to the
/// pool without the hypothesis removed.
fn marginals_under(pool: &UnseenPool, target: &VisibleHand, hypothesis: &[Card]) -> BeliefMatrix {
    let cards = target.cards();
    let perspective = adjust_counts(pool.base(), &cards, hypothesis);
    if perspective.was_clamped() {
        log::debug!("perspective counts clamped for {:?}", perspective.clamped);
    }
    let fallback = pool.base().union(&CardMultiset::from_cards(&cards));
    let rows = target
        .slots
        .iter()
        .map(|slot| {
            restricted_row(&perspective.adjusted, slot.knowledge)
                .or_else(|| restricted_row(&fallback, slot.knowledge))
                .expect("the target's true card is always in the fallback pool")
        })
        .collect();
    BeliefMatrix::from_rows(rows)
}

/// Nested belief using the viewer's most probable hand as the hypothesis.
pub fn nested_belief_map(obs: &Observation, target: usize) -> Result<BeliefMatrix, BeliefError> {
    let hand = target_hand(obs, target)?;
    let pool = unseen_pool(obs)?;
    let map = map_hand_for(&obs.own_knowledge, &pool)?;
    Ok(marginals_under(&pool, hand, &map))
}

/// Monte-Carlo nested belief. Hands are drawn from the with-replacement
/// proposal and weighted by exact probability over proposal probability, so
/// the estimate converges to the exact marginalization.
pub fn nested_belief_mc<R: Rng + ?Sized>(
    obs: &Observation,
    target: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<BeliefMatrix, BeliefError> {
    let hand = target_hand(obs, target)?;
    let pool = unseen_pool(obs)?;
    let samples = sample_hands_from(&obs.own_knowledge, &pool, n_samples, rng)?;
    let mut acc = vec![[0.0; NUM_CARD_TYPES]; hand.slots.len()];
    let mut total_weight = 0.0;
    for s in &samples {
        let w = s.weight.to_f64() / s.proposal;
        if !(w.is_finite() && w > 0.0) {
            continue;
        }
        total_weight += w;
        let m = marginals_under(&pool, hand, &s.hand);
        for (a, row) in acc.iter_mut().zip(m.rows()) {
            for (x, v) in a.iter_mut().zip(row) {
                *x += w * v;
            }
        }
    }
    if total_weight <= 0.0 {
        return Err(BeliefError::AllZeroWeights);
    }
    for row in &mut acc {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(BeliefMatrix::from_rows(acc))
}

/// Exact marginalization over every own hand, weighted by its exact
/// probability. Only usable on small instances.
pub fn nested_belief_enumerated(obs: &Observation, target: usize, budget: u128) -> Result<BeliefMatrix, BeliefError> {
    let hand = target_hand(obs, target)?;
    let pool = unseen_pool(obs)?;
    let mut acc = vec![[0.0; NUM_CARD_TYPES]; hand.slots.len()];
    let mut total = 0.0;
    for (own, p) in enumerate_hands(&obs.own_knowledge, &pool, budget)? {
        if p.is_zero() {
            continue;
        }
        let w = p.to_f64();
        total += w;
        let m = marginals_under(&pool, hand, &own);
        for (a, row) in acc.iter_mut().zip(m.rows()) {
            for (x, v) in a.iter_mut().zip(row) {
                *x += w * v;
            }
        }
    }
    if total <= 0.0 {
        return Err(BeliefError::NoConsistentHand);
    }
    for row in &mut acc {
        let sum: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= sum);
    }
    Ok(BeliefMatrix::from_rows(acc))
}

pub fn nested_belief<R: Rng + ?Sized>(
    obs: &Observation,
    target: usize,
    method: NestedMethod,
    rng: &mut R,
) -> Result<BeliefMatrix, BeliefError> {
    match method {
        NestedMethod::Map => nested_belief_map(obs, target),
        NestedMethod::MonteCarlo { samples } => nested_belief_mc(obs, target, samples, rng),
    }
}
