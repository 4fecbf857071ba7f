//! Most probable own hand.
//!
//! The exact hand probability factorizes over hint classes, and within a
//! class it is a product of falling factorials of the chosen card counts.
//! Picking the largest remaining count at every draw maximizes that product,
//! so the argmax is found class by class. Ties go to the lexicographically
//! smallest hand in canonical card order.

use std::collections::BTreeMap;

use super::pool::{unseen_pool, UnseenPool};
use crate::card::{Card, CardMultiset, NUM_CARD_TYPES};
use crate::error::BeliefError;
use crate::game::{Observation, SlotKnowledge};

pub fn map_hand(obs: &Observation) -> Result<Vec<Card>, BeliefError> {
    let pool = unseen_pool(obs)?;
    map_hand_for(&obs.own_knowledge, &pool)
}

pub fn map_hand_for(knowledge: &[SlotKnowledge], pool: &UnseenPool) -> Result<Vec<Card>, BeliefError> {
    let mut classes: BTreeMap<SlotKnowledge, Vec<usize>> = BTreeMap::new();
    for (k, &h) in knowledge.iter().enumerate() {
        classes.entry(h).or_default().push(k);
    }
    let mut hand: Vec<Option<Card>> = vec![None; knowledge.len()];
    for (h, slots) in classes {
        let mut remaining = *pool.restrict(h);
        let mut best = best_product(&remaining, slots.len());
        if best == 0 {
            return Err(BeliefError::NoConsistentHand);
        }
        for (left, &slot) in (0..slots.len()).rev().zip(&slots) {
            let choice = remaining
                .iter()
                .map(|(c, _)| c)
                .find(|&c| {
                    let n = remaining.count(c) as u128;
                    let mut after = remaining;
                    after.remove(c);
                    n * best_product(&after, left) == best
                })
                .expect("an optimal card exists while the optimum is positive");
            best /= remaining.count(choice) as u128;
            remaining.remove(choice);
            hand[slot] = Some(choice);
        }
    }
    Ok(hand.into_iter().map(|c| c.expect("every slot assigned")).collect())
}

/// Largest product of falling factorials drawing `draws` cards from `counts`:
/// the product of the `draws` largest values among `n, n-1, .., 1` per card.
fn best_product(counts: &CardMultiset, draws: usize) -> u128 {
    let mut values: Vec<u32> = Vec::with_capacity(NUM_CARD_TYPES * 3);
    for (_, n) in counts.iter() {
        values.extend((1..=n as u32).rev());
    }
    if values.len() < draws {
        return 0;
    }
    values.sort_unstable_by(|a, b| b.cmp(a));
    values[..draws].iter().map(|&v| v as u128).product()
}
