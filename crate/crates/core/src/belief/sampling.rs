use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use serde::Serialize;

use super::pool::{unseen_pool, UnseenPool};
use super::probability::{approx_hand_probability, exact_hand_probability, HandProbability};
use crate::card::Card;
use crate::error::BeliefError;
use crate::game::{Observation, SlotKnowledge};

/// Attempts allowed per requested sample before giving up.
pub const ATTEMPTS_PER_SAMPLE: usize = 1000;

#[derive(Clone, Debug, Serialize)]
pub struct SampledHand {
    pub hand: Vec<Card>,
    /// Exact (without-replacement) probability of the hand.
    pub weight: HandProbability,
    /// Probability of drawing the hand slot by slot with replacement.
    pub proposal: f64,
}

pub fn sample_hands<R: Rng + ?Sized>(obs: &Observation, n: usize, rng: &mut R) -> Result<Vec<SampledHand>, BeliefError> {
    let pool = unseen_pool(obs)?;
    sample_hands_from(&obs.own_knowledge, &pool, n, rng)
}

/// Draws slot-wise from the with-replacement marginals and keeps hands with
/// non-zero exact probability until `n` are accepted.
pub fn sample_hands_from<R: Rng + ?Sized>(
    knowledge: &[SlotKnowledge],
    pool: &UnseenPool,
    n: usize,
    rng: &mut R,
) -> Result<Vec<SampledHand>, BeliefError> {
    if n == 0 {
        return Err(BeliefError::NoSamples);
    }
    let slots: Vec<(Vec<Card>, WeightedIndex<u32>)> = knowledge
        .iter()
        .enumerate()
        .map(|(slot, &h)| {
            let (cards, weights): (Vec<Card>, Vec<u32>) = pool.restrict(h).iter().map(|(c, w)| (c, w as u32)).unzip();
            let dist = WeightedIndex::new(weights).map_err(|_| BeliefError::ImpossibleKnowledge { slot })?;
            Ok((cards, dist))
        })
        .collect::<Result<_, BeliefError>>()?;

    let budget = ATTEMPTS_PER_SAMPLE * n;
    let mut accepted = Vec::with_capacity(n);
    let mut attempts = 0;
    while accepted.len() < n {
        if attempts == budget {
            return Err(BeliefError::RejectionBudget {
                requested: n,
                accepted: accepted.len(),
                attempts,
            });
        }
        attempts += 1;
        let hand: Vec<Card> = slots.iter().map(|(cards, dist)| cards[dist.sample(rng)]).collect();
        let weight = exact_hand_probability(&hand, knowledge, pool)?;
        if weight.is_zero() {
            continue;
        }
        let proposal = approx_hand_probability(&hand, knowledge, pool)?.to_f64();
        accepted.push(SampledHand { hand, weight, proposal });
    }
    log::debug!("sampled {n} hands in {attempts} attempts");
    Ok(accepted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{CardMultiset, Color};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn forced_hand_is_always_sampled() {
        let hand: Vec<Card> = ["R1", "G2"].iter().map(|c| c.parse().unwrap()).collect();
        let knowledge: Vec<_> = hand.iter().map(|&c| SlotKnowledge::full(c)).collect();
        let pool = UnseenPool::new(CardMultiset::standard_deck());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let samples = sample_hands_from(&knowledge, &pool, 20, &mut rng).unwrap();
        assert_eq!(samples.len(), 20);
        assert!(samples.iter().all(|s| s.hand == hand && s.weight == samples[0].weight));
    }

    #[test]
    fn impossible_duplicate_is_always_rejected() {
        let h = SlotKnowledge::new(Some(Color::R), Some(5));
        let pool = UnseenPool::new(CardMultiset::standard_deck());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let err = sample_hands_from(&[h, h], &pool, 3, &mut rng).unwrap_err();
        assert_eq!(
            err,
            BeliefError::RejectionBudget {
                requested: 3,
                accepted: 0,
                attempts: 3000
            }
        );
    }

    #[test]
    fn zero_samples_rejected() {
        let pool = UnseenPool::new(CardMultiset::standard_deck());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            sample_hands_from(&[SlotKnowledge::UNKNOWN], &pool, 0, &mut rng).unwrap_err(),
            BeliefError::NoSamples
        );
    }
}
