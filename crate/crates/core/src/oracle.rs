//! Exhaustive normalization check of exact hand probabilities on small
//! decks.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::belief::{enumerate_hands, UnseenPool};
use crate::card::{CardMultiset, Color, NUM_COLORS, NUM_RANKS};
use crate::error::BeliefError;
use crate::game::SlotKnowledge;
use crate::harness::derive_seed;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub colors: usize,
    pub ranks: usize,
    pub counts: Vec<u8>,
    pub hand_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub budget: u128,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(1..=NUM_COLORS).contains(&self.colors) {
            return Err(format!("colors must be in 1..={NUM_COLORS}"));
        }
        if !(1..=NUM_RANKS).contains(&self.ranks) {
            return Err(format!("ranks must be in 1..={NUM_RANKS}"));
        }
        if self.counts.len() < self.ranks || self.counts[..self.ranks].contains(&0) {
            return Err(format!("counts needs {} positive entries", self.ranks));
        }
        if self.hand_size == 0 {
            return Err("hand size must be positive".into());
        }
        Ok(())
    }

    pub fn deck(&self) -> CardMultiset {
        CardMultiset::reduced_deck(self.colors, &self.counts[..self.ranks])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialOutcome {
    /// Exact sum equals 1.
    Pass,
    /// The knowledge admits no hand from the pool; the sum is 0 by design.
    NoConsistentHands,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleTrial {
    pub index: usize,
    pub pool: CardMultiset,
    pub knowledge: Vec<SlotKnowledge>,
    pub hands_enumerated: u64,
    pub consistent_hands: u64,
    /// Exact sum as `numerator/denominator`.
    pub sum: String,
    pub outcome: TrialOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub trials: Vec<OracleTrial>,
}

impl OracleReport {
    pub fn count(&self, outcome: TrialOutcome) -> usize {
        self.trials.iter().filter(|t| t.outcome == outcome).count()
    }
}

/// Random (pool, knowledge) pair on the reduced deck. Each copy of the deck
/// stays in the pool with probability 3/4. When the pool can fill a hand,
/// the knowledge is a random partial reveal of a hand drawn from it;
/// otherwise every slot gets a forced random color and rank hint.
fn oracle_instance<R: Rng>(cfg: &OracleConfig, rng: &mut R) -> (CardMultiset, Vec<SlotKnowledge>) {
    let mut pool = CardMultiset::empty();
    for c in cfg.deck().to_cards() {
        if rng.gen_bool(0.75) {
            pool.insert(c);
        }
    }
    let knowledge = if pool.total() as usize >= cfg.hand_size {
        let mut cards = pool.to_cards();
        cards.shuffle(rng);
        cards[..cfg.hand_size]
            .iter()
            .map(|c| SlotKnowledge {
                hinted_color: rng.gen_bool(0.5).then_some(c.color),
                hinted_rank: rng.gen_bool(0.5).then_some(c.rank),
            })
            .collect()
    } else {
        (0..cfg.hand_size)
            .map(|_| {
                let color = Color::ALL[rng.gen_range(0..cfg.colors)];
                SlotKnowledge::new(Some(color), Some(rng.gen_range(1..=cfg.ranks as u8)))
            })
            .collect()
    };
    (pool, knowledge)
}

/// Enumerates every hand for `trials` random configurations and checks the
/// exact probabilities sum to one.
pub fn oracle_check(cfg: &OracleConfig) -> Result<OracleReport, BeliefError> {
    let mut trials = Vec::with_capacity(cfg.trials);
    for index in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, index as u64));
        let (pool, knowledge) = oracle_instance(cfg, &mut rng);
        let unseen = UnseenPool::new(pool);
        let mut sum = BigRational::zero();
        let (mut enumerated, mut consistent) = (0u64, 0u64);
        for (_, p) in enumerate_hands(&knowledge, &unseen, cfg.budget)? {
            enumerated += 1;
            if !p.is_zero() {
                consistent += 1;
                sum += p.rational();
            }
        }
        let outcome = if sum.is_one() {
            TrialOutcome::Pass
        } else if consistent == 0 {
            TrialOutcome::NoConsistentHands
        } else {
            TrialOutcome::Fail
        };
        trials.push(OracleTrial {
            index,
            pool,
            knowledge,
            hands_enumerated: enumerated,
            consistent_hands: consistent,
            sum: format!("{}/{}", sum.numer(), sum.denom()),
            outcome,
        });
    }
    Ok(OracleReport { trials })
}
