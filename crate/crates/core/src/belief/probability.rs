//! Hand probabilities under hint-conditioned draws.
//!
//! Within each hint class the `lambda(h)` slots are filled by drawing
//! without replacement from the restricted pool, so the probability of a hand
//! is a ratio of falling factorials. The with-replacement variant replaces
//! each falling factorial by a plain power.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::knowledge::{knowledge_summary, KnowledgeSummary};
use super::pool::UnseenPool;
use crate::card::Card;
use crate::error::BeliefError;
use crate::game::SlotKnowledge;

/// Hard ceiling on the number of hands the enumeration oracle will visit.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 10_000_000;

/// An exact probability in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HandProbability(BigRational);

impl HandProbability {
    pub fn zero() -> HandProbability {
        HandProbability(BigRational::zero())
    }

    pub fn one() -> HandProbability {
        HandProbability(BigRational::one())
    }

    pub fn from_ratio(numerator: u64, denominator: u64) -> HandProbability {
        HandProbability(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl fmt::Display for HandProbability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for HandProbability {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("HandProbability", 3)?;
        s.serialize_field("numerator", &self.0.numer().to_string())?;
        s.serialize_field("denominator", &self.0.denom().to_string())?;
        s.serialize_field("value", &self.to_f64())?;
        s.end()
    }
}

/// `x (x-1) ... (x-k+1)`; zero once `k > x`.
pub fn falling_factorial(x: u32, k: u32) -> BigUint {
    if k > x {
        return BigUint::zero();
    }
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(x - i))
}

fn ratio(numerator: BigUint, denominator: BigUint) -> HandProbability {
    if numerator.is_zero() || denominator.is_zero() {
        return HandProbability::zero();
    }
    HandProbability(BigRational::new(BigInt::from(numerator), BigInt::from(denominator)))
}

fn all_admitted(hand: &[Card], knowledge: &[SlotKnowledge]) -> bool {
    hand.iter().zip(knowledge).all(|(&c, h)| h.admits(c))
}

fn exact_from_summary(summary: &KnowledgeSummary, pool: &UnseenPool) -> HandProbability {
    let numerator = summary.delta.iter().fold(BigUint::one(), |acc, (&(c, h), &d)| {
        acc * falling_factorial(pool.restrict(h).count(c) as u32, d)
    });
    let denominator = summary
        .lambda
        .iter()
        .fold(BigUint::one(), |acc, (&h, &l)| acc * falling_factorial(pool.restricted_size(h), l));
    ratio(numerator, denominator)
}

/// Probability of `hand` when every hint class is drawn without replacement.
/// Hands that are impossible under the pool get probability zero.
pub fn exact_hand_probability(
    hand: &[Card],
    knowledge: &[SlotKnowledge],
    pool: &UnseenPool,
) -> Result<HandProbability, BeliefError> {
    let summary = knowledge_summary(hand, knowledge)?;
    if !all_admitted(hand, knowledge) {
        return Ok(HandProbability::zero());
    }
    Ok(exact_from_summary(&summary, pool))
}

/// Probability of `hand` when every slot is an independent draw, with
/// replacement, from its restricted pool.
pub fn approx_hand_probability(
    hand: &[Card],
    knowledge: &[SlotKnowledge],
    pool: &UnseenPool,
) -> Result<HandProbability, BeliefError> {
    let summary = knowledge_summary(hand, knowledge)?;
    if !all_admitted(hand, knowledge) {
        return Ok(HandProbability::zero());
    }
    let numerator = hand
        .iter()
        .zip(knowledge)
        .fold(BigUint::one(), |acc, (&c, &h)| acc * BigUint::from(pool.restrict(h).count(c)));
    let denominator = summary
        .lambda
        .iter()
        .fold(BigUint::one(), |acc, (&h, &l)| acc * BigUint::from(pool.restricted_size(h)).pow(l));
    Ok(ratio(numerator, denominator))
}

/// Every hand in the product of the per-slot restricted supports, paired
/// with its exact probability. Refuses when the product is above `budget`.
pub fn enumerate_hands<'a>(
    knowledge: &'a [SlotKnowledge],
    pool: &'a UnseenPool,
    budget: u128,
) -> Result<HandEnumerator<'a>, BeliefError> {
    let supports: Vec<Vec<Card>> = knowledge
        .iter()
        .map(|&h| pool.restrict(h).iter().map(|(c, _)| c).collect())
        .collect();
    let size = product_size(&supports);
    if size > budget {
        return Err(BeliefError::EnumerationBudget { size, budget });
    }
    let summary = KnowledgeSummary::from_knowledge(knowledge);
    let denominator = summary
        .lambda
        .iter()
        .fold(BigUint::one(), |acc, (&h, &l)| acc * falling_factorial(pool.restricted_size(h), l));
    let exhausted = supports.iter().any(Vec::is_empty);
    Ok(HandEnumerator {
        knowledge,
        pool,
        cursor: vec![0; supports.len()],
        supports,
        denominator,
        exhausted,
    })
}

/// Number of hands `enumerate_hands` would visit.
pub fn enumeration_size(knowledge: &[SlotKnowledge], pool: &UnseenPool) -> u128 {
    let supports: Vec<Vec<Card>> = knowledge
        .iter()
        .map(|&h| pool.restrict(h).iter().map(|(c, _)| c).collect())
        .collect();
    product_size(&supports)
}

fn product_size(supports: &[Vec<Card>]) -> u128 {
    supports
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
        .unwrap_or(u128::MAX)
}

pub struct HandEnumerator<'a> {
    knowledge: &'a [SlotKnowledge],
    pool: &'a UnseenPool,
    supports: Vec<Vec<Card>>,
    cursor: Vec<usize>,
    denominator: BigUint,
    exhausted: bool,
}

impl Iterator for HandEnumerator<'_> {
    type Item = (Vec<Card>, HandProbability);

    fn next(&mut self) -> Option<Self::Item> {
        if self.exhausted {
            return None;
        }
        let hand: Vec<Card> = self.cursor.iter().zip(&self.supports).map(|(&i, s)| s[i]).collect();

        // Odometer step, last slot fastest.
        self.exhausted = true;
        for k in (0..self.cursor.len()).rev() {
            self.cursor[k] += 1;
            if self.cursor[k] < self.supports[k].len() {
                self.exhausted = false;
                break;
            }
            self.cursor[k] = 0;
        }

        let summary = knowledge_summary(&hand, self.knowledge).expect("lengths match");
        let numerator = summary.delta.iter().fold(BigUint::one(), |acc, (&(c, h), &d)| {
            acc * falling_factorial(self.pool.restrict(h).count(c) as u32, d)
        });
        Some((hand, ratio(numerator, self.denominator.clone())))
    }
}
