//! Own-hand and nested hand beliefs.

mod knowledge;
mod map;
mod matrix;
mod nested;
mod pool;
mod probability;
mod sampling;

pub use knowledge::{knowledge_summary, KnowledgeSummary};
pub use map::{map_hand, map_hand_for};
pub use matrix::{slot_marginals, BeliefMatrix, BeliefRow};
pub use nested::{
    nested_belief, nested_belief_enumerated, nested_belief_map, nested_belief_mc, perspective_counts, NestedMethod,
    PerspectiveCounts,
};
pub use pool::{all_knowledge_states, unseen_pool, UnseenPool};
pub use probability::{
    approx_hand_probability, enumerate_hands, enumeration_size, exact_hand_probability, falling_factorial,
    HandEnumerator, HandProbability, DEFAULT_ENUMERATION_BUDGET,
};
pub use sampling::{sample_hands, sample_hands_from, SampledHand, ATTEMPTS_PER_SAMPLE};

use crate::error::BeliefError;
use crate::game::Observation;

/// The viewer's per-slot own-hand marginals: each slot's knowledge applied to
/// the unseen pool, drawn independently.
pub fn slot_marginals_b0(obs: &Observation) -> Result<BeliefMatrix, BeliefError> {
    let pool = unseen_pool(obs)?;
    slot_marginals(pool.base(), &obs.own_knowledge)
}
