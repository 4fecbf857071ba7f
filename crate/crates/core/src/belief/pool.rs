use std::sync::OnceLock;

use crate::card::{Color, CardMultiset, Rank, NUM_COLORS, NUM_RANKS};
use crate::error::BeliefError;
use crate::game::{Observation, SlotKnowledge};

const NUM_KNOWLEDGE_STATES: usize = (NUM_COLORS + 1) * (NUM_RANKS + 1);

fn knowledge_index(h: SlotKnowledge) -> usize {
    let c = h.hinted_color.map_or(0, |c| c.index() + 1);
    let r = h.hinted_rank.map_or(0, |r| r.index() + 1);
    c * (NUM_RANKS + 1) + r
}

/// Card copies the viewer cannot see, with per-knowledge restrictions
/// computed on first use.
#[derive(Debug, Clone)]
pub struct UnseenPool {
    base: CardMultiset,
    restrictions: [OnceLock<CardMultiset>; NUM_KNOWLEDGE_STATES],
}

impl UnseenPool {
    pub fn new(base: CardMultiset) -> UnseenPool {
        UnseenPool {
            base,
            restrictions: std::array::from_fn(|_| OnceLock::new()),
        }
    }

    pub fn base(&self) -> &CardMultiset {
        &self.base
    }

    /// Sub-multiset of cards consistent with `h`.
    pub fn restrict(&self, h: SlotKnowledge) -> &CardMultiset {
        self.restrictions[knowledge_index(h)].get_or_init(|| self.base.filter(|c| h.admits(c)))
    }

    pub fn restricted_size(&self, h: SlotKnowledge) -> u32 {
        self.restrict(h).total()
    }
}

impl PartialEq for UnseenPool {
    fn eq(&self, other: &Self) -> bool {
        self.base == other.base
    }
}

/// Base deck minus everything the viewer can see: other hands, discards and
/// played fireworks. The viewer's own cards stay in the pool.
pub fn unseen_pool(obs: &Observation) -> Result<UnseenPool, BeliefError> {
    let mut visible = obs.discard_pile.union(&obs.fireworks_cards());
    for hand in &obs.others_hands {
        for slot in &hand.slots {
            visible.insert(slot.card);
        }
    }
    let base = obs.base_deck.checked_sub(&visible).ok_or_else(|| {
        let over: Vec<String> = visible
            .iter()
            .filter(|&(c, n)| n > obs.base_deck.count(c))
            .map(|(c, n)| format!("{c} seen {n}x"))
            .collect();
        BeliefError::CorruptedState(over.join(", "))
    })?;
    Ok(UnseenPool::new(base))
}

/// All knowledge states, `(none, none)` first.
pub fn all_knowledge_states() -> impl Iterator<Item = SlotKnowledge> {
    let colors = std::iter::once(None).chain(Color::ALL.iter().copied().map(Some));
    colors.flat_map(|c| {
        std::iter::once(None).chain(Rank::all().map(Some)).map(move |r| SlotKnowledge {
            hinted_color: c,
            hinted_rank: r,
        })
    })
}
