use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::card::Card;
use crate::error::BeliefError;
use crate::game::SlotKnowledge;

/// Pairing of a hand with the hints on its slots.
///
/// `delta[(c, h)]` counts slots holding card `c` under knowledge `h`;
/// `lambda[h]` counts slots under knowledge `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KnowledgeSummary {
    pub pairs: Vec<(Option<Card>, SlotKnowledge)>,
    pub delta: BTreeMap<(Card, SlotKnowledge), u32>,
    pub lambda: BTreeMap<SlotKnowledge, u32>,
    pub unique_hints: BTreeSet<SlotKnowledge>,
}

impl KnowledgeSummary {
    /// Summary of hints alone, for evaluating a hand not yet chosen.
    pub fn from_knowledge(knowledge: &[SlotKnowledge]) -> KnowledgeSummary {
        let mut lambda = BTreeMap::new();
        for &h in knowledge {
            *lambda.entry(h).or_insert(0) += 1;
        }
        KnowledgeSummary {
            pairs: knowledge.iter().map(|&h| (None, h)).collect(),
            delta: BTreeMap::new(),
            unique_hints: lambda.keys().copied().collect(),
            lambda,
        }
    }

    pub fn delta(&self, card: Card, h: SlotKnowledge) -> u32 {
        self.delta.get(&(card, h)).copied().unwrap_or(0)
    }

    pub fn lambda(&self, h: SlotKnowledge) -> u32 {
        self.lambda.get(&h).copied().unwrap_or(0)
    }
}

pub fn knowledge_summary(hand: &[Card], knowledge: &[SlotKnowledge]) -> Result<KnowledgeSummary, BeliefError> {
    if hand.len() != knowledge.len() {
        return Err(BeliefError::LengthMismatch {
            hand: hand.len(),
            knowledge: knowledge.len(),
        });
    }
    let mut summary = KnowledgeSummary::from_knowledge(knowledge);
    for (k, (&c, &h)) in hand.iter().zip(knowledge).enumerate() {
        summary.pairs[k].0 = Some(c);
        *summary.delta.entry((c, h)).or_insert(0) += 1;
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::Color;

    fn cards(s: &[&str]) -> Vec<Card> {
        s.iter().map(|c| c.parse().unwrap()).collect()
    }

    fn example_hints() -> Vec<SlotKnowledge> {
        vec![
            SlotKnowledge::new(Some(Color::R), None),
            SlotKnowledge::new(Some(Color::G), None),
            SlotKnowledge::new(Some(Color::R), None),
            SlotKnowledge::new(None, Some(1)),
            SlotKnowledge::new(None, Some(2)),
        ]
    }

    #[test]
    fn worked_example_counts() {
        let red = SlotKnowledge::new(Some(Color::R), None);
        let s = knowledge_summary(&cards(&["R3", "G3", "R4", "W1", "W2"]), &example_hints()).unwrap();
        assert_eq!(s.lambda(red), 2);
        assert_eq!(s.delta("R3".parse().unwrap(), red), 1);
        assert_eq!(s.delta("R4".parse().unwrap(), red), 1);
        assert_eq!(s.unique_hints.len(), 4);

        let s = knowledge_summary(&cards(&["R3", "G3", "R3", "W1", "W2"]), &example_hints()).unwrap();
        assert_eq!(s.delta("R3".parse().unwrap(), red), 2);
    }

    #[test]
    fn delta_sums_to_lambda() {
        let s = knowledge_summary(&cards(&["R3", "G3", "R4", "W1", "W2"]), &example_hints()).unwrap();
        for (&h, &l) in &s.lambda {
            let total: u32 = s.delta.iter().filter(|((_, hh), _)| *hh == h).map(|(_, n)| n).sum();
            assert_eq!(total, l);
        }
        assert_eq!(s.unique_hints, s.lambda.keys().copied().collect());
    }

    #[test]
    fn unhinted_hand_has_one_class() {
        let s = knowledge_summary(&cards(&["B1", "B1", "Y4", "G2"]), &[SlotKnowledge::UNKNOWN; 4]).unwrap();
        assert_eq!(s.unique_hints.len(), 1);
        assert_eq!(s.lambda(SlotKnowledge::UNKNOWN), 4);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(knowledge_summary(&cards(&["B1"]), &[]).is_err());
    }
}
