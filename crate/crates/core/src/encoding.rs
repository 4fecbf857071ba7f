//! Flat observation vectors for learners.
//!
//! The layout follows the usual Hanabi feature blocks (visible hands, board,
//! discards, last move) with the per-card hint-knowledge block replaced by
//! belief matrices. Every segment is named and offset-addressed in a
//! [`Layout`] that travels with the vector.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::belief::{nested_belief, slot_marginals_b0, BeliefMatrix, NestedMethod};
use crate::card::{Card, CardMultiset, Color, NUM_CARD_TYPES, NUM_COLORS, NUM_RANKS};
use crate::error::BeliefError;
use crate::game::{Action, Observation, MAX_INFO_TOKENS, MAX_LIFE_TOKENS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeliefLevel {
    Own,
    Nested,
}

impl BeliefLevel {
    pub fn from_index(level: u8) -> Option<BeliefLevel> {
        match level {
            0 => Some(BeliefLevel::Own),
            1 => Some(BeliefLevel::Nested),
            _ => None,
        }
    }
}

/// Which teammates get a nested-belief block.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TeammateSelection {
    /// Only the next player in turn order.
    #[default]
    Next,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodeOptions {
    pub level: BeliefLevel,
    pub method: NestedMethod,
    pub teammates: TeammateSelection,
}

impl EncodeOptions {
    pub fn own() -> EncodeOptions {
        EncodeOptions {
            level: BeliefLevel::Own,
            method: NestedMethod::Map,
            teammates: TeammateSelection::Next,
        }
    }

    pub fn nested(method: NestedMethod) -> EncodeOptions {
        EncodeOptions {
            level: BeliefLevel::Nested,
            method,
            teammates: TeammateSelection::Next,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub name: String,
    pub offset: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub segments: Vec<Segment>,
    pub total_len: usize,
}

impl Layout {
    pub fn new(
        num_players: usize,
        hand_size: usize,
        deck: &CardMultiset,
        level: BeliefLevel,
        teammates: TeammateSelection,
    ) -> Layout {
        let deck_after_deal = (deck.total() as usize).saturating_sub(num_players * hand_size);
        let nested_blocks = match (level, teammates) {
            (BeliefLevel::Own, _) => 0,
            (BeliefLevel::Nested, TeammateSelection::Next) => 1,
            (BeliefLevel::Nested, TeammateSelection::All) => num_players - 1,
        };
        let sizes = [
            ("hands", (num_players - 1) * hand_size * NUM_CARD_TYPES),
            ("missing_cards", num_players),
            ("deck_size", deck_after_deal),
            ("fireworks", NUM_COLORS * NUM_RANKS),
            ("info_tokens", MAX_INFO_TOKENS as usize),
            ("life_tokens", MAX_LIFE_TOKENS as usize),
            ("discards", deck.total() as usize),
            (
                "last_action",
                2 * num_players + 4 + NUM_COLORS + NUM_RANKS + 2 * hand_size + NUM_CARD_TYPES + 2,
            ),
            ("own_belief", hand_size * NUM_CARD_TYPES),
            ("nested_belief", nested_blocks * hand_size * NUM_CARD_TYPES),
        ];
        let mut offset = 0;
        let segments = sizes
            .iter()
            .map(|&(name, len)| {
                let s = Segment {
                    name: name.to_string(),
                    offset,
                    len,
                };
                offset += len;
                s
            })
            .collect();
        Layout {
            segments,
            total_len: offset,
        }
    }

    pub fn segment(&self, name: &str) -> Option<&Segment> {
        self.segments.iter().find(|s| s.name == name)
    }

    /// Combined length of the belief segments.
    pub fn belief_len(&self) -> usize {
        ["own_belief", "nested_belief"]
            .iter()
            .filter_map(|n| self.segment(n))
            .map(|s| s.len)
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EncodedObservation {
    pub values: Vec<f64>,
    pub layout: Layout,
}

impl EncodedObservation {
    pub fn segment(&self, name: &str) -> Option<&[f64]> {
        self.layout
            .segment(name)
            .map(|s| &self.values[s.offset..s.offset + s.len])
    }
}

fn seg<'a>(values: &'a mut [f64], layout: &Layout, name: &str) -> Writer<'a> {
    let s = layout.segment(name).expect("segment exists");
    Writer {
        values: &mut values[s.offset..s.offset + s.len],
    }
}

struct Writer<'a> {
    values: &'a mut [f64],
}

impl Writer<'_> {
    fn set(&mut self, i: usize) {
        self.values[i] = 1.0;
    }

    fn thermometer(&mut self, n: usize) {
        let n = n.min(self.values.len());
        self.values[..n].iter_mut().for_each(|v| *v = 1.0);
    }
}

/// Builds the feature vector for `obs`. Randomness is only consumed by the
/// Monte-Carlo nested-belief method.
pub fn encode<R: Rng + ?Sized>(
    obs: &Observation,
    opts: &EncodeOptions,
    rng: &mut R,
) -> Result<EncodedObservation, BeliefError> {
    if opts.level == BeliefLevel::Nested && obs.num_players < 2 {
        return Err(BeliefError::InvalidTarget(obs.viewer));
    }
    let layout = Layout::new(obs.num_players, obs.hand_size, &obs.base_deck, opts.level, opts.teammates);
    let mut values = vec![0.0; layout.total_len];
    let eta = obs.hand_size;
    let n = obs.num_players;
    let offset_of = |player: usize| (player + n - obs.viewer) % n;

    {
        let mut hands = seg(&mut values, &layout, "hands");
        for (i, hand) in obs.others_hands.iter().enumerate() {
            for (k, slot) in hand.slots.iter().enumerate().take(eta) {
                hands.set((i * eta + k) * NUM_CARD_TYPES + slot.card.index());
            }
        }

        let mut missing = seg(&mut values, &layout, "missing_cards");
        if obs.own_knowledge.len() < eta {
            missing.set(0);
        }
        for hand in &obs.others_hands {
            if hand.slots.len() < eta {
                missing.set(offset_of(hand.player));
            }
        }

        seg(&mut values, &layout, "deck_size").thermometer(obs.deck_size);

        let mut fireworks = seg(&mut values, &layout, "fireworks");
        for color in Color::ALL {
            let top = obs.firework(color);
            if top > 0 {
                fireworks.set(color.index() * NUM_RANKS + top as usize - 1);
            }
        }

        seg(&mut values, &layout, "info_tokens").thermometer(obs.info_tokens as usize);
        seg(&mut values, &layout, "life_tokens").thermometer(obs.life_tokens as usize);

        let mut discards = seg(&mut values, &layout, "discards");
        let mut base = 0;
        for c in Card::all() {
            let copies = obs.base_deck.count(c) as usize;
            for i in 0..(obs.discard_pile.count(c) as usize).min(copies) {
                discards.set(base + i);
            }
            base += copies;
        }

        if let Some(m) = &obs.last_move {
            let mut last = seg(&mut values, &layout, "last_action");
            let mut at = 0;
            last.set(at + offset_of(m.actor));
            at += n;
            let kind = match m.action {
                Action::Play { .. } => 0,
                Action::Discard { .. } => 1,
                Action::HintColor { .. } => 2,
                Action::HintRank { .. } => 3,
            };
            last.set(at + kind);
            at += 4;
            if let Some(t) = m.action.hint_target() {
                last.set(at + offset_of(t));
            }
            at += n;
            if let Action::HintColor { color, .. } = m.action {
                last.set(at + color.index());
            }
            at += NUM_COLORS;
            if let Action::HintRank { rank, .. } = m.action {
                last.set(at + rank.index());
            }
            at += NUM_RANKS;
            for &k in m.revealed.iter().filter(|&&k| k < eta) {
                last.set(at + k);
            }
            at += eta;
            if let Action::Play { slot } | Action::Discard { slot } = m.action {
                if slot < eta {
                    last.set(at + slot);
                }
            }
            at += eta;
            if let Some(c) = m.card {
                last.set(at + c.index());
            }
            at += NUM_CARD_TYPES;
            if m.success {
                last.set(at);
            }
            if m.info_token_added {
                last.set(at + 1);
            }
        }
    }

    let own = slot_marginals_b0(obs)?;
    write_belief(&mut values, &layout, "own_belief", 0, &own);

    if opts.level == BeliefLevel::Nested {
        let targets: Vec<usize> = match opts.teammates {
            TeammateSelection::Next => obs.others_hands.first().map(|h| h.player).into_iter().collect(),
            TeammateSelection::All => obs.others_hands.iter().map(|h| h.player).collect(),
        };
        for (block, &j) in targets.iter().enumerate() {
            let nested = nested_belief(obs, j, opts.method, rng)?;
            write_belief(&mut values, &layout, "nested_belief", block * eta, &nested);
        }
    }

    Ok(EncodedObservation { values, layout })
}

fn write_belief(values: &mut [f64], layout: &Layout, name: &str, first_row: usize, m: &BeliefMatrix) {
    let seg = layout.segment(name).expect("belief segment");
    for (k, row) in m.rows().iter().enumerate() {
        let start = seg.offset + (first_row + k) * NUM_CARD_TYPES;
        values[start..start + NUM_CARD_TYPES].copy_from_slice(row);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::game::{apply_action, new_game, observe};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0)
    }

    #[test]
    fn belief_block_sizes() {
        let s = new_game(2, 1).unwrap();
        let obs = observe(&s, 0).unwrap();
        let e0 = encode(&obs, &EncodeOptions::own(), &mut rng()).unwrap();
        assert_eq!(e0.layout.belief_len(), 125);
        let e1 = encode(&obs, &EncodeOptions::nested(NestedMethod::Map), &mut rng()).unwrap();
        assert_eq!(e1.layout.belief_len(), 250);
        assert_eq!(e1.values.len(), e1.layout.total_len);
    }

    #[test]
    fn length_depends_only_on_players_and_level() {
        for n in 2..=5 {
            let a = encode(&observe(&new_game(n, 1).unwrap(), 0).unwrap(), &EncodeOptions::own(), &mut rng()).unwrap();
            let b = encode(&observe(&new_game(n, 2).unwrap(), 1).unwrap(), &EncodeOptions::own(), &mut rng()).unwrap();
            assert_eq!(a.layout, b.layout);
        }
    }

    #[test]
    fn all_teammates_selection() {
        let s = new_game(4, 1).unwrap();
        let opts = EncodeOptions {
            teammates: TeammateSelection::All,
            ..EncodeOptions::nested(NestedMethod::Map)
        };
        let e = encode(&observe(&s, 0).unwrap(), &opts, &mut rng()).unwrap();
        assert_eq!(e.segment("nested_belief").unwrap().len(), 3 * 4 * 25);
    }

    #[test]
    fn fully_hinted_own_block_is_one_hot() {
        let s = fixtures::fully_hinted();
        let obs = observe(&s, 0).unwrap();
        let e = encode(&obs, &EncodeOptions::own(), &mut rng()).unwrap();
        let expected = BeliefMatrix::one_hot(&s.hands[0].cards()).flatten();
        assert_eq!(e.segment("own_belief").unwrap(), expected.as_slice());
    }

    #[test]
    fn belief_rows_sum_to_one() {
        let s = fixtures::worked_example();
        let e = encode(&observe(&s, 0).unwrap(), &EncodeOptions::nested(NestedMethod::Map), &mut rng()).unwrap();
        for name in ["own_belief", "nested_belief"] {
            for row in e.segment(name).unwrap().chunks(25) {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn last_move_is_encoded() {
        let s = new_game(2, 3).unwrap();
        let (s, _) = apply_action(&s, Action::Play { slot: 2 }).unwrap();
        let e = encode(&observe(&s, 1).unwrap(), &EncodeOptions::own(), &mut rng()).unwrap();
        let last = e.segment("last_action").unwrap();
        // Actor is one seat before the viewer; move type is "play".
        assert_eq!(last[1], 1.0);
        assert_eq!(last[2], 1.0);
        assert!(last.iter().sum::<f64>() >= 4.0);
    }

    #[test]
    fn layout_round_trips_through_json() {
        let s = new_game(3, 3).unwrap();
        let e = encode(&observe(&s, 2).unwrap(), &EncodeOptions::nested(NestedMethod::Map), &mut rng()).unwrap();
        let back: EncodedObservation = serde_json::from_str(&serde_json::to_string(&e).unwrap()).unwrap();
        assert_eq!(back, e);
        let offsets: Vec<usize> = back.layout.segments.iter().map(|s| s.offset).collect();
        let declared: Vec<usize> = e.layout.segments.iter().map(|s| s.offset).collect();
        assert_eq!(offsets, declared);
    }

    #[test]
    fn map_encoding_is_deterministic() {
        let s = new_game(2, 8).unwrap();
        let obs = observe(&s, 0).unwrap();
        let opts = EncodeOptions::nested(NestedMethod::Map);
        let a = encode(&obs, &opts, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = encode(&obs, &opts, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        assert_eq!(a, b);
    }
}
