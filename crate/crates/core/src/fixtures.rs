//! Hand-built game states used by tests, the CLI and the demo page.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::card::{Card, CardMultiset, Color};
use crate::game::{GameConfig, GameState, PlayerHand, Slot, SlotKnowledge, MAX_LIFE_TOKENS};

fn card(s: &str) -> Card {
    s.parse().expect("fixture card")
}

fn build(hands: Vec<PlayerHand>, fireworks: &[(Color, u8)], discards: &[&str], info_tokens: u8, seed: u64) -> GameState {
    let num_players = hands.len();
    let config = GameConfig::standard(num_players);
    let mut fw: BTreeMap<Color, u8> = Color::ALL.iter().map(|&c| (c, 0)).collect();
    for &(c, r) in fireworks {
        fw.insert(c, r);
    }
    let discard_pile = CardMultiset::from_cards(&discards.iter().map(|s| card(s)).collect::<Vec<_>>());
    let mut used = discard_pile.union(&crate::game::fireworks_as_cards(&fw));
    for h in &hands {
        for s in &h.slots {
            used.insert(s.card);
        }
    }
    let mut draw_pile = config.deck.checked_sub(&used).expect("fixture fits in the deck").to_cards();
    draw_pile.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    GameState {
        num_players,
        hands,
        draw_pile,
        discard_pile,
        fireworks: fw,
        info_tokens,
        life_tokens: MAX_LIFE_TOKENS,
        current_player: 0,
        turns_after_deck_empty: 0,
        rng_seed: seed,
        turn: 0,
        last_move: None,
        config,
    }
}

/// Two-player state where player 0 holds `R3 G3 R4 W1 W2` with hints
/// `R G R 1 2`, and every R1, R2, G1 and G2 is visible to player 0. Player 0's
/// restricted pools are then `R: {R3:2, R4:2, R5:1}`, `G: {G3:2, G4:2, G5:1}`,
/// `1: {B1:3, W1:3, Y1:3}` and `2: {B2:2, W2:2, Y2:2}`.
pub fn worked_example() -> GameState {
    let knowledge = [
        SlotKnowledge::new(Some(Color::R), None),
        SlotKnowledge::new(Some(Color::G), None),
        SlotKnowledge::new(Some(Color::R), None),
        SlotKnowledge::new(None, Some(1)),
        SlotKnowledge::new(None, Some(2)),
    ];
    let own = PlayerHand {
        slots: ["R3", "G3", "R4", "W1", "W2"]
            .iter()
            .zip(knowledge)
            .map(|(c, k)| Slot {
                card: card(c),
                knowledge: k,
            })
            .collect(),
    };
    let partner = PlayerHand {
        slots: ["R1", "R1", "G1", "G1", "B5"].iter().map(|c| Slot::fresh(card(c))).collect(),
    };
    build(vec![own, partner], &[(Color::R, 2), (Color::G, 2)], &["R2", "G2"], 6, 2024)
}

/// Two-player state where both hands are fully hinted.
pub fn fully_hinted() -> GameState {
    let hand = |cards: &[&str]| PlayerHand {
        slots: cards
            .iter()
            .map(|c| Slot {
                card: card(c),
                knowledge: SlotKnowledge::full(card(c)),
            })
            .collect(),
    };
    build(
        vec![hand(&["R1", "G1", "B2", "W3", "Y5"]), hand(&["R2", "G4", "B1", "W1", "Y1"])],
        &[],
        &[],
        0,
        7,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_conserve_the_deck() {
        for s in [worked_example(), fully_hinted()] {
            assert_eq!(s.all_cards(), CardMultiset::standard_deck());
            assert!(!s.is_terminal());
        }
    }
}
