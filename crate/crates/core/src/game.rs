//! Hanabi state machine.
//!
//! `GameState` is plain data; every operation is a pure function from one
//! state to the next. Only positive hint marks are stored in
//! [`SlotKnowledge`]; the complementary negative information is reported as a
//! [`GameEvent::NegativeHint`] so trajectory logs keep it.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::card::{Card, CardMultiset, Color, Rank};
use crate::error::GameError;

pub const MAX_INFO_TOKENS: u8 = 8;
pub const MAX_LIFE_TOKENS: u8 = 3;
pub const MIN_PLAYERS: usize = 2;
pub const MAX_PLAYERS: usize = 5;

/// Positive hint marks on one slot. `None` means no hint of that kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SlotKnowledge {
    pub hinted_color: Option<Color>,
    pub hinted_rank: Option<Rank>,
}

impl SlotKnowledge {
    pub const UNKNOWN: SlotKnowledge = SlotKnowledge {
        hinted_color: None,
        hinted_rank: None,
    };

    pub fn new(color: Option<Color>, rank: Option<u8>) -> SlotKnowledge {
        SlotKnowledge {
            hinted_color: color,
            hinted_rank: rank.map(|r| Rank::new(r).expect("rank out of range")),
        }
    }

    /// Knowledge matching `card` exactly.
    pub fn full(card: Card) -> SlotKnowledge {
        SlotKnowledge {
            hinted_color: Some(card.color),
            hinted_rank: Some(card.rank),
        }
    }

    pub fn admits(&self, card: Card) -> bool {
        self.hinted_color.is_none_or(|c| c == card.color) && self.hinted_rank.is_none_or(|r| r == card.rank)
    }

    pub fn is_full(&self) -> bool {
        self.hinted_color.is_some() && self.hinted_rank.is_some()
    }
}

impl fmt::Display for SlotKnowledge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.hinted_color, self.hinted_rank) {
            (None, None) => write!(f, "-"),
            (Some(c), None) => write!(f, "{c}"),
            (None, Some(r)) => write!(f, "{r}"),
            (Some(c), Some(r)) => write!(f, "{c}{r}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Slot {
    pub card: Card,
    pub knowledge: SlotKnowledge,
}

impl Slot {
    pub fn fresh(card: Card) -> Slot {
        Slot {
            card,
            knowledge: SlotKnowledge::UNKNOWN,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlayerHand {
    pub slots: Vec<Slot>,
}

impl PlayerHand {
    pub fn cards(&self) -> Vec<Card> {
        self.slots.iter().map(|s| s.card).collect()
    }

    pub fn knowledge(&self) -> Vec<SlotKnowledge> {
        self.slots.iter().map(|s| s.knowledge).collect()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// How a game that runs out of life tokens is scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BombScoring {
    #[default]
    Zero,
    Fireworks,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameConfig {
    pub deck: CardMultiset,
    pub hand_size: usize,
    pub bomb_scoring: BombScoring,
}

impl GameConfig {
    /// Standard deck, standard hand size for `num_players`.
    pub fn standard(num_players: usize) -> GameConfig {
        GameConfig {
            deck: CardMultiset::standard_deck(),
            hand_size: standard_hand_size(num_players),
            bomb_scoring: BombScoring::Zero,
        }
    }
}

/// 5 cards for 2-3 players, 4 cards for 4-5 players.
pub fn standard_hand_size(num_players: usize) -> usize {
    if num_players <= 3 {
        5
    } else {
        4
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    Play { slot: usize },
    Discard { slot: usize },
    HintColor { target_player: usize, color: Color },
    HintRank { target_player: usize, rank: Rank },
}

impl Action {
    pub fn is_hint(&self) -> bool {
        matches!(self, Action::HintColor { .. } | Action::HintRank { .. })
    }

    pub fn hint_target(&self) -> Option<usize> {
        match *self {
            Action::HintColor { target_player, .. } | Action::HintRank { target_player, .. } => Some(target_player),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Play { slot } => write!(f, "play {slot}"),
            Action::Discard { slot } => write!(f, "discard {slot}"),
            Action::HintColor { target_player, color } => write!(f, "hint p{target_player} {color}"),
            Action::HintRank { target_player, rank } => write!(f, "hint p{target_player} {rank}"),
        }
    }
}

/// Summary of the previous move, visible to every player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveRecord {
    pub actor: usize,
    pub action: Action,
    /// Slots marked by a hint.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub revealed: Vec<usize>,
    /// Card played or discarded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub card: Option<Card>,
    #[serde(default)]
    pub success: bool,
    #[serde(default)]
    pub info_token_added: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum GameEvent {
    Hinted {
        giver: usize,
        target: usize,
        slots: Vec<usize>,
    },
    /// Slots the hint did not match, so they lack the hinted color or rank.
    NegativeHint {
        target: usize,
        slots: Vec<usize>,
    },
    Played {
        player: usize,
        slot: usize,
        card: Card,
        success: bool,
    },
    LifeLost {
        remaining: u8,
    },
    InfoTokenRestored,
    Discarded {
        player: usize,
        slot: usize,
        card: Card,
    },
    Drew {
        player: usize,
    },
    DeckExhausted,
    GameOver {
        cause: TerminalCause,
        score: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCause {
    None,
    Complete,
    Bombed,
    DeckExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameState {
    pub num_players: usize,
    pub hands: Vec<PlayerHand>,
    pub draw_pile: Vec<Card>,
    pub discard_pile: CardMultiset,
    pub fireworks: BTreeMap<Color, u8>,
    pub info_tokens: u8,
    pub life_tokens: u8,
    pub current_player: usize,
    pub turns_after_deck_empty: usize,
    pub rng_seed: u64,
    #[serde(default)]
    pub turn: u32,
    #[serde(default)]
    pub last_move: Option<MoveRecord>,
    pub config: GameConfig,
}

/// Deals a standard game.
pub fn new_game(num_players: usize, seed: u64) -> Result<GameState, GameError> {
    if !(MIN_PLAYERS..=MAX_PLAYERS).contains(&num_players) {
        return Err(GameError::InvalidPlayerCount(num_players));
    }
    new_game_with(num_players, seed, GameConfig::standard(num_players))
}

/// Deals a game with an explicit deck, hand size and scoring rule.
pub fn new_game_with(num_players: usize, seed: u64, config: GameConfig) -> Result<GameState, GameError> {
    if !(MIN_PLAYERS..=MAX_PLAYERS).contains(&num_players) {
        return Err(GameError::InvalidPlayerCount(num_players));
    }
    let needed = (num_players * config.hand_size) as u32;
    if config.deck.total() < needed {
        return Err(GameError::DeckTooSmall {
            available: config.deck.total(),
            needed,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut deck = config.deck.to_cards();
    deck.shuffle(&mut rng);
    let mut pile = deck.into_iter();
    let hands = (0..num_players)
        .map(|_| PlayerHand {
            slots: pile.by_ref().take(config.hand_size).map(Slot::fresh).collect(),
        })
        .collect();
    Ok(GameState {
        num_players,
        hands,
        draw_pile: pile.collect(),
        discard_pile: CardMultiset::empty(),
        fireworks: Color::ALL.iter().map(|&c| (c, 0)).collect(),
        info_tokens: MAX_INFO_TOKENS,
        life_tokens: MAX_LIFE_TOKENS,
        current_player: 0,
        turns_after_deck_empty: 0,
        rng_seed: seed,
        turn: 0,
        last_move: None,
        config,
    })
}

impl GameState {
    pub fn firework(&self, color: Color) -> u8 {
        self.fireworks.get(&color).copied().unwrap_or(0)
    }

    /// Whether `card` is the next card its firework needs.
    pub fn is_playable(&self, card: Card) -> bool {
        card.rank.value() == self.firework(card.color) + 1
    }

    /// Cards sitting on the firework piles.
    pub fn fireworks_cards(&self) -> CardMultiset {
        fireworks_as_cards(&self.fireworks)
    }

    /// Highest rank present in the base deck for `color`.
    pub fn max_rank(&self, color: Color) -> u8 {
        max_rank_in(&self.config.deck, color)
    }

    pub fn fireworks_score(&self) -> u32 {
        self.fireworks.values().map(|&v| v as u32).sum()
    }

    /// Every card in the game: hands, draw pile, discards and fireworks.
    pub fn all_cards(&self) -> CardMultiset {
        let mut all = self.discard_pile.union(&self.fireworks_cards());
        for hand in &self.hands {
            for slot in &hand.slots {
                all.insert(slot.card);
            }
        }
        for &c in &self.draw_pile {
            all.insert(c);
        }
        all
    }

    /// Canonical JSON encoding; identical states give identical bytes.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("game state serializes")
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn state_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }

    pub fn is_terminal(&self) -> bool {
        score_and_terminal(self).terminal
    }
}

pub(crate) fn fireworks_as_cards(fireworks: &BTreeMap<Color, u8>) -> CardMultiset {
    let mut m = CardMultiset::empty();
    for (&color, &top) in fireworks {
        for r in 1..=top {
            m.insert(Card::new(color, r));
        }
    }
    m
}

pub(crate) fn max_rank_in(deck: &CardMultiset, color: Color) -> u8 {
    Rank::all()
        .filter(|&r| deck.count(Card { color, rank: r }) > 0)
        .map(Rank::value)
        .max()
        .unwrap_or(0)
}

/// Legal moves for the player to act, in a fixed order: plays, discards,
/// color hints, rank hints. Empty on a terminal state.
pub fn legal_actions(state: &GameState) -> Vec<Action> {
    if state.is_terminal() {
        return Vec::new();
    }
    let me = state.current_player;
    let live = state.hands[me].len();
    let mut out: Vec<Action> = (0..live).map(|slot| Action::Play { slot }).collect();
    if state.info_tokens < MAX_INFO_TOKENS {
        out.extend((0..live).map(|slot| Action::Discard { slot }));
    }
    if state.info_tokens > 0 {
        for offset in 1..state.num_players {
            let target = (me + offset) % state.num_players;
            let hand = &state.hands[target];
            for color in Color::ALL {
                if hand.slots.iter().any(|s| s.card.color == color) {
                    out.push(Action::HintColor {
                        target_player: target,
                        color,
                    });
                }
            }
        }
        for offset in 1..state.num_players {
            let target = (me + offset) % state.num_players;
            let hand = &state.hands[target];
            for rank in Rank::all() {
                if hand.slots.iter().any(|s| s.card.rank == rank) {
                    out.push(Action::HintRank {
                        target_player: target,
                        rank,
                    });
                }
            }
        }
    }
    out
}

fn check_legal(state: &GameState, action: &Action) -> Result<(), GameError> {
    let illegal = |msg: String| Err(GameError::IllegalAction(msg));
    if state.is_terminal() {
        return illegal("game is over".into());
    }
    let me = state.current_player;
    match *action {
        Action::Play { slot } => {
            if slot >= state.hands[me].len() {
                return illegal(format!("slot {slot} is not in the hand"));
            }
        }
        Action::Discard { slot } => {
            if slot >= state.hands[me].len() {
                return illegal(format!("slot {slot} is not in the hand"));
            }
            if state.info_tokens >= MAX_INFO_TOKENS {
                return illegal("cannot discard with all info tokens available".into());
            }
        }
        Action::HintColor { target_player, .. } | Action::HintRank { target_player, .. } => {
            if state.info_tokens == 0 {
                return illegal("no info tokens left".into());
            }
            if target_player >= state.num_players {
                return illegal(format!("no player {target_player}"));
            }
            if target_player == me {
                return illegal("cannot hint yourself".into());
            }
            let matches = state.hands[target_player].slots.iter().any(|s| hint_matches(action, s.card));
            if !matches {
                return illegal(format!("{action} matches no card"));
            }
        }
    }
    Ok(())
}

fn hint_matches(action: &Action, card: Card) -> bool {
    match *action {
        Action::HintColor { color, .. } => card.color == color,
        Action::HintRank { rank, .. } => card.rank == rank,
        _ => false,
    }
}

/// Applies a legal action and returns the successor state with the events it
/// produced. Illegal actions are rejected and the input is left untouched.
pub fn apply_action(state: &GameState, action: Action) -> Result<(GameState, Vec<GameEvent>), GameError> {
    check_legal(state, &action)?;
    let mut next = state.clone();
    let mut events = Vec::new();
    let me = state.current_player;
    let deck_was_empty = state.draw_pile.is_empty();
    let mut record = MoveRecord {
        actor: me,
        action,
        revealed: Vec::new(),
        card: None,
        success: false,
        info_token_added: false,
    };

    match action {
        Action::HintColor { target_player, .. } | Action::HintRank { target_player, .. } => {
            next.info_tokens -= 1;
            let mut hit = Vec::new();
            let mut missed = Vec::new();
            for (k, slot) in next.hands[target_player].slots.iter_mut().enumerate() {
                if hint_matches(&action, slot.card) {
                    match action {
                        Action::HintColor { color, .. } => slot.knowledge.hinted_color = Some(color),
                        Action::HintRank { rank, .. } => slot.knowledge.hinted_rank = Some(rank),
                        _ => unreachable!(),
                    }
                    hit.push(k);
                } else {
                    missed.push(k);
                }
            }
            record.revealed = hit.clone();
            events.push(GameEvent::Hinted {
                giver: me,
                target: target_player,
                slots: hit,
            });
            if !missed.is_empty() {
                events.push(GameEvent::NegativeHint {
                    target: target_player,
                    slots: missed,
                });
            }
        }
        Action::Play { slot } => {
            let card = next.hands[me].slots.remove(slot).card;
            record.card = Some(card);
            if state.is_playable(card) {
                next.fireworks.insert(card.color, card.rank.value());
                record.success = true;
                if card.rank.value() == next.max_rank(card.color) && next.info_tokens < MAX_INFO_TOKENS {
                    next.info_tokens += 1;
                    record.info_token_added = true;
                    events.push(GameEvent::Played {
                        player: me,
                        slot,
                        card,
                        success: true,
                    });
                    events.push(GameEvent::InfoTokenRestored);
                } else {
                    events.push(GameEvent::Played {
                        player: me,
                        slot,
                        card,
                        success: true,
                    });
                }
            } else {
                next.discard_pile.insert(card);
                next.life_tokens -= 1;
                events.push(GameEvent::Played {
                    player: me,
                    slot,
                    card,
                    success: false,
                });
                events.push(GameEvent::LifeLost {
                    remaining: next.life_tokens,
                });
            }
            draw(&mut next, me, &mut events);
        }
        Action::Discard { slot } => {
            let card = next.hands[me].slots.remove(slot).card;
            record.card = Some(card);
            next.discard_pile.insert(card);
            next.info_tokens += 1;
            record.info_token_added = true;
            events.push(GameEvent::Discarded { player: me, slot, card });
            draw(&mut next, me, &mut events);
        }
    }

    if deck_was_empty {
        next.turns_after_deck_empty += 1;
    }
    next.current_player = (me + 1) % next.num_players;
    next.turn += 1;
    next.last_move = Some(record);

    let outcome = score_and_terminal(&next);
    if outcome.terminal {
        events.push(GameEvent::GameOver {
            cause: outcome.cause,
            score: outcome.score,
        });
    }
    Ok((next, events))
}

fn draw(state: &mut GameState, player: usize, events: &mut Vec<GameEvent>) {
    if state.draw_pile.is_empty() {
        return;
    }
    let card = state.draw_pile.remove(0);
    state.hands[player].slots.push(Slot::fresh(card));
    events.push(GameEvent::Drew { player });
    if state.draw_pile.is_empty() {
        events.push(GameEvent::DeckExhausted);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub score: u32,
    pub terminal: bool,
    pub cause: TerminalCause,
}

/// Current score and whether the game has ended.
pub fn score_and_terminal(state: &GameState) -> Outcome {
    let fireworks = state.fireworks_score();
    if state.life_tokens == 0 {
        let score = match state.config.bomb_scoring {
            BombScoring::Zero => 0,
            BombScoring::Fireworks => fireworks,
        };
        return Outcome {
            score,
            terminal: true,
            cause: TerminalCause::Bombed,
        };
    }
    if Color::ALL.iter().all(|&c| state.firework(c) >= state.max_rank(c)) {
        return Outcome {
            score: fireworks,
            terminal: true,
            cause: TerminalCause::Complete,
        };
    }
    if state.draw_pile.is_empty() && state.turns_after_deck_empty >= state.num_players {
        return Outcome {
            score: fireworks,
            terminal: true,
            cause: TerminalCause::DeckExhausted,
        };
    }
    Outcome {
        score: fireworks,
        terminal: false,
        cause: TerminalCause::None,
    }
}

/// Another player's hand as seen by the viewer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VisibleHand {
    pub player: usize,
    pub slots: Vec<Slot>,
}

impl VisibleHand {
    pub fn cards(&self) -> Vec<Card> {
        self.slots.iter().map(|s| s.card).collect()
    }

    pub fn knowledge(&self) -> Vec<SlotKnowledge> {
        self.slots.iter().map(|s| s.knowledge).collect()
    }
}

/// One player's view of the game. Own card identities are absent.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Observation {
    pub viewer: usize,
    pub num_players: usize,
    /// Hands of every other player, in turn order starting after the viewer.
    pub others_hands: Vec<VisibleHand>,
    pub own_knowledge: Vec<SlotKnowledge>,
    pub discard_pile: CardMultiset,
    pub fireworks: BTreeMap<Color, u8>,
    pub info_tokens: u8,
    pub life_tokens: u8,
    pub current_player: usize,
    pub deck_size: usize,
    pub base_deck: CardMultiset,
    pub hand_size: usize,
    #[serde(default)]
    pub last_move: Option<MoveRecord>,
}

impl Observation {
    pub fn hand_of(&self, player: usize) -> Option<&VisibleHand> {
        self.others_hands.iter().find(|h| h.player == player)
    }

    pub fn fireworks_cards(&self) -> CardMultiset {
        fireworks_as_cards(&self.fireworks)
    }

    pub fn firework(&self, color: Color) -> u8 {
        self.fireworks.get(&color).copied().unwrap_or(0)
    }

    pub fn is_playable(&self, card: Card) -> bool {
        card.rank.value() == self.firework(card.color) + 1
    }

    /// Whether `card` can never be played: its firework is past it, or a
    /// lower rank of its color is gone for good.
    pub fn is_dead(&self, card: Card) -> bool {
        let top = self.firework(card.color);
        if card.rank.value() <= top {
            return true;
        }
        (top + 1..card.rank.value()).any(|r| {
            let needed = Card::new(card.color, r);
            self.discard_pile.count(needed) >= self.base_deck.count(needed)
        })
    }

    /// Applies a hint's positive marks to the visible target hand. Used to
    /// simulate what a teammate would know after a hint.
    pub fn with_hint(&self, action: &Action) -> Option<Observation> {
        let target = action.hint_target()?;
        let mut next = self.clone();
        let hand = next.others_hands.iter_mut().find(|h| h.player == target)?;
        let mut any = false;
        for slot in &mut hand.slots {
            if hint_matches(action, slot.card) {
                any = true;
                match *action {
                    Action::HintColor { color, .. } => slot.knowledge.hinted_color = Some(color),
                    Action::HintRank { rank, .. } => slot.knowledge.hinted_rank = Some(rank),
                    _ => unreachable!(),
                }
            }
        }
        any.then_some(next)
    }
}

/// Projects the state onto what `player` can see.
pub fn observe(state: &GameState, player: usize) -> Result<Observation, GameError> {
    if player >= state.num_players {
        return Err(GameError::InvalidPlayer(player));
    }
    let others_hands = (1..state.num_players)
        .map(|offset| {
            let p = (player + offset) % state.num_players;
            VisibleHand {
                player: p,
                slots: state.hands[p].slots.clone(),
            }
        })
        .collect();
    Ok(Observation {
        viewer: player,
        num_players: state.num_players,
        others_hands,
        own_knowledge: state.hands[player].knowledge(),
        discard_pile: state.discard_pile,
        fireworks: state.fireworks.clone(),
        info_tokens: state.info_tokens,
        life_tokens: state.life_tokens,
        current_player: state.current_player,
        deck_size: state.draw_pile.len(),
        base_deck: state.config.deck,
        hand_size: state.config.hand_size,
        last_move: state.last_move.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn card(s: &str) -> Card {
        s.parse().unwrap()
    }

    fn hand(cards: &[&str]) -> PlayerHand {
        PlayerHand {
            slots: cards.iter().map(|c| Slot::fresh(card(c))).collect(),
        }
    }

    #[test]
    fn two_player_deal_leaves_forty_cards() {
        let s = new_game(2, 11).unwrap();
        assert_eq!(s.hands.len(), 2);
        assert!(s.hands.iter().all(|h| h.len() == 5));
        assert_eq!(s.draw_pile.len(), 40);
        assert_eq!(s.info_tokens, 8);
        assert_eq!(s.life_tokens, 3);
        assert!(s.fireworks.values().all(|&v| v == 0));
        assert_eq!(s.all_cards(), CardMultiset::standard_deck());
    }

    #[test]
    fn hand_size_depends_on_player_count() {
        for (n, eta) in [(2, 5), (3, 5), (4, 4), (5, 4)] {
            let s = new_game(n, 3).unwrap();
            assert!(s.hands.iter().all(|h| h.len() == eta), "{n} players");
            assert_eq!(s.draw_pile.len(), 50 - n * eta);
        }
    }

    #[test]
    fn rejects_bad_player_counts() {
        assert_eq!(new_game(1, 0), Err(GameError::InvalidPlayerCount(1)));
        assert_eq!(new_game(6, 0), Err(GameError::InvalidPlayerCount(6)));
    }

    #[test]
    fn same_seed_same_deal() {
        let a = new_game(2, 99).unwrap();
        let b = new_game(2, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        assert_ne!(a.draw_pile, new_game(2, 100).unwrap().draw_pile);
    }

    #[test]
    fn no_hints_without_tokens() {
        let mut s = new_game(2, 5).unwrap();
        s.info_tokens = 0;
        assert!(legal_actions(&s).iter().all(|a| !a.is_hint()));
    }

    #[test]
    fn only_true_hints_are_legal() {
        let mut s = new_game(2, 5).unwrap();
        s.hands[1] = hand(&["G3", "G4", "W1", "W2", "B2"]);
        let legal = legal_actions(&s);
        assert!(!legal.contains(&Action::HintColor {
            target_player: 1,
            color: Color::R
        }));
        assert!(legal.contains(&Action::HintColor {
            target_player: 1,
            color: Color::G
        }));
        let err = apply_action(
            &s,
            Action::HintColor {
                target_player: 1,
                color: Color::R,
            },
        )
        .unwrap_err();
        assert!(matches!(err, GameError::IllegalAction(_)));
    }

    #[test]
    fn fresh_two_player_action_count() {
        let s = new_game(2, 21).unwrap();
        let partner = &s.hands[1];
        let mut colors: Vec<_> = partner.slots.iter().map(|s| s.card.color).collect();
        colors.sort();
        colors.dedup();
        let mut ranks: Vec<_> = partner.slots.iter().map(|s| s.card.rank).collect();
        ranks.sort();
        ranks.dedup();
        let legal = legal_actions(&s);
        assert_eq!(legal.iter().filter(|a| matches!(a, Action::Play { .. })).count(), 5);
        assert_eq!(legal.iter().filter(|a| matches!(a, Action::Discard { .. })).count(), 0);
        assert_eq!(legal.len(), 5 + colors.len() + ranks.len());
    }

    #[test]
    fn color_hint_marks_matching_slots_only() {
        let mut s = new_game(2, 5).unwrap();
        s.hands[1] = hand(&["R3", "G3", "R4", "W1", "W2"]);
        let (next, events) = apply_action(
            &s,
            Action::HintColor {
                target_player: 1,
                color: Color::R,
            },
        )
        .unwrap();
        let k = next.hands[1].knowledge();
        assert_eq!(k[0].hinted_color, Some(Color::R));
        assert_eq!(k[2].hinted_color, Some(Color::R));
        for i in [1, 3, 4] {
            assert_eq!(k[i], SlotKnowledge::UNKNOWN);
        }
        assert_eq!(next.info_tokens, 7);
        assert_eq!(next.current_player, 1);
        assert!(events.contains(&GameEvent::NegativeHint {
            target: 1,
            slots: vec![1, 3, 4]
        }));
    }

    #[test]
    fn playing_next_rank_builds_firework() {
        let mut s = new_game(2, 5).unwrap();
        s.hands[0] = hand(&["R1", "R3", "G1", "G2", "B1"]);
        let (next, _) = apply_action(&s, Action::Play { slot: 0 }).unwrap();
        assert_eq!(next.firework(Color::R), 1);
        assert_eq!(next.life_tokens, 3);
        assert_eq!(next.hands[0].len(), 5);
        // The replacement lands at the right, with no hints.
        assert_eq!(next.hands[0].slots[4].knowledge, SlotKnowledge::UNKNOWN);
        assert_eq!(next.hands[0].slots[0].card, card("R3"));
    }

    #[test]
    fn misplay_costs_a_life() {
        let mut s = new_game(2, 5).unwrap();
        s.fireworks.insert(Color::R, 1);
        s.hands[0] = hand(&["R3", "R4", "G1", "G2", "B1"]);
        let (next, events) = apply_action(&s, Action::Play { slot: 0 }).unwrap();
        assert_eq!(next.life_tokens, 2);
        assert_eq!(next.firework(Color::R), 1);
        assert_eq!(next.discard_pile.count(card("R3")), 1);
        assert!(events.contains(&GameEvent::LifeLost { remaining: 2 }));
    }

    #[test]
    fn rank_five_restores_a_token() {
        let mut s = new_game(2, 5).unwrap();
        s.fireworks.insert(Color::G, 4);
        s.info_tokens = 3;
        s.hands[0] = hand(&["G5", "R4", "G1", "G2", "B1"]);
        let (next, _) = apply_action(&s, Action::Play { slot: 0 }).unwrap();
        assert_eq!(next.info_tokens, 4);
    }

    #[test]
    fn discard_gains_token_and_is_blocked_at_eight() {
        let s = new_game(2, 5).unwrap();
        assert!(apply_action(&s, Action::Discard { slot: 0 }).is_err());
        let mut t = s.clone();
        t.info_tokens = 5;
        let (next, _) = apply_action(&t, Action::Discard { slot: 2 }).unwrap();
        assert_eq!(next.info_tokens, 6);
        assert_eq!(next.discard_pile.total(), 1);
    }

    #[test]
    fn illegal_action_leaves_state_untouched() {
        let s = new_game(2, 5).unwrap();
        let before = s.clone();
        assert!(apply_action(&s, Action::Play { slot: 9 }).is_err());
        assert!(apply_action(
            &s,
            Action::HintRank {
                target_player: 0,
                rank: Rank::new(1).unwrap()
            }
        )
        .is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn observation_hides_own_cards() {
        let s = new_game(3, 8).unwrap();
        let obs = observe(&s, 0).unwrap();
        assert_eq!(obs.others_hands.iter().map(|h| h.player).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(obs.own_knowledge, s.hands[0].knowledge());
        let json = serde_json::to_string(&obs).unwrap();
        // Other hands appear, but the viewer's own cards do not.
        for slot in &s.hands[1].slots {
            assert!(json.contains(&format!("\"{}\"", slot.card)));
        }
        assert!(observe(&s, 3).is_err());
    }

    #[test]
    fn new_card_after_hint_has_no_knowledge() {
        let mut s = new_game(2, 5).unwrap();
        s.hands[1] = hand(&["R3", "G3", "R4", "W1", "W2"]);
        let (s, _) = apply_action(
            &s,
            Action::HintColor {
                target_player: 1,
                color: Color::R,
            },
        )
        .unwrap();
        // Player 1 discards the unhinted G3; the hinted slots shift left.
        let (s, _) = apply_action(&s, Action::Discard { slot: 1 }).unwrap();
        let obs = observe(&s, 1).unwrap();
        assert_eq!(obs.own_knowledge.len(), 5);
        assert_eq!(obs.own_knowledge[0].hinted_color, Some(Color::R));
        assert_eq!(obs.own_knowledge[1].hinted_color, Some(Color::R));
        assert_eq!(obs.own_knowledge[4], SlotKnowledge::UNKNOWN);
    }

    #[test]
    fn terminal_conditions() {
        let s = new_game(2, 1).unwrap();
        assert_eq!(
            score_and_terminal(&s),
            Outcome {
                score: 0,
                terminal: false,
                cause: TerminalCause::None
            }
        );

        let mut full = s.clone();
        for c in Color::ALL {
            full.fireworks.insert(c, 5);
        }
        assert_eq!(
            score_and_terminal(&full),
            Outcome {
                score: 25,
                terminal: true,
                cause: TerminalCause::Complete
            }
        );
        assert!(legal_actions(&full).is_empty());

        let mut bombed = s.clone();
        bombed.fireworks.insert(Color::R, 3);
        bombed.life_tokens = 0;
        assert_eq!(score_and_terminal(&bombed).score, 0);
        assert_eq!(score_and_terminal(&bombed).cause, TerminalCause::Bombed);
        bombed.config.bomb_scoring = BombScoring::Fireworks;
        assert_eq!(score_and_terminal(&bombed).score, 3);
    }

    #[test]
    fn deck_exhaustion_gives_each_player_one_more_turn() {
        let mut s = new_game(2, 4).unwrap();
        s.draw_pile.truncate(1);
        s.info_tokens = 4;
        let (s, events) = apply_action(&s, Action::Discard { slot: 0 }).unwrap();
        assert!(events.contains(&GameEvent::DeckExhausted));
        assert!(!s.is_terminal());
        let (s, _) = apply_action(&s, Action::Discard { slot: 0 }).unwrap();
        assert!(!s.is_terminal());
        assert_eq!(s.hands[1].len(), 4);
        let (s, _) = apply_action(&s, Action::Discard { slot: 0 }).unwrap();
        assert!(s.is_terminal());
        assert_eq!(score_and_terminal(&s).cause, TerminalCause::DeckExhausted);
    }

    #[test]
    fn dead_card_detection() {
        let mut s = new_game(2, 4).unwrap();
        s.fireworks.insert(Color::R, 2);
        s.discard_pile.insert(card("G2"));
        s.discard_pile.insert(card("G2"));
        let obs = observe(&s, 0).unwrap();
        assert!(obs.is_dead(card("R1")));
        assert!(obs.is_dead(card("R2")));
        assert!(!obs.is_dead(card("R3")));
        assert!(obs.is_dead(card("G4")));
        assert!(!obs.is_dead(card("G1")));
    }
}
