//! Cards, colors, ranks and card multisets.
//!
//! Card types are indexed color-major, rank-minor: `R1, R2, .., R5, G1, .., Y5`.
//! That index is the canonical order for every 25-wide vector in the crate.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::ParseError;

pub const NUM_COLORS: usize = 5;
pub const NUM_RANKS: usize = 5;
pub const NUM_CARD_TYPES: usize = NUM_COLORS * NUM_RANKS;

/// Copies of each rank in the standard deck, ranks 1 through 5.
pub const STANDARD_RANK_COUNTS: [u8; NUM_RANKS] = [3, 2, 2, 2, 1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Color {
    R,
    G,
    B,
    W,
    Y,
}

impl Color {
    pub const ALL: [Color; NUM_COLORS] = [Color::R, Color::G, Color::B, Color::W, Color::Y];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(idx: usize) -> Option<Color> {
        Color::ALL.get(idx).copied()
    }

    pub fn letter(self) -> char {
        match self {
            Color::R => 'R',
            Color::G => 'G',
            Color::B => 'B',
            Color::W => 'W',
            Color::Y => 'Y',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c.to_ascii_uppercase() {
            'R' => Some(Color::R),
            'G' => Some(Color::G),
            'B' => Some(Color::B),
            'W' => Some(Color::W),
            'Y' => Some(Color::Y),
            _ => None,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Color {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Color::from_letter(c).ok_or_else(|| ParseError::Color(s.to_string())),
            _ => Err(ParseError::Color(s.to_string())),
        }
    }
}

/// Card rank, 1 through 5.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Rank(u8);

impl Rank {
    pub fn new(value: u8) -> Option<Rank> {
        (1..=NUM_RANKS as u8).contains(&value).then_some(Rank(value))
    }

    pub fn all() -> impl Iterator<Item = Rank> {
        (1..=NUM_RANKS as u8).map(Rank)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// Zero-based position, rank 1 maps to 0.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl TryFrom<u8> for Rank {
    type Error = ParseError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Rank::new(value).ok_or_else(|| ParseError::Rank(value.to_string()))
    }
}

impl From<Rank> for u8 {
    fn from(r: Rank) -> u8 {
        r.0
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rank {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<u8>()
            .ok()
            .and_then(Rank::new)
            .ok_or_else(|| ParseError::Rank(s.to_string()))
    }
}

/// A single card. Ordered color-major, rank-minor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card {
    pub color: Color,
    pub rank: Rank,
}

impl Card {
    pub fn new(color: Color, rank: u8) -> Card {
        Card {
            color,
            rank: Rank::new(rank).expect("rank out of range"),
        }
    }

    pub fn index(self) -> usize {
        self.color.index() * NUM_RANKS + self.rank.index()
    }

    pub fn from_index(idx: usize) -> Option<Card> {
        if idx >= NUM_CARD_TYPES {
            return None;
        }
        Some(Card {
            color: Color::ALL[idx / NUM_RANKS],
            rank: Rank((idx % NUM_RANKS) as u8 + 1),
        })
    }

    /// All 25 card types in canonical order.
    pub fn all() -> impl Iterator<Item = Card> {
        (0..NUM_CARD_TYPES).map(|i| Card::from_index(i).unwrap())
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.color, self.rank)
    }
}

impl FromStr for Card {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let (Some(c), Some(r), None) = (chars.next(), chars.next(), chars.next()) else {
            return Err(ParseError::Card(s.to_string()));
        };
        let color = Color::from_letter(c).ok_or_else(|| ParseError::Card(s.to_string()))?;
        let rank = r
            .to_digit(10)
            .and_then(|d| Rank::new(d as u8))
            .ok_or_else(|| ParseError::Card(s.to_string()))?;
        Ok(Card { color, rank })
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Multiset over the 25 card types.
///
/// Serializes as a JSON object keyed by card string in canonical order,
/// omitting zero counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct CardMultiset {
    counts: [u8; NUM_CARD_TYPES],
}

impl CardMultiset {
    pub fn empty() -> CardMultiset {
        CardMultiset::default()
    }

    /// The 50-card base deck.
    pub fn standard_deck() -> CardMultiset {
        CardMultiset::reduced_deck(NUM_COLORS, &STANDARD_RANK_COUNTS)
    }

    /// Deck using the first `colors` colors, with `rank_counts[r]` copies of
    /// rank `r + 1`. Ranks beyond `rank_counts.len()` are absent.
    pub fn reduced_deck(colors: usize, rank_counts: &[u8]) -> CardMultiset {
        let mut deck = CardMultiset::empty();
        for color in Color::ALL.iter().take(colors) {
            for (r, &n) in rank_counts.iter().take(NUM_RANKS).enumerate() {
                deck.counts[color.index() * NUM_RANKS + r] = n;
            }
        }
        deck
    }

    pub fn from_counts(counts: [u8; NUM_CARD_TYPES]) -> CardMultiset {
        CardMultiset { counts }
    }

    pub fn from_cards<'a>(cards: impl IntoIterator<Item = &'a Card>) -> CardMultiset {
        let mut m = CardMultiset::empty();
        for c in cards {
            m.insert(*c);
        }
        m
    }

    pub fn counts(&self) -> &[u8; NUM_CARD_TYPES] {
        &self.counts
    }

    pub fn count(&self, card: Card) -> u8 {
        self.counts[card.index()]
    }

    pub fn set(&mut self, card: Card, n: u8) {
        self.counts[card.index()] = n;
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().map(|&n| n as u32).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    pub fn insert(&mut self, card: Card) {
        self.counts[card.index()] += 1;
    }

    /// Removes one copy; returns false (and leaves the set unchanged) if absent.
    pub fn remove(&mut self, card: Card) -> bool {
        let slot = &mut self.counts[card.index()];
        if *slot == 0 {
            return false;
        }
        *slot -= 1;
        true
    }

    /// Non-zero entries in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (Card, u8)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &n)| n > 0)
            .map(|(i, &n)| (Card::from_index(i).unwrap(), n))
    }

    /// Expands to a sorted list of cards, one entry per copy.
    pub fn to_cards(&self) -> Vec<Card> {
        self.iter()
            .flat_map(|(c, n)| std::iter::repeat_n(c, n as usize))
            .collect()
    }

    pub fn union(&self, other: &CardMultiset) -> CardMultiset {
        let mut out = *self;
        for (a, b) in out.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        out
    }

    /// `self - other`, or `None` if any count would go negative.
    pub fn checked_sub(&self, other: &CardMultiset) -> Option<CardMultiset> {
        let mut out = *self;
        for (a, b) in out.counts.iter_mut().zip(other.counts.iter()) {
            *a = a.checked_sub(*b)?;
        }
        Some(out)
    }

    pub fn is_subset_of(&self, other: &CardMultiset) -> bool {
        self.counts.iter().zip(other.counts.iter()).all(|(a, b)| a <= b)
    }

    /// Sub-multiset of cards satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(Card) -> bool) -> CardMultiset {
        let mut out = CardMultiset::empty();
        for (i, &n) in self.counts.iter().enumerate() {
            if n > 0 && keep(Card::from_index(i).unwrap()) {
                out.counts[i] = n;
            }
        }
        out
    }
}

impl Serialize for CardMultiset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let nonzero = self.counts.iter().filter(|&&n| n > 0).count();
        let mut map = serializer.serialize_map(Some(nonzero))?;
        for (card, n) in self.iter() {
            map.serialize_entry(&card, &n)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for CardMultiset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct MultisetVisitor;

        impl<'de> Visitor<'de> for MultisetVisitor {
            type Value = CardMultiset;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from card strings to counts")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<CardMultiset, A::Error> {
                let mut m = CardMultiset::empty();
                while let Some((card, n)) = access.next_entry::<Card, u8>()? {
                    m.counts[card.index()] = m.counts[card.index()]
                        .checked_add(n)
                        .ok_or_else(|| de::Error::custom("card count overflow"))?;
                }
                Ok(m)
            }
        }

        deserializer.deserialize_map(MultisetVisitor)
    }
}
