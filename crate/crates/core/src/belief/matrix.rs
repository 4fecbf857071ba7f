use std::fmt::Write as _;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::card::{Card, CardMultiset, NUM_CARD_TYPES};
use crate::error::BeliefError;
use crate::game::SlotKnowledge;

pub type BeliefRow = [f64; NUM_CARD_TYPES];

/// Per-slot card marginals, one row of 25 probabilities per slot.
///
/// Serializes as a flat row-major array of `slots * 25` numbers.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct BeliefMatrix {
    rows: Vec<BeliefRow>,
}

impl BeliefMatrix {
    pub fn from_rows(rows: Vec<BeliefRow>) -> BeliefMatrix {
        BeliefMatrix { rows }
    }

    pub fn from_flat(values: &[f64]) -> Option<BeliefMatrix> {
        if !values.len().is_multiple_of(NUM_CARD_TYPES) {
            return None;
        }
        let rows = values
            .chunks_exact(NUM_CARD_TYPES)
            .map(|c| c.try_into().expect("chunk of 25"))
            .collect();
        Some(BeliefMatrix { rows })
    }

    /// One-hot rows for a known hand.
    pub fn one_hot(hand: &[Card]) -> BeliefMatrix {
        let rows = hand
            .iter()
            .map(|c| {
                let mut row = [0.0; NUM_CARD_TYPES];
                row[c.index()] = 1.0;
                row
            })
            .collect();
        BeliefMatrix { rows }
    }

    pub fn rows(&self) -> &[BeliefRow] {
        &self.rows
    }

    pub fn row(&self, slot: usize) -> &BeliefRow {
        &self.rows[slot]
    }

    pub fn num_slots(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, slot: usize, card: Card) -> f64 {
        self.rows[slot][card.index()]
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.rows.iter().flat_map(|r| r.iter().copied()).collect()
    }

    /// Largest deviation of any row sum from 1.
    pub fn max_row_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Total-variation distance between matching rows.
    pub fn row_tv(&self, other: &BeliefMatrix) -> Vec<f64> {
        self.rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| 0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .collect()
    }

    /// CSV with a `slot` column followed by one column per card type.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("slot");
        for c in Card::all() {
            write!(out, ",{c}").unwrap();
        }
        out.push('\n');
        for (k, row) in self.rows.iter().enumerate() {
            write!(out, "{k}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for BeliefMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.rows.iter().flat_map(|r| r.iter()))
    }
}

impl<'de> Deserialize<'de> for BeliefMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let flat = Vec::<f64>::deserialize(deserializer)?;
        BeliefMatrix::from_flat(&flat).ok_or_else(|| de::Error::custom("belief length is not a multiple of 25"))
    }
}

/// Row `k` is the pool restricted to slot `k`'s knowledge, normalized.
pub fn slot_marginals(pool: &CardMultiset, knowledge: &[SlotKnowledge]) -> Result<BeliefMatrix, BeliefError> {
    let rows = knowledge
        .iter()
        .enumerate()
        .map(|(slot, &h)| restricted_row(pool, h).ok_or(BeliefError::ImpossibleKnowledge { slot }))
        .collect::<Result<_, _>>()?;
    Ok(BeliefMatrix { rows })
}

/// Normalized restriction of `pool` to `h`, or `None` if nothing is left.
pub(crate) fn restricted_row(pool: &CardMultiset, h: SlotKnowledge) -> Option<BeliefRow> {
    let mut row = [0.0; NUM_CARD_TYPES];
    let mut total = 0u32;
    for (c, n) in pool.iter() {
        if h.admits(c) {
            row[c.index()] = n as f64;
            total += n as u32;
        }
    }
    if total == 0 {
        return None;
    }
    let t = total as f64;
    row.iter_mut().for_each(|v| *v /= t);
    Some(row)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_json_round_trip() {
        let m = BeliefMatrix::one_hot(&["R1".parse().unwrap(), "Y5".parse().unwrap()]);
        let json = serde_json::to_string(&m).unwrap();
        let v: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(v.len(), 50);
        assert_eq!(v[0], 1.0);
        assert_eq!(v[49], 1.0);
        assert_eq!(serde_json::from_str::<BeliefMatrix>(&json).unwrap(), m);
        assert!(serde_json::from_str::<BeliefMatrix>("[0.5, 0.5]").is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let m = BeliefMatrix::one_hot(&["G2".parse().unwrap()]);
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("slot,R1,R2"));
        assert_eq!(lines[1].split(',').count(), 26);
    }

    #[test]
    fn empty_restriction_is_an_error() {
        let pool = CardMultiset::from_cards(&["R1".parse().unwrap()]);
        let err = slot_marginals(&pool, &[SlotKnowledge::UNKNOWN, SlotKnowledge::new(None, Some(3))]).unwrap_err();
        assert_eq!(err, BeliefError::ImpossibleKnowledge { slot: 1 });
    }
}
