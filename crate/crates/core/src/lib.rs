//! Hanabi rules engine with theory-of-mind hand beliefs.
//!
//! * [`game`]: the game state machine.
//! * [`belief`]: hint-conditioned hand probabilities, own-hand marginals and
//!   nested (teammate) beliefs.
//! * [`reward`]: Wasserstein-based communication reward.
//! * [`encoding`]: observation vectors with belief blocks.
//! * [`harness`]: self-play episodes, batches and policies.
//! * [`oracle`]: exhaustive normalization checks on small decks.
//! * `cli`: the `hanabi-tom` command line (feature `cli`).

pub mod belief;
pub mod encoding;
pub mod card;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod harness;
pub mod oracle;
pub mod reward;

pub use card::{Card, CardMultiset, Color, Rank};
pub use game::{Action, GameState, Observation, SlotKnowledge};
