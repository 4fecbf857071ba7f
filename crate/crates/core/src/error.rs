use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("invalid card {0:?}, expected a color letter followed by a rank, e.g. \"R3\"")]
    Card(String),
    #[error("invalid color {0:?}")]
    Color(String),
    #[error("invalid rank {0:?}")]
    Rank(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("player count must be between 2 and 5, got {0}")]
    InvalidPlayerCount(usize),
    #[error("player index {0} out of range")]
    InvalidPlayer(usize),
    #[error("deck holds {available} cards but the deal needs {needed}")]
    DeckTooSmall { available: u32, needed: u32 },
    #[error("illegal action: {0}")]
    IllegalAction(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    #[error("observation is inconsistent with the base deck: {0}")]
    CorruptedState(String),
    #[error("slot {slot} has no card consistent with its knowledge")]
    ImpossibleKnowledge { slot: usize },
    #[error("no hand is consistent with the observed knowledge")]
    NoConsistentHand,
    #[error("hand and knowledge lengths differ ({hand} vs {knowledge})")]
    LengthMismatch { hand: usize, knowledge: usize },
    #[error("rejection sampler accepted {accepted} of {requested} hands within {attempts} attempts")]
    RejectionBudget {
        requested: usize,
        accepted: usize,
        attempts: usize,
    },
    #[error("hand enumeration would visit {size} hands, above the budget of {budget}")]
    EnumerationBudget { size: u128, budget: u128 },
    #[error("every sampled hand carried zero weight")]
    AllZeroWeights,
    #[error("invalid target player {0}")]
    InvalidTarget(usize),
    #[error("sample count must be at least 1")]
    NoSamples,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("belief row sums to {sum}, expected 1")]
    MalformedMarginal { sum: f64 },
    #[error("belief row has a negative or non-finite entry")]
    InvalidEntry,
    #[error("Wasserstein order must be at least 1, got {0}")]
    InvalidOrder(f64),
    #[error("reward weight must be non-negative, got {0}")]
    InvalidBeta(f64),
    #[error("teammate {0} present in one belief map but not the other")]
    KeyMismatch(usize),
    #[error("no true hand supplied for teammate {0}")]
    MissingHand(usize),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error("external policy protocol violation: {0}")]
    Protocol(String),
    #[error("external policy timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
