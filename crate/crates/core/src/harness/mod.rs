//! Self-play episodes, seeded batch evaluation and score statistics.

mod batch;
mod episode;
mod external;
mod policy;

pub use batch::{
    derive_seed, episode_config, run_batch, run_batch_with, stats_csv, stats_csv_row, BatchResult, EpisodeStats,
    STATS_CSV_HEADER,
};
pub use episode::{record_turn, run_episode, EpisodeConfig, Trajectory, TurnRecord, DEFAULT_GAMMA};
pub use external::{ExternalPolicy, PolicyRequest, PolicyResponse, DEFAULT_TIMEOUT};
pub use policy::{
    simulated_hint_reward, teammate_beliefs, BeliefGreedyPolicy, Decision, GreedyThresholds, Policy, PolicySpec,
    RandomPolicy,
};
