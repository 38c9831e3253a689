//! Conflict mitigation: priority-based blocking and priority learning.

pub mod bandit;
pub mod policy;
pub mod reward;

use thiserror::Error;

pub use bandit::{
    arm_label, learn_priorities, permutations, BanditConfig, EpisodeRecord, EpisodeRunner, LearnOutcome, MAX_XAPPS,
};
pub use policy::{resolve_conflict, BlockRule, PriorityPolicy, TargetPattern};
pub use reward::{compute_reward, EpisodeAggregate, RewardConfig};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MitigateError {
    #[error("too many xApps for ordering search ({0}, max {MAX_XAPPS})")]
    TooManyXApps(usize),
    #[error("epsilon must be in [0, 1], got {0}")]
    InvalidEpsilon(f64),
    #[error("seed schedule is empty")]
    EmptySeedSchedule,
    #[error("reward weights must be non-negative with at least one positive")]
    InvalidWeights,
}
