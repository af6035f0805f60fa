use thiserror::Error;

pub type Result<T> = std::result::Result<T, CournotError>;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum CournotError {
    #[error("invalid sample space: {reason}")]
    InvalidSpace { reason: String },

    #[error("invalid event: {reason}")]
    InvalidEvent { reason: String },

    #[error("level {level} exceeds the representable range for a space of size {size}")]
    LevelTooLarge { level: u32, size: usize },

    #[error("sample spaces do not match")]
    SpaceMismatch,

    #[error("events live at different levels ({left} vs {right})")]
    LevelMismatch { left: u32, right: u32 },

    #[error("event list is empty")]
    EmptyList,

    #[error("weights sum to {got}, expected exactly 1")]
    SumNotOne { got: String },

    #[error("negative weight at outcome index {index}")]
    NegativeWeight { index: usize },

    #[error("probability {value} lies outside [0, 1]")]
    InvalidProbability { value: String },

    #[error("invalid interval: {reason}")]
    InvalidInterval { reason: String },

    #[error("threshold {value} lies outside (1/2, 1)")]
    ThresholdOutOfRange { value: String },

    #[error("enumerating {required} tuples exceeds the budget of {budget}")]
    BudgetExceeded { required: u64, budget: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid distribution: {reason}")]
    InvalidDistribution { reason: String },

    #[error("cannot parse rational from {input:?}")]
    RationalParse { input: String },

    #[error("measures are identical; no ambiguity witness exists")]
    MeasuresEqual,

    #[error("membership oracle failed: {0}")]
    OracleFailure(String),

    #[error("membership predicate is not monotone in sigma: holds at {holds_at} but fails at {fails_at}")]
    NonMonotonePredicate { fails_at: f64, holds_at: f64 },

    #[error("containment violated: typical event {event} is not in the candidate class")]
    ContainmentViolated { event: String },

    #[error("no witness found for k up to {cap}")]
    WitnessSearchExhausted { cap: u64 },

    #[error("scope too large: {reason}")]
    ScopeTooLarge { reason: String },
}
