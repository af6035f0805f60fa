//! A verification laboratory for the machinery connecting probability
//! measures to experiments on finite product sample spaces: exact extended
//! probabilities, frequency events and their binomial law, typicality and
//! practical-certainty classes, the non-additive set function a class
//! generates, and the governs relation with its ambiguity exclusions.
//!
//! Everything measure-theoretic is exact rational arithmetic; floating
//! point enters only for large-k frequency profiles and for simulation
//! statistics. Sample spaces are deliberately small so that brute-force
//! enumeration stays available as an oracle for every closed form.

pub mod cclass;
pub mod cmeasure;
pub mod error;
pub mod experiment;
pub mod freq;
pub mod governance;
pub mod measure;
pub mod rational;
pub mod space;

pub use cclass::{
    check_axioms, certainty_closure_check, custom_cclass, empirical_cclass, trivial_cclass,
    typicality_cclass, union_lift, AxiomCheckBudget, AxiomReport, CClass, ClassKind,
};
pub use cmeasure::{
    c_measure, c_measure_typicality, default_probe_events, equivalent, verify_theorem1,
    CMeasureEstimate, CMeasureOptions, EquivalenceReport, Theorem1Report,
};
pub use error::{CournotError, Result};
pub use experiment::{
    empirically_equivalent, is_practically_certain, EmpiricalClass, EmpiricalEquivalenceReport,
    ExperimentModel, GeneratorSpec, PracticalCertaintyDecision, Verdict,
};
pub use freq::{
    bernoulli_limit_profile, definitively_in_oracle, definitively_in_typicality,
    definitively_lower_in_typicality, freq_event_prob, freq_event_prob_f64, hoeffding_band,
    hoeffding_k_bound, materialize_freq_event, CertMethod, CertStatus, DefinitivelyCert,
    EvalMode, FreqEventSpec, ProbValue, ProfilePoint, ProfileSide,
};
pub use governance::{
    experimental_ambiguity_check, governs, probabilistic_ambiguity_witness, AmbiguityWitness,
    ExperimentalAmbiguityReport, GovernanceParams, GovernanceReport, GovernanceVerdict,
    WitnessSearchParams,
};
pub use measure::{rectangle, typicality_contains, Interval01, ProbabilityMeasure, Threshold};
pub use space::{LeveledEvent, SampleSpace, DEFAULT_ENUMERATION_BUDGET};

// Re-export the numeric types the public API is built on.
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
