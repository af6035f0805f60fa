//! The governs relation between a probability measure and an experiment,
//! and the two ambiguity exclusions.
//!
//! Governance is operationalized over a grid of typicality thresholds: at
//! each threshold and level, every tested typical event must be compatible
//! with practical certainty under the experiment. Two failure modes are
//! recorded as violations:
//!
//! * containment: the observed frequency falls below the threshold itself
//!   beyond the statistical band;
//! * calibration: the observed frequency falls below the event's extended
//!   probability beyond the band, which is how product-rule failures at
//!   higher levels surface.
//!
//! Verdicts inside the band are inconclusive, flagged and allowed; the
//! report predicts which events may legitimately land there from their
//! exact typicality values. Deviation bands are union-adjusted over every
//! test in scope, so a clean run stays clean with probability 1 - alpha.
//!
//! Probabilistic ambiguity (two measures governing one experiment) is
//! excluded constructively: for distinct measures a level-1 event with
//! different probabilities exists, and around any sigma between them the
//! two disjoint frequency events are eventually typical under their
//! respective measures. The witness carries the concrete k.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CournotError, Result};
use crate::experiment::{
    empirically_equivalent, EmpiricalEquivalenceReport, ExperimentModel, Verdict,
};
use crate::freq::{
    freq_event_prob, freq_event_prob_f64, hoeffding_band, hoeffding_k_bound, ProbValue,
};
use crate::measure::{Interval01, ProbabilityMeasure, Threshold};
use crate::rational::{format_rational, ratio};
use crate::space::LeveledEvent;

/// Parameters for one governance run.
#[derive(Debug, Clone)]
pub struct GovernanceParams {
    pub delta_grid: Vec<Threshold>,
    pub levels: Vec<u32>,
    /// Most-typical-first cap on events tested per (threshold, level) cell.
    pub event_budget: usize,
    pub trials: usize,
    pub epsilon: f64,
    pub alpha: f64,
    pub parallel: bool,
}

impl Default for GovernanceParams {
    fn default() -> Self {
        GovernanceParams {
            delta_grid: vec![
                Threshold::new(ratio(4, 5)).unwrap(),
                Threshold::new(ratio(9, 10)).unwrap(),
                Threshold::new(ratio(19, 20)).unwrap(),
            ],
            levels: vec![1, 2, 3],
            event_budget: 64,
            trials: 10_000,
            epsilon: 0.02,
            alpha: 0.01,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Observed frequency statistically below the typicality threshold.
    Containment,
    /// Observed frequency statistically below the event's extended
    /// probability.
    Calibration,
}

#[derive(Debug, Clone, Serialize)]
pub struct GovernanceViolation {
    pub delta: String,
    pub level: u32,
    pub event: LeveledEvent,
    pub typicality: String,
    pub typicality_f64: f64,
    pub observed_frequency: f64,
    pub band: f64,
    pub kind: ViolationKind,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct InconclusiveRecord {
    pub delta: String,
    pub level: u32,
    pub event: LeveledEvent,
    pub typicality_f64: f64,
    pub observed_frequency: f64,
    /// Whether the exact typicality value sits close enough to the
    /// threshold that an inconclusive verdict was predicted.
    pub predicted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub delta: String,
    pub level: u32,
    pub tested: usize,
    pub certain: usize,
    pub inconclusive: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GovernanceVerdict {
    GovernsAtScope,
    Violated,
}

#[derive(Debug, Clone, Serialize)]
pub struct GovernanceReport {
    pub verdict: GovernanceVerdict,
    pub experiment_seed: u64,
    pub threshold_grid: Vec<String>,
    /// The grid actually tested: the declared thresholds plus the
    /// certainty instance 1 - epsilon when it is a valid threshold.
    pub effective_grid: Vec<String>,
    pub levels_tested: Vec<u32>,
    pub events_tested_per_level: BTreeMap<u32, usize>,
    pub trials: usize,
    pub epsilon: f64,
    pub alpha: f64,
    /// Union-adjusted deviation band applied to every verdict.
    pub band: f64,
    pub cells: Vec<CellSummary>,
    pub violations: Vec<GovernanceViolation>,
    pub inconclusive: Vec<InconclusiveRecord>,
    pub scope_note: String,
}

impl GovernanceReport {
    pub fn governs(&self) -> bool {
        self.verdict == GovernanceVerdict::GovernsAtScope
    }
}

/// Universe cap for exhaustive typical-event enumeration at a level.
const GOVERNANCE_UNIVERSE_CAP: u64 = 16;

/// Runs the governance check: over the threshold grid and levels, every
/// tested typical event of the measure must be practically certain (or
/// inconclusive, flagged) under the experiment.
pub fn governs(
    measure: &ProbabilityMeasure,
    experiment: &ExperimentModel,
    params: &GovernanceParams,
) -> Result<GovernanceReport> {
    if measure.space() != experiment.space() {
        return Err(CournotError::SpaceMismatch);
    }
    validate_params(params)?;
    let space = measure.space().clone();

    let mut effective: Vec<Threshold> = params.delta_grid.clone();
    let eps_instance = BigRational::from_float(1.0 - params.epsilon)
        .and_then(|r| Threshold::new(r).ok());
    if let Some(t) = eps_instance {
        if !effective.iter().any(|d| *d.value() == *t.value()) {
            effective.push(t);
        }
    }
    effective.sort();
    effective.dedup_by(|a, b| a.value() == b.value());

    // Enumerate the typical events per (level, threshold), most typical first.
    struct Cell {
        delta: Threshold,
        level: u32,
        events: Vec<(LeveledEvent, BigRational)>,
    }
    let mut cells: Vec<Cell> = Vec::new();
    let mut per_level_unique: BTreeMap<u32, Vec<(LeveledEvent, BigRational)>> = BTreeMap::new();
    for &level in &params.levels {
        let universe = space
            .tuple_count(level)
            .ok_or(CournotError::LevelTooLarge {
                level,
                size: space.size(),
            })?;
        if universe > GOVERNANCE_UNIVERSE_CAP {
            return Err(CournotError::ScopeTooLarge {
                reason: format!(
                    "level {level} has a universe of {universe} outcomes; \
                     exhaustive typical-event enumeration is capped at {GOVERNANCE_UNIVERSE_CAP}"
                ),
            });
        }
        let masses = subset_masses(measure, level, universe)?;
        let mut seen: Vec<(LeveledEvent, BigRational)> = Vec::new();
        for delta in &effective {
            let mut typical: Vec<(u32, &BigRational)> = masses
                .iter()
                .enumerate()
                .filter(|(_, m)| *m >= delta.value())
                .map(|(mask, m)| (mask as u32, m))
                .collect();
            typical.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(&b.0)));
            typical.truncate(params.event_budget);
            let events: Vec<(LeveledEvent, BigRational)> = typical
                .into_iter()
                .map(|(mask, m)| (mask_to_event(&space, level, mask), m.clone()))
                .collect();
            for (e, m) in &events {
                if !seen.iter().any(|(s, _)| s == e) {
                    seen.push((e.clone(), m.clone()));
                }
            }
            cells.push(Cell {
                delta: delta.clone(),
                level,
                events,
            });
        }
        per_level_unique.insert(level, seen);
    }

    let total_tests: usize = cells.iter().map(|c| c.events.len()).sum();
    if total_tests == 0 {
        return Err(CournotError::ScopeTooLarge {
            reason: "no typical events fall inside the grid at the requested levels".into(),
        });
    }
    let alpha_event = params.alpha / total_tests as f64;
    let band = hoeffding_band(params.trials, alpha_event);

    // One observed frequency per unique event, on shared per-level paths.
    let mut freq_of: BTreeMap<(u32, Vec<u64>), f64> = BTreeMap::new();
    for (_, events) in &per_level_unique {
        let observed: Vec<((u32, Vec<u64>), f64)> = if params.parallel {
            events
                .par_iter()
                .map(|(e, _)| {
                    let f = experiment.relative_frequency(e, params.trials)?;
                    Ok(((e.level(), e.codes().to_vec()), f))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            events
                .iter()
                .map(|(e, _)| {
                    let f = experiment.relative_frequency(e, params.trials)?;
                    Ok(((e.level(), e.codes().to_vec()), f))
                })
                .collect::<Result<Vec<_>>>()?
        };
        freq_of.extend(observed);
    }

    let mut violations = Vec::new();
    let mut inconclusive = Vec::new();
    let mut summaries = Vec::new();
    for cell in &cells {
        let delta_f64 = cell.delta.to_f64();
        let delta_str = format_rational(cell.delta.value());
        let mut certain = 0usize;
        let mut cell_inconclusive = 0usize;
        let mut cell_violations = 0usize;
        for (event, mass) in &cell.events {
            let observed = freq_of[&(event.level(), event.codes().to_vec())];
            let mass_f64 = mass.to_f64().unwrap_or(f64::NAN);
            let mut violated = false;
            if observed <= delta_f64 - band {
                violations.push(GovernanceViolation {
                    delta: delta_str.clone(),
                    level: cell.level,
                    event: event.clone(),
                    typicality: format_rational(mass),
                    typicality_f64: mass_f64,
                    observed_frequency: observed,
                    band,
                    kind: ViolationKind::Containment,
                    verdict: Verdict::NotCertain,
                });
                violated = true;
            }
            if observed <= mass_f64 - band {
                violations.push(GovernanceViolation {
                    delta: delta_str.clone(),
                    level: cell.level,
                    event: event.clone(),
                    typicality: format_rational(mass),
                    typicality_f64: mass_f64,
                    observed_frequency: observed,
                    band,
                    kind: ViolationKind::Calibration,
                    verdict: if observed >= delta_f64 + band {
                        Verdict::Certain
                    } else {
                        Verdict::Inconclusive
                    },
                });
                violated = true;
            }
            if violated {
                cell_violations += 1;
            } else if observed >= delta_f64 + band {
                certain += 1;
            } else {
                cell_inconclusive += 1;
                inconclusive.push(InconclusiveRecord {
                    delta: delta_str.clone(),
                    level: cell.level,
                    event: event.clone(),
                    typicality_f64: mass_f64,
                    observed_frequency: observed,
                    predicted: mass_f64 < delta_f64 + 2.0 * band,
                });
            }
        }
        summaries.push(CellSummary {
            delta: delta_str,
            level: cell.level,
            tested: cell.events.len(),
            certain,
            inconclusive: cell_inconclusive,
            violations: cell_violations,
        });
    }

    Ok(GovernanceReport {
        verdict: if violations.is_empty() {
            GovernanceVerdict::GovernsAtScope
        } else {
            GovernanceVerdict::Violated
        },
        experiment_seed: experiment.seed(),
        threshold_grid: params
            .delta_grid
            .iter()
            .map(|d| format_rational(d.value()))
            .collect(),
        effective_grid: effective
            .iter()
            .map(|d| format_rational(d.value()))
            .collect(),
        levels_tested: params.levels.clone(),
        events_tested_per_level: per_level_unique
            .iter()
            .map(|(l, v)| (*l, v.len()))
            .collect(),
        trials: params.trials,
        epsilon: params.epsilon,
        alpha: params.alpha,
        band,
        cells: summaries,
        violations,
        inconclusive,
        scope_note: format!(
            "typical events enumerated exhaustively per level, most typical first, \
             capped at {} per cell; verdicts use a Hoeffding band union-adjusted \
             over {total_tests} tests",
            params.event_budget
        ),
    })
}

fn validate_params(params: &GovernanceParams) -> Result<()> {
    if params.delta_grid.is_empty() || params.levels.is_empty() {
        return Err(CournotError::EmptyList);
    }
    if !(params.epsilon > 0.0 && params.epsilon < 0.5) {
        return Err(CournotError::InvalidParameter {
            name: "epsilon",
            reason: "must lie in (0, 1/2)".into(),
        });
    }
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(CournotError::InvalidParameter {
            name: "alpha",
            reason: "must lie in (0, 1)".into(),
        });
    }
    if params.trials == 0 || params.event_budget == 0 {
        return Err(CournotError::InvalidParameter {
            name: "trials/event_budget",
            reason: "must be at least 1".into(),
        });
    }
    Ok(())
}

/// Exact extended probability of every subset of the level universe,
/// indexed by bitmask over tuple codes.
fn subset_masses(
    measure: &ProbabilityMeasure,
    level: u32,
    universe: u64,
) -> Result<Vec<BigRational>> {
    let space = measure.space();
    let mut singleton = Vec::with_capacity(universe as usize);
    for code in 0..universe {
        let e = LeveledEvent::from_sorted_codes_unchecked(space, level, vec![code]);
        singleton.push(measure.extended_prob(&e)?);
    }
    let total = 1usize << universe;
    let mut masses = vec![BigRational::from_integer(0.into()); total];
    for mask in 1..total {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        masses[mask] = &masses[rest] + &singleton[low.trailing_zeros() as usize];
    }
    Ok(masses)
}

fn mask_to_event(
    space: &crate::space::SampleSpace,
    level: u32,
    mask: u32,
) -> LeveledEvent {
    let codes: Vec<u64> = (0..32)
        .filter(|i| mask & (1u32 << i) != 0)
        .map(|i| i as u64)
        .collect();
    LeveledEvent::from_sorted_codes_unchecked(space, level, codes)
}

/// Search controls for the ambiguity witness.
#[derive(Debug, Clone)]
pub struct WitnessSearchParams {
    /// Hard cap on the repetition count probed.
    pub k_cap: u64,
    /// Largest k at which the witness is re-verified with exact rationals.
    pub exact_verify_cap: u64,
}

impl Default for WitnessSearchParams {
    fn default() -> Self {
        WitnessSearchParams {
            k_cap: 1_000_000,
            exact_verify_cap: 50_000,
        }
    }
}

/// A constructive exclusion of probabilistic ambiguity: an event on which
/// the two measures disagree, a sigma strictly between the two
/// probabilities, and a repetition count k at which the disjoint pair
/// S(A, [0, sigma), k) and S(A, [sigma, 1], k) is typical under the lower
/// and upper measure respectively. No C-class can contain both, so no
/// single experiment can be governed by both measures.
#[derive(Debug, Clone, Serialize)]
pub struct AmbiguityWitness {
    pub event: LeveledEvent,
    #[serde(serialize_with = "crate::rational::serialize_rational_string")]
    pub sigma: BigRational,
    pub k: u64,
    pub delta: String,
    /// P1(A) and P2(A); the witness orients so the first is the smaller.
    pub prob_event_low: String,
    pub prob_event_high: String,
    /// Mass of S(A, [0, sigma), k) under the low measure.
    pub lower_mass: ProbValue,
    /// Mass of S(A, [sigma, 1], k) under the high measure.
    pub upper_mass: ProbValue,
    pub lower_id: String,
    pub upper_id: String,
    /// Whether the masses above were computed with exact rationals.
    pub exact_verified: bool,
    /// Whether a Hoeffding bound certifies the masses stay above delta for
    /// all larger k.
    pub hoeffding_certified: bool,
}

impl AmbiguityWitness {
    /// The two interval families are disjoint by construction; recheck it.
    pub fn intervals_disjoint(&self) -> bool {
        let lower = Interval01::lower_open(self.sigma.clone());
        let upper = Interval01::upper(self.sigma.clone());
        match (lower, upper) {
            (Ok(l), Ok(u)) => !l.intersects(&u),
            _ => false,
        }
    }
}

const WITNESS_EXACT_SCAN_LIMIT: u64 = 4096;

/// Finds the smallest probed k at which both sides of the disjoint pair
/// clear delta. Exact scan for small k, geometric log-space probing beyond,
/// with exact re-verification when affordable.
pub fn probabilistic_ambiguity_witness(
    p1: &ProbabilityMeasure,
    p2: &ProbabilityMeasure,
    delta: &Threshold,
    search: &WitnessSearchParams,
) -> Result<AmbiguityWitness> {
    if p1.space() != p2.space() {
        return Err(CournotError::SpaceMismatch);
    }
    let space = p1.space().clone();
    let differing = (0..space.size() as u8)
        .find(|&i| p1.weight(i) != p2.weight(i))
        .ok_or(CournotError::MeasuresEqual)?;

    // Orient so the event has strictly smaller probability under `low`.
    let singleton = LeveledEvent::singleton(&space, &[differing])?;
    let (event, low, high) = if p1.weight(differing) < p2.weight(differing) {
        (singleton, p1.clone(), p2.clone())
    } else {
        // complement flips the inequality
        (singleton.complement()?, p1.clone(), p2.clone())
    };
    let pl = low.extended_prob(&event)?;
    let ph = high.extended_prob(&event)?;
    debug_assert!(pl < ph);
    let sigma = (&pl + &ph) / BigRational::from_integer(2.into());
    let lower_interval = Interval01::lower_open(sigma.clone())?;
    let upper_interval = Interval01::upper(sigma.clone())?;

    let both_exact = |k: u64| -> Result<Option<(BigRational, BigRational)>> {
        let lo = freq_event_prob(&pl, &lower_interval, k)?;
        if lo < *delta.value() {
            return Ok(None);
        }
        let hi = freq_event_prob(&ph, &upper_interval, k)?;
        if hi < *delta.value() {
            return Ok(None);
        }
        Ok(Some((lo, hi)))
    };

    let exact_limit = WITNESS_EXACT_SCAN_LIMIT.min(search.k_cap);
    for k in 1..=exact_limit {
        if let Some((lo, hi)) = both_exact(k)? {
            return Ok(build_witness(
                event, sigma, k, delta, &pl, &ph, ProbValue::Exact(lo), ProbValue::Exact(hi),
                true, false,
            ));
        }
    }

    // geometric probing with log-space tails
    let pl_f64 = pl.to_f64().unwrap_or(f64::NAN);
    let ph_f64 = ph.to_f64().unwrap_or(f64::NAN);
    let delta_f64 = delta.to_f64();
    let margin = 1e-9;
    let mut k = exact_limit.max(1);
    while k <= search.k_cap {
        let lo = freq_event_prob_f64(pl_f64, &lower_interval, k);
        let hi = freq_event_prob_f64(ph_f64, &upper_interval, k);
        if lo >= delta_f64 + margin && hi >= delta_f64 + margin {
            if k <= search.exact_verify_cap {
                if let Some((lo, hi)) = both_exact(k)? {
                    return Ok(build_witness(
                        event, sigma, k, delta, &pl, &ph, ProbValue::Exact(lo),
                        ProbValue::Exact(hi), true, false,
                    ));
                }
            } else {
                // Exact verification is out of reach; move to the k where the
                // one-sided Hoeffding bound itself proves both masses clear
                // delta: tail >= 1 - exp(-2 k gap^2) >= delta.
                let gap_lo = (&sigma - &pl).to_f64().unwrap_or(0.0);
                let gap_hi = (&ph - &sigma).to_f64().unwrap_or(0.0);
                let gap = gap_lo.min(gap_hi);
                let k_certified = hoeffding_k_bound(1.0 - delta_f64, gap).max(k);
                if k_certified <= search.k_cap {
                    let lo = freq_event_prob_f64(pl_f64, &lower_interval, k_certified);
                    let hi = freq_event_prob_f64(ph_f64, &upper_interval, k_certified);
                    return Ok(build_witness(
                        event, sigma, k_certified, delta, &pl, &ph, ProbValue::Approx(lo),
                        ProbValue::Approx(hi), false, true,
                    ));
                }
            }
        }
        k = (k + k / 4).max(k + 1);
    }
    Err(CournotError::WitnessSearchExhausted { cap: search.k_cap })
}

#[allow(clippy::too_many_arguments)]
fn build_witness(
    event: LeveledEvent,
    sigma: BigRational,
    k: u64,
    delta: &Threshold,
    pl: &BigRational,
    ph: &BigRational,
    lower_mass: ProbValue,
    upper_mass: ProbValue,
    exact_verified: bool,
    hoeffding_certified: bool,
) -> AmbiguityWitness {
    let desc = event.describe();
    let sigma_str = format_rational(&sigma);
    AmbiguityWitness {
        lower_id: format!("S({desc}, [0, {sigma_str}), {k})"),
        upper_id: format!("S({desc}, [{sigma_str}, 1], {k})"),
        event,
        sigma,
        k,
        delta: format_rational(delta.value()),
        prob_event_low: format_rational(pl),
        prob_event_high: format_rational(ph),
        lower_mass,
        upper_mass,
        exact_verified,
        hoeffding_certified,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentalAmbiguityReport {
    pub first_governed: bool,
    pub second_governed: bool,
    pub governs_first: GovernanceReport,
    pub governs_second: GovernanceReport,
    /// Present only when both experiments are governed at scope.
    pub equivalence: Option<EmpiricalEquivalenceReport>,
    /// Some(true): both governed and empirically equivalent, consistent
    /// with uniqueness. Some(false): both governed yet distinguishable —
    /// evidence against the uniqueness conjecture at this scope.
    pub consistent_with_uniqueness: Option<bool>,
    pub note: String,
}

/// Tests the experimental-ambiguity exclusion: if one measure governs two
/// experiments, they should be empirically equivalent. When either
/// governance check fails, no claim is tested.
pub fn experimental_ambiguity_check(
    measure: &ProbabilityMeasure,
    first: &ExperimentModel,
    second: &ExperimentModel,
    params: &GovernanceParams,
    probes: &[LeveledEvent],
    equivalence_trials: usize,
) -> Result<ExperimentalAmbiguityReport> {
    let governs_first = governs(measure, first, params)?;
    let governs_second = governs(measure, second, params)?;
    let both = governs_first.governs() && governs_second.governs();
    let (equivalence, consistent, note) = if both {
        let eq = empirically_equivalent(first, second, probes, equivalence_trials, params.alpha)?;
        let consistent = eq.equivalent;
        let note = if consistent {
            "both governed and empirically equivalent at scope".to_string()
        } else {
            "both governed yet empirically distinguishable: evidence against \
             the uniqueness conjecture at this scope"
                .to_string()
        };
        (Some(eq), Some(consistent), note)
    } else {
        (
            None,
            None,
            "at least one experiment is not governed at scope; no claim tested".to_string(),
        )
    };
    Ok(ExperimentalAmbiguityReport {
        first_governed: governs_first.governs(),
        second_governed: governs_second.governs(),
        governs_first,
        governs_second,
        equivalence,
        consistent_with_uniqueness: consistent,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::space::SampleSpace;

    fn coin() -> SampleSpace {
        SampleSpace::coin()
    }

    fn measure(num: i64, den: i64) -> ProbabilityMeasure {
        ProbabilityMeasure::new(&coin(), vec![ratio(num, den), ratio(den - num, den)]).unwrap()
    }

    fn small_params() -> GovernanceParams {
        GovernanceParams {
            levels: vec![1, 2],
            trials: 4000,
            ..GovernanceParams::default()
        }
    }

    #[test]
    fn matched_law_governs_at_scope() {
        let p = measure(9, 10);
        let e = ExperimentModel::iid(p.clone(), 71);
        let report = governs(&p, &e, &small_params()).unwrap();
        assert!(report.governs(), "violations: {:?}", report.violations);
        // every inconclusive verdict was predicted from the exact values
        assert!(report.inconclusive.iter().all(|r| r.predicted));
    }

    #[test]
    fn mismatched_law_is_violated_at_level_one() {
        let p = measure(9, 10);
        let e = ExperimentModel::iid(measure(1, 2), 72);
        let report = governs(&p, &e, &small_params()).unwrap();
        assert!(!report.governs());
        assert!(report
            .violations
            .iter()
            .any(|v| v.level == 1 && v.kind == ViolationKind::Containment));
    }

    #[test]
    fn correlated_chain_with_matching_marginal_fails_at_level_two() {
        let p = measure(4, 5);
        // stationary marginal (4/5, 1/5); pair law shifts mass onto HT/TH
        let chain = ExperimentModel::markov(
            &coin(),
            vec![ratio(4, 5), ratio(1, 5)],
            vec![
                vec![ratio(3, 4), ratio(1, 4)],
                vec![ratio(1, 1), ratio(0, 1)],
            ],
            73,
        )
        .unwrap();
        let report = governs(&p, &chain, &small_params()).unwrap();
        assert!(!report.governs());
        assert!(report.violations.iter().all(|v| v.level != 1));
        assert!(report
            .violations
            .iter()
            .any(|v| v.level == 2 && v.kind == ViolationKind::Calibration));
    }

    #[test]
    fn witness_examples() {
        let p1 = measure(2, 5);
        let p2 = measure(7, 10);
        let delta = Threshold::new(ratio(999, 1000)).unwrap();
        let w = probabilistic_ambiguity_witness(&p1, &p2, &delta, &WitnessSearchParams::default())
            .unwrap();
        assert_eq!(w.sigma, ratio(11, 20));
        assert!(w.exact_verified);
        assert!(w.intervals_disjoint());
        assert!(w.lower_mass.as_exact().unwrap() >= &ratio(999, 1000));
        assert!(w.upper_mass.as_exact().unwrap() >= &ratio(999, 1000));

        let err = probabilistic_ambiguity_witness(
            &p1,
            &measure(2, 5),
            &delta,
            &WitnessSearchParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, CournotError::MeasuresEqual));
    }

    #[test]
    fn witness_orients_toward_the_smaller_probability() {
        // first measure larger on H: the witness flips to the complement
        let p1 = measure(7, 10);
        let p2 = measure(2, 5);
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let w = probabilistic_ambiguity_witness(&p1, &p2, &delta, &WitnessSearchParams::default())
            .unwrap();
        // event = {T} has P1 = 3/10 < P2 = 3/5
        assert_eq!(w.prob_event_low, "3/10");
        assert_eq!(w.prob_event_high, "3/5");
    }

    #[test]
    fn tiny_gap_needs_large_k() {
        let p1 = measure(500, 1000);
        let p2 = measure(501, 1000);
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let search = WitnessSearchParams {
            k_cap: 100_000_000,
            exact_verify_cap: 10_000,
        };
        let w = probabilistic_ambiguity_witness(&p1, &p2, &delta, &search).unwrap();
        assert!(w.k > 100_000, "k = {}", w.k);
        assert!(w.hoeffding_certified || w.exact_verified);
    }

    #[test]
    fn experimental_ambiguity_cases() {
        let p = measure(4, 5);
        let probes: Vec<LeveledEvent> =
            crate::cclass::enumerate_all_events(&coin(), 2).unwrap();

        // two seeds of the same law: both governed, equivalent
        let e1 = ExperimentModel::iid(p.clone(), 81);
        let e2 = ExperimentModel::iid(p.clone(), 82);
        let r = experimental_ambiguity_check(&p, &e1, &e2, &small_params(), &probes, 10_000)
            .unwrap();
        assert!(r.first_governed && r.second_governed);
        assert_eq!(r.consistent_with_uniqueness, Some(true));

        // a perturbed second law: not governed, no claim tested
        let e3 = ExperimentModel::iid(measure(3, 5), 83);
        let r = experimental_ambiguity_check(&p, &e1, &e3, &small_params(), &probes, 10_000)
            .unwrap();
        assert!(!r.second_governed);
        assert!(r.equivalence.is_none());

        // adversarial pair: same level-1 marginal, different pair law; the
        // product-rule check rejects the chain at level 2
        let chain = ExperimentModel::markov(
            &coin(),
            vec![ratio(4, 5), ratio(1, 5)],
            vec![
                vec![ratio(3, 4), ratio(1, 4)],
                vec![ratio(1, 1), ratio(0, 1)],
            ],
            84,
        )
        .unwrap();
        let r = experimental_ambiguity_check(&p, &e1, &chain, &small_params(), &probes, 10_000)
            .unwrap();
        assert!(r.first_governed);
        assert!(!r.second_governed);
        assert!(r
            .governs_second
            .violations
            .iter()
            .any(|v| v.level == 2));
    }
}
