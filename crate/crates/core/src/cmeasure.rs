//! The set function generated by a C-class: the supremum of the sigmas for
//! which the upper frequency family S(A, [sigma, 1], k) is definitively in
//! the class.
//!
//! For the trivial class this is the indicator of the full space; for a
//! typicality class it is the extended probability itself, independently of
//! delta. Those closed forms are used when the class kind is visible. Every
//! other class goes through bisection on sigma, which is sound because
//! upward-closed classes make the membership predicate monotone: S shrinks
//! as sigma grows.
//!
//! The measure is monotone but not additive in general; the trivial class
//! witnesses the failure of additivity.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cclass::{CClass, ClassKind};
use crate::error::{CournotError, Result};
use crate::freq::{FreqEventSpec, ProbValue};
use crate::measure::{rectangle, Interval01, ProbabilityMeasure, Threshold};
use crate::rational::{format_rational, from_f64_exact};
use crate::space::{LeveledEvent, SampleSpace};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum EstimateMethod {
    ClosedForm,
    Bisection {
        tolerance: f64,
        horizon: u64,
        bracket: (f64, f64),
    },
}

/// A C-measure value with its certification: exact closed forms carry
/// rationals, bisection results carry the final bracket.
#[derive(Debug, Clone, Serialize)]
pub struct CMeasureEstimate {
    pub value: ProbValue,
    #[serde(flatten)]
    pub method: EstimateMethod,
}

impl CMeasureEstimate {
    fn closed_form(value: BigRational) -> Self {
        CMeasureEstimate {
            value: ProbValue::Exact(value),
            method: EstimateMethod::ClosedForm,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.method, EstimateMethod::ClosedForm)
    }
}

#[derive(Debug, Clone)]
pub struct CMeasureOptions {
    pub tolerance: f64,
    pub horizon: u64,
    /// Probe a coarse sigma grid after bisection and flag non-monotone
    /// membership answers.
    pub verify_monotone: bool,
}

impl Default for CMeasureOptions {
    fn default() -> Self {
        CMeasureOptions {
            tolerance: 1e-6,
            horizon: 512,
            verify_monotone: true,
        }
    }
}

/// Closed form for typicality classes: the measure generated by T(P, delta)
/// is the extended probability itself, for every delta in (1/2, 1).
pub fn c_measure_typicality(
    measure: &ProbabilityMeasure,
    event: &LeveledEvent,
) -> Result<CMeasureEstimate> {
    Ok(CMeasureEstimate::closed_form(
        measure.extended_prob(event)?,
    ))
}

/// The C-measure of an event under a class. Trivial and typicality kinds
/// use their closed forms; everything else is bisected on sigma with the
/// class's definitive-membership answers as the predicate.
pub fn c_measure(
    class: &CClass,
    event: &LeveledEvent,
    options: &CMeasureOptions,
) -> Result<CMeasureEstimate> {
    if *event.space() != *class.space() {
        return Err(CournotError::SpaceMismatch);
    }
    validate_options(options)?;
    match class.kind() {
        ClassKind::Trivial => Ok(CMeasureEstimate::closed_form(if event.is_full() {
            BigRational::one()
        } else {
            BigRational::zero()
        })),
        ClassKind::Typicality => {
            let (measure, _delta) = class.typicality_parts().expect("kind is typicality");
            c_measure_typicality(measure, event)
        }
        _ => c_measure_via_bisection(class, event, options),
    }
}

fn validate_options(options: &CMeasureOptions) -> Result<()> {
    if !(options.tolerance > 0.0) {
        return Err(CournotError::InvalidParameter {
            name: "tolerance",
            reason: "must be positive".into(),
        });
    }
    if options.horizon < 2 {
        return Err(CournotError::InvalidParameter {
            name: "horizon",
            reason: "must be at least 2".into(),
        });
    }
    Ok(())
}

fn c_measure_via_bisection(
    class: &CClass,
    event: &LeveledEvent,
    options: &CMeasureOptions,
) -> Result<CMeasureEstimate> {
    let mut probes: Vec<(f64, bool)> = Vec::new();
    let mut pred = |sigma_f64: f64| -> Result<bool> {
        let sigma = from_f64_exact(sigma_f64)?;
        let cert = class.definitively_contains_upper(event, &sigma, options.horizon)?;
        let holds = cert.holds();
        probes.push((sigma_f64, holds));
        Ok(holds)
    };

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if pred(1.0)? {
        return Ok(CMeasureEstimate {
            value: ProbValue::Exact(BigRational::one()),
            method: EstimateMethod::Bisection {
                tolerance: options.tolerance,
                horizon: options.horizon,
                bracket: (1.0, 1.0),
            },
        });
    }
    while hi - lo > options.tolerance {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    if options.verify_monotone {
        for i in 1..8 {
            let sigma = i as f64 / 8.0;
            if sigma > lo && sigma < hi {
                continue;
            }
            pred(sigma)?;
        }
        probes.sort_by(|a, b| a.0.total_cmp(&b.0));
        for pair in probes.windows(2) {
            if !pair[0].1 && pair[1].1 {
                return Err(CournotError::NonMonotonePredicate {
                    fails_at: pair[0].0,
                    holds_at: pair[1].0,
                });
            }
        }
    }

    Ok(CMeasureEstimate {
        value: ProbValue::Approx(0.5 * (lo + hi)),
        method: EstimateMethod::Bisection {
            tolerance: options.tolerance,
            horizon: options.horizon,
            bracket: (lo, hi),
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeComparison {
    pub event: LeveledEvent,
    pub left: f64,
    pub right: f64,
    pub difference: f64,
}

/// Equivalence evidence at a probe set: the two generated measures agree
/// within tolerance on every probe. Never a universal claim.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub equivalent: bool,
    pub tolerance: f64,
    pub probes: Vec<ProbeComparison>,
    pub scope_note: String,
}

pub fn equivalent(
    left: &CClass,
    right: &CClass,
    probe_events: &[LeveledEvent],
    options: &CMeasureOptions,
) -> Result<EquivalenceReport> {
    if left.space() != right.space() {
        return Err(CournotError::SpaceMismatch);
    }
    if probe_events.is_empty() {
        return Err(CournotError::EmptyList);
    }
    let mut probes = Vec::with_capacity(probe_events.len());
    for event in probe_events {
        let l = c_measure(left, event, options)?.to_f64();
        let r = c_measure(right, event, options)?.to_f64();
        probes.push(ProbeComparison {
            event: event.clone(),
            left: l,
            right: r,
            difference: (l - r).abs(),
        });
    }
    Ok(EquivalenceReport {
        equivalent: probes.iter().all(|p| p.difference <= options.tolerance),
        tolerance: options.tolerance,
        probes,
        scope_note: format!(
            "measures compared on {} probe events; evidence at this probe set, not a proof",
            probe_events.len()
        ),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1ProbeResult {
    pub event: LeveledEvent,
    pub extended_prob: String,
    pub extended_prob_f64: f64,
    pub class_measure: f64,
    pub consistent: bool,
}

/// A concrete contradiction pair: at the recorded k both the low-frequency
/// and the high-frequency event around sigma sit in the class, and they are
/// disjoint — impossible for a C-class.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremContradiction {
    pub event: LeveledEvent,
    pub sigma: String,
    pub k: u64,
    pub lower_member: bool,
    pub upper_member: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Theorem1Report {
    pub consistent: bool,
    pub tolerance: f64,
    pub containment_spot_checks: usize,
    pub probes: Vec<Theorem1ProbeResult>,
    pub contradictions: Vec<TheoremContradiction>,
    pub scope_note: String,
}

/// Checks the containment-implies-equivalence statement on a probe set:
/// given T(P, delta) inside the class, the class measure must coincide with
/// the extended probability. A disagreement is not left abstract — the
/// report exhibits the disjoint frequency-event pair that the class would
/// have to contain, the mechanism by which equality is forced.
pub fn verify_theorem1(
    measure: &ProbabilityMeasure,
    delta: &Threshold,
    class: &CClass,
    probe_events: &[LeveledEvent],
    options: &CMeasureOptions,
) -> Result<Theorem1Report> {
    if measure.space() != class.space() {
        return Err(CournotError::SpaceMismatch);
    }
    if probe_events.is_empty() {
        return Err(CournotError::EmptyList);
    }

    // spot-check the asserted containment on typical events before trusting it
    let mut spot_checks = 0usize;
    let mut containment_samples: Vec<LeveledEvent> = Vec::new();
    for level in 1..=2 {
        containment_samples.push(LeveledEvent::full(measure.space(), level)?);
    }
    for event in probe_events {
        if measure.extended_prob(event)? >= *delta.value() {
            containment_samples.push(event.clone());
        }
    }
    // also the most typical proper events at the small levels: the full
    // space minus its lightest tuple becomes typical once levels grow
    for level in 1..=6u32 {
        match measure.space().tuple_count(level) {
            Some(universe) if universe <= 64 => {
                let full = LeveledEvent::full(measure.space(), level)?;
                let lightest = full
                    .codes()
                    .iter()
                    .map(|&c| {
                        let singleton = LeveledEvent::from_codes(
                            measure.space(),
                            level,
                            vec![c],
                        )?;
                        Ok((measure.extended_prob(&singleton)?, c))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .min()
                    .expect("full space is nonempty");
                let candidate = LeveledEvent::from_codes(measure.space(), level, vec![lightest.1])?
                    .complement()?;
                if measure.extended_prob(&candidate)? >= *delta.value() {
                    containment_samples.push(candidate);
                }
            }
            _ => break,
        }
    }
    for event in &containment_samples {
        spot_checks += 1;
        if !class.contains(event)? {
            return Err(CournotError::ContainmentViolated {
                event: event.describe(),
            });
        }
    }

    let mut probes = Vec::with_capacity(probe_events.len());
    let mut contradictions = Vec::new();
    for event in probe_events {
        let p_bar = measure.extended_prob(event)?;
        let m = c_measure(class, event, options)?.to_f64();
        let p_f64 = p_bar.to_f64().unwrap_or(f64::NAN);
        let consistent = (m - p_f64).abs() <= options.tolerance;
        if !consistent {
            if let Some(w) = find_contradiction(class, event, &p_bar, m, options)? {
                contradictions.push(w);
            }
        }
        probes.push(Theorem1ProbeResult {
            event: event.clone(),
            extended_prob: format_rational(&p_bar),
            extended_prob_f64: p_f64,
            class_measure: m,
            consistent,
        });
    }
    Ok(Theorem1Report {
        consistent: probes.iter().all(|p| p.consistent),
        tolerance: options.tolerance,
        containment_spot_checks: spot_checks,
        probes,
        contradictions,
        scope_note: "containment spot-checked on sampled typical events; \
                     equality probed on the declared event set"
            .into(),
    })
}

/// Looks for the proof mechanism behind an inflated class measure: a sigma
/// strictly between P(A) and the estimate for which both S(A, [0, sigma), k)
/// and S(A, [sigma, 1], k) are members at some k within the horizon. The
/// lower side is definitively typical under P since sigma exceeds P(A).
fn find_contradiction(
    class: &CClass,
    event: &LeveledEvent,
    p_bar: &BigRational,
    estimate: f64,
    options: &CMeasureOptions,
) -> Result<Option<TheoremContradiction>> {
    let estimate_rational = from_f64_exact(estimate.clamp(0.0, 1.0))?;
    if estimate_rational <= *p_bar {
        return Ok(None);
    }
    let sigma = (p_bar + &estimate_rational) / BigRational::from_integer(2.into());
    if sigma <= BigRational::zero() || sigma >= BigRational::one() {
        return Ok(None);
    }
    let lower = Interval01::lower_open(sigma.clone())?;
    let upper = Interval01::upper(sigma.clone())?;
    for k in 1..=options.horizon {
        let lower_member =
            class.contains_freq_event(&FreqEventSpec::new(event.clone(), lower.clone(), k)?)?;
        let upper_member =
            class.contains_freq_event(&FreqEventSpec::new(event.clone(), upper.clone(), k)?)?;
        if lower_member && upper_member {
            return Ok(Some(TheoremContradiction {
                event: event.clone(),
                sigma: format_rational(&sigma),
                k,
                lower_member,
                upper_member,
            }));
        }
    }
    Ok(None)
}

/// The default probe family: the empty event, all level-1 singletons, the
/// level-1 and level-2 full spaces, all level-2 rectangles built from
/// singletons and the full factor, plus seeded random events.
pub fn default_probe_events(
    space: &SampleSpace,
    seed: u64,
    extra_random: usize,
) -> Result<Vec<LeveledEvent>> {
    let mut events = Vec::new();
    events.push(LeveledEvent::empty(space, 1)?);
    let full1 = LeveledEvent::full(space, 1)?;
    let mut level1: Vec<LeveledEvent> = Vec::new();
    for i in 0..space.size() {
        level1.push(LeveledEvent::singleton(space, &[i as u8])?);
    }
    level1.push(full1);
    events.extend(level1.iter().cloned());
    for a in &level1 {
        for b in &level1 {
            events.push(rectangle(&[a.clone(), b.clone()])?);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut added = 0usize;
    while added < extra_random {
        let level = 1 + (rng.next_u64() % 3) as u32;
        let universe = space.tuple_count(level).unwrap_or(u64::MAX);
        let size = 1 + (rng.next_u64() % universe.min(12)) as usize;
        let codes: Vec<u64> = (0..size).map(|_| rng.next_u64() % universe).collect();
        let event = LeveledEvent::from_codes(space, level, codes)?;
        if !events.contains(&event) {
            events.push(event);
            added += 1;
        }
    }
    Ok(events)
}

/// Seeded nested event pairs (A, B) with A a subset of B, for monotonicity
/// sweeps.
pub fn random_nested_pairs(
    space: &SampleSpace,
    level: u32,
    count: usize,
    seed: u64,
) -> Result<Vec<(LeveledEvent, LeveledEvent)>> {
    let universe = space
        .tuple_count(level)
        .ok_or(CournotError::LevelTooLarge {
            level,
            size: space.size(),
        })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::with_capacity(count);
    while pairs.len() < count {
        let b_size = 1 + (rng.next_u64() % universe.min(16)) as usize;
        let b_codes: Vec<u64> = (0..b_size).map(|_| rng.next_u64() % universe).collect();
        let b = LeveledEvent::from_codes(space, level, b_codes)?;
        let a_codes: Vec<u64> = b
            .codes()
            .iter()
            .copied()
            .filter(|_| rng.next_u64() % 2 == 0)
            .collect();
        let a = LeveledEvent::from_codes(space, level, a_codes)?;
        pairs.push((a, b));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cclass::{trivial_cclass, typicality_cclass, union_lift};
    use crate::rational::ratio;

    fn coin() -> SampleSpace {
        SampleSpace::coin()
    }

    fn fair() -> ProbabilityMeasure {
        ProbabilityMeasure::uniform(&coin())
    }

    fn biased(num: i64, den: i64) -> ProbabilityMeasure {
        ProbabilityMeasure::new(&coin(), vec![ratio(num, den), ratio(den - num, den)]).unwrap()
    }

    #[test]
    fn typicality_closed_form_examples() {
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let m = c_measure_typicality(&fair(), &h).unwrap();
        assert_eq!(m.value.as_exact(), Some(&ratio(1, 2)));

        let full = LeveledEvent::full(&coin(), 3).unwrap();
        let m = c_measure_typicality(&biased(9, 10), &full).unwrap();
        assert_eq!(m.value.as_exact(), Some(&ratio(1, 1)));

        let empty = LeveledEvent::empty(&coin(), 2).unwrap();
        let m = c_measure_typicality(&biased(3, 5), &empty).unwrap();
        assert_eq!(m.value.as_exact(), Some(&ratio(0, 1)));
    }

    #[test]
    fn trivial_class_measure_is_the_indicator() {
        let class = trivial_cclass(&coin());
        let opts = CMeasureOptions::default();
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let full = LeveledEvent::full(&coin(), 2).unwrap();
        assert_eq!(
            c_measure(&class, &h, &opts).unwrap().value.as_exact(),
            Some(&ratio(0, 1))
        );
        assert_eq!(
            c_measure(&class, &full, &opts).unwrap().value.as_exact(),
            Some(&ratio(1, 1))
        );
        // non-additivity witness: M(A) + M(complement A) = 0 for nontrivial A
        let hc = h.complement().unwrap();
        let sum = c_measure(&class, &h, &opts).unwrap().to_f64()
            + c_measure(&class, &hc, &opts).unwrap().to_f64();
        assert_eq!(sum, 0.0);
    }

    #[test]
    fn bisection_reproduces_the_closed_form_on_a_black_box() {
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let class = typicality_cclass(&fair(), &delta).black_box();
        let opts = CMeasureOptions::default();
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let m = c_measure(&class, &h, &opts).unwrap();
        assert!(!m.is_exact());
        assert!((m.to_f64() - 0.5).abs() <= 1e-6);
        if let EstimateMethod::Bisection { bracket, .. } = m.method {
            assert!(bracket.1 - bracket.0 <= opts.tolerance);
        } else {
            panic!("expected bisection");
        }
    }

    #[test]
    fn union_with_trivial_leaves_the_measure_unchanged() {
        let delta = Threshold::new(ratio(4, 5)).unwrap();
        let t = typicality_cclass(&biased(3, 5), &delta);
        let u = union_lift(&t, &trivial_cclass(&coin())).unwrap();
        let opts = CMeasureOptions::default();
        for event in crate::cclass::enumerate_all_events(&coin(), 1).unwrap() {
            let expected = biased(3, 5).extended_prob(&event).unwrap().to_f64().unwrap();
            let got = c_measure(&u, &event, &opts).unwrap().to_f64();
            assert!((got - expected).abs() <= 2e-6, "event {}", event.describe());
        }
    }

    #[test]
    fn equivalence_examples() {
        let opts = CMeasureOptions::default();
        let probes = default_probe_events(&coin(), 7, 6).unwrap();

        // delta-independence
        let a = typicality_cclass(&fair(), &Threshold::new(ratio(4, 5)).unwrap());
        let b = typicality_cclass(&fair(), &Threshold::new(ratio(19, 20)).unwrap());
        let r = equivalent(&a, &b, &probes, &opts).unwrap();
        assert!(r.equivalent);

        // different laws are not equivalent, witnessed by {H}
        let c = typicality_cclass(&biased(3, 5), &Threshold::new(ratio(4, 5)).unwrap());
        let r = equivalent(&a, &c, &probes, &opts).unwrap();
        assert!(!r.equivalent);
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let witness = r.probes.iter().find(|p| p.event == h).unwrap();
        assert!((witness.left - 0.5).abs() <= 1e-6);
        assert!((witness.right - 0.6).abs() <= 1e-6);

        // trivial vs typicality disagree on any nontrivial positive event
        let r = equivalent(&trivial_cclass(&coin()), &a, &probes, &opts).unwrap();
        assert!(!r.equivalent);
    }

    #[test]
    fn theorem1_self_check_and_union_witness() {
        let opts = CMeasureOptions::default();
        let probes = default_probe_events(&coin(), 11, 4).unwrap();
        let delta = Threshold::new(ratio(9, 10)).unwrap();

        // reflexive case
        let t = typicality_cclass(&fair(), &delta);
        let r = verify_theorem1(&fair(), &delta, &t, &probes, &opts).unwrap();
        assert!(r.consistent);

        // adding the trivial class changes nothing
        let u = union_lift(&t, &trivial_cclass(&coin())).unwrap();
        let r = verify_theorem1(&fair(), &delta, &u, &probes, &opts).unwrap();
        assert!(r.consistent);

        // a union of typicality classes over different laws breaks equality
        // and yields the disjoint-pair mechanism
        let u2 = union_lift(&t, &typicality_cclass(&biased(9, 10), &delta)).unwrap();
        let r = verify_theorem1(&fair(), &delta, &u2, &probes, &opts).unwrap();
        assert!(!r.consistent);
        assert!(
            !r.contradictions.is_empty(),
            "expected a contradiction witness"
        );
        let w = &r.contradictions[0];
        assert!(w.lower_member && w.upper_member);
    }

    #[test]
    fn containment_violation_is_an_error() {
        let opts = CMeasureOptions::default();
        let probes = default_probe_events(&coin(), 3, 2).unwrap();
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let err = verify_theorem1(
            &fair(),
            &delta,
            &trivial_cclass(&coin()),
            &probes,
            &opts,
        )
        .unwrap_err();
        assert!(matches!(err, CournotError::ContainmentViolated { .. }));
    }

    #[test]
    fn nested_pairs_are_nested() {
        for (a, b) in random_nested_pairs(&coin(), 2, 40, 5).unwrap() {
            assert!(a.is_subset_of(&b).unwrap());
        }
    }
}
