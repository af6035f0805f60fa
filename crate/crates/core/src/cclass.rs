//! C-classes: per-level event families that contain the full space, are
//! closed upward, and never contain two disjoint events.
//!
//! The built-in classes are the trivial class (full spaces only), typicality
//! classes (extended probability at least delta), empirical classes backed
//! by an experiment, lifted unions, and arbitrary custom membership
//! procedures. The union lift deliberately may violate the no-disjoint-pair
//! axiom; that failure mode is the engine behind the ambiguity results.
//!
//! Finite-level axiom checks are diagnostics, never proofs: a C-measure does
//! not depend on any finite set of levels, so every report states the scope
//! it actually covered.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CournotError, Result};
use crate::experiment::{EmpiricalClass, ExperimentModel};
use crate::freq::{
    definitively_in_oracle, freq_event_prob, freq_event_prob_f64, hoeffding_k_bound, CertMethod,
    CertStatus, DefinitivelyCert, FreqEventSpec,
};
use crate::measure::{typicality_contains, Interval01, ProbabilityMeasure, Threshold};
use crate::rational::format_rational;
use crate::space::{LeveledEvent, SampleSpace, DEFAULT_ENUMERATION_BUDGET};

/// Exact tails are used for symbolic frequency-event membership up to this
/// repetition count; beyond it the log-space evaluation takes over.
const FREQ_MEMBERSHIP_EXACT_CAP: u64 = 2048;

pub type MembershipFn = Arc<dyn Fn(&LeveledEvent) -> Result<bool> + Send + Sync>;
pub type FreqMembershipFn = Arc<dyn Fn(&FreqEventSpec) -> Result<bool> + Send + Sync>;
pub type FreqDefinitivelyFn =
    Arc<dyn Fn(&LeveledEvent, &BigRational, u64) -> Result<DefinitivelyCert> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassKind {
    Trivial,
    Typicality,
    Empirical,
    UnionLift,
    Custom,
}

#[derive(Clone)]
enum ClassImpl {
    Trivial,
    Typicality {
        measure: ProbabilityMeasure,
        delta: Threshold,
    },
    Empirical(Arc<EmpiricalClass>),
    Union(Box<CClass>, Box<CClass>),
    Custom {
        membership: MembershipFn,
        freq_membership: Option<FreqMembershipFn>,
        freq_definitively: Option<FreqDefinitivelyFn>,
    },
}

/// A membership oracle over leveled events, intended (but not enforced) to
/// satisfy the three C-class axioms per level.
#[derive(Clone)]
pub struct CClass {
    space: SampleSpace,
    inner: ClassImpl,
    support_note: String,
}

impl fmt::Debug for CClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CClass")
            .field("kind", &self.kind())
            .field("support_note", &self.support_note)
            .finish()
    }
}

/// The trivial C-class: exactly the full spaces, one per level.
pub fn trivial_cclass(space: &SampleSpace) -> CClass {
    CClass {
        space: space.clone(),
        inner: ClassImpl::Trivial,
        support_note: "trivial class; decidable at every level".into(),
    }
}

/// The typicality class T(P, delta): events with extended probability at
/// least delta.
pub fn typicality_cclass(measure: &ProbabilityMeasure, delta: &Threshold) -> CClass {
    CClass {
        space: measure.space().clone(),
        inner: ClassImpl::Typicality {
            measure: measure.clone(),
            delta: delta.clone(),
        },
        support_note: format!(
            "typicality at delta = {}; decidable wherever the event is explicit",
            format_rational(delta.value())
        ),
    }
}

/// The practical-certainty class of an experiment under a fixed decision
/// rule; membership verdicts are cached.
pub fn empirical_cclass(
    model: ExperimentModel,
    trials: usize,
    epsilon: f64,
    alpha: f64,
) -> Result<CClass> {
    let class = EmpiricalClass::new(model, trials, epsilon, alpha)?;
    let note = class.describe();
    Ok(CClass {
        space: class.model().space().clone(),
        inner: ClassImpl::Empirical(Arc::new(class)),
        support_note: format!("{note}; statistical verdicts, inconclusive maps to non-member"),
    })
}

/// Pointwise union of two classes over the same space. The result keeps
/// axioms (a) and (b) but may lose (c); that loss is what the ambiguity
/// experiments witness.
pub fn union_lift(left: &CClass, right: &CClass) -> Result<CClass> {
    if left.space != right.space {
        return Err(CournotError::SpaceMismatch);
    }
    Ok(CClass {
        space: left.space.clone(),
        inner: ClassImpl::Union(Box::new(left.clone()), Box::new(right.clone())),
        support_note: format!("union of [{}] and [{}]", left.support_note, right.support_note),
    })
}

/// A class from an arbitrary membership procedure. The procedure must be
/// deterministic and level-respecting.
pub fn custom_cclass(
    space: &SampleSpace,
    support_note: impl Into<String>,
    membership: MembershipFn,
) -> CClass {
    CClass {
        space: space.clone(),
        inner: ClassImpl::Custom {
            membership,
            freq_membership: None,
            freq_definitively: None,
        },
        support_note: support_note.into(),
    }
}

impl CClass {
    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn kind(&self) -> ClassKind {
        match &self.inner {
            ClassImpl::Trivial => ClassKind::Trivial,
            ClassImpl::Typicality { .. } => ClassKind::Typicality,
            ClassImpl::Empirical(_) => ClassKind::Empirical,
            ClassImpl::Union(..) => ClassKind::UnionLift,
            ClassImpl::Custom { .. } => ClassKind::Custom,
        }
    }

    pub fn support_note(&self) -> &str {
        &self.support_note
    }

    /// The backing empirical oracle, when this class has one.
    pub fn empirical(&self) -> Option<&EmpiricalClass> {
        match &self.inner {
            ClassImpl::Empirical(e) => Some(e),
            _ => None,
        }
    }

    /// The measure and threshold behind a typicality class.
    pub fn typicality_parts(&self) -> Option<(&ProbabilityMeasure, &Threshold)> {
        match &self.inner {
            ClassImpl::Typicality { measure, delta } => Some((measure, delta)),
            _ => None,
        }
    }

    /// Attaches a symbolic frequency-event membership procedure to a custom
    /// class.
    pub fn with_freq_membership(mut self, f: FreqMembershipFn) -> CClass {
        if let ClassImpl::Custom {
            freq_membership, ..
        } = &mut self.inner
        {
            *freq_membership = Some(f);
        }
        self
    }

    /// Attaches a definitive-membership procedure for upper frequency
    /// families to a custom class.
    pub fn with_freq_definitively(mut self, f: FreqDefinitivelyFn) -> CClass {
        if let ClassImpl::Custom {
            freq_definitively, ..
        } = &mut self.inner
        {
            *freq_definitively = Some(f);
        }
        self
    }

    /// An opaque wrapper: same answers, but the kind is erased so callers
    /// cannot shortcut through closed forms.
    pub fn black_box(&self) -> CClass {
        let m = self.clone();
        let f = self.clone();
        let d = self.clone();
        custom_cclass(
            &self.space,
            format!("opaque wrapper over [{}]", self.support_note),
            Arc::new(move |event| m.contains(event)),
        )
        .with_freq_membership(Arc::new(move |spec| f.contains_freq_event(spec)))
        .with_freq_definitively(Arc::new(move |base, sigma, horizon| {
            d.definitively_contains_upper(base, sigma, horizon)
        }))
    }

    /// Membership of an explicit leveled event.
    pub fn contains(&self, event: &LeveledEvent) -> Result<bool> {
        if *event.space() != self.space {
            return Err(CournotError::SpaceMismatch);
        }
        match &self.inner {
            ClassImpl::Trivial => Ok(event.is_full()),
            ClassImpl::Typicality { measure, delta } => typicality_contains(measure, delta, event),
            ClassImpl::Empirical(e) => e.is_member(event),
            ClassImpl::Union(a, b) => Ok(a.contains(event)? || b.contains(event)?),
            ClassImpl::Custom { membership, .. } => membership(event),
        }
    }

    /// Membership of the frequency event S(base, I, k) without
    /// materializing it, where the class structure allows; custom classes
    /// without a symbolic procedure fall back to explicit enumeration within
    /// the default budget.
    pub fn contains_freq_event(&self, spec: &FreqEventSpec) -> Result<bool> {
        if *spec.base.space() != self.space {
            return Err(CournotError::SpaceMismatch);
        }
        match &self.inner {
            ClassImpl::Trivial => {
                let k = spec.reps;
                // S is the full space iff every realizable frequency is accepted.
                if spec.base.is_full() {
                    Ok(spec.interval.contains_frac(k, k))
                } else if spec.base.is_empty() {
                    Ok(spec.interval.contains_frac(0, k))
                } else {
                    Ok((0..=k).all(|j| spec.interval.contains_frac(j, k)))
                }
            }
            ClassImpl::Typicality { measure, delta } => {
                let p = measure.extended_prob(&spec.base)?;
                if spec.reps <= FREQ_MEMBERSHIP_EXACT_CAP {
                    let mass = freq_event_prob(&p, &spec.interval, spec.reps)?;
                    Ok(mass >= *delta.value())
                } else {
                    let mass =
                        freq_event_prob_f64(p.to_f64().unwrap_or(f64::NAN), &spec.interval, spec.reps);
                    Ok(mass >= delta.to_f64())
                }
            }
            ClassImpl::Empirical(e) => e.is_freq_member(spec),
            ClassImpl::Union(a, b) => {
                Ok(a.contains_freq_event(spec)? || b.contains_freq_event(spec)?)
            }
            ClassImpl::Custom {
                membership,
                freq_membership,
                ..
            } => match freq_membership {
                Some(f) => f(spec),
                None => {
                    let event = crate::freq::materialize_freq_event(
                        spec,
                        DEFAULT_ENUMERATION_BUDGET,
                    )?;
                    membership(&event)
                }
            },
        }
    }

    /// Definitive membership of the family k -> S(base, [sigma, 1], k).
    ///
    /// Structured classes answer analytically; classes that are genuinely
    /// opaque (no attached procedure) are scanned up to the horizon and the
    /// certificate says so.
    pub fn definitively_contains_upper(
        &self,
        base: &LeveledEvent,
        sigma: &BigRational,
        horizon: u64,
    ) -> Result<DefinitivelyCert> {
        if *base.space() != self.space {
            return Err(CournotError::SpaceMismatch);
        }
        match &self.inner {
            ClassImpl::Trivial => {
                let full_forever = base.is_full();
                Ok(DefinitivelyCert {
                    status: if full_forever {
                        CertStatus::Holds
                    } else {
                        CertStatus::Fails
                    },
                    k0: Some(1),
                    horizon: None,
                    method: CertMethod::Analytic,
                    justification: Some(if full_forever {
                        "base is the full space, so every sequence has frequency 1".into()
                    } else {
                        "some sequence misses the base, so S is never the full space".into()
                    }),
                })
            }
            ClassImpl::Typicality { measure, delta } => {
                typicality_upper_family(measure, delta, base, sigma)
            }
            ClassImpl::Empirical(_) => {
                definitively_in_oracle(self, base, &Interval01::upper(sigma.clone())?, horizon)
            }
            ClassImpl::Union(a, b) => {
                let ca = a.definitively_contains_upper(base, sigma, horizon)?;
                let cb = b.definitively_contains_upper(base, sigma, horizon)?;
                Ok(combine_union_certs(ca, cb))
            }
            ClassImpl::Custom {
                freq_definitively, ..
            } => match freq_definitively {
                Some(f) => f(base, sigma, horizon),
                None => definitively_in_oracle(
                    self,
                    base,
                    &Interval01::upper(sigma.clone())?,
                    horizon,
                ),
            },
        }
    }
}

/// Analytic family decision for typicality classes without the k0
/// refinement scan (the decision itself is an exact comparison of sigma
/// against the base's extended probability).
fn typicality_upper_family(
    measure: &ProbabilityMeasure,
    delta: &Threshold,
    base: &LeveledEvent,
    sigma: &BigRational,
) -> Result<DefinitivelyCert> {
    let p = measure.extended_prob(base)?;
    Ok(match sigma.cmp(&p) {
        std::cmp::Ordering::Less => {
            let gap = (&p - sigma).to_f64().unwrap_or(0.0);
            let k0 = hoeffding_k_bound((1.0 - delta.to_f64()).max(f64::MIN_POSITIVE), gap);
            DefinitivelyCert {
                status: CertStatus::Holds,
                k0: Some(k0),
                horizon: None,
                method: CertMethod::Analytic,
                justification: Some("sigma < P(A); Hoeffding bound on k0".into()),
            }
        }
        std::cmp::Ordering::Greater => {
            let gap = (sigma - &p).to_f64().unwrap_or(0.0);
            let k0 = hoeffding_k_bound(delta.to_f64().max(f64::MIN_POSITIVE), gap);
            DefinitivelyCert {
                status: CertStatus::Fails,
                k0: Some(k0),
                horizon: None,
                method: CertMethod::Analytic,
                justification: Some("sigma > P(A); Hoeffding bound on k0".into()),
            }
        }
        std::cmp::Ordering::Equal => DefinitivelyCert {
            status: CertStatus::Undecided,
            k0: None,
            horizon: None,
            method: CertMethod::Analytic,
            justification: Some("sigma equals P(A)".into()),
        },
    })
}

fn combine_union_certs(a: DefinitivelyCert, b: DefinitivelyCert) -> DefinitivelyCert {
    use CertStatus::*;
    let method = if a.method == CertMethod::Analytic && b.method == CertMethod::Analytic {
        CertMethod::Analytic
    } else {
        CertMethod::FiniteHorizon
    };
    let horizon = match (a.horizon, b.horizon) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (h, None) | (None, h) => h,
    };
    match (a.status, b.status) {
        (Holds, Holds) => DefinitivelyCert {
            status: Holds,
            k0: a.k0.into_iter().chain(b.k0).min(),
            horizon,
            method,
            justification: Some("either branch suffices".into()),
        },
        (Holds, _) => DefinitivelyCert { horizon, method, ..a },
        (_, Holds) => DefinitivelyCert { horizon, method, ..b },
        (Fails, Fails) => DefinitivelyCert {
            status: Fails,
            k0: a.k0.into_iter().chain(b.k0).max(),
            horizon,
            method,
            justification: Some("both branches fail definitively".into()),
        },
        _ => DefinitivelyCert {
            status: Undecided,
            k0: None,
            horizon,
            method,
            justification: Some("branches disagree or are undecided".into()),
        },
    }
}

/// Budget for one axiom-check run.
#[derive(Debug, Clone)]
pub struct AxiomCheckBudget {
    pub max_membership_calls: usize,
    pub sample_events: usize,
    pub seed: u64,
}

impl Default for AxiomCheckBudget {
    fn default() -> Self {
        AxiomCheckBudget {
            max_membership_calls: 20_000,
            sample_events: 48,
            seed: 0xC0C0A,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheckOutcome {
    pub checked: bool,
    pub passed: bool,
    /// Offending events when failing: one event for axiom (a)/(b) context,
    /// the pair for axiom (c).
    pub counterexample: Vec<LeveledEvent>,
}

impl AxiomCheckOutcome {
    fn pass() -> Self {
        AxiomCheckOutcome {
            checked: true,
            passed: true,
            counterexample: Vec::new(),
        }
    }

    fn fail(events: Vec<LeveledEvent>) -> Self {
        AxiomCheckOutcome {
            checked: true,
            passed: false,
            counterexample: events,
        }
    }

    fn skipped() -> Self {
        AxiomCheckOutcome {
            checked: false,
            passed: true,
            counterexample: Vec::new(),
        }
    }
}

/// Per-level axiom report. Exhaustive when the whole power set of the level
/// was enumerated; otherwise a sampled diagnostic within budget.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub level: u32,
    pub exhaustive: bool,
    pub budget_used: usize,
    pub budget_exhausted: bool,
    pub axiom_a: AxiomCheckOutcome,
    pub axiom_b: AxiomCheckOutcome,
    pub axiom_c: AxiomCheckOutcome,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axiom_a.passed && self.axiom_b.passed && self.axiom_c.passed
    }
}

/// Universe size up to which levels are checked by full power-set
/// enumeration (2^12 = 4096 candidate events).
pub const EXHAUSTIVE_UNIVERSE_CAP: u64 = 12;

/// Checks the three per-level axioms: full space present, upward closure,
/// and no two disjoint members. Exhaustive for small levels, sampled within
/// the budget otherwise. Counterexamples re-verify through plain membership
/// calls.
pub fn check_axioms(class: &CClass, level: u32, budget: &AxiomCheckBudget) -> Result<AxiomReport> {
    let space = class.space().clone();
    let universe = space
        .tuple_count(level)
        .ok_or(CournotError::LevelTooLarge {
            level,
            size: space.size(),
        })?;

    if universe <= EXHAUSTIVE_UNIVERSE_CAP
        && (1usize << universe) <= budget.max_membership_calls
    {
        return check_axioms_exhaustive(class, level, universe);
    }
    check_axioms_sampled(class, level, universe, budget)
}

fn mask_event(space: &SampleSpace, level: u32, mask: u32) -> LeveledEvent {
    let codes: Vec<u64> = (0..32)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| i as u64)
        .collect();
    LeveledEvent::from_sorted_codes_unchecked(space, level, codes)
}

fn check_axioms_exhaustive(class: &CClass, level: u32, universe: u64) -> Result<AxiomReport> {
    let space = class.space().clone();
    let total = 1u32 << universe;
    let mut member = vec![false; total as usize];
    for mask in 0..total {
        member[mask as usize] = class.contains(&mask_event(&space, level, mask))?;
    }
    let full_mask = total - 1;

    let axiom_a = if member[full_mask as usize] {
        AxiomCheckOutcome::pass()
    } else {
        AxiomCheckOutcome::fail(vec![mask_event(&space, level, full_mask)])
    };

    // (b): every superset of a member is a member
    let mut axiom_b = AxiomCheckOutcome::pass();
    'outer: for b in 0..total {
        if member[b as usize] {
            continue;
        }
        // iterate the proper subsets of b
        let mut a = b & b.wrapping_sub(1);
        loop {
            if member[a as usize] {
                axiom_b = AxiomCheckOutcome::fail(vec![
                    mask_event(&space, level, a),
                    mask_event(&space, level, b),
                ]);
                break 'outer;
            }
            if a == 0 {
                break;
            }
            a = (a - 1) & b;
        }
    }

    // (c): no two disjoint members
    let members: Vec<u32> = (0..total).filter(|&m| member[m as usize]).collect();
    let mut axiom_c = AxiomCheckOutcome::pass();
    'pairs: for (i, &x) in members.iter().enumerate() {
        for &y in &members[i + 1..] {
            if x & y == 0 {
                axiom_c = AxiomCheckOutcome::fail(vec![
                    mask_event(&space, level, x),
                    mask_event(&space, level, y),
                ]);
                break 'pairs;
            }
        }
    }

    Ok(AxiomReport {
        level,
        exhaustive: true,
        budget_used: total as usize,
        budget_exhausted: false,
        axiom_a,
        axiom_b,
        axiom_c,
    })
}

fn check_axioms_sampled(
    class: &CClass,
    level: u32,
    universe: u64,
    budget: &AxiomCheckBudget,
) -> Result<AxiomReport> {
    let space = class.space().clone();
    let mut calls = 0usize;
    let mut exhausted = false;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed ^ (level as u64));

    let query = |class: &CClass, e: &LeveledEvent, calls: &mut usize| -> Result<Option<bool>> {
        if *calls >= budget.max_membership_calls {
            return Ok(None);
        }
        *calls += 1;
        class.contains(e).map(Some)
    };

    let axiom_a = if universe <= DEFAULT_ENUMERATION_BUDGET {
        let full = LeveledEvent::full(&space, level)?;
        match query(class, &full, &mut calls)? {
            Some(true) => AxiomCheckOutcome::pass(),
            Some(false) => AxiomCheckOutcome::fail(vec![full]),
            None => AxiomCheckOutcome::skipped(),
        }
    } else {
        AxiomCheckOutcome::skipped()
    };

    let random_event = |rng: &mut ChaCha8Rng| -> LeveledEvent {
        let size = 1 + (rng.next_u64() % 24) as usize;
        let codes: Vec<u64> = (0..size).map(|_| rng.next_u64() % universe).collect();
        LeveledEvent::from_codes(&space, level, codes).expect("codes in range")
    };

    let mut sampled_members: Vec<LeveledEvent> = Vec::new();
    let mut axiom_b = AxiomCheckOutcome::pass();
    for _ in 0..budget.sample_events {
        let a = random_event(&mut rng);
        let is_member = match query(class, &a, &mut calls)? {
            Some(v) => v,
            None => {
                exhausted = true;
                break;
            }
        };
        if !is_member {
            continue;
        }
        sampled_members.push(a.clone());
        // grow a superset and check upward closure
        let extra = random_event(&mut rng);
        let b = a.union(&extra)?;
        match query(class, &b, &mut calls)? {
            Some(true) => {}
            Some(false) => {
                axiom_b = AxiomCheckOutcome::fail(vec![a, b]);
                break;
            }
            None => {
                exhausted = true;
                break;
            }
        }
    }

    let mut axiom_c = AxiomCheckOutcome::pass();
    'pairs: for (i, x) in sampled_members.iter().enumerate() {
        for y in &sampled_members[i + 1..] {
            if x.is_disjoint_from(y)? {
                axiom_c = AxiomCheckOutcome::fail(vec![x.clone(), y.clone()]);
                break 'pairs;
            }
        }
    }

    Ok(AxiomReport {
        level,
        exhaustive: false,
        budget_used: calls,
        budget_exhausted: exhausted,
        axiom_a,
        axiom_b,
        axiom_c,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureViolation {
    pub event: LeveledEvent,
    pub measure: f64,
}

/// Report of the certainty-closure diagnostic: sampled events whose measure
/// reaches the infimum over the sampled members yet fail membership.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureCheckReport {
    pub sampled: usize,
    pub members: usize,
    pub inf_member_measure: Option<f64>,
    pub tolerance: f64,
    pub violations: Vec<ClosureViolation>,
}

impl ClosureCheckReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the closure property "measure at least the infimum over members
/// implies membership" on a sample of events, with the measure supplied by
/// the caller.
pub fn certainty_closure_check<F>(
    class: &CClass,
    measure_of: F,
    samples: &[LeveledEvent],
    tolerance: f64,
) -> Result<ClosureCheckReport>
where
    F: Fn(&LeveledEvent) -> Result<f64>,
{
    let mut inf: Option<f64> = None;
    let mut members = 0usize;
    let mut evaluated = Vec::with_capacity(samples.len());
    for event in samples {
        let is_member = class.contains(event)?;
        let m = measure_of(event)?;
        if is_member {
            members += 1;
            inf = Some(match inf {
                Some(v) => v.min(m),
                None => m,
            });
        }
        evaluated.push((event.clone(), is_member, m));
    }
    let mut violations = Vec::new();
    if let Some(inf_value) = inf {
        for (event, is_member, m) in evaluated {
            if !is_member && m >= inf_value - tolerance {
                violations.push(ClosureViolation { event, measure: m });
            }
        }
    }
    Ok(ClosureCheckReport {
        sampled: samples.len(),
        members,
        inf_member_measure: inf,
        tolerance,
        violations,
    })
}

/// All subsets of the level universe as events; only sensible for the small
/// levels the exhaustive checks cover.
pub fn enumerate_all_events(space: &SampleSpace, level: u32) -> Result<Vec<LeveledEvent>> {
    let universe = space
        .tuple_count(level)
        .ok_or(CournotError::LevelTooLarge {
            level,
            size: space.size(),
        })?;
    if universe > 20 {
        return Err(CournotError::ScopeTooLarge {
            reason: format!("2^{universe} subsets at level {level}"),
        });
    }
    Ok((0..(1u32 << universe))
        .map(|mask| mask_event(space, level, mask))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
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
    fn trivial_class_examples() {
        let class = trivial_cclass(&coin());
        let full2 = LeveledEvent::full(&coin(), 2).unwrap();
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let empty3 = LeveledEvent::empty(&coin(), 3).unwrap();
        assert!(class.contains(&full2).unwrap());
        assert!(!class.contains(&h).unwrap());
        assert!(!class.contains(&empty3).unwrap());
    }

    #[test]
    fn typicality_class_examples() {
        let delta = Threshold::new(ratio(3, 4)).unwrap();
        let class = typicality_cclass(&fair(), &delta);
        let omega = LeveledEvent::full(&coin(), 1).unwrap();
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        assert!(class.contains(&omega).unwrap());
        assert!(!class.contains(&h).unwrap());

        let delta = Threshold::new(ratio(4, 5)).unwrap();
        let class = typicality_cclass(&biased(9, 10), &delta);
        assert!(class.contains(&h).unwrap());
    }

    #[test]
    fn union_lift_examples() {
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let t = typicality_cclass(&biased(9, 10), &delta);
        let idem = union_lift(&t, &t).unwrap();
        let both = union_lift(&trivial_cclass(&coin()), &t).unwrap();
        for level in 1..=2 {
            for event in enumerate_all_events(&coin(), level).unwrap() {
                assert_eq!(idem.contains(&event).unwrap(), t.contains(&event).unwrap());
                assert_eq!(
                    both.contains(&event).unwrap(),
                    event.is_full() || t.contains(&event).unwrap()
                );
            }
        }
    }

    #[test]
    fn union_of_distinct_typicalities_contains_a_disjoint_pair() {
        // The lifted union keeps (a) and (b) but loses (c): at a suitable
        // repetition count both the low-frequency and the high-frequency
        // event are members, one through each branch.
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let t_fair = typicality_cclass(&fair(), &delta);
        let t_biased = typicality_cclass(&biased(9, 10), &delta);
        let union = union_lift(&t_fair, &t_biased).unwrap();

        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let sigma = ratio(7, 10);
        let k = 16;
        let lower = FreqEventSpec::new(h.clone(), Interval01::lower_open(sigma.clone()).unwrap(), k)
            .unwrap();
        let upper =
            FreqEventSpec::new(h.clone(), Interval01::upper(sigma.clone()).unwrap(), k).unwrap();

        // each branch certifies its side
        assert!(
            freq_event_prob(&ratio(1, 2), &lower.interval, k).unwrap() >= ratio(9, 10)
        );
        assert!(
            freq_event_prob(&ratio(9, 10), &upper.interval, k).unwrap() >= ratio(9, 10)
        );
        assert!(union.contains_freq_event(&lower).unwrap());
        assert!(union.contains_freq_event(&upper).unwrap());

        // and the two events are genuinely disjoint, by enumeration
        let lower_event =
            crate::freq::materialize_freq_event(&lower, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let upper_event =
            crate::freq::materialize_freq_event(&upper, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(lower_event.is_disjoint_from(&upper_event).unwrap());
        assert!(union.contains(&lower_event).unwrap());
        assert!(union.contains(&upper_event).unwrap());
    }

    #[test]
    fn axiom_checks_pass_for_builtin_classes() {
        let budget = AxiomCheckBudget::default();
        for level in 1..=3 {
            let r = check_axioms(&trivial_cclass(&coin()), level, &budget).unwrap();
            assert!(r.exhaustive && r.all_pass(), "trivial level {level}");
        }
        let delta = Threshold::new(ratio(3, 4)).unwrap();
        for level in 1..=3 {
            let r = check_axioms(&typicality_cclass(&fair(), &delta), level, &budget).unwrap();
            assert!(r.exhaustive && r.all_pass(), "typicality level {level}");
        }
    }

    #[test]
    fn planted_axiom_c_violation_is_found() {
        // membership at probability >= 1/2 admits the disjoint pair {H}, {T}
        let measure = fair();
        let class = custom_cclass(
            &coin(),
            "events with extended probability at least 1/2",
            Arc::new(move |e| Ok(measure.extended_prob(e)? >= ratio(1, 2))),
        );
        let r = check_axioms(&class, 1, &AxiomCheckBudget::default()).unwrap();
        assert!(r.axiom_a.passed && r.axiom_b.passed);
        assert!(!r.axiom_c.passed);
        let pair = &r.axiom_c.counterexample;
        assert_eq!(pair.len(), 2);
        assert!(pair[0].is_disjoint_from(&pair[1]).unwrap());
        // the counterexample re-verifies through plain membership calls
        assert!(class.contains(&pair[0]).unwrap());
        assert!(class.contains(&pair[1]).unwrap());
    }

    #[test]
    fn sampled_mode_reports_scope() {
        let delta = Threshold::new(ratio(3, 4)).unwrap();
        let class = typicality_cclass(&fair(), &delta);
        // coin at level 5 has a 32-outcome universe: sampling territory
        let r = check_axioms(&class, 5, &AxiomCheckBudget::default()).unwrap();
        assert!(!r.exhaustive);
        assert!(r.all_pass());
        assert!(r.budget_used > 0);
    }

    #[test]
    fn closure_check_examples() {
        let delta = Threshold::new(ratio(3, 4)).unwrap();
        let fair_measure = fair();
        let typ = typicality_cclass(&fair_measure, &delta);
        let events = enumerate_all_events(&coin(), 2).unwrap();

        let m = fair_measure.clone();
        let report = certainty_closure_check(
            &typ,
            |e| Ok(m.extended_prob(e)?.to_f64().unwrap()),
            &events,
            1e-9,
        )
        .unwrap();
        assert!(report.holds());

        // trivial class: infimum over members is 1, reached only by the full space
        let m = fair_measure.clone();
        let report = certainty_closure_check(
            &trivial_cclass(&coin()),
            |e| Ok(if e.is_full() { 1.0 } else { m.extended_prob(e).unwrap().to_f64().unwrap() * 0.0 }),
            &events,
            1e-9,
        )
        .unwrap();
        assert!(report.holds());

        // puncturing one typical event breaks the closure property
        let removed = LeveledEvent::from_labels(&coin(), 2, [["H", "H"]])
            .unwrap()
            .complement()
            .unwrap();
        let m = fair_measure.clone();
        let d = delta.clone();
        let removed_key = removed.clone();
        let punctured = custom_cclass(
            &coin(),
            "typicality with one member removed",
            Arc::new(move |e| {
                if *e == removed_key {
                    return Ok(false);
                }
                typicality_contains(&m, &d, e)
            }),
        );
        let m = fair_measure.clone();
        let report = certainty_closure_check(
            &punctured,
            |e| Ok(m.extended_prob(e)?.to_f64().unwrap()),
            &events,
            1e-9,
        )
        .unwrap();
        assert!(!report.holds());
        assert!(report.violations.iter().any(|v| v.event == removed));
    }

    #[test]
    fn black_box_preserves_answers_and_hides_kind() {
        let delta = Threshold::new(ratio(3, 4)).unwrap();
        let class = typicality_cclass(&fair(), &delta);
        let opaque = class.black_box();
        assert_eq!(opaque.kind(), ClassKind::Custom);
        for event in enumerate_all_events(&coin(), 2).unwrap() {
            assert_eq!(
                class.contains(&event).unwrap(),
                opaque.contains(&event).unwrap()
            );
        }
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let cert = opaque
            .definitively_contains_upper(&h, &ratio(1, 4), 64)
            .unwrap();
        assert_eq!(cert.status, CertStatus::Holds);
    }
}
