//! Frequency events and their exact binomial evaluation.
//!
//! For a level-n event A, an interval I of [0, 1] and a repetition count k,
//! the frequency event S(A, I, k) collects the k-sequences of level-n blocks
//! whose relative frequency of hitting A lies in I. Its extended probability
//! under a product measure is the binomial sum over the admissible hit
//! counts j with j/k in I:
//!
//! ```text
//!   P[S(A, I, k)] = sum_{j/k in I} C(k, j) p^j (1-p)^(k-j),   p = P(A)
//! ```
//!
//! computed here exactly in integer arithmetic, with a log-space floating
//! alternative for large k. Materialization enumerates the sequences
//! explicitly and is the brute-force oracle for the closed form.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::cclass::CClass;
use crate::error::{CournotError, Result};
use crate::measure::{Interval01, ProbabilityMeasure, Threshold};
use crate::rational::format_rational;
use crate::space::LeveledEvent;

/// Largest k for which exact tails are still evaluated when refining k0
/// diagnostics; beyond it the scan switches to log-space floats.
const K0_EXACT_SCAN_CAP: u64 = 1024;

/// Largest Hoeffding bound for which k0 is refined by scanning at all.
const K0_REFINE_CAP: u64 = 20_000;

/// A frequency-event specification: base event, target interval, and the
/// number of repetitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreqEventSpec {
    pub base: LeveledEvent,
    pub interval: Interval01,
    pub reps: u64,
}

impl FreqEventSpec {
    pub fn new(base: LeveledEvent, interval: Interval01, reps: u64) -> Result<Self> {
        if reps == 0 {
            return Err(CournotError::InvalidParameter {
                name: "reps",
                reason: "must be at least 1".into(),
            });
        }
        if interval.is_empty() {
            return Err(CournotError::InvalidInterval {
                reason: "frequency interval is empty".into(),
            });
        }
        Ok(FreqEventSpec {
            base,
            interval,
            reps,
        })
    }

    /// Level of the materialized event: base level times reps.
    pub fn sequence_level(&self) -> u32 {
        self.base.level() * self.reps as u32
    }

    pub fn describe(&self) -> String {
        format!(
            "S({}, {}, {})",
            self.base.describe(),
            self.interval.describe(),
            self.reps
        )
    }
}

/// Explicitly enumerates S(A, I, k) as a leveled event at level n*k.
///
/// The enumeration walks all |Omega|^(n*k) sequences with an odometer over
/// block codes, maintaining the hit count incrementally, so the cost is one
/// table lookup per sequence.
pub fn materialize_freq_event(spec: &FreqEventSpec, budget: u64) -> Result<LeveledEvent> {
    let space = spec.base.space().clone();
    let n = spec.base.level();
    let k = spec.reps;
    let block_count = space
        .tuple_count(n)
        .ok_or(CournotError::LevelTooLarge {
            level: n,
            size: space.size(),
        })?;
    let required = (block_count as u128).checked_pow(k as u32);
    let required = match required {
        Some(r) if r <= budget as u128 => r as u64,
        Some(r) => {
            return Err(CournotError::BudgetExceeded {
                required: r.min(u64::MAX as u128) as u64,
                budget,
            })
        }
        None => {
            return Err(CournotError::BudgetExceeded {
                required: u64::MAX,
                budget,
            })
        }
    };
    let level = n * k as u32;
    space.tuple_count(level).ok_or(CournotError::LevelTooLarge {
        level,
        size: space.size(),
    })?;

    let in_base: Vec<bool> = (0..block_count)
        .map(|c| spec.base.contains_code(c))
        .collect();
    let accept: Vec<bool> = (0..=k).map(|j| spec.interval.contains_frac(j, k)).collect();

    let mut codes = Vec::new();
    let mut digits = vec![0u64; k as usize];
    let mut hits: i64 = if in_base[0] { k as i64 } else { 0 };
    let delta = |c: u64| in_base[c as usize] as i64;
    for code in 0..required {
        if accept[hits as usize] {
            codes.push(code);
        }
        if code + 1 == required {
            break;
        }
        let mut i = k as usize - 1;
        loop {
            if digits[i] + 1 < block_count {
                hits += delta(digits[i] + 1) - delta(digits[i]);
                digits[i] += 1;
                break;
            }
            hits += delta(0) - delta(digits[i]);
            digits[i] = 0;
            i -= 1;
        }
    }
    Ok(LeveledEvent::from_sorted_codes_unchecked(
        &space, level, codes,
    ))
}

/// Exact binomial mass of the frequencies falling in `interval`:
/// the probability of S(A, I, k) given p = P(A).
pub fn freq_event_prob(p: &BigRational, interval: &Interval01, k: u64) -> Result<BigRational> {
    if p.is_negative() || *p > BigRational::one() {
        return Err(CournotError::InvalidProbability {
            value: format_rational(p),
        });
    }
    if k == 0 {
        return Err(CournotError::InvalidParameter {
            name: "k",
            reason: "must be at least 1".into(),
        });
    }
    let k_u32 = u32::try_from(k).map_err(|_| CournotError::InvalidParameter {
        name: "k",
        reason: "too large for exact evaluation".into(),
    })?;
    let a = p.numer().magnitude().clone();
    let b = p.denom().magnitude().clone();
    let c = &b - &a;

    // pow arrays with the convention 0^0 = 1
    let pow_table = |base: &BigUint| -> Vec<BigUint> {
        let mut t = Vec::with_capacity(k as usize + 1);
        t.push(BigUint::one());
        for _ in 0..k {
            let last = t.last().unwrap() * base;
            t.push(last);
        }
        t
    };
    let a_pow = pow_table(&a);
    let c_pow = pow_table(&c);

    let mut coeff = BigUint::one();
    let mut sum = BigUint::zero();
    for j in 0..=k {
        if interval.contains_frac(j, k) {
            sum += &coeff * &a_pow[j as usize] * &c_pow[(k - j) as usize];
        }
        if j < k {
            coeff = coeff * (k - j) / (j + 1);
        }
    }
    Ok(BigRational::new(
        BigInt::from(sum),
        BigInt::from(b.pow(k_u32)),
    ))
}

/// Log-space floating-point version of [`freq_event_prob`] for large k.
pub fn freq_event_prob_f64(p: f64, interval: &Interval01, k: u64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p) && k >= 1);
    if p <= 0.0 {
        return if interval.contains_frac(0, k) { 1.0 } else { 0.0 };
    }
    if p >= 1.0 {
        return if interval.contains_frac(k, k) { 1.0 } else { 0.0 };
    }
    let lp = p.ln();
    let lq = (-p).ln_1p();
    let mut log_term = k as f64 * lq;
    let mut sum = 0.0f64;
    for j in 0..=k {
        if interval.contains_frac(j, k) {
            sum += log_term.exp();
        }
        if j < k {
            log_term += ((k - j) as f64).ln() - ((j + 1) as f64).ln() + lp - lq;
        }
    }
    sum.min(1.0)
}

/// A probability that is either exact or a floating approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbValue {
    Exact(BigRational),
    Approx(f64),
}

impl ProbValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ProbValue::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            ProbValue::Approx(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            ProbValue::Exact(r) => Some(r),
            ProbValue::Approx(_) => None,
        }
    }
}

impl Serialize for ProbValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("ProbValue", 2)?;
        match self {
            ProbValue::Exact(r) => {
                s.serialize_field("kind", "exact")?;
                s.serialize_field("value", &format_rational(r))?;
            }
            ProbValue::Approx(x) => {
                s.serialize_field("kind", "approx")?;
                s.serialize_field("value", x)?;
            }
        }
        s.end()
    }
}

/// How probabilities over a k-range are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Exact rationals at every k.
    Exact,
    /// Log-space floats at every k.
    LogSpace,
    /// Exact up to the switchover, floats beyond.
    Auto { switchover: u64 },
}

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::Auto { switchover: 200 }
    }
}

/// Which one-parameter interval family a profile follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSide {
    /// S(A, [sigma, 1], k)
    Upper,
    /// S(A, [0, sigma), k)
    Lower,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfilePoint {
    pub k: u64,
    pub probability: ProbValue,
}

/// The probability of the frequency event for k = 1..k_max, for checking
/// convergence toward the weak-law limits (1 on the matching side of p,
/// 0 on the other).
pub fn bernoulli_limit_profile(
    p: &BigRational,
    sigma: &BigRational,
    k_max: u64,
    side: ProfileSide,
    mode: EvalMode,
) -> Result<Vec<ProfilePoint>> {
    if sigma <= &BigRational::zero() || sigma > &BigRational::one() {
        return Err(CournotError::InvalidParameter {
            name: "sigma",
            reason: "must lie in (0, 1]".into(),
        });
    }
    let interval = match side {
        ProfileSide::Upper => Interval01::upper(sigma.clone())?,
        ProfileSide::Lower => Interval01::lower_open(sigma.clone())?,
    };
    let p_f64 = p.to_f64().unwrap_or(f64::NAN);
    let mut points = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let exact = match mode {
            EvalMode::Exact => true,
            EvalMode::LogSpace => false,
            EvalMode::Auto { switchover } => k <= switchover,
        };
        let probability = if exact {
            ProbValue::Exact(freq_event_prob(p, &interval, k)?)
        } else {
            ProbValue::Approx(freq_event_prob_f64(p_f64, &interval, k))
        };
        points.push(ProfilePoint { k, probability });
    }
    Ok(points)
}

/// Smallest k for which the one-sided Hoeffding bound
/// `P[deviation >= gap] <= exp(-2 k gap^2)` drops below `eps`.
pub fn hoeffding_k_bound(eps: f64, gap: f64) -> u64 {
    debug_assert!(eps > 0.0 && eps < 1.0 && gap > 0.0);
    ((1.0 / eps).ln() / (2.0 * gap * gap)).ceil() as u64 + 1
}

/// Two-sided deviation band: an empirical mean of n draws stays within
/// `band` of its expectation with probability at least 1 - alpha.
pub fn hoeffding_band(n: usize, alpha: f64) -> f64 {
    debug_assert!(n > 0 && alpha > 0.0 && alpha < 1.0);
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertStatus {
    Holds,
    Fails,
    Undecided,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertMethod {
    Analytic,
    FiniteHorizon,
}

/// Certificate for "membership holds for every k beyond some k0".
///
/// Analytic certificates come with a closed-form justification; finite-
/// horizon certificates only assert what was observed up to the horizon and
/// always say so.
#[derive(Debug, Clone, Serialize)]
pub struct DefinitivelyCert {
    pub status: CertStatus,
    pub k0: Option<u64>,
    pub horizon: Option<u64>,
    pub method: CertMethod,
    pub justification: Option<String>,
}

impl DefinitivelyCert {
    pub fn holds(&self) -> bool {
        self.status == CertStatus::Holds
    }
}

fn refine_k0_upper(
    p: &BigRational,
    delta: &BigRational,
    sigma: &BigRational,
    k_bound: u64,
) -> (u64, String) {
    if k_bound > K0_REFINE_CAP {
        return (
            k_bound,
            format!("Hoeffding bound k0 = {k_bound} (scan skipped; bound too large)"),
        );
    }
    let interval = Interval01::upper(sigma.clone()).expect("sigma validated");
    let exact = k_bound <= K0_EXACT_SCAN_CAP;
    let p_f64 = p.to_f64().unwrap_or(f64::NAN);
    let delta_f64 = delta.to_f64().unwrap_or(f64::NAN);
    let mut last_below = 0u64;
    for k in 1..=k_bound {
        let ok = if exact {
            freq_event_prob(p, &interval, k).map(|v| v >= *delta).unwrap_or(false)
        } else {
            freq_event_prob_f64(p_f64, &interval, k) >= delta_f64
        };
        if !ok {
            last_below = k;
        }
    }
    let k0 = last_below + 1;
    let how = if exact { "exact" } else { "log-space" };
    (
        k0,
        format!(
            "tail >= delta for all k in [{k0}, {k_bound}] by {how} scan; \
             Hoeffding guarantees it for k > {k_bound}"
        ),
    )
}

/// Analytic decision of `S(A, [sigma, 1], k) definitively in T(P, delta)`.
///
/// Holds exactly when sigma < P(A) (tail tends to 1), fails when
/// sigma > P(A) (tail tends to 0); the boundary sigma = P(A) is not covered
/// by either limit and stays undecided.
pub fn definitively_in_typicality(
    measure: &ProbabilityMeasure,
    delta: &Threshold,
    event: &LeveledEvent,
    sigma: &BigRational,
) -> Result<DefinitivelyCert> {
    check_sigma(sigma)?;
    let p = measure.extended_prob(event)?;
    Ok(match sigma.cmp(&p) {
        std::cmp::Ordering::Less => {
            let gap = (&p - sigma).to_f64().unwrap_or(0.0);
            let one_minus_delta = 1.0 - delta.to_f64();
            let k_bound = hoeffding_k_bound(one_minus_delta.max(f64::MIN_POSITIVE), gap);
            let (k0, note) = refine_k0_upper(&p, delta.value(), sigma, k_bound);
            DefinitivelyCert {
                status: CertStatus::Holds,
                k0: Some(k0),
                horizon: None,
                method: CertMethod::Analytic,
                justification: Some(format!(
                    "sigma = {} < P(A) = {}; {note}",
                    format_rational(sigma),
                    format_rational(&p)
                )),
            }
        }
        std::cmp::Ordering::Greater => {
            let gap = (sigma - &p).to_f64().unwrap_or(0.0);
            let k_bound = hoeffding_k_bound(delta.to_f64(), gap);
            DefinitivelyCert {
                status: CertStatus::Fails,
                k0: Some(k_bound),
                horizon: None,
                method: CertMethod::Analytic,
                justification: Some(format!(
                    "sigma = {} > P(A) = {}; tail < delta for k >= {k_bound} by Hoeffding",
                    format_rational(sigma),
                    format_rational(&p)
                )),
            }
        }
        std::cmp::Ordering::Equal => DefinitivelyCert {
            status: CertStatus::Undecided,
            k0: None,
            horizon: None,
            method: CertMethod::Analytic,
            justification: Some("sigma equals P(A); neither limit applies".into()),
        },
    })
}

/// Analytic decision for the mirrored family `S(A, [0, sigma), k)`, which
/// tends to certainty when sigma > P(A).
pub fn definitively_lower_in_typicality(
    measure: &ProbabilityMeasure,
    delta: &Threshold,
    event: &LeveledEvent,
    sigma: &BigRational,
) -> Result<DefinitivelyCert> {
    check_sigma(sigma)?;
    let p = measure.extended_prob(event)?;
    Ok(match sigma.cmp(&p) {
        std::cmp::Ordering::Greater => {
            let gap = (sigma - &p).to_f64().unwrap_or(0.0);
            let k_bound = hoeffding_k_bound((1.0 - delta.to_f64()).max(f64::MIN_POSITIVE), gap);
            DefinitivelyCert {
                status: CertStatus::Holds,
                k0: Some(k_bound),
                horizon: None,
                method: CertMethod::Analytic,
                justification: Some(format!(
                    "sigma = {} > P(A) = {}; lower mass >= delta for k >= {k_bound} by Hoeffding",
                    format_rational(sigma),
                    format_rational(&p)
                )),
            }
        }
        std::cmp::Ordering::Less => {
            let gap = (&p - sigma).to_f64().unwrap_or(0.0);
            let k_bound = hoeffding_k_bound(delta.to_f64(), gap);
            DefinitivelyCert {
                status: CertStatus::Fails,
                k0: Some(k_bound),
                horizon: None,
                method: CertMethod::Analytic,
                justification: Some(format!(
                    "sigma = {} < P(A) = {}; lower mass < delta for k >= {k_bound} by Hoeffding",
                    format_rational(sigma),
                    format_rational(&p)
                )),
            }
        }
        std::cmp::Ordering::Equal => DefinitivelyCert {
            status: CertStatus::Undecided,
            k0: None,
            horizon: None,
            method: CertMethod::Analytic,
            justification: Some("sigma equals P(A); neither limit applies".into()),
        },
    })
}

fn check_sigma(sigma: &BigRational) -> Result<()> {
    if sigma <= &BigRational::zero() || sigma > &BigRational::one() {
        return Err(CournotError::InvalidParameter {
            name: "sigma",
            reason: "must lie in (0, 1]".into(),
        });
    }
    Ok(())
}

/// Finite-horizon certification of definitive membership for a black-box
/// class: queries membership of S(A, I, k) for every k up to the horizon and
/// certifies only what that window shows. Never analytic.
pub fn definitively_in_oracle(
    class: &CClass,
    base: &LeveledEvent,
    interval: &Interval01,
    horizon: u64,
) -> Result<DefinitivelyCert> {
    if horizon < 2 {
        return Err(CournotError::InvalidParameter {
            name: "horizon",
            reason: "must be at least 2".into(),
        });
    }
    let mut last_false = 0u64;
    let mut last_true = 0u64;
    for k in 1..=horizon {
        let spec = FreqEventSpec::new(base.clone(), interval.clone(), k)?;
        let member = class
            .contains_freq_event(&spec)
            .map_err(|e| CournotError::OracleFailure(e.to_string()))?;
        if member {
            last_true = k;
        } else {
            last_false = k;
        }
    }
    Ok(if last_false < horizon && last_true == horizon {
        DefinitivelyCert {
            status: CertStatus::Holds,
            k0: Some(last_false + 1),
            horizon: Some(horizon),
            method: CertMethod::FiniteHorizon,
            justification: None,
        }
    } else {
        DefinitivelyCert {
            status: CertStatus::Fails,
            k0: Some(last_true + 1),
            horizon: Some(horizon),
            method: CertMethod::FiniteHorizon,
            justification: None,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use crate::space::{SampleSpace, DEFAULT_ENUMERATION_BUDGET};

    fn coin() -> SampleSpace {
        SampleSpace::coin()
    }

    fn h_event() -> LeveledEvent {
        LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap()
    }

    #[test]
    fn materialize_examples() {
        // frequency exactly 1 over two repetitions: only HH
        let spec = FreqEventSpec::new(
            h_event(),
            Interval01::closed(ratio(1, 1), ratio(1, 1)).unwrap(),
            2,
        )
        .unwrap();
        let e = materialize_freq_event(&spec, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(e.label_tuples(), vec![vec!["H", "H"]]);

        // the unit interval captures every sequence
        let spec = FreqEventSpec::new(h_event(), Interval01::unit(), 3).unwrap();
        let e = materialize_freq_event(&spec, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert!(e.is_full());
        assert_eq!(e.level(), 3);

        // frequencies 1, 1/2, 1/2, 0 over HH, HT, TH, TT
        let spec =
            FreqEventSpec::new(h_event(), Interval01::upper(ratio(1, 2)).unwrap(), 2).unwrap();
        let e = materialize_freq_event(&spec, DEFAULT_ENUMERATION_BUDGET).unwrap();
        assert_eq!(
            e.label_tuples(),
            vec![vec!["H", "H"], vec!["H", "T"], vec!["T", "H"]]
        );
    }

    #[test]
    fn materialize_respects_budget() {
        let spec = FreqEventSpec::new(h_event(), Interval01::unit(), 30).unwrap();
        assert!(matches!(
            materialize_freq_event(&spec, 1 << 20),
            Err(CournotError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn freq_event_prob_examples() {
        // fair coin, upper half, k = 3: j in {2, 3} gives 4/8
        let p = ratio(1, 2);
        let v = freq_event_prob(&p, &Interval01::upper(ratio(1, 2)).unwrap(), 3).unwrap();
        assert_eq!(v, ratio(1, 2));

        // total mass is 1 for any p
        let v = freq_event_prob(&ratio(17, 31), &Interval01::unit(), 12).unwrap();
        assert_eq!(v, ratio(1, 1));

        // direct binomial sum for p = 9/10, I = [4/5, 1], k = 10
        let v = freq_event_prob(&ratio(9, 10), &Interval01::upper(ratio(4, 5)).unwrap(), 10)
            .unwrap();
        let expected = BigRational::new(BigInt::from(9298091736u64), BigInt::from(10u64.pow(10)));
        assert_eq!(v, expected);
    }

    #[test]
    fn freq_event_prob_degenerate_p() {
        let one = ratio(1, 1);
        let zero = ratio(0, 1);
        let upper = Interval01::upper(ratio(1, 2)).unwrap();
        assert_eq!(freq_event_prob(&one, &upper, 5).unwrap(), ratio(1, 1));
        assert_eq!(freq_event_prob(&zero, &upper, 5).unwrap(), ratio(0, 1));
        assert!(freq_event_prob(&ratio(3, 2), &upper, 5).is_err());
    }

    #[test]
    fn closed_form_matches_enumeration_against_rescaled_case() {
        // k = 4, p = 9/10, I = [4/5, 1]: enumeration oracle vs binomial sum
        let space = coin();
        let measure =
            ProbabilityMeasure::new(&space, vec![ratio(9, 10), ratio(1, 10)]).unwrap();
        let interval = Interval01::upper(ratio(4, 5)).unwrap();
        let spec = FreqEventSpec::new(h_event(), interval.clone(), 4).unwrap();
        let event = materialize_freq_event(&spec, DEFAULT_ENUMERATION_BUDGET).unwrap();
        let by_enumeration = measure.extended_prob(&event).unwrap();
        let by_formula = freq_event_prob(&ratio(9, 10), &interval, 4).unwrap();
        assert_eq!(by_enumeration, by_formula);
    }

    #[test]
    fn f64_path_tracks_exact_path() {
        let p = ratio(3, 5);
        let interval = Interval01::upper(ratio(1, 2)).unwrap();
        for k in [1, 7, 40, 130] {
            let exact = freq_event_prob(&p, &interval, k).unwrap();
            let approx = freq_event_prob_f64(0.6, &interval, k);
            assert!((exact.to_f64().unwrap() - approx).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn profile_examples() {
        let p = ratio(3, 5);
        // sigma below p: upper profile climbs toward 1
        let up = bernoulli_limit_profile(
            &p,
            &ratio(1, 2),
            200,
            ProfileSide::Upper,
            EvalMode::Exact,
        )
        .unwrap();
        let last = up.last().unwrap().probability.as_exact().unwrap().clone();
        assert!(last >= ratio(49, 50));

        // sigma above p: upper profile collapses toward 0
        let down = bernoulli_limit_profile(
            &p,
            &ratio(7, 10),
            200,
            ProfileSide::Upper,
            EvalMode::Exact,
        )
        .unwrap();
        let last = down.last().unwrap().probability.as_exact().unwrap().clone();
        assert!(last <= ratio(1, 50));

        // lower side mirrors the upper side through the exact complement
        let low = bernoulli_limit_profile(
            &p,
            &ratio(1, 2),
            200,
            ProfileSide::Lower,
            EvalMode::Exact,
        )
        .unwrap();
        for (u, l) in up.iter().zip(low.iter()) {
            let sum = u.probability.as_exact().unwrap() + l.probability.as_exact().unwrap();
            assert_eq!(sum, ratio(1, 1));
        }
    }

    #[test]
    fn auto_mode_switches_representation() {
        let pts = bernoulli_limit_profile(
            &ratio(3, 5),
            &ratio(1, 2),
            12,
            ProfileSide::Upper,
            EvalMode::Auto { switchover: 8 },
        )
        .unwrap();
        assert!(pts[7].probability.as_exact().is_some());
        assert!(pts[8].probability.as_exact().is_none());
    }

    #[test]
    fn definitively_typicality_examples() {
        let space = coin();
        let biased = ProbabilityMeasure::new(&space, vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let h = h_event();

        let cert = definitively_in_typicality(&biased, &delta, &h, &ratio(1, 2)).unwrap();
        assert_eq!(cert.status, CertStatus::Holds);
        assert_eq!(cert.method, CertMethod::Analytic);
        let k0 = cert.k0.unwrap();
        // k0 is the onset: the tail clears delta at k0 and not at k0 - 1.
        let interval = Interval01::upper(ratio(1, 2)).unwrap();
        let at_k0 = freq_event_prob(&ratio(3, 5), &interval, k0).unwrap();
        assert!(at_k0 >= ratio(9, 10));
        if k0 > 1 {
            let before = freq_event_prob(&ratio(3, 5), &interval, k0 - 1).unwrap();
            assert!(before < ratio(9, 10));
        }

        let cert = definitively_in_typicality(&biased, &delta, &h, &ratio(7, 10)).unwrap();
        assert_eq!(cert.status, CertStatus::Fails);

        let cert = definitively_in_typicality(&biased, &delta, &h, &ratio(3, 5)).unwrap();
        assert_eq!(cert.status, CertStatus::Undecided);
    }

    #[test]
    fn definitively_lower_mirrors_upper() {
        let space = coin();
        let biased = ProbabilityMeasure::new(&space, vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        let delta = Threshold::new(ratio(9, 10)).unwrap();
        let h = h_event();
        let above = definitively_lower_in_typicality(&biased, &delta, &h, &ratio(7, 10)).unwrap();
        assert_eq!(above.status, CertStatus::Holds);
        let below = definitively_lower_in_typicality(&biased, &delta, &h, &ratio(1, 2)).unwrap();
        assert_eq!(below.status, CertStatus::Fails);
    }

    #[test]
    fn hoeffding_bound_sanity() {
        // p = 3/5, sigma = 1/2: beyond the bound the exact tail stays above 1 - eps
        let p = ratio(3, 5);
        let interval = Interval01::upper(ratio(1, 2)).unwrap();
        let k = hoeffding_k_bound(0.01, 0.1);
        let tail = freq_event_prob(&p, &interval, k).unwrap();
        assert!(tail >= ratio(99, 100));
    }
}
