//! Exact probability measures on a finite space and the extended probability
//! they induce on every product level.
//!
//! A measure P on Ω extends to all of the leveled event universe by assigning
//! the n-fold product measure to level-n events; on an explicit tuple set the
//! value is the sum over its tuples of the per-coordinate weight products,
//! computed exactly.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CournotError, Result};
use crate::rational::{format_rational, is_unit_range};
use crate::space::{LeveledEvent, SampleSpace, DEFAULT_ENUMERATION_BUDGET};

/// A probability measure with exact rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityMeasure {
    space: SampleSpace,
    weights: Vec<BigRational>,
    // Weights rescaled to a common denominator for the integer fast path.
    common_denom: BigUint,
    numerators: Vec<BigUint>,
}

impl ProbabilityMeasure {
    /// Builds a measure from one weight per outcome. The weights must sum to
    /// exactly 1; nothing is silently renormalized.
    pub fn new(space: &SampleSpace, weights: Vec<BigRational>) -> Result<Self> {
        if weights.len() != space.size() {
            return Err(CournotError::InvalidDistribution {
                reason: format!(
                    "{} weights for a space of size {}",
                    weights.len(),
                    space.size()
                ),
            });
        }
        for (index, w) in weights.iter().enumerate() {
            if w.is_negative() {
                return Err(CournotError::NegativeWeight { index });
            }
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(CournotError::SumNotOne {
                got: format_rational(&total),
            });
        }
        let mut common_denom = BigUint::one();
        for w in &weights {
            common_denom = common_denom.lcm(&w.denom().magnitude().clone());
        }
        let numerators = weights
            .iter()
            .map(|w| {
                w.numer().magnitude() * &common_denom / w.denom().magnitude()
            })
            .collect();
        Ok(ProbabilityMeasure {
            space: space.clone(),
            weights,
            common_denom,
            numerators,
        })
    }

    /// Convenience constructor from `(label, "num/den")` pairs in any order.
    pub fn from_labeled(space: &SampleSpace, pairs: &[(&str, BigRational)]) -> Result<Self> {
        let mut weights = vec![BigRational::zero(); space.size()];
        let mut seen = vec![false; space.size()];
        for (label, w) in pairs {
            let idx = space
                .index_of(label)
                .ok_or_else(|| CournotError::InvalidDistribution {
                    reason: format!("unknown outcome label {label:?}"),
                })? as usize;
            if seen[idx] {
                return Err(CournotError::InvalidDistribution {
                    reason: format!("duplicate weight for {label:?}"),
                });
            }
            seen[idx] = true;
            weights[idx] = w.clone();
        }
        if seen.iter().any(|s| !s) {
            return Err(CournotError::InvalidDistribution {
                reason: "missing weight for some outcome".into(),
            });
        }
        ProbabilityMeasure::new(space, weights)
    }

    pub fn uniform(space: &SampleSpace) -> Self {
        let n = space.size();
        let w = BigRational::new(BigInt::one(), BigInt::from(n));
        ProbabilityMeasure::new(space, vec![w; n]).expect("uniform weights sum to 1")
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn weight(&self, index: u8) -> &BigRational {
        &self.weights[index as usize]
    }

    /// The extended probability of a leveled event: the n-fold product
    /// measure evaluated on the explicit tuple set, exactly.
    pub fn extended_prob(&self, event: &LeveledEvent) -> Result<BigRational> {
        if *event.space() != self.space {
            return Err(CournotError::SpaceMismatch);
        }
        let level = event.level();
        let denom = self
            .common_denom
            .clone()
            .pow(level);
        // Fast path: per-tuple numerator products fit in u128.
        if let (Some(denom_small), true) = (denom.to_u128(), !self.numerators.is_empty()) {
            let numer_small: Option<Vec<u128>> =
                self.numerators.iter().map(|n| n.to_u128()).collect();
            if let Some(numers) = numer_small {
                if let Some(sum) = self.sum_products_u128(event, &numers, denom_small) {
                    return Ok(BigRational::new(
                        BigInt::from(sum),
                        BigInt::from(denom_small),
                    ));
                }
            }
        }
        let base = self.space.size() as u64;
        let mut sum = BigUint::zero();
        for &code in event.codes() {
            let mut prod = BigUint::one();
            let mut rest = code;
            for _ in 0..level {
                prod *= &self.numerators[(rest % base) as usize];
                rest /= base;
            }
            sum += prod;
        }
        Ok(BigRational::new(BigInt::from(sum), BigInt::from(denom)))
    }

    fn sum_products_u128(
        &self,
        event: &LeveledEvent,
        numers: &[u128],
        _denom: u128,
    ) -> Option<u128> {
        // Since the per-tuple products over the whole of Omega^level sum to
        // denom = D^level, partial sums cannot overflow once denom fits.
        let base = self.space.size() as u64;
        let mut sum: u128 = 0;
        for &code in event.codes() {
            let mut prod: u128 = 1;
            let mut rest = code;
            for _ in 0..event.level() {
                prod = prod.checked_mul(numers[(rest % base) as usize])?;
                rest /= base;
            }
            sum = sum.checked_add(prod)?;
        }
        Some(sum)
    }

    pub fn extended_prob_f64(&self, event: &LeveledEvent) -> Result<f64> {
        Ok(self.extended_prob(event)?.to_f64().unwrap_or(f64::NAN))
    }
}

/// Cartesian product of level-1 events; the result lives at the level equal
/// to the number of factors and its extended probability is the product of
/// the factors' probabilities.
pub fn rectangle(factors: &[LeveledEvent]) -> Result<LeveledEvent> {
    let first = factors.first().ok_or(CournotError::EmptyList)?;
    let space = first.space().clone();
    for f in factors {
        if *f.space() != space {
            return Err(CournotError::SpaceMismatch);
        }
        if f.level() != 1 {
            return Err(CournotError::LevelMismatch {
                left: 1,
                right: f.level(),
            });
        }
    }
    let level = factors.len() as u32;
    space
        .tuple_count(level)
        .ok_or(CournotError::LevelTooLarge {
            level,
            size: space.size(),
        })?;
    let mut required = 1u64;
    for f in factors {
        required = required.saturating_mul(f.len() as u64);
    }
    if required > DEFAULT_ENUMERATION_BUDGET {
        return Err(CournotError::BudgetExceeded {
            required,
            budget: DEFAULT_ENUMERATION_BUDGET,
        });
    }
    let base = space.size() as u64;
    // Factors hold sorted codes, so this nested walk emits sorted codes.
    let mut codes = vec![0u64];
    for f in factors {
        let mut next = Vec::with_capacity(codes.len() * f.len().max(1));
        for prefix in &codes {
            for &c in f.codes() {
                next.push(prefix * base + c);
            }
        }
        codes = next;
    }
    if factors.iter().any(|f| f.is_empty()) {
        codes.clear();
    }
    Ok(LeveledEvent::from_sorted_codes_unchecked(
        &space, level, codes,
    ))
}

/// A sub-interval of [0, 1] with independent open/closed endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval01 {
    lo: BigRational,
    hi: BigRational,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval01 {
    pub fn new(lo: BigRational, hi: BigRational, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if !is_unit_range(&lo) || !is_unit_range(&hi) {
            return Err(CournotError::InvalidInterval {
                reason: "endpoints must lie in [0, 1]".into(),
            });
        }
        if lo > hi {
            return Err(CournotError::InvalidInterval {
                reason: format!(
                    "lower endpoint {} exceeds upper endpoint {}",
                    format_rational(&lo),
                    format_rational(&hi)
                ),
            });
        }
        Ok(Interval01 {
            lo,
            hi,
            lo_closed,
            hi_closed,
        })
    }

    pub fn closed(lo: BigRational, hi: BigRational) -> Result<Self> {
        Interval01::new(lo, hi, true, true)
    }

    /// The whole unit interval [0, 1].
    pub fn unit() -> Self {
        Interval01 {
            lo: BigRational::zero(),
            hi: BigRational::one(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    /// The upper tail [sigma, 1].
    pub fn upper(sigma: BigRational) -> Result<Self> {
        Interval01::new(sigma, BigRational::one(), true, true)
    }

    /// The lower half-open interval [0, sigma).
    pub fn lower_open(sigma: BigRational) -> Result<Self> {
        Interval01::new(BigRational::zero(), sigma, true, false)
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_empty(&self) -> bool {
        self.lo == self.hi && !(self.lo_closed && self.hi_closed)
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        let above = match self.lo.cmp(x) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.lo_closed,
            std::cmp::Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.hi_closed,
            std::cmp::Ordering::Greater => false,
        };
        above && below
    }

    /// Membership of j/k without allocating a rational.
    pub fn contains_frac(&self, j: u64, k: u64) -> bool {
        debug_assert!(k > 0);
        let cmp_endpoint = |e: &BigRational| -> std::cmp::Ordering {
            // compare j/k with e = n/d via j*d <=> k*n
            match (e.numer().to_u64(), e.denom().to_u64()) {
                (Some(n), Some(d)) => {
                    let left = j as u128 * d as u128;
                    let right = k as u128 * n as u128;
                    left.cmp(&right)
                }
                _ => {
                    let frac = BigRational::new(BigInt::from(j), BigInt::from(k));
                    frac.cmp(e)
                }
            }
        };
        let above = match cmp_endpoint(&self.lo) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Equal => self.lo_closed,
            std::cmp::Ordering::Less => false,
        };
        let below = match cmp_endpoint(&self.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => self.hi_closed,
            std::cmp::Ordering::Greater => false,
        };
        above && below
    }

    pub fn intersects(&self, other: &Interval01) -> bool {
        if self.is_empty() || other.is_empty() {
            return false;
        }
        let (first, second) = if self.lo <= other.lo {
            (self, other)
        } else {
            (other, self)
        };
        match second.lo.cmp(&first.hi) {
            std::cmp::Ordering::Less => true,
            std::cmp::Ordering::Equal => second.lo_closed && first.hi_closed,
            std::cmp::Ordering::Greater => false,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.hi_closed { ']' } else { ')' },
        )
    }
}

/// A typicality threshold delta with 1/2 < delta < 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Threshold {
    delta: BigRational,
}

impl Threshold {
    pub fn new(delta: BigRational) -> Result<Self> {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        if delta <= half || delta >= BigRational::one() {
            return Err(CournotError::ThresholdOutOfRange {
                value: format_rational(&delta),
            });
        }
        Ok(Threshold { delta })
    }

    pub fn value(&self) -> &BigRational {
        &self.delta
    }

    pub fn to_f64(&self) -> f64 {
        self.delta.to_f64().unwrap_or(f64::NAN)
    }

    /// Whether delta qualifies as "close to 1" under a caller-declared
    /// epsilon, i.e. 1 - epsilon <= delta. There is no built-in epsilon.
    pub fn approx_one(&self, epsilon: &BigRational) -> bool {
        BigRational::one() - epsilon <= self.delta
    }
}

/// Membership of A in the typicality class T(P, delta): extended probability
/// at least delta, decided by exact comparison.
pub fn typicality_contains(
    measure: &ProbabilityMeasure,
    delta: &Threshold,
    event: &LeveledEvent,
) -> Result<bool> {
    Ok(measure.extended_prob(event)? >= *delta.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn coin() -> SampleSpace {
        SampleSpace::coin()
    }

    #[test]
    fn make_measure_examples() {
        let fair = ProbabilityMeasure::new(&coin(), vec![ratio(1, 2), ratio(1, 2)]).unwrap();
        assert_eq!(*fair.weight(0), ratio(1, 2));

        let biased = ProbabilityMeasure::new(&coin(), vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        assert_eq!(*biased.weight(0), ratio(3, 5));

        let err = ProbabilityMeasure::new(&coin(), vec![ratio(1, 2), ratio(1, 3)]).unwrap_err();
        assert!(matches!(err, CournotError::SumNotOne { got } if got == "5/6"));

        let err = ProbabilityMeasure::new(&coin(), vec![ratio(3, 2), ratio(-1, 2)]).unwrap_err();
        assert!(matches!(err, CournotError::NegativeWeight { index: 1 }));
    }

    #[test]
    fn extended_prob_examples() {
        let fair = ProbabilityMeasure::uniform(&coin());
        let hh = LeveledEvent::from_labels(&coin(), 2, [["H", "H"]]).unwrap();
        assert_eq!(fair.extended_prob(&hh).unwrap(), ratio(1, 4));

        let full = LeveledEvent::full(&coin(), 2).unwrap();
        assert_eq!(fair.extended_prob(&full).unwrap(), ratio(1, 1));

        let biased = ProbabilityMeasure::new(&coin(), vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        let mixed = LeveledEvent::from_labels(&coin(), 2, [["H", "T"], ["T", "H"]]).unwrap();
        assert_eq!(biased.extended_prob(&mixed).unwrap(), ratio(12, 25));

        let empty = LeveledEvent::empty(&coin(), 3).unwrap();
        assert_eq!(biased.extended_prob(&empty).unwrap(), ratio(0, 1));
    }

    #[test]
    fn extended_prob_space_mismatch() {
        let fair = ProbabilityMeasure::uniform(&coin());
        let die = SampleSpace::new(["1", "2"]).unwrap();
        let e = LeveledEvent::full(&die, 1).unwrap();
        assert!(matches!(
            fair.extended_prob(&e),
            Err(CournotError::SpaceMismatch)
        ));
    }

    #[test]
    fn rectangle_examples() {
        let space = coin();
        let h = LeveledEvent::from_labels(&space, 1, [["H"]]).unwrap();
        let t = LeveledEvent::from_labels(&space, 1, [["T"]]).unwrap();
        let omega = LeveledEvent::full(&space, 1).unwrap();

        let ht = rectangle(&[h.clone(), t.clone()]).unwrap();
        assert_eq!(ht.label_tuples(), vec![vec!["H", "T"]]);

        let full = rectangle(&[omega.clone(), omega.clone()]).unwrap();
        assert!(full.is_full());

        let biased = ProbabilityMeasure::new(&space, vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        let r = rectangle(&[h, omega]).unwrap();
        assert_eq!(biased.extended_prob(&r).unwrap(), ratio(3, 5));

        assert!(matches!(rectangle(&[]), Err(CournotError::EmptyList)));
    }

    #[test]
    fn typicality_examples() {
        let space = coin();
        let fair = ProbabilityMeasure::uniform(&space);
        let delta = Threshold::new(ratio(3, 4)).unwrap();
        let omega = LeveledEvent::full(&space, 1).unwrap();
        let h = LeveledEvent::from_labels(&space, 1, [["H"]]).unwrap();
        assert!(typicality_contains(&fair, &delta, &omega).unwrap());
        assert!(!typicality_contains(&fair, &delta, &h).unwrap());

        let nearly = ProbabilityMeasure::new(&space, vec![ratio(9, 10), ratio(1, 10)]).unwrap();
        let delta = Threshold::new(ratio(4, 5)).unwrap();
        let hhh = LeveledEvent::from_labels(&space, 3, [["H", "H", "H"]]).unwrap();
        // (9/10)^3 = 729/1000 < 4/5
        assert!(!typicality_contains(&nearly, &delta, &hhh).unwrap());
    }

    #[test]
    fn threshold_range() {
        assert!(Threshold::new(ratio(1, 2)).is_err());
        assert!(Threshold::new(ratio(1, 1)).is_err());
        assert!(Threshold::new(ratio(2, 3)).is_ok());
        let t = Threshold::new(ratio(99, 100)).unwrap();
        assert!(t.approx_one(&ratio(1, 50)));
        assert!(!t.approx_one(&ratio(1, 200)));
    }

    #[test]
    fn interval_membership_honors_closure() {
        let half_open = Interval01::lower_open(ratio(1, 2)).unwrap();
        assert!(half_open.contains(&ratio(0, 1)));
        assert!(!half_open.contains(&ratio(1, 2)));
        let upper = Interval01::upper(ratio(1, 2)).unwrap();
        assert!(upper.contains(&ratio(1, 2)));
        assert!(!half_open.intersects(&upper));
        assert!(half_open.contains_frac(1, 3));
        assert!(!half_open.contains_frac(1, 2));
        assert!(upper.contains_frac(1, 2));

        let point = Interval01::new(ratio(1, 3), ratio(1, 3), true, false).unwrap();
        assert!(point.is_empty());
        assert!(!point.contains(&ratio(1, 3)));
        assert!(Interval01::new(ratio(2, 3), ratio(1, 3), true, true).is_err());
    }
}
