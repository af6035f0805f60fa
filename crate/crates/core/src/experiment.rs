//! Seeded stochastic experiments and the operational practical-certainty
//! test.
//!
//! An [`ExperimentModel`] draws outcomes from a fixed law (i.i.d. or Markov);
//! its level-n trials are blocks of n successive draws, and for Markov
//! generators successive blocks continue the chain, which is exactly what
//! breaks the product structure and makes them useful as negative controls.
//!
//! Practical certainty is decided operationally: run a long sequence of
//! trials and compare the observed relative frequency against 1 - epsilon
//! with a Hoeffding guardband. The verdict is three-valued; estimates inside
//! the guardband are reported as inconclusive rather than forced either way.
//!
//! Sampling streams are derived from (seed, purpose, level) only — not from
//! the event under test — so every event at a given level is evaluated on
//! the same simulated paths. That makes upward closure and disjointness of
//! verdicts hold pathwise instead of merely in expectation.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{CournotError, Result};
use crate::freq::{hoeffding_band, FreqEventSpec};
use crate::measure::ProbabilityMeasure;
use crate::space::{LeveledEvent, SampleSpace};

/// Inverse-CDF cut points scaled to the u64 range; outcome i owns the raw
/// values in [cuts[i-1], cuts[i]). The final cut (2^64) is implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
struct CutTable {
    cuts: Vec<u64>,
}

impl CutTable {
    fn from_weights(weights: &[BigRational]) -> CutTable {
        let scale = BigInt::one() << 64u32;
        let mut acc = BigRational::from_integer(BigInt::from(0));
        let mut cuts = Vec::with_capacity(weights.len().saturating_sub(1));
        for w in &weights[..weights.len() - 1] {
            acc += w;
            let scaled = (acc.numer() * &scale) / acc.denom();
            cuts.push(scaled.to_u64().unwrap_or(u64::MAX));
        }
        CutTable { cuts }
    }

    fn sample(&self, raw: u64) -> u8 {
        self.cuts.partition_point(|&c| c <= raw) as u8
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sampler {
    Iid {
        table: CutTable,
    },
    Markov {
        init: CutTable,
        rows: Vec<CutTable>,
    },
}

/// The generating law of an experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Iid {
        dist: ProbabilityMeasure,
    },
    Markov {
        init: Vec<BigRational>,
        trans: Vec<Vec<BigRational>>,
    },
}

/// A seeded stochastic experiment over a finite sample space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentModel {
    space: SampleSpace,
    seed: u64,
    spec: GeneratorSpec,
    sampler: Sampler,
}

impl ExperimentModel {
    /// An experiment whose draws are i.i.d. with the given law.
    pub fn iid(dist: ProbabilityMeasure, seed: u64) -> ExperimentModel {
        let table = CutTable::from_weights(dist.weights());
        ExperimentModel {
            space: dist.space().clone(),
            seed,
            sampler: Sampler::Iid { table },
            spec: GeneratorSpec::Iid { dist },
        }
    }

    /// A Markov chain experiment; rows of `trans` are per-state laws and
    /// must each sum to 1, like `init`.
    pub fn markov(
        space: &SampleSpace,
        init: Vec<BigRational>,
        trans: Vec<Vec<BigRational>>,
        seed: u64,
    ) -> Result<ExperimentModel> {
        let validate = |weights: &[BigRational], what: &str| -> Result<()> {
            ProbabilityMeasure::new(space, weights.to_vec()).map_err(|e| {
                CournotError::InvalidDistribution {
                    reason: format!("{what}: {e}"),
                }
            })?;
            Ok(())
        };
        validate(&init, "initial distribution")?;
        if trans.len() != space.size() {
            return Err(CournotError::InvalidDistribution {
                reason: format!(
                    "{} transition rows for a space of size {}",
                    trans.len(),
                    space.size()
                ),
            });
        }
        for (i, row) in trans.iter().enumerate() {
            validate(row, &format!("transition row {i}"))?;
        }
        let sampler = Sampler::Markov {
            init: CutTable::from_weights(&init),
            rows: trans.iter().map(|r| CutTable::from_weights(r)).collect(),
        };
        Ok(ExperimentModel {
            space: space.clone(),
            seed,
            sampler,
            spec: GeneratorSpec::Markov { init, trans },
        })
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn spec(&self) -> &GeneratorSpec {
        &self.spec
    }

    /// Same experiment, different seed.
    pub fn reseeded(&self, seed: u64) -> ExperimentModel {
        let mut other = self.clone();
        other.seed = seed;
        other
    }

    /// The i.i.d. law when there is one.
    pub fn iid_law(&self) -> Option<&ProbabilityMeasure> {
        match &self.spec {
            GeneratorSpec::Iid { dist } => Some(dist),
            GeneratorSpec::Markov { .. } => None,
        }
    }

    fn stream_rng(&self, purpose: &str, level: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream_tag(purpose, level));
        rng
    }

    /// Draws `count` level-n blocks as packed codes on one substream.
    /// Markov state persists across blocks.
    fn sample_block_codes(&self, n: u32, count: usize, purpose: &str) -> Result<Vec<u64>> {
        self.space
            .tuple_count(n)
            .ok_or(CournotError::LevelTooLarge {
                level: n,
                size: self.space.size(),
            })?;
        let mut rng = self.stream_rng(purpose, n);
        let base = self.space.size() as u64;
        let mut out = Vec::with_capacity(count);
        match &self.sampler {
            Sampler::Iid { table } => {
                for _ in 0..count {
                    let mut code = 0u64;
                    for _ in 0..n {
                        code = code * base + table.sample(rng.next_u64()) as u64;
                    }
                    out.push(code);
                }
            }
            Sampler::Markov { init, rows } => {
                let mut state: Option<u8> = None;
                for _ in 0..count {
                    let mut code = 0u64;
                    for _ in 0..n {
                        let next = match state {
                            None => init.sample(rng.next_u64()),
                            Some(s) => rows[s as usize].sample(rng.next_u64()),
                        };
                        state = Some(next);
                        code = code * base + next as u64;
                    }
                    out.push(code);
                }
            }
        }
        Ok(out)
    }

    /// `count` trials of the n-fold composite experiment, as outcome-index
    /// tuples. Deterministic in (seed, n, count).
    pub fn run_trials(&self, n: u32, count: usize) -> Result<Vec<Vec<u8>>> {
        if n == 0 || count == 0 {
            return Err(CournotError::InvalidParameter {
                name: "run_trials",
                reason: "level and count must be at least 1".into(),
            });
        }
        Ok(self
            .sample_block_codes(n, count, "trials")?
            .into_iter()
            .map(|c| self.space.decode_code(c, n))
            .collect())
    }

    /// Observed relative frequency of the event over `trials` trials of the
    /// composite experiment at the event's level.
    pub fn relative_frequency(&self, event: &LeveledEvent, trials: usize) -> Result<f64> {
        if *event.space() != self.space {
            return Err(CournotError::SpaceMismatch);
        }
        if trials == 0 {
            return Err(CournotError::InvalidParameter {
                name: "trials",
                reason: "must be at least 1".into(),
            });
        }
        let codes = self.sample_block_codes(event.level(), trials, "freq")?;
        let hits = codes.iter().filter(|c| event.contains_code(**c)).count();
        Ok(hits as f64 / trials as f64)
    }

    /// Observed relative frequency of the frequency event S(base, I, k),
    /// evaluated block-wise so the composite sequences are never packed.
    pub fn relative_frequency_of_freq_event(
        &self,
        spec: &FreqEventSpec,
        trials: usize,
    ) -> Result<f64> {
        if *spec.base.space() != self.space {
            return Err(CournotError::SpaceMismatch);
        }
        let n = spec.base.level();
        let k = spec.reps;
        let blocks = self.sample_block_codes(n, trials * k as usize, "freq-event")?;
        let mut hits = 0usize;
        for chunk in blocks.chunks_exact(k as usize) {
            let j = chunk.iter().filter(|c| spec.base.contains_code(**c)).count() as u64;
            if spec.interval.contains_frac(j, k) {
                hits += 1;
            }
        }
        Ok(hits as f64 / trials as f64)
    }
}

fn stream_tag(purpose: &str, level: u32) -> u64 {
    // FNV-1a over the purpose bytes, with the level folded in.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in purpose.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h ^= level as u64;
    h.wrapping_mul(0x100000001b3)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certain,
    NotCertain,
    Inconclusive,
}

/// Outcome of the operational practical-certainty procedure.
#[derive(Debug, Clone, Serialize)]
pub struct PracticalCertaintyDecision {
    pub subject: String,
    pub level: u32,
    pub sequence_length: usize,
    pub observed_frequency: f64,
    pub epsilon: f64,
    pub alpha: f64,
    /// Hoeffding guardband: with probability at least 1 - alpha the observed
    /// frequency is within this distance of the true one.
    pub confidence_bound: f64,
    pub verdict: Verdict,
}

fn classify(observed: f64, center: f64, band: f64) -> Verdict {
    if observed >= center + band {
        Verdict::Certain
    } else if observed <= center - band {
        Verdict::NotCertain
    } else {
        Verdict::Inconclusive
    }
}

fn check_certainty_params(epsilon: f64, alpha: f64, trials: usize) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(CournotError::InvalidParameter {
            name: "epsilon",
            reason: "must lie in (0, 1/2)".into(),
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CournotError::InvalidParameter {
            name: "alpha",
            reason: "must lie in (0, 1)".into(),
        });
    }
    if trials == 0 {
        return Err(CournotError::InvalidParameter {
            name: "trials",
            reason: "must be at least 1".into(),
        });
    }
    Ok(())
}

/// Singles out an event, performs a long sequence of trials, and decides
/// practical certainty from the observed relative frequency. The guardband
/// acknowledges that the procedure can err; estimates inside it come back
/// inconclusive.
pub fn is_practically_certain(
    model: &ExperimentModel,
    event: &LeveledEvent,
    trials: usize,
    epsilon: f64,
    alpha: f64,
) -> Result<PracticalCertaintyDecision> {
    check_certainty_params(epsilon, alpha, trials)?;
    let observed = model.relative_frequency(event, trials)?;
    let band = hoeffding_band(trials, alpha);
    Ok(PracticalCertaintyDecision {
        subject: event.describe(),
        level: event.level(),
        sequence_length: trials,
        observed_frequency: observed,
        epsilon,
        alpha,
        confidence_bound: band,
        verdict: classify(observed, 1.0 - epsilon, band),
    })
}

/// A practical-certainty membership oracle with cached per-event verdicts.
#[derive(Debug)]
pub struct EmpiricalClass {
    model: ExperimentModel,
    trials: usize,
    epsilon: f64,
    alpha: f64,
    event_cache: Mutex<BTreeMap<(u32, Vec<u64>), Verdict>>,
    freq_cache: Mutex<BTreeMap<String, Verdict>>,
}

impl EmpiricalClass {
    pub fn new(
        model: ExperimentModel,
        trials: usize,
        epsilon: f64,
        alpha: f64,
    ) -> Result<EmpiricalClass> {
        check_certainty_params(epsilon, alpha, trials)?;
        Ok(EmpiricalClass {
            model,
            trials,
            epsilon,
            alpha,
            event_cache: Mutex::new(BTreeMap::new()),
            freq_cache: Mutex::new(BTreeMap::new()),
        })
    }

    pub fn model(&self) -> &ExperimentModel {
        &self.model
    }

    pub fn params(&self) -> (usize, f64, f64) {
        (self.trials, self.epsilon, self.alpha)
    }

    pub fn describe(&self) -> String {
        format!(
            "empirical(seed {}, N {}, eps {}, alpha {})",
            self.model.seed(),
            self.trials,
            self.epsilon,
            self.alpha
        )
    }

    pub fn decide(&self, event: &LeveledEvent) -> Result<PracticalCertaintyDecision> {
        let key = (event.level(), event.codes().to_vec());
        if let Some(v) = self.event_cache.lock().unwrap().get(&key) {
            return Ok(PracticalCertaintyDecision {
                subject: event.describe(),
                level: event.level(),
                sequence_length: self.trials,
                observed_frequency: f64::NAN,
                epsilon: self.epsilon,
                alpha: self.alpha,
                confidence_bound: hoeffding_band(self.trials, self.alpha),
                verdict: *v,
            });
        }
        let decision =
            is_practically_certain(&self.model, event, self.trials, self.epsilon, self.alpha)?;
        self.event_cache.lock().unwrap().insert(key, decision.verdict);
        Ok(decision)
    }

    pub fn is_member(&self, event: &LeveledEvent) -> Result<bool> {
        Ok(self.decide(event)?.verdict == Verdict::Certain)
    }

    /// Membership of the frequency event S(base, I, k), decided by the same
    /// procedure on simulated composite trials.
    pub fn is_freq_member(&self, spec: &FreqEventSpec) -> Result<bool> {
        let key = spec.describe();
        if let Some(v) = self.freq_cache.lock().unwrap().get(&key) {
            return Ok(*v == Verdict::Certain);
        }
        let observed = self
            .model
            .relative_frequency_of_freq_event(spec, self.trials)?;
        let band = hoeffding_band(self.trials, self.alpha);
        let verdict = classify(observed, 1.0 - self.epsilon, band);
        self.freq_cache.lock().unwrap().insert(key, verdict);
        Ok(verdict == Verdict::Certain)
    }
}

/// One probe of a two-sample frequency comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeComparison {
    pub event: LeveledEvent,
    pub freq_left: f64,
    pub freq_right: f64,
    pub band: f64,
    pub separated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalEquivalenceReport {
    pub equivalent: bool,
    pub trials: usize,
    pub alpha: f64,
    pub probes: Vec<ProbeComparison>,
    pub scope_note: String,
}

/// Compares two experiments on a probe set: equivalent when no probe's
/// observed frequencies separate beyond the two-sample Hoeffding band at
/// level alpha (union-adjusted over the probes).
pub fn empirically_equivalent(
    left: &ExperimentModel,
    right: &ExperimentModel,
    probes: &[LeveledEvent],
    trials: usize,
    alpha: f64,
) -> Result<EmpiricalEquivalenceReport> {
    if left.space() != right.space() {
        return Err(CournotError::SpaceMismatch);
    }
    if probes.is_empty() {
        return Err(CournotError::EmptyList);
    }
    let per_probe_alpha = alpha / probes.len() as f64;
    let band = 2.0 * hoeffding_band(trials, per_probe_alpha);
    let mut out = Vec::with_capacity(probes.len());
    for event in probes {
        let f1 = left.relative_frequency(event, trials)?;
        let f2 = right.relative_frequency(event, trials)?;
        out.push(ProbeComparison {
            event: event.clone(),
            freq_left: f1,
            freq_right: f2,
            band,
            separated: (f1 - f2).abs() > band,
        });
    }
    Ok(EmpiricalEquivalenceReport {
        equivalent: out.iter().all(|p| !p.separated),
        trials,
        alpha,
        probes: out,
        scope_note: format!(
            "two-sample comparison on {} probe events at N = {trials}; \
             evidence at the probe set only",
            probes.len()
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn coin() -> SampleSpace {
        SampleSpace::coin()
    }

    fn iid_coin(num: i64, den: i64, seed: u64) -> ExperimentModel {
        let dist = ProbabilityMeasure::new(
            &coin(),
            vec![ratio(num, den), ratio(den - num, den)],
        )
        .unwrap();
        ExperimentModel::iid(dist, seed)
    }

    #[test]
    fn trials_are_reproducible() {
        let e = iid_coin(1, 2, 42);
        let a = e.run_trials(1, 5).unwrap();
        let b = e.run_trials(1, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        let other_seed = iid_coin(1, 2, 43).run_trials(1, 200).unwrap();
        assert_ne!(e.run_trials(1, 200).unwrap(), other_seed);
    }

    #[test]
    fn degenerate_law_is_deterministic() {
        let e = iid_coin(1, 1, 7);
        let trials = e.run_trials(3, 2).unwrap();
        assert_eq!(trials, vec![vec![0, 0, 0], vec![0, 0, 0]]);
    }

    #[test]
    fn absorbing_chain_stays_absorbed() {
        let space = coin();
        // T is absorbing; H flips a fair coin.
        let e = ExperimentModel::markov(
            &space,
            vec![ratio(1, 1), ratio(0, 1)],
            vec![
                vec![ratio(1, 2), ratio(1, 2)],
                vec![ratio(0, 1), ratio(1, 1)],
            ],
            13,
        )
        .unwrap();
        let trials = e.run_trials(4, 50).unwrap();
        let flat: Vec<u8> = trials.into_iter().flatten().collect();
        if let Some(first_t) = flat.iter().position(|&x| x == 1) {
            assert!(flat[first_t..].iter().all(|&x| x == 1));
        }
    }

    #[test]
    fn frequencies_track_the_law() {
        let e = iid_coin(9, 10, 1234);
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let f = e.relative_frequency(&h, 10_000).unwrap();
        let band = hoeffding_band(10_000, 0.01);
        assert!((f - 0.9).abs() < band, "f = {f}, band = {band}");

        let full = LeveledEvent::full(&coin(), 1).unwrap();
        assert_eq!(e.relative_frequency(&full, 100).unwrap(), 1.0);

        let sure = iid_coin(1, 1, 5);
        assert_eq!(sure.relative_frequency(&h, 100).unwrap(), 1.0);
    }

    #[test]
    fn practical_certainty_examples() {
        let space = coin();
        let h = LeveledEvent::from_labels(&space, 1, [["H"]]).unwrap();

        let nearly_sure = iid_coin(999, 1000, 2024);
        let d = is_practically_certain(&nearly_sure, &h, 10_000, 0.02, 0.01).unwrap();
        assert_eq!(d.verdict, Verdict::Certain);

        let fair = iid_coin(1, 2, 2024);
        let d = is_practically_certain(&fair, &h, 10_000, 0.02, 0.01).unwrap();
        assert_eq!(d.verdict, Verdict::NotCertain);

        // true frequency exactly at 1 - epsilon lands inside the guardband
        let boundary = iid_coin(49, 50, 2024);
        let d = is_practically_certain(&boundary, &h, 10_000, 0.02, 0.01).unwrap();
        assert_eq!(d.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn certainty_of_disjoint_events_is_exclusive() {
        // common sample paths make this pathwise, not just statistical
        let e = iid_coin(7, 10, 99);
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let t = LeveledEvent::from_labels(&coin(), 1, [["T"]]).unwrap();
        let dh = is_practically_certain(&e, &h, 5000, 0.4, 0.01).unwrap();
        let dt = is_practically_certain(&e, &t, 5000, 0.4, 0.01).unwrap();
        assert!((dh.observed_frequency + dt.observed_frequency - 1.0).abs() < 1e-12);
        assert!(!(dh.verdict == Verdict::Certain && dt.verdict == Verdict::Certain));
    }

    #[test]
    fn empirical_class_membership() {
        let e = iid_coin(999, 1000, 31);
        let class = EmpiricalClass::new(e, 10_000, 0.02, 0.01).unwrap();
        let h = LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap();
        let t = LeveledEvent::from_labels(&coin(), 1, [["T"]]).unwrap();
        let full = LeveledEvent::full(&coin(), 1).unwrap();
        assert!(class.is_member(&full).unwrap());
        assert!(class.is_member(&h).unwrap());
        assert!(!class.is_member(&t).unwrap());
        // cached second query agrees
        assert!(class.is_member(&h).unwrap());
    }

    #[test]
    fn equivalence_examples() {
        let probes: Vec<LeveledEvent> = vec![
            LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap(),
            LeveledEvent::from_labels(&coin(), 2, [["H", "H"]]).unwrap(),
        ];

        // same law, different seeds
        let a = iid_coin(1, 2, 1);
        let b = iid_coin(1, 2, 2);
        let r = empirically_equivalent(&a, &b, &probes, 10_000, 0.01).unwrap();
        assert!(r.equivalent);

        // p = 0.5 vs 0.6 separates on {H}
        let c = iid_coin(3, 5, 3);
        let r = empirically_equivalent(&a, &c, &probes, 10_000, 0.01).unwrap();
        assert!(!r.equivalent);

        // identical one-step marginal, different pair law: separates at level 2
        let markov = ExperimentModel::markov(
            &coin(),
            vec![ratio(4, 5), ratio(1, 5)],
            vec![
                vec![ratio(3, 4), ratio(1, 4)],
                vec![ratio(1, 1), ratio(0, 1)],
            ],
            4,
        )
        .unwrap();
        let iid_match = iid_coin(4, 5, 5);
        let level1 = vec![LeveledEvent::from_labels(&coin(), 1, [["H"]]).unwrap()];
        let r1 = empirically_equivalent(&iid_match, &markov, &level1, 10_000, 0.01).unwrap();
        assert!(r1.equivalent, "level-1 marginals match");
        let level2 = vec![
            LeveledEvent::from_labels(&coin(), 2, [["H", "T"]]).unwrap(),
            LeveledEvent::from_labels(&coin(), 2, [["T", "T"]]).unwrap(),
        ];
        let r2 = empirically_equivalent(&iid_match, &markov, &level2, 10_000, 0.01).unwrap();
        assert!(!r2.equivalent, "pair laws differ");
    }
}
