//! Finite sample spaces and leveled events.
//!
//! A [`SampleSpace`] is a small ordered alphabet of outcome labels. A
//! [`LeveledEvent`] is a finite subset of the n-fold product of the space,
//! tagged with its level n. Tuples are stored as packed base-|Ω| codes in
//! lexicographic order, so set operations are sorted-vector merges and
//! membership tests are binary searches.
//!
//! Levels are explicit and never coerced: combining events from different
//! levels is an error, mirroring the fact that the per-level components of
//! a class of events stay disjoint.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{CournotError, Result};

/// Hard cap on the alphabet size; everything here is desk-scale by design.
pub const MAX_OUTCOMES: usize = 16;

/// Default cap on the number of tuples any single operation may enumerate.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1_000_000;

#[derive(Debug, PartialEq, Eq)]
struct SpaceInner {
    labels: Vec<String>,
}

/// A finite, ordered outcome alphabet Ω.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleSpace(Arc<SpaceInner>);

impl SampleSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(CournotError::InvalidSpace {
                reason: "no outcomes".into(),
            });
        }
        if labels.len() > MAX_OUTCOMES {
            return Err(CournotError::InvalidSpace {
                reason: format!("{} outcomes exceed the cap of {MAX_OUTCOMES}", labels.len()),
            });
        }
        for (i, a) in labels.iter().enumerate() {
            if a.is_empty() {
                return Err(CournotError::InvalidSpace {
                    reason: format!("outcome {i} has an empty label"),
                });
            }
            if labels[..i].contains(a) {
                return Err(CournotError::InvalidSpace {
                    reason: format!("duplicate label {a:?}"),
                });
            }
        }
        Ok(SampleSpace(Arc::new(SpaceInner { labels })))
    }

    /// The two-outcome space `{H, T}` used throughout the tests.
    pub fn coin() -> Self {
        SampleSpace::new(["H", "T"]).expect("static labels")
    }

    pub fn size(&self) -> usize {
        self.0.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    pub fn label(&self, index: u8) -> &str {
        &self.0.labels[index as usize]
    }

    pub fn index_of(&self, label: &str) -> Option<u8> {
        self.0
            .labels
            .iter()
            .position(|l| l == label)
            .map(|i| i as u8)
    }

    /// |Ω|^level, or `None` when it does not fit in a `u64`.
    pub fn tuple_count(&self, level: u32) -> Option<u64> {
        (self.size() as u64).checked_pow(level)
    }

    fn require_level(&self, level: u32) -> Result<u64> {
        if level == 0 {
            return Err(CournotError::InvalidEvent {
                reason: "level must be at least 1".into(),
            });
        }
        self.tuple_count(level).ok_or(CournotError::LevelTooLarge {
            level,
            size: self.size(),
        })
    }

    /// Packs an outcome-index tuple into its lexicographic code.
    pub fn encode_tuple(&self, tuple: &[u8]) -> Result<u64> {
        let base = self.size() as u64;
        let mut code = 0u64;
        for &idx in tuple {
            if (idx as usize) >= self.size() {
                return Err(CournotError::InvalidEvent {
                    reason: format!("outcome index {idx} out of range"),
                });
            }
            code = code * base + idx as u64;
        }
        Ok(code)
    }

    /// Inverse of [`encode_tuple`](Self::encode_tuple) for a given level.
    pub fn decode_code(&self, code: u64, level: u32) -> Vec<u8> {
        let base = self.size() as u64;
        let mut out = vec![0u8; level as usize];
        let mut rest = code;
        for slot in out.iter_mut().rev() {
            *slot = (rest % base) as u8;
            rest /= base;
        }
        out
    }
}

impl fmt::Display for SampleSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels().join(", "))
    }
}

/// A measurable subset of Ω^level, stored as sorted packed tuple codes.
#[derive(Debug, Clone)]
pub struct LeveledEvent {
    space: SampleSpace,
    level: u32,
    codes: Vec<u64>,
}

impl LeveledEvent {
    /// Builds an event from raw outcome-index tuples. Duplicates collapse.
    pub fn new<I, T>(space: &SampleSpace, level: u32, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        space.require_level(level)?;
        let mut codes = Vec::new();
        for t in tuples {
            let t = t.as_ref();
            if t.len() != level as usize {
                return Err(CournotError::InvalidEvent {
                    reason: format!("tuple of length {} in a level-{level} event", t.len()),
                });
            }
            codes.push(space.encode_tuple(t)?);
        }
        codes.sort_unstable();
        codes.dedup();
        Ok(LeveledEvent {
            space: space.clone(),
            level,
            codes,
        })
    }

    /// Builds an event from label tuples, e.g. `[["H", "T"], ["T", "H"]]`.
    pub fn from_labels<I, T, S>(space: &SampleSpace, level: u32, tuples: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut index_tuples = Vec::new();
        for t in tuples {
            let mut indices = Vec::with_capacity(t.as_ref().len());
            for label in t.as_ref() {
                let label = label.as_ref();
                let idx = space
                    .index_of(label)
                    .ok_or_else(|| CournotError::InvalidEvent {
                        reason: format!("unknown outcome label {label:?}"),
                    })?;
                indices.push(idx);
            }
            index_tuples.push(indices);
        }
        LeveledEvent::new(space, level, index_tuples)
    }

    /// Builds an event directly from packed codes (sorted and deduped here).
    pub fn from_codes(space: &SampleSpace, level: u32, mut codes: Vec<u64>) -> Result<Self> {
        let count = space.require_level(level)?;
        codes.sort_unstable();
        codes.dedup();
        if let Some(&last) = codes.last() {
            if last >= count {
                return Err(CournotError::InvalidEvent {
                    reason: format!("code {last} out of range for level {level}"),
                });
            }
        }
        Ok(LeveledEvent {
            space: space.clone(),
            level,
            codes,
        })
    }

    /// Codes known to be sorted, deduped and in range; used by enumeration
    /// loops that produce codes in order.
    pub(crate) fn from_sorted_codes_unchecked(
        space: &SampleSpace,
        level: u32,
        codes: Vec<u64>,
    ) -> Self {
        debug_assert!(codes.windows(2).all(|w| w[0] < w[1]));
        LeveledEvent {
            space: space.clone(),
            level,
            codes,
        }
    }

    pub fn empty(space: &SampleSpace, level: u32) -> Result<Self> {
        space.require_level(level)?;
        Ok(LeveledEvent {
            space: space.clone(),
            level,
            codes: Vec::new(),
        })
    }

    /// The full space Ω^level. Errors if the tuple count exceeds the budget.
    pub fn full(space: &SampleSpace, level: u32) -> Result<Self> {
        let count = space.require_level(level)?;
        if count > DEFAULT_ENUMERATION_BUDGET {
            return Err(CournotError::BudgetExceeded {
                required: count,
                budget: DEFAULT_ENUMERATION_BUDGET,
            });
        }
        Ok(LeveledEvent {
            space: space.clone(),
            level,
            codes: (0..count).collect(),
        })
    }

    /// A singleton `{tuple}`.
    pub fn singleton(space: &SampleSpace, tuple: &[u8]) -> Result<Self> {
        LeveledEvent::new(space, tuple.len() as u32, [tuple])
    }

    pub fn space(&self) -> &SampleSpace {
        &self.space
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.space
            .tuple_count(self.level)
            .map(|count| self.codes.len() as u64 == count)
            .unwrap_or(false)
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.codes.binary_search(&code).is_ok()
    }

    pub fn contains_tuple(&self, tuple: &[u8]) -> Result<bool> {
        if tuple.len() != self.level as usize {
            return Err(CournotError::LevelMismatch {
                left: self.level,
                right: tuple.len() as u32,
            });
        }
        Ok(self.contains_code(self.space.encode_tuple(tuple)?))
    }

    /// Iterates the tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        self.codes
            .iter()
            .map(move |&c| self.space.decode_code(c, self.level))
    }

    pub fn label_tuples(&self) -> Vec<Vec<String>> {
        self.tuples()
            .map(|t| {
                t.iter()
                    .map(|&i| self.space.label(i).to_string())
                    .collect()
            })
            .collect()
    }

    fn check_compatible(&self, other: &LeveledEvent) -> Result<()> {
        if self.space != other.space {
            return Err(CournotError::SpaceMismatch);
        }
        if self.level != other.level {
            return Err(CournotError::LevelMismatch {
                left: self.level,
                right: other.level,
            });
        }
        Ok(())
    }

    pub fn union(&self, other: &LeveledEvent) -> Result<LeveledEvent> {
        self.check_compatible(other)?;
        let mut codes = Vec::with_capacity(self.codes.len() + other.codes.len());
        let (mut i, mut j) = (0, 0);
        while i < self.codes.len() && j < other.codes.len() {
            match self.codes[i].cmp(&other.codes[j]) {
                Ordering::Less => {
                    codes.push(self.codes[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    codes.push(other.codes[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    codes.push(self.codes[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        codes.extend_from_slice(&self.codes[i..]);
        codes.extend_from_slice(&other.codes[j..]);
        Ok(LeveledEvent::from_sorted_codes_unchecked(
            &self.space,
            self.level,
            codes,
        ))
    }

    pub fn intersection(&self, other: &LeveledEvent) -> Result<LeveledEvent> {
        self.check_compatible(other)?;
        let (small, big) = if self.codes.len() <= other.codes.len() {
            (self, other)
        } else {
            (other, self)
        };
        let codes = small
            .codes
            .iter()
            .copied()
            .filter(|c| big.contains_code(*c))
            .collect();
        Ok(LeveledEvent::from_sorted_codes_unchecked(
            &self.space,
            self.level,
            codes,
        ))
    }

    /// Complement within Ω^level, subject to the enumeration budget.
    pub fn complement(&self) -> Result<LeveledEvent> {
        let count = self.space.require_level(self.level)?;
        if count > DEFAULT_ENUMERATION_BUDGET {
            return Err(CournotError::BudgetExceeded {
                required: count,
                budget: DEFAULT_ENUMERATION_BUDGET,
            });
        }
        let mut codes = Vec::with_capacity((count as usize).saturating_sub(self.codes.len()));
        let mut next = 0u64;
        for &c in &self.codes {
            codes.extend(next..c);
            next = c + 1;
        }
        codes.extend(next..count);
        Ok(LeveledEvent::from_sorted_codes_unchecked(
            &self.space,
            self.level,
            codes,
        ))
    }

    pub fn is_subset_of(&self, other: &LeveledEvent) -> Result<bool> {
        self.check_compatible(other)?;
        Ok(self.codes.iter().all(|c| other.contains_code(*c)))
    }

    pub fn is_disjoint_from(&self, other: &LeveledEvent) -> Result<bool> {
        self.check_compatible(other)?;
        let (small, big) = if self.codes.len() <= other.codes.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(!small.codes.iter().any(|c| big.contains_code(*c)))
    }

    /// Compact human-readable form, e.g. `{HT, TH}`.
    pub fn describe(&self) -> String {
        if self.is_full() {
            return format!("Omega^{}", self.level);
        }
        let tuples: Vec<String> = self
            .tuples()
            .take(16)
            .map(|t| {
                t.iter()
                    .map(|&i| self.space.label(i).to_string())
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        let suffix = if self.len() > 16 { ", ..." } else { "" };
        format!("{{{}{}}}", tuples.join(", "), suffix)
    }
}

impl PartialEq for LeveledEvent {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.level == other.level && self.codes == other.codes
    }
}

impl Eq for LeveledEvent {}

impl PartialOrd for LeveledEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LeveledEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.space.labels(), self.level, &self.codes).cmp(&(
            other.space.labels(),
            other.level,
            &other.codes,
        ))
    }
}

impl Serialize for LeveledEvent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("LeveledEvent", 2)?;
        s.serialize_field("level", &self.level)?;
        s.serialize_field("tuples", &self.label_tuples())?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_validation() {
        assert!(SampleSpace::new(Vec::<String>::new()).is_err());
        assert!(SampleSpace::new(["H", "H"]).is_err());
        assert!(SampleSpace::new(["H", ""]).is_err());
        let many: Vec<String> = (0..17).map(|i| format!("s{i}")).collect();
        assert!(SampleSpace::new(many).is_err());
        let coin = SampleSpace::coin();
        assert_eq!(coin.size(), 2);
        assert_eq!(coin.index_of("T"), Some(1));
        assert_eq!(coin.index_of("X"), None);
    }

    #[test]
    fn encode_decode_round_trip() {
        let space = SampleSpace::new(["a", "b", "c"]).unwrap();
        let tuple = [2u8, 0, 1, 2];
        let code = space.encode_tuple(&tuple).unwrap();
        assert_eq!(space.decode_code(code, 4), tuple.to_vec());
    }

    #[test]
    fn events_dedupe_and_sort() {
        let coin = SampleSpace::coin();
        let e = LeveledEvent::new(&coin, 2, [[1u8, 0], [0, 1], [1, 0]]).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.label_tuples(), vec![vec!["H", "T"], vec!["T", "H"]]);
    }

    #[test]
    fn tuple_length_checked() {
        let coin = SampleSpace::coin();
        assert!(LeveledEvent::new(&coin, 2, [[0u8]]).is_err());
        assert!(LeveledEvent::new(&coin, 1, [[7u8]]).is_err());
        assert!(LeveledEvent::empty(&coin, 0).is_err());
    }

    #[test]
    fn set_operations() {
        let coin = SampleSpace::coin();
        let hh = LeveledEvent::from_labels(&coin, 2, [["H", "H"]]).unwrap();
        let mixed = LeveledEvent::from_labels(&coin, 2, [["H", "T"], ["T", "H"]]).unwrap();
        let full = LeveledEvent::full(&coin, 2).unwrap();

        let u = hh.union(&mixed).unwrap();
        assert_eq!(u.len(), 3);
        assert!(hh.is_subset_of(&u).unwrap());
        assert!(hh.is_disjoint_from(&mixed).unwrap());
        assert!(hh.intersection(&mixed).unwrap().is_empty());
        assert_eq!(u.complement().unwrap().label_tuples(), vec![vec!["T", "T"]]);
        assert!(full.is_full());
        assert_eq!(full.complement().unwrap().len(), 0);
    }

    #[test]
    fn cross_level_operations_rejected() {
        let coin = SampleSpace::coin();
        let a = LeveledEvent::from_labels(&coin, 1, [["H"]]).unwrap();
        let b = LeveledEvent::from_labels(&coin, 2, [["H", "H"]]).unwrap();
        assert!(matches!(
            a.union(&b),
            Err(CournotError::LevelMismatch { .. })
        ));
        assert!(matches!(
            a.is_disjoint_from(&b),
            Err(CournotError::LevelMismatch { .. })
        ));
    }

    #[test]
    fn cross_space_operations_rejected() {
        let coin = SampleSpace::coin();
        let die = SampleSpace::new(["1", "2", "3"]).unwrap();
        let a = LeveledEvent::full(&coin, 1).unwrap();
        let b = LeveledEvent::full(&die, 1).unwrap();
        assert!(matches!(a.union(&b), Err(CournotError::SpaceMismatch)));
    }

    #[test]
    fn serializes_as_label_tuples() {
        let coin = SampleSpace::coin();
        let e = LeveledEvent::from_labels(&coin, 2, [["H", "T"]]).unwrap();
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"level": 2, "tuples": [["H", "T"]]})
        );
    }
}
