//! Metric algebra: efficiency, performance portability, Jaccard distance,
//! and code divergence/convergence.
//!
//! Performance portability of an application `a` on a problem `p` over a
//! platform set `H` is the harmonic mean of the per-platform efficiencies
//! `e_i(a, p)` when every platform has a non-zero efficiency, and exactly
//! zero otherwise. Code divergence is the average pairwise Jaccard distance
//! between the per-platform sets of source lines required to compile `a`.
//!
//! Everything in this module is a deterministic pure function: identical
//! inputs produce bit-identical outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from metric construction and evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("platform set is empty")]
    EmptyPlatformSet,
    #[error("platform name is empty")]
    EmptyPlatformName,
    #[error("efficiency {0} is outside [0, 1]")]
    EfficiencyOutOfRange(f64),
    #[error("timing value {0} must be positive and finite")]
    NonPositiveTime(f64),
    #[error("best time {best} exceeds observed time {observed}; arguments swapped?")]
    BestExceedsObserved { best: f64, observed: f64 },
    #[error("code divergence needs at least 2 platforms, got {0}")]
    TooFewPlatforms(usize),
    #[error("no line set supplied for platform `{0}`")]
    MissingLineSet(PlatformId),
}

/// Identifier of a platform in the set of platforms of interest.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlatformId(String);

impl PlatformId {
    /// Creates a platform identifier. The name must be non-empty.
    pub fn new(name: impl Into<String>) -> Result<Self, MetricsError> {
        let name = name.into();
        if name.is_empty() {
            return Err(MetricsError::EmptyPlatformName);
        }
        Ok(PlatformId(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for PlatformId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for PlatformId {
    type Err = MetricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PlatformId::new(s)
    }
}

/// Efficiency of an application on one platform.
///
/// A present value lies in `[0, 1]`. `Unsupported` records that the
/// application cannot run on the platform at all; it is kept distinct from
/// an efficiency of `0.0` so reports can tell "failed to run" apart from
/// "infinitely slow", but both collapse to the zero branch of the
/// performance portability score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Efficiency {
    Value(f64),
    Unsupported,
}

impl Efficiency {
    /// Wraps a raw efficiency, rejecting values outside `[0, 1]`.
    ///
    /// Out-of-range values are rejected rather than clamped so that a bad
    /// baseline surfaces as an error instead of a silently saturated score.
    pub fn new(value: f64) -> Result<Self, MetricsError> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(MetricsError::EfficiencyOutOfRange(value));
        }
        Ok(Efficiency::Value(value))
    }

    /// The numeric value, or `None` when unsupported.
    pub fn value(&self) -> Option<f64> {
        match self {
            Efficiency::Value(v) => Some(*v),
            Efficiency::Unsupported => None,
        }
    }

    pub fn is_unsupported(&self) -> bool {
        matches!(self, Efficiency::Unsupported)
    }
}

impl Serialize for Efficiency {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Efficiency::Value(v) => serializer.serialize_f64(*v),
            Efficiency::Unsupported => serializer.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for Efficiency {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Option<f64> = Option::deserialize(deserializer)?;
        match raw {
            Some(v) => Efficiency::new(v).map_err(serde::de::Error::custom),
            None => Ok(Efficiency::Unsupported),
        }
    }
}

/// Efficiencies of application variants across platforms, for one problem.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMatrix {
    problem: String,
    entries: BTreeMap<(String, PlatformId), Efficiency>,
}

impl EfficiencyMatrix {
    pub fn new(problem: impl Into<String>) -> Self {
        EfficiencyMatrix {
            problem: problem.into(),
            entries: BTreeMap::new(),
        }
    }

    pub fn problem(&self) -> &str {
        &self.problem
    }

    /// Records the efficiency of `application` on `platform`, replacing any
    /// previous entry for the pair.
    pub fn insert(
        &mut self,
        application: impl Into<String>,
        platform: PlatformId,
        efficiency: Efficiency,
    ) {
        self.entries
            .insert((application.into(), platform), efficiency);
    }

    pub fn get(&self, application: &str, platform: &PlatformId) -> Option<Efficiency> {
        self.entries
            .get(&(application.to_owned(), platform.clone()))
            .copied()
    }

    /// All per-platform efficiencies recorded for one application.
    pub fn row(&self, application: &str) -> BTreeMap<PlatformId, Efficiency> {
        self.entries
            .iter()
            .filter(|((app, _), _)| app == application)
            .map(|((_, platform), eff)| (platform.clone(), *eff))
            .collect()
    }

    pub fn applications(&self) -> BTreeSet<&str> {
        self.entries.keys().map(|(app, _)| app.as_str()).collect()
    }

    pub fn platforms(&self) -> BTreeSet<&PlatformId> {
        self.entries.keys().map(|(_, platform)| platform).collect()
    }
}

/// A set of source lines, each identified by (file path, 1-based line number).
///
/// Line identity is positional: moving a line is a change. This matches the
/// "set of source lines required to compile" used by the divergence metric
/// and keeps oracles trivial.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LineSet {
    lines: BTreeSet<(String, u32)>,
}

impl LineSet {
    pub fn new() -> Self {
        LineSet::default()
    }

    /// Inserts a line record. Line numbers are 1-based; 0 is a caller bug.
    pub fn insert(&mut self, file: impl Into<String>, line: u32) {
        assert!(line >= 1, "line numbers are 1-based");
        self.lines.insert((file.into(), line));
    }

    pub fn contains(&self, file: &str, line: u32) -> bool {
        self.lines.contains(&(file.to_owned(), line))
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.lines.iter().map(|(f, l)| (f.as_str(), *l))
    }

    pub fn union_with(&mut self, other: &LineSet) {
        for (f, l) in &other.lines {
            self.lines.insert((f.clone(), *l));
        }
    }

    pub fn intersection_len(&self, other: &LineSet) -> usize {
        self.lines.intersection(&other.lines).count()
    }

    pub fn union_len(&self, other: &LineSet) -> usize {
        self.lines.union(&other.lines).count()
    }

    pub fn is_subset(&self, other: &LineSet) -> bool {
        self.lines.is_subset(&other.lines)
    }
}

impl FromIterator<(String, u32)> for LineSet {
    fn from_iter<I: IntoIterator<Item = (String, u32)>>(iter: I) -> Self {
        let mut set = LineSet::new();
        for (f, l) in iter {
            set.insert(f, l);
        }
        set
    }
}

/// Application efficiency: best observed time on the platform divided by the
/// configuration's time on the same platform.
///
/// Both inputs must be positive, and the baseline must not exceed the
/// observed time, so the result lies in `(0, 1]`.
pub fn application_efficiency(
    observed_seconds: f64,
    best_seconds: f64,
) -> Result<Efficiency, MetricsError> {
    if !observed_seconds.is_finite() || observed_seconds <= 0.0 {
        return Err(MetricsError::NonPositiveTime(observed_seconds));
    }
    if !best_seconds.is_finite() || best_seconds <= 0.0 {
        return Err(MetricsError::NonPositiveTime(best_seconds));
    }
    if best_seconds > observed_seconds {
        return Err(MetricsError::BestExceedsObserved {
            best: best_seconds,
            observed: observed_seconds,
        });
    }
    Efficiency::new(best_seconds / observed_seconds)
}

/// Performance portability score over a platform set.
///
/// Returns the harmonic mean `|H| / Σ 1/e_i` when every platform in `H` has
/// a present, non-zero efficiency, and exactly `0.0` otherwise — a platform
/// that is missing from the row, unsupported, or at efficiency zero zeroes
/// the whole score.
///
/// ```
/// use perfport_core::{pp_score, Efficiency, PlatformId};
/// use std::collections::{BTreeMap, BTreeSet};
///
/// let a = PlatformId::new("a").unwrap();
/// let b = PlatformId::new("b").unwrap();
/// let platforms: BTreeSet<_> = [a.clone(), b.clone()].into();
/// let row: BTreeMap<_, _> = [
///     (a, Efficiency::new(0.5).unwrap()),
///     (b, Efficiency::new(1.0).unwrap()),
/// ]
/// .into();
/// let pp = pp_score(&platforms, &row).unwrap();
/// assert!((pp - 2.0 / 3.0).abs() < 1e-12);
/// ```
pub fn pp_score(
    platforms: &BTreeSet<PlatformId>,
    efficiencies: &BTreeMap<PlatformId, Efficiency>,
) -> Result<f64, MetricsError> {
    if platforms.is_empty() {
        return Err(MetricsError::EmptyPlatformSet);
    }
    let mut reciprocal_sum = 0.0;
    for platform in platforms {
        match efficiencies.get(platform) {
            Some(Efficiency::Value(v)) if *v > 0.0 => reciprocal_sum += 1.0 / v,
            _ => return Ok(0.0),
        }
    }
    Ok(platforms.len() as f64 / reciprocal_sum)
}

/// Jaccard distance between two line sets: `1 − |a ∩ b| / |a ∪ b|`.
///
/// Two empty sets are identical codebases, so their distance is 0.
pub fn jaccard_distance(a: &LineSet, b: &LineSet) -> f64 {
    let union = a.union_len(b);
    if union == 0 {
        return 0.0;
    }
    let intersection = a.intersection_len(b);
    1.0 - intersection as f64 / union as f64
}

/// Code divergence: the mean Jaccard distance over all unordered platform
/// pairs. Needs at least two platforms (the pair count is zero otherwise),
/// and a line set for every platform in `H`.
pub fn code_divergence(
    platforms: &BTreeSet<PlatformId>,
    line_sets: &BTreeMap<PlatformId, LineSet>,
) -> Result<f64, MetricsError> {
    if platforms.len() < 2 {
        return Err(MetricsError::TooFewPlatforms(platforms.len()));
    }
    for platform in platforms {
        if !line_sets.contains_key(platform) {
            return Err(MetricsError::MissingLineSet(platform.clone()));
        }
    }
    let ordered: Vec<&PlatformId> = platforms.iter().collect();
    let mut total = 0.0;
    let mut pairs = 0u64;
    for (idx, a) in ordered.iter().enumerate() {
        for b in &ordered[idx + 1..] {
            total += jaccard_distance(&line_sets[*a], &line_sets[*b]);
            pairs += 1;
        }
    }
    Ok(total / pairs as f64)
}

/// Code convergence: `1 − code_divergence`.
pub fn code_convergence(
    platforms: &BTreeSet<PlatformId>,
    line_sets: &BTreeMap<PlatformId, LineSet>,
) -> Result<f64, MetricsError> {
    Ok(1.0 - code_divergence(platforms, line_sets)?)
}
