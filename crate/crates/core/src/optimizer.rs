//! Kernel-variant selection over a kernel × platform × variant timing matrix.
//!
//! The baseline for every efficiency is the hypothetical application that
//! uses the best variant of each kernel on every platform; fixed and mixed
//! configurations are then scored with the performance portability metric
//! against that baseline. Absent matrix entries mean a variant is
//! unsupported for that kernel/platform, never that it is free.

use std::collections::{BTreeMap, BTreeSet};

use serde::ser::SerializeMap;
use serde::Serialize;
use thiserror::Error;

use crate::metrics::{pp_score, Efficiency, MetricsError, PlatformId};

/// Errors from matrix construction and assignment evaluation.
#[derive(Debug, Error, PartialEq)]
pub enum OptimizerError {
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("timing matrix has no entries")]
    EmptyMatrix,
    #[error(
        "timing for kernel `{kernel}` variant `{variant}` on platform `{platform}` \
         must be positive and finite, got {seconds}"
    )]
    NonPositiveTime {
        kernel: String,
        platform: PlatformId,
        variant: String,
        seconds: f64,
    },
    #[error(
        "duplicate timing entry for kernel `{kernel}` variant `{variant}` on platform `{platform}`"
    )]
    DuplicateEntry {
        kernel: String,
        platform: PlatformId,
        variant: String,
    },
    #[error("no timing entry for kernel `{kernel}` variant `{variant}` on platform `{platform}`")]
    MissingEntry {
        kernel: String,
        platform: PlatformId,
        variant: String,
    },
    #[error("assignment chooses no variant for kernel `{kernel}` on platform `{platform}`")]
    MissingChoice {
        kernel: String,
        platform: PlatformId,
    },
    #[error("cascade needs at least one configuration")]
    NoConfigurations,
}

/// Wall-clock seconds per (kernel, platform, variant). An absent entry means
/// the variant is unsupported for that kernel on that platform.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTimingMatrix {
    kernels: Vec<String>,
    platforms: BTreeSet<PlatformId>,
    variants: BTreeSet<String>,
    entries: BTreeMap<(String, PlatformId, String), f64>,
}

impl KernelTimingMatrix {
    /// Builds a matrix from (kernel, platform, variant, seconds) tuples.
    ///
    /// Times must be positive and finite, triples unique, and every kernel
    /// must have at least one supported variant on at least one platform.
    pub fn from_entries<I, K, V>(entries: I) -> Result<Self, OptimizerError>
    where
        I: IntoIterator<Item = (K, PlatformId, V, f64)>,
        K: Into<String>,
        V: Into<String>,
    {
        let mut map = BTreeMap::new();
        let mut kernels = BTreeSet::new();
        let mut platforms = BTreeSet::new();
        let mut variants = BTreeSet::new();
        for (kernel, platform, variant, seconds) in entries {
            let kernel = kernel.into();
            let variant = variant.into();
            if !seconds.is_finite() || seconds <= 0.0 {
                return Err(OptimizerError::NonPositiveTime {
                    kernel,
                    platform,
                    variant,
                    seconds,
                });
            }
            kernels.insert(kernel.clone());
            platforms.insert(platform.clone());
            variants.insert(variant.clone());
            if map
                .insert((kernel.clone(), platform.clone(), variant.clone()), seconds)
                .is_some()
            {
                return Err(OptimizerError::DuplicateEntry {
                    kernel,
                    platform,
                    variant,
                });
            }
        }
        if map.is_empty() {
            return Err(OptimizerError::EmptyMatrix);
        }
        Ok(KernelTimingMatrix {
            kernels: kernels.into_iter().collect(),
            platforms,
            variants,
            entries: map,
        })
    }

    /// Kernel identifiers in sorted order.
    pub fn kernels(&self) -> &[String] {
        &self.kernels
    }

    pub fn platforms(&self) -> &BTreeSet<PlatformId> {
        &self.platforms
    }

    pub fn variants(&self) -> &BTreeSet<String> {
        &self.variants
    }

    pub fn time(&self, kernel: &str, platform: &PlatformId, variant: &str) -> Option<f64> {
        self.entries
            .get(&(kernel.to_owned(), platform.clone(), variant.to_owned()))
            .copied()
    }

    /// Variants with a timing entry for this kernel on this platform, in
    /// sorted order.
    pub fn supported_variants<'a>(
        &'a self,
        kernel: &'a str,
        platform: &'a PlatformId,
    ) -> impl Iterator<Item = &'a str> + 'a {
        self.variants
            .iter()
            .filter(move |v| self.time(kernel, platform, v).is_some())
            .map(|v| v.as_str())
    }
}

/// Granularity of a variant assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Granularity {
    PerPlatform,
    PerKernel,
}

/// A choice of variant per platform, or per (platform, kernel) pair.
/// Platforms absent from the choice map are unsupported under this
/// configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignment {
    PerPlatform(BTreeMap<PlatformId, String>),
    PerKernel(BTreeMap<(PlatformId, String), String>),
}

impl Assignment {
    pub fn granularity(&self) -> Granularity {
        match self {
            Assignment::PerPlatform(_) => Granularity::PerPlatform,
            Assignment::PerKernel(_) => Granularity::PerKernel,
        }
    }

    /// The variant this assignment picks for a kernel on a platform.
    pub fn variant_for(&self, platform: &PlatformId, kernel: &str) -> Option<&str> {
        match self {
            Assignment::PerPlatform(choices) => choices.get(platform).map(String::as_str),
            Assignment::PerKernel(choices) => choices
                .get(&(platform.clone(), kernel.to_owned()))
                .map(String::as_str),
        }
    }

    /// Platforms this assignment covers.
    pub fn platforms(&self) -> BTreeSet<PlatformId> {
        match self {
            Assignment::PerPlatform(choices) => choices.keys().cloned().collect(),
            Assignment::PerKernel(choices) => choices.keys().map(|(p, _)| p.clone()).collect(),
        }
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // JSON shape: {"granularity": ..., "choices": {platform: variant}}
        // or {platform: {kernel: variant}}.
        let mut map = serializer.serialize_map(Some(2))?;
        match self {
            Assignment::PerPlatform(choices) => {
                map.serialize_entry("granularity", "per-platform")?;
                map.serialize_entry("choices", choices)?;
            }
            Assignment::PerKernel(choices) => {
                map.serialize_entry("granularity", "per-kernel")?;
                let mut nested: BTreeMap<&PlatformId, BTreeMap<&str, &str>> = BTreeMap::new();
                for ((platform, kernel), variant) in choices {
                    nested
                        .entry(platform)
                        .or_default()
                        .insert(kernel.as_str(), variant.as_str());
                }
                map.serialize_entry("choices", &nested)?;
            }
        }
        map.end()
    }
}

/// Per-platform application seconds and efficiency of one configuration,
/// with its performance portability score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigurationReport {
    pub label: String,
    pub seconds: BTreeMap<PlatformId, f64>,
    pub efficiency: BTreeMap<PlatformId, Efficiency>,
    pub pp: f64,
    pub convergence: Option<f64>,
}

/// Per platform, the sum over kernels of the fastest variant's time.
///
/// Platforms where some kernel has no supported variant at all are omitted:
/// they are unsupported, which downstream turns into `Efficiency::Unsupported`
/// rather than an error.
pub fn hypothetical_best(matrix: &KernelTimingMatrix) -> BTreeMap<PlatformId, f64> {
    let mut best = BTreeMap::new();
    'platforms: for platform in matrix.platforms() {
        let mut total = 0.0;
        for kernel in matrix.kernels() {
            let fastest = matrix
                .supported_variants(kernel, platform)
                .filter_map(|v| matrix.time(kernel, platform, v))
                .fold(f64::INFINITY, f64::min);
            if !fastest.is_finite() {
                continue 'platforms;
            }
            total += fastest;
        }
        best.insert(platform.clone(), total);
    }
    best
}

/// Per platform covered by the assignment, the sum over kernels of the
/// chosen variant's time. Referencing an absent entry is a validation error
/// naming the triple.
pub fn application_time(
    matrix: &KernelTimingMatrix,
    assignment: &Assignment,
) -> Result<BTreeMap<PlatformId, f64>, OptimizerError> {
    let mut times = BTreeMap::new();
    for platform in assignment.platforms() {
        let mut total = 0.0;
        for kernel in matrix.kernels() {
            let variant = assignment.variant_for(&platform, kernel).ok_or_else(|| {
                OptimizerError::MissingChoice {
                    kernel: kernel.clone(),
                    platform: platform.clone(),
                }
            })?;
            let seconds = matrix.time(kernel, &platform, variant).ok_or_else(|| {
                OptimizerError::MissingEntry {
                    kernel: kernel.clone(),
                    platform: platform.clone(),
                    variant: variant.to_owned(),
                }
            })?;
            total += seconds;
        }
        times.insert(platform, total);
    }
    Ok(times)
}

/// Chooses the fastest allowed variant per platform (column-sum argmin) or
/// per (platform, kernel) pair. Ties break to the lexicographically smallest
/// variant identifier. Platforms with no feasible choice are omitted from
/// the assignment, marking them unsupported.
///
/// Only platforms present in `allowed_variants` are considered, and only
/// variants in each platform's allowed set compete; the efficiency baseline
/// is always the full matrix.
pub fn best_assignment(
    matrix: &KernelTimingMatrix,
    granularity: Granularity,
    allowed_variants: &BTreeMap<PlatformId, BTreeSet<String>>,
) -> Assignment {
    match granularity {
        Granularity::PerKernel => {
            let mut choices = BTreeMap::new();
            for (platform, allowed) in allowed_variants {
                if !matrix.platforms().contains(platform) {
                    continue;
                }
                let mut platform_choices = Vec::new();
                let mut feasible = true;
                for kernel in matrix.kernels() {
                    // Sorted iteration makes the first strict minimum the
                    // lexicographic tie-break winner.
                    let mut best: Option<(&str, f64)> = None;
                    for variant in allowed.iter() {
                        if let Some(seconds) = matrix.time(kernel, platform, variant) {
                            if best.is_none() || seconds < best.unwrap().1 {
                                best = Some((variant, seconds));
                            }
                        }
                    }
                    match best {
                        Some((variant, _)) => {
                            platform_choices
                                .push(((platform.clone(), kernel.clone()), variant.to_owned()));
                        }
                        None => {
                            feasible = false;
                            break;
                        }
                    }
                }
                if feasible {
                    choices.extend(platform_choices);
                }
            }
            Assignment::PerKernel(choices)
        }
        Granularity::PerPlatform => {
            let mut choices = BTreeMap::new();
            for (platform, allowed) in allowed_variants {
                if !matrix.platforms().contains(platform) {
                    continue;
                }
                let mut best: Option<(&str, f64)> = None;
                for variant in allowed.iter() {
                    let mut total = 0.0;
                    let mut complete = true;
                    for kernel in matrix.kernels() {
                        match matrix.time(kernel, platform, variant) {
                            Some(seconds) => total += seconds,
                            None => {
                                complete = false;
                                break;
                            }
                        }
                    }
                    if complete && (best.is_none() || total < best.unwrap().1) {
                        best = Some((variant, total));
                    }
                }
                if let Some((variant, _)) = best {
                    choices.insert(platform.clone(), variant.to_owned());
                }
            }
            Assignment::PerPlatform(choices)
        }
    }
}

/// Scores an assignment against the hypothetical best: per-platform seconds,
/// efficiencies, and the performance portability over `platforms`. Platforms
/// the assignment does not cover score as unsupported, which zeroes the PP.
pub fn pp_of_assignment(
    matrix: &KernelTimingMatrix,
    assignment: &Assignment,
    platforms: &BTreeSet<PlatformId>,
    label: impl Into<String>,
) -> Result<ConfigurationReport, OptimizerError> {
    let baseline = hypothetical_best(matrix);
    let seconds = application_time(matrix, assignment)?;
    let mut efficiency = BTreeMap::new();
    for platform in platforms {
        let eff = match (baseline.get(platform), seconds.get(platform)) {
            (Some(best), Some(actual)) => Efficiency::new(best / actual)?,
            _ => Efficiency::Unsupported,
        };
        efficiency.insert(platform.clone(), eff);
    }
    let pp = pp_score(platforms, &efficiency)?;
    Ok(ConfigurationReport {
        label: label.into(),
        seconds: seconds
            .into_iter()
            .filter(|(p, _)| platforms.contains(p))
            .collect(),
        efficiency,
        pp,
        convergence: None,
    })
}

/// Platform ordering convention for cascade plot data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PlatformOrder {
    /// Each configuration sorts platforms by its own efficiency, descending.
    PerConfiguration,
    /// All configurations share one order: platforms sorted by their best
    /// efficiency across configurations, descending, ties by name.
    Global,
}

/// One plotted platform of a cascade series. `efficiency` is `None` where
/// the configuration is unsupported; `cumulative_pp` is the performance
/// portability over the platforms seen so far.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadePoint {
    pub platform: PlatformId,
    pub efficiency: Option<f64>,
    pub cumulative_pp: f64,
}

/// Cascade data for one configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeSeries {
    pub label: String,
    pub points: Vec<CascadePoint>,
    pub final_pp: f64,
}

/// Plot-ready cascade data: per-configuration efficiency series with
/// cumulative performance portability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CascadeData {
    pub platforms: BTreeSet<PlatformId>,
    pub order: PlatformOrder,
    pub series: Vec<CascadeSeries>,
}

/// Builds cascade plot data for a list of labeled configurations.
///
/// Within a series, platforms appear in the configured order; the running
/// harmonic mean is emitted per platform. A series terminates with a zero
/// marker at the first unsupported platform.
pub fn cascade_series(
    matrix: &KernelTimingMatrix,
    configurations: &[(String, Assignment)],
    platforms: &BTreeSet<PlatformId>,
    order: PlatformOrder,
) -> Result<CascadeData, OptimizerError> {
    if configurations.is_empty() {
        return Err(OptimizerError::NoConfigurations);
    }
    let reports: Vec<ConfigurationReport> = configurations
        .iter()
        .map(|(label, assignment)| pp_of_assignment(matrix, assignment, platforms, label.clone()))
        .collect::<Result<_, _>>()?;

    let global_order: Vec<PlatformId> = match order {
        PlatformOrder::Global => {
            let mut keyed: Vec<(f64, &PlatformId)> = platforms
                .iter()
                .map(|p| {
                    let best = reports
                        .iter()
                        .filter_map(|r| r.efficiency.get(p).and_then(|e| e.value()))
                        .fold(0.0f64, f64::max);
                    (best, p)
                })
                .collect();
            keyed
                .sort_by(|(ea, pa), (eb, pb)| eb.partial_cmp(ea).unwrap().then_with(|| pa.cmp(pb)));
            keyed.into_iter().map(|(_, p)| p.clone()).collect()
        }
        PlatformOrder::PerConfiguration => Vec::new(),
    };

    let mut series = Vec::new();
    for report in reports {
        let ordered: Vec<PlatformId> = match order {
            PlatformOrder::Global => global_order.clone(),
            PlatformOrder::PerConfiguration => {
                let mut keyed: Vec<(Option<f64>, &PlatformId)> = platforms
                    .iter()
                    .map(|p| (report.efficiency.get(p).and_then(|e| e.value()), p))
                    .collect();
                // Present efficiencies descending, unsupported last, name ties.
                keyed.sort_by(|(ea, pa), (eb, pb)| {
                    match (ea, eb) {
                        (Some(x), Some(y)) => y.partial_cmp(x).unwrap(),
                        (Some(_), None) => std::cmp::Ordering::Less,
                        (None, Some(_)) => std::cmp::Ordering::Greater,
                        (None, None) => std::cmp::Ordering::Equal,
                    }
                    .then_with(|| pa.cmp(pb))
                });
                keyed.into_iter().map(|(_, p)| p.clone()).collect()
            }
        };

        let mut points = Vec::new();
        let mut reciprocal_sum = 0.0;
        for (rank, platform) in ordered.iter().enumerate() {
            match report.efficiency.get(platform).and_then(|e| e.value()) {
                Some(eff) if eff > 0.0 => {
                    reciprocal_sum += 1.0 / eff;
                    points.push(CascadePoint {
                        platform: platform.clone(),
                        efficiency: Some(eff),
                        cumulative_pp: (rank + 1) as f64 / reciprocal_sum,
                    });
                }
                _ => {
                    points.push(CascadePoint {
                        platform: platform.clone(),
                        efficiency: None,
                        cumulative_pp: 0.0,
                    });
                    break;
                }
            }
        }
        series.push(CascadeSeries {
            label: report.label,
            points,
            final_pp: report.pp,
        });
    }

    Ok(CascadeData {
        platforms: platforms.clone(),
        order,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pid(name: &str) -> PlatformId {
        PlatformId::new(name).unwrap()
    }

    fn platform_set(names: &[&str]) -> BTreeSet<PlatformId> {
        names.iter().map(|n| pid(n)).collect()
    }

    fn allow_all(matrix: &KernelTimingMatrix) -> BTreeMap<PlatformId, BTreeSet<String>> {
        matrix
            .platforms()
            .iter()
            .map(|p| (p.clone(), matrix.variants().clone()))
            .collect()
    }

    /// 2 kernels × 2 platforms × 2 variants with hand-pickable times.
    fn small_matrix() -> KernelTimingMatrix {
        KernelTimingMatrix::from_entries([
            ("k1", pid("x"), "v1", 3.0),
            ("k1", pid("x"), "v2", 1.0),
            ("k2", pid("x"), "v1", 2.0),
            ("k2", pid("x"), "v2", 4.0),
            ("k1", pid("y"), "v1", 2.0),
            ("k1", pid("y"), "v2", 2.0),
            ("k2", pid("y"), "v1", 6.0),
            ("k2", pid("y"), "v2", 3.0),
        ])
        .unwrap()
    }

    #[test]
    fn matrix_rejects_bad_entries() {
        assert_eq!(
            KernelTimingMatrix::from_entries([("k", pid("x"), "v", 0.0)]),
            Err(OptimizerError::NonPositiveTime {
                kernel: "k".into(),
                platform: pid("x"),
                variant: "v".into(),
                seconds: 0.0
            })
        );
        assert!(matches!(
            KernelTimingMatrix::from_entries([
                ("k", pid("x"), "v", 1.0),
                ("k", pid("x"), "v", 2.0)
            ]),
            Err(OptimizerError::DuplicateEntry { .. })
        ));
        assert_eq!(
            KernelTimingMatrix::from_entries(Vec::<(String, PlatformId, String, f64)>::new()),
            Err(OptimizerError::EmptyMatrix)
        );
    }

    #[test]
    fn hypothetical_best_single_entry() {
        let m = KernelTimingMatrix::from_entries([("k", pid("x"), "v", 5.0)]).unwrap();
        assert_eq!(hypothetical_best(&m)[&pid("x")], 5.0);
    }

    #[test]
    fn hypothetical_best_sums_per_kernel_minima() {
        // On x: min(3,1) + min(2,4) = 3.
        let m = small_matrix();
        let best = hypothetical_best(&m);
        assert_eq!(best[&pid("x")], 3.0);
        assert_eq!(best[&pid("y")], 5.0);
    }

    #[test]
    fn hypothetical_best_ignores_missing_variants() {
        let m = KernelTimingMatrix::from_entries([
            ("k1", pid("x"), "v1", 4.0),
            ("k1", pid("x"), "v2", 6.0),
            ("k2", pid("x"), "v2", 2.0), // v1 unsupported for k2
        ])
        .unwrap();
        assert_eq!(hypothetical_best(&m)[&pid("x")], 6.0);
    }

    #[test]
    fn hypothetical_best_omits_platform_missing_a_kernel() {
        let m = KernelTimingMatrix::from_entries([
            ("k1", pid("x"), "v1", 1.0),
            ("k2", pid("x"), "v1", 1.0),
            ("k1", pid("y"), "v1", 1.0), // k2 has no variant on y
        ])
        .unwrap();
        let best = hypothetical_best(&m);
        assert!(best.contains_key(&pid("x")));
        assert!(!best.contains_key(&pid("y")));
    }

    #[test]
    fn application_time_of_per_kernel_argmin_equals_hypothetical_best() {
        let m = small_matrix();
        let assignment = best_assignment(&m, Granularity::PerKernel, &allow_all(&m));
        let times = application_time(&m, &assignment).unwrap();
        assert_eq!(times, hypothetical_best(&m));
    }

    #[test]
    fn application_time_fixed_variant_is_column_sum() {
        let m = small_matrix();
        let fixed = Assignment::PerPlatform(
            [(pid("x"), "v1".to_owned()), (pid("y"), "v1".to_owned())].into(),
        );
        let times = application_time(&m, &fixed).unwrap();
        assert_eq!(times[&pid("x")], 5.0); // 3 + 2
        assert_eq!(times[&pid("y")], 8.0); // 2 + 6
    }

    #[test]
    fn application_time_mixed_per_platform_hand_sum() {
        let m = small_matrix();
        let mixed = Assignment::PerPlatform(
            [(pid("x"), "v2".to_owned()), (pid("y"), "v1".to_owned())].into(),
        );
        let times = application_time(&m, &mixed).unwrap();
        assert_eq!(times[&pid("x")], 5.0); // 1 + 4
        assert_eq!(times[&pid("y")], 8.0); // 2 + 6
    }

    #[test]
    fn application_time_names_missing_triple() {
        let m = KernelTimingMatrix::from_entries([
            ("k1", pid("x"), "v1", 1.0),
            ("k2", pid("x"), "v2", 1.0),
        ])
        .unwrap();
        let fixed = Assignment::PerPlatform([(pid("x"), "v1".to_owned())].into());
        assert_eq!(
            application_time(&m, &fixed),
            Err(OptimizerError::MissingEntry {
                kernel: "k2".into(),
                platform: pid("x"),
                variant: "v1".into(),
            })
        );
    }

    #[test]
    fn best_per_kernel_over_all_variants_reaches_pp_one() {
        let m = small_matrix();
        let assignment = best_assignment(&m, Granularity::PerKernel, &allow_all(&m));
        let report = pp_of_assignment(&m, &assignment, &platform_set(&["x", "y"]), "best").unwrap();
        assert!((report.pp - 1.0).abs() < 1e-12);
        for platform in ["x", "y"] {
            assert_eq!(report.efficiency[&pid(platform)], Efficiency::Value(1.0));
        }
    }

    #[test]
    fn exact_ties_break_to_lexicographically_smaller_variant() {
        let m = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "zeta", 2.0),
            ("k", pid("x"), "alpha", 2.0),
        ])
        .unwrap();
        let assignment = best_assignment(&m, Granularity::PerKernel, &allow_all(&m));
        assert_eq!(assignment.variant_for(&pid("x"), "k"), Some("alpha"));
        let assignment = best_assignment(&m, Granularity::PerPlatform, &allow_all(&m));
        assert_eq!(assignment.variant_for(&pid("x"), "k"), Some("alpha"));
    }

    #[test]
    fn uniformly_twice_as_slow_variant_has_pp_half() {
        let mut entries = Vec::new();
        for platform in ["x", "y", "z"] {
            for kernel in ["k1", "k2"] {
                entries.push((kernel, pid(platform), "fast", 1.5));
                entries.push((kernel, pid(platform), "slow", 3.0));
            }
        }
        let m = KernelTimingMatrix::from_entries(entries).unwrap();
        let h = platform_set(&["x", "y", "z"]);
        let slow =
            Assignment::PerPlatform(h.iter().map(|p| (p.clone(), "slow".to_owned())).collect());
        let report = pp_of_assignment(&m, &slow, &h, "slow").unwrap();
        assert!((report.pp - 0.5).abs() < 1e-12);
    }

    #[test]
    fn variant_absent_from_one_platform_zeroes_pp() {
        // Mirrors a variant that only exists on one platform: PP collapses
        // to zero over the full platform set.
        let m = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "special", 1.0),
            ("k", pid("x"), "generic", 2.0),
            ("k", pid("y"), "generic", 1.0),
        ])
        .unwrap();
        let h = platform_set(&["x", "y"]);
        let only_special = Assignment::PerPlatform([(pid("x"), "special".to_owned())].into());
        let report = pp_of_assignment(&m, &only_special, &h, "special").unwrap();
        assert_eq!(report.pp, 0.0);
        assert!(report.efficiency[&pid("y")].is_unsupported());
    }

    #[test]
    fn allowed_masks_restrict_choices_but_not_baseline() {
        // fast is globally best on both platforms but only allowed on y.
        let m = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "fast", 1.0),
            ("k", pid("x"), "slow", 2.0),
            ("k", pid("y"), "fast", 1.0),
            ("k", pid("y"), "slow", 2.0),
        ])
        .unwrap();
        let allowed: BTreeMap<_, _> = [
            (pid("x"), ["slow".to_owned()].into()),
            (pid("y"), ["fast".to_owned(), "slow".to_owned()].into()),
        ]
        .into();
        let assignment = best_assignment(&m, Granularity::PerPlatform, &allowed);
        assert_eq!(assignment.variant_for(&pid("x"), "k"), Some("slow"));
        assert_eq!(assignment.variant_for(&pid("y"), "k"), Some("fast"));
        let report = pp_of_assignment(&m, &assignment, &platform_set(&["x", "y"]), "mix").unwrap();
        // x runs at 2.0 against a baseline of 1.0 → efficiency 0.5,
        // so PP = 2 / (1/0.5 + 1/1.0) = 2/3.
        assert_eq!(report.efficiency[&pid("x")], Efficiency::Value(0.5));
        assert!((report.pp - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_platform_is_omitted_from_assignment() {
        let m = KernelTimingMatrix::from_entries([
            ("k1", pid("x"), "v", 1.0),
            ("k2", pid("x"), "v", 1.0),
            ("k1", pid("y"), "v", 1.0), // k2 unsupported on y
        ])
        .unwrap();
        let assignment = best_assignment(&m, Granularity::PerKernel, &allow_all(&m));
        assert!(!assignment.platforms().contains(&pid("y")));
        let report = pp_of_assignment(&m, &assignment, &platform_set(&["x", "y"]), "best").unwrap();
        assert_eq!(report.pp, 0.0);
    }

    #[test]
    fn cascade_single_point_equals_efficiency() {
        let m = KernelTimingMatrix::from_entries([("k", pid("x"), "v", 5.0)]).unwrap();
        let assignment = Assignment::PerPlatform([(pid("x"), "v".to_owned())].into());
        let data = cascade_series(
            &m,
            &[("only".to_owned(), assignment)],
            &platform_set(&["x"]),
            PlatformOrder::PerConfiguration,
        )
        .unwrap();
        assert_eq!(data.series.len(), 1);
        let points = &data.series[0].points;
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].efficiency, Some(1.0));
        assert_eq!(points[0].cumulative_pp, 1.0);
    }

    #[test]
    fn cascade_running_harmonic_means() {
        // Efficiencies {1.0, 0.5} → cumulative PP {1.0, 2/3}.
        let m = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "v", 1.0),
            ("k", pid("x"), "w", 1.0),
            ("k", pid("y"), "v", 2.0),
            ("k", pid("y"), "w", 1.0),
        ])
        .unwrap();
        let fixed = Assignment::PerPlatform(
            [(pid("x"), "v".to_owned()), (pid("y"), "v".to_owned())].into(),
        );
        let data = cascade_series(
            &m,
            &[("v".to_owned(), fixed)],
            &platform_set(&["x", "y"]),
            PlatformOrder::PerConfiguration,
        )
        .unwrap();
        let points = &data.series[0].points;
        assert_eq!(points[0].efficiency, Some(1.0));
        assert!((points[0].cumulative_pp - 1.0).abs() < 1e-12);
        assert_eq!(points[1].efficiency, Some(0.5));
        assert!((points[1].cumulative_pp - 2.0 / 3.0).abs() < 1e-12);
        assert!((data.series[0].final_pp - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cascade_terminates_at_unsupported_platform() {
        let m = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "v", 1.0),
            ("k", pid("y"), "w", 1.0),
        ])
        .unwrap();
        let v_only = Assignment::PerPlatform([(pid("x"), "v".to_owned())].into());
        let data = cascade_series(
            &m,
            &[("v".to_owned(), v_only)],
            &platform_set(&["x", "y"]),
            PlatformOrder::PerConfiguration,
        )
        .unwrap();
        let points = &data.series[0].points;
        assert_eq!(points.len(), 2);
        assert_eq!(points[1].efficiency, None);
        assert_eq!(points[1].cumulative_pp, 0.0);
        assert_eq!(data.series[0].final_pp, 0.0);
    }

    #[test]
    fn cascade_global_order_is_shared_across_series() {
        // v is fastest on x, w on y; global order ranks platforms by their
        // best efficiency over all configurations, so both series share it.
        let m = KernelTimingMatrix::from_entries([
            ("k", pid("x"), "v", 1.0),
            ("k", pid("x"), "w", 4.0),
            ("k", pid("y"), "v", 3.0),
            ("k", pid("y"), "w", 1.0),
        ])
        .unwrap();
        let fixed = |variant: &str| {
            Assignment::PerPlatform(
                [
                    (pid("x"), variant.to_owned()),
                    (pid("y"), variant.to_owned()),
                ]
                .into(),
            )
        };
        let data = cascade_series(
            &m,
            &[("v".to_owned(), fixed("v")), ("w".to_owned(), fixed("w"))],
            &platform_set(&["x", "y"]),
            PlatformOrder::Global,
        )
        .unwrap();
        for series in &data.series {
            let order: Vec<&str> = series.points.iter().map(|p| p.platform.as_str()).collect();
            // Both platforms reach efficiency 1.0 somewhere; name breaks
            // the tie, so the shared order is x then y for every series.
            assert_eq!(order, vec!["x", "y"]);
        }
        // Under the shared order, w's series is no longer descending.
        let w_series = &data.series[1];
        assert!(w_series.points[0].efficiency.unwrap() < 1.0);
        assert_eq!(w_series.points[1].efficiency, Some(1.0));
    }

    #[test]
    fn cascade_requires_a_configuration() {
        let m = KernelTimingMatrix::from_entries([("k", pid("x"), "v", 1.0)]).unwrap();
        assert_eq!(
            cascade_series(
                &m,
                &[],
                &platform_set(&["x"]),
                PlatformOrder::PerConfiguration
            ),
            Err(OptimizerError::NoConfigurations)
        );
    }
}
