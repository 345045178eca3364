//! Analysis orchestration: builds the standard configuration set from a
//! timing matrix, runs the tree scan, and assembles the JSON report.
//!
//! The standard configurations are every fixed variant (one variant pinned
//! on all platforms that fully support it) plus the best per-platform and
//! best per-kernel mixes over the config's allowed-variant masks. Scoring
//! is always against the hypothetical best built from the full matrix.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use perfport_core::{
    best_assignment, cascade_series, code_divergence, jaccard_distance, pp_of_assignment,
    sloc_breakdown_with, used_lines, Assignment, CascadeData, CompilationConfig,
    ConfigurationReport, Granularity, KernelTimingMatrix, PlatformId, PlatformOrder, ScanOptions,
    SlocBreakdown,
};
use serde::Serialize;

use crate::error::CliError;
use crate::ingest::Aggregation;

pub const BEST_PER_PLATFORM_LABEL: &str = "best-per-platform";
pub const BEST_PER_KERNEL_LABEL: &str = "best-per-kernel";

/// Timing-side analysis results.
#[derive(Debug, Clone, Serialize)]
pub struct TimingAnalysis {
    pub app: String,
    pub problem: String,
    pub aggregation: Aggregation,
    pub platforms: BTreeSet<PlatformId>,
    pub kernels: Vec<String>,
    pub hypothetical_best_seconds: BTreeMap<PlatformId, f64>,
    pub configurations: Vec<ConfigurationReport>,
    pub assignments: BTreeMap<String, Assignment>,
    pub cascade: CascadeData,
}

/// Builds the standard configuration set and cascade data.
pub fn analyze_timings(
    matrix: &KernelTimingMatrix,
    app: String,
    problem: String,
    aggregation: Aggregation,
    platforms: &BTreeSet<PlatformId>,
    allowed: &BTreeMap<PlatformId, BTreeSet<String>>,
    order: PlatformOrder,
) -> Result<TimingAnalysis, CliError> {
    for platform in platforms {
        if !matrix.platforms().contains(platform) {
            return Err(CliError::validation(format!(
                "platform `{platform}` has no timing records"
            )));
        }
    }

    let mut labeled: Vec<(String, Assignment)> = Vec::new();
    for variant in matrix.variants() {
        let choices: BTreeMap<PlatformId, String> = platforms
            .iter()
            .filter(|p| {
                matrix
                    .kernels()
                    .iter()
                    .all(|k| matrix.time(k, p, variant).is_some())
            })
            .map(|p| (p.clone(), variant.clone()))
            .collect();
        labeled.push((variant.clone(), Assignment::PerPlatform(choices)));
    }
    labeled.push((
        BEST_PER_PLATFORM_LABEL.to_owned(),
        best_assignment(matrix, Granularity::PerPlatform, allowed),
    ));
    labeled.push((
        BEST_PER_KERNEL_LABEL.to_owned(),
        best_assignment(matrix, Granularity::PerKernel, allowed),
    ));

    let configurations = labeled
        .iter()
        .map(|(label, assignment)| {
            pp_of_assignment(matrix, assignment, platforms, label.clone()).map_err(CliError::from)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cascade = cascade_series(matrix, &labeled, platforms, order)?;

    Ok(TimingAnalysis {
        app,
        problem,
        aggregation,
        platforms: platforms.clone(),
        kernels: matrix.kernels().to_vec(),
        hypothetical_best_seconds: perfport_core::hypothetical_best(matrix),
        configurations,
        assignments: labeled.into_iter().collect(),
        cascade,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PairwiseDistance {
    pub a: PlatformId,
    pub b: PlatformId,
    pub distance: f64,
}

/// Tree-scan analysis results.
#[derive(Debug, Clone, Serialize)]
pub struct ScanAnalysis {
    pub set_sizes: BTreeMap<PlatformId, u64>,
    pub pairwise: Vec<PairwiseDistance>,
    pub cd: f64,
    pub convergence: f64,
    pub breakdown: SlocBreakdown,
}

/// Scans the tree once per configuration and derives set sizes, pairwise
/// Jaccard distances, divergence/convergence, and the SLOC breakdown.
pub fn analyze_tree(
    root: &Path,
    configs: &[CompilationConfig],
    options: &ScanOptions,
) -> Result<ScanAnalysis, CliError> {
    if configs.len() < 2 {
        return Err(CliError::validation(
            "divergence analysis needs at least two platform configurations",
        ));
    }
    let mut line_sets = BTreeMap::new();
    for config in configs {
        line_sets.insert(config.platform.clone(), used_lines(root, config)?);
    }
    let platforms: BTreeSet<PlatformId> = line_sets.keys().cloned().collect();

    let ordered: Vec<&PlatformId> = platforms.iter().collect();
    let mut pairwise = Vec::new();
    for (idx, a) in ordered.iter().enumerate() {
        for b in &ordered[idx + 1..] {
            pairwise.push(PairwiseDistance {
                a: (*a).clone(),
                b: (*b).clone(),
                distance: jaccard_distance(&line_sets[*a], &line_sets[*b]),
            });
        }
    }
    let cd = code_divergence(&platforms, &line_sets)?;
    let breakdown = sloc_breakdown_with(root, configs, options)?;

    Ok(ScanAnalysis {
        set_sizes: line_sets
            .iter()
            .map(|(p, set)| (p.clone(), set.len() as u64))
            .collect(),
        pairwise,
        cd,
        convergence: 1.0 - cd,
        breakdown,
    })
}

/// The machine-readable report; round-trips through JSON.
#[derive(Serialize)]
pub struct JsonReport<'a> {
    pub app: &'a str,
    pub problem: &'a str,
    pub aggregation: &'a str,
    pub platforms: &'a BTreeSet<PlatformId>,
    pub kernels: &'a [String],
    pub hypothetical_best_seconds: &'a BTreeMap<PlatformId, f64>,
    pub configurations: &'a [ConfigurationReport],
    pub assignments: &'a BTreeMap<String, Assignment>,
    pub cascade: &'a CascadeData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<&'a ScanAnalysis>,
}

/// Serializes a report deterministically (pretty JSON, trailing newline).
pub fn to_json_string(report: &impl Serialize) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::validation(format!("JSON serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Attaches the tree-level convergence to every configuration report.
pub fn attach_convergence(analysis: &mut TimingAnalysis, convergence: f64) {
    for report in &mut analysis.configurations {
        report.convergence = Some(convergence);
    }
}
