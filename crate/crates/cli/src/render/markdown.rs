//! SLOC breakdown rendering as a markdown table.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use perfport_core::{PlatformId, SlocBreakdown};

/// Renders the region table: one row per platform subset with SLOC and
/// percentage of total (two decimals), regions smaller than `threshold`
/// folded into an "other" row, and Unused/Total rows always present.
///
/// The threshold only affects rendering; the underlying breakdown data is
/// never truncated.
pub fn emit_breakdown_markdown(breakdown: &SlocBreakdown, threshold: u64) -> String {
    let all_platforms: BTreeSet<PlatformId> = breakdown
        .regions
        .keys()
        .flat_map(|subset| subset.iter().cloned())
        .collect();

    let mut rows: Vec<(String, u64)> = Vec::new();
    let mut folded = 0u64;
    let mut folded_regions = 0usize;
    for (subset, count) in &breakdown.regions {
        if *count < threshold {
            folded += count;
            folded_regions += 1;
        } else {
            rows.push((region_label(subset, &all_platforms), *count));
        }
    }
    // Largest regions first; ties alphabetical.
    rows.sort_by(|(la, ca), (lb, cb)| cb.cmp(ca).then_with(|| la.cmp(lb)));
    if folded_regions > 0 {
        rows.push((
            format!("other ({folded_regions} regions < {threshold} SLOC)"),
            folded,
        ));
    }

    let total = breakdown.total;
    let pct = |count: u64| -> String {
        if total == 0 {
            "0.00".to_owned()
        } else {
            format!("{:.2}", 100.0 * count as f64 / total as f64)
        }
    };

    let mut out = String::new();
    out.push_str("| Region | SLOC | % SLOC |\n");
    out.push_str("| --- | ---: | ---: |\n");
    for (label, count) in &rows {
        let _ = writeln!(out, "| {label} | {count} | {} |", pct(*count));
    }
    let _ = writeln!(
        out,
        "| Unused | {} | {} |",
        breakdown.unused,
        pct(breakdown.unused)
    );
    let _ = writeln!(out, "| **Total** | {total} | {} |", pct(total));
    out
}

fn region_label(subset: &BTreeSet<PlatformId>, all: &BTreeSet<PlatformId>) -> String {
    if !all.is_empty() && subset == all {
        return "All".to_owned();
    }
    subset
        .iter()
        .map(PlatformId::as_str)
        .collect::<Vec<_>>()
        .join(" and ")
}
