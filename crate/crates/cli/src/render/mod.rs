//! Deterministic emitters: cascade and navigation SVG charts, and the SLOC
//! breakdown markdown table.
//!
//! Identical inputs produce byte-identical output — no timestamps, no
//! generated ids, and every float is printed with a fixed precision.

mod markdown;
mod svg;

pub use markdown::emit_breakdown_markdown;
pub use svg::{emit_cascade_svg, emit_navigation_svg, NavigationPoint};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RenderError {
    #[error("cascade plot needs at least one configuration series")]
    EmptyCascade,
    #[error("navigation chart needs at least one point")]
    EmptyNavigation,
    #[error("navigation point `{label}` out of range: pp={pp}, convergence={convergence}")]
    OutOfRange {
        label: String,
        pp: f64,
        convergence: f64,
    },
}

/// Shared color palette; series cycle through it in order.
pub(crate) const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Fixed-precision coordinate formatting keeps output byte-stable.
pub(crate) fn coord(value: f64) -> String {
    format!("{value:.2}")
}

pub(crate) fn metric(value: f64) -> String {
    format!("{value:.4}")
}

/// Minimal XML text escaping for labels.
pub(crate) fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
