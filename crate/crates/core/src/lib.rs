//! Analysis toolkit for performance portability of multi-platform HPC codes.
//!
//! The crate is organized around four concerns:
//!
//! - [`metrics`]: the metric algebra — application efficiency, performance
//!   portability (harmonic mean over a platform set), Jaccard distance and
//!   code divergence/convergence over per-platform source-line sets.
//! - [`scanner`]: a conditional-compilation-aware source scanner that
//!   computes, per platform configuration, the set of lines the compiler
//!   actually sees, plus SLOC breakdowns across platform regions.
//! - [`optimizer`]: kernel-variant selection over a kernel × platform ×
//!   variant timing matrix, including the hypothetical-best baseline,
//!   mixed-variant assignments, and cascade plot data.
//! - [`lanes`]: models of sub-group lane-exchange schedules for the
//!   half-warp pairwise interaction pattern (XOR shuffle, butterfly
//!   shuffle, local-memory exchange, broadcast decomposition), with a
//!   symmetry/coverage verifier and an abstract instruction cost model.
//!
//! All operations are pure functions over immutable inputs and are safe to
//! call concurrently.

pub mod lanes;
pub mod metrics;
pub mod optimizer;
pub mod scanner;

pub use lanes::{
    build_broadcast_schedule, build_butterfly_schedule, build_local_memory_schedule,
    build_xor_schedule, cost_estimate, decompose_step_moves, decompose_total_moves,
    simulate_interaction, verify_schedule, CostEstimate, CostModel, ExchangeSchedule,
    HalfWarpLayout, LaneError, ParticleTag, ScheduleKind, VerificationReport,
};
pub use metrics::{
    application_efficiency, code_convergence, code_divergence, jaccard_distance, pp_score,
    Efficiency, EfficiencyMatrix, LineSet, MetricsError, PlatformId,
};
pub use optimizer::{
    application_time, best_assignment, cascade_series, hypothetical_best, pp_of_assignment,
    Assignment, CascadeData, CascadePoint, CascadeSeries, ConfigurationReport, Granularity,
    KernelTimingMatrix, OptimizerError, PlatformOrder,
};
pub use scanner::{
    classify_lines, divergence_from_tree, evaluate_unit, sloc_breakdown, sloc_breakdown_with,
    used_lines, CompilationConfig, LineClass, ScanError, ScanOptions, SlocBreakdown,
};
