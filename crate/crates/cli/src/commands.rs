//! Subcommand definitions and dispatch. Exit status: 0 success, 1
//! validation error, 2 I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use perfport_core::{
    build_broadcast_schedule, build_butterfly_schedule, build_local_memory_schedule,
    build_xor_schedule, cost_estimate, decompose_total_moves, verify_schedule, Assignment,
    CostModel, ExchangeSchedule, Granularity, HalfWarpLayout, PlatformId, PlatformOrder,
    ScheduleKind,
};
use serde::Serialize;

use crate::config::AnalysisConfig;
use crate::error::CliError;
use crate::ingest::{build_matrix, parse_timings, Aggregation};
use crate::render::{
    emit_breakdown_markdown, emit_cascade_svg, emit_navigation_svg, NavigationPoint,
};
use crate::report::{
    analyze_timings, analyze_tree, attach_convergence, to_json_string, JsonReport, ScanAnalysis,
    TimingAnalysis,
};

#[derive(Debug, Parser)]
#[command(
    name = "perfport",
    version,
    about = "Performance portability and code divergence analysis for multi-platform HPC codes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggArg {
    Min,
    Mean,
}

impl From<AggArg> for Aggregation {
    fn from(arg: AggArg) -> Self {
        match arg {
            AggArg::Min => Aggregation::Min,
            AggArg::Mean => Aggregation::Mean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Xor,
    Butterfly,
    LocalMemory,
    Broadcast,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GranularityArg {
    PerPlatform,
    PerKernel,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the PP / code divergence metrics table from timing data
    Metrics {
        /// Timing CSV (app,kernel,platform,problem,variant,seconds)
        #[arg(long)]
        timings: PathBuf,
        /// Analysis config (TOML); platform set defaults to the timing data
        #[arg(long)]
        config: Option<PathBuf>,
        /// Source tree root; enables divergence metrics (needs --config)
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        app: Option<String>,
        /// Sample aggregation for repeated measurements
        #[arg(long, value_enum, default_value = "min")]
        agg: AggArg,
        /// Emit machine-readable JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Scan a source tree: per-platform used lines, SLOC breakdown, divergence
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        /// Fold regions below this SLOC count in the markdown table
        #[arg(long)]
        threshold: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Compute the optimal variant assignment from a timing matrix
    Optimize {
        #[arg(long)]
        timings: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "per-platform")]
        granularity: GranularityArg,
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        app: Option<String>,
        #[arg(long, value_enum, default_value = "min")]
        agg: AggArg,
        #[arg(long)]
        json: bool,
    },
    /// Audit a lane-exchange schedule: verification report and cost table
    AuditLanes {
        /// Sub-group width (even; XOR/local-memory need a power of two)
        #[arg(long)]
        width: u32,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        json: bool,
    },
    /// Emit cascade (and, with --tree, navigation) SVG charts
    Plot {
        #[arg(long)]
        timings: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Output directory for SVG files
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        app: Option<String>,
        #[arg(long, value_enum, default_value = "min")]
        agg: AggArg,
    },
    /// Full analysis: report.json, breakdown.md, cascade.svg, navigation.svg
    Report {
        #[arg(long)]
        timings: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        app: Option<String>,
        #[arg(long, value_enum, default_value = "min")]
        agg: AggArg,
        #[arg(long)]
        threshold: Option<u64>,
    },
}

/// Parses arguments and runs the chosen subcommand, returning the process
/// exit code. Usage errors print help text and exit 1; `--help` and
/// `--version` exit 0.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Metrics {
            timings,
            config,
            tree,
            problem,
            app,
            agg,
            json,
        } => cmd_metrics(
            &timings,
            config.as_deref(),
            tree.as_deref(),
            problem,
            app,
            agg.into(),
            json,
        ),
        Command::Scan {
            config,
            tree,
            threshold,
            json,
        } => cmd_scan(&config, &tree, threshold, json),
        Command::Optimize {
            timings,
            config,
            granularity,
            problem,
            app,
            agg,
            json,
        } => cmd_optimize(
            &timings,
            config.as_deref(),
            granularity,
            problem,
            app,
            agg.into(),
            json,
        ),
        Command::AuditLanes { width, kind, json } => cmd_audit_lanes(width, kind, json),
        Command::Plot {
            timings,
            config,
            tree,
            out_dir,
            problem,
            app,
            agg,
        } => cmd_plot(
            &timings,
            &config,
            tree.as_deref(),
            &out_dir,
            problem,
            app,
            agg.into(),
        ),
        Command::Report {
            timings,
            config,
            tree,
            out_dir,
            problem,
            app,
            agg,
            threshold,
        } => cmd_report(
            &timings,
            &config,
            &tree,
            &out_dir,
            problem,
            app,
            agg.into(),
            threshold,
        ),
    }
}

/// Shared timing-analysis pipeline: CSV → matrix → standard configurations.
fn timing_analysis(
    timings: &Path,
    config: Option<&AnalysisConfig>,
    problem: Option<String>,
    app: Option<String>,
    agg: Aggregation,
) -> Result<TimingAnalysis, CliError> {
    let records = parse_timings(timings)?;
    let problem = problem.or_else(|| config.and_then(|c| c.problem.clone()));
    let (app, problem, matrix) = build_matrix(&records, app.as_deref(), problem.as_deref(), agg)?;
    let (platforms, allowed, order) = match config {
        Some(config) => (
            config.platform_set()?,
            config.allowed_variants(matrix.variants())?,
            config.platform_order(),
        ),
        None => {
            let platforms = matrix.platforms().clone();
            let allowed = platforms
                .iter()
                .map(|p| (p.clone(), matrix.variants().clone()))
                .collect();
            (platforms, allowed, PlatformOrder::PerConfiguration)
        }
    };
    analyze_timings(&matrix, app, problem, agg, &platforms, &allowed, order)
}

fn scan_analysis(config: &AnalysisConfig, tree: &Path) -> Result<ScanAnalysis, CliError> {
    let compile_configs = config.compilation_configs(tree)?;
    analyze_tree(tree, &compile_configs, &config.scan_options())
}

fn format_efficiency(eff: Option<f64>) -> String {
    match eff {
        Some(v) => format!("{v:.4}"),
        None => "--".to_owned(),
    }
}

fn metrics_table(analysis: &TimingAnalysis) -> String {
    let mut out = String::new();
    let platforms: Vec<&PlatformId> = analysis.platforms.iter().collect();
    let label_width = analysis
        .configurations
        .iter()
        .map(|c| c.label.len())
        .chain(["configuration".len()])
        .max()
        .unwrap();
    let _ = write!(out, "{:<label_width$}", "configuration");
    for platform in &platforms {
        let _ = write!(out, "  {:>10}", platform.as_str());
    }
    let _ = writeln!(out, "  {:>8}", "PP");
    for report in &analysis.configurations {
        let _ = write!(out, "{:<label_width$}", report.label);
        for platform in &platforms {
            let eff = report.efficiency.get(platform).and_then(|e| e.value());
            let _ = write!(out, "  {:>10}", format_efficiency(eff));
        }
        let _ = writeln!(out, "  {:>8.4}", report.pp);
    }
    out
}

fn cmd_metrics(
    timings: &Path,
    config_path: Option<&Path>,
    tree: Option<&Path>,
    problem: Option<String>,
    app: Option<String>,
    agg: Aggregation,
    json: bool,
) -> Result<(), CliError> {
    let config = config_path.map(AnalysisConfig::load).transpose()?;
    let mut analysis = timing_analysis(timings, config.as_ref(), problem, app, agg)?;
    let scan = match (tree, &config) {
        (Some(tree), Some(config)) => {
            let scan = scan_analysis(config, tree)?;
            attach_convergence(&mut analysis, scan.convergence);
            Some(scan)
        }
        (Some(_), None) => {
            return Err(CliError::validation(
                "--tree needs --config for the platform compilation setup",
            ))
        }
        _ => None,
    };

    if json {
        let report = JsonReport {
            app: &analysis.app,
            problem: &analysis.problem,
            aggregation: analysis.aggregation.as_str(),
            platforms: &analysis.platforms,
            kernels: &analysis.kernels,
            hypothetical_best_seconds: &analysis.hypothetical_best_seconds,
            configurations: &analysis.configurations,
            assignments: &analysis.assignments,
            cascade: &analysis.cascade,
            divergence: scan.as_ref(),
        };
        print!("{}", to_json_string(&report)?);
        return Ok(());
    }

    println!(
        "app: {}  problem: {}  aggregation: {}",
        analysis.app,
        analysis.problem,
        analysis.aggregation.as_str()
    );
    println!();
    print!("{}", metrics_table(&analysis));
    if let Some(scan) = scan {
        println!();
        println!(
            "code divergence: {:.4}  convergence: {:.4}",
            scan.cd, scan.convergence
        );
    }
    Ok(())
}

fn cmd_scan(
    config_path: &Path,
    tree: &Path,
    threshold: Option<u64>,
    json: bool,
) -> Result<(), CliError> {
    let config = AnalysisConfig::load(config_path)?;
    let scan = scan_analysis(&config, tree)?;
    if json {
        print!("{}", to_json_string(&scan)?);
        return Ok(());
    }
    for (platform, size) in &scan.set_sizes {
        println!("{platform}: {size} used lines");
    }
    println!();
    for pair in &scan.pairwise {
        println!(
            "jaccard distance {} / {}: {:.4}",
            pair.a, pair.b, pair.distance
        );
    }
    println!(
        "code divergence: {:.4}  convergence: {:.4}",
        scan.cd, scan.convergence
    );
    println!();
    let threshold = threshold.unwrap_or(config.plot.breakdown_threshold);
    print!("{}", emit_breakdown_markdown(&scan.breakdown, threshold));
    Ok(())
}

fn cmd_optimize(
    timings: &Path,
    config_path: Option<&Path>,
    granularity: GranularityArg,
    problem: Option<String>,
    app: Option<String>,
    agg: Aggregation,
    json: bool,
) -> Result<(), CliError> {
    let config = config_path.map(AnalysisConfig::load).transpose()?;
    let analysis = timing_analysis(timings, config.as_ref(), problem, app, agg)?;
    let label = match granularity {
        GranularityArg::PerPlatform => crate::report::BEST_PER_PLATFORM_LABEL,
        GranularityArg::PerKernel => crate::report::BEST_PER_KERNEL_LABEL,
    };
    let assignment = &analysis.assignments[label];
    let report = analysis
        .configurations
        .iter()
        .find(|c| c.label == label)
        .expect("standard configurations include both mixes");

    if json {
        #[derive(Serialize)]
        struct OptimizeOut<'a> {
            granularity: &'a str,
            assignment: &'a Assignment,
            seconds: &'a BTreeMap<PlatformId, f64>,
            efficiency: &'a BTreeMap<PlatformId, perfport_core::Efficiency>,
            pp: f64,
        }
        let out = OptimizeOut {
            granularity: match granularity {
                GranularityArg::PerPlatform => "per-platform",
                GranularityArg::PerKernel => "per-kernel",
            },
            assignment,
            seconds: &report.seconds,
            efficiency: &report.efficiency,
            pp: report.pp,
        };
        print!("{}", to_json_string(&out)?);
        return Ok(());
    }

    println!("optimal assignment ({label}):");
    match assignment {
        Assignment::PerPlatform(choices) => {
            for (platform, variant) in choices {
                println!("  {platform}: {variant}");
            }
        }
        Assignment::PerKernel(choices) => {
            for ((platform, kernel), variant) in choices {
                println!("  {platform}/{kernel}: {variant}");
            }
        }
    }
    for platform in &analysis.platforms {
        let seconds = report
            .seconds
            .get(platform)
            .map(|s| format!("{s:.6}"))
            .unwrap_or_else(|| "--".to_owned());
        let eff = report.efficiency.get(platform).and_then(|e| e.value());
        println!(
            "  {platform}: {seconds} s, efficiency {}",
            format_efficiency(eff)
        );
    }
    println!("PP = {:.4}", report.pp);
    Ok(())
}

fn build_schedule(width: u32, kind: KindArg) -> Result<ExchangeSchedule, CliError> {
    let schedule = match kind {
        KindArg::Xor => build_xor_schedule(width),
        KindArg::Butterfly => build_butterfly_schedule(width),
        KindArg::LocalMemory => build_local_memory_schedule(width),
        KindArg::Broadcast => build_broadcast_schedule(width),
    }?;
    Ok(schedule)
}

fn cmd_audit_lanes(width: u32, kind: KindArg, json: bool) -> Result<(), CliError> {
    let schedule = build_schedule(width, kind)?;
    let layout = HalfWarpLayout::new(width)?;
    let verification = verify_schedule(&schedule, &layout)?;
    let cost = cost_estimate(&schedule, &CostModel::default());
    let butterfly_moves = (schedule.kind() == ScheduleKind::Butterfly)
        .then(|| decompose_total_moves(&schedule))
        .transpose()?;

    if json {
        #[derive(Serialize)]
        struct AuditOut<'a> {
            verification: &'a perfport_core::VerificationReport,
            cost: &'a perfport_core::CostEstimate,
            #[serde(skip_serializing_if = "Option::is_none")]
            butterfly_total_moves: Option<u64>,
        }
        print!(
            "{}",
            to_json_string(&AuditOut {
                verification: &verification,
                cost: &cost,
                butterfly_total_moves: butterfly_moves,
            })?
        );
        return Ok(());
    }

    println!(
        "schedule: {:?}, width {}, {} steps, {} directed evaluations",
        verification.kind,
        verification.width,
        verification.step_count,
        verification.directed_evaluations
    );
    if verification.passed() {
        println!("verification: PASS (pair symmetry, coverage, permutation validity)");
    } else {
        println!(
            "verification: FAIL ({} violations)",
            verification.violations.len()
        );
        for violation in &verification.violations {
            println!("  {violation:?}");
        }
    }
    println!(
        "cost: {} {:?} per step, {} total",
        cost.per_step, cost.unit, cost.total
    );
    if let Some(moves) = butterfly_moves {
        println!("butterfly decomposition: 4 mov per step, {moves} total");
    }
    if let Some(redundant) = cost.redundant_evaluations {
        println!("redundant evaluations: {redundant}");
    }
    Ok(())
}

fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

fn navigation_points(analysis: &TimingAnalysis, convergence: f64) -> Vec<NavigationPoint> {
    analysis
        .configurations
        .iter()
        .map(|report| NavigationPoint {
            label: report.label.clone(),
            pp: report.pp,
            convergence,
        })
        .collect()
}

fn cmd_plot(
    timings: &Path,
    config_path: &Path,
    tree: Option<&Path>,
    out_dir: &Path,
    problem: Option<String>,
    app: Option<String>,
    agg: Aggregation,
) -> Result<(), CliError> {
    let config = AnalysisConfig::load(config_path)?;
    let analysis = timing_analysis(timings, Some(&config), problem, app, agg)?;
    let cascade =
        emit_cascade_svg(&analysis.cascade).map_err(|e| CliError::validation(e.to_string()))?;
    let path = write_artifact(out_dir, "cascade.svg", &cascade)?;
    println!("wrote {}", path.display());

    if let Some(tree) = tree {
        let scan = scan_analysis(&config, tree)?;
        let points = navigation_points(&analysis, scan.convergence);
        let navigation =
            emit_navigation_svg(&points).map_err(|e| CliError::validation(e.to_string()))?;
        let path = write_artifact(out_dir, "navigation.svg", &navigation)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_report(
    timings: &Path,
    config_path: &Path,
    tree: &Path,
    out_dir: &Path,
    problem: Option<String>,
    app: Option<String>,
    agg: Aggregation,
    threshold: Option<u64>,
) -> Result<(), CliError> {
    let config = AnalysisConfig::load(config_path)?;
    let mut analysis = timing_analysis(timings, Some(&config), problem, app, agg)?;
    let scan = scan_analysis(&config, tree)?;
    attach_convergence(&mut analysis, scan.convergence);

    let json = to_json_string(&JsonReport {
        app: &analysis.app,
        problem: &analysis.problem,
        aggregation: analysis.aggregation.as_str(),
        platforms: &analysis.platforms,
        kernels: &analysis.kernels,
        hypothetical_best_seconds: &analysis.hypothetical_best_seconds,
        configurations: &analysis.configurations,
        assignments: &analysis.assignments,
        cascade: &analysis.cascade,
        divergence: Some(&scan),
    })?;
    let threshold = threshold.unwrap_or(config.plot.breakdown_threshold);
    let markdown = emit_breakdown_markdown(&scan.breakdown, threshold);
    let cascade =
        emit_cascade_svg(&analysis.cascade).map_err(|e| CliError::validation(e.to_string()))?;
    let navigation = emit_navigation_svg(&navigation_points(&analysis, scan.convergence))
        .map_err(|e| CliError::validation(e.to_string()))?;

    for (name, content) in [
        ("report.json", &json),
        ("breakdown.md", &markdown),
        ("cascade.svg", &cascade),
        ("navigation.svg", &navigation),
    ] {
        let path = write_artifact(out_dir, name, content)?;
        println!("wrote {}", path.display());
    }
    println!();
    print!("{}", metrics_table(&analysis));
    println!();
    println!(
        "code divergence: {:.4}  convergence: {:.4}",
        scan.cd, scan.convergence
    );
    Ok(())
}

// Granularity is re-exported for callers building assignments directly.
impl From<GranularityArg> for Granularity {
    fn from(arg: GranularityArg) -> Self {
        match arg {
            GranularityArg::PerPlatform => Granularity::PerPlatform,
            GranularityArg::PerKernel => Granularity::PerKernel,
        }
    }
}
