//! Timing-data ingestion.
//!
//! The input is CSV with header `app,kernel,platform,problem,variant,seconds`
//! (an optional trailing `sample` column is accepted), UTF-8,
//! comma-delimited, `#` comment lines ignored. Repeated samples of the same
//! (app, kernel, platform, problem, variant) are reduced by minimum by
//! default; `--agg mean` averages them instead.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use perfport_core::{KernelTimingMatrix, PlatformId};
use serde::Serialize;

use crate::error::CliError;

/// One validated timing sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRecord {
    pub app: String,
    pub kernel: String,
    pub platform: String,
    pub problem: String,
    pub variant: String,
    pub seconds: f64,
    pub sample: Option<u64>,
}

/// Reduction applied to repeated samples of one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Aggregation {
    /// Best achieved performance; the default, since efficiency baselines
    /// should reflect what the hardware demonstrably can do.
    Min,
    Mean,
}

impl Aggregation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Aggregation::Min => "min",
            Aggregation::Mean => "mean",
        }
    }
}

const REQUIRED_HEADER: [&str; 6] = ["app", "kernel", "platform", "problem", "variant", "seconds"];

/// Parses and validates a timing CSV. Malformed rows are rejected with
/// their line number.
pub fn parse_timings(path: &Path) -> Result<Vec<TimingRecord>, CliError> {
    // Flexible mode defers record-length checking to the loop below, which
    // reports the offending line number.
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
            _ => CliError::validation(format!("{}: {e}", path.display())),
        })?;

    let headers = reader
        .headers()
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?
        .clone();
    let header_fields: Vec<&str> = headers.iter().collect();
    let has_sample = match header_fields.as_slice() {
        fields if fields == REQUIRED_HEADER => false,
        [rest @ .., "sample"] if rest == REQUIRED_HEADER => true,
        other => {
            return Err(CliError::validation(format!(
                "{}: expected header {}, got {}",
                path.display(),
                REQUIRED_HEADER.join(","),
                other.join(",")
            )))
        }
    };

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let expected = REQUIRED_HEADER.len() + usize::from(has_sample);
        if row.len() != expected {
            return Err(CliError::validation(format!(
                "{}:{line}: expected {expected} fields, got {}",
                path.display(),
                row.len()
            )));
        }
        let field = |idx: usize, name: &str| -> Result<String, CliError> {
            let value = row.get(idx).unwrap_or("").to_owned();
            if value.is_empty() {
                Err(CliError::validation(format!(
                    "{}:{line}: empty `{name}`",
                    path.display()
                )))
            } else {
                Ok(value)
            }
        };
        let seconds_raw = field(5, "seconds")?;
        let seconds: f64 = seconds_raw.parse().map_err(|_| {
            CliError::validation(format!(
                "{}:{line}: `{seconds_raw}` is not a number",
                path.display()
            ))
        })?;
        if !seconds.is_finite() || seconds <= 0.0 {
            return Err(CliError::validation(format!(
                "{}:{line}: seconds must be positive, got {seconds_raw}",
                path.display()
            )));
        }
        let sample = if has_sample {
            let raw = row.get(6).unwrap_or("");
            if raw.is_empty() {
                None
            } else {
                Some(raw.parse::<u64>().map_err(|_| {
                    CliError::validation(format!(
                        "{}:{line}: `{raw}` is not a sample index",
                        path.display()
                    ))
                })?)
            }
        } else {
            None
        };
        records.push(TimingRecord {
            app: field(0, "app")?,
            kernel: field(1, "kernel")?,
            platform: field(2, "platform")?,
            problem: field(3, "problem")?,
            variant: field(4, "variant")?,
            seconds,
            sample,
        });
    }
    Ok(records)
}

/// Reduces repeated samples per (app, kernel, platform, problem, variant).
///
/// Mean aggregation sorts the sample values before summing so the result is
/// independent of row order in the file.
pub fn reduce_samples(
    records: &[TimingRecord],
    agg: Aggregation,
) -> BTreeMap<(String, String, String, String, String), f64> {
    let mut grouped: BTreeMap<_, Vec<f64>> = BTreeMap::new();
    for r in records {
        grouped
            .entry((
                r.app.clone(),
                r.kernel.clone(),
                r.platform.clone(),
                r.problem.clone(),
                r.variant.clone(),
            ))
            .or_default()
            .push(r.seconds);
    }
    grouped
        .into_iter()
        .map(|(key, mut samples)| {
            let value = match agg {
                Aggregation::Min => samples.iter().copied().fold(f64::INFINITY, f64::min),
                Aggregation::Mean => {
                    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    samples.iter().sum::<f64>() / samples.len() as f64
                }
            };
            (key, value)
        })
        .collect()
}

/// Builds the kernel × platform × variant timing matrix for one app and one
/// problem, resolving either from flags or by uniqueness in the data.
pub fn build_matrix(
    records: &[TimingRecord],
    app: Option<&str>,
    problem: Option<&str>,
    agg: Aggregation,
) -> Result<(String, String, KernelTimingMatrix), CliError> {
    if records.is_empty() {
        return Err(CliError::validation("timing file contains no records"));
    }
    let app = unique_or_flag(records.iter().map(|r| r.app.as_str()), app, "app", "--app")?;
    let subset: Vec<&TimingRecord> = records.iter().filter(|r| r.app == app).collect();
    let problem = unique_or_flag(
        subset.iter().map(|r| r.problem.as_str()),
        problem,
        "problem",
        "--problem",
    )?;
    let reduced = reduce_samples(records, agg);
    let entries: Vec<(String, PlatformId, String, f64)> = reduced
        .into_iter()
        .filter(|((a, _, _, prob, _), _)| *a == app && *prob == problem)
        .map(|((_, kernel, platform, _, variant), seconds)| {
            Ok((kernel, PlatformId::new(platform)?, variant, seconds))
        })
        .collect::<Result<_, CliError>>()?;
    if entries.is_empty() {
        return Err(CliError::validation(format!(
            "no records for app `{app}` and problem `{problem}`"
        )));
    }
    let matrix = KernelTimingMatrix::from_entries(entries)?;
    Ok((app, problem, matrix))
}

fn unique_or_flag<'a>(
    values: impl Iterator<Item = &'a str>,
    flag: Option<&str>,
    what: &str,
    flag_name: &str,
) -> Result<String, CliError> {
    let distinct: BTreeSet<&str> = values.collect();
    match flag {
        Some(value) => {
            if distinct.contains(value) {
                Ok(value.to_owned())
            } else {
                Err(CliError::validation(format!(
                    "{what} `{value}` not present; data has: {}",
                    distinct.into_iter().collect::<Vec<_>>().join(", ")
                )))
            }
        }
        None => {
            if distinct.len() == 1 {
                Ok(distinct.into_iter().next().unwrap().to_owned())
            } else {
                Err(CliError::validation(format!(
                    "data holds multiple {what}s ({}); pick one with {flag_name}",
                    distinct.into_iter().collect::<Vec<_>>().join(", ")
                )))
            }
        }
    }
}
