//! Conditional-compilation-aware source scanning.
//!
//! Given a source tree and one compilation configuration per platform
//! (macro definitions, translation units, include paths), this module
//! computes the set of lines each platform's compiler actually reads — the
//! per-platform line sets behind the code divergence metric — plus SLOC
//! breakdowns partitioning every code line of the tree by the exact subset
//! of platforms using it.
//!
//! This is compile-reachability, not execution: a line guarded into one
//! platform's build counts for that platform whether or not it ever runs.
//! No macro expansion happens in code bodies and no tokens are diffed; line
//! identity is (path relative to the tree root, physical line number).

mod classify;
mod expr;
mod walk;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::ser::SerializeSeq;
use serde::Serialize;
use thiserror::Error;

use crate::metrics::{code_divergence, LineSet, MetricsError, PlatformId};

pub use classify::{classify_lines, LineClass, UnterminatedComment};
use walk::{normalize_under_root, UnitWalk};

/// Scan failure; directive-level errors carry the file and line.
#[derive(Debug, Error)]
pub enum ScanError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: not valid UTF-8")]
    NonUtf8 { path: PathBuf },
    #[error("{file}:{line}: unterminated block comment starting here")]
    UnterminatedComment { file: String, line: u32 },
    #[error("{file}:{line}: {directive} without matching #if")]
    UnbalancedConditional {
        file: String,
        line: u32,
        directive: String,
    },
    #[error("{file}:{line}: missing #endif for conditional opened here")]
    MissingEndif { file: String, line: u32 },
    #[error("{file}:{line}: {message}")]
    DirectiveSyntax {
        file: String,
        line: u32,
        message: String,
    },
    #[error("{file}:{line}: cannot resolve #include `{target}`; searched {searched:?}")]
    IncludeNotFound {
        file: String,
        line: u32,
        target: String,
        searched: Vec<String>,
    },
    #[error("{file}:{line}: include depth limit ({limit}) exceeded")]
    IncludeDepthExceeded {
        file: String,
        line: u32,
        limit: usize,
    },
    #[error("{file}:{line}: division by zero in #if expression")]
    DivisionByZero { file: String, line: u32 },
    #[error("{file}:{line}: bad #if expression: {message}")]
    Expr {
        file: String,
        line: u32,
        message: String,
    },
    #[error("path `{path}` escapes the source tree root")]
    PathEscape { path: String },
    #[error("config for platform `{0}` lists no translation units")]
    NoTranslationUnits(PlatformId),
    #[error("translation unit `{0}` not found under the tree root")]
    MissingTranslationUnit(String),
    #[error("scanning needs at least {want} configurations, got {got}")]
    TooFewConfigs { want: usize, got: usize },
    #[error("duplicate platform `{0}` across configurations")]
    DuplicatePlatform(PlatformId),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// What one platform's compiler sees: translation units, macro definitions,
/// and include search paths, all relative to a source-tree root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompilationConfig {
    pub platform: PlatformId,
    /// Root-relative paths of the top-level files compiled for this
    /// platform.
    pub translation_units: Vec<String>,
    /// Macro name → value. A bare `-DNAME` style definition maps to "1".
    pub defines: BTreeMap<String, String>,
    /// Root-relative include search directories, in search order.
    pub include_paths: Vec<String>,
}

impl CompilationConfig {
    pub fn new(platform: PlatformId) -> Self {
        CompilationConfig {
            platform,
            translation_units: Vec::new(),
            defines: BTreeMap::new(),
            include_paths: Vec::new(),
        }
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.translation_units.push(unit.into());
        self
    }

    pub fn with_define(mut self, name: impl Into<String>, value: impl Into<String>) -> Self {
        self.defines.insert(name.into(), value.into());
        self
    }

    pub fn with_include_path(mut self, dir: impl Into<String>) -> Self {
        self.include_paths.push(dir.into());
        self
    }
}

/// Normalized, root-relative translation-unit paths with escape checking.
fn validated_units(config: &CompilationConfig, root: &Path) -> Result<Vec<String>, ScanError> {
    if config.translation_units.is_empty() {
        return Err(ScanError::NoTranslationUnits(config.platform.clone()));
    }
    let mut units = Vec::new();
    for raw in &config.translation_units {
        let rel = normalize_under_root("", raw)
            .ok_or_else(|| ScanError::PathEscape { path: raw.clone() })?;
        if !root.join(&rel).is_file() {
            return Err(ScanError::MissingTranslationUnit(rel));
        }
        units.push(rel);
    }
    Ok(units)
}

fn validated_include_dirs(config: &CompilationConfig) -> Result<Vec<String>, ScanError> {
    config
        .include_paths
        .iter()
        .map(|raw| {
            normalize_under_root("", raw).ok_or_else(|| ScanError::PathEscape { path: raw.clone() })
        })
        .collect()
}

/// Outcome of scanning all translation units of one configuration.
#[derive(Debug, Clone, Default)]
pub(crate) struct ConfigScan {
    /// Per reached file, every line in an active region (any class).
    pub(crate) active: BTreeMap<String, BTreeSet<u32>>,
    /// Line classes per reached file.
    pub(crate) classes: BTreeMap<String, Vec<LineClass>>,
}

fn scan_config(root: &Path, config: &CompilationConfig) -> Result<ConfigScan, ScanError> {
    let units = validated_units(config, root)?;
    let include_dirs = validated_include_dirs(config)?;

    // Units are independent: each carries its own macro environment seeded
    // from the config, so per-unit results can be merged in any order.
    let per_unit: Vec<Result<ConfigScan, ScanError>> = units
        .par_iter()
        .map(|unit| {
            let mut cache = HashMap::new();
            let mut walk = UnitWalk::new(root, config, &include_dirs, &mut cache);
            walk.process_file(unit, 0)?;
            let mut scan = ConfigScan {
                active: walk.active,
                classes: BTreeMap::new(),
            };
            for rel in walk.reached {
                let parsed = cache.get(&rel).expect("reached file is cached");
                scan.classes.insert(rel, parsed.classes.clone());
            }
            Ok(scan)
        })
        .collect();

    let mut merged = ConfigScan::default();
    for outcome in per_unit {
        let scan = outcome?;
        for (file, lines) in scan.active {
            merged.active.entry(file).or_default().extend(lines);
        }
        merged.classes.extend(scan.classes);
    }
    Ok(merged)
}

/// Active line numbers per reached file for a single translation unit —
/// the raw conditional-evaluation result, before any class filtering.
pub fn evaluate_unit(
    root: &Path,
    config: &CompilationConfig,
    unit: &str,
) -> Result<BTreeMap<String, BTreeSet<u32>>, ScanError> {
    let rel = normalize_under_root("", unit).ok_or_else(|| ScanError::PathEscape {
        path: unit.to_owned(),
    })?;
    if !root.join(&rel).is_file() {
        return Err(ScanError::MissingTranslationUnit(rel));
    }
    let include_dirs = validated_include_dirs(config)?;
    let mut cache = HashMap::new();
    let mut walk = UnitWalk::new(root, config, &include_dirs, &mut cache);
    walk.process_file(&rel, 0)?;
    Ok(walk.active)
}

/// The set of source lines this configuration compiles: over all
/// translation units, every line that is both in an active region and
/// classified Code or Directive. Comment and blank lines are never members.
pub fn used_lines(root: &Path, config: &CompilationConfig) -> Result<LineSet, ScanError> {
    Ok(used_from_scan(&scan_config(root, config)?))
}

fn used_from_scan(scan: &ConfigScan) -> LineSet {
    let mut set = LineSet::new();
    for (file, lines) in &scan.active {
        let classes = &scan.classes[file];
        for &line in lines {
            match classes[(line - 1) as usize] {
                LineClass::Code | LineClass::Directive => set.insert(file.clone(), line),
                LineClass::Comment | LineClass::Blank => {}
            }
        }
    }
    set
}

/// Options controlling which tree files the SLOC breakdown counts.
#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// File extensions (lower-case, no dot) treated as source when
    /// enumerating the tree. Files reached by a configuration are always
    /// counted regardless of extension.
    pub source_extensions: BTreeSet<String>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        let defaults = [
            "c", "h", "cc", "hh", "cpp", "hpp", "cxx", "hxx", "cu", "cuh", "inl", "inc", "ipp",
        ];
        ScanOptions {
            source_extensions: defaults.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Per-region SLOC counts: each Code/Directive line of the tree is assigned
/// to the exact subset of platforms whose used-line set contains it, or to
/// `unused` when no configuration compiles it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlocBreakdown {
    /// Non-empty platform subsets → line count. Only occupied regions are
    /// present.
    pub regions: BTreeMap<BTreeSet<PlatformId>, u64>,
    pub unused: u64,
    pub total: u64,
}

impl SlocBreakdown {
    /// Lines used by at least one platform.
    pub fn used_total(&self) -> u64 {
        self.regions.values().sum()
    }
}

impl Serialize for SlocBreakdown {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        // JSON shape: {"regions": [{"platforms": [...], "sloc": n}, ...],
        // "unused": n, "total": n} — set-valued keys don't fit JSON maps.
        #[derive(Serialize)]
        struct Region<'a> {
            platforms: &'a BTreeSet<PlatformId>,
            sloc: u64,
        }
        #[derive(Serialize)]
        struct Flat<'a> {
            regions: RegionList<'a>,
            unused: u64,
            total: u64,
        }
        struct RegionList<'a>(&'a BTreeMap<BTreeSet<PlatformId>, u64>);
        impl Serialize for RegionList<'_> {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for (platforms, sloc) in self.0 {
                    seq.serialize_element(&Region {
                        platforms,
                        sloc: *sloc,
                    })?;
                }
                seq.end()
            }
        }
        Flat {
            regions: RegionList(&self.regions),
            unused: self.unused,
            total: self.total,
        }
        .serialize(serializer)
    }
}

fn tree_files(root: &Path, options: &ScanOptions) -> Result<Vec<String>, ScanError> {
    fn visit(
        root: &Path,
        dir: &Path,
        options: &ScanOptions,
        out: &mut Vec<String>,
    ) -> Result<(), ScanError> {
        let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|source| ScanError::Io {
                path: dir.to_path_buf(),
                source,
            })?
            .map(|entry| {
                entry.map(|e| e.path()).map_err(|source| ScanError::Io {
                    path: dir.to_path_buf(),
                    source,
                })
            })
            .collect::<Result<_, _>>()?;
        entries.sort();
        for path in entries {
            if path.is_dir() {
                visit(root, &path, options, out)?;
            } else if path.is_file() {
                let matches = path
                    .extension()
                    .and_then(|e| e.to_str())
                    .map(|e| options.source_extensions.contains(&e.to_ascii_lowercase()))
                    .unwrap_or(false);
                if matches {
                    let rel = path
                        .strip_prefix(root)
                        .expect("walked paths live under root")
                        .components()
                        .map(|c| c.as_os_str().to_string_lossy())
                        .collect::<Vec<_>>()
                        .join("/");
                    out.push(rel);
                }
            }
        }
        Ok(())
    }
    let mut files = Vec::new();
    visit(root, root, options, &mut files)?;
    files.sort();
    Ok(files)
}

/// SLOC breakdown with default source extensions.
pub fn sloc_breakdown(
    root: &Path,
    configs: &[CompilationConfig],
) -> Result<SlocBreakdown, ScanError> {
    sloc_breakdown_with(root, configs, &ScanOptions::default())
}

/// Partitions every Code/Directive line of the tree by the exact subset of
/// platforms using it. Lines in no configuration's used set are unused;
/// `regions + unused = total` by construction. Rendering thresholds (such as
/// hiding small regions) are a presentation concern, not applied here.
pub fn sloc_breakdown_with(
    root: &Path,
    configs: &[CompilationConfig],
    options: &ScanOptions,
) -> Result<SlocBreakdown, ScanError> {
    if configs.is_empty() {
        return Err(ScanError::TooFewConfigs { want: 1, got: 0 });
    }
    check_unique_platforms(configs)?;

    let scans: Vec<(PlatformId, ConfigScan)> = configs
        .par_iter()
        .map(|config| Ok((config.platform.clone(), scan_config(root, config)?)))
        .collect::<Result<_, ScanError>>()?;
    let used: Vec<(PlatformId, LineSet)> = scans
        .iter()
        .map(|(platform, scan)| (platform.clone(), used_from_scan(scan)))
        .collect();

    // Every file reached by some configuration is counted, plus every
    // unreached file with a source extension.
    let mut files: BTreeSet<String> = tree_files(root, options)?.into_iter().collect();
    let mut known_classes: BTreeMap<&String, &Vec<LineClass>> = BTreeMap::new();
    for (_, scan) in &scans {
        for (file, classes) in &scan.classes {
            files.insert(file.clone());
            known_classes.insert(file, classes);
        }
    }

    let mut regions: BTreeMap<BTreeSet<PlatformId>, u64> = BTreeMap::new();
    let mut unused = 0u64;
    let mut total = 0u64;
    for file in &files {
        let owned_classes;
        let classes = match known_classes.get(file) {
            Some(classes) => *classes,
            None => {
                let path = root.join(file);
                let bytes = std::fs::read(&path).map_err(|source| ScanError::Io {
                    path: path.clone(),
                    source,
                })?;
                let text = String::from_utf8(bytes).map_err(|_| ScanError::NonUtf8 { path })?;
                owned_classes = classify::classify_lines(&text).map_err(|e| {
                    ScanError::UnterminatedComment {
                        file: file.clone(),
                        line: e.start_line,
                    }
                })?;
                &owned_classes
            }
        };
        for (idx, class) in classes.iter().enumerate() {
            if !matches!(class, LineClass::Code | LineClass::Directive) {
                continue;
            }
            let line = idx as u32 + 1;
            let members: BTreeSet<PlatformId> = used
                .iter()
                .filter(|(_, set)| set.contains(file, line))
                .map(|(platform, _)| platform.clone())
                .collect();
            total += 1;
            if members.is_empty() {
                unused += 1;
            } else {
                *regions.entry(members).or_insert(0) += 1;
            }
        }
    }

    Ok(SlocBreakdown {
        regions,
        unused,
        total,
    })
}

fn check_unique_platforms(configs: &[CompilationConfig]) -> Result<(), ScanError> {
    let mut seen = BTreeSet::new();
    for config in configs {
        if !seen.insert(config.platform.clone()) {
            return Err(ScanError::DuplicatePlatform(config.platform.clone()));
        }
    }
    Ok(())
}

/// Code divergence over the per-configuration used-line sets. Unused lines
/// are excluded by construction: they appear in no configuration's set.
pub fn divergence_from_tree(root: &Path, configs: &[CompilationConfig]) -> Result<f64, ScanError> {
    if configs.len() < 2 {
        return Err(ScanError::TooFewConfigs {
            want: 2,
            got: configs.len(),
        });
    }
    check_unique_platforms(configs)?;
    let sets: Vec<(PlatformId, LineSet)> = configs
        .par_iter()
        .map(|config| Ok((config.platform.clone(), used_lines(root, config)?)))
        .collect::<Result<_, ScanError>>()?;
    let platforms: BTreeSet<PlatformId> = sets.iter().map(|(p, _)| p.clone()).collect();
    let line_sets: BTreeMap<PlatformId, LineSet> = sets.into_iter().collect();
    Ok(code_divergence(&platforms, &line_sets)?)
}
