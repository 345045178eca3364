//! Analysis configuration: a TOML document listing the platform set, each
//! platform's compilation view (translation units, macro definitions,
//! include paths), optional per-platform variant masks, and plot options.
//!
//! ```toml
//! problem = "box177"
//!
//! [plot]
//! platform_order = "per-config"   # or "global"
//! breakdown_threshold = 50
//!
//! [scan]
//! source_extensions = ["c", "h", "cpp", "hpp", "cu", "cuh", "inc"]
//!
//! [[platform]]
//! name = "aurora"
//! translation_units = ["src/*.cpp", "src/kernels/*.cpp"]
//! include_paths = ["include"]
//! defines = ["USE_SYCL", "SUBGROUP_SIZE=16"]
//! variants = ["select", "memory", "visa"]
//! ```
//!
//! Translation units may use glob patterns (`*`, `?`, `**`); macro
//! definitions are `NAME` (defined as 1) or `NAME=VALUE`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use globset::{GlobBuilder, GlobSetBuilder};
use perfport_core::{CompilationConfig, PlatformId, PlatformOrder, ScanOptions};
use serde::Deserialize;
use walkdir::WalkDir;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Problem id to select from the timing data; inferred when the data
    /// holds exactly one.
    pub problem: Option<String>,
    #[serde(default)]
    pub plot: PlotSection,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(rename = "platform", default)]
    pub platforms: Vec<PlatformSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlotSection {
    #[serde(default = "default_order")]
    pub platform_order: String,
    #[serde(default = "default_threshold")]
    pub breakdown_threshold: u64,
}

impl Default for PlotSection {
    fn default() -> Self {
        PlotSection {
            platform_order: default_order(),
            breakdown_threshold: default_threshold(),
        }
    }
}

fn default_order() -> String {
    "per-config".to_owned()
}

fn default_threshold() -> u64 {
    50
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub source_extensions: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformSpec {
    pub name: String,
    #[serde(default)]
    pub translation_units: Vec<String>,
    #[serde(default)]
    pub include_paths: Vec<String>,
    #[serde(default)]
    pub defines: Vec<String>,
    /// Variants this platform is willing to run; `None` allows all.
    pub variants: Option<Vec<String>>,
}

impl AnalysisConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: AnalysisConfig = toml::from_str(&text)
            .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.platforms.is_empty() {
            return Err(CliError::validation(
                "config must declare at least one [[platform]]",
            ));
        }
        let mut seen = BTreeSet::new();
        for spec in &self.platforms {
            if spec.name.is_empty() {
                return Err(CliError::validation("platform name must be non-empty"));
            }
            if !seen.insert(&spec.name) {
                return Err(CliError::validation(format!(
                    "duplicate platform `{}` in config",
                    spec.name
                )));
            }
        }
        match self.plot.platform_order.as_str() {
            "per-config" | "global" => Ok(()),
            other => Err(CliError::validation(format!(
                "plot.platform_order must be `per-config` or `global`, got `{other}`"
            ))),
        }
    }

    pub fn platform_set(&self) -> Result<BTreeSet<PlatformId>, CliError> {
        self.platforms
            .iter()
            .map(|spec| PlatformId::new(&spec.name).map_err(CliError::from))
            .collect()
    }

    pub fn platform_order(&self) -> PlatformOrder {
        match self.plot.platform_order.as_str() {
            "global" => PlatformOrder::Global,
            _ => PlatformOrder::PerConfiguration,
        }
    }

    /// Allowed-variant masks keyed by platform; platforms without a
    /// `variants` key allow every variant in `pool`.
    pub fn allowed_variants(
        &self,
        pool: &BTreeSet<String>,
    ) -> Result<BTreeMap<PlatformId, BTreeSet<String>>, CliError> {
        let mut masks = BTreeMap::new();
        for spec in &self.platforms {
            let platform = PlatformId::new(&spec.name)?;
            let allowed = match &spec.variants {
                Some(list) => list.iter().cloned().collect(),
                None => pool.clone(),
            };
            masks.insert(platform, allowed);
        }
        Ok(masks)
    }

    pub fn scan_options(&self) -> ScanOptions {
        match &self.scan.source_extensions {
            Some(exts) => ScanOptions {
                source_extensions: exts.iter().map(|e| e.to_ascii_lowercase()).collect(),
            },
            None => ScanOptions::default(),
        }
    }

    /// Expands glob patterns and builds one `CompilationConfig` per
    /// platform, against the given tree root.
    pub fn compilation_configs(&self, root: &Path) -> Result<Vec<CompilationConfig>, CliError> {
        if !root.is_dir() {
            return Err(CliError::Io(format!("{}: not a directory", root.display())));
        }
        let tree = relative_files(root)?;
        self.platforms
            .iter()
            .map(|spec| {
                let mut config = CompilationConfig::new(PlatformId::new(&spec.name)?);
                config.translation_units =
                    expand_units(&spec.translation_units, &tree, &spec.name)?;
                config.include_paths = spec.include_paths.clone();
                config.defines = parse_defines(&spec.defines);
                Ok(config)
            })
            .collect()
    }
}

/// `NAME` or `NAME=VALUE` definitions; a bare name defines to "1".
pub fn parse_defines(defines: &[String]) -> BTreeMap<String, String> {
    defines
        .iter()
        .map(|entry| match entry.split_once('=') {
            Some((name, value)) => (name.trim().to_owned(), value.trim().to_owned()),
            None => (entry.trim().to_owned(), "1".to_owned()),
        })
        .collect()
}

fn relative_files(root: &Path) -> Result<Vec<String>, CliError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::Io(format!("walking {}: {e}", root.display())))?;
        if entry.file_type().is_file() {
            let rel = entry
                .path()
                .strip_prefix(root)
                .expect("walked paths live under root")
                .components()
                .map(|c| c.as_os_str().to_string_lossy())
                .collect::<Vec<_>>()
                .join("/");
            files.push(rel);
        }
    }
    files.sort();
    Ok(files)
}

fn is_glob(pattern: &str) -> bool {
    pattern.contains(['*', '?', '[', '{'])
}

fn expand_units(
    patterns: &[String],
    tree: &[String],
    platform: &str,
) -> Result<Vec<String>, CliError> {
    if patterns.is_empty() {
        return Err(CliError::validation(format!(
            "platform `{platform}` lists no translation_units"
        )));
    }
    let mut units = Vec::new();
    let mut seen = BTreeSet::new();
    for pattern in patterns {
        if is_glob(pattern) {
            // Shell-style: `*` stops at `/`, `**` crosses directories.
            let glob = GlobBuilder::new(pattern)
                .literal_separator(true)
                .build()
                .map_err(|e| {
                    CliError::validation(format!("bad glob `{pattern}` for `{platform}`: {e}"))
                })?;
            let matcher = GlobSetBuilder::new().add(glob).build().map_err(|e| {
                CliError::validation(format!("bad glob `{pattern}` for `{platform}`: {e}"))
            })?;
            let mut matched: Vec<&String> =
                tree.iter().filter(|rel| matcher.is_match(rel)).collect();
            if matched.is_empty() {
                return Err(CliError::validation(format!(
                    "glob `{pattern}` for `{platform}` matches no files in the tree"
                )));
            }
            matched.sort();
            for rel in matched {
                if seen.insert(rel.clone()) {
                    units.push(rel.clone());
                }
            }
        } else if seen.insert(pattern.clone()) {
            units.push(pattern.clone());
        }
    }
    Ok(units)
}
