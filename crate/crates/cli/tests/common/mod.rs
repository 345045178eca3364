//! Shared test support: the naive reference interpreter and the random
//! corpus generator.
#![allow(dead_code)] // each test binary uses a different subset

pub mod gen;
pub mod naive;

use std::path::PathBuf;

/// Repo-relative path of the bundled fixture directory.
pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}
