//! Bundled configuration assets and their resolution.
//!
//! Flags like `--array` accept either a builtin name (`default`,
//! `figure5`, `a320`, `demo`) or a filesystem path. Builtins are embedded
//! at compile time; setting the `THINAIR_ASSETS` environment variable to a
//! directory makes builtins load from `<dir>/<file>` instead, so the
//! bundled documents can be edited without rebuilding.

use std::fs;
use std::io;
use std::path::Path;

/// Environment variable overriding where builtin assets are read from.
pub const ASSET_DIR_ENV: &str = "THINAIR_ASSETS";

pub const DEFAULT_ARRAY_JSON: &str = include_str!("../assets/default_array.json");
pub const FIGURE5_RIG_JSON: &str = include_str!("../assets/figure5_rig.json");
pub const A320_PROFILE_JSON: &str = include_str!("../assets/a320_profile.json");
pub const PIPELINE_DEFAULT_JSON: &str = include_str!("../assets/pipeline_default.json");
pub const DEMO_TRAJECTORY_CSV: &str = include_str!("../assets/demo_trajectory.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssetKind {
    Array,
    Rig,
    Profile,
    Pipeline,
    Trajectory,
}

impl AssetKind {
    /// The builtin name this kind accepts.
    pub fn builtin_name(&self) -> &'static str {
        match self {
            AssetKind::Array => "default",
            AssetKind::Rig => "figure5",
            AssetKind::Profile => "a320",
            AssetKind::Pipeline => "default",
            AssetKind::Trajectory => "demo",
        }
    }

    pub fn file_name(&self) -> &'static str {
        match self {
            AssetKind::Array => "default_array.json",
            AssetKind::Rig => "figure5_rig.json",
            AssetKind::Profile => "a320_profile.json",
            AssetKind::Pipeline => "pipeline_default.json",
            AssetKind::Trajectory => "demo_trajectory.csv",
        }
    }

    fn embedded(&self) -> &'static str {
        match self {
            AssetKind::Array => DEFAULT_ARRAY_JSON,
            AssetKind::Rig => FIGURE5_RIG_JSON,
            AssetKind::Profile => A320_PROFILE_JSON,
            AssetKind::Pipeline => PIPELINE_DEFAULT_JSON,
            AssetKind::Trajectory => DEMO_TRAJECTORY_CSV,
        }
    }
}

/// A resolved asset: where it came from (for manifests) and its contents.
#[derive(Debug, Clone)]
pub struct ResolvedAsset {
    pub source: String,
    pub contents: String,
}

/// Resolves a flag value to asset contents: the builtin name loads the
/// bundled document (or its `THINAIR_ASSETS` override); anything else is
/// read as a path.
pub fn resolve(kind: AssetKind, value: &str) -> io::Result<ResolvedAsset> {
    if value == kind.builtin_name() {
        if let Ok(dir) = std::env::var(ASSET_DIR_ENV) {
            let path = Path::new(&dir).join(kind.file_name());
            return Ok(ResolvedAsset {
                source: path.display().to_string(),
                contents: fs::read_to_string(&path)?,
            });
        }
        return Ok(ResolvedAsset {
            source: format!("builtin:{}", kind.file_name()),
            contents: kind.embedded().to_string(),
        });
    }
    Ok(ResolvedAsset {
        source: value.to_string(),
        contents: fs::read_to_string(value)?,
    })
}
