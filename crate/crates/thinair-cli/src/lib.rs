//! File I/O and plumbing behind the `thinair` command-line tool: bundled
//! assets, hand-trajectory CSV parsing, field-map writers, and run
//! manifests.

pub mod assets;
pub mod fieldmap;
pub mod manifest;
pub mod trajectory;
