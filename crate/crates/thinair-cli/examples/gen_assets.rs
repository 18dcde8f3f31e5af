//! Regenerates the bundled assets in `assets/` from the library factories.
//! Run after changing any bundled default:
//!
//! ```text
//! cargo run -p thinair-cli --example gen_assets
//! ```

use std::fs;
use std::path::Path;

use thinair::config::{ArrayDocument, PipelineDocument, ProfileDocument, RigDocument};
use thinair::interaction::demo_trajectory;
use thinair_cli::trajectory::write_hand_trajectory;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets");
    fs::create_dir_all(&dir)?;

    fs::write(
        dir.join("default_array.json"),
        ArrayDocument::default_array().to_json_pretty(),
    )?;
    fs::write(
        dir.join("figure5_rig.json"),
        RigDocument::figure5().to_json_pretty(),
    )?;
    fs::write(
        dir.join("a320_profile.json"),
        ProfileDocument::a320_example().to_json_pretty(),
    )?;
    fs::write(
        dir.join("pipeline_default.json"),
        PipelineDocument::default_pipeline().to_json_pretty(),
    )?;
    fs::write(
        dir.join("demo_trajectory.csv"),
        write_hand_trajectory(&demo_trajectory(5_000_000, 90.0)),
    )?;

    println!("assets regenerated under {}", dir.display());
    Ok(())
}
