//! Write a family member to the JSON state format and read it back.
//!
//! `cargo run --example state_files`

use belab::cli::build_selector;
use belab::io::StateFile;
use belab::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("belab-example");
    std::fs::create_dir_all(&dir)?;
    let (rho, family) = build_selector("rho3:41", Some(0.5))?;
    let path = dir.join("rho3_41.json");
    StateFile::from_state(&rho, "rho3:41", &family, Some(0.5)).write(&path)?;
    let back = StateFile::read(&path)?.to_state()?;
    println!("wrote {}", path.display());
    println!("bit-exact roundtrip: {}", back.matrix() == rho.matrix());
    println!("rank {}, dims {:?}", back.rank(), back.dims());
    Ok(())
}
