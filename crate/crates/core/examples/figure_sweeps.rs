//! Detector value against the mixing weight λ for ρ₁ (noise |ψ₁⟩), ρ₂
//! (white noise) and σ₁ (GenTiles2 stopper), with the sign change refined
//! by bisection.
//!
//! `cargo run --release --example figure_sweeps`

use belab::catalog::Family;
use belab::certify::{parse_grid, sweep, Detector, DEFAULT_GRID};
use belab::Result;

fn main() -> Result<()> {
    let grid = parse_grid(DEFAULT_GRID)?;
    for name in ["rho1:1", "rho2", "sigma1"] {
        let family: Family = name.parse()?;
        let result = sweep(&family.build()?, &grid, &Detector::ChoiU)?;
        println!(
            "{name:<8} value(0) = {:+.6e}  value(1) = {:+.6e}  sign changes = {}  threshold = {}",
            result.values[0],
            result.values[result.values.len() - 1],
            result.sign_changes,
            result
                .threshold
                .map_or("none".into(), |t| format!("{t:.12}")),
        );
    }
    Ok(())
}
