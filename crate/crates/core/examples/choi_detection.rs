//! The rotated Choi map as an entanglement detector.
//!
//! Conjugating party B by a fixed rotation and then applying the Choi map
//! blockwise gives an operator with a negative eigenvalue on both edge
//! states, while random product states stay non-negative.
//!
//! `cargo run --example choi_detection`

use belab::catalog::{edge_state, gentiles2_4x3_upb, tiles_upb, DensityMatrix, ProductVector};
use belab::maps::{choi_u_detect, lift_map, SingleSiteMap};
use belab::{linalg, Result};

fn main() -> Result<()> {
    let tiles = edge_state(&tiles_upb())?;
    let gt = edge_state(&gentiles2_4x3_upb())?;
    println!("choi_u(tiles edge)     = {:.17e}", choi_u_detect(&tiles)?);
    println!("choi_u(gentiles2 edge) = {:.17e}", choi_u_detect(&gt)?);

    // without the rotation the plain Choi map misses the Tiles state
    let plain = linalg::min_eig(&lift_map(&SingleSiteMap::choi(), &tiles)?)?;
    println!("plain Choi on tiles    = {plain:.6e}");

    let mut worst = f64::INFINITY;
    for k in 0..1000u32 {
        let x = k as f64;
        let a = vec![(0.37 * x).sin(), (1.1 * x).cos(), (0.07 * x + 1.0).sin()];
        let b = vec![(0.91 * x).cos(), (0.13 * x + 0.5).sin(), (2.3 * x).sin()];
        let p = ProductVector::new(a, b)?;
        worst = worst.min(choi_u_detect(&DensityMatrix::pure(&p))?);
    }
    println!("min over 1000 product states = {worst:.3e}");
    Ok(())
}
