//! Mixing the normalized projector onto a stopper-containing subset of
//! GenTiles2 into its edge state: each extra member raises the rank by one,
//! from `12 − 7 + 1 = 6` up to full rank.
//!
//! `cargo run --example rank_ladder`

use belab::catalog::{gentiles2_4x3_upb, sigma2_family};
use belab::maps::{choi_u_detect, pt_deviation};
use belab::Result;

fn main() -> Result<()> {
    let upb = gentiles2_4x3_upb();
    let stopper = upb.stopper().unwrap();
    let mut subset = vec![stopper];
    for extra in (0..upb.len())
        .filter(|&i| i != stopper)
        .chain(std::iter::once(usize::MAX))
    {
        let s = sigma2_family(&upb, &subset, 0.1)?;
        println!(
            "|S′| = {}  rank = {:>2}  ‖σ − σ^Γ‖ = {:.1e}  choi_u = {:+.3e}",
            subset.len(),
            s.rank(),
            pt_deviation(&s),
            choi_u_detect(&s)?
        );
        if extra != usize::MAX {
            subset.push(extra);
        }
    }
    // a subset without the stopper is refused
    println!(
        "without stopper: {}",
        sigma2_family(&upb, &[0, 1], 0.1).unwrap_err()
    );
    Ok(())
}
