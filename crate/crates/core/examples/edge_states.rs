//! Build the two edge states and check their basic structure.
//!
//! `cargo run --example edge_states`

use belab::catalog::{edge_state, gentiles2_4x3_upb, tiles_upb};
use belab::maps::{is_ppt, pt_deviation, DETECTION_TOL};
use belab::Result;

fn main() -> Result<()> {
    for upb in [tiles_upb(), gentiles2_4x3_upb()] {
        let rho = edge_state(&upb)?;
        let (d1, d2) = rho.dims();
        println!(
            "{} UPB in {d1}⊗{d2}: {} members, stopper #{}",
            upb.label(),
            upb.len(),
            upb.stopper().unwrap() + 1
        );
        println!("  edge state rank  = {}", rho.rank());
        println!("  trace            = {:.16}", rho.trace());
        println!("  ‖ρ − ρ^Γ‖_max    = {:e}", pt_deviation(&rho));
        println!("  PPT              = {}", is_ppt(&rho, DETECTION_TOL)?);
        let worst = upb
            .vectors()
            .iter()
            .map(|v| {
                let r = rho.matrix().matvec(&v.full()).unwrap();
                r.iter().fold(0.0f64, |m, x| m.max(x.abs()))
            })
            .fold(0.0f64, f64::max);
        println!("  max |ρ|φᵢ⟩|      = {worst:e}");
    }
    Ok(())
}
