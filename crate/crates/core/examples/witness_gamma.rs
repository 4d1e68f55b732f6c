//! Witness `W = Π − γI` on the span of a UPB.
//!
//! `γ` is the smallest overlap of `Π` with a product state; the seesaw finds
//! it from above. Mixing a stopper-containing slice of the UPB into its edge
//! state moves `Tr[Wσ₂(λ)]` linearly, `λ − γ`, so detection holds for
//! `0 < λ < γ`.
//!
//! `cargo run --release --example witness_gamma`

use belab::catalog::{edge_state, gentiles2_4x3_upb, sigma2_family, tiles_upb};
use belab::certify::{estimate_gamma, witness_value, Witness, DEFAULT_RESTARTS, DEFAULT_SEED};
use belab::Result;

fn main() -> Result<()> {
    for upb in [tiles_upb(), gentiles2_4x3_upb()] {
        let pi = upb.span_projector()?;
        let est = estimate_gamma(&pi, upb.dims(), DEFAULT_RESTARTS, DEFAULT_SEED)?;
        println!(
            "{:<10} γ̂ = {:.12}  ({} of {} restarts reach it)",
            upb.label(),
            est.gamma,
            est.hits,
            est.restarts
        );
        println!("           minimizer α = {:?}", est.minimizer.a());
        println!("                     β = {:?}", est.minimizer.b());

        let w = Witness::for_upb(&upb, est.gamma)?;
        println!(
            "           Tr[W·edge] = {:+.3e}",
            witness_value(&w, &edge_state(&upb)?)?
        );
        let stopper = upb.stopper().unwrap();
        for lambda in [0.0, 0.01, 0.02, 0.05] {
            let s = sigma2_family(&upb, &[stopper], lambda)?;
            println!(
                "           λ = {lambda:<5} Tr[Wσ₂(λ)] = {:+.6e}  (λ − γ = {:+.6e})",
                witness_value(&w, &s)?,
                lambda - est.gamma
            );
        }
    }
    Ok(())
}
