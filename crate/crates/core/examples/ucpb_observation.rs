//! Which member of GenTiles2 may go missing?
//!
//! Dropping `|φ₁⟩` leaves a set whose complement projector is detected by the
//! rotated Choi map, so it cannot be completed to a product basis. Dropping
//! the stopper `|φ₇⟩` leaves a set that the six plus partners complete.
//!
//! `cargo run --release --example ucpb_observation`

use belab::catalog::{
    gentiles2_4x3_upb, tiles_completion, tiles_plus_partners, tiles_upb, ucpb_complement,
};
use belab::range::ucpb_evidence;
use belab::Result;

fn main() -> Result<()> {
    let g = gentiles2_4x3_upb();

    let minus_first = g.without(0)?;
    let e = ucpb_evidence(&minus_first, None, 200, 42)?;
    println!("gentiles2 minus φ₁: {e:#?}");

    let minus_stopper = g.without(6)?;
    let e = ucpb_evidence(&minus_stopper, Some(&tiles_plus_partners()), 200, 42)?;
    println!(
        "gentiles2 minus φ₇: completable = {:?}, choi_u = {:?}",
        e.completable, e.choi_u
    );

    let t = tiles_upb().without(4)?;
    let e = ucpb_evidence(&t, Some(&tiles_completion()), 200, 42)?;
    println!("tiles minus stopper: completable = {:?}", e.completable);

    // complement of the first six members as edge state + separable noise
    let c = ucpb_complement(&g, 6)?;
    println!(
        "ρ′ = {:.4}·σ + {:.4}·δ, rank {}",
        c.weights.0,
        c.weights.1,
        c.state.rank()
    );
    Ok(())
}
