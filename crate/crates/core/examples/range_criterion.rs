//! Range-criterion checks.
//!
//! σ₁(λ) is spanned by six real product vectors, so it satisfies the
//! criterion. An edge state has no product vector in its range at all. ρ₃(λ)
//! contains exactly one product direction in a five-dimensional range.
//!
//! `cargo run --release --example range_criterion`

use belab::catalog::{
    edge_state, gentiles2_4x3_upb, rho_families, sigma2_family, tiles_plus_partners, tiles_upb,
    RhoVariant,
};
use belab::range::{check_range_criterion, search_range_criterion, DEFAULT_SEARCH_RESTARTS};
use belab::Result;

fn main() -> Result<()> {
    let g = gentiles2_4x3_upb();
    let sigma1 = sigma2_family(&g, &[6], 0.1)?;
    let r = check_range_criterion(&sigma1, &tiles_plus_partners())?;
    println!(
        "σ₁(0.1) with the six plus partners: {:?} (span rank {} of {})",
        r.verdict, r.span_rank_of_candidates, r.state_rank
    );

    for (name, rho) in [
        ("tiles edge", edge_state(&tiles_upb())?),
        ("gentiles2 edge", edge_state(&g)?),
    ] {
        let (r, s) = search_range_criterion(&rho, DEFAULT_SEARCH_RESTARTS, 42)?;
        println!(
            "{name}: {:?}, found {} product vectors, best overlap {:.10}",
            r.verdict,
            s.found.len(),
            s.best_overlap
        );
    }

    for lambda in [0.1, 0.5, 0.9] {
        let rho3 = rho_families(lambda, RhoVariant::Rho3(1))?;
        let (r, s) = search_range_criterion(&rho3, DEFAULT_SEARCH_RESTARTS, 42)?;
        println!(
            "ρ₃({lambda}): {:?}, rank {}, found {} (span rank {}), first a = {:?} b = {:?}",
            r.verdict,
            r.state_rank,
            s.found.len(),
            r.span_rank_of_candidates,
            s.found[0].vector.a(),
            s.found[0].vector.b()
        );
    }
    Ok(())
}
