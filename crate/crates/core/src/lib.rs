//! Bound entangled states built from unextendible and uncompletable product
//! bases, with the tools to certify them.
//!
//! - [`catalog`]: the Tiles and GenTiles2 bases, edge states and the noisy
//!   families obtained by mixing separable noise into them.
//! - [`maps`]: partial transpose, the Choi map and the rotated Choi detector.
//! - [`certify`]: witnesses `Π − γI`, seesaw estimates of `γ`, λ-sweeps.
//! - [`range`]: range-criterion checks and product-vector search.
//! - [`cli`]: the `belab` command line.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example edge_states`
//! is a good place to start.

pub mod catalog;
pub mod certify;
pub mod cli;
pub mod error;
pub mod io;
pub mod linalg;
pub mod maps;
pub mod range;
mod seesaw;

pub use catalog::{DensityMatrix, NoisyFamily, ProductBasis, ProductVector};
pub use error::{Error, Result};
pub use linalg::Matrix;
