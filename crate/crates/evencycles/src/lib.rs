//! Constructive cycle decompositions of complete bipartite graphs (and
//! near relatives) into cycles of specified even lengths.
//!
//! The library builds, transforms, and independently verifies:
//!
//! - decompositions of `K_{a,b}` (and `K_{a,a}` minus a perfect matching)
//!   into cycles of arbitrary specified even lengths,
//! - uniform even-cycle decompositions of `K_v - K_u` (incomplete cycle
//!   systems with a hole),
//! - uniform even-cycle decompositions of complete multipartite graphs.
//!
//! The workhorse is a cycle-switching engine ([`switch`]) together with a
//! pipeline of leave-surgery transforms ([`transforms`]) that split, merge
//! and flatten the uncovered part of a partial packing, plus small base
//! constructions ([`base`]) that seed the recursion. Everything a builder
//! produces can be checked by the independent verifier in [`oracle`].

pub mod base;
pub mod builders;
pub mod error;
pub mod exec;
pub mod model;
pub mod oracle;
pub mod sampling;
pub mod switch;
pub mod transforms;

pub use error::{Error, Result};
