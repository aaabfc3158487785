//! Engines for the finite cases of Dickson's lemma.
//!
//! Given `k` total sequences over the naturals and a target length `l`, the
//! [`engine`] module extracts strictly increasing indices on which every
//! sequence weakly increases, together with a [`engine::BoundCertificate`]
//! recording how the extracted bound was assembled from the bounds of the
//! sub-steps. The certificate can be re-derived and checked independently of
//! the extraction run.
//!
//! The companion modules provide the pigeonhole reductions built on top of
//! the engine ([`pigeonhole`]), executable refuters for candidate one-step
//! linearizations of the product order ([`unprovability`]), and exhaustive
//! brute-force oracles used to cross-check everything ([`oracle`]).
//!
//! All values are arbitrary-precision naturals. Every run is driven through
//! an evaluation budget so that calls with astronomically large extracted
//! bounds fail loudly instead of hanging.

pub mod canon;
pub mod dsl;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod pigeonhole;
pub mod sequence;
pub mod unprovability;

pub use error::{Error, Result};
pub use sequence::{Coloring, EngineConfig, EvalCtx, MultiFunction, Nat, Sequence, nat};
