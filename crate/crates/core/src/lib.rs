//! Single-particle coherence in ring networks.
//!
//! `n` stations sit on a ring and every neighbouring pair shares a source
//! emitting one particle toward one of the two stations. With quantum
//! sources each particle travels in superposition and the stations
//! interfere the two incoming arms on a 50/50 beam splitter; with classical
//! sources the particle is routed probabilistically. After keeping only runs
//! with one detected particle per station, the quantum ring produces
//! statistics supported exactly on even-parity outcomes, which no classical
//! ring can reproduce.
//!
//! * [`fock`] simulates the quantum ring in the Fock basis.
//! * [`classical`] models classical rings and proves by enumeration that the
//!   parity pattern is out of reach.
//! * [`witness`] evaluates the nonlinear witness `C_n`.
//! * [`optimizer`] searches the classical model numerically for the largest
//!   `C_n` and for decompositions of arbitrary targets.
//! * [`geometry`] certifies that the classical set contains every vertex of
//!   the probability simplex and is not convex.
//!
//! ```
//! use netcoh::{fock, witness};
//!
//! let ring = fock::simulate_ring(3).unwrap();
//! assert!((ring.success_probability - 0.25).abs() < 1e-12);
//! let c3 = witness::evaluate_cn(&ring.distribution);
//! assert!((c3.value - 0.375).abs() < 1e-12);
//! ```

pub mod classical;
pub mod error;
pub mod fock;
pub mod geometry;
pub mod optimizer;
pub mod outcome;
pub mod witness;

pub use error::{Error, Result};
pub use outcome::{Bitstring, OutcomeDistribution};

// Book chapters are compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub struct Readme;
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/quantum-ring.md")]
    pub struct QuantumRing;
    #[doc = include_str!("../../../book/src/classical-ring.md")]
    pub struct ClassicalRing;
    #[doc = include_str!("../../../book/src/witness.md")]
    pub struct Witness;
    #[doc = include_str!("../../../book/src/classical-bound.md")]
    pub struct ClassicalBound;
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub struct Geometry;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}
