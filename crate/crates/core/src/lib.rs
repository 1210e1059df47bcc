//! Exact combinatorial dynamics of hyperbolic-like circle groups.
//!
//! - [`surd`]: quadratic surds `a + b*sqrt(d)` with exact sign decisions,
//!   including mixed radicands.
//! - [`circle`]: the projective-line circle, circular order, linked pairs,
//!   and set algebra on finite unions of open arcs.
//! - [`moebius`]: integer Moebius maps with positive determinant:
//!   classification, exact fixed pairs, commutation predicates.
//! - [`words`]: free products of finitely generated abelian groups: normal
//!   forms, word balls, evaluation, hyperbolic-likeness certificates.
//! - [`classify`]: the composition and commutator configuration classifiers
//!   and the seeded census.
//! - [`model`]: the combinatorial dynamical realization with dense rank-2
//!   translation stabilizers.
//! - [`pingpong`]: ping-pong partition builders, finite/axis verification,
//!   the unlinked configuration classifier, and free-product certificates.

pub mod circle;
pub mod classify;
pub mod model;
pub mod moebius;
pub mod pingpong;
pub mod surd;
pub mod words;
