//! Exact-arithmetic toolkit for classifying 4-dimensional restricted Lie
//! algebras in characteristic p.
//!
//! The crate is organized bottom-up:
//!
//! * [`substrate`] — finite fields F_{p^k}, dense exact linear algebra,
//!   polynomials with vector coefficients, multivariate rational polynomials.
//! * [`lie_core`] — Lie algebras by structure constants, the algebra file
//!   parser, Jacobi checking, center/derived/nilradical.
//! * [`restricted`] — the p-map formalism: Jacobson correction terms,
//!   p-semilinear maps, solving and enumerating p-maps, conjugation,
//!   conjugacy-invariant dimension profiles.
//! * [`iso_search`] — brute-force automorphism/isomorphism/conjugacy searches
//!   with constraint propagation, scalar-similarity testing, and validation of
//!   closed-form automorphism parameterizations.
//! * [`catalog`] — the classification as executable data: every Lie algebra
//!   representative, all 67 restricted rows with parameter domains and
//!   equivalence predicates, orbit counting, class counting, identity suites.

pub mod catalog;
pub mod iso_search;
pub mod lie_core;
pub mod restricted;
pub mod substrate;
