//! Arithmetic substrate: exact finite fields, dense linear algebra over a
//! field, polynomials with vector coefficients, and multivariate polynomials
//! with rational coefficients.

pub mod field;
pub mod matrix;
pub mod poly;

pub use field::{
    field_embedding, field_make, is_quadratic_residue, nth_root, pth_root, FieldDescriptor,
    FieldElement, FieldEmbedding, FieldError,
};
pub use matrix::{Matrix, Subspace};
pub use poly::{RatMPoly, ScalarPoly, VecPoly};

/// Hard cap on field order: enumeration stays desk-scale.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Cap on exhaustive-scan operations (full sweeps of a field or vector space).
pub const MAX_EXHAUSTIVE: u64 = 1 << 16;
