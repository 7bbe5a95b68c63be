//! Truncated Fock spaces over a one-particle basis, ladder operators and
//! region-count operators `Λ(Q) = Σ l_ij(Q) a_i⁺ a_j`.
//!
//! The one-particle basis is either a set of orthonormal functions on a grid
//! ([`ModeBasis`]) or the cells of the grid themselves. Tuples with
//! `Σ n_i ≤ N` are enumerated densely, so every algebraic identity can be
//! checked on explicit matrices.

mod matrix;
mod operator;
mod space;

pub use matrix::{DenseMatrix, SparseMatrix};
pub use operator::{
    cell_basis_count, expected_count, field_expansion_deviation, lambda_region, one_body_operator_from_kernel,
    single_particle_subsystem, specialized_lambda, ModeBasis, OffSectorSummary, OneBodyMatrix, OneBodyOperator,
    SpecializedLambda,
};
pub use space::{
    apply_annihilation, apply_creation, event_probability, induced_unitary, FockState, Occupation, OccupationBasis,
    OneParticleLabel, Statistics, MAX_STATES,
};
