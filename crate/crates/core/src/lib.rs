//! Exact exponential distance matrices of bi-block graphs.
//!
//! A bi-block graph is a connected graph whose blocks are all complete
//! bipartite. For a nonzero rational `q` its exponential distance matrix
//! `F` has entries `q^d(u,v)`. This crate builds `F` exactly, evaluates
//! closed forms for its determinant, inverse, cofactor sum and q-Laplacian,
//! and checks each of them against brute-force rational linear algebra.

pub mod cli;
pub mod closed_forms;
pub mod edm;
pub mod error;
pub mod graph;
pub mod leaf;
pub mod matrix;
pub mod rational;
pub mod recognize;
pub mod verify;

pub use closed_forms::{
    aibj_det, aibj_inverse, cofsum_bi_block, cofsum_bi_block_with, cofsum_complete_bipartite, det_bi_block,
    det_complete_bipartite, inverse_bi_block, inverse_complete_bipartite, schur_complement, AibjForm, CofsumForm,
};
pub use edm::{
    aux_matrix_a, aux_matrix_b, build_bundle, exponential_matrix, mu_vector, q_laplacian, singularity_profile,
    x_vector, EdmBundle, SingularityProfile,
};
pub use error::{Error, Result};
pub use graph::{random_bi_block, Attachment, BiBlockGraph, BlockSpec, Membership, Side};
pub use leaf::{e_identity_check, leaf_block_triangularize, selector_identities, LeafBlockDecomposition, LeafSplit};
pub use matrix::{mat_equal, mat_mul, oracle_adjugate_sum, oracle_det, oracle_inverse, RationalMatrix};
pub use rational::{rat, Rational};
pub use recognize::{ingest_edge_list, RecognizedGraph};
pub use verify::{run_case, sweep, CheckCase, CheckKind, Outcome, SweepParams, SweepReport, VerificationReport};
