//! The filtered update rewritten as row-stochastic dynamics over regular
//! agents only, together with the transition products, their limiting
//! weight vectors and the consensus surrogate built from them.

mod matrix;
mod trace;
mod weights;

pub use matrix::{
    build_all_matrices, build_equivalent_row, build_matrix, equivalence_residual, EquivalentMatrix,
    MatrixDiagnostics,
};
pub use trace::{consensus_trace, estimate_theta, log_sum_constants, zeta_bound, ConsensusTrace};
pub use weights::{estimate_all_q, estimate_q, forward_spreads, phi_product, row_spread, WeightEstimate};
