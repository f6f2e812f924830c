//! Quaternion ℓ1-norm minimization.
//!
//! Solves `min ‖x‖₁ s.t. y = A·x` over quaternion vectors by rewriting it as
//! a second-order cone program in real variables and running a built-in
//! primal-dual interior-point solver. The [`experiment`] module generates
//! random Gaussian quaternion instances with planted sparse signals and
//! measures recovery rates across sparsity and measurement counts.
//!
//! ```
//! use quatl1::{l1_minimize, QMatrix, QVector, Quaternion, SolverOptions};
//!
//! let a = QMatrix::identity(2);
//! let y = QVector::new(vec![Quaternion::I, Quaternion::new(0.5, 0.0, 2.0, 0.0).unwrap()]);
//! let res = l1_minimize(&a, &y, &SolverOptions::default()).unwrap();
//! assert!(res.x_recovered.sub(&y).unwrap().lp_norm(2).unwrap() < 1e-8);
//! ```

pub mod embed;
pub mod error;
pub mod experiment;
pub mod quat;
pub mod recover;
pub mod socp;

pub use embed::{build_socp, embed_vec4, extract_solution, interleave, left_mult_block, EmbeddedProblem};
pub use error::{Error, Result};
pub use experiment::{
    cross_section, gen_measurement_matrix, gen_sparse_signal, run_trial, sweep, trial_seed, CellSummary,
    GaussianSource, RecoveryInstance, SweepGrid, SweepRequest, TrialResult, TrialSpec,
};
pub use quat::{NormOrder, QMatrix, QVector, Quaternion};
pub use recover::{is_perfect, l1_minimize, recovery_error, RecoveryResult, PERFECT_RECOVERY_THRESHOLD};
pub use socp::{
    cone_membership, residuals, solution_residuals, solve, IterateSummary, Residuals, SocpProblem, SocpSolution,
    SolveStatus, SolverOptions,
};
