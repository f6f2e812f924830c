//! End-to-end quaternion ℓ1 minimization: embed, solve, extract.

use std::time::{Duration, Instant};

use crate::embed::{build_socp, extract_solution};
use crate::error::{dim_err, Result};
use crate::quat::{NormOrder, QMatrix, QVector};
use crate::socp::{solve, SocpSolution, SolveStatus, SolverOptions};

/// Recovery counts as perfect when `‖x_r − x‖₂ ≤ 1e-8`.
pub const PERFECT_RECOVERY_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    pub x_recovered: QVector,
    /// `‖x_r − x_true‖₂`, present once a ground truth has been attached.
    pub error_l2: Option<f64>,
    pub solver_status: SolveStatus,
    /// `‖x_r‖₁` of the returned point.
    pub objective: f64,
    pub solve_time: Duration,
    /// Raw solver output, including the discarded `t` bounds.
    pub solution: SocpSolution,
}

impl RecoveryResult {
    /// Records and returns the ℓ2 error against a known signal.
    pub fn attach_truth(&mut self, x_true: &QVector) -> Result<f64> {
        let err = recovery_error(&self.x_recovered, x_true)?;
        self.error_l2 = Some(err);
        Ok(err)
    }
}

/// Solves `min ‖x‖₁ s.t. y = A·x`.
///
/// Non-optimal solver outcomes are not errors: the last iterate is returned
/// together with the status so callers can count failures.
pub fn l1_minimize(a: &QMatrix, y: &QVector, opts: &SolverOptions) -> Result<RecoveryResult> {
    let embedded = build_socp(a, y)?;
    let m = embedded.m;
    let problem = embedded.into_socp()?;
    let start = Instant::now();
    let solution = solve(&problem, opts)?;
    let solve_time = start.elapsed();
    let (x_recovered, _t) = extract_solution(solution.x.as_slice(), m)?;
    Ok(RecoveryResult {
        objective: x_recovered.norm(NormOrder::L1),
        x_recovered,
        error_l2: None,
        solver_status: solution.status,
        solve_time,
        solution,
    })
}

/// `‖x_r − x_true‖₂`.
pub fn recovery_error(x_r: &QVector, x_true: &QVector) -> Result<f64> {
    if x_r.len() != x_true.len() {
        return dim_err(format!("lengths {} and {}", x_r.len(), x_true.len()));
    }
    Ok(x_r.sub(x_true)?.norm(NormOrder::L2))
}

pub fn is_perfect(error: f64) -> bool {
    error <= PERFECT_RECOVERY_THRESHOLD
}
