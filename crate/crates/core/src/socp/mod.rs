//! Primal-dual interior-point solver for standard-form second-order cone
//! programs:
//!
//! ```text
//! minimize    cᵀx
//! subject to  A x = b,   x ∈ K = K_1 × … × K_p
//! ```
//!
//! where each `K_k` is either the nonnegative ray (size 1) or a second-order
//! cone `{(u₀, ū) : ‖ū‖₂ ≤ u₀}`. The dual is `maximize bᵀy s.t. Aᵀy + s = c,
//! s ∈ K`.
//!
//! The method is Mehrotra's predictor-corrector with Nesterov–Todd scaling.
//! Newton systems are reduced to the normal equations `A W⁻² Aᵀ Δy = r` and
//! solved through a Householder QR of the scaled matrix `W⁻¹Aᵀ`, whose
//! triangular factor replaces the Cholesky factor of the normal matrix,
//! followed by iterative refinement on the full unreduced system.

mod cone;
mod ipm;
mod linsys;

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, Error, Result};

pub use cone::ConeLayout;
pub use ipm::solve;

/// A standard-form SOCP instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SocpProblem {
    c: DVector<f64>,
    a: DMatrix<f64>,
    b: DVector<f64>,
    cones: Vec<usize>,
}

impl SocpProblem {
    /// Validates shapes, cone sizes and finiteness.
    pub fn new(c: DVector<f64>, a: DMatrix<f64>, b: DVector<f64>, cones: Vec<usize>) -> Result<Self> {
        let (rows, cols) = a.shape();
        if c.len() != cols {
            return Err(Error::Malformed(format!(
                "objective has length {} but A has {cols} columns",
                c.len()
            )));
        }
        if b.len() != rows {
            return Err(Error::Malformed(format!(
                "right-hand side has length {} but A has {rows} rows",
                b.len()
            )));
        }
        if cones.contains(&0) {
            return Err(Error::Malformed("cone of size zero".into()));
        }
        let total: usize = cones.iter().sum();
        if total != cols {
            return Err(Error::Malformed(format!(
                "cone sizes sum to {total} but there are {cols} variables"
            )));
        }
        if cols == 0 {
            return Err(Error::Malformed("problem has no variables".into()));
        }
        if !(c.iter().all(|v| v.is_finite())
            && b.iter().all(|v| v.is_finite())
            && a.iter().all(|v| v.is_finite()))
        {
            return Err(Error::Malformed("non-finite problem data".into()));
        }
        Ok(Self { c, a, b, cones })
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn cones(&self) -> &[usize] {
        &self.cones
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.b.len()
    }

    /// Same constraints with `c` and `b` multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        Self::new(&self.c * alpha, self.a.clone(), &self.b * alpha, self.cones.clone())
    }
}

/// Termination state of [`solve`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    PrimalInfeasible,
    DualInfeasible,
    NumericalFailure,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::MaxIterations => "max_iterations",
            SolveStatus::PrimalInfeasible => "primal_infeasible",
            SolveStatus::DualInfeasible => "dual_infeasible",
            SolveStatus::NumericalFailure => "numerical_failure",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            SolveStatus::Optimal,
            SolveStatus::MaxIterations,
            SolveStatus::PrimalInfeasible,
            SolveStatus::DualInfeasible,
            SolveStatus::NumericalFailure,
        ]
        .into_iter()
        .find(|st| st.as_str() == s)
        .ok_or_else(|| format!("unknown solver status '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
}

/// Defaults sit three to four orders of magnitude below the 1e-8 recovery
/// threshold so that solver noise cannot decide a trial.
impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol_feas: 1e-12, tol_gap: 1e-12, max_iterations: 100, step_fraction: 0.99 }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_feas > 0.0 && self.tol_feas.is_finite()) {
            return Err(Error::Options(format!("tol_feas must be positive, got {}", self.tol_feas)));
        }
        if !(self.tol_gap > 0.0 && self.tol_gap.is_finite()) {
            return Err(Error::Options(format!("tol_gap must be positive, got {}", self.tol_gap)));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::Options(format!(
                "step_fraction must lie strictly inside (0, 1), got {}",
                self.step_fraction
            )));
        }
        Ok(())
    }
}

/// Per-iteration diagnostics, recorded before each step is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateSummary {
    pub iteration: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Complementarity `xᵀs / (number of cones)`.
    pub mu: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Step length taken from this iterate; zero for the final one.
    pub step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SocpSolution {
    pub x: DVector<f64>,
    pub y_dual: DVector<f64>,
    pub s: DVector<f64>,
    pub status: SolveStatus,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub trace: Vec<IterateSummary>,
}

impl SocpSolution {
    pub fn objective(&self, p: &SocpProblem) -> f64 {
        p.c().dot(&self.x)
    }
}

/// Scaled residuals of a candidate primal-dual point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `‖Ax − b‖ / (1 + ‖b‖)`
    pub primal: f64,
    /// `‖Aᵀy + s − c‖ / (1 + ‖c‖)`
    pub dual: f64,
    /// `xᵀs / (1 + |cᵀx|)`
    pub gap: f64,
}

/// Recomputes the scaled residuals of `(x, y, s)` against `p`.
pub fn residuals(p: &SocpProblem, x: &DVector<f64>, y: &DVector<f64>, s: &DVector<f64>) -> Result<Residuals> {
    if x.len() != p.num_vars() || s.len() != p.num_vars() || y.len() != p.num_constraints() {
        return dim_err(format!(
            "point of sizes (x {}, y {}, s {}) for problem with {} variables and {} constraints",
            x.len(),
            y.len(),
            s.len(),
            p.num_vars(),
            p.num_constraints()
        ));
    }
    let primal = (p.a() * x - p.b()).norm() / (1.0 + p.b().norm());
    let dual = (p.a().tr_mul(y) + s - p.c()).norm() / (1.0 + p.c().norm());
    let gap = x.dot(s) / (1.0 + p.c().dot(x).abs());
    Ok(Residuals { primal, dual, gap })
}

/// [`residuals`] for a solver result.
pub fn solution_residuals(p: &SocpProblem, sol: &SocpSolution) -> Result<Residuals> {
    residuals(p, &sol.x, &sol.y_dual, &sol.s)
}

/// Checks `v ∈ K` up to `tol`: `u₀ ≥ ‖ū‖ − tol` for second-order blocks and
/// `u ≥ −tol` for size-one blocks.
pub fn cone_membership(v: &[f64], cones: &[usize], tol: f64) -> Result<bool> {
    let total: usize = cones.iter().sum();
    if total != v.len() {
        return dim_err(format!("cone sizes sum to {total}, vector has length {}", v.len()));
    }
    let mut offset = 0;
    for &d in cones {
        let block = &v[offset..offset + d];
        offset += d;
        let ok = match d {
            1 => block[0] >= -tol,
            _ => block[0] >= block[1..].iter().map(|u| u * u).sum::<f64>().sqrt() - tol,
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
