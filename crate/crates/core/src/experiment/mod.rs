//! Planted-sparse recovery trials and phase-transition sweeps.
//!
//! One trial draws a Gaussian quaternion measurement matrix `A` (n×m), a
//! signal `x` with `s` Gaussian entries on a uniformly random support, sets
//! `y = A·x`, solves the ℓ1 problem and checks `‖x_r − x‖₂ ≤ 1e-8`. A sweep
//! repeats this over an `(n, s)` grid.
//!
//! Quaternion Gaussian entries have four independent real components of
//! variance 1/4 each, so `E|q|² = 1`.

mod rng;

use std::time::Duration;

use rayon::prelude::*;

pub use rng::{trial_seed, GaussianSource};

use crate::error::{Error, Result};
use crate::quat::{QMatrix, QVector, Quaternion};
use crate::recover::{is_perfect, l1_minimize};
use crate::socp::{SolveStatus, SolverOptions};

/// Per-component standard deviation of a unit-variance quaternion Gaussian.
const COMPONENT_SD: f64 = 0.5;

fn gaussian_quaternion(rng: &mut GaussianSource) -> Quaternion {
    let c: [f64; 4] = std::array::from_fn(|_| COMPONENT_SD * rng.normal());
    Quaternion::from_components(c).expect("Box-Muller variates are finite")
}

/// Random `n × m` quaternion matrix with i.i.d. unit-variance entries.
pub fn gen_measurement_matrix(n: usize, m: usize, rng: &mut GaussianSource) -> Result<QMatrix> {
    if n == 0 || n > m {
        return Err(Error::Grid(format!("measurement matrix needs 1 <= n <= m, got n={n}, m={m}")));
    }
    Ok(QMatrix::from_fn(n, m, |_, _| gaussian_quaternion(rng)))
}

/// Length-`m` signal with exactly `s` Gaussian entries on a uniformly chosen
/// support (returned sorted); all other entries are zero.
pub fn gen_sparse_signal(m: usize, s: usize, rng: &mut GaussianSource) -> Result<(QVector, Vec<usize>)> {
    if s > m {
        return Err(Error::Grid(format!("sparsity {s} exceeds signal length {m}")));
    }
    // partial Fisher-Yates: the first s slots become the support
    let mut idx: Vec<usize> = (0..m).collect();
    for i in 0..s {
        let j = rng.index_in(i, m);
        idx.swap(i, j);
    }
    let mut support = idx[..s].to_vec();
    support.sort_unstable();
    let mut entries = vec![Quaternion::ZERO; m];
    for &r in &support {
        entries[r] = gaussian_quaternion(rng);
    }
    Ok((QVector::new(entries), support))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TrialSpec {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub seed: u64,
}

impl TrialSpec {
    /// Requires `1 <= n <= m` and `s <= m`.
    pub fn new(m: usize, n: usize, s: usize, seed: u64) -> Result<Self> {
        let spec = Self { m, n, s, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > self.m {
            return Err(Error::Grid(format!("need 1 <= n <= m, got n={}, m={}", self.n, self.m)));
        }
        if self.s > self.m {
            return Err(Error::Grid(format!("need s <= m, got s={}, m={}", self.s, self.m)));
        }
        Ok(())
    }
}

/// A generated trial: matrix, planted signal, its support and measurements.
#[derive(Debug, Clone)]
pub struct RecoveryInstance {
    pub spec: TrialSpec,
    pub a: QMatrix,
    pub x: QVector,
    pub support: Vec<usize>,
    pub y: QVector,
}

impl RecoveryInstance {
    /// Draws `A` then `x` from a generator seeded with `spec.seed`.
    pub fn generate(spec: TrialSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = GaussianSource::new(spec.seed);
        let a = gen_measurement_matrix(spec.n, spec.m, &mut rng)?;
        let (x, support) = gen_sparse_signal(spec.m, spec.s, &mut rng)?;
        let y = a.mul_vec(&x)?;
        Ok(Self { spec, a, x, support, y })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub spec: TrialSpec,
    pub error_l2: f64,
    /// `is_perfect(error_l2)` for optimal solves, `false` otherwise.
    pub perfect: bool,
    pub solver_status: SolveStatus,
    pub objective: f64,
    pub iterations: usize,
    pub solve_time: Duration,
}

/// Generates and solves one planted instance.
pub fn run_trial(spec: TrialSpec, opts: &SolverOptions) -> Result<TrialResult> {
    let inst = RecoveryInstance::generate(spec)?;
    let mut res = l1_minimize(&inst.a, &inst.y, opts)?;
    let error_l2 = res.attach_truth(&inst.x)?;
    Ok(TrialResult {
        spec,
        error_l2,
        perfect: res.solver_status == SolveStatus::Optimal && is_perfect(error_l2),
        solver_status: res.solver_status,
        objective: res.objective,
        iterations: res.solution.iterations,
        solve_time: res.solve_time,
    })
}

/// Grid of `(n, s)` cells to sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRequest {
    pub m: usize,
    pub n_values: Vec<usize>,
    pub s_values: Vec<usize>,
    pub trials_per_cell: usize,
    pub base_seed: u64,
}

impl SweepRequest {
    /// Sorts and de-duplicates the axes, then checks every cell is a valid
    /// [`TrialSpec`].
    pub fn new(
        m: usize,
        mut n_values: Vec<usize>,
        mut s_values: Vec<usize>,
        trials_per_cell: usize,
        base_seed: u64,
    ) -> Result<Self> {
        n_values.sort_unstable();
        n_values.dedup();
        s_values.sort_unstable();
        s_values.dedup();
        let req = Self { m, n_values, s_values, trials_per_cell, base_seed };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() || self.s_values.is_empty() {
            return Err(Error::Grid("empty n or s list".into()));
        }
        if self.trials_per_cell == 0 {
            return Err(Error::Grid("trials per cell must be at least 1".into()));
        }
        if !self.n_values.windows(2).all(|w| w[0] < w[1]) || !self.s_values.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Grid("grid axes must be strictly increasing".into()));
        }
        for &n in &self.n_values {
            for &s in &self.s_values {
                TrialSpec::new(self.m, n, s, 0)?;
            }
        }
        Ok(())
    }

    pub fn spec(&self, n: usize, s: usize, trial: usize) -> TrialSpec {
        TrialSpec { m: self.m, n, s, seed: trial_seed(self.base_seed, self.m, n, s, trial) }
    }

    /// Runs the trials of a single cell.
    pub fn run_cell(&self, n: usize, s: usize, opts: &SolverOptions) -> Result<Vec<TrialResult>> {
        (0..self.trials_per_cell)
            .into_par_iter()
            .map(|t| run_trial(self.spec(n, s, t), opts))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub n: usize,
    pub s: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_error: f64,
    pub mean_solve_ms: f64,
}

impl CellSummary {
    pub fn from_trials(n: usize, s: usize, trials: &[TrialResult]) -> Self {
        let count = trials.len();
        let successes = trials.iter().filter(|t| t.perfect).count();
        let denom = count.max(1) as f64;
        Self {
            n,
            s,
            trials: count,
            successes,
            success_rate: successes as f64 / denom,
            mean_error: trials.iter().map(|t| t.error_l2).sum::<f64>() / denom,
            mean_solve_ms: trials.iter().map(|t| t.solve_time.as_secs_f64() * 1e3).sum::<f64>() / denom,
        }
    }
}

/// Success-rate table over `n_values × s_values`.
#[derive(Debug, Clone)]
pub struct SweepGrid {
    pub m: usize,
    pub n_values: Vec<usize>,
    pub s_values: Vec<usize>,
    pub trials_per_cell: usize,
    pub base_seed: u64,
    /// Row-major by `n`, then `s`.
    pub success_rate: Vec<f64>,
    /// One summary per cell in the same order as `success_rate`.
    pub cells: Vec<CellSummary>,
    /// Every trial, grouped by cell in the same order.
    pub trials: Vec<TrialResult>,
}

impl SweepGrid {
    pub fn rate(&self, n: usize, s: usize) -> Option<f64> {
        let i = self.n_values.binary_search(&n).ok()?;
        let j = self.s_values.binary_search(&s).ok()?;
        Some(self.success_rate[i * self.s_values.len() + j])
    }

    pub fn cell(&self, n: usize, s: usize) -> Option<&CellSummary> {
        let i = self.n_values.binary_search(&n).ok()?;
        let j = self.s_values.binary_search(&s).ok()?;
        self.cells.get(i * self.s_values.len() + j)
    }
}

/// Runs every cell of `req`. Trials run in parallel on the current rayon
/// pool; each is seeded independently, so the result does not depend on
/// scheduling.
pub fn sweep(req: &SweepRequest, opts: &SolverOptions) -> Result<SweepGrid> {
    req.validate()?;
    opts.validate()?;
    let cells: Vec<(usize, usize)> = req
        .n_values
        .iter()
        .flat_map(|&n| req.s_values.iter().map(move |&s| (n, s)))
        .collect();
    let jobs: Vec<TrialSpec> = cells
        .iter()
        .flat_map(|&(n, s)| (0..req.trials_per_cell).map(move |t| req.spec(n, s, t)))
        .collect();
    let trials: Vec<TrialResult> =
        jobs.into_par_iter().map(|spec| run_trial(spec, opts)).collect::<Result<_>>()?;

    let summaries: Vec<CellSummary> = cells
        .iter()
        .zip(trials.chunks(req.trials_per_cell))
        .map(|(&(n, s), chunk)| CellSummary::from_trials(n, s, chunk))
        .collect();
    Ok(SweepGrid {
        m: req.m,
        n_values: req.n_values.clone(),
        s_values: req.s_values.clone(),
        trials_per_cell: req.trials_per_cell,
        base_seed: req.base_seed,
        success_rate: summaries.iter().map(|c| c.success_rate).collect(),
        cells: summaries,
        trials,
    })
}

/// The `(s, rate)` row of the grid at measurement count `n`.
pub fn cross_section(grid: &SweepGrid, n: usize) -> Result<Vec<(usize, f64)>> {
    let i = grid
        .n_values
        .binary_search(&n)
        .map_err(|_| Error::Grid(format!("n = {n} is not in the grid")))?;
    let width = grid.s_values.len();
    Ok(grid
        .s_values
        .iter()
        .copied()
        .zip(grid.success_rate[i * width..(i + 1) * width].iter().copied())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_shape_and_determinism() {
        let a = gen_measurement_matrix(4, 16, &mut GaussianSource::new(3)).unwrap();
        assert_eq!((a.rows(), a.cols()), (4, 16));
        let b = gen_measurement_matrix(4, 16, &mut GaussianSource::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(gen_measurement_matrix(0, 16, &mut GaussianSource::new(3)).is_err());
        assert!(gen_measurement_matrix(17, 16, &mut GaussianSource::new(3)).is_err());
    }

    #[test]
    fn matrix_entries_have_unit_power() {
        // |q|² = χ²₄/4 has mean 1 and variance 1/2; over 10⁴ entries the
        // sample mean has standard deviation ≈ 0.0071, so ±0.06 is > 8σ.
        let a = gen_measurement_matrix(100, 100, &mut GaussianSource::new(11)).unwrap();
        let mean = a.as_slice().iter().map(Quaternion::norm_sqr).sum::<f64>() / 1e4;
        assert!((0.94..=1.06).contains(&mean), "mean |q|^2 = {mean}");
    }

    #[test]
    fn sparse_signal_support() {
        let mut rng = GaussianSource::new(5);
        let (x, support) = gen_sparse_signal(10, 0, &mut rng).unwrap();
        assert_eq!(x, QVector::zeros(10));
        assert!(support.is_empty());
        let (x, support) = gen_sparse_signal(10, 10, &mut rng).unwrap();
        assert_eq!(support, (0..10).collect::<Vec<_>>());
        assert_eq!(x.count_nonzero(), 10);
        let (x, support) = gen_sparse_signal(256, 60, &mut rng).unwrap();
        assert_eq!(x.count_nonzero(), 60);
        assert_eq!(support.len(), 60);
        assert!(support.iter().all(|&r| !x[r].is_zero()));
        assert!(gen_sparse_signal(4, 5, &mut rng).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(TrialSpec::new(16, 12, 2, 0).is_ok());
        assert!(TrialSpec::new(16, 0, 2, 0).is_err());
        assert!(TrialSpec::new(16, 17, 2, 0).is_err());
        assert!(TrialSpec::new(16, 4, 17, 0).is_err());
        assert!(TrialSpec::new(16, 4, 0, 0).is_ok());
    }

    #[test]
    fn request_validation() {
        assert!(SweepRequest::new(16, vec![], vec![1], 1, 0).is_err());
        assert!(SweepRequest::new(16, vec![4], vec![1], 0, 0).is_err());
        assert!(SweepRequest::new(16, vec![20], vec![1], 1, 0).is_err());
        let req = SweepRequest::new(16, vec![8, 4, 8], vec![2, 1], 1, 0).unwrap();
        assert_eq!(req.n_values, vec![4, 8]);
        assert_eq!(req.s_values, vec![1, 2]);
    }

    #[test]
    fn zero_sparsity_trial_is_exact() {
        let res = run_trial(TrialSpec::new(16, 4, 0, 42).unwrap(), &SolverOptions::default()).unwrap();
        assert!(res.perfect);
        assert_eq!(res.error_l2, 0.0);
    }

    #[test]
    fn cross_section_reads_rows() {
        let req = SweepRequest::new(8, vec![4, 6], vec![0, 1, 2], 2, 9).unwrap();
        let grid = sweep(&req, &SolverOptions::default()).unwrap();
        for &n in &grid.n_values {
            let row = cross_section(&grid, n).unwrap();
            assert_eq!(row.len(), grid.s_values.len());
            for (s, rate) in row {
                assert_eq!(Some(rate), grid.rate(n, s));
                assert!((0.0..=1.0).contains(&rate));
            }
        }
        assert!(cross_section(&grid, 5).is_err());
        assert_eq!(grid.rate(4, 0), Some(1.0));
    }
}
