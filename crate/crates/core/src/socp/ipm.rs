//! Mehrotra predictor-corrector iteration.

use nalgebra::{DMatrix, DVector};

use super::cone::{ConeLayout, NtScaling};
use super::linsys::TallQr;
use super::{cone_membership, IterateSummary, SocpProblem, SocpSolution, SolveStatus, SolverOptions};
use crate::error::Result;

/// Certificate threshold for infeasibility detection.
const TOL_INFEAS: f64 = 1e-8;
/// Window for the residual-stall infeasibility heuristic.
const STALL_WINDOW: usize = 10;
/// Complementarity may grow at most by this factor per accepted step.
const MU_GROWTH: f64 = 1.01;
const REFINE_STEPS: usize = 3;
const COMBINED_BACKTRACKS: usize = 2;
const CENTERED_BACKTRACKS: usize = 60;

/// Solves `p` from the central-ray cold start.
///
/// Malformed options are rejected with an error; every solver outcome,
/// including infeasibility and numerical breakdown, is reported through
/// [`SocpSolution::status`].
pub fn solve(p: &SocpProblem, opts: &SolverOptions) -> Result<SocpSolution> {
    opts.validate()?;
    let layout = ConeLayout::new(p.cones());

    if let Some(sol) = trivial_solution(p) {
        return Ok(sol);
    }

    let reduced = Presolved::new(p);
    let mut state = Ipm::new(p, &reduced, layout, *opts);
    if reduced.inconsistent {
        return Ok(state.finish(SolveStatus::PrimalInfeasible));
    }
    Ok(state.run())
}

/// `b = 0` with `c ∈ K`: `x = 0` is feasible and `(y, s) = (0, c)` certifies
/// it with zero gap.
fn trivial_solution(p: &SocpProblem) -> Option<SocpSolution> {
    if p.b().iter().any(|v| *v != 0.0) || !cone_membership(p.c().as_slice(), p.cones(), 0.0).ok()? {
        return None;
    }
    let n = p.num_vars();
    Some(SocpSolution {
        x: DVector::zeros(n),
        y_dual: DVector::zeros(p.num_constraints()),
        s: p.c().clone(),
        status: SolveStatus::Optimal,
        gap: 0.0,
        primal_residual: 0.0,
        dual_residual: 0.0,
        iterations: 0,
        trace: Vec::new(),
    })
}

/// Equality constraints with all-zero and exactly repeated rows removed.
struct Presolved {
    /// `Aᵀ` restricted to kept rows (`N × M'`), stored column-major so each
    /// kept constraint row is a contiguous column.
    at: DMatrix<f64>,
    b: DVector<f64>,
    /// Original index of each kept row.
    keep: Vec<usize>,
    /// How many original rows each kept row stands for.
    multiplicity: Vec<f64>,
    /// Norm of the original right-hand side.
    b_norm: f64,
    inconsistent: bool,
}

impl Presolved {
    fn new(p: &SocpProblem) -> Self {
        let full_t = p.a().transpose();
        let rows = p.num_constraints();
        let mut keep: Vec<usize> = Vec::with_capacity(rows);
        let mut multiplicity: Vec<f64> = Vec::with_capacity(rows);
        let mut inconsistent = false;
        'rows: for i in 0..rows {
            let row = full_t.column(i);
            if row.iter().all(|v| *v == 0.0) {
                inconsistent |= p.b()[i] != 0.0;
                continue;
            }
            for (slot, &k) in keep.iter().enumerate() {
                if full_t.column(k) == row {
                    inconsistent |= p.b()[k] != p.b()[i];
                    multiplicity[slot] += 1.0;
                    continue 'rows;
                }
            }
            keep.push(i);
            multiplicity.push(1.0);
        }
        let at = if keep.len() == rows { full_t } else { full_t.select_columns(&keep) };
        let b = DVector::from_iterator(keep.len(), keep.iter().map(|&i| p.b()[i]));
        Self { at, b, keep, multiplicity, b_norm: p.b().norm(), inconsistent }
    }

    /// Norm of the full-length residual vector given its kept-row entries.
    fn full_norm(&self, r: &DVector<f64>) -> f64 {
        r.iter().zip(&self.multiplicity).map(|(v, m)| m * v * v).sum::<f64>().sqrt()
    }
}

struct Ipm<'a> {
    p: &'a SocpProblem,
    red: &'a Presolved,
    layout: ConeLayout,
    opts: SolverOptions,
    x: DVector<f64>,
    y: DVector<f64>,
    s: DVector<f64>,
    trace: Vec<IterateSummary>,
    c_norm: f64,
}

/// Residual bookkeeping for the current iterate.
struct Measures {
    rp: DVector<f64>,
    rd: DVector<f64>,
    pres: f64,
    dres: f64,
    xs: f64,
    mu: f64,
    pobj: f64,
    dobj: f64,
}

/// Newton direction.
struct Direction {
    dx: DVector<f64>,
    dy: DVector<f64>,
    ds: DVector<f64>,
}

impl<'a> Ipm<'a> {
    fn new(p: &'a SocpProblem, red: &'a Presolved, layout: ConeLayout, opts: SolverOptions) -> Self {
        let n = p.num_vars();
        let mut e = vec![0.0; n];
        layout.identity(&mut e);
        let e = DVector::from_vec(e);
        Self {
            p,
            red,
            layout,
            opts,
            x: e.clone(),
            y: DVector::zeros(red.keep.len()),
            s: e,
            trace: Vec::new(),
            c_norm: p.c().norm(),
        }
    }

    fn measure(&self) -> Measures {
        let rp = &self.red.b - self.red.at.tr_mul(&self.x);
        let rd = self.p.c() - &self.red.at * &self.y - &self.s;
        let xs = self.x.dot(&self.s);
        let pobj = self.p.c().dot(&self.x);
        Measures {
            pres: self.red.full_norm(&rp) / (1.0 + self.red.b_norm),
            dres: rd.norm() / (1.0 + self.c_norm),
            mu: xs / self.layout.degree() as f64,
            dobj: self.red.b.dot(&self.y),
            rp,
            rd,
            xs,
            pobj,
        }
    }

    fn run(&mut self) -> SocpSolution {
        for iter in 0..=self.opts.max_iterations {
            let m = self.measure();
            if ![m.pres, m.dres, m.xs, m.pobj].iter().all(|v| v.is_finite()) {
                return self.finish(SolveStatus::NumericalFailure);
            }
            self.trace.push(IterateSummary {
                iteration: iter,
                primal_residual: m.pres,
                dual_residual: m.dres,
                mu: m.mu,
                primal_objective: m.pobj,
                dual_objective: m.dobj,
                step: 0.0,
            });

            if m.pres <= self.opts.tol_feas
                && m.dres <= self.opts.tol_feas
                && m.xs <= self.opts.tol_gap * m.pobj.abs().max(1.0)
            {
                return self.finish(SolveStatus::Optimal);
            }
            if iter == self.opts.max_iterations {
                break;
            }
            if let Some(status) = self.detect_infeasibility(&m) {
                return self.finish(status);
            }

            match self.step(&m) {
                Some(alpha) => self.trace.last_mut().expect("pushed above").step = alpha,
                None => return self.finish(SolveStatus::NumericalFailure),
            }
        }
        self.finish(SolveStatus::MaxIterations)
    }

    fn detect_infeasibility(&self, m: &Measures) -> Option<SolveStatus> {
        // Farkas-type certificates read off diverging iterates.
        if m.dobj > 0.0 {
            let at_y_s = &self.red.at * &self.y + &self.s;
            if at_y_s.norm() <= TOL_INFEAS * m.dobj {
                return Some(SolveStatus::PrimalInfeasible);
            }
        }
        if m.pobj < 0.0 {
            let ax = self.red.at.tr_mul(&self.x);
            if self.red.full_norm(&ax) <= TOL_INFEAS * -m.pobj {
                return Some(SolveStatus::DualInfeasible);
            }
        }
        // Residual stall while complementarity keeps moving.
        let k = self.trace.len();
        if k > STALL_WINDOW {
            let then = &self.trace[k - 1 - STALL_WINDOW];
            let now = &self.trace[k - 1];
            let stalled = |before: f64, after: f64, tol: f64| after > tol.sqrt() && after > 0.5 * before;
            if stalled(then.primal_residual, now.primal_residual, self.opts.tol_feas) {
                return Some(SolveStatus::PrimalInfeasible);
            }
            if stalled(then.dual_residual, now.dual_residual, self.opts.tol_feas) {
                return Some(SolveStatus::DualInfeasible);
            }
        }
        None
    }

    /// One predictor-corrector step. Returns the step length, or `None` on
    /// numerical breakdown.
    fn step(&mut self, m: &Measures) -> Option<f64> {
        let n = self.x.len();
        let w = NtScaling::new(&self.layout, self.x.as_slice(), self.s.as_slice())?;
        let mut lambda = vec![0.0; n];
        w.scaled_point(self.x.as_slice(), &mut lambda);

        // G = W⁻¹ Aᵀ, so the normal matrix is GᵀG
        let mut g = self.red.at.clone();
        w.apply_inv_columns(&mut g);
        let qr = TallQr::new(g)?;
        let sys = Kkt { at: &self.red.at, w: &w, qr: &qr };

        // predictor: λ∘(W dx + W⁻¹ ds) = −λ∘λ
        let d_aff = DVector::from_iterator(n, lambda.iter().map(|v| -v));
        let aff = sys.solve(&m.rp, &m.rd, &d_aff)?;
        let (wdx_a, winv_ds_a) = scaled(&w, &aff);
        let alpha_aff = self
            .layout
            .max_step(&lambda, wdx_a.as_slice())
            .min(self.layout.max_step(&lambda, winv_ds_a.as_slice()))
            .min(1.0);
        let sigma = (1.0 - alpha_aff).clamp(0.0, 1.0).powi(3);

        // corrector: λ∘(W dx + W⁻¹ ds) = −λ∘λ − (W⁻¹ds_a)∘(W dx_a) + σμe
        let mut second_order = vec![0.0; n];
        self.layout.product(winv_ds_a.as_slice(), wdx_a.as_slice(), &mut second_order);
        let combined = self.centered_direction(&sys, m, &lambda, sigma, Some(&second_order))?;
        if let Some(alpha) = self.try_step(&w, &lambda, &combined, m.mu, COMBINED_BACKTRACKS) {
            return Some(alpha);
        }
        // The second-order term can push complementarity up far from the
        // central path; fall back to the plain centered Newton step.
        let sigma = sigma.clamp(0.1, 0.9);
        let centered = self.centered_direction(&sys, m, &lambda, sigma, None)?;
        self.try_step(&w, &lambda, &centered, m.mu, CENTERED_BACKTRACKS)
    }

    /// Newton direction towards `σμe` with residuals scaled by `1 − σ`,
    /// optionally including the Mehrotra second-order term.
    fn centered_direction(
        &self,
        sys: &Kkt<'_>,
        m: &Measures,
        lambda: &[f64],
        sigma: f64,
        second_order: Option<&[f64]>,
    ) -> Option<Direction> {
        let n = lambda.len();
        let mut target = vec![0.0; n];
        self.layout.identity(&mut target);
        for (k, t) in target.iter_mut().enumerate() {
            *t = sigma * m.mu * *t - second_order.map_or(0.0, |so| so[k]);
        }
        let mut correction = vec![0.0; n];
        self.layout.divide(lambda, &target, &mut correction);
        let d = DVector::from_iterator(n, lambda.iter().zip(&correction).map(|(l, c)| c - l));
        sys.solve(&(&m.rp * (1.0 - sigma)), &(&m.rd * (1.0 - sigma)), &d)
    }

    /// Fraction-to-boundary step along `dir`, halved at most `backtracks`
    /// times while complementarity would grow by more than [`MU_GROWTH`].
    /// Commits the step and returns its length on success.
    fn try_step(
        &mut self,
        w: &NtScaling,
        lambda: &[f64],
        dir: &Direction,
        mu: f64,
        backtracks: usize,
    ) -> Option<f64> {
        let (wdx, winv_ds) = scaled(w, dir);
        let alpha_max = self
            .layout
            .max_step(lambda, wdx.as_slice())
            .min(self.layout.max_step(lambda, winv_ds.as_slice()));
        let mut alpha = (self.opts.step_fraction * alpha_max).min(1.0);
        let degree = self.layout.degree() as f64;
        for _ in 0..=backtracks {
            if !(alpha > 0.0 && alpha.is_finite()) {
                return None;
            }
            let x_new = &self.x + &dir.dx * alpha;
            let s_new = &self.s + &dir.ds * alpha;
            let mu_new = x_new.dot(&s_new) / degree;
            if mu_new <= MU_GROWTH * mu
                && self.layout.is_interior(x_new.as_slice())
                && self.layout.is_interior(s_new.as_slice())
            {
                self.x = x_new;
                self.s = s_new;
                self.y += &dir.dy * alpha;
                return Some(alpha);
            }
            alpha *= 0.5;
        }
        None
    }

    fn finish(&self, status: SolveStatus) -> SocpSolution {
        let m = self.measure();
        let mut y_full = DVector::zeros(self.p.num_constraints());
        for (slot, &i) in self.red.keep.iter().enumerate() {
            y_full[i] = self.y[slot];
        }
        SocpSolution {
            x: self.x.clone(),
            y_dual: y_full,
            s: self.s.clone(),
            status,
            gap: m.xs / (1.0 + m.pobj.abs()),
            primal_residual: m.pres,
            dual_residual: m.dres,
            iterations: self.trace.len().saturating_sub(1),
            trace: self.trace.clone(),
        }
    }
}

fn scaled(w: &NtScaling, dir: &Direction) -> (DVector<f64>, DVector<f64>) {
    let n = dir.dx.len();
    let mut wdx = DVector::zeros(n);
    let mut winv_ds = DVector::zeros(n);
    w.apply(dir.dx.as_slice(), wdx.as_mut_slice());
    w.apply_inv(dir.ds.as_slice(), winv_ds.as_mut_slice());
    (wdx, winv_ds)
}

/// The Newton system
///
/// ```text
/// A dx            = rp
/// Aᵀdy + ds       = rd
/// W dx + W⁻¹ ds   = d
/// ```
///
/// reduced to `(A W⁻² Aᵀ) dy = rp + A W⁻¹ (W⁻¹ rd − d)`.
struct Kkt<'a> {
    at: &'a DMatrix<f64>,
    w: &'a NtScaling,
    qr: &'a TallQr,
}

impl Kkt<'_> {
    /// With `q = W⁻¹rd − d` and `G = Q[R; 0]`, the normal equations read
    /// `RᵀR dy = rp + Gᵀq` and `W dx = G dy − q = Q[R⁻ᵀrp; −(Qᵀq)₂]`. The
    /// last form avoids the cancellation in `G dy − q`.
    fn solve_reduced(&self, rp: &DVector<f64>, rd: &DVector<f64>, d: &DVector<f64>) -> Direction {
        let n = rd.len();
        let k = rp.len();
        let mut q = DVector::zeros(n);
        self.w.apply_inv(rd.as_slice(), q.as_mut_slice());
        q -= d;
        self.qr.apply_qt(q.as_mut_slice());

        let mut z = rp.clone();
        self.qr.solve_rt(z.as_mut_slice());
        let mut dy = &z + q.rows(0, k);
        self.qr.solve_r(dy.as_mut_slice());

        let mut u = -q;
        u.rows_mut(0, k).copy_from(&z);
        self.qr.apply_q(u.as_mut_slice());
        let mut dx = DVector::zeros(n);
        self.w.apply_inv(u.as_slice(), dx.as_mut_slice());
        let ds = rd - self.at * &dy;
        Direction { dx, dy, ds }
    }

    /// Reduced solve followed by iterative refinement against the full
    /// system.
    fn solve(&self, rp: &DVector<f64>, rd: &DVector<f64>, d: &DVector<f64>) -> Option<Direction> {
        let mut dir = self.solve_reduced(rp, rd, d);
        let mut err = self.residual(&dir, rp, rd, d);
        let mut err_norm = norm3(&err);
        let scale = 1.0 + rp.norm() + rd.norm() + d.norm();
        for _ in 0..REFINE_STEPS {
            if err_norm <= 1e-15 * scale {
                break;
            }
            let corr = self.solve_reduced(&err.0, &err.1, &err.2);
            let cand = Direction {
                dx: &dir.dx + &corr.dx,
                dy: &dir.dy + &corr.dy,
                ds: &dir.ds + &corr.ds,
            };
            let cand_err = self.residual(&cand, rp, rd, d);
            let cand_norm = norm3(&cand_err);
            if cand_norm.is_nan() || cand_norm >= err_norm {
                break;
            }
            dir = cand;
            err = cand_err;
            err_norm = cand_norm;
        }
        let finite = |v: &DVector<f64>| v.iter().all(|x| x.is_finite());
        (finite(&dir.dx) && finite(&dir.dy) && finite(&dir.ds)).then_some(dir)
    }

    fn residual(
        &self,
        dir: &Direction,
        rp: &DVector<f64>,
        rd: &DVector<f64>,
        d: &DVector<f64>,
    ) -> (DVector<f64>, DVector<f64>, DVector<f64>) {
        let n = rd.len();
        let e1 = rp - self.at.tr_mul(&dir.dx);
        let e2 = rd - self.at * &dir.dy - &dir.ds;
        let mut wdx = DVector::zeros(n);
        let mut winv_ds = DVector::zeros(n);
        self.w.apply(dir.dx.as_slice(), wdx.as_mut_slice());
        self.w.apply_inv(dir.ds.as_slice(), winv_ds.as_mut_slice());
        let e3 = d - wdx - winv_ds;
        (e1, e2, e3)
    }
}

fn norm3(e: &(DVector<f64>, DVector<f64>, DVector<f64>)) -> f64 {
    (e.0.norm_squared() + e.1.norm_squared() + e.2.norm_squared()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem(c: &[f64], a_rows: usize, a: &[f64], b: &[f64], cones: Vec<usize>) -> SocpProblem {
        SocpProblem::new(
            DVector::from_column_slice(c),
            DMatrix::from_row_slice(a_rows, c.len(), a),
            DVector::from_column_slice(b),
            cones,
        )
        .unwrap()
    }

    #[test]
    fn presolve_drops_zero_and_duplicate_rows() {
        let p = problem(
            &[1.0, 0.0, 0.0],
            4,
            &[0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0],
            &[1.0, 0.0, 2.0, 2.0],
            vec![3],
        );
        let red = Presolved::new(&p);
        assert_eq!(red.keep, vec![0, 2]);
        assert_eq!(red.multiplicity, vec![1.0, 2.0]);
        assert!(!red.inconsistent);
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert!((sol.objective(&p) - 5f64.sqrt()).abs() < 1e-8);
        assert_eq!(sol.y_dual[1], 0.0);
    }

    #[test]
    fn inconsistent_rows_are_infeasible() {
        let p = problem(&[1.0, 0.0], 2, &[0.0, 1.0, 0.0, 1.0], &[1.0, 2.0], vec![2]);
        assert_eq!(solve(&p, &SolverOptions::default()).unwrap().status, SolveStatus::PrimalInfeasible);
        let p = problem(&[1.0, 0.0], 1, &[0.0, 0.0], &[1.0], vec![2]);
        assert_eq!(solve(&p, &SolverOptions::default()).unwrap().status, SolveStatus::PrimalInfeasible);
    }

    #[test]
    fn zero_rhs_short_circuits() {
        let p = problem(&[1.0, 0.0, 0.0], 1, &[0.0, 1.0, 1.0], &[0.0], vec![3]);
        let sol = solve(&p, &SolverOptions::default()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        assert_eq!(sol.iterations, 0);
        assert!(sol.x.iter().all(|v| *v == 0.0));
    }
}
