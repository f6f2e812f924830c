//! Blocked Householder QR of a tall matrix `G`, used for the normal equations
//! `GᵀG Δy = r` without forming `GᵀG`. Forming the product squares the
//! condition number, which near an interior-point solution exceeds what
//! double precision can carry. Keeping the orthogonal factor also lets the
//! primal step be assembled without cancellation.

use nalgebra::DMatrix;
#[cfg(test)]
use nalgebra::DVector;

/// Panel width of the blocked factorization.
const BLOCK: usize = 32;
/// Diagonal entries of `R` are kept at least this fraction of the largest.
const DIAG_FLOOR: f64 = 1e-14;

/// `G = Q [R; 0]` in compact form: `R` on and above the diagonal, the
/// Householder vectors (with implicit unit heads) below it.
#[derive(Debug, Clone)]
pub struct TallQr {
    qr: DMatrix<f64>,
    taus: Vec<f64>,
}

impl TallQr {
    /// Factors `g` (`rows ≥ cols`). Returns `None` on non-finite or wide
    /// input.
    pub fn new(mut g: DMatrix<f64>) -> Option<Self> {
        let (rows, cols) = g.shape();
        if rows < cols || g.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut taus = vec![0.0; cols];
        let mut k = 0;
        while k < cols {
            let b = BLOCK.min(cols - k);
            factor_panel(&mut g, k, b, &mut taus[k..k + b]);
            if k + b < cols {
                apply_block_reflector(&mut g, k, b, &taus[k..k + b]);
            }
            k += b;
        }
        let max_diag = (0..cols).map(|j| g[(j, j)].abs()).fold(0.0, f64::max);
        let floor = DIAG_FLOOR * max_diag.max(1.0);
        for j in 0..cols {
            let d = g[(j, j)];
            if d.abs() < floor {
                g[(j, j)] = if d < 0.0 { -floor } else { floor };
            }
        }
        Some(Self { qr: g, taus })
    }

    pub fn rows(&self) -> usize {
        self.qr.nrows()
    }

    pub fn cols(&self) -> usize {
        self.qr.ncols()
    }

    /// `v ← Qᵀ v`.
    pub fn apply_qt(&self, v: &mut [f64]) {
        for j in 0..self.cols() {
            self.reflect(j, v);
        }
    }

    /// `v ← Q v`.
    pub fn apply_q(&self, v: &mut [f64]) {
        for j in (0..self.cols()).rev() {
            self.reflect(j, v);
        }
    }

    fn reflect(&self, j: usize, v: &mut [f64]) {
        let tau = self.taus[j];
        if tau == 0.0 {
            return;
        }
        let rows = self.rows();
        let h = &self.qr.as_slice()[j * rows + j + 1..(j + 1) * rows];
        let target = &mut v[j..rows];
        let w = tau * (target[0] + h.iter().zip(&target[1..]).map(|(a, b)| a * b).sum::<f64>());
        target[0] -= w;
        for (t, hi) in target[1..].iter_mut().zip(h) {
            *t -= w * hi;
        }
    }

    /// `x ← R⁻ᵀ x`.
    pub fn solve_rt(&self, x: &mut [f64]) {
        let (rows, n) = self.qr.shape();
        let r = self.qr.as_slice();
        for j in 0..n {
            let s: f64 = r[j * rows..j * rows + j].iter().zip(&x[..j]).map(|(a, b)| a * b).sum();
            x[j] = (x[j] - s) / r[j + j * rows];
        }
    }

    /// `x ← R⁻¹ x`.
    pub fn solve_r(&self, x: &mut [f64]) {
        let (rows, n) = self.qr.shape();
        let r = self.qr.as_slice();
        for j in (0..n).rev() {
            x[j] /= r[j + j * rows];
            let xj = x[j];
            for (xi, rij) in x[..j].iter_mut().zip(&r[j * rows..j * rows + j]) {
                *xi -= rij * xj;
            }
        }
    }

    #[cfg(test)]
    pub fn r(&self) -> DMatrix<f64> {
        self.qr.rows(0, self.cols()).upper_triangle()
    }
}

/// Unblocked Householder on columns `k..k+b`, rows `k..`.
fn factor_panel(g: &mut DMatrix<f64>, k: usize, b: usize, taus: &mut [f64]) {
    let rows = g.nrows();
    for (jj, slot) in taus.iter_mut().enumerate().take(b) {
        let j = k + jj;
        let tau = householder(&mut g.as_mut_slice()[j * rows + j..(j + 1) * rows]);
        *slot = tau;
        if tau == 0.0 {
            continue;
        }
        let (left, right) = g.as_mut_slice().split_at_mut((j + 1) * rows);
        let h = &left[j * rows + j + 1..];
        for c in 0..k + b - j - 1 {
            let target = &mut right[c * rows + j..(c + 1) * rows];
            let w = tau * (target[0] + h.iter().zip(&target[1..]).map(|(a, b)| a * b).sum::<f64>());
            target[0] -= w;
            for (t, hi) in target[1..].iter_mut().zip(h) {
                *t -= w * hi;
            }
        }
    }
}

/// Reflector annihilating `x[1..]`. Overwrites `x[0]` with `β` and `x[1..]`
/// with the reflector tail; returns `τ`.
fn householder(x: &mut [f64]) -> f64 {
    let alpha = x[0];
    let tail_norm = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
    if tail_norm == 0.0 {
        return 0.0;
    }
    let norm = alpha.hypot(tail_norm);
    let beta = if alpha >= 0.0 { -norm } else { norm };
    let scale = 1.0 / (alpha - beta);
    for v in &mut x[1..] {
        *v *= scale;
    }
    x[0] = beta;
    (beta - alpha) / beta
}

/// Applies `(I − V T Vᵀ)ᵀ` for the panel at `k..k+b` to the trailing columns.
fn apply_block_reflector(g: &mut DMatrix<f64>, k: usize, b: usize, taus: &[f64]) {
    let (rows, cols) = g.shape();
    let height = rows - k;

    let mut v = DMatrix::zeros(height, b);
    for jj in 0..b {
        v[(jj, jj)] = 1.0;
        for i in jj + 1..height {
            v[(i, jj)] = g[(k + i, k + jj)];
        }
    }
    let vt = v.transpose();
    let gram = &vt * &v;
    // T upper triangular: T[..j, j] = −τ_j T[..j, ..j] Vᵀ[..j] v_j
    let mut t = DMatrix::zeros(b, b);
    for j in 0..b {
        t[(j, j)] = taus[j];
        if j == 0 || taus[j] == 0.0 {
            continue;
        }
        let tz = t.view((0, 0), (j, j)) * gram.view((0, j), (j, 1));
        for i in 0..j {
            t[(i, j)] = -taus[j] * tz[i];
        }
    }

    let mut c = g.view_mut((k, k + b), (height, cols - k - b));
    let w = t.transpose() * (&vt * &c);
    c.gemm(-1.0, &v, &w, 1.0);
}

/// Solves `GᵀG x = b` with the factor of `G`.
#[cfg(test)]
fn normal_solve(f: &TallQr, b: &DVector<f64>) -> DVector<f64> {
    let mut x = b.clone();
    f.solve_rt(x.as_mut_slice());
    f.solve_r(x.as_mut_slice());
    x
}
