//! Real embedding of the quaternion ℓ1 problem as a second-order cone program.
//!
//! The variable is block-interleaved: `x̂ = [t_1, R(x_1), I(x_1), J(x_1),
//! K(x_1), …, t_m, R(x_m), …, K(x_m)]`, each 5-block constrained to the cone
//! `‖(R, I, J, K)‖₂ ≤ t_r`, and the objective is `Σ t_r`. Measurement rows
//! are plane-major: all `R` rows of `y`, then all `I`, `J`, `K` rows.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, Result};
use crate::quat::{QMatrix, QVector, Quaternion};
use crate::socp::SocpProblem;

/// Size of one cone block: the bound `t_r` plus four quaternion components.
pub const BLOCK: usize = 5;

/// The real SOCP data built from a quaternion instance `(A, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedProblem {
    pub c_hat: DVector<f64>,
    pub a_hat: DMatrix<f64>,
    pub y_hat: DVector<f64>,
    pub cone_dims: Vec<usize>,
    pub m: usize,
    pub n: usize,
}

impl EmbeddedProblem {
    pub fn to_socp(&self) -> Result<SocpProblem> {
        SocpProblem::new(
            self.c_hat.clone(),
            self.a_hat.clone(),
            self.y_hat.clone(),
            self.cone_dims.clone(),
        )
    }

    pub fn into_socp(self) -> Result<SocpProblem> {
        SocpProblem::new(self.c_hat, self.a_hat, self.y_hat, self.cone_dims)
    }
}

/// Real 4×4 matrix `M` with `vec4(q·x) = M·vec4(x)` for every quaternion `x`.
pub fn left_mult_block(q: Quaternion) -> [[f64; 4]; 4] {
    let [a, b, c, d] = q.components();
    [
        [a, -b, -c, -d],
        [b, a, -d, c],
        [c, d, a, -b],
        [d, -c, b, a],
    ]
}

/// Plane-major stacking `[R(v); I(v); J(v); K(v)]`.
pub fn embed_vec4(v: &QVector) -> DVector<f64> {
    let n = v.len();
    let mut out = DVector::zeros(4 * n);
    for (i, q) in v.iter().enumerate() {
        for (p, value) in q.components().into_iter().enumerate() {
            out[p * n + i] = value;
        }
    }
    out
}

/// Interleaves bounds `t` and signal `x` into the `x̂` layout.
pub fn interleave(t: &[f64], x: &QVector) -> Result<DVector<f64>> {
    if t.len() != x.len() {
        return dim_err(format!("{} bounds for {} entries", t.len(), x.len()));
    }
    let mut out = DVector::zeros(BLOCK * x.len());
    for (r, (tr, q)) in t.iter().zip(x.iter()).enumerate() {
        out[BLOCK * r] = *tr;
        for (c, value) in q.components().into_iter().enumerate() {
            out[BLOCK * r + 1 + c] = value;
        }
    }
    Ok(out)
}

/// Builds `(ĉ, Â, ŷ, cones)` for `min ‖x‖₁ s.t. y = A·x`.
pub fn build_socp(a: &QMatrix, y: &QVector) -> Result<EmbeddedProblem> {
    let (n, m) = (a.rows(), a.cols());
    if n == 0 || m == 0 {
        return dim_err(format!("measurement matrix must be non-empty, got {n}x{m}"));
    }
    if y.len() != n {
        return dim_err(format!("{n}x{m} matrix with {} measurements", y.len()));
    }

    let mut c_hat = DVector::zeros(BLOCK * m);
    for r in 0..m {
        c_hat[BLOCK * r] = 1.0;
    }

    let mut a_hat = DMatrix::zeros(4 * n, BLOCK * m);
    for i in 0..n {
        for r in 0..m {
            let block = left_mult_block(a.get(i, r));
            for (p, row) in block.iter().enumerate() {
                for (c, value) in row.iter().enumerate() {
                    a_hat[(p * n + i, BLOCK * r + 1 + c)] = *value;
                }
            }
        }
    }

    Ok(EmbeddedProblem {
        c_hat,
        a_hat,
        y_hat: embed_vec4(y),
        cone_dims: vec![BLOCK; m],
        m,
        n,
    })
}

/// Splits `x̂` back into the quaternion signal and the bound vector `t`.
pub fn extract_solution(x_hat: &[f64], m: usize) -> Result<(QVector, Vec<f64>)> {
    if x_hat.len() != BLOCK * m {
        return dim_err(format!(
            "solution of length {} does not hold {m} blocks of {BLOCK}",
            x_hat.len()
        ));
    }
    let mut t = Vec::with_capacity(m);
    let mut x = Vec::with_capacity(m);
    for block in x_hat.chunks_exact(BLOCK) {
        t.push(block[0]);
        x.push(Quaternion::new(block[1], block[2], block[3], block[4])?);
    }
    Ok((QVector::new(x), t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d).unwrap()
    }

    fn apply(m: &[[f64; 4]; 4], v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (r, row) in m.iter().enumerate() {
            out[r] = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    #[test]
    fn left_block_of_one_is_identity() {
        let m = left_mult_block(Quaternion::ONE);
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                assert_eq!(*v, if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn left_block_matches_product_on_basis() {
        let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
        for p in [Quaternion::I, Quaternion::J, Quaternion::K, q(0.3, -1.2, 2.0, 0.7)] {
            let m = left_mult_block(p);
            for (c, e) in basis.iter().enumerate() {
                let column: [f64; 4] = std::array::from_fn(|r| m[r][c]);
                assert_eq!(column, (p * *e).components());
            }
            let x = q(1.5, -0.25, 3.0, -2.0);
            let lhs = apply(&m, x.components());
            let rhs = (p * x).components();
            for k in 0..4 {
                assert!((lhs[k] - rhs[k]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn vec4_layout_is_plane_major() {
        assert_eq!(embed_vec4(&QVector::new(vec![Quaternion::I])).as_slice(), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(embed_vec4(&QVector::zeros(3)), DVector::zeros(12));
        let v = QVector::new(vec![q(1.0, 2.0, 3.0, 4.0), q(5.0, 0.0, 0.0, 0.0)]);
        assert_eq!(embed_vec4(&v).as_slice(), &[1.0, 5.0, 2.0, 0.0, 3.0, 0.0, 4.0, 0.0]);
    }

    #[test]
    fn build_shapes_and_pattern() {
        let a = QMatrix::from_fn(1, 2, |_, j| q(1.0 + j as f64, 0.5, -0.5, 2.0));
        let y = QVector::new(vec![q(1.0, 0.0, 0.0, 0.0)]);
        let e = build_socp(&a, &y).unwrap();
        assert_eq!(e.c_hat.len(), 10);
        assert_eq!(e.a_hat.shape(), (4, 10));
        assert_eq!(e.y_hat.len(), 4);
        assert_eq!(e.cone_dims, vec![5, 5]);
        assert_eq!(e.c_hat.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        for r in 0..2 {
            assert!(e.a_hat.column(BLOCK * r).iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn build_rejects_mismatch() {
        let a = QMatrix::zeros(2, 3);
        assert!(build_socp(&a, &QVector::zeros(3)).is_err());
        assert!(build_socp(&QMatrix::zeros(0, 3), &QVector::zeros(0)).is_err());
    }

    #[test]
    fn identity_system_pins_signal() {
        let target = q(0.5, -1.0, 2.0, 3.5);
        let e = build_socp(&QMatrix::identity(1), &QVector::new(vec![target])).unwrap();
        // with the head column zero, the x-part is the solution of the 4x4 block
        let x_part = e.a_hat.columns(1, 4).into_owned().lu().solve(&e.y_hat).unwrap();
        for k in 0..4 {
            assert!((x_part[k] - target.components()[k]).abs() < 1e-15);
        }
    }

    #[test]
    fn extract_examples() {
        let (x, t) = extract_solution(&[0.0; 10], 2).unwrap();
        assert_eq!(x, QVector::zeros(2));
        assert_eq!(t, vec![0.0, 0.0]);
        let (x, t) = extract_solution(&[2.0, 1.0, 0.0, 0.0, 0.0], 1).unwrap();
        assert_eq!(x, QVector::new(vec![Quaternion::ONE]));
        assert_eq!(t, vec![2.0]);
        assert!(extract_solution(&[0.0; 9], 2).is_err());
    }
}
