//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use quatl1::{QMatrix, QVector, Quaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hamilton product written out term by term from the unit rules
/// `i² = j² = k² = −1`, `ij = k`, `jk = i`, `ki = j` and their negated
/// reversals. Basis order is (1, i, j, k).
pub fn oracle_mul(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    // (sign, index) of e_a · e_b
    const TABLE: [[(f64, usize); 4]; 4] = [
        [(1.0, 0), (1.0, 1), (1.0, 2), (1.0, 3)],
        [(1.0, 1), (-1.0, 0), (1.0, 3), (-1.0, 2)],
        [(1.0, 2), (-1.0, 3), (-1.0, 0), (1.0, 1)],
        [(1.0, 3), (1.0, 2), (-1.0, 1), (-1.0, 0)],
    ];
    let mut out = [0.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            let (sign, idx) = TABLE[a][b];
            out[idx] += sign * p[a] * q[b];
        }
    }
    out
}

pub fn oracle_matvec(a: &QMatrix, x: &QVector) -> Vec<[f64; 4]> {
    (0..a.rows())
        .map(|i| {
            let mut acc = [0.0; 4];
            for r in 0..a.cols() {
                let prod = oracle_mul(a.get(i, r).components(), x[r].components());
                for c in 0..4 {
                    acc[c] += prod[c];
                }
            }
            acc
        })
        .collect()
}

pub fn modulus(q: [f64; 4]) -> f64 {
    q.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_quat(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
    .unwrap()
}

pub fn rand_qvec(rng: &mut ChaCha8Rng, len: usize) -> QVector {
    (0..len).map(|_| rand_quat(rng)).collect()
}

pub fn rand_qmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> QMatrix {
    QMatrix::from_fn(rows, cols, |_, _| rand_quat(rng))
}

/// Real `4n × 4m` matrix of `x ↦ A·x` with component-major blocks, built
/// column by column by multiplying `A`'s entries with the basis units.
pub fn real_operator(a: &QMatrix) -> DMatrix<f64> {
    let (n, m) = (a.rows(), a.cols());
    let mut out = DMatrix::zeros(4 * n, 4 * m);
    for r in 0..m {
        for c in 0..4 {
            let mut unit = [0.0; 4];
            unit[c] = 1.0;
            for i in 0..n {
                let prod = oracle_mul(a.get(i, r).components(), unit);
                for p in 0..4 {
                    out[(4 * i + p, 4 * r + c)] = prod[p];
                }
            }
        }
    }
    out
}

pub fn flatten(v: &QVector) -> DVector<f64> {
    DVector::from_iterator(4 * v.len(), v.iter().flat_map(|q| q.components()))
}

pub fn unflatten(v: &DVector<f64>) -> QVector {
    v.as_slice().chunks(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3]).unwrap()).collect()
}

pub fn group_l1(v: &DVector<f64>) -> f64 {
    v.as_slice().chunks(4).map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).sum()
}

/// Minimizes `Σ_r ‖x_r‖₂` over 4-blocks subject to `M x = y` by
/// Douglas–Rachford splitting between group soft-thresholding and the
/// affine projection. Returns the final feasible point.
pub fn douglas_rachford_l1(m: &DMatrix<f64>, y: &DVector<f64>, max_iter: usize) -> DVector<f64> {
    let gram = m * m.transpose();
    let chol = gram.cholesky().expect("measurement operator has full row rank");
    let project = |z: &DVector<f64>| -> DVector<f64> {
        let lambda = chol.solve(&(m * z - y));
        z - m.transpose() * lambda
    };
    let gamma = 0.2;
    let mut z = project(&DVector::zeros(m.ncols()));
    let mut best = z.clone();
    let mut best_obj = group_l1(&z);
    for it in 0..max_iter {
        let mut x = z.clone();
        for block in x.as_mut_slice().chunks_mut(4) {
            let norm = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            let shrink = if norm > gamma { 1.0 - gamma / norm } else { 0.0 };
            block.iter_mut().for_each(|v| *v *= shrink);
        }
        let w = project(&(&x * 2.0 - &z));
        let step = (&w - &x).norm();
        z += &w - &x;
        let obj = group_l1(&w);
        if obj < best_obj {
            best_obj = obj;
            best = w;
        }
        if step < 1e-14 && it > 10 {
            break;
        }
    }
    best
}
