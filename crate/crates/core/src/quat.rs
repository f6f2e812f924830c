//! Quaternion scalars, vectors and dense matrices.
//!
//! A quaternion `q = R(q) + I(q)i + J(q)j + K(q)k` obeys `i² = j² = k² = -1`
//! and `ij = k, jk = i, ki = j` (with the reversed products negated), so
//! multiplication is associative but not commutative. All constructors
//! reject NaN and infinite components.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{dim_err, Error, Result};

/// A quaternion with finite `f64` components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    re: f64,
    im_i: f64,
    im_j: f64,
    im_k: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::raw(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Self = Self::raw(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::raw(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::raw(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::raw(0.0, 0.0, 0.0, 1.0);

    /// Builds `re + im_i·i + im_j·j + im_k·k`, rejecting non-finite parts.
    pub fn new(re: f64, im_i: f64, im_j: f64, im_k: f64) -> Result<Self> {
        if re.is_finite() && im_i.is_finite() && im_j.is_finite() && im_k.is_finite() {
            Ok(Self::raw(re, im_i, im_j, im_k))
        } else {
            Err(Error::NonFinite(re, im_i, im_j, im_k))
        }
    }

    pub fn from_real(re: f64) -> Result<Self> {
        Self::new(re, 0.0, 0.0, 0.0)
    }

    /// Builds from `[R, I, J, K]`.
    pub fn from_components(c: [f64; 4]) -> Result<Self> {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub(crate) const fn raw(re: f64, im_i: f64, im_j: f64, im_k: f64) -> Self {
        Self { re, im_i, im_j, im_k }
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.re
    }

    #[inline]
    pub fn im_i(&self) -> f64 {
        self.im_i
    }

    #[inline]
    pub fn im_j(&self) -> f64 {
        self.im_j
    }

    #[inline]
    pub fn im_k(&self) -> f64 {
        self.im_k
    }

    /// Components in `[R, I, J, K]` order.
    #[inline]
    pub fn components(&self) -> [f64; 4] {
        [self.re, self.im_i, self.im_j, self.im_k]
    }

    /// Hamilton product `self · rhs`.
    #[inline]
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, rhs: Self) -> Self {
        let (a1, b1, c1, d1) = (self.re, self.im_i, self.im_j, self.im_k);
        let (a2, b2, c2, d2) = (rhs.re, rhs.im_i, rhs.im_j, rhs.im_k);
        Self::raw(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::raw(self.re, -self.im_i, -self.im_j, -self.im_k)
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.re * self.re + self.im_i * self.im_i + self.im_j * self.im_j + self.im_k * self.im_k
    }

    /// `|q|`, the Euclidean length of the four components.
    #[inline]
    pub fn modulus(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, k: f64) -> Self {
        Self::raw(self.re * k, self.im_i * k, self.im_j * k, self.im_k * k)
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im_i == 0.0 && self.im_j == 0.0 && self.im_k == 0.0
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: Self) -> Self {
        Quaternion::mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, rhs: Self) -> Self {
        Self::raw(
            self.re + rhs.re,
            self.im_i + rhs.im_i,
            self.im_j + rhs.im_j,
            self.im_k + rhs.im_k,
        )
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, rhs: Self) -> Self {
        Self::raw(
            self.re - rhs.re,
            self.im_i - rhs.im_i,
            self.im_j - rhs.im_j,
            self.im_k - rhs.im_k,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.re, self.im_i, self.im_j, self.im_k)
    }
}

/// Order of a quaternion vector norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormOrder {
    L1,
    L2,
}

impl TryFrom<u32> for NormOrder {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        match p {
            1 => Ok(NormOrder::L1),
            2 => Ok(NormOrder::L2),
            other => Err(Error::UnsupportedNorm(other)),
        }
    }
}

/// Column vector of quaternions.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QVector {
    entries: Vec<Quaternion>,
}

impl QVector {
    pub fn new(entries: Vec<Quaternion>) -> Self {
        Self { entries }
    }

    pub fn zeros(len: usize) -> Self {
        Self { entries: vec![Quaternion::ZERO; len] }
    }

    /// Builds from four component planes `R(x), I(x), J(x), K(x)`.
    pub fn from_planes(re: &[f64], im_i: &[f64], im_j: &[f64], im_k: &[f64]) -> Result<Self> {
        let len = re.len();
        if im_i.len() != len || im_j.len() != len || im_k.len() != len {
            return dim_err("component planes differ in length");
        }
        (0..len)
            .map(|r| Quaternion::new(re[r], im_i[r], im_j[r], im_k[r]))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.entries.iter()
    }

    pub fn into_inner(self) -> Vec<Quaternion> {
        self.entries
    }

    /// One component plane (0 = R, 1 = I, 2 = J, 3 = K).
    pub fn plane(&self, component: usize) -> Vec<f64> {
        self.entries.iter().map(|q| q.components()[component]).collect()
    }

    pub fn norm(&self, order: NormOrder) -> f64 {
        match order {
            NormOrder::L1 => self.entries.iter().map(Quaternion::modulus).sum(),
            NormOrder::L2 => self.entries.iter().map(Quaternion::norm_sqr).sum::<f64>().sqrt(),
        }
    }

    /// `(Σ |x_r|^p)^(1/p)` for `p ∈ {1, 2}`.
    pub fn lp_norm(&self, p: u32) -> Result<f64> {
        NormOrder::try_from(p).map(|order| self.norm(order))
    }

    /// Number of entries that are not exactly zero.
    pub fn count_nonzero(&self) -> usize {
        self.entries.iter().filter(|q| !q.is_zero()).count()
    }

    pub fn sub(&self, other: &QVector) -> Result<QVector> {
        if self.len() != other.len() {
            return dim_err(format!("vector lengths {} and {}", self.len(), other.len()));
        }
        Ok(QVector::new(
            self.entries.iter().zip(&other.entries).map(|(a, b)| *a - *b).collect(),
        ))
    }

    pub fn scale(&self, k: f64) -> QVector {
        QVector::new(self.entries.iter().map(|q| q.scale(k)).collect())
    }
}

impl std::ops::Index<usize> for QVector {
    type Output = Quaternion;

    fn index(&self, index: usize) -> &Quaternion {
        &self.entries[index]
    }
}

impl From<Vec<Quaternion>> for QVector {
    fn from(entries: Vec<Quaternion>) -> Self {
        Self::new(entries)
    }
}

impl FromIterator<Quaternion> for QVector {
    fn from_iter<I: IntoIterator<Item = Quaternion>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Dense row-major quaternion matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Quaternion>,
}

impl QMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Quaternion>) -> Result<Self> {
        if entries.len() != rows * cols {
            return dim_err(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                entries.len()
            ));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, entries: vec![Quaternion::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Quaternion::ONE } else { Quaternion::ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Quaternion {
        self.entries[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[Quaternion] {
        &self.entries[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> QVector {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.entries
    }

    /// `y = A·x` with `y_i = Σ_r A[i,r]·x_r` (matrix entry on the left).
    pub fn mul_vec(&self, x: &QVector) -> Result<QVector> {
        if self.cols != x.len() {
            return dim_err(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                x.len()
            ));
        }
        Ok((0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.iter())
                    .fold(Quaternion::ZERO, |acc, (a, xr)| acc + *a * *xr)
            })
            .collect())
    }

    /// Returns a copy with columns reordered so that new column `k` is old
    /// column `perm[k]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<QMatrix> {
        if perm.len() != self.cols {
            return dim_err("permutation length differs from column count");
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, k| self.get(i, perm[k])))
    }
}
