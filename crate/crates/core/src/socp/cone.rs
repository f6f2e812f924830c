//! Jordan-algebra operations, Nesterov–Todd scaling and step lengths for a
//! product of nonnegative rays and second-order cones.

use std::ops::Range;

/// Block structure of a product cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeLayout {
    ranges: Vec<Range<usize>>,
    dim: usize,
}

impl ConeLayout {
    pub fn new(sizes: &[usize]) -> Self {
        let mut ranges = Vec::with_capacity(sizes.len());
        let mut start = 0;
        for &d in sizes {
            ranges.push(start..start + d);
            start += d;
        }
        Self { ranges, dim: start }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of blocks; the barrier degree under the `e = (1, 0, …, 0)`
    /// normalization used here.
    pub fn degree(&self) -> usize {
        self.ranges.len()
    }

    pub fn blocks(&self) -> impl Iterator<Item = Range<usize>> + '_ {
        self.ranges.iter().cloned()
    }

    /// Writes the identity element `e` into `out`.
    pub fn identity(&self, out: &mut [f64]) {
        out.fill(0.0);
        for r in &self.ranges {
            out[r.start] = 1.0;
        }
    }

    /// Jordan product `u ∘ v`.
    pub fn product(&self, u: &[f64], v: &[f64], out: &mut [f64]) {
        for r in self.blocks() {
            let (u, v, o) = (&u[r.clone()], &v[r.clone()], &mut out[r]);
            if u.len() == 1 {
                o[0] = u[0] * v[0];
                continue;
            }
            o[0] = dot(u, v);
            for k in 1..u.len() {
                o[k] = u[0] * v[k] + v[0] * u[k];
            }
        }
    }

    /// Solves `λ ∘ z = r` for `z`, with `λ` in the cone interior.
    pub fn divide(&self, lambda: &[f64], r: &[f64], out: &mut [f64]) {
        for blk in self.blocks() {
            let (l, r, z) = (&lambda[blk.clone()], &r[blk.clone()], &mut out[blk]);
            if l.len() == 1 {
                z[0] = r[0] / l[0];
                continue;
            }
            let det = soc_det(l);
            let tail_dot = dot(&l[1..], &r[1..]);
            z[0] = (l[0] * r[0] - tail_dot) / det;
            for k in 1..l.len() {
                z[k] = (r[k] - z[0] * l[k]) / l[0];
            }
        }
    }

    /// Largest `α ≥ 0` with `v + α·d` in the cone (`f64::INFINITY` if
    /// unbounded), assuming `v` is interior.
    pub fn max_step(&self, v: &[f64], d: &[f64]) -> f64 {
        self.blocks()
            .map(|r| block_max_step(&v[r.clone()], &d[r]))
            .fold(f64::INFINITY, f64::min)
    }

    /// True when every block lies strictly inside its cone.
    pub fn is_interior(&self, v: &[f64]) -> bool {
        self.blocks().all(|r| {
            let b = &v[r];
            b[0] > 0.0 && (b.len() == 1 || soc_det(b) > 0.0)
        })
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `u₀² − ‖ū‖²`, evaluated as a product to limit cancellation.
#[inline]
fn soc_det(u: &[f64]) -> f64 {
    let tail = dot(&u[1..], &u[1..]).sqrt();
    (u[0] - tail) * (u[0] + tail)
}

fn block_max_step(v: &[f64], d: &[f64]) -> f64 {
    if v.len() == 1 {
        return if d[0] < 0.0 { -v[0] / d[0] } else { f64::INFINITY };
    }
    // f(α) = (v₀ + α d₀)² − ‖v̄ + α d̄‖² = a α² + b α + c, with c > 0.
    let c = soc_det(v);
    if c <= 0.0 || v[0] <= 0.0 {
        return 0.0;
    }
    let a = d[0] * d[0] - dot(&d[1..], &d[1..]);
    let b = 2.0 * (v[0] * d[0] - dot(&v[1..], &d[1..]));
    let scale = d[0].abs().max(dot(&d[1..], &d[1..]).sqrt());
    if scale == 0.0 {
        return f64::INFINITY;
    }
    let mut alpha = f64::INFINITY;
    if a.abs() <= 1e-14 * scale * scale {
        if b < 0.0 {
            alpha = -c / b;
        }
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let q = -0.5 * (b + b.signum() * disc.sqrt());
            for root in [q / a, c / q] {
                if root.is_finite() && root > 0.0 {
                    alpha = alpha.min(root);
                }
            }
        }
    }
    // the head must stay nonnegative along the ray as well
    if d[0] < 0.0 {
        alpha = alpha.min(-v[0] / d[0]);
    }
    alpha
}

/// Nesterov–Todd scaling `W` for a primal-dual interior pair `(x, s)`,
/// characterized by `W x = W⁻¹ s = λ`. `W` is symmetric and maps the cone
/// onto itself.
#[derive(Debug, Clone)]
pub struct NtScaling {
    blocks: Vec<NtBlock>,
    layout: ConeLayout,
}

#[derive(Debug, Clone)]
enum NtBlock {
    /// `W = w` on a size-one cone.
    Ray { w: f64 },
    /// `W⁻¹ = η·[[w₀, w̄ᵀ], [w̄, I + w̄w̄ᵀ/(1 + w₀)]]`, with `w₀² − ‖w̄‖² = 1`.
    /// `root_det` is `√(det x · det s)`, the determinant of `W x`.
    Soc { eta: f64, w0: f64, w1: Vec<f64>, root_det: f64 },
}

impl NtScaling {
    /// Returns `None` unless both points are strictly interior.
    pub fn new(layout: &ConeLayout, x: &[f64], s: &[f64]) -> Option<Self> {
        let mut blocks = Vec::with_capacity(layout.degree());
        for r in layout.blocks() {
            let (xb, sb) = (&x[r.clone()], &s[r]);
            if xb.len() == 1 {
                if !(xb[0] > 0.0 && sb[0] > 0.0) {
                    return None;
                }
                blocks.push(NtBlock::Ray { w: (sb[0] / xb[0]).sqrt() });
                continue;
            }
            let (xd, sd) = (soc_det(xb), soc_det(sb));
            if !(xd > 0.0 && sd > 0.0 && xb[0] > 0.0 && sb[0] > 0.0) {
                return None;
            }
            let (xn, sn) = (xd.sqrt(), sd.sqrt());
            let xbar: Vec<f64> = xb.iter().map(|v| v / xn).collect();
            let sbar: Vec<f64> = sb.iter().map(|v| v / sn).collect();
            let gamma = ((1.0 + dot(&xbar, &sbar)) / 2.0).sqrt();
            let w0 = (xbar[0] + sbar[0]) / (2.0 * gamma);
            let w1: Vec<f64> = xbar[1..]
                .iter()
                .zip(&sbar[1..])
                .map(|(a, b)| (a - b) / (2.0 * gamma))
                .collect();
            let eta = (xn / sn).sqrt();
            if !(eta.is_finite() && w0.is_finite()) {
                return None;
            }
            blocks.push(NtBlock::Soc { eta, w0, w1, root_det: xn * sn });
        }
        Some(Self { blocks, layout: layout.clone() })
    }

    /// `out = W·v`
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        self.apply_impl(v, out, false);
    }

    /// `out = W⁻¹·v`
    pub fn apply_inv(&self, v: &[f64], out: &mut [f64]) {
        self.apply_impl(v, out, true);
    }

    fn apply_impl(&self, v: &[f64], out: &mut [f64], inverse: bool) {
        for (blk, r) in self.blocks.iter().zip(self.layout.blocks()) {
            let (v, o) = (&v[r.clone()], &mut out[r]);
            match blk {
                NtBlock::Ray { w } => o[0] = if inverse { v[0] / w } else { v[0] * w },
                NtBlock::Soc { eta, w0, w1, .. } => {
                    // W⁻¹ = η W̄ and W = η⁻¹ J W̄ J, J = diag(1, −1, …, −1).
                    let (k, sign) = if inverse { (*eta, 1.0) } else { (1.0 / eta, -1.0) };
                    let tail = dot(w1, &v[1..]);
                    let head = w0 * v[0] + sign * tail;
                    let coef = sign * v[0] + tail / (1.0 + w0);
                    o[0] = k * head;
                    for (j, wj) in w1.iter().enumerate() {
                        o[j + 1] = k * (v[j + 1] + coef * wj);
                    }
                }
            }
        }
    }

    /// The scaled point `λ = W x`. Each head is recomputed from the known
    /// determinant of `λ`; near the boundary the head obtained by the product
    /// can round to a point outside the cone.
    pub fn scaled_point(&self, x: &[f64], out: &mut [f64]) {
        self.apply(x, out);
        for (blk, r) in self.blocks.iter().zip(self.layout.blocks()) {
            if let NtBlock::Soc { root_det, .. } = blk {
                let o = &mut out[r];
                o[0] = (dot(&o[1..], &o[1..]) + root_det).sqrt();
            }
        }
    }

    /// Applies `W⁻¹` in place to every column of `m` (a column holds one
    /// full-length vector).
    pub fn apply_inv_columns(&self, m: &mut nalgebra::DMatrix<f64>) {
        let mut buf = vec![0.0; self.layout.dim()];
        for mut col in m.column_iter_mut() {
            self.apply_inv(col.as_slice(), &mut buf);
            col.as_mut_slice().copy_from_slice(&buf);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    #[test]
    fn scaling_maps_x_and_s_to_same_point() {
        let layout = ConeLayout::new(&[1, 3, 5]);
        let x = [2.0, 3.0, 1.0, -1.5, 2.0, 0.3, -0.4, 0.5, 1.1];
        let s = [0.5, 1.0, -0.2, 0.7, 4.0, -1.0, 2.0, 0.1, -0.9];
        assert!(layout.is_interior(&x) && layout.is_interior(&s));
        let w = NtScaling::new(&layout, &x, &s).unwrap();
        let (mut wx, mut winv_s) = ([0.0; 9], [0.0; 9]);
        w.apply(&x, &mut wx);
        w.apply_inv(&s, &mut winv_s);
        assert!(close(&wx, &winv_s, 1e-13), "{wx:?} vs {winv_s:?}");
        assert!(layout.is_interior(&wx));

        let mut back = [0.0; 9];
        w.apply_inv(&wx, &mut back);
        assert!(close(&back, &x, 1e-13));

        let mut lambda = [0.0; 9];
        w.scaled_point(&x, &mut lambda);
        assert!(close(&lambda, &wx, 1e-13));
    }

    #[test]
    fn scaled_point_stays_interior_near_boundary() {
        // complementary boundary pair, nudged inside by 1e-13
        let layout = ConeLayout::new(&[3]);
        let x = [1.0 + 1e-13, 0.6, 0.8];
        let s = [2.0 + 1e-13, -1.2, -1.6];
        let w = NtScaling::new(&layout, &x, &s).unwrap();
        let mut lambda = [0.0; 3];
        w.scaled_point(&x, &mut lambda);
        assert!(layout.is_interior(&lambda));
        let det = (lambda[0] - lambda[1..].iter().map(|v| v * v).sum::<f64>().sqrt())
            * (lambda[0] + lambda[1..].iter().map(|v| v * v).sum::<f64>().sqrt());
        let expected = (soc_det(&x) * soc_det(&s)).sqrt();
        assert!((det - expected).abs() <= 1e-3 * expected, "{det} vs {expected}");
    }

    #[test]
    fn product_and_division_invert() {
        let layout = ConeLayout::new(&[1, 4]);
        let lambda = [1.5, 2.0, 0.3, -0.5, 0.9];
        let z = [0.7, -1.0, 2.0, 0.25, -3.0];
        let mut r = [0.0; 5];
        layout.product(&lambda, &z, &mut r);
        let mut back = [0.0; 5];
        layout.divide(&lambda, &r, &mut back);
        assert!(close(&back, &z, 1e-14));

        let mut e = [0.0; 5];
        layout.identity(&mut e);
        layout.product(&e, &z, &mut r);
        assert_eq!(r, z);
    }

    #[test]
    fn max_step_hits_boundary() {
        let layout = ConeLayout::new(&[3]);
        let v = [1.0, 0.0, 0.0];
        let d = [0.0, 1.0, 0.0];
        assert!((layout.max_step(&v, &d) - 1.0).abs() < 1e-15);
        assert_eq!(layout.max_step(&v, &[1.0, 0.0, 0.0]), f64::INFINITY);
        // straight through the apex
        let a = layout.max_step(&v, &[-1.0, 0.0, 0.0]);
        assert!((a - 1.0).abs() < 1e-15);
        let ray = ConeLayout::new(&[1]);
        assert_eq!(ray.max_step(&[2.0], &[-4.0]), 0.5);
        assert_eq!(ray.max_step(&[2.0], &[4.0]), f64::INFINITY);
    }

    #[test]
    fn max_step_matches_bisection() {
        let layout = ConeLayout::new(&[5]);
        let v = [2.0, 0.5, -0.3, 0.8, 0.1];
        for d in [[-0.3, 1.0, 0.5, -0.2, 0.9], [0.1, -2.0, 0.2, 0.3, 0.0], [-1.0, 0.0, 0.0, 0.0, 0.1]] {
            let a = layout.max_step(&v, &d);
            let inside = |t: f64| {
                let p: Vec<f64> = v.iter().zip(&d).map(|(x, y)| x + t * y).collect();
                p[0] >= dot(&p[1..], &p[1..]).sqrt()
            };
            let (mut lo, mut hi) = (0.0, 1e3);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            assert!((a - lo).abs() < 1e-10, "{a} vs {lo}");
        }
    }
}
