//! Dense complex linear algebra helpers: SVD-based rank, nullspace and
//! minimal-norm least squares, plus the weighted inner product used for
//! boundary densities.

use ndarray::{Array1, Array2};
use ndarray_linalg::SVD;
use num_complex::Complex64;

/// Relative singular-value threshold below which a direction counts as kernel.
pub const KERNEL_REL_TOL: f64 = 1e-8;
/// Relative truncation for minimal-norm least-squares solves.
pub const LSTSQ_REL_TOL: f64 = 1e-10;

pub struct Svd {
    pub u: Array2<Complex64>,
    pub s: Array1<f64>,
    pub vh: Array2<Complex64>,
}

pub fn svd(a: &Array2<Complex64>) -> Svd {
    let (u, s, vh) = a.svd(true, true).expect("LAPACK SVD failed");
    Svd {
        u: u.unwrap(),
        s,
        vh: vh.unwrap(),
    }
}

pub fn singular_values(a: &Array2<Complex64>) -> Array1<f64> {
    let (_, s, _) = a.svd(false, false).expect("LAPACK SVD failed");
    s
}

pub fn min_singular_value(a: &Array2<Complex64>) -> f64 {
    let s = singular_values(a);
    s.iter().copied().fold(f64::INFINITY, f64::min)
}

impl Svd {
    pub fn rank(&self, rel_tol: f64) -> usize {
        let smax = self.s.iter().copied().fold(0.0, f64::max);
        self.s.iter().filter(|&&x| x > rel_tol * smax).count()
    }

    /// Right-singular vectors spanning the numerical kernel (columns of V
    /// whose singular value falls below rel_tol * sigma_max).
    pub fn nullspace(&self, rel_tol: f64) -> Vec<Array1<Complex64>> {
        let smax = self.s.iter().copied().fold(0.0, f64::max);
        let n = self.vh.nrows();
        let mut basis = Vec::new();
        for i in 0..n.min(self.s.len()) {
            if self.s[i] <= rel_tol * smax {
                basis.push(self.vh.row(i).mapv(|z| z.conj()));
            }
        }
        // rows of vh beyond the singular value count are exact kernel
        for i in self.s.len()..n {
            basis.push(self.vh.row(i).mapv(|z| z.conj()));
        }
        basis
    }

    /// Minimal-norm least-squares solution via the truncated pseudoinverse.
    pub fn solve_min_norm(&self, b: &Array1<Complex64>, rel_tol: f64) -> Array1<Complex64> {
        let smax = self.s.iter().copied().fold(0.0, f64::max);
        let mut x = Array1::<Complex64>::zeros(self.vh.ncols());
        for i in 0..self.s.len() {
            if self.s[i] > rel_tol * smax {
                let coeff = self
                    .u
                    .column(i)
                    .iter()
                    .zip(b.iter())
                    .map(|(u, b)| u.conj() * b)
                    .sum::<Complex64>()
                    / self.s[i];
                for (xj, vj) in x.iter_mut().zip(self.vh.row(i).iter()) {
                    *xj += vj.conj() * coeff;
                }
            }
        }
        x
    }
}

pub fn nullspace(a: &Array2<Complex64>, rel_tol: f64) -> Vec<Array1<Complex64>> {
    svd(a).nullspace(rel_tol)
}

/// Weighted (arclength) Hermitian inner product: sum f_j conj(g_j) w_j.
pub fn weighted_inner(f: &[Complex64], g: &[Complex64], w: &[f64]) -> Complex64 {
    f.iter()
        .zip(g)
        .zip(w)
        .map(|((a, b), &wj)| a * b.conj() * wj)
        .sum()
}

pub fn weighted_norm(f: &[Complex64], w: &[f64]) -> f64 {
    f.iter()
        .zip(w)
        .map(|(a, &wj)| a.norm_sqr() * wj)
        .sum::<f64>()
        .sqrt()
}

/// Gram-Schmidt orthonormalization under the weighted inner product.
/// Vectors that become numerically dependent are dropped.
pub fn weighted_orthonormalize(
    vectors: &[Array1<Complex64>],
    w: &[f64],
) -> Vec<Array1<Complex64>> {
    let mut basis: Vec<Array1<Complex64>> = Vec::new();
    for v in vectors {
        let mut u = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = weighted_inner(u.as_slice().unwrap(), b.as_slice().unwrap(), w);
                u.iter_mut().zip(b.iter()).for_each(|(x, y)| *x -= c * y);
            }
        }
        let norm = weighted_norm(u.as_slice().unwrap(), w);
        if norm > 1e-10 {
            basis.push(u.mapv(|z| z / norm));
        }
    }
    basis
}

/// Orthonormal basis (weighted inner product) of the part of the primary
/// operator's kernel that the secondary operator also annihilates.
///
/// The kernels of the one-sided trace operators mix two eigen-families on
/// multiply connected domains; the side condition (V mu = 0 for the
/// Dirichlet-type kernels, T f = 0 for the Neumann-type ones) selects the
/// family the problem actually obstructs.
pub fn constrained_nullspace(
    primary: &Array2<Complex64>,
    secondary: &Array2<Complex64>,
    w: &[f64],
) -> Vec<Array1<Complex64>> {
    let raw = weighted_orthonormalize(&nullspace(primary, KERNEL_REL_TOL), w);
    if raw.is_empty() {
        return raw;
    }
    let n = primary.nrows();
    let d = raw.len();
    let mut applied = Array2::<Complex64>::zeros((n, d));
    for (col, v) in raw.iter().enumerate() {
        let sv = secondary.dot(v);
        for i in 0..n {
            applied[[i, col]] = sv[i];
        }
    }
    let scale = singular_values(secondary)
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let svd_applied = svd(&applied);
    let mut filtered = Vec::new();
    for (idx, &s) in svd_applied.s.iter().enumerate() {
        if s <= KERNEL_REL_TOL * scale {
            let combo = svd_applied.vh.row(idx).mapv(|z| z.conj());
            let mut vec = Array1::<Complex64>::zeros(n);
            for (ci, basis_vec) in raw.iter().enumerate() {
                for i in 0..n {
                    vec[i] += combo[ci] * basis_vec[i];
                }
            }
            filtered.push(vec);
        }
    }
    // combos beyond the singular value count are exact null directions
    for idx in svd_applied.s.len()..d {
        let combo = svd_applied.vh.row(idx).mapv(|z| z.conj());
        let mut vec = Array1::<Complex64>::zeros(n);
        for (ci, basis_vec) in raw.iter().enumerate() {
            for i in 0..n {
                vec[i] += combo[ci] * basis_vec[i];
            }
        }
        filtered.push(vec);
    }
    weighted_orthonormalize(&filtered, w)
}

/// Neville polynomial extrapolation of (xs, ys) samples to x = 0; used for
/// Richardson limits of off-boundary field values onto the boundary.
pub fn neville_extrapolate(xs: &[f64], ys: &[Complex64]) -> Complex64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let mut tab = ys.to_vec();
    for m in 1..n {
        for i in (m..n).rev() {
            tab[i] = (xs[i - m] * tab[i] - xs[i] * tab[i - 1]) / (xs[i - m] - xs[i]);
        }
    }
    tab[n - 1]
}

/// Projection of g onto the span of a weighted-orthonormal basis.
pub fn project_onto(
    g: &[Complex64],
    basis: &[Array1<Complex64>],
    w: &[f64],
) -> Array1<Complex64> {
    let mut p = Array1::<Complex64>::zeros(g.len());
    for b in basis {
        let c = weighted_inner(g, b.as_slice().unwrap(), w);
        p.iter_mut().zip(b.iter()).for_each(|(x, y)| *x += c * y);
    }
    p
}
