//! Complex Bessel and Hankel functions of orders 0 and 1, and the outgoing
//! fundamental solution of the 2D Helmholtz operator.
//!
//! Evaluation strategy: ascending power series for |z| <= 12, Hankel
//! asymptotic expansion (optimally truncated) beyond. The seam is tuned so
//! both branches agree to 1e-10 there.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// |z| above which the asymptotic expansion takes over from the series.
const SERIES_SEAM: f64 = 12.0;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Wavenumber k with Im k >= 0 and k off the excluded half-line (-inf, 0].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wavenumber {
    k: Complex64,
}

impl Wavenumber {
    pub fn new(k: Complex64) -> Result<Self> {
        if !k.re.is_finite() || !k.im.is_finite() {
            return Err(Error::InvalidWavenumber(k));
        }
        if k.im < 0.0 {
            return Err(Error::InvalidWavenumber(k));
        }
        if k.im == 0.0 && k.re <= 0.0 {
            return Err(Error::InvalidWavenumber(k));
        }
        Ok(Self { k })
    }

    pub fn real(k: f64) -> Result<Self> {
        Self::new(Complex64::new(k, 0.0))
    }

    pub fn value(self) -> Complex64 {
        self.k
    }

    /// lambda = k^2, the Helmholtz coefficient in Delta + lambda.
    pub fn lambda(self) -> Complex64 {
        self.k * self.k
    }
}

fn j0_series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 1..=60 {
        term *= -q / ((m * m) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

fn j1_series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 1..=60 {
        term *= -q / ((m * (m + 1)) as f64);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum * z * 0.5
}

fn y0_series(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let log_half_z = (z * 0.5).ln();
    // sum over m >= 1 of (-1)^m h_m q^m / (m!)^2 with h_m the harmonic numbers
    let mut base = Complex64::new(1.0, 0.0);
    let mut h = 0.0;
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..=60 {
        base *= -q / ((m * m) as f64);
        h += 1.0 / m as f64;
        let term = base * h;
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    ((log_half_z + EULER_GAMMA) * j0_series(z) - sum) * (2.0 / std::f64::consts::PI)
}

fn y1_series(z: Complex64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let q = z * z * 0.25;
    let log_half_z = (z * 0.5).ln();
    // sum over m >= 0 of (-1)^m (h_m + h_{m+1}) q^m / (m! (m+1)!)
    let mut base = Complex64::new(1.0, 0.0);
    let mut h_m = 0.0;
    let mut h_m1 = 1.0;
    let mut sum = base * (h_m + h_m1);
    for m in 1..=60 {
        base *= -q / ((m * (m + 1)) as f64);
        h_m += 1.0 / m as f64;
        h_m1 += 1.0 / (m + 1) as f64;
        let term = base * (h_m + h_m1);
        sum += term;
        if term.norm() < 1e-18 * sum.norm().max(1e-300) {
            break;
        }
    }
    (log_half_z + EULER_GAMMA) * j1_series(z) * (2.0 / pi)
        - 2.0 / (pi * z)
        - sum * z * 0.5 / pi
}

/// Optimally truncated asymptotic sum P(z) = sum_m s^m a_m(nu) / z^m,
/// where s = +i for the first Hankel function and -i for the second.
fn hankel_asymptotic_sum(order: u32, z: Complex64, sign: f64) -> Complex64 {
    let four_nu_sq = (4 * order * order) as f64;
    let s = Complex64::new(0.0, sign);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last_norm = f64::INFINITY;
    for m in 1..=40 {
        let odd = (2 * m - 1) as f64;
        term *= s * (four_nu_sq - odd * odd) / (8.0 * m as f64) / z;
        let n = term.norm();
        if n >= last_norm {
            // divergent tail reached; stop at the optimal truncation point
            break;
        }
        sum += term;
        last_norm = n;
        if n < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

fn hankel_asymptotic(order: u32, z: Complex64, kind_sign: f64) -> Complex64 {
    let pi = std::f64::consts::PI;
    let omega = z - (order as f64) * pi * 0.5 - pi * 0.25;
    let amp = (2.0 / (pi * z)).sqrt();
    let phase = (I * kind_sign * omega).exp();
    amp * phase * hankel_asymptotic_sum(order, z, kind_sign)
}

fn check_order(order: u32) {
    assert!(order <= 1, "only orders 0 and 1 are supported, got {order}");
}

fn on_branch_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0
}

/// Bessel function of the first kind, order 0 or 1, complex argument.
pub fn bessel_j(order: u32, z: Complex64) -> Complex64 {
    check_order(order);
    if z.norm() <= SERIES_SEAM {
        return if order == 0 { j0_series(z) } else { j1_series(z) };
    }
    if on_branch_cut(z) {
        // J is entire; reflect to the right half axis
        let j = bessel_j(order, -z);
        return if order == 0 { j } else { -j };
    }
    let h1 = hankel_asymptotic(order, z, 1.0);
    let h2 = hankel_asymptotic(order, z, -1.0);
    (h1 + h2) * 0.5
}

/// Bessel function of the second kind, order 0 or 1. The argument must stay
/// off the branch cut (-inf, 0].
pub fn bessel_y(order: u32, z: Complex64) -> Result<Complex64> {
    check_order(order);
    if on_branch_cut(z) {
        return Err(Error::BranchCut);
    }
    if z.norm() <= SERIES_SEAM {
        return Ok(if order == 0 { y0_series(z) } else { y1_series(z) });
    }
    let h1 = hankel_asymptotic(order, z, 1.0);
    let h2 = hankel_asymptotic(order, z, -1.0);
    Ok((h1 - h2) / (2.0 * I))
}

/// First Hankel function H^(1)_order(z) = J + iY.
pub fn hankel1(order: u32, z: Complex64) -> Result<Complex64> {
    check_order(order);
    if on_branch_cut(z) {
        return Err(Error::BranchCut);
    }
    if z.norm() <= SERIES_SEAM {
        let j = if order == 0 { j0_series(z) } else { j1_series(z) };
        let y = if order == 0 { y0_series(z) } else { y1_series(z) };
        return Ok(j + I * y);
    }
    Ok(hankel_asymptotic(order, z, 1.0))
}

/// Outgoing fundamental solution of Delta + k^2 in the plane:
/// S(x) = H^(1)_0(k |x|) / (4i), so that (Delta + k^2) S = delta.
///
/// Note the sign: this is the opposite of the common (i/4) H_0 Green-function
/// convention, which solves (Delta + k^2) G = -delta.
pub fn fundamental_solution(k: Wavenumber, dx: [f64; 2]) -> Result<Complex64> {
    let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
    if r == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let h = hankel1(0, k.value() * r)?;
    Ok(h / (4.0 * I))
}

/// Gradient of the fundamental solution: DS(x) = -(k/(4i)) H^(1)_1(k|x|) x/|x|.
pub fn fundamental_gradient(k: Wavenumber, dx: [f64; 2]) -> Result<[Complex64; 2]> {
    let r = (dx[0] * dx[0] + dx[1] * dx[1]).sqrt();
    if r == 0.0 {
        return Err(Error::OriginSingularity);
    }
    let kk = k.value();
    let ds = -kk / (4.0 * I) * hankel1(1, kk * r)?;
    Ok([ds * (dx[0] / r), ds * (dx[1] / r)])
}
