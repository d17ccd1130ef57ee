//! Analytic reference solutions on the disk: higher-order Bessel functions,
//! Bessel zeros, disk eigenfunctions and the Mie series for plane-wave
//! scattering off a sound-soft circular cylinder.
//!
//! Everything here depends only on `specfun`; the solver modules are checked
//! against these routines, never the other way round.

use num_complex::Complex64;

use crate::specfun::{self, Wavenumber};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// J_n(z) for any order n >= 0 by Miller's downward recurrence, normalized
/// with the even-order sum identity J_0 + 2 sum_m J_{2m} = 1.
pub fn bessel_jn(n: u32, z: Complex64) -> Complex64 {
    if n <= 1 {
        return specfun::bessel_j(n, z);
    }
    if z.norm() < 1e-12 {
        return Complex64::new(0.0, 0.0);
    }
    let start = {
        // even start well above both the order and the argument
        let s = n as usize + (1.5 * z.norm()) as usize + 32;
        s + s % 2
    };
    let mut jp1 = Complex64::new(0.0, 0.0); // J_{m+1}
    let mut j = Complex64::new(1.0, 0.0); // J_m at m = start, arbitrary seed scale
    let mut wanted = if start == n as usize { j } else { Complex64::new(0.0, 0.0) };
    let mut even_sum = 2.0 * j; // accumulates J_0 + 2 sum of even orders (start is even, > 0)
    for m in (1..=start).rev() {
        let jm1 = (2.0 * m as f64 / z) * j - jp1;
        jp1 = j;
        j = jm1; // j = J_{m-1}
        if m - 1 == n as usize {
            wanted = j;
        }
        if (m - 1) % 2 == 0 {
            even_sum += if m - 1 == 0 { j } else { 2.0 * j };
        }
        // keep magnitudes near unity; complex division underflows otherwise
        let scale = j.norm();
        if scale > 1e8 {
            j /= scale;
            jp1 /= scale;
            wanted /= scale;
            even_sum /= scale;
        }
    }
    wanted / even_sum
}

/// Y_n(z) by upward recurrence from the order-0 and order-1 series.
pub fn bessel_yn(n: u32, z: Complex64) -> Complex64 {
    let y0 = specfun::bessel_y(0, z).expect("argument on branch cut");
    if n == 0 {
        return y0;
    }
    let mut ym1 = y0;
    let mut y = specfun::bessel_y(1, z).expect("argument on branch cut");
    for m in 1..n {
        let yp1 = (2.0 * m as f64 / z) * y - ym1;
        ym1 = y;
        y = yp1;
    }
    y
}

pub fn hankel1_n(n: u32, z: Complex64) -> Complex64 {
    bessel_jn(n, z) + I * bessel_yn(n, z)
}

/// J_n'(z) = J_{n-1}(z) - (n/z) J_n(z), with J_0' = -J_1.
pub fn bessel_jn_prime(n: u32, z: Complex64) -> Complex64 {
    if n == 0 {
        return -bessel_jn(1, z);
    }
    bessel_jn(n - 1, z) - (n as f64 / z) * bessel_jn(n, z)
}

pub fn hankel1_n_prime(n: u32, z: Complex64) -> Complex64 {
    if n == 0 {
        return -hankel1_n(1, z);
    }
    hankel1_n(n - 1, z) - (n as f64 / z) * hankel1_n(n, z)
}

/// Which function's positive zeros `bessel_zero` locates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BesselZeroKind {
    J0,
    J1,
    J0Prime,
    J1Prime,
    J2Prime,
}

fn zero_target(kind: BesselZeroKind, z: f64) -> f64 {
    let zc = Complex64::new(z, 0.0);
    match kind {
        BesselZeroKind::J0 => bessel_jn(0, zc).re,
        BesselZeroKind::J1 => bessel_jn(1, zc).re,
        BesselZeroKind::J0Prime => -bessel_jn(1, zc).re,
        BesselZeroKind::J1Prime => bessel_jn_prime(1, zc).re,
        BesselZeroKind::J2Prime => bessel_jn_prime(2, zc).re,
    }
}

/// index-th positive zero (index >= 1) by scan plus bisection on the series.
pub fn bessel_zero(kind: BesselZeroKind, index: usize) -> f64 {
    assert!(index >= 1, "zero index starts at 1");
    let step = 0.05;
    let mut found = 0;
    let mut z = step;
    let mut f_prev = zero_target(kind, z);
    loop {
        let z_next = z + step;
        let f_next = zero_target(kind, z_next);
        if f_prev == 0.0 {
            found += 1;
            if found == index {
                return z;
            }
        } else if f_prev * f_next < 0.0 {
            found += 1;
            if found == index {
                let (mut lo, mut hi) = (z, z_next);
                let mut f_lo = f_prev;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let f_mid = zero_target(kind, mid);
                    if f_lo * f_mid <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        f_lo = f_mid;
                    }
                    if hi - lo < 1e-14 {
                        break;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        z = z_next;
        f_prev = f_next;
        assert!(z < 500.0, "zero scan ran away");
    }
}

/// General positive zero of J_m or J_m' (1-based index), for eigenfunction
/// construction at arbitrary angular order.
pub fn disk_eigen_k(kind: DiskEigenKind, m: u32, index: usize) -> f64 {
    assert!(index >= 1);
    let f = |z: f64| -> f64 {
        let zc = Complex64::new(z, 0.0);
        match kind {
            DiskEigenKind::Dirichlet => bessel_jn(m, zc).re,
            DiskEigenKind::Neumann => bessel_jn_prime(m, zc).re,
        }
    };
    let step = 0.05;
    let mut found = 0;
    // skip z = 0 (J_m(0) = 0 for m >= 1 is not a positive zero)
    let mut z = step;
    let mut f_prev = f(z);
    loop {
        let z_next = z + step;
        let f_next = f(z_next);
        if f_prev * f_next < 0.0 {
            found += 1;
            if found == index {
                let (mut lo, mut hi) = (z, z_next);
                let mut f_lo = f_prev;
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let f_mid = f(mid);
                    if f_lo * f_mid <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        f_lo = f_mid;
                    }
                    if hi - lo < 1e-14 {
                        break;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        z = z_next;
        f_prev = f_next;
        assert!(z < 500.0, "zero scan ran away");
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiskEigenKind {
    Dirichlet,
    Neumann,
}

/// Laplace eigenfunction of the unit disk: J_m(k r) e^{i m theta} with k the
/// index-th zero of J_m (Dirichlet) or J_m' (Neumann).
pub fn disk_eigenfunction(
    kind: DiskEigenKind,
    m: i32,
    index: usize,
    x: [f64; 2],
) -> Complex64 {
    let k = disk_eigen_k(kind, m.unsigned_abs(), index);
    let r = x[0].hypot(x[1]);
    let theta = x[1].atan2(x[0]);
    let radial = bessel_jn(m.unsigned_abs(), Complex64::new(k * r, 0.0));
    radial * (I * (m as f64) * theta).exp()
}

/// Plane-wave scattering off the sound-soft disk |x| <= a: the scattered
/// field is the series sum_m -eps_m i^m (J_m(ka)/H_m(ka)) H_m(k r) cos(m th)
/// with th the angle between x and the incidence direction. The total field
/// (scattered + incident) vanishes on |x| = a.
#[derive(Clone, Debug)]
pub struct MieSolution {
    pub k: Complex64,
    pub radius: f64,
    pub direction: [f64; 2],
    pub order: usize,
    /// c_m = J_m(k a) / H^(1)_m(k a) for m = 0..=order.
    pub coeffs: Vec<Complex64>,
    /// Magnitude of the first dropped coefficient.
    pub tail_bound: f64,
}

impl MieSolution {
    pub fn new(k: Wavenumber, radius: f64, direction: [f64; 2]) -> Self {
        let mut order = (k.value().norm() * radius) as usize + 8;
        loop {
            let sol = Self::with_order(k, radius, direction, order);
            if sol.tail_bound < 1e-14 {
                return sol;
            }
            order += 8;
            assert!(order < 500, "Mie series did not converge");
        }
    }

    pub fn with_order(k: Wavenumber, radius: f64, direction: [f64; 2], order: usize) -> Self {
        let ka = k.value() * radius;
        let coeffs: Vec<Complex64> = (0..=order as u32)
            .map(|m| bessel_jn(m, ka) / hankel1_n(m, ka))
            .collect();
        let tail_bound = bessel_jn(order as u32 + 1, ka).norm()
            / hankel1_n(order as u32 + 1, ka).norm();
        let dn = direction[0].hypot(direction[1]);
        MieSolution {
            k: k.value(),
            radius,
            direction: [direction[0] / dn, direction[1] / dn],
            order,
            coeffs,
            tail_bound,
        }
    }

    fn relative_angle(&self, x: [f64; 2]) -> (f64, f64) {
        let r = x[0].hypot(x[1]);
        let theta = x[1].atan2(x[0]) - self.direction[1].atan2(self.direction[0]);
        (r, theta)
    }

    pub fn incident(&self, x: [f64; 2]) -> Complex64 {
        let phase = self.k * (x[0] * self.direction[0] + x[1] * self.direction[1]);
        (I * phase).exp()
    }

    pub fn scattered(&self, x: [f64; 2]) -> Complex64 {
        let (r, theta) = self.relative_angle(x);
        let kr = self.k * r;
        let mut sum = self.coeffs[0] * hankel1_n(0, kr);
        let mut im = Complex64::new(1.0, 0.0);
        for m in 1..=self.order {
            im *= I;
            sum += 2.0 * im * self.coeffs[m] * hankel1_n(m as u32, kr)
                * (m as f64 * theta).cos();
        }
        -sum
    }

    pub fn total(&self, x: [f64; 2]) -> Complex64 {
        self.incident(x) + self.scattered(x)
    }
}

/// Scattered field of the sound-soft disk of radius a, evaluated at x.
pub fn mie_exterior_dirichlet(
    k: Wavenumber,
    a: f64,
    d: [f64; 2],
    x: [f64; 2],
) -> Complex64 {
    MieSolution::new(k, a, d).scattered(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TAU: f64 = std::f64::consts::TAU;

    #[test]
    fn bessel_zero_values() {
        assert!((bessel_zero(BesselZeroKind::J0, 1) - 2.404825557695773).abs() < 1e-12);
        assert!((bessel_zero(BesselZeroKind::J0, 2) - 5.520078110286311).abs() < 1e-12);
        assert!((bessel_zero(BesselZeroKind::J1, 1) - 3.831705970207512).abs() < 1e-12);
        assert!((bessel_zero(BesselZeroKind::J0Prime, 1) - 3.831705970207512).abs() < 1e-12);
        assert!((bessel_zero(BesselZeroKind::J1Prime, 1) - 1.841183781340659).abs() < 1e-12);
        assert!((bessel_zero(BesselZeroKind::J2Prime, 1) - 3.054236928227140).abs() < 1e-11);
    }

    #[test]
    fn disk_eigen_k_matches_zero_kinds() {
        assert_eq!(
            disk_eigen_k(DiskEigenKind::Dirichlet, 0, 1),
            bessel_zero(BesselZeroKind::J0, 1)
        );
        assert_eq!(
            disk_eigen_k(DiskEigenKind::Neumann, 1, 1),
            bessel_zero(BesselZeroKind::J1Prime, 1)
        );
        // third Dirichlet root of the disk spectrum: first zero of J_2
        assert!((disk_eigen_k(DiskEigenKind::Dirichlet, 2, 1) - 5.135622301840683).abs() < 1e-11);
    }

    #[test]
    fn higher_order_wronskian() {
        // J_m(z) Y_{m+1}(z) - J_{m+1}(z) Y_m(z) = -2/(pi z) at every order used
        for &z in &[1.0, 5.5, 17.3, 30.0] {
            let zc = Complex64::new(z, 0.0);
            for m in 0..=40u32 {
                let w = bessel_jn(m, zc) * bessel_yn(m + 1, zc)
                    - bessel_jn(m + 1, zc) * bessel_yn(m, zc);
                let expect = -2.0 / (std::f64::consts::PI * z);
                assert!(
                    ((w.re - expect) / expect).abs() < 1e-10 && w.im.abs() < 1e-10,
                    "m = {m}, z = {z}: {} vs {}",
                    w.re,
                    expect
                );
            }
        }
    }

    #[test]
    fn eigenfunction_boundary_behavior() {
        // Dirichlet m=0 idx=1 vanishes at |x| = 1
        let v = disk_eigenfunction(DiskEigenKind::Dirichlet, 0, 1, [0.6, 0.8]);
        assert!(v.norm() < 1e-11, "{v}");
        // Neumann m=1 idx=1: radial derivative vanishes at |x| = 1
        let k = disk_eigen_k(DiskEigenKind::Neumann, 1, 1);
        let dr = bessel_jn_prime(1, Complex64::new(k, 0.0));
        assert!(dr.norm() < 1e-10);
    }

    #[test]
    fn eigenfunction_orthogonality_on_disk() {
        // tensor product quadrature: midpoint in r (weight r dr), trapezoid in theta
        let (nr, nt) = (64, 64);
        let mut ip = Complex64::new(0.0, 0.0);
        for ir in 0..nr {
            let r = (ir as f64 + 0.5) / nr as f64;
            for it in 0..nt {
                let th = it as f64 * TAU / nt as f64;
                let x = [r * th.cos(), r * th.sin()];
                let a = disk_eigenfunction(DiskEigenKind::Dirichlet, 0, 1, x);
                let b = disk_eigenfunction(DiskEigenKind::Dirichlet, 1, 1, x);
                ip += a * b.conj() * r;
            }
        }
        ip *= TAU / nt as f64 / nr as f64;
        assert!(ip.norm() < 1e-10, "{ip}");
    }

    #[test]
    fn mie_boundary_cancellation() {
        let k = Wavenumber::real(2.0).unwrap();
        let sol = MieSolution::new(k, 1.0, [1.0, 0.0]);
        for i in 0..32 {
            let th = i as f64 * TAU / 32.0;
            let x = [th.cos(), th.sin()];
            assert!(sol.total(x).norm() < 1e-12, "angle {th}");
        }
    }

    #[test]
    fn mie_truncation_converged() {
        let k = Wavenumber::real(2.0).unwrap();
        let sol = MieSolution::new(k, 1.0, [1.0, 0.0]);
        let double = MieSolution::with_order(k, 1.0, [1.0, 0.0], 2 * sol.order);
        for &x in &[[2.0, 0.5], [-1.5, 1.0], [0.0, 3.0]] {
            assert!((sol.scattered(x) - double.scattered(x)).norm() < 1e-13);
        }
        assert!(sol.tail_bound < 1e-14);
    }

    #[test]
    fn mie_decays_for_absorbing_wavenumber() {
        let k = Wavenumber::new(Complex64::new(2.0, 0.4)).unwrap();
        let sol = MieSolution::new(k, 1.0, [1.0, 0.0]);
        let near = sol.scattered([1.5, 0.0]).norm();
        let mid = sol.scattered([4.0, 0.0]).norm();
        let far = sol.scattered([8.0, 0.0]).norm();
        assert!(near > mid && mid > far);
        assert!(far < 0.05 * near);
    }

    #[test]
    fn mie_satisfies_helmholtz() {
        let k = Wavenumber::real(2.0).unwrap();
        let sol = MieSolution::new(k, 1.0, [0.6, 0.8]);
        let h = 1e-4;
        for &x in &[[1.7, 0.4], [-2.0, 1.3], [0.3, -2.5]] {
            let f = |p: [f64; 2]| sol.scattered(p);
            let lap = (f([x[0] + h, x[1]]) + f([x[0] - h, x[1]]) + f([x[0], x[1] + h])
                + f([x[0], x[1] - h])
                - 4.0 * f(x))
                / (h * h);
            let res = lap + k.lambda() * f(x);
            assert!(res.norm() < 1e-6, "at {x:?}: {}", res.norm());
        }
    }
}
