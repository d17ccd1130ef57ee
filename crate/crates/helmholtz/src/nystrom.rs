//! Nystrom assembly of the dense boundary operators V, W, Wt, T on a
//! quadrature grid.
//!
//! Same-curve blocks split every kernel into an analytic factor times
//! log(4 sin^2((t-s)/2)) plus a smooth remainder and apply the trigonometric
//! log-quadrature rule; cross-curve blocks use the plain trapezoid rule. The
//! hypersingular operator T is assembled through the tangential-derivative
//! regularization T = D_s V D_s + k^2 V_nn rather than a finite-part rule.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::geometry::{QuadGrid, TAU};
use crate::potentials::Density;
use crate::specfun::{self, Wavenumber, EULER_GAMMA};

const I: Complex64 = Complex64::new(0.0, 1.0);
const PI: f64 = std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorRole {
    V,
    W,
    Wt,
    T,
}

impl OperatorRole {
    pub fn tag(self) -> u32 {
        match self {
            OperatorRole::V => 0,
            OperatorRole::W => 1,
            OperatorRole::Wt => 2,
            OperatorRole::T => 3,
        }
    }
}

/// Dense realization of a boundary integral operator on the grid nodes.
#[derive(Clone, Debug)]
pub struct BoundaryOperator {
    pub role: OperatorRole,
    pub k: Wavenumber,
    pub matrix: Array2<Complex64>,
}

impl BoundaryOperator {
    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, density: &Density) -> Vec<Complex64> {
        let x = Array1::from(density.values().to_vec());
        self.matrix.dot(&x).to_vec()
    }

    /// c I + matrix.
    pub fn plus_identity(&self, c: Complex64) -> Array2<Complex64> {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[[i, i]] += c;
        }
        m
    }

    /// Binary dump: magic "HLMZOP01", u32 node count, u32 role tag, then
    /// row-major complex128 entries, all little-endian.
    pub fn write_to(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        w.write_all(b"HLMZOP01")?;
        w.write_all(&(self.n() as u32).to_le_bytes())?;
        w.write_all(&self.role.tag().to_le_bytes())?;
        for z in self.matrix.iter() {
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
        Ok(())
    }
}

/// Weights R_m of the quadrature rule for integrals of
/// f(s) log(4 sin^2((t-s)/2)) over one period on n equispaced nodes;
/// the weight for node j at collocation node i is entry (i - j) mod n.
pub fn kress_log_weights(n: usize) -> Vec<f64> {
    assert!(n % 2 == 0, "log-quadrature rule needs an even node count");
    let half = n / 2;
    (0..n)
        .map(|m| {
            let angle = TAU * m as f64 / n as f64;
            let mut sum = 0.0;
            for l in 1..half {
                sum += (l as f64 * angle).cos() / l as f64;
            }
            -2.0 * TAU / n as f64 * sum
                - TAU / (n * n) as f64 * (PI * m as f64).cos() * 2.0
        })
        .collect()
}

/// Spectral differentiation matrix on n equispaced periodic nodes (n even):
/// the exact derivative of the interpolating trigonometric polynomial.
pub fn differentiation_matrix(n: usize) -> Array2<f64> {
    assert!(n % 2 == 0);
    let mut d = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let diff = (i as f64 - j as f64) * PI / n as f64;
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                d[[i, j]] = 0.5 * sign / diff.tan();
            }
        }
    }
    d
}

fn log4sin2(ti: f64, tj: f64) -> f64 {
    let s = (0.5 * (ti - tj)).sin();
    (4.0 * s * s).ln()
}

/// J_1(z)/z, analytic through z = 0.
fn j1_over_z(z: Complex64) -> Complex64 {
    if z.norm() < 1e-6 {
        let q = z * z;
        Complex64::new(0.5, 0.0) - q / 16.0 + q * q / 384.0
    } else {
        specfun::bessel_j(1, z) / z
    }
}

/// Which kernel a same-curve log-split block realizes.
enum Kernel {
    /// S(x - y), optionally weighted by nu(x) . nu(y).
    SingleLayer { normal_weight: bool },
    /// d/dnu_y S(x - y): the double layer.
    DoubleLayer,
    /// d/dnu_x S(x - y): the adjoint double layer.
    AdjointDoubleLayer,
}

struct CurveData<'a> {
    t: &'a [f64],
    points: &'a [[f64; 2]],
    normals: &'a [[f64; 2]],
    speeds: &'a [f64],
    curvatures: &'a [f64],
}

impl Kernel {
    /// Analytic factor A(t_i, t_j) multiplying log(4 sin^2((t_i - t_j)/2)).
    fn log_factor(&self, k: Complex64, c: &CurveData, i: usize, j: usize) -> Complex64 {
        if i == j {
            return match self {
                Kernel::SingleLayer { .. } => {
                    Complex64::new(c.speeds[i] / (4.0 * PI), 0.0)
                }
                _ => Complex64::new(0.0, 0.0),
            };
        }
        let dx = [
            c.points[i][0] - c.points[j][0],
            c.points[i][1] - c.points[j][1],
        ];
        let r = dx[0].hypot(dx[1]);
        let kr = k * r;
        match self {
            Kernel::SingleLayer { normal_weight } => {
                let mut a = specfun::bessel_j(0, kr) / (4.0 * PI) * c.speeds[j];
                if *normal_weight {
                    a *= c.normals[i][0] * c.normals[j][0]
                        + c.normals[i][1] * c.normals[j][1];
                }
                a
            }
            Kernel::DoubleLayer => {
                let q = dx[0] * c.normals[j][0] + dx[1] * c.normals[j][1];
                k * k / (4.0 * PI) * j1_over_z(kr) * q * c.speeds[j]
            }
            Kernel::AdjointDoubleLayer => {
                let q = dx[0] * c.normals[i][0] + dx[1] * c.normals[i][1];
                -(k * k) / (4.0 * PI) * j1_over_z(kr) * q * c.speeds[j]
            }
        }
    }

    /// Full kernel value (including the speed weight), off the diagonal.
    fn value(&self, k: Complex64, c: &CurveData, i: usize, j: usize) -> Complex64 {
        let dx = [
            c.points[i][0] - c.points[j][0],
            c.points[i][1] - c.points[j][1],
        ];
        let r = dx[0].hypot(dx[1]);
        let kr = k * r;
        match self {
            Kernel::SingleLayer { normal_weight } => {
                let h0 = specfun::hankel1(0, kr).expect("k r off the branch cut");
                let mut v = h0 / (4.0 * I) * c.speeds[j];
                if *normal_weight {
                    v *= c.normals[i][0] * c.normals[j][0]
                        + c.normals[i][1] * c.normals[j][1];
                }
                v
            }
            Kernel::DoubleLayer => {
                let q = dx[0] * c.normals[j][0] + dx[1] * c.normals[j][1];
                let h1 = specfun::hankel1(1, kr).expect("k r off the branch cut");
                k / (4.0 * I) * h1 * (q / r) * c.speeds[j]
            }
            Kernel::AdjointDoubleLayer => {
                let q = dx[0] * c.normals[i][0] + dx[1] * c.normals[i][1];
                let h1 = specfun::hankel1(1, kr).expect("k r off the branch cut");
                -k / (4.0 * I) * h1 * (q / r) * c.speeds[j]
            }
        }
    }

    /// Diagonal limit of the smooth remainder B(t, t).
    fn smooth_diagonal(&self, k: Complex64, c: &CurveData, i: usize) -> Complex64 {
        match self {
            Kernel::SingleLayer { .. } => {
                let speed = c.speeds[i];
                let log_term = (k * speed / 2.0).ln() + EULER_GAMMA;
                speed * (1.0 / (4.0 * I) + log_term / (2.0 * PI))
            }
            // removable singularity: the curvature term, identical for both
            // the double layer and its adjoint
            Kernel::DoubleLayer | Kernel::AdjointDoubleLayer => {
                Complex64::new(c.curvatures[i] * c.speeds[i] / (4.0 * PI), 0.0)
            }
        }
    }

    /// Cross-curve kernel between node i of curve a and node j of curve b.
    fn cross_value(
        &self,
        k: Complex64,
        xi: [f64; 2],
        nui: [f64; 2],
        yj: [f64; 2],
        nuj: [f64; 2],
        speed_j: f64,
    ) -> Complex64 {
        let dx = [xi[0] - yj[0], xi[1] - yj[1]];
        let r = dx[0].hypot(dx[1]);
        let kr = k * r;
        match self {
            Kernel::SingleLayer { normal_weight } => {
                let h0 = specfun::hankel1(0, kr).expect("k r off the branch cut");
                let mut v = h0 / (4.0 * I) * speed_j;
                if *normal_weight {
                    v *= nui[0] * nuj[0] + nui[1] * nuj[1];
                }
                v
            }
            Kernel::DoubleLayer => {
                let q = dx[0] * nuj[0] + dx[1] * nuj[1];
                let h1 = specfun::hankel1(1, kr).expect("k r off the branch cut");
                k / (4.0 * I) * h1 * (q / r) * speed_j
            }
            Kernel::AdjointDoubleLayer => {
                let q = dx[0] * nui[0] + dx[1] * nui[1];
                let h1 = specfun::hankel1(1, kr).expect("k r off the branch cut");
                -k / (4.0 * I) * h1 * (q / r) * speed_j
            }
        }
    }
}

fn assemble_kernel(k: Wavenumber, grid: &QuadGrid, kernel: Kernel) -> Array2<Complex64> {
    let n = grid.node_count();
    let kk = k.value();
    let mut m = Array2::<Complex64>::zeros((n, n));
    for (ca, cga) in grid.curve_grids().iter().enumerate() {
        let oa = grid.offset(ca);
        let data = CurveData {
            t: &cga.t,
            points: &cga.points,
            normals: &cga.normals,
            speeds: &cga.speeds,
            curvatures: &cga.curvatures,
        };
        let na = cga.n;
        let h = TAU / na as f64;
        let log_weights = kress_log_weights(na);
        // same-curve block: log rule on the A factor, trapezoid on B
        for i in 0..na {
            for j in 0..na {
                let a = kernel.log_factor(kk, &data, i, j);
                let b = if i == j {
                    kernel.smooth_diagonal(kk, &data, i)
                } else {
                    kernel.value(kk, &data, i, j)
                        - a * log4sin2(data.t[i], data.t[j])
                };
                let r_w = log_weights[(na + i - j) % na];
                m[[oa + i, oa + j]] = r_w * a + h * b;
            }
        }
        // cross-curve blocks: smooth kernel, plain trapezoid
        for (cb, cgb) in grid.curve_grids().iter().enumerate() {
            if cb == ca {
                continue;
            }
            let ob = grid.offset(cb);
            let hb = TAU / cgb.n as f64;
            for i in 0..na {
                for j in 0..cgb.n {
                    m[[oa + i, ob + j]] = hb
                        * kernel.cross_value(
                            kk,
                            cga.points[i],
                            cga.normals[i],
                            cgb.points[j],
                            cgb.normals[j],
                            cgb.speeds[j],
                        );
                }
            }
        }
    }
    m
}

/// Boundary single layer operator V (weakly singular, log-split).
pub fn assemble_v(k: Wavenumber, grid: &QuadGrid) -> BoundaryOperator {
    BoundaryOperator {
        role: OperatorRole::V,
        k,
        matrix: assemble_kernel(k, grid, Kernel::SingleLayer { normal_weight: false }),
    }
}

/// Boundary double layer operator W (principal value).
pub fn assemble_w(k: Wavenumber, grid: &QuadGrid) -> BoundaryOperator {
    BoundaryOperator {
        role: OperatorRole::W,
        k,
        matrix: assemble_kernel(k, grid, Kernel::DoubleLayer),
    }
}

/// Adjoint double layer operator Wt: the boundary part of the normal
/// derivative of the single layer. Assembled from its own kernel, not by
/// transposing W.
pub fn assemble_wt(k: Wavenumber, grid: &QuadGrid) -> BoundaryOperator {
    BoundaryOperator {
        role: OperatorRole::Wt,
        k,
        matrix: assemble_kernel(k, grid, Kernel::AdjointDoubleLayer),
    }
}

/// Block-diagonal arclength differentiation d/ds = (1/|x'|) d/dt.
pub fn arclength_derivative(grid: &QuadGrid) -> Array2<f64> {
    let n = grid.node_count();
    let mut d = Array2::<f64>::zeros((n, n));
    for (c, cg) in grid.curve_grids().iter().enumerate() {
        let o = grid.offset(c);
        let dt = differentiation_matrix(cg.n);
        for i in 0..cg.n {
            for j in 0..cg.n {
                d[[o + i, o + j]] = dt[[i, j]] / cg.speeds[i];
            }
        }
    }
    d
}

/// Hypersingular operator T = d/ds V d/ds + k^2 V_nn, where V_nn is the
/// single layer with kernel weighted by nu(x) . nu(y).
pub fn assemble_t(k: Wavenumber, grid: &QuadGrid) -> BoundaryOperator {
    let v = assemble_kernel(k, grid, Kernel::SingleLayer { normal_weight: false });
    let vnn = assemble_kernel(k, grid, Kernel::SingleLayer { normal_weight: true });
    let ds = arclength_derivative(grid).mapv(|x| Complex64::new(x, 0.0));
    let matrix = ds.dot(&v).dot(&ds) + vnn.mapv(|z| z * k.lambda());
    BoundaryOperator {
        role: OperatorRole::T,
        k,
        matrix,
    }
}
