//! Eigenvalue scans over the wavenumber, kernel extraction, the
//! eigenfunction/density correspondences, and the single-layer
//! representation map with its supplement-constrained decomposition.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{build_grid, QuadGrid, Region, TAU};
use crate::linalg;
use crate::nystrom;
use crate::potentials::{self, Density};
use crate::specfun::Wavenumber;

/// Relative dip depth (against the median of the scan curve) below which a
/// local minimum counts as a root candidate.
const DIP_DEPTH_REL: f64 = 1e-4;
/// Golden-section refinement stops when the bracket is this narrow. The
/// spectral dip is V-shaped with unit-order slope, so the bracket must close
/// well below the kernel-counting threshold (1e-8 relative) for the kernel
/// dimension at the root to be visible.
const ROOT_TOL: f64 = 1e-10;
/// Relative smallest-singular-value threshold for the hypothesis checks
/// "k^2 is not an eigenvalue of a bounded complement component".
const HYPOTHESIS_REL_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanRole {
    /// Dirichlet spectrum of the domain itself: kernel of 1/2 I + Wt.
    InteriorDirichlet,
    /// Neumann spectrum of the domain: kernel of -1/2 I + W.
    InteriorNeumann,
    /// Dirichlet spectra of the bounded complement components:
    /// kernel of -1/2 I + Wt.
    ExteriorDirichletBounded,
}

impl ScanRole {
    pub fn name(self) -> &'static str {
        match self {
            ScanRole::InteriorDirichlet => "interior-dirichlet",
            ScanRole::InteriorNeumann => "interior-neumann",
            ScanRole::ExteriorDirichletBounded => "exterior-dirichlet-bounded",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "interior-dirichlet" => Ok(ScanRole::InteriorDirichlet),
            "interior-neumann" => Ok(ScanRole::InteriorNeumann),
            "exterior-dirichlet-bounded" => Ok(ScanRole::ExteriorDirichletBounded),
            other => Err(Error::InvalidInput(format!("unknown scan role '{other}'"))),
        }
    }

    fn operator(self, k: Wavenumber, grid: &QuadGrid) -> Array2<Complex64> {
        let half = Complex64::new(0.5, 0.0);
        match self {
            ScanRole::InteriorDirichlet => nystrom::assemble_wt(k, grid).plus_identity(half),
            ScanRole::InteriorNeumann => nystrom::assemble_w(k, grid).plus_identity(-half),
            ScanRole::ExteriorDirichletBounded => {
                nystrom::assemble_wt(k, grid).plus_identity(-half)
            }
        }
    }

    /// Side-condition operator that separates this role's eigen-family from
    /// the other family sharing the trace-operator kernel: the single layer
    /// for Dirichlet-type roles (V mu = 0 on genuine eigen-densities), the
    /// hypersingular operator for the Neumann role (T f = 0 on traces).
    fn side_operator(self, k: Wavenumber, grid: &QuadGrid) -> Array2<Complex64> {
        match self {
            ScanRole::InteriorDirichlet | ScanRole::ExteriorDirichletBounded => {
                nystrom::assemble_v(k, grid).matrix
            }
            ScanRole::InteriorNeumann => nystrom::assemble_t(k, grid).matrix,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ScanRoot {
    pub k: f64,
    pub kernel_dim: usize,
}

#[derive(Clone, Debug)]
pub struct EigenScanResult {
    pub role: ScanRole,
    pub k_samples: Vec<f64>,
    pub sigma_min: Vec<f64>,
    pub roots: Vec<ScanRoot>,
}

fn sigma_min_at(role: ScanRole, grid: &QuadGrid, k: f64) -> f64 {
    let kw = Wavenumber::real(k).expect("scan range must stay positive");
    linalg::min_singular_value(&role.operator(kw, grid))
}

/// Scan the smallest singular value of the role's operator over a k-range,
/// refine each dip by golden-section search, and report kernel dimensions.
pub fn eigen_scan(
    role: ScanRole,
    grid: &QuadGrid,
    k_range: (f64, f64),
    samples: usize,
) -> Result<EigenScanResult> {
    let (lo, hi) = k_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidInput(format!(
            "scan range ({lo}, {hi}) must satisfy 0 < lo < hi"
        )));
    }
    if samples < 64 {
        return Err(Error::InvalidInput(format!(
            "scan needs at least 64 samples, got {samples}"
        )));
    }
    let k_samples: Vec<f64> = (0..samples)
        .map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64)
        .collect();
    let sigma_min: Vec<f64> = k_samples
        .iter()
        .map(|&k| sigma_min_at(role, grid, k))
        .collect();

    let mut sorted = sigma_min.clone();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let median = sorted[sorted.len() / 2];
    // a sampled local minimum this far below the background is worth
    // refining; the root test itself is the refined dip depth
    let candidate_threshold = 0.25 * median;

    let mut roots = Vec::new();
    for i in 1..samples - 1 {
        let is_min = sigma_min[i] <= sigma_min[i - 1] && sigma_min[i] <= sigma_min[i + 1];
        if !is_min || sigma_min[i] >= candidate_threshold {
            continue;
        }
        let k_root = golden_section_min(
            |k| sigma_min_at(role, grid, k),
            k_samples[i - 1],
            k_samples[i + 1],
        );
        let depth = sigma_min_at(role, grid, k_root);
        if depth >= DIP_DEPTH_REL * median {
            // shallow dip: a near-miss of the spectrum, not a root
            continue;
        }
        let kw = Wavenumber::real(k_root)?;
        let raw_dim =
            linalg::nullspace(&role.operator(kw, grid), linalg::KERNEL_REL_TOL).len();
        if raw_dim == 0 {
            return Err(Error::UnresolvedDip(k_root));
        }
        let dim = kernel_basis(role, kw, grid).len();
        if dim == 0 {
            // the dip belongs to the other eigen-family sharing this
            // operator's kernel (side condition rules it out)
            continue;
        }
        roots.push(ScanRoot { k: k_root, kernel_dim: dim });
    }
    Ok(EigenScanResult {
        role,
        k_samples,
        sigma_min,
        roots,
    })
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = 0.618_033_988_749_894_9;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > ROOT_TOL {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Eigen-density basis of the role at a fixed wavenumber: the kernel of the
/// trace operator restricted by the role's side condition, orthonormal under
/// the arclength inner product.
pub fn kernel_basis(role: ScanRole, k: Wavenumber, grid: &QuadGrid) -> Vec<Array1<Complex64>> {
    linalg::constrained_nullspace(
        &role.operator(k, grid),
        &role.side_operator(k, grid),
        &grid.weights(),
    )
}

/// Smallest relative singular value of the hole's own spectral operator, for
/// the hypothesis checks on bounded complement components.
fn hole_spectral_margin(role: ScanRole, k: Wavenumber, grid: &QuadGrid, hole: usize) -> Result<f64> {
    let hole_domain = grid.domain().hole_as_interior(hole)?;
    let n = grid.curve_grids().iter().map(|cg| cg.n).max().unwrap();
    let hole_grid = build_grid(&hole_domain, n)?;
    let op = role.operator(k, &hole_grid);
    let s = linalg::singular_values(&op);
    let smax = s.iter().copied().fold(0.0, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(smin / smax)
}

/// Interior Dirichlet eigenfunction reconstructed from a kernel density of
/// 1/2 I + Wt: u = -v+[mu], normalized to unit arclength norm with the
/// largest density entry rotated to the positive real axis.
#[derive(Clone, Debug)]
pub struct Eigenfunction {
    pub k: Wavenumber,
    pub density: Density,
}

impl Eigenfunction {
    pub fn eval(&self, grid: &QuadGrid, x: [f64; 2]) -> Result<Complex64> {
        Ok(-potentials::single_layer_field(self.k, grid, &self.density, x)?)
    }
}

pub fn eigenfunction_from_density(
    k: Wavenumber,
    grid: &QuadGrid,
    mu: &Density,
) -> Result<Eigenfunction> {
    // hypothesis: no bounded complement component carries k^2 as a Neumann
    // eigenvalue (checked on each hole as its own interior problem)
    for j in 1..=grid.domain().kappa_minus() {
        let margin = hole_spectral_margin(ScanRole::InteriorNeumann, k, grid, j)?;
        if margin < HYPOTHESIS_REL_TOL {
            return Err(Error::HypothesisViolated(format!(
                "k^2 is a Neumann eigenvalue of bounded complement component {j} (margin {margin:.2e})"
            )));
        }
    }
    // the density must lie in the kernel of 1/2 I + Wt
    let op = ScanRole::InteriorDirichlet.operator(k, grid);
    let v = Array1::from(mu.values().to_vec());
    let w = grid.weights();
    let mu_norm = linalg::weighted_norm(mu.values(), &w);
    if mu_norm == 0.0 {
        return Err(Error::InvalidInput("zero density".into()));
    }
    let residual = op.dot(&v);
    if linalg::weighted_norm(residual.as_slice().unwrap(), &w) / mu_norm > 1e-6 {
        return Err(Error::InvalidInput(
            "density is not in the kernel of 1/2 I + Wt".into(),
        ));
    }
    // normalize: unit arclength norm, largest-magnitude entry real positive
    let largest = mu
        .values()
        .iter()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .copied()
        .unwrap();
    let phase = largest / largest.norm();
    let values: Vec<Complex64> = mu
        .values()
        .iter()
        .map(|z| z / (mu_norm * phase))
        .collect();
    let density = Density::new(grid, values)?;
    let eigen = Eigenfunction { k, density };

    // trace of -v+[mu] must vanish: V mu = 0
    let trace = nystrom::assemble_v(k, grid).apply(&eigen.density);
    let trace_norm = linalg::weighted_norm(&trace, &w);
    if trace_norm > 1e-6 {
        return Err(Error::NoConvergence(format!(
            "eigenfunction boundary trace {trace_norm:.2e} is not small"
        )));
    }
    // the exterior field vanishes too
    let center = grid.domain().centroid();
    let rad = 2.0 * grid.domain().max_radius().max(1.0);
    for a in 0..8 {
        let th = a as f64 * TAU / 8.0;
        let x = [center[0] + rad * th.cos(), center[1] + rad * th.sin()];
        let val = eigen.eval(grid, x)?;
        if val.norm() > 1e-6 {
            return Err(Error::NoConvergence(format!(
                "exterior field {:.2e} at {x:?} is not small",
                val.norm()
            )));
        }
    }
    Ok(eigen)
}

/// Interior sample points for Gram tests: a bounding-box sweep filtered to
/// admissible interior points.
pub fn interior_sample_points(grid: &QuadGrid, per_axis: usize, cap: usize) -> Vec<[f64; 2]> {
    let center = grid.domain().centroid();
    let r = grid.domain().max_radius();
    let mut pts = Vec::new();
    for i in 0..per_axis {
        for j in 0..per_axis {
            let x = [
                center[0] - r + 2.0 * r * (i as f64 + 0.5) / per_axis as f64,
                center[1] - r + 2.0 * r * (j as f64 + 0.5) / per_axis as f64,
            ];
            if grid.locate(x) == Region::Interior {
                pts.push(x);
                if pts.len() == cap {
                    return pts;
                }
            }
        }
    }
    pts
}

#[derive(Clone, Debug)]
pub struct HolmgrenReport {
    pub density_norms: Vec<f64>,
    pub interior_maxima: Vec<f64>,
    pub gram_rank: usize,
    pub gram_condition: f64,
    /// Largest distance of a conjugated kernel vector from the kernel span.
    pub conjugate_span_defect: f64,
}

/// Injectivity evidence for the normal-derivative correspondence: every
/// kernel density reconstructs a nontrivial interior eigenfunction and the
/// reconstructions stay independent.
pub fn holmgren_injectivity_check(
    k: Wavenumber,
    grid: &QuadGrid,
    kernel: &[Array1<Complex64>],
) -> Result<HolmgrenReport> {
    let w = grid.weights();
    if kernel.is_empty() {
        return Ok(HolmgrenReport {
            density_norms: vec![],
            interior_maxima: vec![],
            gram_rank: 0,
            gram_condition: 1.0,
            conjugate_span_defect: 0.0,
        });
    }
    let pts = interior_sample_points(grid, 24, 256);
    let mut density_norms = Vec::new();
    let mut interior_maxima = Vec::new();
    let mut values = Array2::<Complex64>::zeros((pts.len(), kernel.len()));
    for (col, mu_vec) in kernel.iter().enumerate() {
        let mu = Density::new(grid, mu_vec.to_vec())?;
        density_norms.push(linalg::weighted_norm(mu.values(), &w));
        let mut max_abs = 0.0f64;
        for (row, &x) in pts.iter().enumerate() {
            let u = -potentials::single_layer_field(k, grid, &mu, x)?;
            values[[row, col]] = u;
            max_abs = max_abs.max(u.norm());
        }
        interior_maxima.push(max_abs);
    }
    let svd = linalg::svd(&values);
    let smax = svd.s.iter().copied().fold(0.0, f64::max);
    let smin = svd.s.iter().copied().fold(f64::INFINITY, f64::min);
    let gram_rank = svd.s.iter().filter(|&&x| x > 1e-4 * smax).count();
    let gram_condition = (smax / smin).powi(2);

    let ortho = linalg::weighted_orthonormalize(kernel, &w);
    let mut conj_defect = 0.0f64;
    for mu_vec in kernel {
        let conj: Vec<Complex64> = mu_vec.iter().map(|z| z.conj()).collect();
        let proj = linalg::project_onto(&conj, &ortho, &w);
        let leftover: Vec<Complex64> = conj
            .iter()
            .zip(proj.iter())
            .map(|(a, b)| a - b)
            .collect();
        conj_defect = conj_defect.max(
            linalg::weighted_norm(&leftover, &w) / linalg::weighted_norm(&conj, &w),
        );
    }
    Ok(HolmgrenReport {
        density_norms,
        interior_maxima,
        gram_rank,
        gram_condition,
        conjugate_span_defect: conj_defect,
    })
}

/// Decomposition of an interior Helmholtz solution into a single layer with
/// a supplement-constrained density plus a double layer with a density in
/// the kernel of -1/2 I + W.
#[derive(Clone, Debug)]
pub struct XiDecomposition {
    pub k: Wavenumber,
    pub phi: Density,
    pub psi: Density,
    pub reconstruction_error: f64,
}

impl XiDecomposition {
    pub fn eval(&self, grid: &QuadGrid, x: [f64; 2]) -> Result<Complex64> {
        Ok(potentials::single_layer_field(self.k, grid, &self.phi, x)?
            + potentials::double_layer_field(self.k, grid, &self.psi, x)?)
    }
}

/// Decompose a solution from its Cauchy traces: solve
/// (-1/2 I + Wt) phi = du/dnu with phi in the arclength-orthogonal
/// supplement of the kernel, then fit the trace residual inside
/// Ker(-1/2 I + W).
pub fn xi_decompose(
    k: Wavenumber,
    grid: &QuadGrid,
    u_trace: &Density,
    un_trace: &Density,
) -> Result<XiDecomposition> {
    // hypothesis: k^2 avoids the Dirichlet spectrum of every hole
    for j in 1..=grid.domain().kappa_minus() {
        let margin = hole_spectral_margin(ScanRole::InteriorDirichlet, k, grid, j)?;
        if margin < HYPOTHESIS_REL_TOL {
            return Err(Error::HypothesisViolated(format!(
                "k^2 is a Dirichlet eigenvalue of bounded complement component {j} (margin {margin:.2e})"
            )));
        }
    }
    let w = grid.weights();
    let adjoint = nystrom::assemble_wt(k, grid).plus_identity(Complex64::new(-0.5, 0.0));
    let svd = linalg::svd(&adjoint);
    let kernel = linalg::weighted_orthonormalize(
        &svd.nullspace(linalg::KERNEL_REL_TOL),
        &w,
    );
    let rhs = Array1::from(un_trace.values().to_vec());
    let mut phi = svd.solve_min_norm(&rhs, linalg::LSTSQ_REL_TOL);
    // supplement constraint: remove any arclength component along the kernel
    let along = linalg::project_onto(phi.as_slice().unwrap(), &kernel, &w);
    phi -= &along;
    let phi = Density::new(grid, phi.to_vec())?;

    // residual trace belongs to Ker(-1/2 I + W); its members are traces of
    // double layer potentials w+[psi] with trace psi itself
    let trace_v = nystrom::assemble_v(k, grid).apply(&phi);
    let rho: Vec<Complex64> = u_trace
        .values()
        .iter()
        .zip(&trace_v)
        .map(|(u, v)| u - v)
        .collect();
    let w_kernel = kernel_basis(ScanRole::InteriorNeumann, k, grid);
    let psi_vec = linalg::project_onto(&rho, &w_kernel, &w);
    let psi = Density::new(grid, psi_vec.to_vec())?;

    let recon: Vec<Complex64> = trace_v
        .iter()
        .zip(psi.values())
        .map(|(v, p)| v + p)
        .collect();
    let diff: Vec<Complex64> = recon
        .iter()
        .zip(u_trace.values())
        .map(|(a, b)| a - b)
        .collect();
    let u_norm = linalg::weighted_norm(u_trace.values(), &w);
    let err = if u_norm == 0.0 {
        linalg::weighted_norm(&diff, &w)
    } else {
        linalg::weighted_norm(&diff, &w) / u_norm
    };
    if err > 1e-5 {
        return Err(Error::NoConvergence(format!(
            "trace reconstruction residual {err:.3e} exceeds 1e-5"
        )));
    }
    Ok(XiDecomposition {
        k,
        phi,
        psi,
        reconstruction_error: err,
    })
}

/// Numerical rank of the stacked trace map (phi, psi) -> V phi + psi over
/// the supplement times the kernel of -1/2 I + W; full rank is the discrete
/// injectivity statement for the representation map.
pub fn xi_trace_map_rank(k: Wavenumber, grid: &QuadGrid) -> Result<(usize, usize)> {
    let n = grid.node_count();
    let w = grid.weights();
    let adjoint = nystrom::assemble_wt(k, grid).plus_identity(Complex64::new(-0.5, 0.0));
    let adjoint_kernel = linalg::weighted_orthonormalize(
        &linalg::nullspace(&adjoint, linalg::KERNEL_REL_TOL),
        &w,
    );
    let d = adjoint_kernel.len();
    // arclength-orthonormal basis of the supplement: complete the kernel to
    // a full basis and drop the kernel part
    let mut vectors = adjoint_kernel.clone();
    for i in 0..n {
        let mut e = Array1::<Complex64>::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        vectors.push(e);
    }
    let full = linalg::weighted_orthonormalize(&vectors, &w);
    let supplement = &full[d..];

    let w_kernel = kernel_basis(ScanRole::InteriorNeumann, k, grid);
    let dprime = w_kernel.len();
    let v_op = nystrom::assemble_v(k, grid);
    let mut m = Array2::<Complex64>::zeros((n, n - d + dprime));
    for (col, phi) in supplement.iter().enumerate() {
        let v_phi = v_op.matrix.dot(phi);
        m.slice_mut(s![.., col]).assign(&v_phi);
    }
    for (col, psi) in w_kernel.iter().enumerate() {
        m.slice_mut(s![.., n - d + col]).assign(psi);
    }
    let rank = linalg::svd(&m).rank(linalg::KERNEL_REL_TOL);
    Ok((rank, n - d + dprime))
}

/// Sobolev-scaled condition number of the single layer operator: V maps a
/// half-order-smoother space onto a half-order-rougher one, so the raw
/// matrix condition grows linearly with n. Conjugating with the Fourier
/// multiplier (1 + m^2)^{1/4} on each curve removes that order; the scaled
/// condition plateaus iff V stays an isomorphism.
pub fn single_layer_scaled_condition(k: Wavenumber, grid: &QuadGrid) -> f64 {
    let n = grid.node_count();
    let mut weight = Array2::<Complex64>::zeros((n, n));
    for (c, cg) in grid.curve_grids().iter().enumerate() {
        let o = grid.offset(c);
        let nc = cg.n;
        let modes: Vec<f64> = (0..nc)
            .map(|mi| {
                let m = if mi <= nc / 2 { mi as f64 } else { mi as f64 - nc as f64 };
                (1.0 + m * m).powf(0.25)
            })
            .collect();
        for i in 0..nc {
            for j in 0..nc {
                let mut sum = Complex64::new(0.0, 0.0);
                for (mi, &lambda) in modes.iter().enumerate() {
                    let phase = TAU * mi as f64 * (i as f64 - j as f64) / nc as f64;
                    sum += lambda * Complex64::new(phase.cos(), phase.sin());
                }
                weight[[o + i, o + j]] = sum / nc as f64;
            }
        }
    }
    let v = nystrom::assemble_v(k, grid);
    let b = weight.dot(&v.matrix).dot(&weight);
    let s = linalg::singular_values(&b);
    let smax = s.iter().copied().fold(0.0, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    smax / smin
}
