//! The four boundary value problems solved through two-density layer
//! ansatzes, with obstruction bases and compatibility projection at
//! eigenvalue-coincident wavenumbers.
//!
//! Ansatzes and one-sided trace identities (nu always the outward normal of
//! the bounded domain):
//!
//! * interior Dirichlet: u = w+[phi] + v+[psi], (1/2 I + W) phi + V psi = g
//! * exterior Dirichlet: u = w-[phi] + v-[psi], (-1/2 I + W) phi + V psi = g
//! * interior Neumann:   u = v+[phi] + w+[psi], (-1/2 I + Wt) phi + T psi = g
//! * exterior Neumann:   u = v-[phi] + w-[psi], (1/2 I + Wt) phi + T psi = g,
//!   where the datum is g = -du/dnu_(complement) = +du/dnu.
//!
//! Each problem is solvable iff the datum annihilates the corresponding
//! kernel: Ker(1/2 I + Wt), Ker(-1/2 I + Wt), Ker(-1/2 I + W), Ker(1/2 I + W).

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::QuadGrid;
use crate::linalg;
use crate::nystrom::{self, BoundaryOperator};
use crate::potentials::{self, Density};
use crate::specfun::Wavenumber;

/// Compatibility defect above which a solve is flagged NOT-SOLVABLE.
pub const COMPAT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    InteriorDirichlet,
    ExteriorDirichlet,
    InteriorNeumann,
    ExteriorNeumann,
}

impl Problem {
    pub fn is_exterior(self) -> bool {
        matches!(self, Problem::ExteriorDirichlet | Problem::ExteriorNeumann)
    }

    pub fn is_dirichlet(self) -> bool {
        matches!(self, Problem::InteriorDirichlet | Problem::ExteriorDirichlet)
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::InteriorDirichlet => "interior-dirichlet",
            Problem::ExteriorDirichlet => "exterior-dirichlet",
            Problem::InteriorNeumann => "interior-neumann",
            Problem::ExteriorNeumann => "exterior-neumann",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "interior-dirichlet" => Ok(Problem::InteriorDirichlet),
            "exterior-dirichlet" => Ok(Problem::ExteriorDirichlet),
            "interior-neumann" => Ok(Problem::InteriorNeumann),
            "exterior-neumann" => Ok(Problem::ExteriorNeumann),
            other => Err(Error::InvalidInput(format!("unknown problem '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BvpSpec {
    pub problem: Problem,
    pub k: Wavenumber,
    pub data: Density,
}

/// Arclength-orthonormal basis of the data obstruction space of a problem.
#[derive(Clone, Debug)]
pub struct ObstructionBasis {
    pub problem: Problem,
    pub vectors: Vec<Array1<Complex64>>,
}

impl ObstructionBasis {
    pub fn dimension(&self) -> usize {
        self.vectors.len()
    }
}

/// A solved boundary value problem: the density pair of the layer ansatz
/// plus solvability diagnostics.
#[derive(Clone, Debug)]
pub struct Solution {
    pub problem: Problem,
    pub k: Wavenumber,
    /// Density of the leading potential in the ansatz (double layer for
    /// Dirichlet problems, single layer for Neumann problems).
    pub phi: Density,
    /// Density of the trailing potential (single layer for Dirichlet,
    /// double layer for Neumann).
    pub psi: Density,
    /// Relative arclength-norm residual of the discrete system.
    pub residual: f64,
    /// Relative size of the data component inside the obstruction space.
    pub compatibility_defect: f64,
    /// Dimension of the obstruction space encountered at this wavenumber.
    pub kernel_dim: usize,
    /// Whether the compatibility condition holds to tolerance.
    pub solvable: bool,
}

impl Solution {
    /// Field value of the reconstruction at an admissible point.
    pub fn eval(&self, grid: &QuadGrid, x: [f64; 2]) -> Result<Complex64> {
        if self.problem.is_dirichlet() {
            Ok(potentials::double_layer_field(self.k, grid, &self.phi, x)?
                + potentials::single_layer_field(self.k, grid, &self.psi, x)?)
        } else {
            Ok(potentials::single_layer_field(self.k, grid, &self.phi, x)?
                + potentials::double_layer_field(self.k, grid, &self.psi, x)?)
        }
    }

    /// Gradient of the reconstruction at an admissible point.
    pub fn eval_gradient(&self, grid: &QuadGrid, x: [f64; 2]) -> Result<[Complex64; 2]> {
        let (single, double) = if self.problem.is_dirichlet() {
            (&self.psi, &self.phi)
        } else {
            (&self.phi, &self.psi)
        };
        let gs = potentials::single_layer_gradient(self.k, grid, single, x)?;
        let gd = potentials::double_layer_gradient(self.k, grid, double, x)?;
        Ok([gs[0] + gd[0], gs[1] + gd[1]])
    }

    /// Single-layer and double-layer densities of the reconstruction,
    /// in that order.
    pub fn layer_densities(&self) -> (&Density, &Density) {
        if self.problem.is_dirichlet() {
            (&self.psi, &self.phi)
        } else {
            (&self.phi, &self.psi)
        }
    }
}

fn half() -> Complex64 {
    Complex64::new(0.5, 0.0)
}

/// The operator whose kernel carries the obstruction densities of a problem.
fn obstruction_operator(problem: Problem, k: Wavenumber, grid: &QuadGrid) -> Array2<Complex64> {
    match problem {
        Problem::InteriorDirichlet => nystrom::assemble_wt(k, grid).plus_identity(half()),
        Problem::ExteriorDirichlet => nystrom::assemble_wt(k, grid).plus_identity(-half()),
        Problem::InteriorNeumann => nystrom::assemble_w(k, grid).plus_identity(-half()),
        Problem::ExteriorNeumann => nystrom::assemble_w(k, grid).plus_identity(half()),
    }
}

/// Orthonormal (arclength inner product) basis of the obstruction space:
/// the cokernel of the stacked two-density system. Kernel vectors of the
/// trace operator obstruct the data only when the ansatz's other block also
/// annihilates them (V for the Dirichlet systems, T for the Neumann ones),
/// which is exactly the eigen-density characterization.
pub fn obstruction_basis(problem: Problem, k: Wavenumber, grid: &QuadGrid) -> ObstructionBasis {
    let op = obstruction_operator(problem, k, grid);
    let side = if problem.is_dirichlet() {
        nystrom::assemble_v(k, grid).matrix
    } else {
        nystrom::assemble_t(k, grid).matrix
    };
    let vectors = linalg::constrained_nullspace(&op, &side, &grid.weights());
    ObstructionBasis { problem, vectors }
}

/// Remove the obstruction component from g; returns the compatible part and
/// the relative defect that was removed.
pub fn compat_project(
    basis: &ObstructionBasis,
    grid: &QuadGrid,
    g: &Density,
) -> Result<(Density, f64)> {
    let w = grid.weights();
    let norm = linalg::weighted_norm(g.values(), &w);
    if basis.vectors.is_empty() || norm == 0.0 {
        return Ok((g.clone(), 0.0));
    }
    let p = linalg::project_onto(g.values(), &basis.vectors, &w);
    let defect = linalg::weighted_norm(p.as_slice().unwrap(), &w) / norm;
    let compatible: Vec<Complex64> = g
        .values()
        .iter()
        .zip(p.iter())
        .map(|(gi, pi)| gi - pi)
        .collect();
    Ok((Density::new(grid, compatible)?, defect))
}

/// Assemble the two block operators of the ansatz for a problem.
fn ansatz_blocks(
    problem: Problem,
    k: Wavenumber,
    grid: &QuadGrid,
) -> (Array2<Complex64>, BoundaryOperator) {
    match problem {
        Problem::InteriorDirichlet => (
            nystrom::assemble_w(k, grid).plus_identity(half()),
            nystrom::assemble_v(k, grid),
        ),
        Problem::ExteriorDirichlet => (
            nystrom::assemble_w(k, grid).plus_identity(-half()),
            nystrom::assemble_v(k, grid),
        ),
        Problem::InteriorNeumann => (
            nystrom::assemble_wt(k, grid).plus_identity(-half()),
            nystrom::assemble_t(k, grid),
        ),
        Problem::ExteriorNeumann => (
            nystrom::assemble_wt(k, grid).plus_identity(half()),
            nystrom::assemble_t(k, grid),
        ),
    }
}

/// Solve a boundary value problem by the two-density stacked system,
/// minimal-norm truncated-SVD least squares.
///
/// The raw datum is always solved as given; an incompatible datum yields a
/// least-squares minimizer flagged not-solvable, with the defect reported.
pub fn solve(grid: &QuadGrid, spec: &BvpSpec) -> Result<Solution> {
    let n = grid.node_count();
    if spec.data.len() != n {
        return Err(Error::DensityLength {
            expected: n,
            got: spec.data.len(),
        });
    }
    let basis = obstruction_basis(spec.problem, spec.k, grid);
    let w = grid.weights();
    let g_norm = linalg::weighted_norm(spec.data.values(), &w);
    let defect = if basis.vectors.is_empty() || g_norm == 0.0 {
        0.0
    } else {
        let p = linalg::project_onto(spec.data.values(), &basis.vectors, &w);
        linalg::weighted_norm(p.as_slice().unwrap(), &w) / g_norm
    };

    let (block_a, block_b) = ansatz_blocks(spec.problem, spec.k, grid);
    let mut stacked = Array2::<Complex64>::zeros((n, 2 * n));
    stacked.slice_mut(s![.., ..n]).assign(&block_a);
    stacked.slice_mut(s![.., n..]).assign(&block_b.matrix);

    let svd = linalg::svd(&stacked);
    let rank = svd.rank(linalg::KERNEL_REL_TOL);
    let expected_rank = n - basis.dimension();
    if rank < expected_rank {
        return Err(Error::SingularGeometry {
            rank,
            expected: expected_rank,
        });
    }

    let b = Array1::from(spec.data.values().to_vec());
    let x = svd.solve_min_norm(&b, linalg::LSTSQ_REL_TOL);
    let fitted = stacked.dot(&x);
    let residual_vec: Vec<Complex64> = fitted
        .iter()
        .zip(spec.data.values())
        .map(|(f, g)| f - g)
        .collect();
    let residual = if g_norm == 0.0 {
        linalg::weighted_norm(&residual_vec, &w)
    } else {
        linalg::weighted_norm(&residual_vec, &w) / g_norm
    };

    let phi = Density::new(grid, x.slice(s![..n]).to_vec())?;
    let psi = Density::new(grid, x.slice(s![n..]).to_vec())?;
    Ok(Solution {
        problem: spec.problem,
        k: spec.k,
        phi,
        psi,
        residual,
        compatibility_defect: defect,
        kernel_dim: basis.dimension(),
        solvable: defect <= COMPAT_TOL,
    })
}

/// Third Green identity residual: w+[u_trace](x) - v+[un_trace](x) - u(x)
/// for an interior point x and the value u(x) of the underlying solution.
pub fn greens_identity_residual(
    k: Wavenumber,
    grid: &QuadGrid,
    u_trace: &Density,
    un_trace: &Density,
    x: [f64; 2],
    u_at_x: Complex64,
) -> Result<Complex64> {
    let w = potentials::double_layer_field(k, grid, u_trace, x)?;
    let v = potentials::single_layer_field(k, grid, un_trace, x)?;
    Ok(w - v - u_at_x)
}
