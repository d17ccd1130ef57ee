//! 2D Helmholtz boundary-integral solver.
//!
//! Layer potentials over smooth multiply connected domains, Nystrom
//! discretization of the boundary operators V, W, Wt, T, the four classical
//! boundary value problems with eigenvalue-coincident compatibility handling,
//! eigenvalue scans, and the single-layer representation map.

pub mod bvp;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod geometry;
pub mod nystrom;
pub mod potentials;
pub mod spectra;
pub mod specfun;

pub use error::{Error, Result};
pub use specfun::Wavenumber;
