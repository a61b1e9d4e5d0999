//! Shared numerical kernels: quadrature rules, banded and tridiagonal solvers,
//! symmetric eigensolvers. Nothing here is domain-specific.

pub mod banded;
pub mod lanczos;
pub mod quadrature;
pub mod tridiag;

pub use banded::{BandedCholesky, BandedLu, SymBandMatrix};
pub use lanczos::lowest_eigenpairs;
pub use quadrature::{gauss_legendre, GaussRule};
pub use tridiag::{solve_complex_tridiag, symtridiag_eigenvalues, symtridiag_eigenvector};
