//! Scattering workbench for 2-D asymptotically hyperbolic surfaces with cusps,
//! funnel-type regular ends and conical singularities.
//!
//! The crate is organized around the pipeline
//!
//! * [`mobius`] — SL(2,R) algebra on the upper half-plane,
//! * [`charts`] — coordinate charts, metrics, meshes and areas,
//! * [`specfun`] — modified Bessel functions of imaginary order, complex Gamma,
//! * [`freemodel`] — exact spectral engine for the free cylinder S¹×(0,∞),
//! * [`forward`] — Helmholtz solves, physical S-matrix, generalized S-matrix,
//! * [`inverse`] — boundary-control toolkit: BSP, N-D map, wave synthesis,
//!   domain-of-influence areas, Green's-function excision, cone detection.

pub mod charts;
pub mod forward;
pub mod freemodel;
pub mod inverse;
pub mod mobius;
pub mod numerics;
pub mod specfun;

pub use charts::{ConicalPoint, EndSpec, SurfaceSpec, TriMesh};
pub use forward::{GenScatterData, ScatterMatrix, TruncatedProblem};
pub use freemodel::{FreqConstants, ModeFunction, SpectralDatum};
pub use inverse::{Bsp, InfluenceSpec, NdMap};
pub use mobius::{MoebiusTransform, PointH, TransformClass};
pub use specfun::ScaledBessel;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("near-resonant wavenumber: {0}")]
    NearResonance(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
