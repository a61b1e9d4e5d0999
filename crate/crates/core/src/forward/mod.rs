//! Helmholtz solver on truncated perturbed surfaces with transparent
//! (outgoing-branch Robin) boundary conditions, the physical S-matrix and the
//! generalized S-matrix of exponentially growing cusp data.

mod axisym;
mod fem2d;
mod genscatter;
mod numerov;
mod smatrix;

pub use axisym::{transparent_bc, AxisymGeometry, EndKind};
pub use fem2d::fem2d_smatrix;
pub use genscatter::{gen_smatrix_vs_ndmap, generalized_smatrix_apply, GenScatterData};
pub use numerov::{ModeProblem, ModeSolution, RobinBc};
pub use smatrix::{physical_smatrix, solve_helmholtz, Channel, HelmholtzDrive, ScatterMatrix};

use crate::charts::{synth, SurfaceSpec};
use crate::{Error, Result};

/// Which discretization carries a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// per-mode 1-D boundary problems on the log radial grid; the precision
    /// workhorse for rotationally symmetric surfaces
    ModeOde,
    /// P1 elements on the (x, log y) cylinder mesh; lower accuracy, no
    /// symmetry requirement
    Fem2d,
}

/// A truncated scattering problem: the surface, the energy, truncation
/// locations inside the exact/tabulated regions, and solver resolution.
#[derive(Debug, Clone)]
pub struct TruncatedProblem {
    pub surface: SurfaceSpec,
    pub geometry: AxisymGeometry,
    pub k: f64,
    /// cusp truncation height Y > 2
    pub y_top: f64,
    /// regular truncation depth in (0, 1); ignored for one-ended geometry
    pub y_bottom: f64,
    pub n_max: i64,
    pub grid_points: usize,
    pub backend: Backend,
}

impl TruncatedProblem {
    pub fn new(surface: SurfaceSpec, k: f64, y_top: f64, y_bottom: f64) -> Result<Self> {
        let geometry = AxisymGeometry::from_surface(&surface)?;
        if !(k > 0.0) {
            return Err(Error::OutOfDomain(format!("k must be > 0, got {k}")));
        }
        if y_top <= 2.0 {
            return Err(Error::InvalidArgument(format!(
                "cusp truncation must satisfy Y > 2, got {y_top}"
            )));
        }
        if matches!(geometry, AxisymGeometry::Cylinder { .. })
            && !(0.0 < y_bottom && y_bottom < 1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "regular truncation must lie in (0, 1), got {y_bottom}"
            )));
        }
        if let AxisymGeometry::Cylinder { bump: Some(b), .. } = &geometry {
            let (lo, hi) = b.support();
            if lo <= y_bottom || hi >= 1.0 {
                return Err(Error::InvalidArgument(format!(
                    "perturbation support [{lo}, {hi}] must lie strictly between the regular \
                     truncation and the cusp entrance"
                )));
            }
        }
        Ok(TruncatedProblem {
            surface,
            geometry,
            k,
            y_top,
            y_bottom,
            n_max: 16,
            grid_points: 6000,
            backend: Backend::ModeOde,
        })
    }

    pub fn with_resolution(mut self, n_max: i64, grid_points: usize) -> Self {
        self.n_max = n_max;
        self.grid_points = grid_points;
        self
    }

    pub fn with_backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn radius(&self) -> f64 {
        self.geometry.radius()
    }

    /// Gauge factor rho = (free volume density)/(perturbed volume density) on
    /// the cylinder: 1/sqrt(1 + a1(y)); identically 1 where the metric is
    /// exact and near conical points.
    pub fn gauge_factor(&self, y: f64) -> f64 {
        match &self.geometry {
            AxisymGeometry::Cylinder { bump: Some(b), .. } => 1.0 / (1.0 + b.a(y)).sqrt(),
            _ => 1.0,
        }
    }
}

impl AxisymGeometry {
    /// Reads the analytic geometry off a spec surface; the tabulated
    /// axisymmetric bump is reconstructed exactly for the bump family the
    /// generators produce (max value at the midpoint of the tabulated span).
    pub fn from_surface(surface: &SurfaceSpec) -> Result<AxisymGeometry> {
        surface.validate()?;
        let radius = surface.ends[0].radius();
        match surface.name.as_str() {
            "cigar" => Ok(AxisymGeometry::Cigar(synth::Cigar::new(radius, 2.0))),
            _ => {
                if surface.ends.len() != 2 || surface.ends[1].is_cusp() {
                    return Err(Error::InvalidArgument(
                        "mode-ode geometry needs one cusp and one regular end, or the cigar"
                            .into(),
                    ));
                }
                let bump = surface.axisym_a1.as_ref().map(|profile| {
                    let amp = profile.f.iter().cloned().fold(0.0f64, f64::max);
                    let lo = profile.grid_r[0];
                    let hi = *profile.grid_r.last().unwrap();
                    synth::Bump {
                        amp,
                        center: (lo + hi) / 2.0,
                        width: (hi - lo) / 2.0,
                    }
                });
                Ok(AxisymGeometry::Cylinder { radius, bump })
            }
        }
    }
}
