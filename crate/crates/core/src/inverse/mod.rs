//! Boundary-control toolkit on discretized interiors: boundary spectral
//! projections, the Neumann-to-Dirichlet map, spectral wave synthesis,
//! Blagovestchenskii inner products, domain-of-influence areas by quadratic
//! minimization, Green's-function excision, Phi-relatedness and conical-point
//! detection.

mod archive;
mod detect;
mod excise;
mod fem;
mod influence;
mod ndmap;
mod wave;

pub use archive::{read_bsp_archive, write_bsp_archive, write_bsp_text};
pub use detect::{detect_singularities, DetectMode, Detection};
pub use excise::{excise_greens, phi_related_check, DiscSpec, ExcisedKernel};
pub use fem::{eig_bsp, heat_trace_completeness, EigenBasis};
pub use influence::{influence_area, InfluenceReport, InfluenceSpec};
pub use ndmap::{mode_nd_map, nd_map, nd_map_direct, nd_residue, ModeNdMap, NdMap};
pub use wave::{blago_inner, blago_mass, wave_solve, BoundarySource, WaveSynthesis};

use crate::Result;

/// Boundary spectral projection: eigenvalues of the shifted Neumann operator
/// -Delta_g - 1/4 together with eigenfunction traces on a boundary curve.
/// Traces are mass-orthonormal; eigenvalues ascend and carry multiplicity
/// grouping at relative gap 1e-8.
#[derive(Debug, Clone)]
pub struct Bsp {
    pub eigenvalues: Vec<f64>,
    /// traces[m][i]: eigenfunction m at curve node i
    pub traces: Vec<Vec<f64>>,
    /// lumped length weights of the curve nodes
    pub curve_weights: Vec<f64>,
    /// mesh node ids behind each curve node
    pub curve_nodes: Vec<usize>,
    /// index ranges of eigenvalue multiplicity groups
    pub groups: Vec<(usize, usize)>,
}

impl Bsp {
    pub fn n_eigs(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn curve_len(&self) -> usize {
        self.curve_nodes.len()
    }

    /// Total curve length.
    pub fn curve_length(&self) -> f64 {
        self.curve_weights.iter().sum()
    }

    /// Projection kernel of one multiplicity group on the curve:
    /// K(x_i, x_j) = sum over the group of phi(x_i) phi(x_j).
    pub fn group_kernel(&self, g: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.groups[g];
        let n = self.curve_len();
        let mut k = vec![vec![0.0; n]; n];
        for m in lo..hi {
            for i in 0..n {
                for j in 0..n {
                    k[i][j] += self.traces[m][i] * self.traces[m][j];
                }
            }
        }
        k
    }

    /// <phi_m, f>_Gamma with the lumped length weights.
    pub fn trace_inner(&self, m: usize, f: &[f64]) -> f64 {
        self.traces[m]
            .iter()
            .zip(f)
            .zip(&self.curve_weights)
            .map(|((p, v), w)| p * v * w)
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.eigenvalues.windows(2) {
            if w[1] < w[0] - 1e-12 {
                return Err(crate::Error::InvalidArgument(
                    "BSP eigenvalues must ascend".into(),
                ));
            }
        }
        Ok(())
    }
}

fn group_eigenvalues(eigenvalues: &[f64]) -> Vec<(usize, usize)> {
    let mut groups = Vec::new();
    let mut lo = 0;
    for m in 1..=eigenvalues.len() {
        let split = if m == eigenvalues.len() {
            true
        } else {
            let scale = eigenvalues[m].abs().max(eigenvalues[lo].abs()).max(1.0);
            (eigenvalues[m] - eigenvalues[m - 1]).abs() > 1e-8 * scale
        };
        if split {
            groups.push((lo, m));
            lo = m;
        }
    }
    groups
}

pub(crate) use group_eigenvalues as group_eigs;
