//! FEM eigenassembly on metric triangle meshes: the lowest modes of the
//! shifted Neumann operator -Delta_g - 1/4 through shift-invert Lanczos on
//! the (stiffness, lumped mass) pencil.

use super::{group_eigs, Bsp};
use crate::charts::TriMesh;
use crate::numerics::lowest_eigenpairs;
use crate::{Error, Result};

/// Full eigenbasis of a mesh: eigenvalues and mass-orthonormal nodal
/// eigenvectors; the interior companion of a Bsp for oracle-side checks.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub mass: Vec<f64>,
    pub total_area: f64,
}

impl EigenBasis {
    /// Interior L^2 inner product of two nodal fields.
    pub fn mass_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter()
            .zip(v)
            .zip(&self.mass)
            .map(|((a, b), m)| a * b * m)
            .sum()
    }
}

/// Lowest `n_eigs` eigenpairs of the Neumann problem on the mesh, restricted
/// to the named boundary chain. Rejects requests beyond the mesh's Nyquist
/// capacity (lambda_n h^2 > 0.5).
pub fn eig_bsp(mesh: &TriMesh, curve: &str, n_eigs: usize) -> Result<(Bsp, EigenBasis)> {
    if n_eigs == 0 {
        return Err(Error::InvalidArgument("n_eigs must be positive".into()));
    }
    let chain: Vec<usize> = mesh.boundary_chain(curve)?.to_vec();
    let k_stiff = mesh.stiffness();
    let mass = mesh.lumped_mass();
    let mut k_h = k_stiff;
    for (i, m) in mass.iter().enumerate() {
        k_h.add(i, i, -0.25 * m);
    }
    let (eigenvalues, vectors) = lowest_eigenpairs(&k_h, &mass, n_eigs, -1.0);
    if eigenvalues.len() < n_eigs {
        return Err(Error::Numerical(format!(
            "eigensolver returned {} of {} requested modes",
            eigenvalues.len(),
            n_eigs
        )));
    }
    // Nyquist guard: reject eigenvalues the mesh cannot represent
    let h = typical_edge(mesh);
    if let Some(last) = eigenvalues.last() {
        if (last + 0.25) * h * h > 0.5 {
            return Err(Error::InvalidArgument(format!(
                "mesh too coarse for {n_eigs} modes: lambda h^2 = {}",
                (last + 0.25) * h * h
            )));
        }
    }
    let closed = curve == "outer";
    let (_seg, weights) = mesh.chain_lengths(&chain, closed);
    let traces: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| chain.iter().map(|&i| v[i]).collect())
        .collect();
    let groups = group_eigs(&eigenvalues);
    let bsp = Bsp {
        eigenvalues: eigenvalues.clone(),
        traces,
        curve_weights: weights,
        curve_nodes: chain,
        groups,
    };
    bsp.validate()?;
    Ok((
        bsp,
        EigenBasis {
            eigenvalues,
            vectors,
            mass,
            total_area: mesh.total_area(),
        },
    ))
}

fn typical_edge(mesh: &TriMesh) -> f64 {
    let mut acc = 0.0;
    let mut count = 0.0;
    for tri in mesh.triangles.iter().take(200) {
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            let p = mesh.vertices[tri[a]];
            let q = mesh.vertices[tri[b]];
            acc += ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt();
            count += 1.0;
        }
    }
    acc / count
}

/// BSP completeness diagnostic: the heat-regularized trace
/// sum_n e^{-tau (lambda_n + 1/4)} |phi_n|_Gamma^2-weighted against the same
/// sum computed from the full eigenbasis (exact for the discrete operator
/// once tau suppresses the uncomputed tail).
pub fn heat_trace_completeness(bsp: &Bsp, basis: &EigenBasis, tau: f64) -> f64 {
    let m = bsp.n_eigs();
    let mut from_bsp = 0.0;
    for n in 0..m {
        let w: f64 = bsp.traces[n]
            .iter()
            .zip(&bsp.curve_weights)
            .map(|(p, w)| p * p * w)
            .sum();
        from_bsp += (-tau * (bsp.eigenvalues[n] + 0.25)).exp() * w;
    }
    let mut full = 0.0;
    for (n, lam) in basis.eigenvalues.iter().enumerate() {
        let w: f64 = bsp
            .curve_nodes
            .iter()
            .zip(&bsp.curve_weights)
            .map(|(&i, w)| basis.vectors[n][i].powi(2) * w)
            .sum();
        full += (-tau * (lam + 0.25)).exp() * w;
    }
    (from_bsp - full).abs() / full.max(1e-300)
}
