//! Neumann-to-Dirichlet maps: the spectral form over a BSP with a reference
//! tail completion, the direct FEM solve it must agree with, contour residue
//! extraction, and the per-mode radial variant for rotationally symmetric
//! interiors.

use super::Bsp;
use crate::charts::synth::Cigar;
use crate::charts::TriMesh;
use crate::numerics::{
    solve_complex_tridiag, symtridiag_eigenvalues, symtridiag_eigenvector, BandedLu,
};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Discrete N-D map at spectral parameter z: maps nodal Neumann data on the
/// curve to the Dirichlet trace.
#[derive(Debug, Clone)]
pub struct NdMap {
    pub z: Complex64,
    pub matrix: DMatrix<Complex64>,
}

impl NdMap {
    /// Asymmetry of the matrix against the curve measure (the operator is
    /// symmetric in the dl-weighted pairing).
    pub fn symmetry_defect(&self, weights: &[f64]) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let a = self.matrix[(i, j)] * weights[i];
                let b = self.matrix[(j, i)] * weights[j];
                worst = worst.max((a - b).norm());
                scale = scale.max(a.norm());
            }
        }
        worst / scale.max(1e-300)
    }
}

/// Spectral N-D map over the BSP modes:
/// Lambda(z) = sum_n (lambda_n - z)^{-1} P_n-trace, with the uncomputed tail
/// completed through a direct reference solve at z_ref far below the
/// spectrum: Lambda(z) = Lambda_dir(z_ref) + (z - z_ref) sum_n
/// traces (x) traces / ((lambda_n - z)(lambda_n - z_ref)).
pub fn nd_map(bsp: &Bsp, mesh: &TriMesh, z: Complex64) -> Result<NdMap> {
    let gap = bsp
        .eigenvalues
        .iter()
        .map(|l| (Complex64::new(*l, 0.0) - z).norm())
        .fold(f64::INFINITY, f64::min);
    if gap < 1e-6 {
        return Err(Error::NearResonance(format!(
            "z = {z} within 1e-6 of an eigenvalue"
        )));
    }
    let z_ref = Complex64::new(bsp.eigenvalues[0] - 25.0, 0.0);
    let base = nd_map_direct(mesh, bsp, z_ref)?;
    let n = bsp.curve_len();
    let mut matrix = base.matrix;
    for m in 0..bsp.n_eigs() {
        let lam = Complex64::new(bsp.eigenvalues[m], 0.0);
        let c = (z - z_ref) / ((lam - z) * (lam - z_ref));
        for i in 0..n {
            for j in 0..n {
                matrix[(i, j)] +=
                    c * bsp.traces[m][i] * bsp.traces[m][j] * bsp.curve_weights[j];
            }
        }
    }
    Ok(NdMap { z, matrix })
}

/// Purely spectral N-D map without tail completion; the object whose poles
/// and residues the contour tests probe.
pub fn nd_map_spectral(bsp: &Bsp, z: Complex64) -> NdMap {
    let n = bsp.curve_len();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for m in 0..bsp.n_eigs() {
        let c = 1.0 / (Complex64::new(bsp.eigenvalues[m], 0.0) - z);
        for i in 0..n {
            for j in 0..n {
                matrix[(i, j)] +=
                    c * bsp.traces[m][i] * bsp.traces[m][j] * bsp.curve_weights[j];
            }
        }
    }
    NdMap { z, matrix }
}

/// Direct-solve N-D map: one banded factorization of K_H - z M, one solve per
/// curve node, Dirichlet traces collected columnwise.
pub fn nd_map_direct(mesh: &TriMesh, bsp: &Bsp, z: Complex64) -> Result<NdMap> {
    let nfull = mesh.num_vertices();
    let k_stiff = mesh.stiffness();
    let mass = mesh.lumped_mass();
    let bw = mesh.bandwidth;
    let lu = BandedLu::factor(nfull, bw, bw, |i, j| {
        let mut v = Complex64::new(k_stiff.get(i, j), 0.0);
        if i == j {
            v -= (z + 0.25) * mass[i];
        }
        v
    })
    .ok_or_else(|| Error::NearResonance(format!("singular operator at z = {z}")))?;
    if lu.min_pivot() < 1e-10 {
        return Err(Error::NearResonance(format!(
            "near-singular operator at z = {z} (pivot {})",
            lu.min_pivot()
        )));
    }
    let nc = bsp.curve_len();
    let mut matrix = DMatrix::<Complex64>::zeros(nc, nc);
    for (col, (&node, &w)) in bsp
        .curve_nodes
        .iter()
        .zip(&bsp.curve_weights)
        .enumerate()
    {
        // Neumann datum = nodal delta against dl: load vector w e_node
        let mut rhs = vec![Complex64::default(); nfull];
        rhs[node] = Complex64::new(w, 0.0);
        let sol = lu.solve(&rhs);
        for (row, &rnode) in bsp.curve_nodes.iter().enumerate() {
            matrix[(row, col)] = sol[rnode] / w * bsp.curve_weights[col];
        }
    }
    // columns were built per unit nodal load; rescale to the operator that
    // integrates data against dl: Lambda f (x_i) = sum_j Lambda_ij f_j
    Ok(NdMap { z, matrix })
}

/// Contour extraction of the residue of the spectral N-D map at eigenvalue
/// group g: (1/2 pi i) \oint Lambda(z) dz on a circle around the group,
/// which equals minus the group's trace kernel (weighted).
pub fn nd_residue(bsp: &Bsp, g: usize, radius: f64, points: usize) -> DMatrix<f64> {
    let (lo, _hi) = bsp.groups[g];
    let center = Complex64::new(bsp.eigenvalues[lo], 0.0);
    let n = bsp.curve_len();
    let mut acc = DMatrix::<Complex64>::zeros(n, n);
    for p in 0..points {
        let th = 2.0 * std::f64::consts::PI * p as f64 / points as f64;
        let z = center + radius * Complex64::new(th.cos(), th.sin());
        let nd = nd_map_spectral(bsp, z);
        // dz = i radius e^{i th} dth
        let dz = Complex64::new(0.0, 1.0) * radius * Complex64::new(th.cos(), th.sin());
        acc += nd.matrix * dz * Complex64::new(2.0 * std::f64::consts::PI / points as f64, 0.0);
    }
    acc /= Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    DMatrix::from_fn(n, n, |i, j| acc[(i, j)].re)
}

/// Per-mode radial N-D map of a one-cusp interior (the cigar below y0 with
/// Neumann wall at rho0 = log y0): the full discrete spectral sum, realized
/// as the exact discrete resolvent plus the eigen-sum z-dependence.
#[derive(Debug, Clone)]
pub struct ModeNdMap {
    pub n: i64,
    /// 1-D interior eigenvalues of the shifted operator
    pub eigenvalues: Vec<f64>,
    /// boundary values of the mass-normalized eigenfunctions
    pub boundary_values: Vec<f64>,
    pub rho0: f64,
    pub f_rho0: f64,
    z_ref: f64,
    lambda_ref: Complex64,
}

impl ModeNdMap {
    /// Lambda_n(z): maps the per-mode Neumann datum du/d rho at rho0 to the
    /// Dirichlet value u(rho0).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = self.lambda_ref;
        for (lam, bv) in self.eigenvalues.iter().zip(&self.boundary_values) {
            let l = Complex64::new(*lam, 0.0);
            acc += (z - self.z_ref) * self.f_rho0 * bv * bv
                / ((l - z) * (l - Complex64::new(self.z_ref, 0.0)));
        }
        acc
    }
}

/// Build the per-mode interior N-D map of a cigar truncated at rho0 with a
/// Neumann wall: P1 assembly on a uniform rho-grid, full tridiagonal
/// eigendecomposition for the leading modes plus a direct reference solve.
pub fn mode_nd_map(cigar: &Cigar, n: i64, rho0: f64, points: usize, modes: usize) -> Result<ModeNdMap> {
    if rho0 <= 0.0 {
        return Err(Error::InvalidArgument(
            "the Neumann wall must sit inside the cusp (rho0 > 0)".into(),
        ));
    }
    let axis = cigar.axis();
    let h = (rho0 - axis) / points as f64;
    // nodes offset half a cell from the axis to stay clear of f = 0
    let rho: Vec<f64> = (0..=points).map(|i| axis + h * (i as f64 + 0.5)).collect();
    let nn = rho.len();
    // P1 stiffness/mass with weight f(rho): K = ∫ (u'v' + (n^2/f^2 - 1/4) u v) f
    let mut diag = vec![0.0; nn];
    let mut off = vec![0.0; nn]; // off[i] couples i-1, i
    let mut mass = vec![0.0; nn];
    let nsq = (n * n) as f64;
    for i in 0..nn - 1 {
        let fm = cigar.f((rho[i] + rho[i + 1]) / 2.0);
        let ke = fm / h;
        diag[i] += ke;
        diag[i + 1] += ke;
        off[i + 1] -= ke;
        let me = fm * h / 2.0;
        mass[i] += me;
        mass[i + 1] += me;
    }
    for i in 0..nn {
        let fi = cigar.f(rho[i]);
        let pot = if fi > 0.0 { nsq / (fi * fi) - 0.25 } else { 0.0 };
        diag[i] += pot * mass[i];
    }
    // generalized -> standard tridiagonal via the diagonal mass
    let d: Vec<f64> = (0..nn).map(|i| diag[i] / mass[i]).collect();
    let e: Vec<f64> = (0..nn)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                off[i] / (mass[i] * mass[i - 1]).sqrt()
            }
        })
        .collect();
    let eigs = symtridiag_eigenvalues(&d, &e);
    let m_keep = modes.min(nn);
    let mut eigenvalues = Vec::with_capacity(m_keep);
    let mut boundary_values = Vec::with_capacity(m_keep);
    for lam in eigs.iter().take(m_keep) {
        let v = symtridiag_eigenvector(&d, &e, *lam);
        // transform back: u_i = v_i / sqrt(mass_i); already mass-normalized
        let u_b = v[nn - 1] / mass[nn - 1].sqrt();
        eigenvalues.push(*lam);
        boundary_values.push(u_b);
    }
    // direct reference solve at z_ref: (K - z_ref M) u = e_boundary
    let z_ref = eigenvalues[0] - 30.0;
    let lower: Vec<Complex64> = (0..nn).map(|i| Complex64::new(off[i], 0.0)).collect();
    let upper: Vec<Complex64> = (0..nn)
        .map(|i| {
            if i + 1 < nn {
                Complex64::new(off[i + 1], 0.0)
            } else {
                Complex64::default()
            }
        })
        .collect();
    let dz: Vec<Complex64> = (0..nn)
        .map(|i| Complex64::new(diag[i] - z_ref * mass[i], 0.0))
        .collect();
    let mut rhs = vec![Complex64::default(); nn];
    // Neumann datum du/d rho = 1 enters the weak form as f(rho0) * v(rho0)
    let f0 = cigar.f(rho0);
    rhs[nn - 1] = Complex64::new(f0, 0.0);
    let piv = solve_complex_tridiag(&lower, &dz, &upper, &mut rhs);
    if piv < 1e-12 {
        return Err(Error::NearResonance("reference solve near-singular".into()));
    }
    Ok(ModeNdMap {
        n,
        eigenvalues,
        boundary_values,
        rho0,
        f_rho0: f0,
        z_ref,
        lambda_ref: rhs[nn - 1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{synth, Interior};
    use crate::inverse::eig_bsp;

    #[test]
    fn spectral_matches_direct_solve() {
        let s = synth::flat_strip(1.0, 1.0, 41, 41);
        let mesh = match &s.interior {
            Interior::TriMesh(m) => m,
            _ => unreachable!(),
        };
        let (bsp, _) = eig_bsp(mesh, "bottom", 40).unwrap();
        let z = Complex64::new(-1.0, 0.0);
        let spectral = nd_map(&bsp, mesh, z).unwrap();
        let direct = nd_map_direct(mesh, &bsp, z).unwrap();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..bsp.curve_len() {
            for j in 0..bsp.curve_len() {
                worst = worst.max((spectral.matrix[(i, j)] - direct.matrix[(i, j)]).norm());
                scale = scale.max(direct.matrix[(i, j)].norm());
            }
        }
        assert!(worst / scale < 1e-4, "N-D mismatch {}", worst / scale);
        // symmetry in the weighted pairing
        assert!(spectral.symmetry_defect(&bsp.curve_weights) < 1e-8);
    }

    #[test]
    fn contour_residue_recovers_projection() {
        let s = synth::flat_strip(1.0, 1.0, 33, 33);
        let mesh = match &s.interior {
            Interior::TriMesh(m) => m,
            _ => unreachable!(),
        };
        let (bsp, _) = eig_bsp(mesh, "bottom", 12).unwrap();
        let g = 1; // first nonconstant group
        let (lo, hi) = bsp.groups[g];
        let gap_next = bsp.eigenvalues[hi.min(bsp.n_eigs() - 1)] - bsp.eigenvalues[lo];
        let gap_prev = bsp.eigenvalues[lo] - bsp.eigenvalues[lo - 1];
        let radius = 0.4 * gap_prev.min(gap_next.max(gap_prev));
        let res = nd_residue(&bsp, g, radius, 64);
        // expected: minus the weighted group kernel
        let kern = bsp.group_kernel(g);
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for i in 0..bsp.curve_len() {
            for j in 0..bsp.curve_len() {
                let expect = -kern[i][j] * bsp.curve_weights[j];
                worst = worst.max((res[(i, j)] - expect).abs());
                scale = scale.max(expect.abs());
            }
        }
        assert!(worst / scale < 1e-6, "residue defect {}", worst / scale);
    }

    #[test]
    fn mode_nd_map_agrees_with_direct_interior_solve() {
        // oracle: solve the interior Robin problem directly at z and compare
        let cigar = synth::Cigar::new(1.0, 2.0);
        let rho0 = (2.5f64).ln();
        let nd = mode_nd_map(&cigar, 2, rho0, 3000, 700).unwrap();
        let z = Complex64::new(0.81, 0.0); // k = 0.9, off the interior spectrum
        let lam = nd.eval(z);
        // direct second-order solve of (L_n - z) u = 0, u'(rho0) = 1
        let axis = cigar.axis();
        let points = 6000usize;
        let h = (rho0 - axis) / points as f64;
        let rho: Vec<f64> = (0..=points).map(|i| axis + h * (i as f64 + 0.5)).collect();
        let nn = rho.len();
        let mut diag = vec![0.0; nn];
        let mut off = vec![0.0; nn];
        let mut mass = vec![0.0; nn];
        for i in 0..nn - 1 {
            let fm = cigar.f((rho[i] + rho[i + 1]) / 2.0);
            let ke = fm / h;
            diag[i] += ke;
            diag[i + 1] += ke;
            off[i + 1] -= ke;
            let me = fm * h / 2.0;
            mass[i] += me;
            mass[i + 1] += me;
        }
        for i in 0..nn {
            let fi = cigar.f(rho[i]);
            diag[i] += (4.0 / (fi * fi) - 0.25) * mass[i];
        }
        let lower: Vec<Complex64> = off.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let upper: Vec<Complex64> = (0..nn)
            .map(|i| {
                if i + 1 < nn {
                    Complex64::new(off[i + 1], 0.0)
                } else {
                    Complex64::default()
                }
            })
            .collect();
        let dz: Vec<Complex64> = (0..nn)
            .map(|i| Complex64::new(diag[i], 0.0) - z * mass[i])
            .collect();
        let mut rhs = vec![Complex64::default(); nn];
        rhs[nn - 1] = Complex64::new(cigar.f(rho0), 0.0);
        solve_complex_tridiag(&lower, &dz, &upper, &mut rhs);
        let direct = rhs[nn - 1];
        let rel = (lam - direct).norm() / direct.norm();
        assert!(rel < 1e-4, "mode N-D defect {rel}: {lam} vs {direct}");
    }
}
