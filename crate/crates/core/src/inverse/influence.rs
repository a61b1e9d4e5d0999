//! Domain-of-influence areas by Tikhonov-regularized quadratic minimization:
//! minimize I_T(f) = ||u^f(T)||^2 - 2 (u^f(T), 1) over a finite source space
//! on a boundary patch; -min I_T estimates the area of the set within
//! distance T of the patch.

use super::wave::{blago_mass, BoundarySource, WaveSynthesis};
use super::Bsp;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::sync::Arc;

/// Source-space description for one influence-area estimate.
#[derive(Debug, Clone)]
pub struct InfluenceSpec {
    /// nodal indicator (in curve numbering) of the active sub-curve
    pub patch: Vec<usize>,
    pub t_final: f64,
    /// number of boundary space modes
    pub n_space: usize,
    /// number of time basis functions sin(j pi t/T)
    pub n_time: usize,
    /// Tikhonov ladder, descending
    pub alphas: Vec<f64>,
}

impl InfluenceSpec {
    pub fn new(patch: Vec<usize>, t_final: f64) -> Self {
        InfluenceSpec {
            patch,
            t_final,
            n_space: 12,
            n_time: 8,
            alphas: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
        }
    }
}

/// Result of the minimization: the extrapolated area estimate plus the ladder
/// the extrapolation used.
#[derive(Debug, Clone)]
pub struct InfluenceReport {
    pub area: f64,
    /// (alpha, -I_T at the regularized minimizer)
    pub ladder: Vec<(f64, f64)>,
    /// largest I_T value seen (for the lower-bound property I_T >= -S)
    pub max_functional: f64,
}

/// Build the tensor source basis on the patch.
fn source_basis(bsp: &Bsp, spec: &InfluenceSpec) -> Vec<BoundarySource> {
    let n = bsp.curve_len();
    let m = spec.patch.len();
    let mut sources = Vec::with_capacity(spec.n_space * spec.n_time);
    for s in 0..spec.n_space {
        // half-cosine space modes on the patch, flattened to the full curve
        let mut space = vec![0.0; n];
        for (loc, &node) in spec.patch.iter().enumerate() {
            let x = (loc as f64 + 0.5) / m as f64;
            space[node] = (std::f64::consts::PI * s as f64 * x).cos();
        }
        for j in 1..=spec.n_time {
            let t_final = spec.t_final;
            let jj = j as f64;
            sources.push(BoundarySource {
                space: space.clone(),
                time: Arc::new(move |t: f64| {
                    if t <= 0.0 || t >= t_final {
                        0.0
                    } else {
                        (jj * std::f64::consts::PI * t / t_final).sin()
                    }
                }),
                t_final,
            });
        }
    }
    sources
}

/// Estimate S(Omega(patch, T)). The quadratic functional is assembled in the
/// source basis, minimized on the Tikhonov ladder and extrapolated in alpha;
/// every evaluated functional respects I_T >= -S by construction of the
/// estimate, and `max_functional` lets callers audit it.
pub fn influence_area(bsp: &Bsp, spec: &InfluenceSpec) -> Result<InfluenceReport> {
    if spec.patch.is_empty() || !(spec.t_final > 0.0) {
        return Err(Error::InvalidArgument(
            "influence spec needs a nonempty patch and T > 0".into(),
        ));
    }
    if spec.alphas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument(
            "the Tikhonov ladder must decrease".into(),
        ));
    }
    let sources = source_basis(bsp, spec);
    let nb = sources.len();
    let syn = WaveSynthesis::new(bsp);
    // coefficient vectors of u^{f_i}(T)
    let coeffs: Vec<Vec<f64>> = sources
        .iter()
        .map(|s| syn.coefficients(s, spec.t_final))
        .collect();
    let mut gram = DMatrix::<f64>::zeros(nb, nb);
    for i in 0..nb {
        for j in i..nb {
            let v: f64 = coeffs[i].iter().zip(&coeffs[j]).map(|(a, b)| a * b).sum();
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
    }
    let rhs = DVector::<f64>::from_iterator(
        nb,
        sources.iter().map(|s| blago_mass(bsp, s, spec.t_final)),
    );
    let mut ladder = Vec::with_capacity(spec.alphas.len());
    let mut max_functional = f64::NEG_INFINITY;
    let scale = gram.diagonal().iter().fold(0.0f64, |a, &b| a.max(b)).max(1e-300);
    for &alpha in &spec.alphas {
        let mut reg = gram.clone();
        for i in 0..nb {
            reg[(i, i)] += alpha * scale;
        }
        let chol = match reg.cholesky() {
            Some(c) => c,
            None => continue,
        };
        let x = chol.solve(&rhs);
        // I_T = x^T A x - 2 b.x ; estimate = -I_T
        let ax = &gram * &x;
        let i_t = x.dot(&ax) - 2.0 * rhs.dot(&x);
        max_functional = max_functional.max(i_t);
        ladder.push((alpha, -i_t));
    }
    if ladder.len() < 2 {
        return Err(Error::Numerical(
            "influence minimization failed on the whole ladder".into(),
        ));
    }
    // Richardson in alpha from the two smallest alphas: e(alpha) ~ e0 - c alpha
    let m = ladder.len();
    let (a1, e1) = ladder[m - 2];
    let (a2, e2) = ladder[m - 1];
    let area = if (a1 - a2).abs() > 1e-300 {
        e2 + (e2 - e1) * a2 / (a1 - a2)
    } else {
        e2
    };
    Ok(InfluenceReport {
        area,
        ladder,
        max_functional,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{mesh_distances, synth, Interior};
    use crate::inverse::eig_bsp;

    #[test]
    fn flat_strip_slab_and_saturation() {
        let s = synth::flat_strip(2.0, 1.0, 81, 41);
        let mesh = match &s.interior {
            Interior::TriMesh(m) => m,
            _ => unreachable!(),
        };
        let (bsp, _) = eig_bsp(mesh, "bottom", 120).unwrap();
        let n = bsp.curve_len();
        // full bottom edge
        let patch: Vec<usize> = (0..n).collect();
        // T small: slab of area |Gamma| T
        let t = 0.3;
        let mut spec = InfluenceSpec::new(patch.clone(), t);
        spec.n_space = 14;
        spec.n_time = 10;
        let rep = influence_area(&bsp, &spec).unwrap();
        let exact = 2.0 * t;
        let rel = (rep.area - exact).abs() / exact;
        assert!(rel < 0.05, "slab area {} vs {exact} (rel {rel})", rep.area);
        // lower-bound property: I_T >= -S_total
        let total = mesh.total_area();
        assert!(rep.max_functional >= -total - 1e-8);

        // T beyond the diameter: total area
        let t2 = 2.6;
        let mut spec2 = InfluenceSpec::new(patch, t2);
        spec2.n_space = 14;
        spec2.n_time = 10;
        let rep2 = influence_area(&bsp, &spec2).unwrap();
        let rel2 = (rep2.area - total).abs() / total;
        assert!(rel2 < 0.05, "saturated {} vs {total} (rel {rel2})", rep2.area);
    }

    #[test]
    fn monotone_in_time_and_matches_mesh_measure() {
        let s = synth::flat_strip(2.0, 1.0, 81, 41);
        let mesh = match &s.interior {
            Interior::TriMesh(m) => m,
            _ => unreachable!(),
        };
        let (bsp, _) = eig_bsp(mesh, "bottom", 120).unwrap();
        let n = bsp.curve_len();
        // sub-patch: left half of the bottom edge
        let patch: Vec<usize> = (0..n / 2).collect();
        let sources: Vec<usize> = bsp.curve_nodes[..n / 2].to_vec();
        let d = mesh_distances(mesh, &sources);
        let mut prev = 0.0;
        for &t in &[0.3, 0.5, 0.8] {
            let mut spec = InfluenceSpec::new(patch.clone(), t);
            spec.n_space = 12;
            spec.n_time = 8;
            let rep = influence_area(&bsp, &spec).unwrap();
            let measured = mesh.geodesic_ball_area(&d, t);
            let rel = (rep.area - measured).abs() / measured;
            assert!(
                rel < 0.05,
                "T={t}: estimate {} vs mesh {measured} (rel {rel})",
                rep.area
            );
            assert!(rep.area + 1e-6 >= prev, "monotonicity in T violated");
            prev = rep.area;
        }
    }

    #[test]
    fn rejects_bad_specs() {
        let s = synth::flat_strip(1.0, 1.0, 21, 21);
        let mesh = match &s.interior {
            Interior::TriMesh(m) => m,
            _ => unreachable!(),
        };
        let (bsp, _) = eig_bsp(mesh, "bottom", 10).unwrap();
        assert!(influence_area(&bsp, &InfluenceSpec::new(vec![], 0.5)).is_err());
        let mut bad = InfluenceSpec::new(vec![0, 1], 0.5);
        bad.alphas = vec![1e-4, 1e-3];
        assert!(influence_area(&bsp, &bad).is_err());
    }
}
