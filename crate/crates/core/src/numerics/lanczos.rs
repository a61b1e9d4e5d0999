//! Shift-invert Lanczos for the generalized symmetric pencil (K, M) with
//! diagonal (lumped) mass M. Full reorthogonalization; intended for the
//! lowest few dozen modes of FEM operators.

use super::banded::{BandedCholesky, SymBandMatrix};
use super::tridiag::{symtridiag_eigenvalues, symtridiag_eigenvector};

/// Lowest `nev` eigenpairs of K x = lambda M x, M = diag(mass) > 0.
/// `sigma` must satisfy sigma < lambda_min so that K - sigma M is SPD.
/// Returns (eigenvalues ascending, eigenvectors as rows).
pub fn lowest_eigenpairs(
    k_mat: &SymBandMatrix,
    mass: &[f64],
    nev: usize,
    sigma: f64,
) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = k_mat.n;
    assert_eq!(mass.len(), n);
    let mut shifted = k_mat.clone();
    let mut mass_band = SymBandMatrix::zeros(n, k_mat.bw);
    for i in 0..n {
        mass_band.add(i, i, mass[i]);
    }
    shifted.axpy(-sigma, &mass_band);
    let chol = BandedCholesky::new(&shifted)
        .expect("shift must keep K - sigma M positive definite");

    let sqrt_m: Vec<f64> = mass.iter().map(|m| m.sqrt()).collect();

    // operator: y -> M^{1/2} (K - sigma M)^{-1} M^{1/2} y
    let apply = |y: &[f64]| -> Vec<f64> {
        let b: Vec<f64> = y.iter().zip(&sqrt_m).map(|(v, s)| v * s).collect();
        let x = chol.solve(&b);
        x.iter().zip(&sqrt_m).map(|(v, s)| v * s).collect()
    };

    let m_steps = (4 * nev + 40).min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m_steps);
    let mut alphas = Vec::new();
    let mut betas = vec![0.0f64];

    // deterministic pseudo-random start vector
    let mut v: Vec<f64> = (0..n)
        .map(|i| 0.5 + ((i.wrapping_mul(2654435761)) % 1000) as f64 / 1000.0)
        .collect();
    normalize(&mut v);
    basis.push(v.clone());

    for j in 0..m_steps {
        let mut w = apply(&basis[j]);
        let alpha = dot(&w, &basis[j]);
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= alpha * vi;
        }
        if j > 0 {
            let beta_prev = betas[j];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= beta_prev * vi;
            }
        }
        // full reorthogonalization, twice
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let beta = dot(&w, &w).sqrt();
        betas.push(beta);
        if beta < 1e-300 || j + 1 == m_steps {
            break;
        }
        for wi in w.iter_mut() {
            *wi /= beta;
        }
        basis.push(w);
    }

    let m = alphas.len();
    // tridiagonal Ritz problem: theta largest <-> lambda closest above sigma
    let e: Vec<f64> = (0..m).map(|i| if i == 0 { 0.0 } else { betas[i] }).collect();
    let thetas = symtridiag_eigenvalues(&alphas, &e);
    // take the nev largest thetas (smallest lambda)
    let mut pairs: Vec<(f64, f64)> = thetas
        .iter()
        .filter(|&&t| t > 0.0)
        .map(|&t| (sigma + 1.0 / t, t))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.truncate(nev);

    let mut eigvals = Vec::with_capacity(pairs.len());
    let mut eigvecs = Vec::with_capacity(pairs.len());
    for (lam, theta) in pairs {
        let s = symtridiag_eigenvector(&alphas, &e, theta);
        // assemble Ritz vector in y-space, then map back: x = M^{-1/2} y
        let mut y = vec![0.0; n];
        for (coef, q) in s.iter().zip(&basis) {
            for (yi, qi) in y.iter_mut().zip(q) {
                *yi += coef * qi;
            }
        }
        let mut x: Vec<f64> = y.iter().zip(&sqrt_m).map(|(v, s)| v / s).collect();
        // M-normalize
        let nrm = x
            .iter()
            .zip(mass)
            .map(|(v, m)| v * v * m)
            .sum::<f64>()
            .sqrt();
        for xi in x.iter_mut() {
            *xi /= nrm;
        }
        eigvals.push(lam);
        eigvecs.push(x);
    }
    (eigvals, eigvecs)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let nrm = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= nrm;
    }
}
