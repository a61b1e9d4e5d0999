//! Tridiagonal solvers: complex Thomas algorithm with pivot monitoring and a
//! symmetric-tridiagonal eigensolver (implicit QL with Wilkinson shifts plus
//! inverse iteration for selected eigenvectors).

use num_complex::Complex64;

/// Solves a complex tridiagonal system in place. `lower[i]` couples row i to
/// i-1 (lower[0] unused), `upper[i]` couples row i to i+1 (last unused).
/// Returns the smallest pivot magnitude encountered, so callers can detect
/// near-resonant systems.
pub fn solve_complex_tridiag(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
) -> f64 {
    let n = diag.len();
    assert_eq!(lower.len(), n);
    assert_eq!(upper.len(), n);
    assert_eq!(rhs.len(), n);
    let mut c = vec![Complex64::default(); n];
    let mut min_pivot = f64::INFINITY;

    let mut beta = diag[0];
    min_pivot = min_pivot.min(beta.norm());
    rhs[0] /= beta;
    for i in 1..n {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        min_pivot = min_pivot.min(beta.norm());
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= c[i] * next;
    }
    min_pivot
}

/// All eigenvalues of a symmetric tridiagonal matrix (diag d, off-diag e with
/// e[0] unused), ascending. Implicit QL with Wilkinson shift.
pub fn symtridiag_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    let mut d = d.to_vec();
    // shift e so that e[i] couples i and i+1, with a trailing 0
    let mut e: Vec<f64> = (1..n).map(|i| e[i]).chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter < 50, "QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = 0.0;
                let _ = f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// Eigenvector of a symmetric tridiagonal matrix for a known eigenvalue, by
/// inverse iteration with a perturbed shift. Returns a unit 2-norm vector.
pub fn symtridiag_eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let scale = d.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1.0);
    let shift = lambda + scale * 1e-12;
    let lower: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(if i > 0 { e[i] } else { 0.0 }, 0.0))
        .collect();
    let upper: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(if i + 1 < n { e[i + 1] } else { 0.0 }, 0.0))
        .collect();
    let diag: Vec<Complex64> = (0..n).map(|i| Complex64::new(d[i] - shift, 0.0)).collect();
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + 0.3 * ((i * 2654435761) % 97) as f64 / 97.0, 0.0))
        .collect();
    for _ in 0..4 {
        solve_complex_tridiag(&lower, &diag, &upper, &mut v);
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
    v.iter().map(|z| z.re).collect()
}
