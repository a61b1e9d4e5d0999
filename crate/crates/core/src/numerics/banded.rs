//! Banded matrix storage and factorizations. FEM meshes in this crate come
//! from structured generators, so natural node ordering keeps the bandwidth
//! small and a band factorization beats general sparse machinery.

use num_complex::Complex64;

/// Symmetric banded matrix, lower storage: `data[k][i]` holds A[i+k][i]
/// for k = 0..=bw.
#[derive(Debug, Clone)]
pub struct SymBandMatrix {
    pub n: usize,
    pub bw: usize,
    pub data: Vec<Vec<f64>>,
}

impl SymBandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        SymBandMatrix {
            n,
            bw,
            data: (0..=bw).map(|k| vec![0.0; n - k.min(n)]).collect(),
        }
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (lo, hi) = if i >= j { (j, i) } else { (i, j) };
        let k = hi - lo;
        assert!(k <= self.bw, "entry ({i},{j}) outside bandwidth {}", self.bw);
        self.data[k][lo] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (lo, hi) = if i >= j { (j, i) } else { (i, j) };
        let k = hi - lo;
        if k > self.bw {
            0.0
        } else {
            self.data[k][lo]
        }
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for i in 0..self.n {
            y[i] += self.data[0][i] * x[i];
        }
        for k in 1..=self.bw {
            for i in 0..self.n - k {
                let a = self.data[k][i];
                y[i + k] += a * x[i];
                y[i] += a * x[i + k];
            }
        }
    }

    /// A + c * B (same shape)
    pub fn axpy(&mut self, c: f64, other: &SymBandMatrix) {
        assert_eq!(self.n, other.n);
        assert_eq!(self.bw, other.bw);
        for k in 0..=self.bw {
            for (a, b) in self.data[k].iter_mut().zip(&other.data[k]) {
                *a += c * b;
            }
        }
    }
}

/// Banded Cholesky factorization A = L L^T of a symmetric positive definite
/// band matrix.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    l: Vec<Vec<f64>>,
}

impl BandedCholesky {
    pub fn new(a: &SymBandMatrix) -> Option<Self> {
        let n = a.n;
        let bw = a.bw;
        let mut l: Vec<Vec<f64>> = a.data.clone();
        for j in 0..n {
            let mut d = l[0][j];
            let kmin = j.min(bw);
            for k in 1..=kmin {
                d -= l[k][j - k] * l[k][j - k];
            }
            if d <= 0.0 {
                return None;
            }
            let d = d.sqrt();
            l[0][j] = d;
            let imax = (n - 1 - j).min(bw);
            for i in 1..=imax {
                // L[j+i][j]
                let mut s = l[i][j];
                let kmax = (bw - i).min(j);
                for k in 1..=kmax {
                    s -= l[k + i][j - k] * l[k][j - k];
                }
                l[i][j] = s / d;
            }
        }
        Some(BandedCholesky { n, bw, l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        // forward: L y = b
        for j in 0..self.n {
            x[j] /= self.l[0][j];
            let imax = (self.n - 1 - j).min(self.bw);
            for i in 1..=imax {
                x[j + i] -= self.l[i][j] * x[j];
            }
        }
        // backward: L^T x = y
        for j in (0..self.n).rev() {
            let imax = (self.n - 1 - j).min(self.bw);
            for i in 1..=imax {
                x[j] -= self.l[i][j] * x[j + i];
            }
            x[j] /= self.l[0][j];
        }
        x
    }
}

/// Complex banded LU with partial pivoting (LAPACK gbtrf layout: kl lower,
/// ku upper, fill expands the upper band to kl+ku).
pub struct BandedLu {
    n: usize,
    kl: usize,
    ku: usize,
    /// ab[row][col]: row r stores diagonal (r - kl - ku), banded LAPACK style
    ab: Vec<Vec<Complex64>>,
    ipiv: Vec<usize>,
    min_pivot: f64,
}

impl BandedLu {
    /// Build from a callback giving A[i][j] within the band.
    pub fn factor<F: Fn(usize, usize) -> Complex64>(
        n: usize,
        kl: usize,
        ku: usize,
        a: F,
    ) -> Option<Self> {
        let rows = 2 * kl + ku + 1;
        let mut ab = vec![vec![Complex64::default(); n]; rows];
        for j in 0..n {
            let ilo = j.saturating_sub(ku);
            let ihi = (j + kl).min(n - 1);
            for i in ilo..=ihi {
                ab[kl + ku + i - j][j] = a(i, j);
            }
        }
        let mut ipiv = vec![0usize; n];
        let mut min_pivot = f64::INFINITY;
        let kv = kl + ku;
        for j in 0..n {
            // find pivot in column j among rows j..=min(j+kl, n-1)
            let lim = kl.min(n - 1 - j);
            let mut p = 0usize;
            let mut pmag = ab[kv][j].norm();
            for i in 1..=lim {
                let m = ab[kv + i][j].norm();
                if m > pmag {
                    pmag = m;
                    p = i;
                }
            }
            ipiv[j] = j + p;
            min_pivot = min_pivot.min(pmag);
            if pmag == 0.0 {
                return None;
            }
            // swap rows j and j+p across the band
            if p != 0 {
                let jmax = (j + kv).min(n - 1);
                for col in j..=jmax {
                    let r1 = kv + j - col;
                    let r2 = kv + j + p - col;
                    let tmp = ab[r1][col];
                    ab[r1][col] = ab[r2][col];
                    ab[r2][col] = tmp;
                }
            }
            // eliminate
            let piv = ab[kv][j];
            for i in 1..=lim {
                let m = ab[kv + i][j] / piv;
                ab[kv + i][j] = m;
                let jmax = (j + kv).min(n - 1);
                for col in (j + 1)..=jmax {
                    let up = ab[kv + j - col][col];
                    ab[kv + i + j - col][col] -= m * up;
                }
            }
        }
        Some(BandedLu {
            n,
            kl,
            ku,
            ab,
            ipiv,
            min_pivot,
        })
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut x = b.to_vec();
        let kv = self.kl + self.ku;
        // forward with pivoting
        for j in 0..self.n {
            if self.ipiv[j] != j {
                x.swap(j, self.ipiv[j]);
            }
            let lim = self.kl.min(self.n - 1 - j);
            for i in 1..=lim {
                let m = self.ab[kv + i][j];
                let xj = x[j];
                x[j + i] -= m * xj;
            }
        }
        // backward
        for j in (0..self.n).rev() {
            let lim = kv.min(j);
            x[j] /= self.ab[kv][j];
            let xj = x[j];
            for i in 1..=lim {
                x[j - i] -= self.ab[kv - i][j] * xj;
            }
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn band_cholesky_solves() {
        let n = 30;
        let mut a = SymBandMatrix::zeros(n, 2);
        for i in 0..n {
            a.add(i, i, 4.0);
            if i + 1 < n {
                a.add(i + 1, i, -1.0);
            }
            if i + 2 < n {
                a.add(i + 2, i, -0.5);
            }
        }
        let chol = BandedCholesky::new(&a).unwrap();
        let xref: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&xref, &mut b);
        let x = chol.solve(&b);
        for (u, v) in x.iter().zip(&xref) {
            assert_relative_eq!(u, v, epsilon = 1e-12);
        }
    }

    #[test]
    fn banded_lu_handles_indefinite_complex() {
        let n = 25;
        let kl = 2;
        let ku = 2;
        let entry = |i: usize, j: usize| -> Complex64 {
            let d = i as isize - j as isize;
            match d {
                0 => Complex64::new(-1.3 + 0.1 * i as f64, 0.4),
                1 | -1 => Complex64::new(1.0, -0.2),
                2 | -2 => Complex64::new(0.3, 0.0),
                _ => Complex64::default(),
            }
        };
        let lu = BandedLu::factor(n, kl, ku, entry).unwrap();
        let xref: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.5).sin()))
            .collect();
        let mut b = vec![Complex64::default(); n];
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                b[i] += entry(i, j) * xref[j];
            }
        }
        let x = lu.solve(&b);
        for (u, v) in x.iter().zip(&xref) {
            assert!((u - v).norm() < 1e-11);
        }
    }
}
