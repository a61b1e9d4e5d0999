//! Exact spectral engine for the free cylinder S^r x (0, infinity) with the
//! hyperbolic metric: Green kernels, resolvent, Fourier-Bessel and Mellin
//! transforms, the Parseval identity, resolvent asymptotics and Besov norms.
//!
//! The +-i0 boundary values are realized by the exact substitution
//! nu = -+ik in the kernel order; no small-epsilon limits anywhere.

mod besov;
mod ops;

pub use besov::{besov_norm, BesovKind};
pub use ops::{
    asymptotic_profile, fourier_bessel, green_kernel, mellin, parseval_defect, resolvent_apply,
    spectral_transform, AsymptoticProfile, EndSide, MellinSign,
};

use crate::specfun::gamma_complex;
use crate::{Error, Result};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Log-uniform grid on [y_min, y_max].
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    pub y: Vec<f64>,
}

impl LogGrid {
    pub fn new(y_min: f64, y_max: f64, n: usize) -> Result<LogGrid> {
        if !(y_min > 0.0 && y_max > y_min) || n < 8 {
            return Err(Error::InvalidArgument(format!(
                "bad log grid: [{y_min}, {y_max}] with {n} points"
            )));
        }
        let (a, b) = (y_min.ln(), y_max.ln());
        Ok(LogGrid {
            y: (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn step(&self) -> f64 {
        (self.y[1] / self.y[0]).ln()
    }

    /// Trapezoid weights for integrals against dy/y^2: ∫ g dy/y^2 ≈ Σ w_i g(y_i).
    pub fn measure_weights(&self) -> Vec<f64> {
        let n = self.len();
        let h = self.step();
        (0..n)
            .map(|i| {
                let c = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
                c * h / self.y[i]
            })
            .collect()
    }
}

/// One angular mode of a field on the cylinder: u_n(y) on a log grid, with
/// the circle radius fixing the eigenvalue lambda_n = (n/r)^2.
#[derive(Debug, Clone)]
pub struct ModeFunction {
    pub n: i64,
    pub radius: f64,
    pub grid: LogGrid,
    pub samples: Vec<Complex64>,
}

impl ModeFunction {
    pub fn new(n: i64, radius: f64, grid: LogGrid, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidArgument(
                "sample count must match the grid".into(),
            ));
        }
        Ok(ModeFunction {
            n,
            radius,
            grid,
            samples,
        })
    }

    /// lambda_n = (n/r)^2
    pub fn eigenvalue(&self) -> f64 {
        (self.n as f64 / self.radius).powi(2)
    }

    /// sqrt(lambda_n) = |n|/r
    pub fn zeta(&self) -> f64 {
        self.n.unsigned_abs() as f64 / self.radius
    }
}

/// A field on the free cylinder as a bundle of angular modes over one grid.
#[derive(Debug, Clone)]
pub struct FreeField {
    pub radius: f64,
    pub grid: LogGrid,
    pub modes: BTreeMap<i64, Vec<Complex64>>,
}

impl FreeField {
    pub fn new(radius: f64, grid: LogGrid) -> FreeField {
        FreeField {
            radius,
            grid,
            modes: BTreeMap::new(),
        }
    }

    pub fn set_mode(&mut self, n: i64, samples: Vec<Complex64>) -> Result<()> {
        if samples.len() != self.grid.len() {
            return Err(Error::InvalidArgument(
                "sample count must match the grid".into(),
            ));
        }
        self.modes.insert(n, samples);
        Ok(())
    }

    pub fn mode(&self, n: i64) -> Option<ModeFunction> {
        self.modes.get(&n).map(|s| ModeFunction {
            n,
            radius: self.radius,
            grid: self.grid.clone(),
            samples: s.clone(),
        })
    }

    /// L^2(M_free) inner product (f, g) = Σ_n ∫ f_n conj(g_n) dy/y^2.
    pub fn inner(&self, other: &FreeField) -> Complex64 {
        let w = self.grid.measure_weights();
        let mut acc = Complex64::default();
        for (n, f) in &self.modes {
            if let Some(g) = other.modes.get(n) {
                for i in 0..f.len() {
                    acc += f[i] * g[i].conj() * w[i];
                }
            }
        }
        acc
    }

    /// Pointwise h-norm squared ||u(y)||^2 = Σ_n |u_n(y)|^2 on the grid.
    pub fn norm_sq_profile(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.grid.len()];
        for f in self.modes.values() {
            for (o, v) in out.iter_mut().zip(f) {
                *o += v.norm_sqr();
            }
        }
        out
    }
}

/// Spectral datum: the cusp (Mellin) scalar plus per-mode regular components,
/// an element of h = C (+) L^2(S). The cusp scalar multiplies the normalized
/// zero mode, so its weight in the h-norm is 1; the constant-function
/// convention used by the h_infinity scattering spaces differs by the factor
/// sqrt(2 pi r) and is handled where scattering data are assembled.
#[derive(Debug, Clone)]
pub struct SpectralDatum {
    pub cusp: Complex64,
    /// regular components keyed by mode index
    pub regular: BTreeMap<i64, Complex64>,
    pub cusp_weight: f64,
}

impl SpectralDatum {
    pub fn h_norm_sq(&self) -> f64 {
        self.cusp_weight * self.cusp.norm_sqr()
            + self.regular.values().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// The frequency constants of the spectral representation at energy k^2.
#[derive(Debug, Clone)]
pub struct FreqConstants {
    pub k: f64,
    pub omega_plus: Complex64,
    pub omega_minus: Complex64,
    pub omega_c_plus: Complex64,
    pub omega_c_minus: Complex64,
    pub sigma_plus: Complex64,
    pub sigma_minus: Complex64,
}

impl FreqConstants {
    pub fn new(k: f64) -> Result<FreqConstants> {
        if !(k > 0.0) {
            return Err(Error::OutOfDomain(format!("k must be > 0, got {k}")));
        }
        let pref = PI / (2.0 * k * (k * PI).sinh()).sqrt();
        let gm = gamma_complex(Complex64::new(1.0, -k))?;
        let gp = gamma_complex(Complex64::new(1.0, k))?;
        let omega_plus = pref / gm;
        let omega_minus = pref / gp;
        let c = (PI / 2.0).sqrt() / k;
        Ok(FreqConstants {
            k,
            omega_plus,
            omega_minus,
            omega_c_plus: Complex64::new(0.0, c),
            omega_c_minus: Complex64::new(0.0, -c),
            sigma_plus: Complex64::new(0.5, -k),
            sigma_minus: Complex64::new(0.5, k),
        })
    }

    /// C_n^{(±)}(k) = (sqrt(lambda_n)/2)^{∓ik} for n != 0 and
    /// ±i sqrt(pi/2)/(k omega_±) for n = 0.
    pub fn c_n(&self, n: i64, radius: f64, plus: bool) -> Complex64 {
        if n == 0 {
            let i = Complex64::new(0.0, if plus { 1.0 } else { -1.0 });
            let omega = if plus { self.omega_plus } else { self.omega_minus };
            i * (PI / 2.0).sqrt() / (self.k * omega)
        } else {
            let half_root = n.unsigned_abs() as f64 / (2.0 * radius);
            let arg = if plus { -self.k } else { self.k } * half_root.ln();
            Complex64::new(arg.cos(), arg.sin())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn freq_constants_invariants() {
        let fc = FreqConstants::new(1.3).unwrap();
        let s = fc.sigma_plus + fc.sigma_minus;
        assert_relative_eq!(s.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.im, 0.0, epsilon = 1e-15);
        assert_relative_eq!(fc.omega_c_plus.im, (PI / 2.0).sqrt() / 1.3, epsilon = 1e-15);
        for n in [1i64, -3, 7] {
            assert_relative_eq!(fc.c_n(n, 1.0, true).norm(), 1.0, epsilon = 1e-14);
            assert_relative_eq!(fc.c_n(n, 2.0, false).norm(), 1.0, epsilon = 1e-14);
        }
        // |C_0| = 1 because |omega_±| = sqrt(pi/2)/k
        assert_relative_eq!(fc.c_n(0, 1.0, true).norm(), 1.0, epsilon = 1e-13);
    }

    #[test]
    fn grid_weights_integrate_against_measure() {
        // ∫_1^e y dy/y^2 = 1
        let g = LogGrid::new(1.0, std::f64::consts::E, 2001).unwrap();
        let w = g.measure_weights();
        let v: f64 = g.y.iter().zip(&w).map(|(y, wi)| y * wi).sum();
        assert_relative_eq!(v, 1.0, epsilon = 1e-8);
    }
}
