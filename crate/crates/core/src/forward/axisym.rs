//! Rotationally symmetric geometries for the per-mode radial solver, their
//! Numerov potentials, and the transparent boundary coefficients built from
//! the outgoing radial branches.

use crate::charts::synth::{Bump, Cigar};
use crate::specfun::{log_deriv_i, log_deriv_k};
use crate::{Error, Result};
use num_complex::Complex64;

/// The two rotationally symmetric surface families the ModeODE backend
/// handles. The radial coordinate t is log y on the cylinder; on the cigar it
/// is the arc length rho, which coincides with log y on the cusp side.
#[derive(Debug, Clone)]
pub enum AxisymGeometry {
    Cylinder { radius: f64, bump: Option<Bump> },
    Cigar(Cigar),
}

/// Which end a transparent condition closes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndKind {
    Cusp,
    Regular,
}

impl AxisymGeometry {
    pub fn radius(&self) -> f64 {
        match self {
            AxisymGeometry::Cylinder { radius, .. } => *radius,
            AxisymGeometry::Cigar(c) => c.radius,
        }
    }

    /// sqrt(lambda_n) for mode n.
    pub fn zeta(&self, n: i64) -> f64 {
        n.unsigned_abs() as f64 / self.radius()
    }

    /// The Numerov potential G(t) of the substituted unknown w with
    /// w'' = G w; the physical mode v relates by v = w / w_factor.
    pub fn potential(&self, k: f64, n: i64, t: f64) -> f64 {
        let zeta = self.zeta(n);
        match self {
            AxisymGeometry::Cylinder { bump, .. } => {
                let y = t.exp();
                match bump {
                    None => zeta * zeta * y * y - k * k,
                    Some(b) => {
                        let a = b.a(y);
                        let ad = b.da_dt(y);
                        let add = b.d2a_dt2(y);
                        let p = -1.0 + ad / (2.0 * (1.0 + a));
                        let pd = add / (2.0 * (1.0 + a)) - ad * ad / (2.0 * (1.0 + a).powi(2));
                        let q = 0.25 + k * k - zeta * zeta * y * y / (1.0 + a);
                        -(q - p * p / 4.0 - pd / 2.0)
                    }
                }
            }
            AxisymGeometry::Cigar(c) => {
                let f = c.f(t);
                let fd = c.df(t);
                let fdd = c.d2f(t);
                let nn = (n * n) as f64;
                let p = fd / f;
                let pd = fdd / f - p * p;
                let q = 0.25 + k * k - nn / (f * f);
                -(q - p * p / 4.0 - pd / 2.0)
            }
        }
    }

    /// t-derivative of the potential; boundary closures need it. Central
    /// difference of the analytic potential.
    pub fn potential_dot(&self, k: f64, n: i64, t: f64) -> f64 {
        let h = 1e-5;
        (self.potential(k, n, t + h) - self.potential(k, n, t - h)) / (2.0 * h)
    }

    /// Factor turning the physical mode into the Numerov unknown: w = factor * v.
    /// Cylinder: (1+a)^{1/4} y^{-1/2}; cigar: f(rho)^{1/2}.
    pub fn w_factor(&self, t: f64) -> f64 {
        match self {
            AxisymGeometry::Cylinder { bump, .. } => {
                let y = t.exp();
                let a = bump.as_ref().map(|b| b.a(y)).unwrap_or(0.0);
                (1.0 + a).powf(0.25) / y.sqrt()
            }
            AxisymGeometry::Cigar(c) => c.f(t).sqrt(),
        }
    }

    /// Robin coefficient of the outgoing branch in w-variables at the cusp
    /// truncation t = log Y: dw/dt = c w.
    pub fn cusp_outgoing_logderiv(&self, k: f64, n: i64, t: f64) -> Result<Complex64> {
        if n == 0 {
            Ok(Complex64::new(0.0, k))
        } else {
            let z = self.zeta(n) * t.exp();
            log_deriv_k(Complex64::new(0.0, k), z)
        }
    }

    /// Robin coefficient of the outgoing branch in w-variables at the regular
    /// truncation (cylinder only).
    pub fn regular_outgoing_logderiv(&self, k: f64, n: i64, t: f64) -> Result<Complex64> {
        if n == 0 {
            Ok(Complex64::new(0.0, -k))
        } else {
            let z = self.zeta(n) * t.exp();
            log_deriv_i(Complex64::new(0.0, -k), z)
        }
    }

    /// Robin coefficient of the regular branch at the cigar axis offset
    /// delta = t0 - axis, including the first correction term so the closure
    /// stays compatible with fourth-order interiors.
    pub fn axis_logderiv(&self, k: f64, n: i64, t0: f64) -> Result<Complex64> {
        let c = match self {
            AxisymGeometry::Cigar(c) => c,
            _ => {
                return Err(Error::InvalidArgument(
                    "axis closure only exists on the cigar".into(),
                ))
            }
        };
        let delta = t0 - c.axis();
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "axis offset must be positive, got {delta}"
            )));
        }
        let m = n.unsigned_abs() as f64;
        let c3 = c.d3f(c.axis()) / 6.0;
        let b = -(2.0 * c3 * (m + m * m) + 0.25 + k * k) / (4.0 * m + 4.0);
        Ok(Complex64::new(
            (m + 0.5) / delta + (2.0 * b + c3) * delta,
            0.0,
        ))
    }
}

/// Transparent-boundary Robin coefficient for the physical mode v in
/// y-derivative form: the outgoing branch w_n satisfies d_y w = c w at the
/// truncation.
///
/// Cusp: y^{1/2+ik} (n = 0) or y^{1/2} K_{ik}(|n| y/r); regular end:
/// y^{1/2-ik} (n = 0) or y^{1/2} I_{-ik}(|n| y/r).
pub fn transparent_bc(k: f64, end: EndKind, n: i64, radius: f64, location: f64) -> Result<Complex64> {
    if !(k > 0.0) {
        return Err(Error::OutOfDomain(format!("k must be > 0, got {k}")));
    }
    if !(location > 0.0) {
        return Err(Error::OutOfDomain(format!(
            "truncation coordinate must be > 0, got {location}"
        )));
    }
    let y = location;
    let half = Complex64::new(0.5, 0.0);
    match (end, n) {
        (EndKind::Cusp, 0) => Ok(Complex64::new(0.5, k) / y),
        (EndKind::Regular, 0) => Ok(Complex64::new(0.5, -k) / y),
        (EndKind::Cusp, _) => {
            let z = n.unsigned_abs() as f64 / radius * y;
            let ld = log_deriv_k(Complex64::new(0.0, k), z)?;
            Ok((half + ld) / y)
        }
        (EndKind::Regular, _) => {
            let z = n.unsigned_abs() as f64 / radius * y;
            let ld = log_deriv_i(Complex64::new(0.0, -k), z)?;
            Ok((half + ld) / y)
        }
    }
}
