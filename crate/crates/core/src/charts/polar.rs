//! Conical polar charts: the rho <-> r change of variables of the orbifold
//! uniformization, the pulled-back cone metric, geodesic-polar ball areas and
//! the cone-constant extrapolation.

use super::HProfile;
use crate::numerics::GaussRule;
use crate::{Error, Result};
use std::f64::consts::PI;

/// r = log((1 + rho^{1/n})/(1 - rho^{1/n})); geodesic distance from the
/// elliptic fixed point as a function of the uniformizing disc radius.
pub fn cone_chart_r_from_rho(rho: f64, n: u32) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::OutOfDomain(format!("rho must lie in [0,1), got {rho}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be >= 1".into()));
    }
    let t = rho.powf(1.0 / n as f64);
    Ok(((1.0 + t) / (1.0 - t)).ln())
}

/// Inverse map: rho = ((e^r - 1)/(e^r + 1))^n.
pub fn cone_chart_rho_from_r(r: f64, n: u32) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::OutOfDomain(format!("r must be >= 0, got {r}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be >= 1".into()));
    }
    let t = ((r.exp() - 1.0) / (r.exp() + 1.0)).max(0.0);
    Ok(t.powi(n as i32))
}

/// Hyperbolic metric around an order-n elliptic point in geodesic polar
/// coordinates: diag(1, sinh(r)^2 / n^2).
pub fn cone_metric_pullback(r: f64, _theta: f64, n: u32) -> Result<[[f64; 2]; 2]> {
    if !(r > 0.0) {
        return Err(Error::OutOfDomain(format!("r must be > 0, got {r}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("order n must be >= 1".into()));
    }
    let s = r.sinh() / n as f64;
    Ok([[1.0, 0.0], [0.0, s * s]])
}

/// Conformal factor of the hyperbolic metric in the zeta-disc chart:
/// (4/n^2) |zeta|^{-lambda} (1 - |zeta|^{2/n})^{-2}, lambda = 2 - 2/n.
pub fn cone_disc_conformal_factor(rho: f64, n: u32) -> f64 {
    let nf = n as f64;
    let lambda = 2.0 - 2.0 / nf;
    (4.0 / (nf * nf)) * rho.powf(-lambda) * (1.0 - rho.powf(2.0 / nf)).powi(-2)
}

/// Geodesic-ball area around the apex of a cone chart with metric
/// dr^2 + C r^2 (1 + h) dtheta^2, h given as a closure: composite
/// Gauss-Legendre in r (32 nodes per decade) and trapezoid in theta
/// (256 nodes).
pub fn ball_area_polar_fn<F: Fn(f64, f64) -> f64>(c: f64, h: F, r: f64) -> f64 {
    let sqrt_c = c.sqrt();
    let n_theta = 256;
    let dtheta = 2.0 * PI / n_theta as f64;
    let rule = GaussRule::new(32);
    // split [0, r] into decades so the smallest scales are resolved
    let mut cuts = vec![r];
    let mut lo = r / 10.0;
    while lo > r * 1e-6 && cuts.len() < 7 {
        cuts.push(lo);
        lo /= 10.0;
    }
    cuts.push(0.0);
    cuts.reverse();
    let mut area = 0.0;
    for w in cuts.windows(2) {
        area += rule.integrate(w[0], w[1], |s| {
            let mut ang = 0.0;
            for j in 0..n_theta {
                let th = j as f64 * dtheta;
                ang += (1.0 + h(s, th)).sqrt();
            }
            sqrt_c * s * ang * dtheta
        });
    }
    area
}

/// Tabulated-profile variant of [`ball_area_polar_fn`].
pub fn ball_area_polar(c: f64, h: &HProfile, r: f64) -> f64 {
    ball_area_polar_fn(c, |s, th| h.eval(s, th), r)
}

/// Angle between two radial geodesics read off from the arc length of the
/// connecting circle segment: Delta theta = arc / (sqrt(C) eps) in the limit
/// eps -> 0.
pub fn radial_geodesic_angle(c: f64, h: &HProfile, eps: f64, theta0: f64, theta1: f64) -> f64 {
    let n = 512;
    let d = (theta1 - theta0) / n as f64;
    let mut arc = 0.0;
    for j in 0..n {
        let th = theta0 + (j as f64 + 0.5) * d;
        arc += (c * eps * eps * (1.0 + h.eval(eps, th))).sqrt() * d.abs();
    }
    arc / (c.sqrt() * eps)
}

/// Result of the area-ratio extrapolation at a probe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeEstimate {
    /// Extrapolated limit L of area/(pi r^2) as r -> 0.
    pub limit: f64,
    /// Estimated cone constant C = L^2.
    pub c_hat: f64,
    /// round(1/L) when within 5% of an integer; 1 flags a regular point.
    pub n_hat: Option<u32>,
}

/// Richardson-style polynomial extrapolation of L(r) = area/(pi r^2) to r = 0.
/// Radii must decrease strictly toward zero; at least three samples.
pub fn cone_constant_estimate(areas: &[(f64, f64)]) -> Result<ConeEstimate> {
    if areas.len() < 3 {
        return Err(Error::InvalidArgument(
            "cone_constant_estimate needs at least 3 (r, area) samples".into(),
        ));
    }
    for w in areas.windows(2) {
        if w[1].0 >= w[0].0 {
            return Err(Error::InvalidArgument(
                "radii must decrease strictly toward 0".into(),
            ));
        }
        if w[1].1 > w[0].1 {
            return Err(Error::InvalidArgument(
                "areas must be monotone in the radius".into(),
            ));
        }
    }
    let rs: Vec<f64> = areas.iter().map(|(r, _)| *r).collect();
    let ls: Vec<f64> = areas.iter().map(|(r, s)| s / (PI * r * r)).collect();
    // Neville extrapolation to r = 0
    let m = rs.len();
    let mut tableau = ls.clone();
    for level in 1..m {
        for i in 0..m - level {
            let num = rs[i] * tableau[i + 1] - rs[i + level] * tableau[i];
            tableau[i] = num / (rs[i] - rs[i + level]);
        }
    }
    let mut limit = tableau[0];
    // extrapolation without a usable trend falls back to the finest sample
    if !limit.is_finite() || limit <= 0.0 || (limit - ls[m - 1]).abs() > 0.5 {
        limit = ls[m - 1];
    }
    let inv = 1.0 / limit;
    let n_round = inv.round();
    let n_hat = if n_round >= 1.0 && (inv - n_round).abs() < 0.05 {
        Some(n_round as u32)
    } else {
        None
    };
    Ok(ConeEstimate {
        limit,
        c_hat: limit * limit,
        n_hat,
    })
}
