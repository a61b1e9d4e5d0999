//! Fourth-order Numerov discretization of the per-mode radial problems
//! w'' = G(t) w + s(t) with Robin closures at both ends.

use super::axisym::AxisymGeometry;
use crate::numerics::solve_complex_tridiag;
use crate::{Error, Result};
use num_complex::Complex64;

/// Inhomogeneous Robin closure dw/dt = c w + q at a boundary node.
#[derive(Debug, Clone, Copy)]
pub struct RobinBc {
    pub c: Complex64,
    pub q: Complex64,
}

impl RobinBc {
    pub fn outgoing(c: Complex64) -> RobinBc {
        RobinBc {
            c,
            q: Complex64::default(),
        }
    }
}

/// A prepared per-mode discretization: uniform t-grid, potential samples and
/// its boundary derivatives.
#[derive(Debug, Clone)]
pub struct ModeProblem {
    pub n: i64,
    pub t: Vec<f64>,
    pub g: Vec<f64>,
    g_dot_bottom: f64,
    g_dot_top: f64,
    /// extrapolated potential at the ghost nodes
    g_ghost_bottom: f64,
    g_ghost_top: f64,
    pub h: f64,
}

/// Solution of one mode solve.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub w: Vec<Complex64>,
    pub min_pivot: f64,
}

impl ModeProblem {
    pub fn new(
        geometry: &AxisymGeometry,
        k: f64,
        n: i64,
        t_bottom: f64,
        t_top: f64,
        points: usize,
    ) -> Result<ModeProblem> {
        if points < 16 || !(t_top > t_bottom) {
            return Err(Error::InvalidArgument(
                "mode grid needs t_top > t_bottom and at least 16 points".into(),
            ));
        }
        let h = (t_top - t_bottom) / (points - 1) as f64;
        let t: Vec<f64> = (0..points).map(|i| t_bottom + i as f64 * h).collect();
        let g: Vec<f64> = t.iter().map(|&ti| geometry.potential(k, n, ti)).collect();
        Ok(ModeProblem {
            n,
            g_dot_bottom: geometry.potential_dot(k, n, t_bottom),
            g_dot_top: geometry.potential_dot(k, n, t_top),
            g_ghost_bottom: geometry.potential(k, n, t_bottom - h),
            g_ghost_top: geometry.potential(k, n, t_top + h),
            t,
            g,
            h,
        })
    }

    /// Solve w'' = G w + s with the given closures. `source` may be empty for
    /// the homogeneous problem. Returns the solution and the smallest
    /// elimination pivot as a resonance indicator.
    pub fn solve(
        &self,
        bottom: RobinBc,
        top: RobinBc,
        source: &[Complex64],
    ) -> Result<ModeSolution> {
        let n = self.t.len();
        let h = self.h;
        let h2 = h * h;
        if !(source.is_empty() || source.len() == n) {
            return Err(Error::InvalidArgument(
                "source length must match the grid".into(),
            ));
        }
        let s = |i: isize| -> Complex64 {
            if source.is_empty() || i < 0 || i as usize >= n {
                Complex64::default()
            } else {
                source[i as usize]
            }
        };
        // Numerov coefficients: P_i = 1 - h^2 G_i / 12
        let p = |gi: f64| 1.0 - h2 * gi / 12.0;
        let mut lower = vec![Complex64::default(); n];
        let mut upper = vec![Complex64::default(); n];
        let mut diag = vec![Complex64::default(); n];
        let mut rhs = vec![Complex64::default(); n];
        for i in 1..n - 1 {
            lower[i] = Complex64::new(p(self.g[i - 1]), 0.0);
            diag[i] = Complex64::new(-2.0 * (1.0 + 5.0 * h2 * self.g[i] / 12.0), 0.0);
            upper[i] = Complex64::new(p(self.g[i + 1]), 0.0);
            rhs[i] = (s(i as isize - 1) + 10.0 * s(i as isize) + s(i as isize + 1)) * (h2 / 12.0);
        }
        // bottom closure: ghost w_{-1} = w_1 - 2h(c w_0 + q) - (h^3/3)(Gdot w_0 + G(c w_0 + q) + s'(t0))
        // with s vanishing near the boundaries by construction
        {
            let g0 = self.g[0];
            let alpha = -2.0 * h * bottom.c - (h2 * h / 3.0) * (self.g_dot_bottom + g0 * bottom.c);
            let beta = -bottom.q * (2.0 * h + (h2 * h / 3.0) * g0);
            // Numerov row at node 0 with the ghost column eliminated:
            // p(G_{-1}) w_{-1} - 2(1+5h^2G_0/12) w_0 + p(G_1) w_1 = rhs,
            // w_{-1} = w_1 + alpha w_0 + beta
            let pg = Complex64::new(p(self.g_ghost_bottom), 0.0);
            diag[0] = Complex64::new(-2.0 * (1.0 + 5.0 * h2 * g0 / 12.0), 0.0) + pg * alpha;
            upper[0] = Complex64::new(p(self.g[1]), 0.0) + pg;
            rhs[0] = (10.0 * s(0) + s(1)) * (h2 / 12.0) - pg * beta;
        }
        // top closure: ghost w_{N+1} = w_{N-1} + 2h(c w_N + q) + (h^3/3)(Gdot w_N + G(c w_N + q))
        {
            let m = n - 1;
            let gm = self.g[m];
            let alpha = 2.0 * h * top.c + (h2 * h / 3.0) * (self.g_dot_top + gm * top.c);
            let beta = top.q * (2.0 * h + (h2 * h / 3.0) * gm);
            let pg = Complex64::new(p(self.g_ghost_top), 0.0);
            diag[m] = Complex64::new(-2.0 * (1.0 + 5.0 * h2 * gm / 12.0), 0.0) + pg * alpha;
            lower[m] = Complex64::new(p(self.g[m - 1]), 0.0) + pg;
            rhs[m] = (10.0 * s(m as isize) + s(m as isize - 1)) * (h2 / 12.0) - pg * beta;
        }
        let min_pivot = solve_complex_tridiag(&lower, &diag, &upper, &mut rhs);
        if min_pivot < 1e-10 {
            return Err(Error::NearResonance(format!(
                "mode {}: elimination pivot {min_pivot}",
                self.n
            )));
        }
        Ok(ModeSolution {
            w: rhs,
            min_pivot,
        })
    }

    /// Index of the grid node closest to t.
    pub fn node_at(&self, t: f64) -> usize {
        let i = ((t - self.t[0]) / self.h).round() as isize;
        i.clamp(0, self.t.len() as isize - 1) as usize
    }

    /// Fourth-order derivative dw/dt at an interior node.
    pub fn derivative_at(&self, w: &[Complex64], i: usize) -> Complex64 {
        let n = w.len();
        let h = self.h;
        if i >= 2 && i + 2 < n {
            (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * h)
        } else if i == 0 {
            (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * h)
        } else if i + 1 == n {
            (3.0 * w[n - 1] - 4.0 * w[n - 2] + w[n - 3]) / (2.0 * h)
        } else {
            (w[i + 1] - w[i - 1]) / (2.0 * h)
        }
    }
}

/// Two-point decomposition of a solution into a basis pair evaluated at two
/// nodes: solves w(t1) = c1 b1(t1) + c2 b2(t1), w(t2) = ... in scaled
/// arithmetic so exponentially separated branch sizes stay representable.
pub fn fit_two_basis(
    w1: Complex64,
    w2: Complex64,
    b1_at: (crate::specfun::ScaledBessel, crate::specfun::ScaledBessel),
    b2_at: (crate::specfun::ScaledBessel, crate::specfun::ScaledBessel),
) -> (crate::specfun::ScaledBessel, crate::specfun::ScaledBessel) {
    use crate::specfun::ScaledBessel;
    let (a11, a12) = (b1_at.0, b2_at.0);
    let (a21, a22) = (b1_at.1, b2_at.1);
    let det = a11.mul(&a22).add(&a12.mul(&a21).neg());
    let w1s = ScaledBessel::from_complex(w1);
    let w2s = ScaledBessel::from_complex(w2);
    let c1 = w1s.mul(&a22).add(&a12.mul(&w2s).neg()).div(&det);
    let c2 = a11.mul(&w2s).add(&w1s.mul(&a21).neg()).div(&det);
    (c1, c2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_i, bessel_k};

    #[test]
    fn reproduces_free_bessel_solution() {
        // solve the free cusp-mode equation with incoming I_{-ik} prescribed
        // through an inhomogeneous Robin at the top and outgoing I at the
        // bottom; the solution must be the I branch itself
        let geom = AxisymGeometry::Cylinder {
            radius: 1.0,
            bump: None,
        };
        let k = 1.0;
        let n = 2;
        let prob = ModeProblem::new(&geom, k, n, (0.05f64).ln(), (4.0f64).ln(), 4000).unwrap();
        let nu = Complex64::new(0.0, -k);
        let zeta = 2.0;
        // top: (d/dt - c_K) w = (d/dt - c_K) w_in with w_in = I_{-ik}(zeta e^t)
        let t_top = *prob.t.last().unwrap();
        let z_top = zeta * t_top.exp();
        let c_k = geom.cusp_outgoing_logderiv(k, n, t_top).unwrap();
        let i_val = bessel_i(nu, z_top).unwrap();
        let i_dot = crate::specfun::bessel_i_deriv(nu, z_top).unwrap();
        // dw_in/dt = zeta y I'(zeta y)
        let w_in = i_val.value();
        let w_in_dot = i_dot.value() * z_top;
        let top = RobinBc {
            c: c_k,
            q: w_in_dot - c_k * w_in,
        };
        let bottom =
            RobinBc::outgoing(geom.regular_outgoing_logderiv(k, n, prob.t[0]).unwrap());
        let sol = prob.solve(bottom, top, &[]).unwrap();
        // compare against I_{-ik}(zeta e^t) pointwise
        let mut worst = 0.0f64;
        for (i, &t) in prob.t.iter().enumerate().step_by(97) {
            let exact = bessel_i(nu, zeta * t.exp()).unwrap().value();
            let rel = (sol.w[i] - exact).norm() / exact.norm().max(1e-300);
            worst = worst.max(rel);
        }
        assert!(worst < 1e-9, "worst relative deviation {worst}");
    }

    #[test]
    fn scattered_wave_basis_fit() {
        // manufactured w = 2 K + 0.3 I at the cusp; the fit recovers both
        let k = 0.9;
        let zeta = 3.0;
        let nu_i = Complex64::new(0.0, -k);
        let nu_k = Complex64::new(0.0, k);
        let (t1, t2) = (1.0f64, 1.1f64);
        let eval = |t: f64| {
            let z = zeta * t.exp();
            (bessel_i(nu_i, z).unwrap(), bessel_k(nu_k, z).unwrap())
        };
        let (i1, k1) = eval(t1);
        let (i2, k2) = eval(t2);
        let w1 = k1.value() * 2.0 + i1.value() * 0.3;
        let w2 = k2.value() * 2.0 + i2.value() * 0.3;
        let (ck, ci) = fit_two_basis(w1, w2, (k1, k2), (i1, i2));
        assert!((ck.value() - Complex64::new(2.0, 0.0)).norm() < 1e-8);
        assert!((ci.value() - Complex64::new(0.3, 0.0)).norm() < 1e-8);
    }
}
