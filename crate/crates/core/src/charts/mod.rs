//! Coordinate charts and metric evaluation for surfaces built from cusp ends,
//! regular (funnel-type) ends, a compact interior and conical points:
//! chart-wise metric tensors, geodesic-ball areas, cone-constant estimation,
//! triangle meshes with per-triangle metrics and the surface-spec file format.

mod mesh;
mod polar;
mod specfile;
pub mod synth;

pub use mesh::{mesh_distances, TriMesh};
pub use polar::{
    ball_area_polar, ball_area_polar_fn, cone_chart_r_from_rho, cone_chart_rho_from_r,
    cone_constant_estimate, cone_disc_conformal_factor, cone_metric_pullback,
    radial_geodesic_angle, ConeEstimate,
};
pub use specfile::{example_spec_texts, load_surface_spec, parse_surface_spec};

use crate::{Error, Result};

/// 2x2 metric tensor in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g: [[f64; 2]; 2],
}

impl MetricTensor {
    pub fn diag(g11: f64, g22: f64) -> Self {
        MetricTensor {
            g: [[g11, 0.0], [0.0, g22]],
        }
    }

    pub fn isotropic(f: f64) -> Self {
        Self::diag(f, f)
    }

    pub fn det(&self) -> f64 {
        self.g[0][0] * self.g[1][1] - self.g[0][1] * self.g[1][0]
    }

    /// sqrt(det g): the area density in chart coordinates.
    pub fn volume_density(&self) -> f64 {
        self.det().sqrt()
    }

    pub fn inverse(&self) -> MetricTensor {
        let d = self.det();
        MetricTensor {
            g: [
                [self.g[1][1] / d, -self.g[0][1] / d],
                [-self.g[1][0] / d, self.g[0][0] / d],
            ],
        }
    }

    pub fn is_spd(&self) -> bool {
        let sym = (self.g[0][1] - self.g[1][0]).abs()
            <= 1e-12 * (self.g[0][1].abs() + self.g[1][0].abs() + 1e-300);
        sym && self.g[0][0] > 0.0 && self.det() > 0.0
    }

    /// Length of a chart vector under this metric.
    pub fn length(&self, v: [f64; 2]) -> f64 {
        (self.g[0][0] * v[0] * v[0]
            + 2.0 * self.g[0][1] * v[0] * v[1]
            + self.g[1][1] * v[1] * v[1])
            .sqrt()
    }
}

/// Angular profile h_p(r, theta) of a conical point; vanishes as r -> 0.
#[derive(Debug, Clone)]
pub enum HProfile {
    Zero,
    /// Samples on a (log r, theta) grid, bilinear interpolation, periodic in
    /// theta. Rows are log-r levels (ascending), columns theta in [0, 2pi).
    Tabulated {
        log_r: Vec<f64>,
        n_theta: usize,
        values: Vec<Vec<f64>>,
    },
}

impl HProfile {
    /// Tabulate a closed-form profile on a default (log r, theta) grid.
    pub fn from_fn<F: Fn(f64, f64) -> f64>(r_min: f64, r_max: f64, f: F) -> Self {
        let n_r = 48;
        let n_theta = 64;
        let log_r: Vec<f64> = (0..n_r)
            .map(|i| r_min.ln() + (r_max.ln() - r_min.ln()) * i as f64 / (n_r as f64 - 1.0))
            .collect();
        let values = log_r
            .iter()
            .map(|&lr| {
                let r = lr.exp();
                (0..n_theta)
                    .map(|j| f(r, 2.0 * std::f64::consts::PI * j as f64 / n_theta as f64))
                    .collect()
            })
            .collect();
        HProfile::Tabulated {
            log_r,
            n_theta,
            values,
        }
    }

    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        match self {
            HProfile::Zero => 0.0,
            HProfile::Tabulated {
                log_r,
                n_theta,
                values,
            } => {
                let lr = r.ln();
                // below the table h fades linearly toward its required limit 0
                if lr <= log_r[0] {
                    let frac = ((lr - log_r[0] + 2.0).max(0.0)) / 2.0;
                    return frac * Self::interp_theta(&values[0], *n_theta, theta);
                }
                if lr >= *log_r.last().unwrap() {
                    return Self::interp_theta(values.last().unwrap(), *n_theta, theta);
                }
                let i = log_r.partition_point(|&v| v <= lr) - 1;
                let t = (lr - log_r[i]) / (log_r[i + 1] - log_r[i]);
                let lo = Self::interp_theta(&values[i], *n_theta, theta);
                let hi = Self::interp_theta(&values[i + 1], *n_theta, theta);
                lo * (1.0 - t) + hi * t
            }
        }
    }

    fn interp_theta(row: &[f64], n: usize, theta: f64) -> f64 {
        let tau = theta.rem_euclid(2.0 * std::f64::consts::PI) / (2.0 * std::f64::consts::PI);
        let x = tau * n as f64;
        let j = (x.floor() as usize) % n;
        let t = x - x.floor();
        row[j] * (1.0 - t) + row[(j + 1) % n] * t
    }

    /// Max |h| at the smallest tabulated radius; the uniform-vanishing check.
    pub fn smallest_radius_sup(&self) -> f64 {
        match self {
            HProfile::Zero => 0.0,
            HProfile::Tabulated { values, .. } => {
                values[0].iter().fold(0.0f64, |a, v| a.max(v.abs()))
            }
        }
    }
}

/// A conical point: metric dr^2 + C_p r^2 (1 + h_p) dtheta^2 on its chart.
#[derive(Debug, Clone)]
pub struct ConicalPoint {
    pub label: String,
    pub c_p: f64,
    pub h: HProfile,
    pub epsilon_p: f64,
    /// chart-coordinate anchor in the interior mesh, if the interior is a mesh
    pub anchor: Option<[f64; 2]>,
}

impl ConicalPoint {
    /// Orbifold order n when C_p = 1/n^2 for an integer n >= 2.
    pub fn orbifold_order(&self) -> Option<u32> {
        let n = (1.0 / self.c_p.sqrt()).round();
        if n >= 2.0 && ((1.0 / (n * n)) - self.c_p).abs() < 1e-9 * self.c_p {
            Some(n as u32)
        } else {
            None
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_p > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cone {}: C_p must be > 0",
                self.label
            )));
        }
        if (self.c_p - 1.0).abs() < 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "cone {}: C_p = 1 is a regular point",
                self.label
            )));
        }
        if !(self.epsilon_p > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "cone {}: chart radius must be > 0",
                self.label
            )));
        }
        let sup = self.h.smallest_radius_sup();
        if sup > 1e-3 {
            return Err(Error::InvalidArgument(format!(
                "cone {}: h does not vanish toward r = 0 (sup {} at smallest tabulated radius)",
                self.label, sup
            )));
        }
        Ok(())
    }
}

/// Tabulated perturbation of a regular end per the asymptotically hyperbolic
/// form y^{-2}((dx)^2 + (dy)^2 + a1 dx^2 + a2 dx dy + a3 dy^2).
#[derive(Debug, Clone)]
pub struct Perturbation {
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    pub a1: Vec<Vec<f64>>,
    pub a2: Vec<Vec<f64>>,
    pub a3: Vec<Vec<f64>>,
    pub eps0: f64,
}

impl Perturbation {
    fn bilinear(table: &[Vec<f64>], gx: &[f64], gy: &[f64], x: f64, y: f64) -> f64 {
        let find = |g: &[f64], v: f64| -> (usize, f64) {
            if v <= g[0] {
                return (0, 0.0);
            }
            if v >= g[g.len() - 1] {
                return (g.len() - 2, 1.0);
            }
            let i = g.partition_point(|&a| a <= v) - 1;
            (i, (v - g[i]) / (g[i + 1] - g[i]))
        };
        let (i, s) = find(gx, x);
        let (j, t) = find(gy, y);
        let f00 = table[i][j];
        let f10 = table[i + 1][j];
        let f01 = table[i][j + 1];
        let f11 = table[i + 1][j + 1];
        f00 * (1.0 - s) * (1.0 - t) + f10 * s * (1.0 - t) + f01 * (1.0 - s) * t + f11 * s * t
    }

    pub fn eval(&self, x: f64, y: f64) -> (f64, f64, f64) {
        if y < self.grid_y[0] || y > *self.grid_y.last().unwrap() {
            return (0.0, 0.0, 0.0); // outside the tabulated band the end is exact
        }
        (
            Self::bilinear(&self.a1, &self.grid_x, &self.grid_y, x, y),
            Self::bilinear(&self.a2, &self.grid_x, &self.grid_y, x, y),
            Self::bilinear(&self.a3, &self.grid_x, &self.grid_y, x, y),
        )
    }

    /// Spot-check of the decay bound |(y d/dy)^n a_i| <= C (1+|log y|)^{-n-1-eps0}
    /// for n = 0, 1 by finite differences on the tabulation grid.
    pub fn decay_spot_check(&self) -> Result<()> {
        let weight = |y: f64, n: f64| (1.0 + y.ln().abs()).powf(n + 1.0 + self.eps0);
        let mut sup0 = 0.0f64;
        let mut sup1 = 0.0f64;
        for table in [&self.a1, &self.a2, &self.a3] {
            for (i, _x) in self.grid_x.iter().enumerate() {
                for j in 1..self.grid_y.len() - 1 {
                    let y = self.grid_y[j];
                    let v = table[i][j];
                    sup0 = sup0.max(v.abs() * weight(y, 0.0));
                    let dy = self.grid_y[j + 1] - self.grid_y[j - 1];
                    let d = y * (table[i][j + 1] - table[i][j - 1]) / dy;
                    sup1 = sup1.max(d.abs() * weight(y, 1.0));
                }
            }
        }
        if sup1 > 1e4 * (sup0 + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "regular-end perturbation violates the decay spot-check (sup0 {sup0}, sup1 {sup1})"
            )));
        }
        Ok(())
    }
}

/// One end of the surface.
#[derive(Debug, Clone)]
pub enum EndSpec {
    /// Exact metric ((dx)^2+(dy)^2)/y^2 for y > 1; circle radius `radius`.
    Cusp { radius: f64 },
    /// Funnel-type end toward y -> 0 with optional tabulated perturbation.
    Regular {
        radius: f64,
        perturbation: Option<Perturbation>,
    },
}

impl EndSpec {
    pub fn radius(&self) -> f64 {
        match self {
            EndSpec::Cusp { radius } | EndSpec::Regular { radius, .. } => *radius,
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, EndSpec::Cusp { .. })
    }
}

/// Tabulated positive warp profile: ds^2 = dr^2 + f(r)^2 dtheta^2.
#[derive(Debug, Clone)]
pub struct WarpedProfile {
    pub grid_r: Vec<f64>,
    pub f: Vec<f64>,
}

impl WarpedProfile {
    pub fn eval(&self, r: f64) -> f64 {
        let g = &self.grid_r;
        if r <= g[0] {
            return self.f[0];
        }
        if r >= g[g.len() - 1] {
            return self.f[self.f.len() - 1];
        }
        let i = g.partition_point(|&a| a <= r) - 1;
        let t = (r - g[i]) / (g[i + 1] - g[i]);
        self.f[i] * (1.0 - t) + self.f[i + 1] * t
    }
}

/// Interior description.
#[derive(Debug, Clone)]
pub enum Interior {
    WarpedProfile(WarpedProfile),
    TriMesh(TriMesh),
    /// End-to-end surfaces (the free or perturbed cylinder) have no separate
    /// interior block.
    None,
}

/// A point expressed in one of the surface's charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartPoint {
    /// (x, y) in end `index`'s half-cylinder coordinates.
    End { index: usize, x: f64, y: f64 },
    /// Polar (r, theta) around conical point `index`.
    Cone { index: usize, r: f64, theta: f64 },
    /// (r, theta) in the warped-profile interior.
    Profile { r: f64, theta: f64 },
    /// Chart coordinates inside mesh triangle `tri`.
    Mesh { tri: usize, x: f64, y: f64 },
}

/// Complete surface description: ends (cusps first), interior, conical points.
#[derive(Debug, Clone)]
pub struct SurfaceSpec {
    pub name: String,
    pub ends: Vec<EndSpec>,
    pub interior: Interior,
    pub cones: Vec<ConicalPoint>,
    /// Rotationally symmetric x-independent a1 perturbation of the cylinder
    /// as a function of y; the ModeODE backend's surface class.
    pub axisym_a1: Option<WarpedProfile>,
}

impl SurfaceSpec {
    pub fn num_cusps(&self) -> usize {
        self.ends.iter().filter(|e| e.is_cusp()).count()
    }

    pub fn validate(&self) -> Result<()> {
        let mu = self.num_cusps();
        if mu == 0 {
            return Err(Error::InvalidArgument(
                "surface needs at least one cusp end".into(),
            ));
        }
        for (i, e) in self.ends.iter().enumerate() {
            if e.is_cusp() && i >= mu {
                return Err(Error::InvalidArgument(
                    "cusp ends must be listed first".into(),
                ));
            }
            if !(e.radius() > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "end {i}: radius must be > 0"
                )));
            }
            if let EndSpec::Regular {
                perturbation: Some(p),
                ..
            } = e
            {
                p.decay_spot_check()?;
            }
        }
        for c in &self.cones {
            c.validate()?;
        }
        if let Interior::TriMesh(m) = &self.interior {
            for (t, g) in m.metric.iter().enumerate() {
                let mt = MetricTensor { g: *g };
                if !mt.is_spd() {
                    return Err(Error::InvalidArgument(format!(
                        "mesh triangle {t}: metric not symmetric positive definite"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Metric tensor and volume density at a chart point.
    pub fn metric_at(&self, p: ChartPoint) -> Result<(MetricTensor, f64)> {
        let g = match p {
            ChartPoint::End { index, x, y } => {
                let end = self
                    .ends
                    .get(index)
                    .ok_or_else(|| Error::OutOfDomain(format!("end index {index} out of range")))?;
                match end {
                    EndSpec::Cusp { .. } => {
                        if y <= 1.0 {
                            return Err(Error::OutOfDomain(format!(
                                "cusp chart covers y > 1, got y = {y}"
                            )));
                        }
                        MetricTensor::isotropic(1.0 / (y * y))
                    }
                    EndSpec::Regular { perturbation, .. } => {
                        if y <= 0.0 {
                            return Err(Error::OutOfDomain(format!(
                                "regular chart needs y > 0, got y = {y}"
                            )));
                        }
                        let (mut a1, mut a2, mut a3) = (0.0, 0.0, 0.0);
                        if let Some(pert) = perturbation {
                            let (b1, b2, b3) = pert.eval(x, y);
                            a1 = b1;
                            a2 = b2;
                            a3 = b3;
                        }
                        if let Some(ax) = &self.axisym_a1 {
                            a1 += ax.eval(y);
                        }
                        let s = 1.0 / (y * y);
                        MetricTensor {
                            g: [
                                [s * (1.0 + a1), s * a2 / 2.0],
                                [s * a2 / 2.0, s * (1.0 + a3)],
                            ],
                        }
                    }
                }
            }
            ChartPoint::Cone { index, r, theta } => {
                let cone = self
                    .cones
                    .get(index)
                    .ok_or_else(|| Error::OutOfDomain(format!("cone index {index} out of range")))?;
                if !(r > 0.0 && r < cone.epsilon_p) {
                    return Err(Error::OutOfDomain(format!(
                        "cone chart covers 0 < r < {}, got r = {r}",
                        cone.epsilon_p
                    )));
                }
                let h = cone.h.eval(r, theta);
                MetricTensor::diag(1.0, cone.c_p * r * r * (1.0 + h))
            }
            ChartPoint::Profile { r, theta: _ } => match &self.interior {
                Interior::WarpedProfile(w) => {
                    let f = w.eval(r);
                    MetricTensor::diag(1.0, f * f)
                }
                _ => {
                    return Err(Error::OutOfDomain(
                        "surface has no warped-profile interior".into(),
                    ))
                }
            },
            ChartPoint::Mesh { tri, .. } => match &self.interior {
                Interior::TriMesh(m) => {
                    let g = m
                        .metric
                        .get(tri)
                        .ok_or_else(|| Error::OutOfDomain(format!("triangle {tri} out of range")))?;
                    MetricTensor { g: *g }
                }
                _ => return Err(Error::OutOfDomain("surface has no mesh interior".into())),
            },
        };
        let density = g.volume_density();
        Ok((g, density))
    }

    /// Geodesic-ball area around a cone-chart center; mesh interiors go
    /// through `TriMesh::geodesic_ball_area`.
    pub fn ball_area(&self, center: ChartPoint, r: f64) -> Result<f64> {
        match center {
            ChartPoint::Cone { index, .. } => {
                let cone = self
                    .cones
                    .get(index)
                    .ok_or_else(|| Error::OutOfDomain(format!("cone index {index} out of range")))?;
                if r >= cone.epsilon_p {
                    return Err(Error::OutOfDomain(format!(
                        "ball radius {r} escapes the cone chart (epsilon {})",
                        cone.epsilon_p
                    )));
                }
                Ok(ball_area_polar(cone.c_p, &cone.h, r))
            }
            _ => Err(Error::OutOfDomain(
                "ball_area supports cone-chart centers; use TriMesh::geodesic_ball_area for meshes"
                    .into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cusp_metric_is_exact() {
        let s = synth::free_cylinder(1.0);
        let (g, dens) = s
            .metric_at(ChartPoint::End {
                index: 0,
                x: 0.2,
                y: 3.0,
            })
            .unwrap();
        assert_relative_eq!(g.g[0][0], 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(g.g[1][1], 1.0 / 9.0, epsilon = 1e-15);
        assert_relative_eq!(dens, 1.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn cone_metric_with_zero_h() {
        let mut s = synth::free_cylinder(1.0);
        s.cones.push(ConicalPoint {
            label: "p".into(),
            c_p: 1.0 / 9.0,
            h: HProfile::Zero,
            epsilon_p: 1.0,
            anchor: None,
        });
        let (g, _) = s
            .metric_at(ChartPoint::Cone {
                index: 0,
                r: 0.5,
                theta: 1.0,
            })
            .unwrap();
        assert_relative_eq!(g.g[0][0], 1.0, epsilon = 1e-15);
        assert_relative_eq!(g.g[1][1], 0.25 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn funnel_profile_matches_perturbed_form() {
        // the funnel metric (dy/y)^2 + (1/y + y/4)^2 dt^2 on the regular end:
        // angular coefficient y^{-2}(1 + a1) with a1 = (1 + y^2/4)^2 - 1
        let y: f64 = 0.6;
        let funnel_coeff = (1.0 / y + y / 4.0).powi(2);
        let a1 = (1.0 + y * y / 4.0).powi(2) - 1.0;
        let model = (1.0 + a1) / (y * y);
        assert_relative_eq!(funnel_coeff, model, epsilon = 1e-14);
    }

    #[test]
    fn validation_rejects_bad_surfaces() {
        let mut s = synth::free_cylinder(1.0);
        s.cones.push(ConicalPoint {
            label: "bad".into(),
            c_p: -1.0,
            h: HProfile::Zero,
            epsilon_p: 0.5,
            anchor: None,
        });
        assert!(s.validate().is_err());

        let s2 = SurfaceSpec {
            name: "no-cusp".into(),
            ends: vec![EndSpec::Regular {
                radius: 1.0,
                perturbation: None,
            }],
            interior: Interior::None,
            cones: vec![],
            axisym_a1: None,
        };
        assert!(s2.validate().is_err());
    }

    #[test]
    fn orbifold_order_detection() {
        let c = ConicalPoint {
            label: "p".into(),
            c_p: 1.0 / 16.0,
            h: HProfile::Zero,
            epsilon_p: 1.0,
            anchor: None,
        };
        assert_eq!(c.orbifold_order(), Some(4));
        let c2 = ConicalPoint {
            label: "q".into(),
            c_p: 0.3,
            h: HProfile::Zero,
            epsilon_p: 1.0,
            anchor: None,
        };
        assert_eq!(c2.orbifold_order(), None);
    }

    #[test]
    fn h_profile_interpolation_and_vanishing() {
        let h = HProfile::from_fn(1e-4, 1.0, |r, th| r * th.cos());
        assert!(h.smallest_radius_sup() < 1e-3);
        assert_relative_eq!(h.eval(0.5, 0.0), 0.5, epsilon = 2e-2);
        assert!(h.eval(1e-6, 1.0).abs() < 1e-3);
    }
}
