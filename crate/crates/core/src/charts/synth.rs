//! Generators for the workbench's test surfaces: free and perturbed
//! cylinders, the one-cusp "cigar" with a compact cap, flat and warped mesh
//! patches, and mesh patches carrying conical points realized through
//! conformally flat factors.

use super::{
    ConicalPoint, EndSpec, HProfile, Interior, SurfaceSpec, TriMesh, WarpedProfile,
};

/// Exact free cylinder S^r x (0, infinity): one cusp, one regular end.
pub fn free_cylinder(radius: f64) -> SurfaceSpec {
    SurfaceSpec {
        name: "free-cylinder".into(),
        ends: vec![
            EndSpec::Cusp { radius },
            EndSpec::Regular {
                radius,
                perturbation: None,
            },
        ],
        interior: Interior::None,
        cones: vec![],
        axisym_a1: None,
    }
}

/// Analytic compactly supported bump amp * exp(1 - 1/(1 - t^2)) with
/// t = (y - center)/width, together with the log-derivative combinations the
/// mode solver needs.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub amp: f64,
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub fn a(&self, y: f64) -> f64 {
        let t = (y - self.center) / self.width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            self.amp * (1.0 - 1.0 / (1.0 - t * t)).exp()
        }
    }

    /// da/dy
    pub fn da_dy(&self, y: f64) -> f64 {
        let t = (y - self.center) / self.width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - t * t;
            self.a(y) * (-2.0 * t / (s * s)) / self.width
        }
    }

    /// d^2 a/dy^2
    pub fn d2a_dy2(&self, y: f64) -> f64 {
        let t = (y - self.center) / self.width;
        if t.abs() >= 1.0 {
            0.0
        } else {
            let s = 1.0 - t * t;
            let phi1 = -2.0 * t / (s * s);
            let phi2 = (-2.0 - 6.0 * t * t) / (s * s * s);
            self.a(y) * (phi1 * phi1 + phi2) / (self.width * self.width)
        }
    }

    /// y da/dy
    pub fn da_dt(&self, y: f64) -> f64 {
        y * self.da_dy(y)
    }

    /// (y d/dy)^2 a
    pub fn d2a_dt2(&self, y: f64) -> f64 {
        self.da_dt(y) + y * y * self.d2a_dy2(y)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.center - self.width, self.center + self.width)
    }
}

/// Smooth compactly supported bump for the rotationally symmetric a1
/// perturbation: amp * exp(1 - 1/(1 - t^2)) with t = (y - center)/width.
pub fn axisym_bump(amp: f64, center: f64, width: f64) -> WarpedProfile {
    let n = 801;
    let y0 = (center - width).max(1e-4);
    let y1 = center + width;
    let grid_r: Vec<f64> = (0..n)
        .map(|i| y0 + (y1 - y0) * i as f64 / (n - 1) as f64)
        .collect();
    let f = grid_r
        .iter()
        .map(|&y| {
            let t = (y - center) / width;
            if t.abs() >= 1.0 {
                0.0
            } else {
                amp * (1.0 - 1.0 / (1.0 - t * t)).exp()
            }
        })
        .collect();
    WarpedProfile { grid_r, f }
}

/// Rotationally symmetric perturbed cylinder: metric
/// y^{-2}(dy^2 + (1 + a1(y)) dx^2) with a1 a compact bump below y = 1.
pub fn warped_cylinder(radius: f64, amp: f64) -> SurfaceSpec {
    let mut s = free_cylinder(radius);
    s.name = "warped-cylinder".into();
    s.axisym_a1 = Some(axisym_bump(amp, 0.6, 0.25));
    s
}

/// One-cusp surface with a smooth compact cap: arc-length coordinate rho with
/// ds^2 = d rho^2 + f(rho)^2 d theta^2, f = radius e^{-rho} for rho >= 0
/// (the exact cusp, y = e^rho), quintic cap on [-cap_len, 0] closing the
/// surface smoothly at the axis.
#[derive(Debug, Clone)]
pub struct Cigar {
    pub radius: f64,
    pub cap_len: f64,
    coeffs: [f64; 6],
}

impl Cigar {
    pub fn new(radius: f64, cap_len: f64) -> Cigar {
        // quintic p(t) on t in [0,1], rho = -cap_len + t*cap_len:
        // p(0)=0, p'(0)=cap_len (unit slope in rho), p''(0)=0,
        // p(1)=radius, p'(1)=-radius*cap_len, p''(1)=radius*cap_len^2
        let l = cap_len;
        let r = radius;
        let (p0, d0, s0) = (0.0, l, 0.0);
        let (p1, d1, s1) = (r, -r * l, r * l * l);
        // p = a0 + a1 t + a2 t^2 + a3 t^3 + a4 t^4 + a5 t^5
        let a0 = p0;
        let a1 = d0;
        let a2 = s0 / 2.0;
        // solve the 3x3 system for a3, a4, a5
        let b1 = p1 - (a0 + a1 + a2);
        let b2 = d1 - (a1 + 2.0 * a2);
        let b3 = s1 - 2.0 * a2;
        let a3 = 10.0 * b1 - 4.0 * b2 + 0.5 * b3;
        let a4 = -15.0 * b1 + 7.0 * b2 - b3;
        let a5 = 6.0 * b1 - 3.0 * b2 + 0.5 * b3;
        Cigar {
            radius,
            cap_len,
            coeffs: [a0, a1, a2, a3, a4, a5],
        }
    }

    /// Warp profile f(rho); rho = 0 is the cusp entrance y = 1.
    pub fn f(&self, rho: f64) -> f64 {
        if rho >= 0.0 {
            self.radius * (-rho).exp()
        } else {
            let t = (rho + self.cap_len) / self.cap_len;
            let c = &self.coeffs;
            c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))))
        }
    }

    /// df/d rho.
    pub fn df(&self, rho: f64) -> f64 {
        if rho >= 0.0 {
            -self.radius * (-rho).exp()
        } else {
            let t = (rho + self.cap_len) / self.cap_len;
            let c = &self.coeffs;
            (c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5]))))
                / self.cap_len
        }
    }

    /// d^2 f/d rho^2.
    pub fn d2f(&self, rho: f64) -> f64 {
        if rho >= 0.0 {
            self.radius * (-rho).exp()
        } else {
            let t = (rho + self.cap_len) / self.cap_len;
            let c = &self.coeffs;
            (2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5])))
                / (self.cap_len * self.cap_len)
        }
    }

    /// d^3 f/d rho^3; used for the axis-expansion constant c3 = f'''(axis)/6.
    pub fn d3f(&self, rho: f64) -> f64 {
        if rho >= 0.0 {
            -self.radius * (-rho).exp()
        } else {
            let t = (rho + self.cap_len) / self.cap_len;
            let c = &self.coeffs;
            (6.0 * c[3] + t * (24.0 * c[4] + t * 60.0 * c[5])) / self.cap_len.powi(3)
        }
    }

    pub fn axis(&self) -> f64 {
        -self.cap_len
    }

    pub fn surface_spec(&self) -> SurfaceSpec {
        let n = 2001;
        let lo = self.axis();
        let hi = 3.0;
        let grid_r: Vec<f64> = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        let f = grid_r.iter().map(|&rho| self.f(rho)).collect();
        SurfaceSpec {
            name: "cigar".into(),
            ends: vec![EndSpec::Cusp {
                radius: self.radius,
            }],
            interior: Interior::WarpedProfile(WarpedProfile { grid_r, f }),
            cones: vec![],
            axisym_a1: None,
        }
    }
}

/// Description of a conical point for the conformal mesh generators.
#[derive(Debug, Clone, Copy)]
pub struct ConeSeed {
    pub x: f64,
    pub y: f64,
    /// orbifold order; cone constant C = 1/n^2
    pub n: u32,
    /// amplitude of the angular perturbation h ~ h_amp * r cos(theta)
    pub h_amp: f64,
}

/// Chart radius of the exact-cone region around each seed.
pub const CONE_CHART_RADIUS: f64 = 0.5;

/// Metric field realizing the seeds as conical points in the bounded polar
/// chart: within half the chart radius of a seed the metric is exactly
/// r_hat r_hat^T + C (1 + h)(I - r_hat r_hat^T), so the chart radius equals
/// geodesic distance from the apex; a smoothstep blends back to the flat
/// metric at the chart edge.
pub fn cone_patch_field(seeds: Vec<ConeSeed>) -> impl Fn(f64, f64) -> [[f64; 2]; 2] + Clone {
    move |x: f64, y: f64| {
        let mut angular = 1.0f64;
        let mut radial_dir = [1.0, 0.0];
        let mut active = false;
        for s in &seeds {
            let dx = x - s.x;
            let dy = y - s.y;
            let r = (dx * dx + dy * dy).sqrt();
            if r >= CONE_CHART_RADIUS || r < 1e-14 {
                continue;
            }
            let th = dy.atan2(dx);
            let c = 1.0 / (s.n as f64).powi(2);
            let h = s.h_amp * r * th.cos();
            // smoothstep weight: 1 inside r <= eps/2, 0 at r >= eps
            let t = ((r / CONE_CHART_RADIUS - 0.5) / 0.5).clamp(0.0, 1.0);
            let w = 1.0 - t * t * (3.0 - 2.0 * t);
            angular = w * c * (1.0 + h) + (1.0 - w);
            radial_dir = [dx / r, dy / r];
            active = true;
        }
        if !active {
            return [[1.0, 0.0], [0.0, 1.0]];
        }
        // g = P_r + angular * (I - P_r)
        let (cx, cy) = (radial_dir[0], radial_dir[1]);
        let pr = [[cx * cx, cx * cy], [cx * cy, cy * cy]];
        [
            [
                pr[0][0] + angular * (1.0 - pr[0][0]),
                pr[0][1] * (1.0 - angular),
            ],
            [
                pr[1][0] * (1.0 - angular),
                pr[1][1] + angular * (1.0 - pr[1][1]),
            ],
        ]
    }
}

fn cone_records(seeds: &[ConeSeed]) -> Vec<ConicalPoint> {
    seeds
        .iter()
        .enumerate()
        .map(|(i, s)| ConicalPoint {
            label: format!("p{}", i + 1),
            c_p: 1.0 / (s.n as f64).powi(2),
            h: if s.h_amp == 0.0 {
                HProfile::Zero
            } else {
                let amp = s.h_amp;
                HProfile::from_fn(1e-5, 0.5 * CONE_CHART_RADIUS, move |r, th| {
                    amp * r * th.cos()
                })
            },
            epsilon_p: 0.5 * CONE_CHART_RADIUS,
            anchor: Some([s.x, s.y]),
        })
        .collect()
}

/// Flat rectangular strip as a compact test interior (with a nominal cusp so
/// the end bookkeeping stays valid).
pub fn flat_strip(width: f64, height: f64, nx: usize, ny: usize) -> SurfaceSpec {
    let mesh = TriMesh::rectangle(0.0, width, 0.0, height, nx, ny, |_, _| {
        [[1.0, 0.0], [0.0, 1.0]]
    });
    SurfaceSpec {
        name: "flat-strip".into(),
        ends: vec![EndSpec::Cusp { radius: 1.0 }],
        interior: Interior::TriMesh(mesh),
        cones: vec![],
        axisym_a1: None,
    }
}

/// Smoothly curved (cone-free) patch: conformal factor exp(2 amp sin cos).
pub fn warped_patch(width: f64, height: f64, nx: usize, ny: usize, amp: f64) -> SurfaceSpec {
    let mesh = TriMesh::rectangle(0.0, width, 0.0, height, nx, ny, move |x, y| {
        let f = (2.0
            * amp
            * (std::f64::consts::PI * x / width).sin()
            * (std::f64::consts::PI * y / height).cos())
        .exp();
        [[f, 0.0], [0.0, f]]
    });
    SurfaceSpec {
        name: "warped-patch".into(),
        ends: vec![EndSpec::Cusp { radius: 1.0 }],
        interior: Interior::TriMesh(mesh),
        cones: vec![],
        axisym_a1: None,
    }
}

/// Rectangle carrying conical points; anchors are snapped to mesh vertices.
pub fn cone_rectangle(
    width: f64,
    height: f64,
    nx: usize,
    ny: usize,
    seeds: &[ConeSeed],
) -> SurfaceSpec {
    let mut snapped: Vec<ConeSeed> = seeds.to_vec();
    // snap anchors onto the vertex lattice so the singular factor is never
    // evaluated at a centroid closer than ~h/3
    for s in snapped.iter_mut() {
        let gx = (s.x / width * (nx - 1) as f64).round() / (nx - 1) as f64 * width;
        let gy = (s.y / height * (ny - 1) as f64).round() / (ny - 1) as f64 * height;
        s.x = gx;
        s.y = gy;
    }
    let field = cone_patch_field(snapped.clone());
    let mesh = TriMesh::rectangle(0.0, width, 0.0, height, nx, ny, field);
    SurfaceSpec {
        name: "cone-rectangle".into(),
        ends: vec![EndSpec::Cusp { radius: 1.0 }],
        interior: Interior::TriMesh(mesh),
        cones: cone_records(&snapped),
        axisym_a1: None,
    }
}

/// Disc with one central conical point.
pub fn cone_disc(radius: f64, rings: usize, seg: usize, n: u32, h_amp: f64) -> SurfaceSpec {
    let seeds = vec![ConeSeed {
        x: 0.0,
        y: 0.0,
        n,
        h_amp,
    }];
    let field = cone_patch_field(seeds.clone());
    let mesh = TriMesh::disc(radius, rings, seg, field);
    SurfaceSpec {
        name: "cone-disc".into(),
        ends: vec![EndSpec::Cusp { radius: 1.0 }],
        interior: Interior::TriMesh(mesh),
        cones: cone_records(&seeds),
        axisym_a1: None,
    }
}
