//! Physical S-matrix: channel-by-channel scattering solves on the truncated
//! cylinder. Zero-mode columns use the scattered-field formulation (the
//! incoming wave solves the free equation exactly, so the source lives on the
//! perturbation band); nonzero regular modes use bounded total-field solves.

use super::axisym::AxisymGeometry;
use super::numerov::{fit_two_basis, ModeProblem, RobinBc};
use super::TruncatedProblem;
use crate::freemodel::FreqConstants;
use crate::specfun::{bessel_i, bessel_i_deriv, gamma_complex, ScaledBessel};
use crate::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// One asymptotic channel of the truncated problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    /// scalar cusp channel of end `end`; scattering data in the
    /// constant-function convention, h-weight 2 pi r
    Cusp { end: usize, radius: f64 },
    /// regular-end mode n; data against the normalized circle mode, weight 1
    RegularMode { end: usize, n: i64, radius: f64 },
}

impl Channel {
    pub fn weight(&self) -> f64 {
        match self {
            Channel::Cusp { radius, .. } => 2.0 * PI * radius,
            Channel::RegularMode { .. } => 1.0,
        }
    }
}

/// The physical S-matrix at one energy: entries over the channel list, the
/// h-infinity weights, and the realized unitarity defect.
#[derive(Debug, Clone)]
pub struct ScatterMatrix {
    pub k: f64,
    pub channels: Vec<Channel>,
    pub entries: DMatrix<Complex64>,
    pub unitarity_defect: f64,
    pub min_pivot: f64,
    /// worst incoming-leakage diagnostic across extractions
    pub leakage: f64,
}

impl ScatterMatrix {
    pub fn channel_index(&self, c: &Channel) -> Option<usize> {
        self.channels.iter().position(|x| x == c)
    }

    /// || S^H W S - W ||_2 with W the h-infinity weights.
    pub fn compute_unitarity_defect(entries: &DMatrix<Complex64>, weights: &[f64]) -> f64 {
        let m = entries.nrows();
        let mut d = DMatrix::<Complex64>::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = Complex64::default();
                for l in 0..m {
                    acc += entries[(l, i)].conj() * weights[l] * entries[(l, j)];
                }
                if i == j {
                    acc -= weights[i];
                }
                d[(i, j)] = acc;
            }
        }
        hermitian_two_norm(&d)
    }
}

/// Operator 2-norm of a (small) Hermitian matrix by power iteration.
pub(crate) fn hermitian_two_norm(d: &DMatrix<Complex64>) -> f64 {
    let m = d.nrows();
    if m == 0 {
        return 0.0;
    }
    let mut v: Vec<Complex64> = (0..m)
        .map(|i| Complex64::new(1.0 + (i as f64 * 0.7).sin(), 0.3 * (i as f64).cos()))
        .collect();
    let mut lam = 0.0;
    for _ in 0..60 {
        let mut w = vec![Complex64::default(); m];
        for i in 0..m {
            for j in 0..m {
                w[i] += d[(i, j)] * v[j];
            }
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm == 0.0 {
            return 0.0;
        }
        lam = nrm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / nrm;
        }
    }
    lam
}

struct Workspace {
    fc: FreqConstants,
    k: f64,
    radius: f64,
    t_bottom: f64,
    t_top: f64,
    points: usize,
    fit_span: usize,
}

/// Assemble the physical S-matrix of a truncated cylinder problem with the
/// per-mode backend: channels are the cusp scalar plus regular modes up to
/// n_max.
pub fn physical_smatrix(problem: &TruncatedProblem) -> Result<ScatterMatrix> {
    let geom = match &problem.geometry {
        g @ AxisymGeometry::Cylinder { .. } => g,
        AxisymGeometry::Cigar(_) => {
            return Err(Error::InvalidArgument(
                "the physical S-matrix needs the two-ended cylinder; one-ended surfaces have \
                 no regular channels"
                    .into(),
            ))
        }
    };
    let k = problem.k;
    let r = problem.radius();
    let ws = Workspace {
        fc: FreqConstants::new(k)?,
        k,
        radius: r,
        t_bottom: problem.y_bottom.ln(),
        t_top: problem.y_top.ln(),
        points: problem.grid_points,
        fit_span: 32,
    };
    let nmax = problem.n_max;
    let mut channels = vec![Channel::Cusp { end: 0, radius: r }];
    for n in -nmax..=nmax {
        channels.push(Channel::RegularMode { end: 1, n, radius: r });
    }
    let m = channels.len();
    let mut entries = DMatrix::<Complex64>::zeros(m, m);
    let mut min_pivot = f64::INFINITY;
    let mut leakage = 0.0f64;

    // zero-mode 2x2 block: cusp and regular-0 channels couple
    let reg0 = 1 + nmax as usize; // index of RegularMode n = 0
    {
        let (s11, s21, piv, leak) = zero_mode_column(geom, &ws, true)?;
        entries[(0, 0)] = s11;
        entries[(reg0, 0)] = s21;
        min_pivot = min_pivot.min(piv);
        leakage = leakage.max(leak);
        let (s12, s22, piv, leak) = zero_mode_column(geom, &ws, false)?;
        entries[(0, reg0)] = s12;
        entries[(reg0, reg0)] = s22;
        min_pivot = min_pivot.min(piv);
        leakage = leakage.max(leak);
    }
    // nonzero regular modes scatter diagonally on a rotationally symmetric
    // surface; solve per |n| and share
    for n in 1..=nmax {
        let (snn, piv, leak) = regular_mode_diagonal(geom, &ws, n)?;
        let ip = (1 + (nmax + n) as usize, 1 + (nmax - n) as usize);
        entries[(ip.0, ip.0)] = snn;
        entries[(ip.1, ip.1)] = snn;
        min_pivot = min_pivot.min(piv);
        leakage = leakage.max(leak);
    }

    let weights: Vec<f64> = channels.iter().map(|c| c.weight()).collect();
    let unitarity_defect = ScatterMatrix::compute_unitarity_defect(&entries, &weights);
    Ok(ScatterMatrix {
        k,
        channels,
        entries,
        unitarity_defect,
        min_pivot,
        leakage,
    })
}

/// Zero-mode column: `from_cusp` selects the incoming channel. Returns
/// (cusp-row entry, regular-0-row entry, pivot, leakage).
fn zero_mode_column(
    geom: &AxisymGeometry,
    ws: &Workspace,
    from_cusp: bool,
) -> Result<(Complex64, Complex64, f64, f64)> {
    let k = ws.k;
    let sqrt_circ = (2.0 * PI * ws.radius).sqrt();
    // incoming amplitude in w-variables: cu * e^{sigma_im * i k t}
    let (cu, sigma, phase_sign) = if from_cusp {
        (
            sqrt_circ * ws.fc.omega_c_minus,
            Complex64::new(0.5, -k),
            -1.0,
        )
    } else {
        (ws.fc.omega_minus, Complex64::new(0.5, k), 1.0)
    };
    let prob = ModeProblem::new(geom, k, 0, ws.t_bottom, ws.t_top, ws.points)?;
    // source on the perturbation band
    let source: Vec<Complex64> = if let AxisymGeometry::Cylinder {
        bump: Some(b), ..
    } = geom
    {
        prob.t
            .iter()
            .map(|&t| {
                let y = t.exp();
                let a = b.a(y);
                if a == 0.0 {
                    Complex64::default()
                } else {
                    let ad = b.da_dt(y);
                    let phase = Complex64::new(0.0, phase_sign * k * t).exp();
                    -cu * sigma * ad / (2.0 * (1.0 + a).powf(0.75)) * phase
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let top = RobinBc::outgoing(Complex64::new(0.0, k));
    let bottom = RobinBc::outgoing(Complex64::new(0.0, -k));
    let sol = prob.solve(bottom, top, &source)?;

    // top extraction: scattered w = beta e^{ikt} (+ leakage e^{-ikt})
    let (beta, leak_top) = fit_exponentials(&prob, &sol.w, k, prob.t.len() - 1, ws.fit_span, true);
    // bottom extraction: scattered w = gamma e^{-ikt} (+ leakage e^{ikt})
    let (gamma, leak_bot) = fit_exponentials(&prob, &sol.w, k, 0, ws.fit_span, false);

    let leak = leak_top.max(leak_bot);
    if from_cusp {
        // outgoing cusp content: beta; outgoing regular content: cu + gamma
        let s_cusp = -beta / (ws.fc.omega_c_plus * sqrt_circ);
        let s_reg = -(cu + gamma) / ws.fc.omega_plus;
        Ok((s_cusp, s_reg, sol.min_pivot, leak))
    } else {
        // incoming from the regular side: the incoming branch continues to the
        // cusp as outgoing y^{1/2+ik}
        let s_cusp = -(cu + beta) / (ws.fc.omega_c_plus * sqrt_circ);
        let s_reg = -gamma / ws.fc.omega_plus;
        Ok((s_cusp, s_reg, sol.min_pivot, leak))
    }
}

/// Fit w = c_out b_out + c_in b_in with b = e^{±ikt} near a boundary node;
/// returns (outgoing coefficient, |incoming leakage| relative).
fn fit_exponentials(
    prob: &ModeProblem,
    w: &[Complex64],
    k: f64,
    node: usize,
    span: usize,
    outgoing_is_plus: bool,
) -> (Complex64, f64) {
    let (i1, i2) = if node == 0 {
        (0, span)
    } else {
        (node - span, node)
    };
    let e = |t: f64, s: f64| Complex64::new(0.0, s * k * t).exp();
    let s_out = if outgoing_is_plus { 1.0 } else { -1.0 };
    let (t1, t2) = (prob.t[i1], prob.t[i2]);
    let b_out = (e(t1, s_out), e(t2, s_out));
    let b_in = (e(t1, -s_out), e(t2, -s_out));
    let det = b_out.0 * b_in.1 - b_in.0 * b_out.1;
    let c_out = (w[i1] * b_in.1 - b_in.0 * w[i2]) / det;
    let c_in = (b_out.0 * w[i2] - w[i1] * b_out.1) / det;
    let scale = c_out.norm().max(1e-300);
    (c_out, c_in.norm() / scale.max(1.0))
}

/// Diagonal S-entry of regular mode n > 0 through a bounded total-field
/// solve: K-outgoing at the cusp, incoming I_{+ik} prescribed at the regular
/// truncation.
fn regular_mode_diagonal(
    geom: &AxisymGeometry,
    ws: &Workspace,
    n: i64,
) -> Result<(Complex64, f64, f64)> {
    let k = ws.k;
    let zeta = geom.zeta(n);
    let nu_in = Complex64::new(0.0, k);
    let nu_out = Complex64::new(0.0, -k);
    let gamma_p = gamma_complex(Complex64::new(1.0, k))?;
    let gamma_m = gamma_complex(Complex64::new(1.0, -k))?;
    let half_zeta_pow = |s: f64| Complex64::new(0.0, s * (zeta / 2.0).ln()).exp();
    // incoming normalization: omega_- y^{1/2+ik} asymptotics means the
    // incoming branch is cn I_{+ik}(zeta y) with cn = omega_- Gamma(1+ik)(zeta/2)^{-ik}
    let cn = ws.fc.omega_minus * gamma_p * half_zeta_pow(-k);

    let prob = ModeProblem::new(geom, k, n, ws.t_bottom, ws.t_top, ws.points)?;
    let t0 = prob.t[0];
    let z0 = zeta * t0.exp();
    let c_out = geom.regular_outgoing_logderiv(k, n, t0)?;
    let i_in = bessel_i(nu_in, z0)?;
    let i_in_dot = bessel_i_deriv(nu_in, z0)?.scale_by(Complex64::new(z0, 0.0));
    let w_in = i_in.value() * cn;
    let w_in_dot = i_in_dot.value() * cn;
    let bottom = RobinBc {
        c: c_out,
        q: w_in_dot - c_out * w_in,
    };
    let top = RobinBc::outgoing(geom.cusp_outgoing_logderiv(k, n, *prob.t.last().unwrap())?);
    let sol = prob.solve(bottom, top, &[])?;

    // decompose near the bottom in the {I_{+ik}, I_{-ik}} basis
    let (i1, i2) = (0usize, ws.fit_span);
    let basis = |nu: Complex64, i: usize| -> Result<ScaledBessel> {
        bessel_i(nu, zeta * prob.t[i].exp())
    };
    let (alpha, delta) = fit_two_basis(
        sol.w[i1],
        sol.w[i2],
        (basis(nu_in, i1)?, basis(nu_in, i2)?),
        (basis(nu_out, i1)?, basis(nu_out, i2)?),
    );
    // alpha should reproduce the incoming normalization; report deviation
    let leak = (alpha.value() - cn).norm() / cn.norm();
    let psi_plus = -delta.value() * half_zeta_pow(-k) / (gamma_m * ws.fc.omega_plus);
    Ok((psi_plus, sol.min_pivot, leak))
}

/// What drives a Helmholtz solve.
#[derive(Debug, Clone)]
pub enum HelmholtzDrive {
    /// generalized incoming data at the cusp: amplitudes a_n
    IncomingCusp(Vec<(i64, Complex64)>),
    /// per-mode volume source in w-variables on the solver grid
    SourceMode { n: i64, samples: Vec<Complex64> },
}

/// One solved radial mode: the physical mode v(y) = w(t)/w_factor on the
/// shared t-grid (t = log y), with an explicit scale exponent so growing
/// incoming data stays representable: v_true = v * exp(scale_exp).
#[derive(Debug, Clone)]
pub struct ModeField {
    pub n: i64,
    pub t: Vec<f64>,
    pub v: Vec<Complex64>,
    pub scale_exp: f64,
    pub min_pivot: f64,
}

/// Direct Helmholtz solve with transparent conditions: total field for
/// incoming drives, plain source solve otherwise.
pub fn solve_helmholtz(problem: &TruncatedProblem, drive: &HelmholtzDrive) -> Result<Vec<ModeField>> {
    let geom = &problem.geometry;
    let k = problem.k;
    let t_top = problem.y_top.ln();
    let t_bottom = match geom {
        AxisymGeometry::Cylinder { .. } => problem.y_bottom.ln(),
        AxisymGeometry::Cigar(c) => c.axis() + 5.0 * (t_top - c.axis()) / problem.grid_points as f64,
    };
    let mut out = Vec::new();
    match drive {
        HelmholtzDrive::IncomingCusp(amps) => {
            for &(n, a_n) in amps {
                let prob = ModeProblem::new(geom, k, n, t_bottom, t_top, problem.grid_points)?;
                // incoming branch at the cusp in w-variables
                let (w_in, w_in_dot, scale_exp) = if n == 0 {
                    let e = Complex64::new(0.0, -k * t_top).exp();
                    (a_n * e, a_n * e * Complex64::new(0.0, -k), 0.0)
                } else {
                    let z = geom.zeta(n) * t_top.exp();
                    let iv = bessel_i(Complex64::new(0.0, -k), z)?;
                    let id = bessel_i_deriv(Complex64::new(0.0, -k), z)?
                        .scale_by(Complex64::new(z, 0.0));
                    let s = iv.ln_abs();
                    (
                        a_n * ScaledBessel::new(iv.mantissa, iv.log_scale - s).value(),
                        a_n * ScaledBessel::new(id.mantissa, id.log_scale - s).value(),
                        s,
                    )
                };
                let c_top = geom.cusp_outgoing_logderiv(k, n, t_top)?;
                let top = RobinBc {
                    c: c_top,
                    q: w_in_dot - c_top * w_in,
                };
                let bottom = match geom {
                    AxisymGeometry::Cylinder { .. } => {
                        RobinBc::outgoing(geom.regular_outgoing_logderiv(k, n, t_bottom)?)
                    }
                    AxisymGeometry::Cigar(_) => {
                        RobinBc::outgoing(geom.axis_logderiv(k, n, t_bottom)?)
                    }
                };
                let sol = prob.solve(bottom, top, &[])?;
                let v = sol
                    .w
                    .iter()
                    .zip(&prob.t)
                    .map(|(w, &t)| w / geom.w_factor(t))
                    .collect();
                out.push(ModeField {
                    n,
                    t: prob.t.clone(),
                    v,
                    scale_exp,
                    min_pivot: sol.min_pivot,
                });
            }
        }
        HelmholtzDrive::SourceMode { n, samples } => {
            let prob = ModeProblem::new(geom, k, *n, t_bottom, t_top, problem.grid_points)?;
            let top = RobinBc::outgoing(geom.cusp_outgoing_logderiv(k, *n, t_top)?);
            let bottom = match geom {
                AxisymGeometry::Cylinder { .. } => {
                    RobinBc::outgoing(geom.regular_outgoing_logderiv(k, *n, t_bottom)?)
                }
                AxisymGeometry::Cigar(_) => RobinBc::outgoing(geom.axis_logderiv(k, *n, t_bottom)?),
            };
            let sol = prob.solve(bottom, top, samples)?;
            let v = sol
                .w
                .iter()
                .zip(&prob.t)
                .map(|(w, &t)| w / geom.w_factor(t))
                .collect();
            out.push(ModeField {
                n: *n,
                t: prob.t.clone(),
                v,
                scale_exp: 0.0,
                min_pivot: sol.min_pivot,
            });
        }
    }
    Ok(out)
}
