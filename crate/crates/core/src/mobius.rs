//! SL(2,R) / Möbius-transformation algebra on the upper half-plane:
//! composition, action, trace classification, fixed points, elliptic order,
//! hyperbolic distance.

use crate::{Error, Result};

const DET_TOL: f64 = 1e-12;
const PARABOLIC_TOL: f64 = 1e-10;

/// Real 2x2 unit-determinant matrix acting on the upper half-plane. The pair
/// (a,b,c,d) and its negative act identically; construction canonicalizes the
/// sign so the first nonzero entry is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusTransform {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// A point x + iy of the open upper half-plane, y > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointH {
    pub x: f64,
    pub y: f64,
}

/// A fixed point on the boundary R ∪ {∞}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryPoint {
    Finite(f64),
    Infinity,
}

/// Fixed-point set of a non-identity transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedPoints {
    Interior(PointH),
    Boundary(BoundaryPoint),
    BoundaryPair(BoundaryPoint, BoundaryPoint),
}

/// Trace classification; elliptic stores the rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransformClass {
    Identity,
    Elliptic { angle: f64 },
    Parabolic,
    Hyperbolic,
}

/// Result of a finite-order test for elliptic elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EllipticOrder {
    Finite(u64),
    Irrational,
}

impl PointH {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) {
            return Err(Error::OutOfDomain(format!(
                "PointH requires y > 0, got y = {y}"
            )));
        }
        Ok(PointH { x, y })
    }
}

impl MoebiusTransform {
    /// Normalizes the determinant to 1 (rejecting matrices with det <= 0 or
    /// further than 1e-12 from unimodular after scaling) and canonicalizes
    /// the overall sign.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if det <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "determinant must be positive, got {det}"
            )));
        }
        let s = det.sqrt();
        let (a, b, c, d) = (a / s, b / s, c / s, d / s);
        let det = a * d - b * c;
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::Numerical(format!(
                "could not normalize determinant, residual {}",
                det - 1.0
            )));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    fn canonical(a: f64, b: f64, c: f64, d: f64) -> Self {
        let scale = a.abs().max(b.abs()).max(c.abs()).max(d.abs());
        let first = [a, b, c, d].into_iter().find(|v| v.abs() > 1e-12 * scale);
        let flip = matches!(first, Some(v) if v < 0.0);
        if flip {
            MoebiusTransform {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            MoebiusTransform { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        MoebiusTransform {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// z -> z + tau
    pub fn translation(tau: f64) -> Self {
        Self::canonical(1.0, tau, 0.0, 1.0)
    }

    /// z -> lambda z, lambda > 0
    pub fn dilation(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidArgument("dilation needs lambda > 0".into()));
        }
        Self::new(lambda.sqrt(), 0.0, 0.0, 1.0 / lambda.sqrt())
    }

    /// Rotation by angle 2*phi about the point i.
    pub fn rotation(phi: f64) -> Self {
        Self::canonical(phi.cos(), phi.sin(), -phi.sin(), phi.cos())
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn is_identity(&self) -> bool {
        (self.a - 1.0).abs() < 1e-12
            && self.b.abs() < 1e-12
            && self.c.abs() < 1e-12
            && (self.d - 1.0).abs() < 1e-12
    }

    /// Matrix product, renormalized.
    pub fn compose(&self, other: &MoebiusTransform) -> MoebiusTransform {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // product of unit-determinant matrices: renormalize for drift only
        let det = a * d - b * c;
        let s = det.sqrt();
        Self::canonical(a / s, b / s, c / s, d / s)
    }

    pub fn inverse(&self) -> MoebiusTransform {
        Self::canonical(self.d, -self.b, -self.c, self.a)
    }

    /// gamma . z = (az + b)/(cz + d); interior points map to interior points.
    pub fn apply(&self, z: PointH) -> PointH {
        let (x, y) = (z.x, z.y);
        let den_re = self.c * x + self.d;
        let den_im = self.c * y;
        let den2 = den_re * den_re + den_im * den_im;
        let num_re = self.a * x + self.b;
        let num_im = self.a * y;
        PointH {
            x: (num_re * den_re + num_im * den_im) / den2,
            y: (num_im * den_re - num_re * den_im) / den2,
        }
    }

    /// Trace classification per |tr| against 2, with the parabolic window
    /// |tr|-2 within 1e-10.
    pub fn classify(&self) -> TransformClass {
        if self.is_identity() {
            return TransformClass::Identity;
        }
        let t = self.trace().abs();
        if (t - 2.0).abs() <= PARABOLIC_TOL {
            TransformClass::Parabolic
        } else if t < 2.0 {
            // conjugate to a rotation by 2*phi with cos(phi) = |tr|/2
            let phi = (self.trace() / 2.0).acos();
            TransformClass::Elliptic { angle: 2.0 * phi }
        } else {
            TransformClass::Hyperbolic
        }
    }

    /// Fixed set in H ∪ ∂H. Elliptic: the interior root of
    /// c z^2 + (d-a) z - b = 0; parabolic: one boundary point; hyperbolic: two.
    pub fn fixed_points(&self) -> Result<FixedPoints> {
        if self.is_identity() {
            return Err(Error::InvalidArgument(
                "identity fixes every point".into(),
            ));
        }
        let class = self.classify();
        if self.c.abs() < 1e-14 {
            // infinity is fixed; other root of (d-a) z = b
            return Ok(match class {
                TransformClass::Parabolic => FixedPoints::Boundary(BoundaryPoint::Infinity),
                _ => {
                    let other = self.b / (self.d - self.a);
                    FixedPoints::BoundaryPair(
                        BoundaryPoint::Finite(-other),
                        BoundaryPoint::Infinity,
                    )
                }
            });
        }
        let half_b = (self.d - self.a) / (2.0 * self.c);
        let disc = self.trace() * self.trace() - 4.0;
        match class {
            TransformClass::Elliptic { .. } => {
                let im = (-disc).sqrt() / (2.0 * self.c.abs());
                Ok(FixedPoints::Interior(PointH {
                    x: -half_b,
                    y: im,
                }))
            }
            TransformClass::Parabolic => Ok(FixedPoints::Boundary(BoundaryPoint::Finite(-half_b))),
            TransformClass::Hyperbolic => {
                let r = disc.sqrt() / (2.0 * self.c.abs());
                Ok(FixedPoints::BoundaryPair(
                    BoundaryPoint::Finite(-half_b - r),
                    BoundaryPoint::Finite(-half_b + r),
                ))
            }
            TransformClass::Identity => unreachable!(),
        }
    }

    /// Smallest n <= max_order such that the rotation angle is 2 pi m / n with
    /// gcd(m, n) = 1, detected through continued fractions of angle/2pi with
    /// tolerance 1e-9 on the reconstructed angle.
    pub fn elliptic_order(&self, max_order: u64) -> Result<EllipticOrder> {
        let angle = match self.classify() {
            TransformClass::Elliptic { angle } => angle,
            other => {
                return Err(Error::InvalidArgument(format!(
                    "elliptic_order needs an elliptic transform, got {other:?}"
                )))
            }
        };
        let frac = angle / (2.0 * std::f64::consts::PI);
        // continued-fraction convergents of frac
        let mut x = frac;
        let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, x.floor() as i64, 1i64);
        for _ in 0..64 {
            let den = q1 as f64;
            let approx = p1 as f64 / den;
            if q1 > 0
                && q1 as u64 <= max_order
                && (approx * 2.0 * std::f64::consts::PI - angle).abs() < 1e-9
            {
                return Ok(EllipticOrder::Finite(q1 as u64));
            }
            let r = x - x.floor();
            if r < 1e-15 {
                break;
            }
            x = 1.0 / r;
            let a = x.floor() as i64;
            let p2 = a * p1 + p0;
            let q2 = a * q1 + q0;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
            if q1 as u64 > max_order * 4 {
                break;
            }
        }
        Ok(EllipticOrder::Irrational)
    }
}

/// Hyperbolic distance: cosh d = 1 + |z-w|^2 / (2 Im z Im w).
pub fn hyperbolic_distance(z: PointH, w: PointH) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let q = (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    (1.0 + q).acosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_transform(rng: &mut impl Rng) -> MoebiusTransform {
        loop {
            let a = rng.gen_range(-2.0..2.0);
            let b = rng.gen_range(-2.0..2.0);
            let c = rng.gen_range(-2.0..2.0);
            let d = rng.gen_range(-2.0..2.0);
            if a * d - b * c > 0.1 {
                return MoebiusTransform::new(a, b, c, d).unwrap();
            }
        }
    }

    fn random_point(rng: &mut impl Rng) -> PointH {
        PointH::new(rng.gen_range(-3.0..3.0), rng.gen_range(0.1..4.0)).unwrap()
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let g = MoebiusTransform::new(1.0, 2.0, 0.5, 2.0).unwrap();
        assert_eq!(g.compose(&MoebiusTransform::identity()), g);
        assert!(g.compose(&g.inverse()).is_identity());
    }

    #[test]
    fn translations_form_a_subgroup() {
        let t = MoebiusTransform::translation(0.7);
        let s = MoebiusTransform::translation(1.6);
        let ts = t.compose(&s);
        assert_relative_eq!(ts.b, 2.3, epsilon = 1e-14);
        assert_relative_eq!(ts.a, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn action_examples() {
        let z = PointH::new(0.0, 1.0).unwrap();
        let t = MoebiusTransform::translation(2.5).apply(z);
        assert_relative_eq!(t.x, 2.5, epsilon = 1e-14);
        assert_relative_eq!(t.y, 1.0, epsilon = 1e-14);
        let d = MoebiusTransform::dilation(2.0).unwrap().apply(z);
        assert_relative_eq!(d.x, 0.0, epsilon = 1e-14);
        assert_relative_eq!(d.y, 2.0, epsilon = 1e-14);
        let same = MoebiusTransform::identity().apply(PointH::new(1.2, 0.4).unwrap());
        assert_relative_eq!(same.x, 1.2);
        assert_relative_eq!(same.y, 0.4);
    }

    #[test]
    fn classification_table() {
        let p = MoebiusTransform::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(p.classify(), TransformClass::Parabolic);
        let e = MoebiusTransform::rotation(PI / 3.0);
        match e.classify() {
            TransformClass::Elliptic { angle } => {
                assert_relative_eq!(angle, 2.0 * PI / 3.0, epsilon = 1e-12)
            }
            other => panic!("expected elliptic, got {other:?}"),
        }
        let h = MoebiusTransform::new(2.0, 0.0, 0.0, 0.5).unwrap();
        assert_eq!(h.classify(), TransformClass::Hyperbolic);
    }

    #[test]
    fn fixed_points_examples() {
        let t = MoebiusTransform::translation(1.0);
        assert_eq!(
            t.fixed_points().unwrap(),
            FixedPoints::Boundary(BoundaryPoint::Infinity)
        );
        let d = MoebiusTransform::dilation(3.0).unwrap();
        match d.fixed_points().unwrap() {
            FixedPoints::BoundaryPair(BoundaryPoint::Finite(x), BoundaryPoint::Infinity) => {
                assert_relative_eq!(x, 0.0, epsilon = 1e-14)
            }
            other => panic!("unexpected {other:?}"),
        }
        // rotation about i fixes i
        let r = MoebiusTransform::rotation(PI / 2.0);
        match r.fixed_points().unwrap() {
            FixedPoints::Interior(p) => {
                assert_relative_eq!(p.x, 0.0, epsilon = 1e-12);
                assert_relative_eq!(p.y, 1.0, epsilon = 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn elliptic_orders() {
        let g3 = MoebiusTransform::rotation(PI / 3.0); // angle 2pi/3
        assert_eq!(g3.elliptic_order(50).unwrap(), EllipticOrder::Finite(3));
        let g7 = MoebiusTransform::rotation(PI / 7.0);
        assert_eq!(g7.elliptic_order(50).unwrap(), EllipticOrder::Finite(7));
        let irr = MoebiusTransform::rotation(0.5); // angle 1 rad
        assert_eq!(irr.elliptic_order(50).unwrap(), EllipticOrder::Irrational);
    }

    #[test]
    fn elliptic_iteration_closes() {
        let n = 5u32;
        let g = MoebiusTransform::rotation(PI / n as f64);
        let mut acc = MoebiusTransform::identity();
        for _ in 0..n {
            acc = acc.compose(&g);
        }
        // g^n = ±I; canonical sign makes it the identity
        assert!(acc.is_identity(), "got {acc:?}");
    }

    #[test]
    fn distance_examples() {
        let z = PointH::new(0.4, 1.3).unwrap();
        assert_relative_eq!(hyperbolic_distance(z, z), 0.0, epsilon = 1e-12);
        let a = PointH::new(0.0, 1.0).unwrap();
        let b = PointH::new(0.0, std::f64::consts::E).unwrap();
        assert_relative_eq!(hyperbolic_distance(a, b), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn group_laws_and_isometry_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let g = random_transform(&mut rng);
            let h = random_transform(&mut rng);
            let f = random_transform(&mut rng);
            // associativity on matrix entries, up to the ±I ambiguity when an
            // entry sits at rounding level
            let lhs = g.compose(&h).compose(&f);
            let rhs = g.compose(&h.compose(&f));
            let dist = |s: f64| -> f64 {
                (lhs.a - s * rhs.a)
                    .abs()
                    .max((lhs.b - s * rhs.b).abs())
                    .max((lhs.c - s * rhs.c).abs())
                    .max((lhs.d - s * rhs.d).abs())
            };
            let mag = lhs.a.abs().max(lhs.b.abs()).max(lhs.c.abs()).max(lhs.d.abs());
            assert!(dist(1.0).min(dist(-1.0)) < 1e-12 * (1.0 + mag));
            // isometry
            let z = random_point(&mut rng);
            let w = random_point(&mut rng);
            let d0 = hyperbolic_distance(z, w);
            let d1 = hyperbolic_distance(g.apply(z), g.apply(w));
            assert!((d0 - d1).abs() < 1e-11, "isometry defect {}", (d0 - d1).abs());
            // classification is conjugation invariant
            let conj = h.compose(&g).compose(&h.inverse());
            let c0 = std::mem::discriminant(&g.classify());
            let c1 = std::mem::discriminant(&conj.classify());
            assert_eq!(c0, c1);
            // positivity of the image
            assert!(g.apply(z).y > 0.0);
        }
    }
}
