//! Scaled complex values: mantissa * exp(log_scale). Keeps the exponentially
//! growing I and decaying K representable across the whole working range.

use num_complex::Complex64;

/// A complex value stored as `mantissa * exp(log_scale)`, with the mantissa
/// renormalized into [1/2, 2) whenever the value is nonzero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledBessel {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ScaledBessel {
    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        ScaledBessel {
            mantissa,
            log_scale,
        }
        .renormalized()
    }

    pub fn zero() -> Self {
        ScaledBessel {
            mantissa: Complex64::default(),
            log_scale: 0.0,
        }
    }

    pub fn from_complex(v: Complex64) -> Self {
        Self::new(v, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::default()
    }

    fn renormalized(mut self) -> Self {
        let m = self.mantissa.norm();
        if m == 0.0 || !m.is_finite() {
            self.log_scale = 0.0;
            return self;
        }
        let shift = m.ln().div_euclid(std::f64::consts::LN_2).floor();
        if shift != 0.0 {
            let f = (-shift * std::f64::consts::LN_2).exp();
            self.mantissa *= f;
            self.log_scale += shift * std::f64::consts::LN_2;
        }
        self
    }

    /// Descaled value; may overflow to infinity for extreme scales.
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    /// ln |value|; -inf for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.log_scale + self.mantissa.norm().ln()
        }
    }

    pub fn mul(&self, other: &ScaledBessel) -> ScaledBessel {
        ScaledBessel::new(self.mantissa * other.mantissa, self.log_scale + other.log_scale)
    }

    pub fn div(&self, other: &ScaledBessel) -> ScaledBessel {
        ScaledBessel::new(self.mantissa / other.mantissa, self.log_scale - other.log_scale)
    }

    pub fn scale_by(&self, c: Complex64) -> ScaledBessel {
        ScaledBessel::new(self.mantissa * c, self.log_scale)
    }

    pub fn neg(&self) -> ScaledBessel {
        ScaledBessel {
            mantissa: -self.mantissa,
            log_scale: self.log_scale,
        }
    }

    pub fn add(&self, other: &ScaledBessel) -> ScaledBessel {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.log_scale >= other.log_scale {
            (self, other)
        } else {
            (other, self)
        };
        let d = small.log_scale - big.log_scale;
        if d < -745.0 {
            return *big;
        }
        ScaledBessel::new(big.mantissa + small.mantissa * d.exp(), big.log_scale)
    }

    /// Ratio of the two descaled values, safe against scale overflow.
    pub fn ratio(&self, other: &ScaledBessel) -> Complex64 {
        let r = self.div(other);
        r.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renormalization_keeps_mantissa_in_range() {
        let v = ScaledBessel::new(Complex64::new(3.2e9, -1.1e9), 12.0);
        let m = v.mantissa.norm();
        assert!((0.5..2.0).contains(&m), "mantissa {m}");
        let back = v.value();
        assert!((back.re / (3.2e9 * 12f64.exp()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn add_across_scales() {
        let a = ScaledBessel::new(Complex64::new(1.0, 0.0), 100.0);
        let b = ScaledBessel::new(Complex64::new(1.0, 0.0), 0.0);
        let s = a.add(&b);
        assert!((s.ln_abs() - 100.0).abs() < 1e-12);
        let tiny = ScaledBessel::new(Complex64::new(1.0, 0.0), -900.0);
        let s2 = a.add(&tiny);
        assert_eq!(s2.mantissa, a.mantissa);
    }
}
