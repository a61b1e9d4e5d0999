//! Complex Gamma function via the Lanczos approximation (g = 7), with
//! reflection for the left half-plane and an entire reciprocal variant.

use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_right(z: Complex64) -> Complex64 {
    // valid for Re z > 0.5; z here is the argument of Gamma
    let z = z - Complex64::new(1.0, 0.0);
    let mut x = Complex64::new(LANCZOS_COEF[0], 0.0);
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        x += c / (z + Complex64::new(i as f64, 0.0));
    }
    let t = z + Complex64::new(LANCZOS_G + 0.5, 0.0);
    (2.0 * PI).sqrt() * t.powc(z + Complex64::new(0.5, 0.0)) * (-t).exp() * x
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < 1e-14 && z.re <= 0.5 && (z.re - z.re.round()).abs() < 1e-12 && z.re.round() <= 0.0
}

/// Gamma(z) for complex z; errors on the poles z = 0, -1, -2, ...
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::OutOfDomain(format!("Gamma pole at z = {z}")));
    }
    if z.re >= 0.5 {
        Ok(lanczos_right(z))
    } else {
        // reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z))
        let s = (PI * z).sin();
        Ok(PI / (s * lanczos_right(Complex64::new(1.0, 0.0) - z)))
    }
}

/// 1/Gamma(z); entire, returns 0 at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::default();
    }
    if z.re >= 0.5 {
        1.0 / lanczos_right(z)
    } else {
        (PI * z).sin() * lanczos_right(Complex64::new(1.0, 0.0) - z) / PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn integer_and_half_integer_values() {
        assert_relative_eq!(gamma_complex(Complex64::new(1.0, 0.0)).unwrap().re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(gamma_complex(Complex64::new(5.0, 0.0)).unwrap().re, 24.0, max_relative = 1e-13);
        assert_relative_eq!(
            gamma_complex(Complex64::new(0.5, 0.0)).unwrap().re,
            PI.sqrt(),
            max_relative = 1e-13
        );
    }

    #[test]
    fn modulus_identity_on_imaginary_line() {
        // |Gamma(1 + ik)|^2 = pi k / sinh(pi k)
        let k = 0.7;
        let g = gamma_complex(Complex64::new(1.0, k)).unwrap();
        let expect = PI * k / (PI * k).sinh();
        assert_relative_eq!(g.norm_sqr(), expect, max_relative = 1e-13);
    }

    #[test]
    fn reflection_consistency() {
        let z = Complex64::new(-1.3, 0.6);
        let g = gamma_complex(z).unwrap();
        // Gamma(z+1) = z Gamma(z)
        let g1 = gamma_complex(z + Complex64::new(1.0, 0.0)).unwrap();
        let diff = (g1 - z * g).norm() / g1.norm();
        assert!(diff < 1e-12, "recurrence defect {diff}");
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        assert_eq!(rgamma(Complex64::new(0.0, 0.0)), Complex64::default());
        assert_eq!(rgamma(Complex64::new(-3.0, 0.0)), Complex64::default());
    }
}
