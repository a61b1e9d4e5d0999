//! Special functions: modified Bessel functions of (mostly imaginary) order
//! with overflow-safe scaling, and the complex Gamma function.

mod bessel;
mod gamma;
mod scaled;

pub use bessel::{
    bessel_i, bessel_i_asymptotic, bessel_i_deriv, bessel_i_series, bessel_k, bessel_k_asymptotic,
    bessel_k_deriv, bessel_k_integral, bessel_k_reflection, log_deriv_i, log_deriv_k,
    series_asymptotic_switch, MAX_ORDER,
};
pub use gamma::{gamma_complex, rgamma};
pub use scaled::ScaledBessel;
