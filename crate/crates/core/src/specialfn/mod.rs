//! Complex special functions behind the closed-form amplitudes.
//!
//! All routines work in double precision. Power series are summed with
//! compensated summation and report [`SpecialFnError::NoConvergence`] or
//! [`SpecialFnError::Cancellation`] instead of returning degraded values.
//! Values whose modulus would overflow are carried as [`ScaledComplex`].

mod gamma;
mod hermite;
mod kummer;
mod scaled;

pub use gamma::{complex_gamma, ln_gamma, recip_gamma, sin_pi};
pub use hermite::{
    asymptotic_margin, hermite_h, hermite_h_asymptotic, hermite_h_scaled, ASYMPTOTIC_MIN_MARGIN,
};
pub use kummer::{kummer_1f1, kummer_1f1_series};
pub use scaled::ScaledComplex;

use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the special-function kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    #[error("pole of the Gamma function at {0}")]
    Pole(Complex64),
    #[error("series did not converge within {terms} terms")]
    NoConvergence { terms: usize },
    #[error("series lost precision to cancellation (largest term {max_term:e}, result {result:e})")]
    Cancellation { max_term: f64, result: f64 },
    #[error("non-finite result")]
    Overflow,
    #[error("invalid series control: {0}")]
    InvalidControl(&'static str),
}

/// Stopping and accuracy controls for hypergeometric series.
///
/// `abs_tol` drives the stopping rule: the summation ends once three
/// consecutive terms satisfy `|term| < abs_tol * (1 + |partial sum|)`.
/// `rel_tol` bounds the rounding error tolerated from cancellation, measured
/// as `eps * max|term| / |sum|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            max_terms: 20_000,
            abs_tol: 1e-17,
            rel_tol: 1e-9,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<(), SpecialFnError> {
        if self.max_terms < 1 {
            return Err(SpecialFnError::InvalidControl("max_terms must be at least 1"));
        }
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(SpecialFnError::InvalidControl("tolerances must be positive"));
        }
        Ok(())
    }
}

pub(crate) fn finite(z: Complex64) -> Result<Complex64, SpecialFnError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(SpecialFnError::Overflow)
    }
}
