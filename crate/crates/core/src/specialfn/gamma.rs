use core::f64::consts::PI;

use num_complex::Complex64;

use super::{finite, SpecialFnError};

// Lanczos approximation, g = 607/128 with 15 terms (Godfrey's coefficients).
const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

const POLE_TOL: f64 = 1e-12;
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_741_78;

fn near_pole(z: Complex64) -> bool {
    if z.re > 0.5 || z.im.abs() > POLE_TOL {
        return false;
    }
    (z.re - z.re.round()).abs() <= POLE_TOL
}

/// `sin(pi x)` with exact zeros at the integers.
fn sinpi_real(x: f64) -> f64 {
    let r = x - 2.0 * (x * 0.5).round();
    if r == 0.0 || r.abs() == 1.0 {
        0.0
    } else {
        (PI * r).sin()
    }
}

/// `cos(pi x)` with exact zeros at the half-integers.
fn cospi_real(x: f64) -> f64 {
    let r = x - 2.0 * (x * 0.5).round();
    if r.abs() == 0.5 {
        0.0
    } else {
        (PI * r).cos()
    }
}

/// `sin(pi z)` for complex `z`, exact zero at integer `z`.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let (s, c) = (sinpi_real(z.re), cospi_real(z.re));
    let y = PI * z.im;
    Complex64::new(s * y.cosh(), c * y.sinh())
}

// ln Gamma for Re z >= 0.5 via Lanczos.
fn ln_gamma_right(z: Complex64) -> Complex64 {
    let zm = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    (zm + 0.5) * t.ln() - t + HALF_LN_2PI + series.ln()
}

/// Logarithm of the Gamma function.
///
/// For `Re z < 0.5` the reflection formula is used; the imaginary part is
/// then a valid logarithm but not necessarily the principal branch of
/// `log Gamma`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    if near_pole(z) {
        return Err(SpecialFnError::Pole(z));
    }
    let value = if z.re >= 0.5 {
        ln_gamma_right(z)
    } else {
        Complex64::new(PI.ln(), 0.0) - sin_pi(z).ln() - ln_gamma_right(1.0 - z)
    };
    finite(value)
}

/// Complex Gamma function, reflection formula for `Re z < 0.5`.
pub fn complex_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    if near_pole(z) {
        return Err(SpecialFnError::Pole(z));
    }
    let value = if z.re >= 0.5 {
        ln_gamma_right(z).exp()
    } else {
        PI / (sin_pi(z) * ln_gamma_right(1.0 - z).exp())
    };
    finite(value)
}

/// `1 / Gamma(z)`, an entire function: exactly zero at the poles of Gamma.
pub fn recip_gamma(z: Complex64) -> Result<Complex64, SpecialFnError> {
    let value = if z.re >= 0.5 {
        (-ln_gamma_right(z)).exp()
    } else {
        sin_pi(z) * ln_gamma_right(1.0 - z).exp() / PI
    };
    finite(value)
}
