//! Hermite functions `H_nu(z)` of complex order.
//!
//! Two evaluation paths:
//!
//! - the Kummer decomposition
//!   `H_nu(z) = 2^nu sqrt(pi) [ M(-nu/2, 1/2, z^2) / Gamma((1-nu)/2)
//!                             - 2z M((1-nu)/2, 3/2, z^2) / Gamma(-nu/2) ]`,
//!   exact for moderate `|z|` and `|nu|`;
//! - a Liouville-Green expansion of `w = exp(-z^2/2) H_nu(z)`, which solves
//!   `w'' = (z^2 - c) w` with `c = 2 nu + 1`. The branch is normalised so that
//!   `H_nu(z) ~ (2z)^nu` at infinity and carries the first two correction
//!   terms, so its relative error falls off like `|z^2 - c|^-2` along the ray
//!   from `z` to infinity. It returns a [`ScaledComplex`] because the modulus
//!   grows like `exp(pi |Im nu| / 4)`.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use super::{finite, kummer_1f1, recip_gamma, ScaledComplex, SeriesControl, SpecialFnError};

/// Minimum distance between the turning point `c = 2 nu + 1` and the ray
/// `{ s^2 z^2 : s >= 1 }` for the asymptotic path to be used.
pub const ASYMPTOTIC_MIN_MARGIN: f64 = 1.0e3;

/// Hermite function through the Kummer decomposition.
///
/// For non-negative integer `nu` one reciprocal Gamma factor vanishes and the
/// result is the Hermite polynomial.
pub fn hermite_h(nu: Complex64, z: Complex64, ctl: &SeriesControl) -> Result<Complex64, SpecialFnError> {
    let one = Complex64::new(1.0, 0.0);
    let z2 = z * z;
    let even_weight = recip_gamma((one - nu) * 0.5)?;
    let odd_weight = recip_gamma(-nu * 0.5)?;

    let mut bracket = Complex64::new(0.0, 0.0);
    if even_weight != Complex64::new(0.0, 0.0) {
        bracket += kummer_1f1(-nu * 0.5, Complex64::new(0.5, 0.0), z2, ctl)? * even_weight;
    }
    if odd_weight != Complex64::new(0.0, 0.0) && z != Complex64::new(0.0, 0.0) {
        bracket -= 2.0 * z * kummer_1f1((one - nu) * 0.5, Complex64::new(1.5, 0.0), z2, ctl)? * odd_weight;
    }
    let prefactor = (nu * core::f64::consts::LN_2).exp() * PI.sqrt();
    finite(prefactor * bracket)
}

/// Distance from the turning point to the ray traced by `z^2` on the way to
/// infinity, or `None` when `|arg z| > pi/2` (outside the sector where
/// `H_nu(z) ~ (2z)^nu` is the large-`z` form the expansion is matched to).
pub fn asymptotic_margin(nu: Complex64, z: Complex64) -> Option<f64> {
    if z == Complex64::new(0.0, 0.0) || z.arg().abs() > FRAC_PI_2 {
        return None;
    }
    let c = 2.0 * nu + 1.0;
    let w = z * z;
    let r = ((c * w.conj()).re / w.norm_sqr()).max(1.0);
    Some((c - w * r).norm())
}

// (1 - (1 - u)^{3/2}) / u, with a series near u = 0.
fn three_halves_quotient(u: Complex64, one_minus_u: Complex64, root: Complex64) -> Complex64 {
    if u.norm() > 1e-3 {
        return (1.0 - one_minus_u * root) / u;
    }
    let mut coef = 1.0_f64;
    let mut power = Complex64::new(1.0, 0.0);
    let mut total = Complex64::new(0.0, 0.0);
    for k in 1..14 {
        coef *= (2.5 - k as f64) / k as f64;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        total += power * (sign * coef);
        power *= u;
    }
    total
}

/// Liouville-Green evaluation of `H_nu(z)`, returned in scaled form.
///
/// Accurate when [`asymptotic_margin`] is large; the caller is responsible
/// for checking it (see [`hermite_h_scaled`]).
pub fn hermite_h_asymptotic(nu: Complex64, z: Complex64) -> Result<ScaledComplex, SpecialFnError> {
    let c = 2.0 * nu + 1.0;
    let z2 = z * z;
    let u = c / z2;
    let one_minus_u = 1.0 - u;
    let root = one_minus_u.sqrt();
    let one_plus_root = 1.0 + root;

    let g = three_halves_quotient(u, one_minus_u, root);
    let second = (g / 24.0 - 0.25) / (z2 * one_minus_u * root);
    let third = (3.0 + 2.0 * u) / (16.0 * z2 * z2 * one_minus_u * one_minus_u * one_minus_u);

    let log = nu * z.ln() + (nu + 0.5) * one_plus_root.ln() - 0.5 * core::f64::consts::LN_2
        + c * u / (4.0 * one_plus_root * one_plus_root)
        - 0.25 * one_minus_u.ln()
        + second
        + third;
    let log = finite(log)?;
    Ok(ScaledComplex::from_log(log))
}

/// Hermite function in scaled form, picking the asymptotic path when the
/// turning point is far from the integration ray and the series otherwise.
pub fn hermite_h_scaled(
    nu: Complex64,
    z: Complex64,
    ctl: &SeriesControl,
) -> Result<ScaledComplex, SpecialFnError> {
    match asymptotic_margin(nu, z) {
        Some(margin) if margin >= ASYMPTOTIC_MIN_MARGIN => hermite_h_asymptotic(nu, z),
        _ => hermite_h(nu, z, ctl).map(ScaledComplex::from_complex),
    }
}
