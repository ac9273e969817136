use num_complex::Complex64;

use super::{DynamicsError, ModelParams};

/// Photon-number dependent detuning `Delta(n) = Delta + nu (n f^2(n) - (n+1) f^2(n+1) + 1)`.
///
/// The bare detuning `Delta` is `delta_k_bar`, the detuning of an atom at
/// rest in the central momentum class.
pub fn detuning_n(params: &ModelParams, n: usize) -> f64 {
    let s = &params.spec;
    params.delta_k_bar + params.nu * (s.energy(n) - s.energy(n + 1) + 1.0)
}

/// Doppler-shifted detuning `Delta_k(n, p) = Delta(n) + recoil_rate p` at `t = 0`.
pub fn block_detuning(params: &ModelParams, n: usize, p: f64) -> f64 {
    detuning_n(params, n) + params.recoil_rate * p
}

/// Time-averaged detuning `Delta(n, p, t) = Delta_k + kg t / 2`.
///
/// The accumulated phase of the coupling term is `Delta(n, p, t) t`, whose
/// derivative `Delta_k + kg t` is the instantaneous detuning.
pub fn time_detuning(params: &ModelParams, n: usize, p: f64, t: f64) -> f64 {
    block_detuning(params, n, p) + 0.5 * params.kg * t
}

/// Coupling of the `|e,n> <-> |g,n+1>` block: `lambda sqrt(n+1) f(n+1)`.
pub fn block_coupling(params: &ModelParams, n: usize) -> f64 {
    params.lambda_c * params.spec.energy(n + 1).sqrt()
}

/// `Omega^2(p, n, g) = lambda^2 (n+1) f^2(n+1) + Delta_k^2 + i kg`; the
/// gravity term is dropped when `with_gravity` is false.
pub fn rabi_frequency_sq(params: &ModelParams, n: usize, p: f64, with_gravity: bool) -> Complex64 {
    let g = block_coupling(params, n);
    let d = block_detuning(params, n, p);
    let kg = if with_gravity { params.kg } else { 0.0 };
    Complex64::new(g * g + d * d, kg)
}

/// Parameters of the closed-form solution of one `(n, p)` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    /// `a^2 = (Omega^2(p,n,g) - Delta_k^2) / kg - i`, which reduces exactly to
    /// `G^2 / kg`. It is evaluated in the reduced form because the printed
    /// difference cancels `Delta_k^2 ~ 10^15` against itself.
    pub a2: Complex64,
    pub coupling: f64,
    pub detuning: f64,
    pub kg: f64,
}

impl RabiParams {
    /// `b(t) = e^{i pi/4} (kg t + Delta_k) / (2 sqrt(kg / 2))`.
    pub fn b(&self, t: f64) -> Complex64 {
        let scale = (self.detuning + self.kg * t) / (2.0 * (0.5 * self.kg).sqrt());
        Complex64::from_polar(scale, core::f64::consts::FRAC_PI_4)
    }

    /// `db/dt`, a constant.
    pub fn b_rate(&self) -> Complex64 {
        Complex64::from_polar((0.5 * self.kg).sqrt(), core::f64::consts::FRAC_PI_4)
    }

    /// Order of the Hermite functions solving the block equations in the
    /// variable `b`: `-i a^2`.
    pub fn hermite_order(&self) -> Complex64 {
        Complex64::new(0.0, -1.0) * self.a2
    }
}

pub fn rabi_params(params: &ModelParams, n: usize, p: f64) -> Result<RabiParams, DynamicsError> {
    if params.kg <= 0.0 {
        return Err(DynamicsError::DegenerateBranch);
    }
    let g = block_coupling(params, n);
    Ok(RabiParams {
        a2: Complex64::new(g * g / params.kg, 0.0),
        coupling: g,
        detuning: block_detuning(params, n, p),
        kg: params.kg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::DeformationSpec;
    use crate::dynamics::test_params;

    #[test]
    fn undeformed_detuning_is_flat() {
        let mut params = test_params(0.0);
        params.spec = DeformationSpec::Identity;
        for n in 0..30 {
            assert_eq!(detuning_n(&params, n), params.delta_k_bar);
        }
    }

    #[test]
    fn deformed_detuning() {
        let params = test_params(0.0);
        assert!((detuning_n(&params, 0) - params.delta_k_bar).abs() < 1e-7);
        // 28751360.0 from a 40-digit evaluation of the defining formula.
        assert!((detuning_n(&params, 3) - 28_751_360.0).abs() < 1e-6);
    }

    #[test]
    fn detuning_in_time() {
        let params = test_params(2e7);
        assert_eq!(time_detuning(&params, 0, 0.0, 0.0), params.delta_k_bar);
        let shift = time_detuning(&params, 0, 0.0, 1e-5) - params.delta_k_bar;
        assert!((shift - 100.0).abs() < 1e-7);
        let flat = test_params(0.0);
        assert_eq!(
            time_detuning(&flat, 4, 0.3, 0.0),
            time_detuning(&flat, 4, 0.3, 2e-4)
        );
    }

    #[test]
    fn rabi_quantities() {
        let params = test_params(2e7);
        let diff = rabi_frequency_sq(&params, 2, 0.4, true) - rabi_frequency_sq(&params, 2, 0.4, false);
        assert_eq!(diff, Complex64::new(0.0, 2e7));

        let mut plain = params.clone();
        plain.spec = DeformationSpec::Identity;
        let o = rabi_frequency_sq(&plain, 3, 0.0, false);
        let d = plain.delta_k_bar;
        assert!((o.re - (1e10 * 4.0 + d * d)).abs() < 1.0);

        let r = rabi_params(&params, 2, 0.0).unwrap();
        // 1560.8 from a 40-digit evaluation.
        assert!((r.a2.re - 1560.8).abs() < 1e-9);
        assert_eq!(r.a2.im, 0.0);
        // Printed form, evaluated naively, agrees to the expected cancellation loss.
        let om2 = rabi_frequency_sq(&params, 2, 0.0, true);
        let naive = (om2 - r.detuning * r.detuning) / params.kg - Complex64::new(0.0, 1.0);
        assert!((naive - r.a2).norm() < 1e-3);

        assert!(matches!(
            rabi_params(&test_params(0.0), 1, 0.0),
            Err(DynamicsError::DegenerateBranch)
        ));
    }

    #[test]
    fn b_variable() {
        let r = rabi_params(&test_params(8e7), 1, 0.0).unwrap();
        let t = 3e-5;
        let h = 1e-9;
        let rate = (r.b(t + h) - r.b(t - h)) / (2.0 * h);
        assert!((rate - r.b_rate()).norm() < 1e-6 * r.b_rate().norm());
        assert!((r.b(0.0).arg() - core::f64::consts::FRAC_PI_4).abs() < 1e-15);
    }
}
