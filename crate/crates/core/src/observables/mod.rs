//! Atomic and field observables computed from an amplitude trajectory.
//!
//! Every observable is an average over the momentum quadrature: the atom
//! starts in a Gaussian momentum packet and each node evolves independently,
//! so expectation values are weighted sums of per-node expectations.
//!
//! Amplitudes are stored in the interaction picture. Quantities that only
//! involve populations are picture independent. Field moments mix photon
//! numbers, so the free phases `e^{-i nu m f^2(m) t}` are restored before
//! they are formed.

pub mod dense;

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::AmplitudeTrajectory;

/// Mean photon number below which `G2` is undefined.
pub const DEGENERATE_FIELD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObservableError {
    #[error("mean photon number vanishes at t = {t:e} s; G2 is undefined")]
    DegenerateField { t: f64 },
    #[error("time index {index} out of range for a trajectory of {len} samples")]
    TimeIndex { index: usize, len: usize },
}

/// A real observable sampled on the trajectory's time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    pub name: String,
    /// Times in seconds.
    pub t: Vec<f64>,
    /// `lambda_c t`.
    pub scaled_t: Vec<f64>,
    pub value: Vec<f64>,
}

impl ObservableSeries {
    pub fn new(name: &str, traj: &AmplitudeTrajectory, value: Vec<f64>) -> Self {
        assert_eq!(value.len(), traj.len(), "one value per time sample");
        let lambda = traj.params().lambda_c;
        Self {
            name: String::from(name),
            t: traj.times().to_vec(),
            scaled_t: traj.times().iter().map(|t| lambda * t).collect(),
            value,
        }
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    /// Plain sample mean, which is the time average on a uniform grid.
    pub fn mean(&self) -> f64 {
        self.value.iter().sum::<f64>() / self.value.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.value.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.value.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn series(traj: &AmplitudeTrajectory, name: &str, f: impl FnMut(usize) -> f64) -> ObservableSeries {
    ObservableSeries::new(name, traj, (0..traj.len()).map(f).collect())
}

/// `W(t) = sum_p w_p sum_n (|psi1_n|^2 - |psi2_n|^2)`, including `|g, 0>`.
pub fn population_inversion(traj: &AmplitudeTrajectory) -> ObservableSeries {
    let n_max = traj.n_max();
    series(traj, "W", |k| {
        let mut total = 0.0;
        for (j, &w) in traj.grid().weight.iter().enumerate() {
            let excited: f64 = (0..=n_max).map(|n| traj.psi1(n, j, k).norm_sqr()).sum();
            let ground: f64 = (0..=n_max + 1).map(|m| traj.psi2(m, j, k).norm_sqr()).sum();
            total += w * (excited - ground);
        }
        total
    })
}

/// `C(t) = sum_p w_p sum_n psi1_n conj(psi2_n) e^{-i omega t}`, the
/// expectation of the lowering operator. `<sigma_x> = Re C`, `<sigma_y> = Im C`.
fn dipole(traj: &AmplitudeTrajectory, omega: f64, k: usize) -> Complex64 {
    let mut c = Complex64::new(0.0, 0.0);
    for (j, &w) in traj.grid().weight.iter().enumerate() {
        let mut s = Complex64::new(0.0, 0.0);
        for n in 0..=traj.n_max() {
            s += traj.psi1(n, j, k) * traj.psi2(n, j, k).conj();
        }
        c += s * w;
    }
    c * Complex64::from_polar(1.0, -omega * traj.times()[k])
}

/// `(<sigma_x>, <sigma_y>)` for the half-Pauli dipole quadratures.
pub fn dipole_expectations(traj: &AmplitudeTrajectory, omega: f64) -> (ObservableSeries, ObservableSeries) {
    let c: Vec<Complex64> = (0..traj.len()).map(|k| dipole(traj, omega, k)).collect();
    (
        ObservableSeries::new("sigma_x", traj, c.iter().map(|z| z.re).collect()),
        ObservableSeries::new("sigma_y", traj, c.iter().map(|z| z.im).collect()),
    )
}

/// `F_i = 1 - 4 <sigma_i>^2 - |W|`; the dipole is squeezed when `F_i < 0`.
pub fn dipole_squeezing(traj: &AmplitudeTrajectory, omega: f64) -> (ObservableSeries, ObservableSeries) {
    let (sx, sy) = dipole_expectations(traj, omega);
    let w = population_inversion(traj);
    let f = |s: &ObservableSeries, name| {
        let v = s
            .value
            .iter()
            .zip(&w.value)
            .map(|(s, w)| 1.0 - 4.0 * s * s - w.abs())
            .collect();
        ObservableSeries::new(name, traj, v)
    };
    (f(&sx, "F_x"), f(&sy, "F_y"))
}

/// Momentum spread `sqrt(<p^2> - <p>^2)` in recoil units.
pub fn momentum_diffusion(traj: &AmplitudeTrajectory) -> ObservableSeries {
    let n_max = traj.n_max();
    series(traj, "delta_p", |k| {
        let (mut m1, mut m2) = (0.0, 0.0);
        for (j, (&p, &w)) in traj.grid().p.iter().zip(&traj.grid().weight).enumerate() {
            let pop: f64 = (0..=n_max).map(|n| traj.psi1(n, j, k).norm_sqr()).sum::<f64>()
                + (0..=n_max + 1)
                    .map(|m| traj.psi2(m, j, k).norm_sqr())
                    .sum::<f64>();
            m1 += w * p * pop;
            m2 += w * p * p * pop;
        }
        (m2 - m1 * m1).max(0.0).sqrt()
    })
}

fn distribution(traj: &AmplitudeTrajectory, k: usize) -> Vec<f64> {
    let n_max = traj.n_max();
    let mut pn = alloc::vec![0.0; n_max + 2];
    for (j, &w) in traj.grid().weight.iter().enumerate() {
        for (n, slot) in pn.iter_mut().take(n_max + 1).enumerate() {
            *slot += w * traj.psi1(n, j, k).norm_sqr();
        }
        for (m, slot) in pn.iter_mut().enumerate() {
            *slot += w * traj.psi2(m, j, k).norm_sqr();
        }
    }
    pn
}

/// `p(n, t_k)` for `n = 0..=n_max + 1`.
pub fn photon_distribution(traj: &AmplitudeTrajectory, t_index: usize) -> Result<Vec<f64>, ObservableError> {
    if t_index >= traj.len() {
        return Err(ObservableError::TimeIndex {
            index: t_index,
            len: traj.len(),
        });
    }
    Ok(distribution(traj, t_index))
}

/// `G2 = (<n^2> - <n>) / <n>^2`.
pub fn g2(traj: &AmplitudeTrajectory) -> Result<ObservableSeries, ObservableError> {
    let mut value = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let pn = distribution(traj, k);
        let mean: f64 = pn.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let second: f64 = pn.iter().enumerate().map(|(n, p)| (n * n) as f64 * p).sum();
        if mean < DEGENERATE_FIELD_TOL {
            return Err(ObservableError::DegenerateField { t: traj.times()[k] });
        }
        value.push((second - mean) / (mean * mean));
    }
    Ok(ObservableSeries::new("G2", traj, value))
}

/// `xi = <A^dag A>`, `eta = <A> e^{i nu t}` and `zeta = <A^2> e^{2 i nu t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldMoments {
    pub xi: ObservableSeries,
    pub eta: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
}

/// Expectation of `A^k` (k = 1, 2) in the Schrödinger picture, times `e^{i k nu t}`.
fn ladder_moment(traj: &AmplitudeTrajectory, nu: f64, k: usize, shift: usize) -> Complex64 {
    let spec = &traj.params().spec;
    let t = traj.times()[k];
    let n_max = traj.n_max();
    let mut total = Complex64::new(0.0, 0.0);
    // One branch at a time: excited photons 0..=n_max, ground photons 0..=n_max+1.
    let branch = |amp: &dyn Fn(usize, usize) -> Complex64, top: usize, j: usize| {
        let mut s = Complex64::new(0.0, 0.0);
        for m in 0..(top + 1).saturating_sub(shift) {
            let mut elem = 1.0;
            for l in 1..=shift {
                elem *= spec.energy(m + l).sqrt();
            }
            let phase = nu * (spec.energy(m + shift) - spec.energy(m) - shift as f64) * t;
            s += amp(m, j).conj() * amp(m + shift, j) * elem * Complex64::from_polar(1.0, -phase);
        }
        s
    };
    for (j, &w) in traj.grid().weight.iter().enumerate() {
        let e = branch(&|n, j| traj.psi1(n, j, k), n_max, j);
        let g = branch(&|m, j| traj.psi2(m, j, k), n_max + 1, j);
        total += (e + g) * w;
    }
    total
}

pub fn field_moments(traj: &AmplitudeTrajectory, nu: f64) -> FieldMoments {
    let spec = traj.params().spec;
    let xi = series(traj, "xi", |k| {
        distribution(traj, k)
            .iter()
            .enumerate()
            .map(|(m, p)| spec.energy(m) * p)
            .sum()
    });
    FieldMoments {
        xi,
        eta: (0..traj.len()).map(|k| ladder_moment(traj, nu, k, 1)).collect(),
        zeta: (0..traj.len()).map(|k| ladder_moment(traj, nu, k, 2)).collect(),
    }
}

/// `<[A, A^dag]> = sum_n p(n) ((n+1) f^2(n+1) - n f^2(n))`.
pub fn commutator_expectation(traj: &AmplitudeTrajectory) -> ObservableSeries {
    let spec = traj.params().spec;
    series(traj, "commutator", |k| {
        distribution(traj, k)
            .iter()
            .enumerate()
            .map(|(m, p)| (spec.energy(m + 1) - spec.energy(m)) * p)
            .sum()
    })
}

/// Variances of `X_1 = (A e^{i nu t} + h.c.) / 2` and `X_2 = (A e^{i nu t} - h.c.) / 2i`,
/// formed with the antinormally ordered moment `<A A^dag>` taken directly
/// from the photon distribution.
pub fn quadrature_variances(traj: &AmplitudeTrajectory, nu: f64) -> (ObservableSeries, ObservableSeries) {
    let spec = traj.params().spec;
    let fm = field_moments(traj, nu);
    let mut v1 = Vec::with_capacity(traj.len());
    let mut v2 = Vec::with_capacity(traj.len());
    for k in 0..traj.len() {
        let anti: f64 = distribution(traj, k)
            .iter()
            .enumerate()
            .map(|(m, p)| spec.energy(m + 1) * p)
            .sum();
        let sym = anti + fm.xi.value[k];
        let (eta, zeta) = (fm.eta[k], fm.zeta[k]);
        v1.push(0.25 * (sym + 2.0 * zeta.re) - eta.re * eta.re);
        v2.push(0.25 * (sym - 2.0 * zeta.re) - eta.im * eta.im);
    }
    (
        ObservableSeries::new("var_X1", traj, v1),
        ObservableSeries::new("var_X2", traj, v2),
    )
}

/// `S_1 = 2 xi + 2 Re zeta - 4 (Re eta)^2`, `S_2 = 2 xi - 2 Re zeta - 4 (Im eta)^2`.
///
/// These equal `4 Var(X_j) - <[A, A^dag]>`, so a negative value is
/// quadrature squeezing relative to the deformed commutator.
pub fn quadrature_squeezing(traj: &AmplitudeTrajectory, nu: f64) -> (ObservableSeries, ObservableSeries) {
    let fm = field_moments(traj, nu);
    let s = |sign: f64, name| {
        let v = (0..traj.len())
            .map(|k| {
                let (xi, eta, zeta) = (fm.xi.value[k], fm.eta[k], fm.zeta[k]);
                let quad = if sign > 0.0 { eta.re } else { eta.im };
                2.0 * xi + sign * 2.0 * zeta.re - 4.0 * quad * quad
            })
            .collect();
        ObservableSeries::new(name, traj, v)
    };
    (s(1.0, "S1"), s(-1.0, "S2"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformation::{DeformationSpec, PhotonWeights};
    use crate::dynamics::{evolve_state, test_params, EvolutionMode, ModelParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn preset_at(kg: f64, scaled: &[f64]) -> AmplitudeTrajectory {
        let mut params = test_params(kg);
        params.t_grid = scaled.iter().map(|s| s / params.lambda_c).collect();
        evolve_state(&params, EvolutionMode::ClosedForm).unwrap()
    }

    fn jc(params: &mut ModelParams) {
        params.spec = DeformationSpec::Identity;
        params.delta_k_bar = 0.0;
        params.recoil_rate = 0.0;
        params.p_nodes = 1;
        params.weights = PhotonWeights::vacuum();
        params.c_e = c(1.0, 0.0);
        params.c_g = c(0.0, 0.0);
    }

    #[test]
    fn reference_values_without_gravity() {
        // Matrix-exponential blocks on the 32-node Gauss-Hermite rule.
        let traj = preset_at(0.0, &[0.0, 1.0, 5.0, 10.0]);
        let w = population_inversion(&traj);
        assert!(
            (w.value[3] - 0.014_065_014_104_799_434).abs() < 1e-10,
            "{}",
            w.value[3]
        );
        let (sx, sy) = dipole_expectations(&traj, traj.params().omega);
        assert!(
            (sy.value[1] - 0.433_629_944_253_274_56).abs() < 1e-10,
            "{}",
            sy.value[1]
        );
        assert!(
            (sx.value[1] + 0.248_620_575_609_173_5).abs() < 1e-10,
            "{}",
            sx.value[1]
        );
        let fm = field_moments(&traj, traj.params().nu);
        assert!(
            (fm.xi.value[1] - 3.991_825_220_747_603_7).abs() < 1e-10,
            "{}",
            fm.xi.value[1]
        );
        let pn = photon_distribution(&traj, 2).unwrap();
        let expected = [
            0.021_354_088_732_149_34,
            0.085_282_550_035_724_44,
            0.166_932_238_839_302_64,
            0.213_520_898_675_645_3,
            0.200_744_118_842_966_95,
            0.147_948_666_316_968_46,
        ];
        for (n, e) in expected.iter().enumerate() {
            assert!((pn[n] - e).abs() < 1e-10, "n={n} {}", pn[n]);
        }
    }

    #[test]
    fn equal_superposition_starts_uninverted() {
        let traj = preset_at(2e7, &[0.0]);
        assert!(population_inversion(&traj).value[0].abs() < 1e-15);
    }

    #[test]
    fn jaynes_cummings_limit() {
        let mut params = test_params(0.0);
        jc(&mut params);
        params.t_grid = ModelParams::scaled_time_grid(params.lambda_c, 6.0, 61);
        let traj = evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
        let w = population_inversion(&traj);
        for (v, s) in w.value.iter().zip(&w.scaled_t) {
            assert!((v - (2.0 * s).cos()).abs() < 1e-12);
        }
        let (sx, sy) = dipole_expectations(&traj, params.omega);
        assert_eq!((sx.value[0], sy.value[0]), (0.0, 0.0));
        let (_, fy) = dipole_squeezing(&traj, params.omega);
        assert!(fy.value[0].abs() < 1e-15);
        // Vacuum with an excited atom has no coherence at any time either.
        assert!(sx.value.iter().chain(&sy.value).all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn frozen_without_coupling() {
        let mut params = test_params(2e7);
        params.lambda_c = 0.0;
        params.t_grid = (0..20).map(|k| k as f64 * 1e-5).collect();
        let traj = evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
        let dp = momentum_diffusion(&traj);
        assert!(dp.value.iter().all(|v| (v - 0.5).abs() < 1e-12));
        let w = population_inversion(&traj);
        assert!(w.value.iter().all(|v| (v - w.value[0]).abs() < 1e-15));

        // An excited atom carries no dipole, so F_y stays at 1 - |W|.
        params.c_e = c(1.0, 0.0);
        params.c_g = c(0.0, 0.0);
        let traj = evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
        let (_, fy) = dipole_squeezing(&traj, params.omega);
        assert!(fy.value.iter().all(|&v| v.abs() < 1e-14));
    }

    #[test]
    fn frozen_undeformed_field_moments_are_constant() {
        let mut params = test_params(0.0);
        params.spec = DeformationSpec::Identity;
        params.weights = crate::deformation::q_coherent_weights(&params.spec, 2.0, 1e-14).unwrap();
        params.lambda_c = 0.0;
        params.p_nodes = 2;
        params.t_grid = (0..10).map(|k| k as f64 * 3.3e-6).collect();
        let traj = evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
        let fm = field_moments(&traj, params.nu);
        for k in 0..traj.len() {
            assert!((fm.eta[k] - fm.eta[0]).norm() < 1e-12);
            assert!((fm.zeta[k] - fm.zeta[0]).norm() < 1e-12);
        }
        // Coherent-state moments alpha, alpha^2, |alpha|^2 (the support cut
        // at 1e-14 leaves a matching residual).
        assert!((fm.eta[0] - 2.0).norm() < 1e-10);
        assert!((fm.zeta[0] - 4.0).norm() < 1e-10);
        assert!((fm.xi.value[0] - 4.0).abs() < 1e-10);
        let (s1, s2) = quadrature_squeezing(&traj, params.nu);
        assert!(s1.value[0].abs() < 1e-9 && s2.value[0].abs() < 1e-9);
        assert!((g2(&traj).unwrap().value[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn vacuum_field_moments() {
        let mut params = test_params(0.0);
        params.weights = PhotonWeights::vacuum();
        params.c_e = c(0.0, 0.0);
        params.c_g = c(1.0, 0.0);
        params.p_nodes = 3;
        params.t_grid = alloc::vec![0.0, 1e-5];
        let traj = evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
        let fm = field_moments(&traj, params.nu);
        assert!(fm.xi.value.iter().all(|&v| v == 0.0));
        assert!(fm.eta.iter().chain(&fm.zeta).all(|v| v.norm() == 0.0));
        let (s1, s2) = quadrature_squeezing(&traj, params.nu);
        assert!(s1.value.iter().chain(&s2.value).all(|&v| v == 0.0));
        assert!(matches!(g2(&traj), Err(ObservableError::DegenerateField { .. })));
    }

    #[test]
    fn fock_state_g2() {
        for m in 1..6usize {
            let mut params = test_params(0.0);
            params.weights = PhotonWeights::fock(m);
            params.p_nodes = 2;
            params.t_grid = alloc::vec![0.0];
            let traj = evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
            let g = g2(&traj).unwrap().value[0];
            assert!((g - (1.0 - 1.0 / m as f64)).abs() < 1e-14);
        }
    }

    #[test]
    fn distribution_bookkeeping() {
        let traj = preset_at(8e7, &[0.0, 3.0, 17.0]);
        let w0 = traj.params().weights.clone();
        let p0 = photon_distribution(&traj, 0).unwrap();
        for (n, p) in p0.iter().enumerate() {
            assert!((p - w0.get(n).powi(2)).abs() < 1e-15);
        }
        for k in 0..traj.len() {
            let pn = photon_distribution(&traj, k).unwrap();
            assert!((pn.iter().sum::<f64>() - 1.0).abs() < 1e-8);
            assert!(pn.iter().all(|&p| p >= -1e-12));
        }
        assert!(matches!(
            photon_distribution(&traj, 3),
            Err(ObservableError::TimeIndex { index: 3, len: 3 })
        ));
    }

    #[test]
    fn squeezing_forms_agree() {
        let traj = preset_at(2e7, &[0.0, 0.7, 4.0, 11.0, 25.0]);
        let nu = traj.params().nu;
        let (s1, s2) = quadrature_squeezing(&traj, nu);
        let (v1, v2) = quadrature_variances(&traj, nu);
        let b = commutator_expectation(&traj);
        for k in 0..traj.len() {
            assert!((s1.value[k] - (4.0 * v1.value[k] - b.value[k])).abs() < 1e-10);
            assert!((s2.value[k] - (4.0 * v2.value[k] - b.value[k])).abs() < 1e-10);
            assert!(16.0 * v1.value[k] * v2.value[k] >= b.value[k].powi(2) - 1e-8);
        }
    }

    #[test]
    fn bounds_along_a_trajectory() {
        let traj = preset_at(8e7, &[0.0, 0.5, 2.0, 6.5, 13.0, 25.0]);
        let omega = traj.params().omega;
        let w = population_inversion(&traj);
        let (sx, sy) = dipole_expectations(&traj, omega);
        for k in 0..traj.len() {
            assert!(w.value[k].abs() <= 1.0);
            assert!(sx.value[k].abs() <= 0.5 + 1e-12 && sy.value[k].abs() <= 0.5 + 1e-12);
            let floor = 16.0 * (0.25 - sx.value[k].powi(2)) * (0.25 - sy.value[k].powi(2));
            assert!(floor >= w.value[k].powi(2) - 1e-9);
        }
        let (fx, fy) = dipole_squeezing(&traj, omega);
        assert!(fx.value.iter().chain(&fy.value).all(|v| (-1.0..=2.0).contains(v)));
        assert!(g2(&traj).unwrap().value.iter().all(|&v| v > 0.0));
        assert!(momentum_diffusion(&traj).value.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn series_summaries() {
        let traj = preset_at(0.0, &[0.0, 1.0, 2.0]);
        let s = ObservableSeries::new("x", &traj, alloc::vec![1.0, -2.0, 4.0]);
        assert_eq!((s.mean(), s.min(), s.max(), s.len()), (1.0, -2.0, 4.0, 3));
        assert_eq!(s.scaled_t, [0.0, 1.0, 2.0]);
    }
}
