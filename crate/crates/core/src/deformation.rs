//! Nonlinearity functions and the photon weights of the initial field.
//!
//! The deformed ladder operator is `A = a f(n)`. Three families are
//! supported: the undeformed oscillator, the maths-type q-deformation
//! `f(n)^2 = (1 - q^n) / (n (1 - q))` and the Kerr-like form
//! `f(n)^2 = 1 + kappa (n - 1)`. By convention `f(0) = 1`; the value is never
//! observable because `A|0> = 0`.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error("invalid deformation parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("negative radicand {value} in f({n})")]
    Domain { n: usize, value: f64 },
    #[error("photon weights do not decay within {scanned} terms")]
    NoConvergence { scanned: usize },
}

/// Selects the nonlinearity function `f(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeformationSpec {
    Identity,
    QType { q: f64 },
    Kerr { kappa: f64 },
}

impl DeformationSpec {
    pub fn validate(&self) -> Result<(), DeformationError> {
        match *self {
            DeformationSpec::Identity => Ok(()),
            DeformationSpec::QType { q } => {
                if !(q.is_finite() && q > 0.0) {
                    Err(DeformationError::InvalidParameter(
                        "q must be finite and positive",
                    ))
                } else if q == 1.0 {
                    Err(DeformationError::InvalidParameter(
                        "q = 1 is the identity deformation",
                    ))
                } else {
                    Ok(())
                }
            }
            DeformationSpec::Kerr { kappa } => {
                if kappa.is_finite() && kappa >= 0.0 {
                    Ok(())
                } else {
                    Err(DeformationError::InvalidParameter(
                        "kappa must be finite and non-negative",
                    ))
                }
            }
        }
    }

    /// `f(n)^2` without validation. Callers are expected to hold a validated
    /// spec; for those the value is positive for every `n`.
    pub fn f_squared(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        match *self {
            DeformationSpec::Identity => 1.0,
            DeformationSpec::QType { q } => {
                // (q^n - 1) / (q - 1) / n, both differences through expm1 so
                // that q close to 1 keeps full precision.
                let l = q.ln();
                (n as f64 * l).exp_m1() / l.exp_m1() / n as f64
            }
            DeformationSpec::Kerr { kappa } => 1.0 + kappa * (n as f64 - 1.0),
        }
    }

    pub fn f(&self, n: usize) -> f64 {
        self.f_squared(n).sqrt()
    }

    /// `n f(n)^2`, the spectrum of `A^dag A`.
    pub fn energy(&self, n: usize) -> f64 {
        n as f64 * self.f_squared(n)
    }
}

/// Checked evaluation of `f(n)`.
pub fn f_value(spec: &DeformationSpec, n: usize) -> Result<f64, DeformationError> {
    spec.validate()?;
    let value = spec.f_squared(n);
    if !(value >= 0.0) || !value.is_finite() {
        return Err(DeformationError::Domain { n, value });
    }
    Ok(value.sqrt())
}

/// `ln [n f^2(n)]! = sum_{k=1..n} ln(k f(k)^2)`.
pub fn ln_deformed_factorial(spec: &DeformationSpec, n: usize) -> f64 {
    (1..=n).map(|k| spec.energy(k).ln()).sum()
}

/// `[n f^2(n)]!`; overflows to infinity where the logarithm exceeds the
/// `f64` range (around `n = 170` for the undeformed case).
pub fn deformed_factorial(spec: &DeformationSpec, n: usize) -> f64 {
    ln_deformed_factorial(spec, n).exp()
}

/// Fock-basis amplitudes `w(n)` of the initial field, `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonWeights {
    w: Vec<f64>,
    alpha: f64,
}

impl PhotonWeights {
    /// The vacuum `|0>`.
    pub fn vacuum() -> Self {
        Self::fock(0)
    }

    /// The number state `|m>`.
    pub fn fock(m: usize) -> Self {
        let mut w = alloc::vec![0.0; m + 1];
        w[m] = 1.0;
        Self { w, alpha: 0.0 }
    }

    /// Arbitrary real amplitudes, renormalized to unit norm.
    pub fn from_amplitudes(w: Vec<f64>) -> Result<Self, DeformationError> {
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if w.is_empty() || !(norm > 0.0) || !norm.is_finite() {
            return Err(DeformationError::InvalidParameter(
                "amplitudes must have positive finite norm",
            ));
        }
        Ok(Self {
            w: w.iter().map(|x| x / norm).collect(),
            alpha: 0.0,
        })
    }

    pub fn n_max(&self) -> usize {
        self.w.len() - 1
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// `w(n)`, zero beyond the truncation.
    pub fn get(&self, n: usize) -> f64 {
        self.w.get(n).copied().unwrap_or(0.0)
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.w.iter().enumerate().map(|(n, x)| n as f64 * x * x).sum()
    }
}

/// Weights `w(n) = N alpha^n / sqrt([n f^2(n)]!)` of the nonlinear coherent
/// state, truncated at the smallest `n_max` whose discarded tail probability
/// is below `tail_tol` and renormalized on the kept support.
pub fn q_coherent_weights(
    spec: &DeformationSpec,
    alpha: f64,
    tail_tol: f64,
) -> Result<PhotonWeights, DeformationError> {
    spec.validate()?;
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(DeformationError::InvalidParameter(
            "alpha must be finite and non-negative",
        ));
    }
    if !(tail_tol > 0.0) {
        return Err(DeformationError::InvalidParameter("tail_tol must be positive"));
    }
    if alpha == 0.0 {
        return Ok(PhotonWeights::vacuum());
    }

    let scanned = 4 * (alpha * alpha).ceil() as usize + 200;
    let ln_alpha2 = 2.0 * alpha.ln();
    let mut log_p = Vec::with_capacity(scanned);
    let mut ln_fact = 0.0;
    for n in 0..scanned {
        if n > 0 {
            ln_fact += spec.energy(n).ln();
        }
        log_p.push(n as f64 * ln_alpha2 - ln_fact);
    }
    let peak = log_p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let p: Vec<f64> = log_p.iter().map(|l| (l - peak).exp()).collect();
    let total: f64 = p.iter().sum();

    // The scan must end deep in a decaying tail, otherwise its own truncation
    // is not negligible against tail_tol.
    let last = scanned - 1;
    let ratio = (log_p[last] - log_p[last - 1]).exp();
    if !(ratio < 1.0) || p[last] / total > tail_tol * 1e-3 {
        return Err(DeformationError::NoConvergence { scanned });
    }

    let mut tail = 0.0;
    let mut n_max = 0;
    for n in (0..scanned).rev() {
        if (tail + p[n]) / total >= tail_tol {
            n_max = n;
            break;
        }
        tail += p[n];
    }
    let kept: f64 = p[..=n_max].iter().sum();
    Ok(PhotonWeights {
        w: p[..=n_max].iter().map(|x| (x / kept).sqrt()).collect(),
        alpha,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const Q: DeformationSpec = DeformationSpec::QType { q: 1.04 };

    #[test]
    fn f_values() {
        assert_eq!(f_value(&DeformationSpec::Identity, 7).unwrap(), 1.0);
        assert!((f_value(&Q, 1).unwrap() - 1.0).abs() < 1e-15);
        assert!((f_value(&Q, 2).unwrap() - 1.009_950_493_836_207_8).abs() < 1e-15);
        let kerr = DeformationSpec::Kerr { kappa: 0.5 };
        assert!((f_value(&kerr, 3).unwrap() - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(f_value(&kerr, 0).unwrap(), 1.0);
        assert!(f_value(&DeformationSpec::QType { q: 1.0 }, 2).is_err());
        assert!(f_value(&DeformationSpec::Kerr { kappa: -0.1 }, 2).is_err());
    }

    #[test]
    fn near_unit_q_matches_first_order_form() {
        for &eps in &[1e-3, -1e-3] {
            let spec = DeformationSpec::QType { q: 1.0 + eps };
            for n in 1..=50usize {
                let first_order = (1.0 + 0.5 * eps * (n as f64 - 1.0)).sqrt();
                let f = spec.f(n);
                assert!(((f - first_order) / first_order).abs() < 1e-3, "n={n}");
            }
        }
        let spec = DeformationSpec::QType { q: 1.0 + 1e-6 };
        for n in 1..=50usize {
            assert!((spec.f(n) - 1.0).abs() <= 1e-5 * n as f64);
        }
    }

    #[test]
    fn factorials() {
        assert_eq!(deformed_factorial(&Q, 0), 1.0);
        assert!((deformed_factorial(&DeformationSpec::Identity, 10) - 3_628_800.0).abs() < 1e-6);
        let v = deformed_factorial(&Q, 10);
        assert!(((v - 8_983_438.137_759_078) / v).abs() < 1e-13, "{v}");
        assert!(ln_deformed_factorial(&Q, 500).is_finite());
    }

    #[test]
    fn coherent_weights_for_presets() {
        let w = q_coherent_weights(&Q, 2.0, 1e-12).unwrap();
        assert_eq!(w.n_max(), 22);
        assert!(w.n_max() <= 60);
        let norm: f64 = w.as_slice().iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        assert!((w.mean_photon_number() - 3.715_648_159_704_468).abs() < 1e-10);
        assert_eq!(w.get(23), 0.0);
    }

    #[test]
    fn identity_weights_are_poisson() {
        let w = q_coherent_weights(&DeformationSpec::Identity, 2.0, 1e-14).unwrap();
        let mut ln_fact = 0.0;
        for n in 0..=w.n_max() {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let poisson = (-2.0 + n as f64 * 2.0f64.ln() - 0.5 * ln_fact).exp();
            assert!((w.get(n) - poisson).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn weights_edge_cases() {
        assert_eq!(
            q_coherent_weights(&Q, 0.0, 1e-12).unwrap(),
            PhotonWeights::vacuum()
        );
        let diverging = DeformationSpec::QType { q: 0.5 };
        assert!(matches!(
            q_coherent_weights(&diverging, 2.0, 1e-12),
            Err(DeformationError::NoConvergence { .. })
        ));
        let fock = PhotonWeights::fock(3);
        assert_eq!(fock.mean_photon_number(), 3.0);
        assert!(PhotonWeights::from_amplitudes(alloc::vec![0.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn factorial_recurrence(q in 0.5f64..1.5, kappa in 0.0f64..3.0, n in 1usize..150) {
            prop_assume!((q - 1.0).abs() > 1e-9);
            for spec in [DeformationSpec::QType { q }, DeformationSpec::Kerr { kappa }] {
                let lhs = ln_deformed_factorial(&spec, n);
                let rhs = ln_deformed_factorial(&spec, n - 1) + (n as f64 * spec.f_squared(n)).ln();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
                prop_assert!(spec.f(n) > 0.0);
            }
        }
    }
}
