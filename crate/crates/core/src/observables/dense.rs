//! Dense state-vector evaluation of the observables.
//!
//! Each momentum node is expanded into a Schrödinger-picture state on the
//! truncated atom (x) field space and every observable is taken as a matrix
//! expectation value. This path shares nothing with the streaming formulas
//! beyond the amplitudes themselves and is meant for small `n_max`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::deformation::DeformationError;
use crate::dynamics::AmplitudeTrajectory;
use crate::fockspace::{AtomFieldOperators, CMatrix};

/// Observables at every time sample, all summed over the momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseObservables {
    pub inversion: Vec<f64>,
    /// Expectation of the lowering operator `sigma^-`.
    pub dipole: Vec<Complex64>,
    pub photon_distribution: Vec<Vec<f64>>,
    pub xi: Vec<f64>,
    pub eta: Vec<Complex64>,
    pub zeta: Vec<Complex64>,
    pub commutator: Vec<f64>,
    pub momentum_spread: Vec<f64>,
}

/// Field dimension used for a trajectory: one level above the highest
/// populated photon number so the commutator is untruncated there.
pub fn field_dim(traj: &AmplitudeTrajectory) -> usize {
    traj.n_max() + 3
}

/// Schrödinger-picture state of momentum node `j` at time index `k`, in the
/// product basis of [`AtomFieldOperators`].
pub fn dense_state(traj: &AmplitudeTrajectory, j: usize, k: usize) -> Vec<Complex64> {
    let p = traj.params();
    let dim = field_dim(traj);
    let t = traj.times()[k];
    let mut psi = alloc::vec![Complex64::new(0.0, 0.0); 2 * dim];
    for (n, slot) in psi.iter_mut().take(traj.n_max() + 1).enumerate() {
        let phase = -(p.nu * p.spec.energy(n) + 0.5 * p.omega) * t;
        *slot = traj.psi1(n, j, k) * Complex64::from_polar(1.0, phase);
    }
    for m in 0..=traj.n_max() + 1 {
        let phase = -(p.nu * p.spec.energy(m) - 0.5 * p.omega) * t;
        psi[dim + m] = traj.psi2(m, j, k) * Complex64::from_polar(1.0, phase);
    }
    psi
}

pub fn dense_observables(traj: &AmplitudeTrajectory) -> Result<DenseObservables, DeformationError> {
    let params = traj.params();
    let dim = field_dim(traj);
    let ops = AtomFieldOperators::new(&params.spec, dim)?;
    let a = ops.lift(&ops.field.big_a);
    let a_dag = ops.lift(&ops.field.big_a_dag);
    let a2 = &a * &a;
    let number = &a_dag * &a;
    let commutator = a.commutator(&a_dag);
    let projectors: Vec<CMatrix> = (0..dim)
        .map(|n| {
            let mut diag = alloc::vec![Complex64::new(0.0, 0.0); dim];
            diag[n] = Complex64::new(1.0, 0.0);
            ops.lift(&CMatrix::from_diag(&diag))
        })
        .collect();

    let mut out = DenseObservables {
        inversion: Vec::new(),
        dipole: Vec::new(),
        photon_distribution: Vec::new(),
        xi: Vec::new(),
        eta: Vec::new(),
        zeta: Vec::new(),
        commutator: Vec::new(),
        momentum_spread: Vec::new(),
    };
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..traj.len() {
        let t = traj.times()[k];
        let (mut w, mut dip, mut xi, mut eta, mut zeta, mut comm) = (zero, zero, zero, zero, zero, zero);
        let mut pn = alloc::vec![0.0; dim];
        let (mut m1, mut m2) = (0.0, 0.0);
        for (j, (&p, &weight)) in traj.grid().p.iter().zip(&traj.grid().weight).enumerate() {
            let psi = dense_state(traj, j, k);
            w += ops.sigma_z.expectation(&psi) * weight;
            dip += ops.sigma_minus.expectation(&psi) * weight;
            xi += number.expectation(&psi) * weight;
            eta += a.expectation(&psi) * weight;
            zeta += a2.expectation(&psi) * weight;
            comm += commutator.expectation(&psi) * weight;
            for (n, proj) in projectors.iter().enumerate() {
                pn[n] += proj.expectation(&psi).re * weight;
            }
            let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
            m1 += weight * p * norm;
            m2 += weight * p * p * norm;
        }
        out.inversion.push(w.re);
        out.dipole.push(dip);
        out.photon_distribution.push(pn);
        out.xi.push(xi.re);
        out.eta.push(eta * Complex64::from_polar(1.0, params.nu * t));
        out.zeta
            .push(zeta * Complex64::from_polar(1.0, 2.0 * params.nu * t));
        out.commutator.push(comm.re);
        out.momentum_spread.push((m2 - m1 * m1).max(0.0).sqrt());
    }
    Ok(out)
}
