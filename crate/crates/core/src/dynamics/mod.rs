//! Time evolution of the block amplitudes.
//!
//! The excitation number `c = n + |e><e|` is conserved, so the state splits
//! into independent two-level blocks `|e, n> <-> |g, n+1>`, one per photon
//! number `n` and momentum node `p`. Within a block the interaction-picture
//! amplitudes obey
//!
//! ```text
//! psi1' = -i G e^{ i theta(t)} psi2,
//! psi2' = -i G e^{-i theta(t)} psi1,
//! G = lambda sqrt(n+1) f(n+1),   theta(t) = Delta_k t + kg t^2 / 2.
//! ```
//!
//! Three solvers are provided: the Hermite-function closed form for
//! `kg > 0`, the detuned Rabi solution for `kg = 0`, and a step-halving RK4
//! reference used to validate both.

mod closed_form;
pub mod detuning;
mod flat;
mod grid;
pub mod oracle;

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::deformation::{DeformationError, DeformationSpec, PhotonWeights};
use crate::specialfn::{SeriesControl, SpecialFnError};

pub use closed_form::ClosedFormBlock;
pub use detuning::{
    block_coupling, block_detuning, detuning_n, rabi_frequency_sq, rabi_params, time_detuning, RabiParams,
};
pub use flat::flat_block;
pub use grid::{make_momentum_grid, MomentumGrid};
pub use oracle::{oracle_batch, BlockHistory, OracleControl};

/// Why a single `(n, p)` block could not be evolved.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlockFailure {
    #[error("coefficient matrix is singular at t = {t:e} s")]
    SingularWronskian { t: f64 },
    #[error("no valid special-function basis near t = {t:e} s{}", cause.as_ref().map(|c| alloc::format!(" ({c})")).unwrap_or_default())]
    NoValidBasis { t: f64, cause: Option<SpecialFnError> },
    #[error("reference integrator did not settle (last halving changed results by {last_change:e})")]
    OracleNotConverged { last_change: f64 },
}

/// A failed block with its coordinates.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("block n = {n}, p = {p}: {failure}")]
pub struct BlockError {
    pub n: usize,
    pub p: f64,
    pub failure: BlockFailure,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error("the closed form needs kg > 0; use the constant-detuning branch")]
    DegenerateBranch,
    #[error("{} block(s) failed; first: {}", .0.len(), .0[0])]
    Blocks(Vec<BlockError>),
}

/// Which solver fills the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvolutionMode {
    /// Hermite closed form for `kg > 0`, detuned Rabi solution for `kg = 0`.
    ClosedForm,
    /// Step-halving RK4 reference.
    Oracle,
}

/// Everything that defines one simulation run.
///
/// Rates are in rad/s, `kg` in 1/s^2 and times in seconds. `delta_k_bar`
/// is the detuning seen by an atom at rest (`p = 0`) in the `n = 0` block;
/// `omega` enters only through the phase of the atomic dipole.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub lambda_c: f64,
    pub delta_k_bar: f64,
    pub kg: f64,
    pub nu: f64,
    pub omega: f64,
    pub recoil_rate: f64,
    pub c_e: Complex64,
    pub c_g: Complex64,
    pub weights: PhotonWeights,
    pub spec: DeformationSpec,
    pub p_nodes: usize,
    pub t_grid: Vec<f64>,
    pub tol: SeriesControl,
    pub oracle: OracleControl,
}

impl ModelParams {
    /// `points` uniformly spaced times covering `lambda t in [0, max_scaled]`.
    pub fn scaled_time_grid(lambda_c: f64, max_scaled: f64, points: usize) -> Vec<f64> {
        let last = points.saturating_sub(1).max(1) as f64;
        (0..points)
            .map(|k| max_scaled * (k as f64 / last) / lambda_c)
            .collect()
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        let rates = [
            self.lambda_c,
            self.delta_k_bar,
            self.kg,
            self.nu,
            self.omega,
            self.recoil_rate,
        ];
        if rates.iter().any(|x| !x.is_finite()) {
            return Err(DynamicsError::InvalidParams("rates must be finite"));
        }
        if self.lambda_c < 0.0 {
            return Err(DynamicsError::InvalidParams("lambda_c must be non-negative"));
        }
        if self.kg < 0.0 {
            return Err(DynamicsError::InvalidParams("kg must be non-negative"));
        }
        let norm = self.c_e.norm_sqr() + self.c_g.norm_sqr();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(DynamicsError::InvalidParams("|c_e|^2 + |c_g|^2 must equal 1"));
        }
        if self.p_nodes < 1 {
            return Err(DynamicsError::InvalidParams("p_nodes must be at least 1"));
        }
        match self.t_grid.first() {
            Some(&0.0) => {}
            _ => return Err(DynamicsError::InvalidParams("t_grid must start at 0")),
        }
        if !self.t_grid.windows(2).all(|w| w[1] > w[0]) || self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(DynamicsError::InvalidParams(
                "t_grid must be finite and strictly increasing",
            ));
        }
        self.spec.validate()?;
        self.tol
            .validate()
            .map_err(|_| DynamicsError::InvalidParams("invalid series control"))?;
        Ok(())
    }

    /// `(psi1_n(0), psi2_{n+1}(0)) = (w(n) c_e, w(n+1) c_g)`.
    pub fn initial_block(&self, n: usize) -> (Complex64, Complex64) {
        (self.c_e * self.weights.get(n), self.c_g * self.weights.get(n + 1))
    }

    /// Amplitude of `|g, 0>`, which couples to nothing.
    pub fn inert_ground(&self) -> Complex64 {
        self.c_g * self.weights.get(0)
    }

    pub fn n_max(&self) -> usize {
        self.weights.n_max()
    }
}

/// Closed-form amplitudes of block `(n, p)` at time `t` (requires `kg > 0`).
pub fn amplitudes_closed_form(
    params: &ModelParams,
    n: usize,
    p: f64,
    t: f64,
) -> Result<(Complex64, Complex64), DynamicsError> {
    let rp = rabi_params(params, n, p)?;
    let mut block = ClosedFormBlock::new(rp, params.tol, params.initial_block(n));
    let (a, b) = block
        .trajectory(&[t])
        .map_err(|failure| block_error(n, p, failure))?;
    Ok((a[0], b[0]))
}

/// Constant-detuning amplitudes of block `(n, p)` at time `t`; `kg` is ignored.
pub fn amplitudes_flat_branch(params: &ModelParams, n: usize, p: f64, t: f64) -> (Complex64, Complex64) {
    flat_block(
        block_coupling(params, n),
        block_detuning(params, n, p),
        params.initial_block(n),
        t,
    )
}

/// Reference amplitudes of block `(n, p)` on `times`.
pub fn amplitudes_ode_oracle(
    params: &ModelParams,
    n: usize,
    p: f64,
    times: &[f64],
) -> Result<BlockHistory, DynamicsError> {
    let mut out = oracle_batch(
        block_coupling(params, n),
        &[block_detuning(params, n, p)],
        params.kg,
        &[params.initial_block(n)],
        times,
        &params.oracle,
    )
    .map_err(|failure| block_error(n, p, failure))?;
    Ok(out.pop().expect("one lane"))
}

fn block_error(n: usize, p: f64, failure: BlockFailure) -> DynamicsError {
    DynamicsError::Blocks(alloc::vec![BlockError { n, p, failure }])
}

/// Histories of every momentum node of one photon number `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RungHistory {
    pub n: usize,
    /// One entry per momentum node, in grid order.
    pub blocks: Vec<BlockHistory>,
}

/// Evolves all blocks of photon number `n` on `params.t_grid`.
///
/// Returns every failing block rather than stopping at the first one.
pub fn evolve_rung(
    params: &ModelParams,
    grid: &MomentumGrid,
    n: usize,
    mode: EvolutionMode,
) -> Result<RungHistory, Vec<BlockError>> {
    let g = block_coupling(params, n);
    let psi0 = params.initial_block(n);
    let times = &params.t_grid;
    match mode {
        EvolutionMode::Oracle => {
            let detunings: Vec<f64> = grid.p.iter().map(|&p| block_detuning(params, n, p)).collect();
            let psi0s = alloc::vec![psi0; grid.len()];
            oracle_batch(g, &detunings, params.kg, &psi0s, times, &params.oracle)
                .map(|blocks| RungHistory { n, blocks })
                .map_err(|failure| {
                    grid.p
                        .iter()
                        .map(|&p| BlockError {
                            n,
                            p,
                            failure: failure.clone(),
                        })
                        .collect()
                })
        }
        EvolutionMode::ClosedForm => {
            let mut blocks = Vec::with_capacity(grid.len());
            let mut errors = Vec::new();
            for &p in &grid.p {
                let d = block_detuning(params, n, p);
                if params.kg > 0.0 {
                    let rp = RabiParams {
                        a2: Complex64::new(g * g / params.kg, 0.0),
                        coupling: g,
                        detuning: d,
                        kg: params.kg,
                    };
                    match ClosedFormBlock::new(rp, params.tol, psi0).trajectory(times) {
                        Ok(h) => blocks.push(h),
                        Err(failure) => errors.push(BlockError { n, p, failure }),
                    }
                } else {
                    let (a, b) = times.iter().map(|&t| flat_block(g, d, psi0, t)).unzip();
                    blocks.push((a, b));
                }
            }
            if errors.is_empty() {
                Ok(RungHistory { n, blocks })
            } else {
                Err(errors)
            }
        }
    }
}

/// Amplitudes on the full `(n, p, t)` grid.
///
/// `psi1(n, j, k)` is the amplitude of `|e, n>` and `psi2(m, j, k)` that of
/// `|g, m>` at momentum node `j` and time index `k`, for `n <= n_max` and
/// `m <= n_max + 1`. `psi2(0, ..)` is the inert ground amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    params: ModelParams,
    grid: MomentumGrid,
    psi1: Vec<Complex64>,
    psi2: Vec<Complex64>,
}

impl AmplitudeTrajectory {
    /// Gathers rung histories (one per `n = 0..=n_max`, any order) into a
    /// trajectory. The result depends only on the histories, not on the
    /// order they were computed in.
    pub fn assemble(params: ModelParams, grid: MomentumGrid, mut rungs: Vec<RungHistory>) -> Self {
        rungs.sort_by_key(|r| r.n);
        let (n_max, np, nt) = (params.n_max(), grid.len(), params.t_grid.len());
        assert_eq!(rungs.len(), n_max + 1, "one rung per photon number");
        let mut psi1 = alloc::vec![Complex64::new(0.0, 0.0); (n_max + 1) * np * nt];
        let mut psi2 = alloc::vec![Complex64::new(0.0, 0.0); (n_max + 2) * np * nt];
        let inert = params.inert_ground();
        psi2[..np * nt].fill(inert);
        for rung in &rungs {
            assert_eq!(rung.blocks.len(), np, "one block per momentum node");
            for (j, (a, b)) in rung.blocks.iter().enumerate() {
                let o1 = (rung.n * np + j) * nt;
                let o2 = ((rung.n + 1) * np + j) * nt;
                psi1[o1..o1 + nt].copy_from_slice(a);
                psi2[o2..o2 + nt].copy_from_slice(b);
            }
        }
        Self {
            params,
            grid,
            psi1,
            psi2,
        }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.params.t_grid
    }

    pub fn n_max(&self) -> usize {
        self.params.n_max()
    }

    pub fn len(&self) -> usize {
        self.params.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.t_grid.is_empty()
    }

    pub fn psi1(&self, n: usize, j: usize, k: usize) -> Complex64 {
        let (np, nt) = (self.grid.len(), self.len());
        self.psi1[(n * np + j) * nt + k]
    }

    pub fn psi2(&self, m: usize, j: usize, k: usize) -> Complex64 {
        let (np, nt) = (self.grid.len(), self.len());
        self.psi2[(m * np + j) * nt + k]
    }

    /// `sum_j weight_j sum_n (|psi1_n|^2 + |psi2_n|^2)` at time index `k`.
    pub fn norm(&self, k: usize) -> f64 {
        let mut total = 0.0;
        for (j, &w) in self.grid.weight.iter().enumerate() {
            let mut s = 0.0;
            for n in 0..=self.n_max() {
                s += self.psi1(n, j, k).norm_sqr();
            }
            for m in 0..=self.n_max() + 1 {
                s += self.psi2(m, j, k).norm_sqr();
            }
            total += w * s;
        }
        total
    }
}

/// Sequential evolution of the whole state.
pub fn evolve_state(params: &ModelParams, mode: EvolutionMode) -> Result<AmplitudeTrajectory, DynamicsError> {
    params.validate()?;
    let grid = make_momentum_grid(params.p_nodes);
    let mut rungs = Vec::with_capacity(params.n_max() + 1);
    let mut errors = Vec::new();
    for n in 0..=params.n_max() {
        match evolve_rung(params, &grid, n, mode) {
            Ok(r) => rungs.push(r),
            Err(e) => errors.extend(e),
        }
    }
    if !errors.is_empty() {
        return Err(DynamicsError::Blocks(errors));
    }
    Ok(AmplitudeTrajectory::assemble(params.clone(), grid, rungs))
}

#[cfg(test)]
pub(crate) fn test_params(kg: f64) -> ModelParams {
    let spec = DeformationSpec::QType { q: 1.04 };
    let amp = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    ModelParams {
        lambda_c: 1e5,
        delta_k_bar: 3e7,
        kg,
        nu: 1e7,
        omega: 4e7,
        recoil_rate: 1.054_571_817e6,
        c_e: amp,
        c_g: amp,
        weights: crate::deformation::q_coherent_weights(&spec, 2.0, 1e-12).expect("weights"),
        spec,
        p_nodes: 32,
        t_grid: ModelParams::scaled_time_grid(1e5, 25.0, 51),
        tol: SeriesControl::default(),
        oracle: OracleControl::default(),
    }
}
