//! Exact dynamics of a moving two-level atom coupled to an f-deformed cavity
//! mode under a uniform gravitational field.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! - [`specialfn`]: complex Gamma, Kummer's confluent hypergeometric function
//!   and Hermite functions of complex order, including a log-scaled
//!   large-argument path.
//! - [`deformation`]: nonlinearity functions `f(n)`, deformed factorials and
//!   the photon weights of the nonlinear coherent state.
//! - [`fockspace`]: truncated matrix forms of the deformed ladder operators
//!   and residual checks of their commutator algebra.
//! - [`dynamics`]: the closed-form amplitudes, the constant-detuning branch
//!   and an RK4 reference integrator over a momentum quadrature grid.
//! - [`observables`]: inversion, dipole squeezing, momentum spread, photon
//!   statistics and deformed quadrature squeezing, plus a dense state-vector
//!   reference path used to cross-check them.
//!
//! IO, configuration and parallel drivers live in the `fdjc` crate.
#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod deformation;
pub mod dynamics;
pub mod fockspace;
pub mod observables;
pub mod specialfn;

pub use num_complex::Complex64;

pub use deformation::{DeformationSpec, PhotonWeights};
pub use dynamics::{AmplitudeTrajectory, EvolutionMode, ModelParams, MomentumGrid};
pub use fockspace::FockMatrices;
pub use observables::ObservableSeries;
pub use specialfn::SeriesControl;
