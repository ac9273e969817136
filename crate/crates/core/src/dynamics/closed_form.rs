//! Closed-form amplitudes for a uniformly accelerating atom (`kg > 0`).
//!
//! With the instantaneous detuning `D(t) = Delta_k + kg t` the block
//! equations reduce, in the variable `x = b(t)`, to the Hermite equation
//! `y'' - 2 x y' + 2 nu y = 0` of order `nu = -i a^2`. Two bases of that
//! equation are used:
//!
//! - a large-argument pair `H_nu(s x)` and `e^{x^2} H_{-nu-1}(-i s x)`,
//!   `s = sign D`, evaluated through the scaled asymptotic form. Both members
//!   keep comparable moduli along the whole trajectory, so the superposition
//!   is well conditioned.
//! - a small-argument pair `H_nu(x)` and `1F1(-nu/2; 1/2; x^2)` from the
//!   series, used near the zero of `D`.
//!
//! Coefficients are matched to the state at an anchor time. When the active
//! basis stops being valid the state is carried to a time where another
//! basis is valid and re-matched there; if no such time is found by
//! bisection the block fails with [`BlockFailure::NoValidBasis`].

use num_complex::Complex64;

use super::detuning::RabiParams;
use super::BlockFailure;
use crate::specialfn::{
    asymptotic_margin, hermite_h, hermite_h_asymptotic, kummer_1f1, ScaledComplex, SeriesControl,
    SpecialFnError, ASYMPTOTIC_MIN_MARGIN,
};

const SINGULAR_TOL: f64 = 1e-14;
const MAX_BISECTIONS: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Basis {
    Asymptotic { sigma: f64 },
    Series,
}

struct Values {
    u1: ScaledComplex,
    u2: ScaledComplex,
    v1: ScaledComplex,
    v2: ScaledComplex,
}

enum EvalFailure {
    NotApplicable,
    SpecialFn(SpecialFnError),
}

struct Anchor {
    basis: Basis,
    c1: ScaledComplex,
    c2: ScaledComplex,
}

/// Closed-form solver for a single `(n, p)` block.
pub struct ClosedFormBlock {
    rp: RabiParams,
    ctl: SeriesControl,
    psi0: (Complex64, Complex64),
    anchor: Option<Anchor>,
    last_error: Option<SpecialFnError>,
}

impl ClosedFormBlock {
    pub fn new(rp: RabiParams, ctl: SeriesControl, psi0: (Complex64, Complex64)) -> Self {
        Self {
            rp,
            ctl,
            psi0,
            anchor: None,
            last_error: None,
        }
    }

    /// Amplitudes at increasing times `times` (all `>= 0`).
    pub fn trajectory(
        &mut self,
        times: &[f64],
    ) -> Result<(alloc::vec::Vec<Complex64>, alloc::vec::Vec<Complex64>), BlockFailure> {
        let mut psi1 = alloc::vec::Vec::with_capacity(times.len());
        let mut psi2 = alloc::vec::Vec::with_capacity(times.len());
        if self.rp.coupling == 0.0 {
            psi1.resize(times.len(), self.psi0.0);
            psi2.resize(times.len(), self.psi0.1);
            return Ok((psi1, psi2));
        }
        let (mut t_prev, mut state) = (0.0, self.psi0);
        for &t in times {
            if t != t_prev {
                state = self.advance(t_prev, state, t, 0)?;
                t_prev = t;
            }
            psi1.push(state.0);
            psi2.push(state.1);
        }
        Ok((psi1, psi2))
    }

    fn phase(&self, t: f64) -> f64 {
        self.rp.detuning * t + 0.5 * self.rp.kg * t * t
    }

    fn eval(&self, basis: Basis, t: f64) -> Result<Values, EvalFailure> {
        let x = self.rp.b(t);
        let nu = self.rp.hermite_order();
        let i = Complex64::new(0.0, 1.0);
        let pref = i / self.rp.coupling * Complex64::from_polar(1.0, -self.phase(t)) * self.rp.b_rate();
        match basis {
            Basis::Asymptotic { sigma } => {
                let z1 = x * sigma;
                let z2 = -i * z1;
                let checks = [(nu, z1), (nu - 1.0, z1), (-nu - 1.0, z2), (-nu, z2)];
                for (order, z) in checks {
                    match asymptotic_margin(order, z) {
                        Some(m) if m >= ASYMPTOTIC_MIN_MARGIN => {}
                        _ => return Err(EvalFailure::NotApplicable),
                    }
                }
                let lg = |order, z| hermite_h_asymptotic(order, z).map_err(EvalFailure::SpecialFn);
                // e^{x^2} = e^{i Delta_k^2 / (2 kg)} e^{i theta(t)}. The constant
                // factor is absorbed into c2; dropping it avoids evaluating a
                // phase of order Delta_k^2 / kg in floating point.
                let growth = ScaledComplex::from_log(Complex64::new(0.0, self.phase(t)));
                Ok(Values {
                    u1: lg(nu, z1)?,
                    v1: lg(nu - 1.0, z1)? * (pref * sigma * 2.0 * nu),
                    u2: growth * lg(-nu - 1.0, z2)?,
                    v2: growth * lg(-nu, z2)? * (pref * sigma * i),
                })
            }
            Basis::Series => {
                let ctl = &self.ctl;
                let wrap = |r: Result<Complex64, SpecialFnError>| r.map_err(EvalFailure::SpecialFn);
                let x2 = x * x;
                let u1 = wrap(hermite_h(nu, x, ctl))?;
                let h_lower = wrap(hermite_h(nu - 1.0, x, ctl))?;
                let m = wrap(kummer_1f1(-nu * 0.5, Complex64::new(0.5, 0.0), x2, ctl))?;
                let m_next = wrap(kummer_1f1(1.0 - nu * 0.5, Complex64::new(1.5, 0.0), x2, ctl))?;
                Ok(Values {
                    u1: ScaledComplex::from_complex(u1),
                    v1: ScaledComplex::from_complex(h_lower * pref * 2.0 * nu),
                    u2: ScaledComplex::from_complex(m),
                    v2: ScaledComplex::from_complex(m_next * pref * (-2.0) * nu * x),
                })
            }
        }
    }

    fn try_eval(&mut self, basis: Basis, t: f64) -> Option<Values> {
        match self.eval(basis, t) {
            Ok(v) if [v.u1, v.u2, v.v1, v.v2].iter().all(ScaledComplex::is_finite) => Some(v),
            Ok(_) => {
                self.last_error = Some(SpecialFnError::Overflow);
                None
            }
            Err(EvalFailure::SpecialFn(e)) => {
                self.last_error = Some(e);
                None
            }
            Err(EvalFailure::NotApplicable) => None,
        }
    }

    fn candidates(&self, t: f64) -> [Basis; 2] {
        let d = self.rp.detuning + self.rp.kg * t;
        let sigma = if d < 0.0 { -1.0 } else { 1.0 };
        [Basis::Asymptotic { sigma }, Basis::Series]
    }

    fn advance(
        &mut self,
        t_a: f64,
        psi_a: (Complex64, Complex64),
        t_b: f64,
        depth: u32,
    ) -> Result<(Complex64, Complex64), BlockFailure> {
        if let Some(basis) = self.anchor.as_ref().map(|a| a.basis) {
            if let Some(vb) = self.try_eval(basis, t_b) {
                return Ok(combine(self.anchor.as_ref().expect("anchor present"), &vb));
            }
        }
        for basis in self.candidates(t_b) {
            let Some(va) = self.try_eval(basis, t_a) else {
                continue;
            };
            let Some(vb) = self.try_eval(basis, t_b) else {
                continue;
            };
            let anchor = solve(basis, &va, psi_a, t_a)?;
            let out = combine(&anchor, &vb);
            self.anchor = Some(anchor);
            return Ok(out);
        }
        if depth >= MAX_BISECTIONS {
            return Err(BlockFailure::NoValidBasis {
                t: t_b,
                cause: self.last_error.clone(),
            });
        }
        let t_m = 0.5 * (t_a + t_b);
        let psi_m = self.advance(t_a, psi_a, t_m, depth + 1)?;
        self.advance(t_m, psi_m, t_b, depth + 1)
    }
}

fn solve(basis: Basis, v: &Values, psi: (Complex64, Complex64), t: f64) -> Result<Anchor, BlockFailure> {
    let det = v.u1 * v.v2 - v.u2 * v.v1;
    let l1 = v.u1.ln_norm() + v.v2.ln_norm();
    let l2 = v.u2.ln_norm() + v.v1.ln_norm();
    let (hi, lo) = if l1 >= l2 { (l1, l2) } else { (l2, l1) };
    let ln_ref = hi + (lo - hi).exp().ln_1p();
    if det.is_zero() || det.ln_norm() - ln_ref < SINGULAR_TOL.ln() {
        return Err(BlockFailure::SingularWronskian { t });
    }
    let c1 = (v.v2 * psi.0 - v.u2 * psi.1) / det;
    let c2 = (v.u1 * psi.1 - v.v1 * psi.0) / det;
    Ok(Anchor { basis, c1, c2 })
}

fn combine(anchor: &Anchor, v: &Values) -> (Complex64, Complex64) {
    let psi1 = anchor.c1 * v.u1 + anchor.c2 * v.u2;
    let psi2 = anchor.c1 * v.v1 + anchor.c2 * v.v2;
    (psi1.to_complex(), psi2.to_complex())
}
