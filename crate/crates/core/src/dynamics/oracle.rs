//! Fixed-step RK4 reference integrator for the block equations
//!
//! `psi1' = -i G e^{i theta(t)} psi2`, `psi2' = -i G e^{-i theta(t)} psi1`,
//! `theta(t) = D t + kg t^2 / 2`.
//!
//! Several blocks that share `G` and `kg` (the momentum nodes of one photon
//! number) are integrated together with a common step, which keeps the inner
//! loop free of data dependencies between lanes. The phase factors are
//! advanced by a multiplicative recurrence and re-seeded from the exact phase
//! at every output time and every [`RESEED_INTERVAL`] steps, with step times
//! formed as `t0 + k h` rather than accumulated.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::BlockFailure;

const RESEED_INTERVAL: usize = 1024;

/// Step-size policy of the reference integrator.
///
/// The first trial step is `initial_phase_step / Omega_max`, where
/// `Omega_max` bounds the fastest rate in the batch. The step is halved
/// until two successive resolutions agree to `halving_tol` in every stored
/// amplitude; the finer result is returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleControl {
    pub initial_phase_step: f64,
    pub halving_tol: f64,
    pub max_halvings: u32,
}

impl Default for OracleControl {
    fn default() -> Self {
        Self {
            initial_phase_step: 0.025,
            halving_tol: 1e-9,
            max_halvings: 6,
        }
    }
}

/// Amplitude histories `(psi1[t], psi2[t])` of one block.
pub type BlockHistory = (Vec<Complex64>, Vec<Complex64>);

/// Lane state in structure-of-arrays form so the inner loop vectorizes.
struct Lanes {
    y1: [Vec<f64>; 2],
    y2: [Vec<f64>; 2],
    e: [Vec<f64>; 2],
    r: [Vec<f64>; 2],
}

#[inline(always)]
fn mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

/// Runs `count` RK4 steps of size `h` on every lane, using wider vector
/// registers when the `std` feature can confirm the CPU supports them.
/// Both paths perform the same IEEE operations in the same order.
fn run_steps(lanes: &mut Lanes, g: f64, h: f64, q: (f64, f64), count: usize) {
    #[cfg(all(feature = "std", target_arch = "x86_64"))]
    {
        // SAFETY: each path is taken only after its CPU feature was detected.
        if std::is_x86_feature_detected!("avx512f") {
            return unsafe { run_steps_avx512(lanes, g, h, q, count) };
        }
        if std::is_x86_feature_detected!("avx2") {
            return unsafe { run_steps_avx2(lanes, g, h, q, count) };
        }
    }
    run_steps_portable(lanes, g, h, q, count);
}

#[cfg(all(feature = "std", target_arch = "x86_64"))]
#[target_feature(enable = "avx512f")]
unsafe fn run_steps_avx512(lanes: &mut Lanes, g: f64, h: f64, q: (f64, f64), count: usize) {
    run_steps_portable(lanes, g, h, q, count);
}

#[cfg(all(feature = "std", target_arch = "x86_64"))]
#[target_feature(enable = "avx2")]
unsafe fn run_steps_avx2(lanes: &mut Lanes, g: f64, h: f64, q: (f64, f64), count: usize) {
    run_steps_portable(lanes, g, h, q, count);
}

/// The phase factor is `e` at the start of a step and advances by `r`,
/// which itself advances by `q` each half step.
#[inline(always)]
fn run_steps_portable(lanes: &mut Lanes, g: f64, h: f64, q: (f64, f64), count: usize) {
    let n = lanes.y1[0].len();
    let [y1r, y1i] = &mut lanes.y1;
    let [y2r, y2i] = &mut lanes.y2;
    let [er, ei] = &mut lanes.e;
    let [rr, ri] = &mut lanes.r;
    let (y1r, y1i, y2r, y2i) = (&mut y1r[..n], &mut y1i[..n], &mut y2r[..n], &mut y2i[..n]);
    let (er, ei, rr, ri) = (&mut er[..n], &mut ei[..n], &mut rr[..n], &mut ri[..n]);
    let (h2, h6) = (0.5 * h, h / 6.0);
    for _ in 0..count {
        for j in 0..n {
            let a = (y1r[j], y1i[j]);
            let b = (y2r[j], y2i[j]);
            let e0 = (er[j], ei[j]);
            let r0 = (rr[j], ri[j]);
            let e1 = mul(e0, r0);
            let r1 = mul(r0, q);
            let e2 = mul(e1, r1);
            let r2 = mul(r1, q);
            // -i G E and its partner -i G conj(E) = -conj(-i G E).
            let f0 = (g * e0.1, -g * e0.0);
            let f1 = (g * e1.1, -g * e1.0);
            let f2 = (g * e2.1, -g * e2.0);
            let (g0, g1, g2) = ((-f0.0, f0.1), (-f1.0, f1.1), (-f2.0, f2.1));
            let ka1 = mul(f0, b);
            let kb1 = mul(g0, a);
            let ka2 = mul(f1, (b.0 + h2 * kb1.0, b.1 + h2 * kb1.1));
            let kb2 = mul(g1, (a.0 + h2 * ka1.0, a.1 + h2 * ka1.1));
            let ka3 = mul(f1, (b.0 + h2 * kb2.0, b.1 + h2 * kb2.1));
            let kb3 = mul(g1, (a.0 + h2 * ka2.0, a.1 + h2 * ka2.1));
            let ka4 = mul(f2, (b.0 + h * kb3.0, b.1 + h * kb3.1));
            let kb4 = mul(g2, (a.0 + h * ka3.0, a.1 + h * ka3.1));
            y1r[j] = a.0 + h6 * (ka1.0 + 2.0 * (ka2.0 + ka3.0) + ka4.0);
            y1i[j] = a.1 + h6 * (ka1.1 + 2.0 * (ka2.1 + ka3.1) + ka4.1);
            y2r[j] = b.0 + h6 * (kb1.0 + 2.0 * (kb2.0 + kb3.0) + kb4.0);
            y2i[j] = b.1 + h6 * (kb1.1 + 2.0 * (kb2.1 + kb3.1) + kb4.1);
            er[j] = e2.0;
            ei[j] = e2.1;
            rr[j] = r2.0;
            ri[j] = r2.1;
        }
    }
}

/// Integrates every block of the batch with `steps[i]` equal
/// steps between `times[i-1]` and `times[i]` (the integration starts at 0).
fn integrate(
    g: f64,
    detunings: &[f64],
    kg: f64,
    psi0: &[(Complex64, Complex64)],
    times: &[f64],
    steps: &[usize],
) -> Vec<BlockHistory> {
    let n = detunings.len();
    let split = |f: &dyn Fn(usize) -> Complex64| -> [Vec<f64>; 2] {
        [
            (0..n).map(|j| f(j).re).collect(),
            (0..n).map(|j| f(j).im).collect(),
        ]
    };
    let mut lanes = Lanes {
        y1: split(&|j| psi0[j].0),
        y2: split(&|j| psi0[j].1),
        e: [alloc::vec![0.0; n], alloc::vec![0.0; n]],
        r: [alloc::vec![0.0; n], alloc::vec![0.0; n]],
    };
    let mut out: Vec<BlockHistory> = (0..n)
        .map(|_| (Vec::with_capacity(times.len()), Vec::with_capacity(times.len())))
        .collect();

    let mut t_start = 0.0;
    for (i, &t_end) in times.iter().enumerate() {
        let m = steps[i];
        if m > 0 {
            let h = (t_end - t_start) / m as f64;
            let s = 0.5 * h;
            let q = Complex64::from_polar(1.0, kg * s * s);
            for k0 in (0..m).step_by(RESEED_INTERVAL) {
                let t0 = t_start + k0 as f64 * h;
                for (j, &d) in detunings.iter().enumerate() {
                    let e = Complex64::from_polar(1.0, d * t0 + 0.5 * kg * t0 * t0);
                    let r = Complex64::from_polar(1.0, d * s + kg * t0 * s + 0.5 * kg * s * s);
                    (lanes.e[0][j], lanes.e[1][j]) = (e.re, e.im);
                    (lanes.r[0][j], lanes.r[1][j]) = (r.re, r.im);
                }
                let count = RESEED_INTERVAL.min(m - k0);
                run_steps(&mut lanes, g, h, (q.re, q.im), count);
            }
        }
        for (j, o) in out.iter_mut().enumerate() {
            o.0.push(Complex64::new(lanes.y1[0][j], lanes.y1[1][j]));
            o.1.push(Complex64::new(lanes.y2[0][j], lanes.y2[1][j]));
        }
        t_start = t_end;
    }
    out
}

/// RK4 with a fixed number of steps across `[0, times.last()]`, distributed
/// over the output intervals in proportion to their length.
pub fn rk4_fixed(
    g: f64,
    detunings: &[f64],
    kg: f64,
    psi0: &[(Complex64, Complex64)],
    times: &[f64],
    total_steps: usize,
) -> Vec<BlockHistory> {
    let span = times.last().copied().unwrap_or(0.0);
    let h = if span > 0.0 {
        span / total_steps as f64
    } else {
        0.0
    };
    integrate(g, detunings, kg, psi0, times, &interval_steps(times, h))
}

fn interval_steps(times: &[f64], h: f64) -> Vec<usize> {
    let mut prev = 0.0;
    times
        .iter()
        .map(|&t| {
            let dt = t - prev;
            prev = t;
            if dt <= 0.0 || h <= 0.0 {
                0
            } else {
                (dt / h - 1e-9).ceil().max(1.0) as usize
            }
        })
        .collect()
}

/// Step-halving RK4 reference for a batch of blocks sharing `g` and `kg`.
pub fn oracle_batch(
    g: f64,
    detunings: &[f64],
    kg: f64,
    psi0: &[(Complex64, Complex64)],
    times: &[f64],
    ctl: &OracleControl,
) -> Result<Vec<BlockHistory>, BlockFailure> {
    assert_eq!(detunings.len(), psi0.len(), "one initial state per lane");
    let span = times.last().copied().unwrap_or(0.0);
    let omega_max = detunings
        .iter()
        .map(|d| d.abs().max((d + kg * span).abs()))
        .fold(0.0, f64::max)
        + 2.0 * g.abs();
    if omega_max == 0.0 || span == 0.0 {
        let frozen = psi0
            .iter()
            .map(|&(a, b)| (alloc::vec![a; times.len()], alloc::vec![b; times.len()]))
            .collect();
        return Ok(frozen);
    }
    let base = interval_steps(times, ctl.initial_phase_step / omega_max);
    let run = |level: u32| {
        let steps: Vec<usize> = base.iter().map(|&m| m << level).collect();
        integrate(g, detunings, kg, psi0, times, &steps)
    };
    let mut coarse = run(0);
    let mut change = f64::INFINITY;
    for level in 1..=ctl.max_halvings {
        let fine = run(level);
        change = max_difference(&coarse, &fine);
        if change < ctl.halving_tol {
            return Ok(fine);
        }
        coarse = fine;
    }
    Err(BlockFailure::OracleNotConverged { last_change: change })
}

fn max_difference(a: &[BlockHistory], b: &[BlockHistory]) -> f64 {
    let mut worst = 0.0f64;
    for (x, y) in a.iter().zip(b) {
        for (u, v) in x.0.iter().zip(&y.0).chain(x.1.iter().zip(&y.1)) {
            worst = worst.max((u - v).norm());
        }
    }
    worst
}
