//! Simulation driver: parallel evolution, observables and output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use fdjc_core::deformation::DeformationSpec;
use fdjc_core::dynamics::{
    evolve_rung, make_momentum_grid, AmplitudeTrajectory, DynamicsError, EvolutionMode, ModelParams,
};
use fdjc_core::fockspace::{verify_constant_of_motion, verify_deformed_commutator, verify_su2_deformed};
use fdjc_core::observables::{
    dipole_expectations, dipole_squeezing, field_moments, g2, momentum_diffusion, population_inversion,
    quadrature_squeezing, ObservableError, ObservableSeries,
};
use rayon::prelude::*;
use toml::{Table, Value};

use crate::config::{Mode, Observable, ResolvedRun, RunConfig};
use crate::error::RunError;

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.toml";

/// Evolves every photon-number rung in parallel.
///
/// Rungs are independent and are assembled in photon-number order, so the
/// result is bitwise identical for any thread count. `threads = None` uses
/// the global rayon pool.
pub fn evolve(
    params: &ModelParams,
    mode: EvolutionMode,
    threads: Option<usize>,
) -> Result<AmplitudeTrajectory, DynamicsError> {
    params.validate()?;
    let grid = make_momentum_grid(params.p_nodes);
    let work = || {
        (0..=params.n_max())
            .into_par_iter()
            .map(|n| evolve_rung(params, &grid, n, mode))
            .collect::<Vec<_>>()
    };
    let results = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|_| DynamicsError::InvalidParams("cannot start worker threads"))?
            .install(work),
        None => work(),
    };
    let mut rungs = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(rung) => rungs.push(rung),
            Err(e) => errors.extend(e),
        }
    }
    if !errors.is_empty() {
        return Err(DynamicsError::Blocks(errors));
    }
    Ok(AmplitudeTrajectory::assemble(params.clone(), grid, rungs))
}

pub fn observable_series(
    traj: &AmplitudeTrajectory,
    obs: Observable,
) -> Result<ObservableSeries, ObservableError> {
    let p = traj.params();
    Ok(match obs {
        Observable::Inversion => population_inversion(traj),
        Observable::SigmaX => dipole_expectations(traj, p.omega).0,
        Observable::SigmaY => dipole_expectations(traj, p.omega).1,
        Observable::DipoleSqueezingX => dipole_squeezing(traj, p.omega).0,
        Observable::DipoleSqueezingY => dipole_squeezing(traj, p.omega).1,
        Observable::MomentumSpread => momentum_diffusion(traj),
        Observable::G2 => g2(traj)?,
        Observable::S1 => quadrature_squeezing(traj, p.nu).0,
        Observable::S2 => quadrature_squeezing(traj, p.nu).1,
        Observable::Xi => field_moments(traj, p.nu).xi,
    })
}

/// Series of one observable, with its oracle counterpart in mode `both`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableOutput {
    pub observable: Observable,
    pub series: ObservableSeries,
    pub oracle: Option<ObservableSeries>,
}

impl ObservableOutput {
    /// Largest `|value - value_oracle|`, if an oracle series exists.
    pub fn max_abs_diff(&self) -> Option<f64> {
        self.oracle.as_ref().map(|o| {
            self.series
                .value
                .iter()
                .zip(&o.value)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

/// Runs the simulation without touching the file system.
pub fn simulate(run: &ResolvedRun, threads: Option<usize>) -> Result<Vec<ObservableOutput>, RunError> {
    let params = run.physics.model_params()?;
    let primary = evolve(&params, run.mode.primary(), threads)?;
    let oracle = match run.mode {
        Mode::Both => Some(evolve(&params, EvolutionMode::Oracle, threads)?),
        _ => None,
    };
    run.outputs
        .iter()
        .map(|&obs| {
            Ok(ObservableOutput {
                observable: obs,
                series: observable_series(&primary, obs)?,
                oracle: oracle.as_ref().map(|t| observable_series(t, obs)).transpose()?,
            })
        })
        .collect()
}

/// CSV with a `scaled_t,value` header, 17 significant digits and LF endings.
pub fn csv(out: &ObservableOutput) -> String {
    let mut s = String::new();
    match &out.oracle {
        None => {
            s.push_str("scaled_t,value\n");
            for (t, v) in out.series.scaled_t.iter().zip(&out.series.value) {
                let _ = writeln!(s, "{t:.16e},{v:.16e}");
            }
        }
        Some(o) => {
            s.push_str("scaled_t,value,value_oracle,abs_diff\n");
            for ((t, v), w) in out.series.scaled_t.iter().zip(&out.series.value).zip(&o.value) {
                let _ = writeln!(s, "{t:.16e},{v:.16e},{w:.16e},{:.16e}", (v - w).abs());
            }
        }
    }
    s
}

/// Line plot of the series against scaled time.
pub fn svg(out: &ObservableOutput) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const M: f64 = 50.0;
    let series = &out.series;
    let (y0, y1) = match out.observable {
        Observable::Inversion => (-1.0, 1.0),
        _ => {
            let (lo, hi) = (series.min(), series.max());
            let pad = if hi > lo {
                0.05 * (hi - lo)
            } else {
                0.5 * lo.abs().max(1e-12)
            };
            (lo - pad, hi + pad)
        }
    };
    let t_max = series
        .scaled_t
        .last()
        .copied()
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let x = |t: f64| M + (W - 2.0 * M) * t / t_max;
    let y = |v: f64| H - M - (H - 2.0 * M) * (v - y0) / (y1 - y0);
    let polyline = |values: &[f64]| {
        let mut pts = String::new();
        for (t, v) in series.scaled_t.iter().zip(values) {
            let _ = write!(pts, "{:.2},{:.2} ", x(*t), y(*v));
        }
        pts.trim_end().to_owned()
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{M}" y="{M}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        W - 2.0 * M,
        H - 2.0 * M
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{M}" x2="{}" y1="{:.2}" y2="{:.2}" stroke="#bbbbbb"/>"##,
            W - M,
            y(0.0),
            y(0.0)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        W / 2.0,
        M - 15.0,
        series.name
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">lambda t</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{M}" y="{}" text-anchor="middle">0</text>"#,
        H - M + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{t_max}</text>"#,
        W - M,
        H - M + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{y0:.4e}</text>"#,
        M - 4.0,
        H - M
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{y1:.4e}</text>"#,
        M - 4.0,
        M + 10.0
    );
    if let Some(o) = &out.oracle {
        let _ = writeln!(
            s,
            r##"<polyline points="{}" fill="none" stroke="#d62728" stroke-width="1" stroke-dasharray="4 3"/>"##,
            polyline(&o.value)
        );
    }
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##,
        polyline(&series.value)
    );
    s.push_str("</svg>\n");
    s
}

/// Resolved parameters as a configuration that reproduces the run.
pub fn manifest(run: &ResolvedRun) -> String {
    let mut table = Table::new();
    table.insert("code_version".into(), Value::String(CODE_VERSION.into()));
    table.insert("mode".into(), Value::String(run.mode.name().into()));
    table.insert(
        "outputs".into(),
        Value::Array(
            run.outputs
                .iter()
                .map(|o| Value::String(o.name().into()))
                .collect(),
        ),
    );
    table.extend(run.physics.to_table());
    let mut s = String::from("# Resolved parameters of an fdjc run. Load with `fdjc run --config`.\n");
    s.push_str(&toml::to_string(&table).expect("manifest serializes"));
    s
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf, RunError> {
    fs::write(&path, contents).map_err(|source| RunError::Write {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub outputs: Vec<ObservableOutput>,
}

/// Simulates `run` and writes CSV, SVG and manifest files into `out_dir`.
pub fn run(run: &ResolvedRun, out_dir: &Path, threads: Option<usize>) -> Result<RunReport, RunError> {
    let outputs = simulate(run, threads)?;
    fs::create_dir_all(out_dir).map_err(|source| RunError::Write {
        path: out_dir.to_owned(),
        source,
    })?;
    let mut files = Vec::new();
    for out in &outputs {
        let name = out.observable.name();
        files.push(write(out_dir.join(format!("{name}.csv")), &csv(out))?);
        files.push(write(out_dir.join(format!("{name}.svg")), &svg(out))?);
    }
    files.push(write(out_dir.join(MANIFEST_FILE), &manifest(run))?);
    Ok(RunReport {
        out_dir: out_dir.to_owned(),
        files,
        outputs,
    })
}

/// Runs every point of the configuration's `[sweep]` table into its own
/// `key=value` sub-directory of `out_dir`.
pub fn sweep(cfg: &RunConfig, out_dir: &Path, threads: Option<usize>) -> Result<Vec<RunReport>, RunError> {
    let points = cfg.sweep_points()?;
    points
        .iter()
        .map(|(dir, point)| run(point, &out_dir.join(dir), threads))
        .collect()
}

/// One row of the algebra verification table.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub spec: String,
    pub check: &'static str,
    pub residual: f64,
    pub passed: bool,
}

pub const VERIFY_TOL: f64 = 1e-10;

/// Truncated-matrix checks of the deformed algebra for representative
/// deformations. A check that cannot be evaluated counts as failed.
pub fn verify(dim: usize) -> Vec<VerifyRow> {
    let specs = [
        ("identity", DeformationSpec::Identity),
        ("q=1.04", DeformationSpec::QType { q: 1.04 }),
        ("kerr=0.05", DeformationSpec::Kerr { kappa: 0.05 }),
    ];
    type Check = fn(&DeformationSpec, usize) -> Result<f64, fdjc_core::deformation::DeformationError>;
    let checks: [(&str, Check); 3] = [
        ("commutator", verify_deformed_commutator),
        ("su2", verify_su2_deformed),
        ("constant_of_motion", verify_constant_of_motion),
    ];
    let mut rows = Vec::new();
    for (label, spec) in &specs {
        for (check, f) in &checks {
            let residual = f(spec, dim).unwrap_or(f64::NAN);
            rows.push(VerifyRow {
                spec: (*label).to_owned(),
                check,
                residual,
                passed: residual <= VERIFY_TOL,
            });
        }
    }
    rows
}

pub fn verify_table(rows: &[VerifyRow]) -> String {
    let mut s = format!("{:<12} {:<20} {:>12}  result\n", "spec", "check", "residual");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<12} {:<20} {:>12.3e}  {}",
            r.spec,
            r.check,
            r.residual,
            if r.passed { "PASS" } else { "FAIL" }
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_run(extra: &str) -> ResolvedRun {
        let text = format!("preset = \"fig1b\"\np_nodes = 3\nt_points = 21\nt_max_scaled = 2.0\n{extra}");
        parse_config(&text, "test").unwrap().resolve().unwrap()
    }

    #[test]
    fn parallel_matches_sequential() {
        let params = small_run("").physics.model_params().unwrap();
        let seq = fdjc_core::dynamics::evolve_state(&params, EvolutionMode::ClosedForm).unwrap();
        for threads in [None, Some(1), Some(3)] {
            assert_eq!(evolve(&params, EvolutionMode::ClosedForm, threads).unwrap(), seq);
        }
    }

    #[test]
    fn csv_layout() {
        let run = small_run("mode = \"both\"\noutputs = [\"W\", \"G2\"]\n");
        let outputs = simulate(&run, Some(1)).unwrap();
        assert_eq!(outputs.len(), 2);
        let text = csv(&outputs[0]);
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "scaled_t,value,value_oracle,abs_diff");
        assert_eq!(lines.len(), 21 + 2);
        assert_eq!(lines[22], "");
        assert!(!text.contains('\r'));
        let row: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(row.len(), 4);
        assert_eq!(row[0], "0.0000000000000000e0");
        let mantissa = row[1].split('e').next().unwrap();
        assert_eq!(mantissa.trim_start_matches('-').replace('.', "").len(), 17);
        for out in &outputs {
            assert!(out.max_abs_diff().unwrap() < 1e-6);
        }
    }

    #[test]
    fn manifest_reproduces_run() {
        let run = small_run("outputs = [\"F_y\"]\nc_e = [0.6, 0.0]\nc_g = [0.0, 0.8]\n");
        let text = manifest(&run);
        let back = parse_config(&text, "manifest").unwrap();
        assert_eq!(back.preset, None);
        assert_eq!(
            back.resolve().unwrap(),
            ResolvedRun {
                preset: None,
                ..run.clone()
            }
        );
        assert_eq!(manifest(&back.resolve().unwrap()), text);
    }

    #[test]
    fn inversion_plot_has_fixed_axis() {
        let run = small_run("outputs = [\"W\", \"delta_p\"]\n");
        let outputs = simulate(&run, None).unwrap();
        let w = svg(&outputs[0]);
        assert!(w.starts_with("<svg") && w.ends_with("</svg>\n"));
        assert!(w.contains("-1.0000e0") && w.contains("1.0000e0"));
        let dp = svg(&outputs[1]);
        assert!(!dp.contains("-1.0000e0"));
    }

    #[test]
    fn verification_passes() {
        let rows = verify(20);
        assert_eq!(rows.len(), 9);
        assert!(rows.iter().all(|r| r.passed), "{}", verify_table(&rows));
        assert!(verify_table(&rows).lines().count() == 10);
    }
}
