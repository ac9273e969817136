//! Run configuration files.
//!
//! A configuration is a flat TOML document. Run-level keys select a preset,
//! the observables to write and the solver; every other key overrides one
//! physical parameter. Without a preset all required physical keys must be
//! present. A `[sweep]` table maps physical keys to lists of values for the
//! `sweep` subcommand.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use fdjc_core::deformation::{q_coherent_weights, DeformationSpec, PhotonWeights};
use fdjc_core::dynamics::{DynamicsError, EvolutionMode, ModelParams, OracleControl};
use fdjc_core::specialfn::SeriesControl;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{nearest, ConfigError};
use crate::presets;

/// Physical keys with their meaning and units.
pub const PHYSICS_KEYS: &[(&str, &str)] = &[
    ("lambda_c", "atom-field coupling lambda (rad/s)"),
    ("delta_k_bar", "detuning Delta_k of an atom at rest (rad/s)"),
    ("kg", "gravity parameter k.g (1/s^2)"),
    ("nu", "cavity mode frequency nu (rad/s)"),
    ("omega", "atomic transition frequency omega (rad/s)"),
    (
        "recoil_rate",
        "Doppler shift per recoil momentum, hbar k^2 / M (rad/s)",
    ),
    ("c_e", "initial excited amplitude, a number or [re, im]"),
    ("c_g", "initial ground amplitude, a number or [re, im]"),
    (
        "deformation",
        "nonlinearity f(n): \"identity\", \"q\" or \"kerr\"",
    ),
    ("q", "deformation parameter q, with deformation = \"q\""),
    ("kappa", "Kerr parameter kappa, with deformation = \"kerr\""),
    ("alpha", "amplitude alpha of the initial nonlinear coherent state"),
    (
        "tail_tol",
        "photon-number probability dropped from the initial field",
    ),
    ("fock_n", "start the field in the number state |fock_n> instead"),
    ("p_nodes", "Gauss-Hermite nodes of the momentum distribution"),
    ("t_max_scaled", "final scaled time lambda t"),
    ("t_points", "uniformly spaced samples of lambda t, including 0"),
    ("series_max_terms", "term limit of the hypergeometric series"),
    ("series_abs_tol", "absolute truncation tolerance of the series"),
    ("series_rel_tol", "relative truncation tolerance of the series"),
    ("oracle_phase_step", "first RK4 step times the fastest block rate"),
    (
        "oracle_halving_tol",
        "step-halving acceptance threshold of the RK4 reference",
    ),
    (
        "oracle_max_halvings",
        "step halvings tried before the RK4 reference gives up",
    ),
];

const RUN_KEYS: &[&str] = &["preset", "mode", "outputs", "out_dir", "code_version", "sweep"];

fn all_keys() -> impl Iterator<Item = &'static str> {
    RUN_KEYS
        .iter()
        .copied()
        .chain(PHYSICS_KEYS.iter().map(|(k, _)| *k))
}

fn is_physics_key(key: &str) -> bool {
    PHYSICS_KEYS.iter().any(|(k, _)| *k == key)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "W")]
    Inversion,
    #[serde(rename = "sigma_x")]
    SigmaX,
    #[serde(rename = "sigma_y")]
    SigmaY,
    #[serde(rename = "F_x")]
    DipoleSqueezingX,
    #[serde(rename = "F_y")]
    DipoleSqueezingY,
    #[serde(rename = "delta_p")]
    MomentumSpread,
    #[serde(rename = "G2")]
    G2,
    #[serde(rename = "S1")]
    S1,
    #[serde(rename = "S2")]
    S2,
    #[serde(rename = "xi")]
    Xi,
}

impl Observable {
    pub const ALL: [Observable; 10] = [
        Self::Inversion,
        Self::SigmaX,
        Self::SigmaY,
        Self::DipoleSqueezingX,
        Self::DipoleSqueezingY,
        Self::MomentumSpread,
        Self::G2,
        Self::S1,
        Self::S2,
        Self::Xi,
    ];

    /// Name used in configuration files and output file names.
    pub fn name(self) -> &'static str {
        match self {
            Self::Inversion => "W",
            Self::SigmaX => "sigma_x",
            Self::SigmaY => "sigma_y",
            Self::DipoleSqueezingX => "F_x",
            Self::DipoleSqueezingY => "F_y",
            Self::MomentumSpread => "delta_p",
            Self::G2 => "G2",
            Self::S1 => "S1",
            Self::S2 => "S2",
            Self::Xi => "xi",
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| ConfigError::UnknownObservable {
                name: s.to_owned(),
                suggestion: nearest(s, Self::ALL.iter().map(|o| o.name())),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    ClosedForm,
    Oracle,
    /// Closed form and oracle side by side.
    Both,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::ClosedForm => "closed_form",
            Self::Oracle => "oracle",
            Self::Both => "both",
        }
    }

    /// Solver whose results fill the `value` column.
    pub fn primary(self) -> EvolutionMode {
        match self {
            Self::Oracle => EvolutionMode::Oracle,
            Self::ClosedForm | Self::Both => EvolutionMode::ClosedForm,
        }
    }
}

impl FromStr for Mode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "closed_form" => Ok(Self::ClosedForm),
            "oracle" => Ok(Self::Oracle),
            "both" => Ok(Self::Both),
            _ => Err(ConfigError::invalid(
                "mode",
                "expected closed_form, oracle or both",
            )),
        }
    }
}

/// Fully resolved physical parameters, in the same vocabulary as the
/// configuration file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicsConfig {
    pub lambda_c: f64,
    pub delta_k_bar: f64,
    pub kg: f64,
    pub nu: f64,
    pub omega: f64,
    pub recoil_rate: f64,
    pub c_e: [f64; 2],
    pub c_g: [f64; 2],
    pub deformation: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock_n: Option<usize>,
    pub p_nodes: usize,
    pub t_max_scaled: f64,
    pub t_points: usize,
    pub series_max_terms: usize,
    pub series_abs_tol: f64,
    pub series_rel_tol: f64,
    pub oracle_phase_step: f64,
    pub oracle_halving_tol: f64,
    pub oracle_max_halvings: u32,
}

fn number(table: &Table, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Float(x)) => Ok(Some(*x)),
        Some(Value::Integer(i)) => Ok(Some(*i as f64)),
        Some(_) => Err(ConfigError::invalid(key, "expected a number")),
    }
}

fn count(table: &Table, key: &str) -> Result<Option<usize>, ConfigError> {
    match table.get(key) {
        None => Ok(None),
        Some(Value::Integer(i)) if *i >= 0 => Ok(Some(*i as usize)),
        Some(_) => Err(ConfigError::invalid(key, "expected a non-negative integer")),
    }
}

fn complex(table: &Table, key: &str) -> Result<Option<[f64; 2]>, ConfigError> {
    let as_f64 = |v: &Value| match v {
        Value::Float(x) => Some(*x),
        Value::Integer(i) => Some(*i as f64),
        _ => None,
    };
    match table.get(key) {
        None => Ok(None),
        Some(Value::Array(a)) if a.len() == 2 => match (as_f64(&a[0]), as_f64(&a[1])) {
            (Some(re), Some(im)) => Ok(Some([re, im])),
            _ => Err(ConfigError::invalid(key, "expected [re, im]")),
        },
        Some(v) => as_f64(v)
            .map(|re| Some([re, 0.0]))
            .ok_or_else(|| ConfigError::invalid(key, "expected a number or [re, im]")),
    }
}

fn required<T>(value: Option<T>, key: &str) -> Result<T, ConfigError> {
    value.ok_or_else(|| ConfigError::MissingKey { key: key.to_owned() })
}

impl PhysicsConfig {
    pub fn from_table(table: &Table) -> Result<Self, ConfigError> {
        let deformation = match table.get("deformation") {
            None => {
                return Err(ConfigError::MissingKey {
                    key: "deformation".into(),
                })
            }
            Some(Value::String(s)) if ["identity", "q", "kerr"].contains(&s.as_str()) => s.clone(),
            Some(_) => {
                return Err(ConfigError::invalid(
                    "deformation",
                    "expected \"identity\", \"q\" or \"kerr\"",
                ))
            }
        };
        let (q, kappa) = match deformation.as_str() {
            "q" => (Some(required(number(table, "q")?, "q")?), None),
            "kerr" => (None, Some(required(number(table, "kappa")?, "kappa")?)),
            _ => (None, None),
        };
        let fock_n = count(table, "fock_n")?;
        let (alpha, tail_tol) = if fock_n.is_some() {
            (None, None)
        } else {
            (
                Some(required(number(table, "alpha")?, "alpha")?),
                Some(required(number(table, "tail_tol")?, "tail_tol")?),
            )
        };
        let series = SeriesControl::default();
        let oracle = OracleControl::default();
        let halvings = count(table, "oracle_max_halvings")?.unwrap_or(oracle.max_halvings as usize);
        Ok(Self {
            lambda_c: required(number(table, "lambda_c")?, "lambda_c")?,
            delta_k_bar: required(number(table, "delta_k_bar")?, "delta_k_bar")?,
            kg: required(number(table, "kg")?, "kg")?,
            nu: required(number(table, "nu")?, "nu")?,
            omega: required(number(table, "omega")?, "omega")?,
            recoil_rate: required(number(table, "recoil_rate")?, "recoil_rate")?,
            c_e: required(complex(table, "c_e")?, "c_e")?,
            c_g: required(complex(table, "c_g")?, "c_g")?,
            deformation,
            q,
            kappa,
            alpha,
            tail_tol,
            fock_n,
            p_nodes: required(count(table, "p_nodes")?, "p_nodes")?,
            t_max_scaled: required(number(table, "t_max_scaled")?, "t_max_scaled")?,
            t_points: required(count(table, "t_points")?, "t_points")?,
            series_max_terms: count(table, "series_max_terms")?.unwrap_or(series.max_terms),
            series_abs_tol: number(table, "series_abs_tol")?.unwrap_or(series.abs_tol),
            series_rel_tol: number(table, "series_rel_tol")?.unwrap_or(series.rel_tol),
            oracle_phase_step: number(table, "oracle_phase_step")?.unwrap_or(oracle.initial_phase_step),
            oracle_halving_tol: number(table, "oracle_halving_tol")?.unwrap_or(oracle.halving_tol),
            oracle_max_halvings: u32::try_from(halvings)
                .map_err(|_| ConfigError::invalid("oracle_max_halvings", "too large"))?,
        })
    }

    pub fn to_table(&self) -> Table {
        Table::try_from(self).expect("physics parameters serialize to a table")
    }

    pub fn spec(&self) -> DeformationSpec {
        match self.deformation.as_str() {
            "q" => DeformationSpec::QType {
                q: self.q.unwrap_or(1.0),
            },
            "kerr" => DeformationSpec::Kerr {
                kappa: self.kappa.unwrap_or(0.0),
            },
            _ => DeformationSpec::Identity,
        }
    }

    pub fn model_params(&self) -> Result<ModelParams, DynamicsError> {
        if !(self.lambda_c > 0.0) {
            return Err(DynamicsError::InvalidParams(
                "lambda_c must be positive to sample scaled time",
            ));
        }
        if self.t_points < 2 || !(self.t_max_scaled > 0.0) {
            return Err(DynamicsError::InvalidParams(
                "need t_points >= 2 and t_max_scaled > 0",
            ));
        }
        let spec = self.spec();
        let weights = match self.fock_n {
            Some(n) => PhotonWeights::fock(n),
            None => q_coherent_weights(
                &spec,
                self.alpha.unwrap_or_default(),
                self.tail_tol.unwrap_or_default(),
            )?,
        };
        let params = ModelParams {
            lambda_c: self.lambda_c,
            delta_k_bar: self.delta_k_bar,
            kg: self.kg,
            nu: self.nu,
            omega: self.omega,
            recoil_rate: self.recoil_rate,
            c_e: Complex64::new(self.c_e[0], self.c_e[1]),
            c_g: Complex64::new(self.c_g[0], self.c_g[1]),
            weights,
            spec,
            p_nodes: self.p_nodes,
            t_grid: ModelParams::scaled_time_grid(self.lambda_c, self.t_max_scaled, self.t_points),
            tol: SeriesControl {
                max_terms: self.series_max_terms,
                abs_tol: self.series_abs_tol,
                rel_tol: self.series_rel_tol,
            },
            oracle: OracleControl {
                initial_phase_step: self.oracle_phase_step,
                halving_tol: self.oracle_halving_tol,
                max_halvings: self.oracle_max_halvings,
            },
        };
        params.validate()?;
        Ok(params)
    }
}

/// A parsed, not yet resolved, configuration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    pub preset: Option<String>,
    /// Physical keys set explicitly, in the file's vocabulary.
    pub overrides: Table,
    pub outputs: Option<Vec<Observable>>,
    pub out_dir: Option<PathBuf>,
    pub mode: Option<Mode>,
    /// Swept physical keys and their values, in file order of the keys' names.
    pub sweep: BTreeMap<String, Vec<Value>>,
}

/// Everything needed to run one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedRun {
    pub preset: Option<String>,
    pub physics: PhysicsConfig,
    pub outputs: Vec<Observable>,
    pub mode: Mode,
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key)
                .is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|i| i + 1)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |s| s.chars().count()) + 1;
    (line, col)
}

fn unknown_key(text: &str, key: &str) -> ConfigError {
    ConfigError::UnknownKey {
        key: key.to_owned(),
        line: line_of(text, key),
        suggestion: nearest(key, all_keys()),
    }
}

/// Parses configuration text. `origin` names the source in diagnostics.
pub fn parse_config(text: &str, origin: &str) -> Result<RunConfig, ConfigError> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = match e.span() {
            Some(span) => {
                let (l, c) = line_col(text, span.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        ConfigError::Parse {
            origin: origin.to_owned(),
            line,
            column,
            message: e.message().to_owned(),
        }
    })?;

    let mut cfg = RunConfig::default();
    for (key, value) in table {
        match key.as_str() {
            "preset" => match value {
                Value::String(s) => cfg.preset = Some(s),
                _ => return Err(ConfigError::invalid("preset", "expected a string")),
            },
            "mode" => match value {
                Value::String(s) => cfg.mode = Some(s.parse()?),
                _ => return Err(ConfigError::invalid("mode", "expected a string")),
            },
            "outputs" => {
                let Value::Array(items) = value else {
                    return Err(ConfigError::invalid("outputs", "expected a list of names"));
                };
                let outputs = items
                    .iter()
                    .map(|v| match v {
                        Value::String(s) => s.parse(),
                        _ => Err(ConfigError::invalid("outputs", "expected a list of names")),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                cfg.outputs = Some(outputs);
            }
            "out_dir" => match value {
                Value::String(s) => cfg.out_dir = Some(PathBuf::from(s)),
                _ => return Err(ConfigError::invalid("out_dir", "expected a path")),
            },
            // Written by run manifests; informational only.
            "code_version" => {}
            "sweep" => {
                let Value::Table(sweep) = value else {
                    return Err(ConfigError::invalid("sweep", "expected a table of value lists"));
                };
                for (k, v) in sweep {
                    if !is_physics_key(&k) {
                        return Err(unknown_key(text, &k));
                    }
                    match v {
                        Value::Array(values) if !values.is_empty() => {
                            cfg.sweep.insert(k, values);
                        }
                        _ => return Err(ConfigError::invalid(&k, "sweep values must be a non-empty list")),
                    }
                }
            }
            k if is_physics_key(k) => {
                cfg.overrides.insert(key, value);
            }
            _ => return Err(unknown_key(text, &key)),
        }
    }
    if let Some(name) = &cfg.preset {
        presets::preset(name)?;
    }
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}

impl RunConfig {
    /// Merges the preset, if any, with the overrides.
    pub fn resolve(&self) -> Result<ResolvedRun, ConfigError> {
        self.resolve_with(&Table::new())
    }

    /// Like [`resolve`](Self::resolve) with `extra` applied on top of the
    /// file's overrides.
    pub fn resolve_with(&self, extra: &Table) -> Result<ResolvedRun, ConfigError> {
        let (mut table, default_outputs) = match &self.preset {
            Some(name) => {
                let p = presets::preset(name)?;
                (p.physics.to_table(), Some(p.outputs.to_vec()))
            }
            None => (Table::new(), None),
        };
        for (k, v) in self.overrides.iter().chain(extra) {
            table.insert(k.clone(), v.clone());
        }
        let outputs = self
            .outputs
            .clone()
            .or(default_outputs)
            .ok_or_else(|| ConfigError::MissingKey {
                key: "outputs".into(),
            })?;
        Ok(ResolvedRun {
            preset: self.preset.clone(),
            physics: PhysicsConfig::from_table(&table)?,
            outputs,
            mode: self.mode.unwrap_or_default(),
        })
    }

    /// One resolved run per point of the Cartesian product of the sweep
    /// lists, with the relative directory `key=value/key=value/...` it is
    /// written to.
    pub fn sweep_points(&self) -> Result<Vec<(PathBuf, ResolvedRun)>, ConfigError> {
        let mut points: Vec<(PathBuf, Table)> = vec![(PathBuf::new(), Table::new())];
        for (key, values) in &self.sweep {
            let mut next = Vec::with_capacity(points.len() * values.len());
            for (dir, table) in &points {
                for v in values {
                    let mut table = table.clone();
                    table.insert(key.clone(), v.clone());
                    next.push((dir.join(format!("{key}={}", value_label(v))), table));
                }
            }
            points = next;
        }
        points
            .into_iter()
            .map(|(dir, extra)| Ok((dir, self.resolve_with(&extra)?)))
            .collect()
    }
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Float(x) => format!("{x:e}"),
        other => other.to_string(),
    }
}
