//! Figure presets `fig1a` through `fig5c`.
//!
//! All presets share one atom, cavity and field. The figure number selects
//! the observable and the letter selects the gravity strength.

use fdjc_core::dynamics::OracleControl;
use fdjc_core::specialfn::SeriesControl;

use crate::config::{Observable, PhysicsConfig};
use crate::error::{nearest, ConfigError};

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub physics: PhysicsConfig,
    pub outputs: &'static [Observable],
}

/// `k.g` in 1/s^2 for the letters a, b and c.
pub const KG_BY_LETTER: [(char, f64); 3] = [('a', 0.0), ('b', 2e7), ('c', 8e7)];

const FIGURES: [(char, &[Observable]); 5] = [
    ('1', &[Observable::Inversion]),
    ('2', &[Observable::DipoleSqueezingY]),
    ('3', &[Observable::MomentumSpread]),
    ('4', &[Observable::G2]),
    ('5', &[Observable::S2]),
];

/// Names of every preset in figure order.
pub fn names() -> Vec<String> {
    FIGURES
        .iter()
        .flat_map(|(fig, _)| KG_BY_LETTER.iter().map(move |(l, _)| format!("fig{fig}{l}")))
        .collect()
}

/// Shared parameters with the given gravity strength.
pub fn base_physics(kg: f64) -> PhysicsConfig {
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let series = SeriesControl::default();
    let oracle = OracleControl::default();
    PhysicsConfig {
        lambda_c: 1e5,
        delta_k_bar: 3e7,
        kg,
        nu: 1e7,
        omega: 4e7,
        // hbar k^2 / M with k = 1e7 1/m and M = 1e-26 kg.
        recoil_rate: 1.054571817e6,
        c_e: [amp, 0.0],
        c_g: [amp, 0.0],
        deformation: "q".into(),
        q: Some(1.04),
        kappa: None,
        alpha: Some(2.0),
        tail_tol: Some(1e-12),
        fock_n: None,
        p_nodes: 32,
        t_max_scaled: 25.0,
        t_points: 2001,
        series_max_terms: series.max_terms,
        series_abs_tol: series.abs_tol,
        series_rel_tol: series.rel_tol,
        oracle_phase_step: oracle.initial_phase_step,
        oracle_halving_tol: oracle.halving_tol,
        oracle_max_halvings: oracle.max_halvings,
    }
}

pub fn preset(name: &str) -> Result<Preset, ConfigError> {
    let unknown = || ConfigError::UnknownPreset {
        name: name.to_owned(),
        suggestion: nearest(name, names().iter().map(String::as_str)),
    };
    let rest = name.strip_prefix("fig").ok_or_else(unknown)?;
    let mut chars = rest.chars();
    let (Some(fig), Some(letter), None) = (chars.next(), chars.next(), chars.next()) else {
        return Err(unknown());
    };
    let outputs = FIGURES.iter().find(|(f, _)| *f == fig).ok_or_else(unknown)?.1;
    let kg = KG_BY_LETTER
        .iter()
        .find(|(l, _)| *l == letter)
        .ok_or_else(unknown)?
        .1;
    Ok(Preset {
        name: name.to_owned(),
        physics: base_physics(kg),
        outputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gravity_by_letter() {
        assert_eq!(preset("fig1a").unwrap().physics.kg, 0.0);
        assert_eq!(preset("fig1b").unwrap().physics.kg, 2e7);
        let c = preset("fig5c").unwrap();
        assert_eq!(c.physics.kg, 8e7);
        assert_eq!(c.outputs, [Observable::S2]);
    }

    #[test]
    fn registry_is_complete() {
        let all = names();
        assert_eq!(all.len(), 15);
        for name in &all {
            let p = preset(name).unwrap();
            let params = p.physics.model_params().unwrap();
            assert_eq!(params.n_max(), 22);
            assert_eq!(params.t_grid.len(), 2001);
            assert!((params.t_grid[2000] * params.lambda_c - 25.0).abs() < 1e-12);
            assert!((params.c_e.norm_sqr() + params.c_g.norm_sqr() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn unknown_names_are_rejected() {
        for bad in ["fig6a", "fig1d", "fig1", "fig1aa", "figure1a", ""] {
            assert!(
                matches!(preset(bad), Err(ConfigError::UnknownPreset { .. })),
                "{bad}"
            );
        }
        match preset("fig1") {
            Err(ConfigError::UnknownPreset { suggestion, .. }) => assert!(suggestion.is_some()),
            other => panic!("{other:?}"),
        }
    }
}
