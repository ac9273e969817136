use fdjc_core::deformation::{q_coherent_weights, DeformationSpec};
use fdjc_core::dynamics::{evolve_state, EvolutionMode, ModelParams, OracleControl};
use fdjc_core::observables::{photon_distribution, population_inversion};
use fdjc_core::{Complex64, SeriesControl};
use proptest::prelude::*;

fn params(kg: f64, spec: DeformationSpec, delta: f64, theta: f64, alpha: f64) -> ModelParams {
    ModelParams {
        lambda_c: 1e5,
        delta_k_bar: delta,
        kg,
        nu: 1e7,
        omega: 1e7 + delta,
        recoil_rate: 1e6,
        c_e: Complex64::new(theta.cos(), 0.0),
        c_g: Complex64::new(0.0, theta.sin()),
        weights: q_coherent_weights(&spec, alpha, 1e-10).unwrap(),
        spec,
        p_nodes: 4,
        t_grid: ModelParams::scaled_time_grid(1e5, 10.0, 11),
        tol: SeriesControl::default(),
        oracle: OracleControl::default(),
    }
}

fn spec() -> impl Strategy<Value = DeformationSpec> {
    prop_oneof![
        Just(DeformationSpec::Identity),
        (0.9f64..1.08)
            .prop_filter("q != 1", |q| (q - 1.0).abs() > 1e-3)
            .prop_map(|q| DeformationSpec::QType { q }),
        (0.0f64..0.2).prop_map(|kappa| DeformationSpec::Kerr { kappa }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn closed_form_agrees_with_reference_and_conserves_probability(
        kg in prop_oneof![Just(0.0), 1e6f64..1e8],
        spec in spec(),
        delta in -3e7f64..3e7,
        theta in 0.0f64..std::f64::consts::FRAC_PI_2,
        alpha in 0.2f64..1.2,
    ) {
        let p = params(kg, spec, delta, theta, alpha);
        let closed = evolve_state(&p, EvolutionMode::ClosedForm).unwrap();
        let oracle = evolve_state(&p, EvolutionMode::Oracle).unwrap();
        let w_closed = population_inversion(&closed);
        let w_oracle = population_inversion(&oracle);
        for k in 0..closed.len() {
            prop_assert!((closed.norm(k) - 1.0).abs() < 1e-8);
            let total: f64 = photon_distribution(&closed, k).unwrap().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-8);
            prop_assert!((w_closed.value[k] - w_oracle.value[k]).abs() < 1e-6);
            for n in 0..=closed.n_max() {
                for j in 0..p.p_nodes {
                    prop_assert!((closed.psi1(n, j, k) - oracle.psi1(n, j, k)).norm() < 1e-6);
                    prop_assert!((closed.psi2(n + 1, j, k) - oracle.psi2(n + 1, j, k)).norm() < 1e-6);
                }
            }
        }
    }
}

#[test]
fn invalid_parameters_are_rejected_before_evolving() {
    let mut p = params(2e7, DeformationSpec::Identity, 0.0, 0.3, 0.5);
    p.c_e = Complex64::new(1.0, 0.0);
    assert!(evolve_state(&p, EvolutionMode::ClosedForm).is_err());
    let mut p = params(2e7, DeformationSpec::Identity, 0.0, 0.3, 0.5);
    p.t_grid = vec![0.0, 1e-5, 1e-5];
    assert!(evolve_state(&p, EvolutionMode::Oracle).is_err());
    let mut p = params(2e7, DeformationSpec::Identity, 0.0, 0.3, 0.5);
    p.kg = -1.0;
    assert!(evolve_state(&p, EvolutionMode::ClosedForm).is_err());
}
