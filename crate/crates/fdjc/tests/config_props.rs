use fdjc::config::{parse_config, Observable};
use fdjc::driver::manifest;
use proptest::prelude::*;

fn observables() -> impl Strategy<Value = Vec<Observable>> {
    proptest::sample::subsequence(Observable::ALL.to_vec(), 1..=Observable::ALL.len())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn manifest_round_trips_exactly(
        lambda_c in 1e3f64..1e7,
        kg in prop_oneof![Just(0.0), 0.0f64..1e9],
        delta in -1e8f64..1e8,
        q in 0.5f64..1.5,
        theta in 0.0f64..std::f64::consts::TAU,
        t_points in 2usize..5000,
        outputs in observables(),
    ) {
        let names: Vec<String> = outputs.iter().map(|o| format!("\"{o}\"")).collect();
        let text = format!(
            "preset = \"fig3b\"\nlambda_c = {lambda_c:e}\nkg = {kg:e}\ndelta_k_bar = {delta:e}\nq = {q:e}\n\
             c_e = [{:e}, 0.0]\nc_g = [0.0, {:e}]\nt_points = {t_points}\noutputs = [{}]\n",
            theta.cos(), theta.sin(), names.join(", "),
        );
        let run = parse_config(&text, "generated").unwrap().resolve().unwrap();
        prop_assert_eq!(run.physics.lambda_c, lambda_c);
        prop_assert_eq!(run.physics.q, Some(q));
        let written = manifest(&run);
        let back = parse_config(&written, "manifest").unwrap().resolve().unwrap();
        prop_assert_eq!(&back.physics, &run.physics);
        prop_assert_eq!(&back.outputs, &run.outputs);
        prop_assert_eq!(manifest(&back), written);
    }

    #[test]
    fn misspelled_keys_are_rejected_with_a_suggestion(idx in 0usize..fdjc::config::PHYSICS_KEYS.len(), cut in 0usize..8) {
        let key = fdjc::config::PHYSICS_KEYS[idx].0;
        prop_assume!(key.len() >= 4);
        let pos = cut % key.len();
        let typo: String = key.chars().enumerate().filter(|(i, _)| *i != pos).map(|(_, c)| c).collect();
        prop_assume!(fdjc::config::PHYSICS_KEYS.iter().all(|(k, _)| *k != typo));
        let err = parse_config(&format!("preset = \"fig1a\"\n{typo} = 1\n"), "t").unwrap_err();
        match err {
            fdjc::ConfigError::UnknownKey { line, suggestion, .. } => {
                prop_assert_eq!(line, Some(2));
                prop_assert!(suggestion.is_some());
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }
}
