use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xlc_explain::oracle::entails_adversarial;
use xlc_explain::synth::{
    all_instances, random_categorical, random_instance, random_mixed, random_nbc,
};
use xlc_explain::*;

/// Independent brute force over a problem: every subset whose deltas cover
/// phi while no single removal does.
fn brute_force(deltas: &[f64], phi: f64, strict: bool) -> BTreeSet<Vec<usize>> {
    let n = deltas.len();
    let covers = |s: f64| if strict { s > phi } else { s >= phi };
    let mut out = BTreeSet::new();
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        let total: f64 = members.iter().map(|&j| deltas[j]).sum();
        if covers(total) && members.iter().all(|&j| !covers(total - deltas[j])) {
            out.insert(members);
        }
    }
    out
}

fn enumerated(problem: &ExplanationProblem) -> Vec<Vec<usize>> {
    enumerate(problem, None)
        .map(PiExplanation::into_features)
        .collect()
}

fn model_strategy(max_n: usize, max_domain: usize) -> impl Strategy<Value = (XlcModel, Instance)> {
    (0..=max_n, any::<u64>()).prop_map(move |(n, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_categorical(&mut rng, n, max_domain, 10.0);
        let x = random_instance(&mut rng, &m);
        (m, x)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    // Integer deltas keep every sum exact, so ties and boundaries are
    // exercised heavily without rounding ambiguity.
    #[test]
    fn enumeration_matches_brute_force_on_integer_deltas(
        deltas in prop::collection::vec(0u8..6, 0..11),
        phi_twice in -4i32..40,
        strict in any::<bool>(),
    ) {
        let deltas: Vec<f64> = deltas.into_iter().map(f64::from).collect();
        let phi = f64::from(phi_twice) / 2.0;
        let problem = ExplanationProblem::from_deltas(deltas.clone(), phi, strict).unwrap();
        let got = enumerated(&problem);
        let unique: BTreeSet<Vec<usize>> = got.iter().cloned().collect();
        prop_assert_eq!(unique.len(), got.len(), "duplicate explanation");
        let expected = brute_force(&deltas, phi, strict);
        prop_assert_eq!(&unique, &expected);
        match find_one(&problem) {
            Ok(first) => {
                prop_assert_eq!(first.features(), got[0].as_slice());
                let min = expected.iter().map(Vec::len).min().unwrap();
                prop_assert_eq!(first.cardinality(), min);
            }
            Err(Error::Infeasible) => prop_assert!(expected.is_empty()),
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error {e}"))),
        }
    }

    #[test]
    fn every_admitted_node_reaches_a_leaf(
        deltas in prop::collection::vec(0u8..6, 0..11),
        phi_twice in -4i32..40,
        strict in any::<bool>(),
    ) {
        let deltas: Vec<f64> = deltas.into_iter().map(f64::from).collect();
        let phi = f64::from(phi_twice) / 2.0;
        let problem = ExplanationProblem::from_deltas(deltas, phi, strict).unwrap();
        let mut state = EnumerationState::new(&problem);
        if !(state.admits_leaf(&problem) || state.is_leaf(&problem)) {
            return Ok(());
        }
        let mut leaves = 0usize;
        loop {
            prop_assert!(state.descend(&problem), "admitted node without a leaf");
            leaves += 1;
            let picked: Vec<usize> = state
                .picked_positions()
                .map(|r| problem.search_order()[r])
                .collect();
            prop_assert!(problem.is_explanation(&picked));
            if backtrack_to_valid(&mut state, &problem) == Step::Exhausted {
                break;
            }
            prop_assert!(state.admits_leaf(&problem));
        }
        prop_assert_eq!(leaves, enumerate(&problem, None).count());
    }

    #[test]
    fn enumeration_matches_oracle_on_categorical_models((model, instance) in model_strategy(8, 4)) {
        let problem = ExplanationProblem::derive(&model, &instance).unwrap();
        let got = enumerated(&problem);
        let oracle = all_minimal_explanations(&model, &instance).unwrap();
        let unique: BTreeSet<Vec<usize>> = got.iter().cloned().collect();
        prop_assert_eq!(unique.len(), got.len());
        prop_assert_eq!(unique, oracle.all_minimal.clone());
        prop_assert_eq!(got[0].len(), oracle.min_cardinality);
    }

    #[test]
    fn enumeration_matches_oracle_on_mixed_models(seed in any::<u64>(), n in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_mixed(&mut rng, n, 3, 10.0);
        let instance = random_instance(&mut rng, &model);
        let problem = ExplanationProblem::derive(&model, &instance).unwrap();
        let got: BTreeSet<Vec<usize>> = enumerated(&problem).into_iter().collect();
        let oracle = all_minimal_explanations(&model, &instance).unwrap();
        prop_assert_eq!(got, oracle.all_minimal);
    }

    #[test]
    fn delta_route_agrees_with_entailment((model, instance) in model_strategy(6, 3), mask in any::<u8>()) {
        let problem = ExplanationProblem::derive(&model, &instance).unwrap();
        let subset: Vec<usize> = (0..model.num_features()).filter(|j| mask >> j & 1 == 1).collect();
        let by_deltas = problem.is_sufficient(&subset);
        prop_assert_eq!(by_deltas, entails(&model, &instance, &subset).unwrap());
        prop_assert_eq!(by_deltas, entails_adversarial(&model, &instance, &subset).unwrap());
    }

    #[test]
    fn phi_plus_gamma_is_delta_sum((model, instance) in model_strategy(10, 4)) {
        let p = ExplanationProblem::derive(&model, &instance).unwrap();
        let total = p.deltas().iter().fold(0.0, |acc, d| acc + d);
        prop_assert_eq!(p.phi(), total - p.gamma());
        prop_assert!(p.deltas().iter().all(|&d| d >= 0.0));
        let sorted = p.order().windows(2).all(|w| {
            let (a, b) = (p.deltas()[w[0]], p.deltas()[w[1]]);
            a > b || (a == b && w[0] < w[1])
        });
        prop_assert!(sorted);
        if p.target() == ClassLabel::Plus {
            prop_assert!(p.gamma() > 0.0);
        }
    }

    #[test]
    fn shifting_a_value_table_keeps_explanations(
        (model, instance) in model_strategy(6, 3),
        which in any::<prop::sample::Index>(),
        shift in -4i32..4,
    ) {
        prop_assume!(model.num_features() > 0);
        let j = which.index(model.num_features());
        let shift = f64::from(shift);
        let mut features = model.features().to_vec();
        if let Feature::Categorical { values } = &mut features[j] {
            values.iter_mut().for_each(|v| *v += shift);
        }
        // compensate in the bias so the decision boundary stays put
        let shifted = XlcModel::new(model.bias() - shift, features).unwrap();
        let a = ExplanationProblem::derive(&model, &instance).unwrap();
        let b = ExplanationProblem::derive(&shifted, &instance).unwrap();
        prop_assume!(a.target() == b.target());
        let sa: BTreeSet<_> = enumerated(&a).into_iter().collect();
        let sb: BTreeSet<_> = enumerated(&b).into_iter().collect();
        prop_assert_eq!(sa, sb);
    }

    #[test]
    fn explanations_survive_every_completion(seed in any::<u64>(), n in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_categorical(&mut rng, n, 3, 10.0);
        let instance = random_instance(&mut rng, &model);
        let problem = ExplanationProblem::derive(&model, &instance).unwrap();
        for e in enumerate(&problem, None) {
            prop_assert!(entails(&model, &instance, e.features()).unwrap());
            for &drop in e.features() {
                let smaller: Vec<usize> = e.features().iter().copied().filter(|&j| j != drop).collect();
                prop_assert!(!entails(&model, &instance, &smaller).unwrap());
            }
        }
    }

    #[test]
    fn nbc_routes_agree(seed in any::<u64>(), n in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nbc = random_nbc(&mut rng, n, 3, true);
        let xlc = nbc.reduce_to_xlc();
        let domains: Vec<usize> = nbc.features().iter().map(|f| f.domain).collect();
        for x in all_instances(&domains) {
            let p = nbc.predict(&x).unwrap();
            prop_assert_eq!(p, xlc.decide(&x).unwrap());
            prop_assert_eq!(p, nbc_predict_direct(&nbc, &x).unwrap());
        }
    }

    #[test]
    fn threshold_cancels_exactly(seed in any::<u64>(), extra in 0.0f64..1e3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nbc = random_nbc(&mut rng, 5, 3, false);
        let shifted = nbc.with_constants(nbc.big_m(), nbc.threshold() + extra).unwrap();
        prop_assert_eq!(nbc.reduce_to_xlc(), shifted.reduce_to_xlc());
    }
}

#[test]
fn negated_model_flips_every_off_boundary_decision() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let m = random_categorical(&mut rng, 5, 3, 10.0);
        let neg = m.negated();
        let domains: Vec<usize> = m
            .features()
            .iter()
            .map(|f| match f.spec() {
                FeatureSpec::Categorical { domain_size } => domain_size,
                FeatureSpec::Real { .. } => unreachable!(),
            })
            .collect();
        for x in all_instances(&domains) {
            if m.evaluate(&x).unwrap() != 0.0 {
                assert_eq!(neg.decide(&x).unwrap(), m.decide(&x).unwrap().opposite());
            }
        }
    }
}

#[test]
fn boundary_instance_is_explained_as_minus() {
    // score exactly 0 at the instance: the `-` class must hold for every
    // completion of the free features, including those scoring exactly 0.
    let m = XlcModel::categorical(-3.0, vec![vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
    let x = Instance::new(vec![1.0, 2.0]);
    assert_eq!(m.evaluate(&x).unwrap(), 0.0);
    let p = ExplanationProblem::derive(&m, &x).unwrap();
    assert_eq!(p.target(), ClassLabel::Minus);
    let got: BTreeSet<Vec<usize>> = enumerated(&p).into_iter().collect();
    assert_eq!(got, all_minimal_explanations(&m, &x).unwrap().all_minimal);
    assert_eq!(got, [vec![0]].into_iter().collect());
}
