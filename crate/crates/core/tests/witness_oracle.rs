mod common;

use chemotaxis_core::witness::gn_exponents;
use chemotaxis_core::{find_exponent_witness, validate_params, ModelParams};
use proptest::prelude::*;

#[test]
fn base_case_witness() {
    let p = ModelParams::default();
    let w = find_exponent_witness(&p).unwrap();
    assert_eq!((w.p, w.eta, w.sigma1, w.sigma2, w.sigma3, w.sigma4), (3.0, 1.0, 4.0, 4.0, -1.0, -1.0));
    assert_eq!((w.theta1, w.theta2, w.theta3, w.kappa), (0.5, 0.5, 2.0, 1.0));
    assert!(common::witness_violations(&p, &w).is_empty());
}

#[test]
fn two_dimensional_mixed_case() {
    let p = ModelParams {
        m: 1.5,
        q: 1.0,
        r: 0.5,
        k1: 1.5,
        k2: 3.0,
        n: 2,
        ..ModelParams::default()
    };
    let w = find_exponent_witness(&p).unwrap();
    assert_eq!(w.eta, 2.0);
    let bad = common::witness_violations(&p, &w);
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn boundary_cases_refused() {
    for p in [
        ModelParams { q: 2.0, ..ModelParams::default() },
        ModelParams { k1: 1.0, ..ModelParams::default() },
    ] {
        assert!(!validate_params(&p).in_regime);
        assert!(find_exponent_witness(&p).is_err());
    }
}

#[test]
fn gn_examples() {
    assert_eq!(gn_exponents(3.0, 1.0, 1).unwrap(), (0.5, 0.5, 2.0));
    let (t1, _, t3) = gn_exponents(2.0, 1.0, 2).unwrap();
    assert_eq!((t1, t3), (0.5, 2.0));
    assert!(gn_exponents(1.0, 1.0, 1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]
    #[test]
    fn every_regime_witness_passes_the_checker(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = common::sample_regime_params(&mut rng);
        let w = find_exponent_witness(&p).unwrap();
        let bad = common::witness_violations(&p, &w);
        prop_assert!(bad.is_empty(), "{:?}: {:?}", p, bad);
    }
}
