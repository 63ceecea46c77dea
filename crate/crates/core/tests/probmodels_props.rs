use std::f64::consts::PI;

use oamfid_core::probmodels::{
    default_truncation, efficiency_zero_probability, fock_oracle_probability,
    lossy_zero_probability, outcome_probability,
};
use oamfid_core::{InterferometerConfig, Strategy};
use proptest::prelude::*;

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop_oneof![Just(Strategy::Z), Just(Strategy::Parity)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn outcomes_are_complementary(s in strategy(), theta in -PI..PI, n in 0.0..50.0f64, l in 1u32..8) {
        let c = InterferometerConfig::new(n, l).unwrap();
        let [a, b] = s.outcomes();
        let pa = outcome_probability(s, a, theta, &c).unwrap();
        let pb = outcome_probability(s, b, theta, &c).unwrap();
        prop_assert!((pa + pb - 1.0).abs() < 1e-14);
        prop_assert!((0.0..=1.0).contains(&pa) && (0.0..=1.0).contains(&pb));
    }

    #[test]
    fn dark_outcome_ranges(theta in -PI..PI, n in 0.0..30.0f64, l in 1u32..8) {
        let c = InterferometerConfig::new(n, l).unwrap();
        let z = outcome_probability(Strategy::Z, oamfid_core::Outcome::Zero, theta, &c).unwrap();
        prop_assert!(z >= (-n).exp() - 1e-15 && z <= 1.0);
        let e = outcome_probability(Strategy::Parity, oamfid_core::Outcome::Even, theta, &c).unwrap();
        prop_assert!(e >= 0.5 * (1.0 + (-2.0 * n).exp()) - 1e-15 && e <= 1.0);
    }

    #[test]
    fn periodic_and_even(s in strategy(), theta in -PI..PI, n in 0.0..20.0f64, l in 1u32..6) {
        let c = InterferometerConfig::new(n, l).unwrap();
        for o in s.outcomes() {
            let p = outcome_probability(s, o, theta, &c).unwrap();
            let shifted = outcome_probability(s, o, theta + PI / f64::from(l), &c).unwrap();
            let mirrored = outcome_probability(s, o, -theta, &c).unwrap();
            prop_assert!((p - shifted).abs() < 1e-14, "period: {} vs {}", p, shifted);
            prop_assert!((p - mirrored).abs() < 1e-14);
        }
    }

    #[test]
    fn equal_loss_equals_efficiency(theta in -PI..PI, n in 0.0..50.0f64, l in 1u32..8, t in 0.001..1.0f64) {
        let c = InterferometerConfig::new(n, l).unwrap();
        let lossy = lossy_zero_probability(theta, &c, t, t).unwrap();
        let eff = efficiency_zero_probability(theta, &c, t).unwrap();
        prop_assert!((lossy - eff).abs() < 1e-14);
    }

    #[test]
    fn lossy_is_symmetric_in_paths(theta in -PI..PI, n in 0.0..20.0f64, l in 1u32..6, ta in 0.0..=1.0f64, tb in 0.0..=1.0f64) {
        let c = InterferometerConfig::new(n, l).unwrap();
        let ab = lossy_zero_probability(theta, &c, ta, tb).unwrap();
        let ba = lossy_zero_probability(theta, &c, tb, ta).unwrap();
        prop_assert!((ab - ba).abs() < 1e-15);
    }

    #[test]
    fn fock_oracle_matches_closed_forms(s in strategy(), theta in -PI..PI, n in 0.0..=20.0f64, l in 1u32..=5) {
        let c = InterferometerConfig::new(n, l).unwrap();
        for o in s.outcomes() {
            let closed = outcome_probability(s, o, theta, &c).unwrap();
            let oracle = fock_oracle_probability(s, o, theta, &c, default_truncation(n)).unwrap();
            prop_assert!((closed - oracle).abs() < 1e-10, "{} {} {}: {} vs {}", s, o, theta, closed, oracle);
        }
    }
}
