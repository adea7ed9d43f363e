mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn skolem_functions_witness_the_quantifier(seed in any::<u64>()) {
        prop_assert_eq!(skolem_holds(seed), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn zielonka_matches_strategy_enumeration(seed in any::<u64>()) {
        prop_assert_eq!(zielonka_agrees(seed), Ok(()));
    }
}
