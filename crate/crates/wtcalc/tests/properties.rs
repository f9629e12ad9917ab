//! Structural laws of the semantics on random diagrams.

mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(CASES))]

    #[test]
    fn functoriality_holds((a, b) in composable()) {
        functoriality(&a.build(), &b.build()).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn topology_invariance_holds(s in diagram(), seed in any::<u64>()) {
        topology_invariance(&s.build(), seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn snake_law_holds(s in diagram()) {
        snake_law(&s.build()).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn serialization_round_trips(s in diagram()) {
        round_trip(&s.build()).map_err(TestCaseError::fail)?;
    }
}
