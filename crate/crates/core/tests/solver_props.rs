mod common;

use common::props::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn propagation_only_shrinks_(s in problem()) { propagation_only_shrinks(&s)?; }

    #[test]
    fn propagation_keeps_every_solution_(s in problem()) { propagation_keeps_every_solution(&s)?; }

    #[test]
    fn propagate_is_idempotent_(s in problem()) { propagate_is_idempotent(&s)?; }

    #[test]
    fn pop_restores_snapshot_(s in problem(), split in 0usize..7) { pop_restores_snapshot(&s, split)?; }

    #[test]
    fn element_index_keeps_only_compatible_slots_(s in problem()) { element_index_keeps_only_compatible_slots(&s)?; }

    #[test]
    fn solve_agrees_with_enumeration_(s in problem()) { solve_agrees_with_enumeration(&s)?; }
}

#[test]
fn solve_matches_enumeration_on_wide_store() {
    assert!(wide_store_agrees() > 0);
}
