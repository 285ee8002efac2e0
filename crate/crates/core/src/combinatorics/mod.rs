//! Symmetric-group and partition combinatorics behind the moment expansions.

mod counting;
mod partition;
mod permutation;

pub use counting::{
    catalan, collapse_evenodd_pairing, count_defect_pairings, count_defect_permutations,
    defect_pairing_histogram, defect_permutation_table, double_factorial_odd,
    evenodd_cycle_identity, for_each_level_function, lift_alpha_f, lifted_gamma, narayana,
    perm_to_evenodd_pairing, verify_lift_formula, DefectCount, LiftCaps, LiftCounterexample,
    LiftVerification, DEFAULT_SWEEP_BUDGET,
};
pub(crate) use counting::level_classes;
pub use partition::{
    enumerate_nc_pairings, enumerate_noncrossing, enumerate_pairings, enumerate_permutations,
    EnumerationCaps, PairPartition, SetPartition,
};
pub use permutation::{canonical_full_cycle, gamma_f, geodesic_defect, LevelFunction, Permutation};
pub(crate) use permutation::{canonical_cycle_images, cycle_count_of, cycle_count_of_composite};
