//! Maintenance checking, substructure suites, similarity and the attack
//! drivers.

mod attacks;
mod check;
mod equivalence;
mod higman;
mod invariance;
mod saturation;
mod similarity;
mod substructure;

pub use attacks::{attack_star_deletion, attack_subset_gadget, MAX_GADGET_N2};
pub use check::{
    check_maintenance, CheckConfig, CheckStats, Counterexample, Mode, Verdict, DEFAULT_STATE_CAP,
};
pub use equivalence::{first_disagreement, query_disagreement};
pub use higman::{embedding, higman_pair, subsequence, TypeWord};
pub use invariance::{
    diverse_types_uniform, init_invariance, initfunc_violations, swappable_pairs, InitFuncViolation,
    EXHAUSTIVE_TUPLES,
};
pub use saturation::{cq_adversary, diverse_saturation, Unsaturated};
pub use similarity::{
    is_closed, k_similar, neighborhood, neighborhood_vector, neighborhood_vector_capped, preserves_relations,
};
pub use substructure::{
    similarity_depth, substructure_property, substructure_trial, SubstructureWitness, SuiteConfig, SuiteVerdict,
    Trial,
};
