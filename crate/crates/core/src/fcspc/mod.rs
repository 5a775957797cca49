//! Function-correcting symbol-pair codes.
//!
//! An encoder `u ↦ (u, p(u))` is an FCSPC for `f` against `t` pair errors
//! when any two messages with different values of `f` are encoded at pair
//! distance at least `2t + 1`.

mod encoder;
mod function;
mod matrices;
mod report;
mod verify;

pub use encoder::{
    builtin_base, distribution_parities, encode_by_class, encode_from_function_matrix,
    encode_locally_binary, encode_pair_weight, encode_weight_distribution, Family, PairEncoder,
    ParityRule, MAX_CODEWORD_LENGTH,
};
pub use function::{
    code_indicator_fn, pair_weight_fn, weight_distribution_fn, FunctionSpec, FunctionTable,
    MAX_TABLE_LENGTH,
};
pub use matrices::{
    build_function_matrix, build_message_matrix, capped_function_distances,
    closed_form_weight_matrix, function_ball, function_pair_distance, is_locally_binary,
    is_pair_locally_binary, pair_function_ball, weight_chain, wide_ball_witness, MatrixKind,
    MAX_BALL_LENGTH, MAX_IMAGE_SIZE,
};
pub use report::{
    classical_lower, comparison_row, heuristic_subset, redundancy_report, weight_asymptotic_applies,
    weight_asymptotic_upper, weight_plotkin_rational, Achieved, Bound, ComparisonRow,
    RedundancyReport, ReportOptions,
};
pub use verify::{
    exact_redundancy, verify_fcspc, Counterexample, ExactRedundancy, Verdict, VerifyMode,
    MAX_EXHAUSTIVE_LENGTH, MAX_SEARCH_LENGTH, MAX_SEARCH_REDUNDANCY,
};

/// Shifted modulus `(a − 1) mod b + 1`, in `1..=b`. Needs `a, b >= 1`.
pub fn smod(a: u64, b: u64) -> u64 {
    debug_assert!(a >= 1 && b >= 1);
    (a - 1) % b + 1
}
