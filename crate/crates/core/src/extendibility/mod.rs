//! The k-extendibility witness and the Monte Carlo experiments built on it.

mod constants;
mod experiments;
mod witness;

pub use constants::{
    c_star, comparison_table, min_k_beating, min_k_beating_exact, ppt_threshold_constant, ppt_width_constant,
    realignment_threshold_constant, Comparison, ComparisonTable, MAX_COMPARISON_CONSTANT, PAPER_TABLE_VALUE_FOR_PPT,
};
pub use experiments::{
    estimate_mean_width, mean_and_se, normalized_wishart_trace, run_threshold_sweep, run_witness_experiment,
    variance_decay_check, wilson_interval, MeanWidthMode, MeanWidthReport, ThresholdPoint, ThresholdReport,
    VarianceDecayReport, VariancePoint, VarianceRatio, WitnessRep, WitnessReport, NORM_TOLERANCE, WILSON_Z,
};
pub use witness::{
    detect_not_k_extendible, purity, validate_state, witness_value, DENSE_WITNESS_MAX_DIM, DETECTION_TOLERANCE,
    STATE_TOLERANCE,
};
