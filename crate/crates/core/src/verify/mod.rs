//! Executable checks of the model's structural properties: submodularity
//! on acyclic networks, its failure with cycles, agreement between the
//! equivalent processes, and the vertex-cover reduction.

mod counterexample;
mod equivalence;
mod hardness;
mod submodularity;

pub use counterexample::{
    search_counterexample, witness_violation, Counterexample, Family, IndicatorGap, SearchParams, MIN_VIOLATION,
};
pub use equivalence::{check_equivalences, EquivalenceCheck, EquivalenceReport, TRAJECTORY_SAMPLES};
pub use hardness::{hardness_report, hardness_sweep, HardnessSweep, verify_hardness_reduction, HardnessReport, MAX_HARDNESS_VERTICES};
pub use submodularity::{
    check_submodularity, random_dag_sweep, Argument, Scope, SubmodularityOptions, SubmodularityReport, SweepReport,
    Violation, ViolationKind, EXACT_TOLERANCE, MAX_RECORDED_VIOLATIONS, SIGMA_MULTIPLIER,
};
