//! Partition functions, pressure and Bowen dimension, convergence exponents,
//! the covering threshold, and non-autonomous schedules.

mod digit_set;
mod growth;
mod pressure;
mod schedule;
mod tau;
mod threshold;

pub use digit_set::DigitSet;
pub use growth::GrowthFunction;
pub use pressure::{
    bowen_dimension, bowen_dimension_with, partition_sum, BowenDimResult, BowenOptions,
    PartitionOptions, PressureEstimate, PressureMode,
};
pub use schedule::{
    build_schedule, subexp_check, validate_schedule, verify_lower_bound_chain, LowerBoundChain,
    NonAutSchedule, ScheduleBlock, SubexpReport,
};
pub use tau::{lattice_moduli, tau_exponent, tau_trajectory_csv, TauEstimate, TauPoint};
pub use threshold::{
    lattice_tail_lower, lattice_tail_upper, upper_threshold, ThresholdConstants, ThresholdResult,
    ENUMERATION_RADIUS,
};
