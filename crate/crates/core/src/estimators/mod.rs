//! Replica execution and the statistics built on top of it.

mod replicas;
mod report;
mod stats;

pub use replicas::{replica_rng, run_replicas, simulate_replica, ReplicaPlan};
pub use report::{Check, ExperimentReport};
pub use stats::{
    fit_line, fit_power_law, fit_two_term, ks_critical_1pct, ks_statistic, pairwise_sum, sup_l2,
    LineFit, Summary, TwoTermFit,
};
