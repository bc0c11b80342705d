//! Monte Carlo estimation of the tail probabilities, with Wilson intervals,
//! plus pointwise checks of the deterministic event identities.
//!
//! Everything here runs sequentially; [`Experiment`] tallies merge
//! commutatively so a host can fan trial ranges out across threads.

mod cover;
mod estimate;
mod experiments;
mod rounding;
mod runner;

pub use cover::{CoverFlags, CoverTally, EventCover};
pub use estimate::{wilson_interval, TailEstimate, TailPoint, Z95};
pub use experiments::{
    certified_comp_lower_bound, for_each_subset, sampled_comp_infimum, ColumnDistance, CompressibleInfimum,
    LargeNorm, Normalization, NormalCompressibility, OrderStatistic, ProjectedBlockStat, SmallBall,
    SmallestSingularValue, MAX_COMP_INF_DIM,
};
pub use rounding::{
    CountTally, MomentTally, RoundingMoment, RoundingMomentReport, SparsityBudget, SparsityReport, SPARSITY_FLOOR,
};
pub use runner::{
    run_range, EventKind, Experiment, Merge, Statistic, ThresholdExperiment, ThresholdTally, TrialIssue,
};

/// Runs `trials` trials sequentially.
pub fn run<E: Experiment + ?Sized>(experiment: &E, master: u64, trials: u64) -> E::Tally {
    run_range(experiment, master, 0..trials)
}

/// Sequential estimate of `P(statistic ⋄ t)` at every threshold, for the first statistic.
pub fn estimate_tail<S: Statistic>(
    statistic: S,
    thresholds: alloc::vec::Vec<f64>,
    trials: u64,
    master: u64,
) -> crate::Result<alloc::vec::Vec<TailPoint>> {
    let exp = ThresholdExperiment::new(statistic, thresholds)?;
    let tally = run(&exp, master, trials);
    Ok(exp.estimates(&tally, 0, master))
}
