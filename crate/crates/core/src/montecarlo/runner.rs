use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::estimate::{points, TailEstimate, TailPoint};
use crate::rng::{RandomSeed, TrialRng};

/// Commutative monoid of per-trial results.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

/// A Monte Carlo experiment: a pure map from trial seed to a tally update.
///
/// Trial `t` always draws from `RandomSeed::trial(master, t)`, so any split of
/// the trial range merged back together gives the same tally.
pub trait Experiment: Sync {
    type Tally: Merge + Clone + Send;

    fn empty_tally(&self) -> Self::Tally;

    fn run_trial(&self, seed: RandomSeed, tally: &mut Self::Tally);
}

/// Runs the trials in `range` sequentially.
pub fn run_range<E: Experiment + ?Sized>(experiment: &E, master: u64, range: Range<u64>) -> E::Tally {
    let mut tally = experiment.empty_tally();
    for t in range {
        experiment.run_trial(RandomSeed::trial(master, t), &mut tally);
    }
    tally
}

/// Why a trial produced no observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialIssue {
    /// Measure-zero degenerate sample (e.g. dependent conditioning columns).
    Degenerate,
    /// A deterministic invariant failed on this sample.
    Anomaly,
}

/// Comparison defining the success event `{statistic ⋄ threshold}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    AtMost,
    Below,
    AtLeast,
}

impl EventKind {
    #[inline]
    pub fn fires(self, value: f64, threshold: f64) -> bool {
        match self {
            Self::AtMost => value <= threshold,
            Self::Below => value < threshold,
            Self::AtLeast => value >= threshold,
        }
    }
}

/// Scalar statistics of one random sample, thresholded by [`ThresholdExperiment`].
pub trait Statistic: Sync {
    /// Number of statistics produced per trial.
    fn arity(&self) -> usize {
        1
    }

    fn event(&self) -> EventKind {
        EventKind::AtMost
    }

    fn evaluate(&self, rng: &mut TrialRng, out: &mut [f64]) -> Result<(), TrialIssue>;
}

/// Success counts per (statistic, threshold).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdTally {
    pub trials: u64,
    pub discarded: u64,
    pub anomalies: u64,
    /// Row-major `arity x thresholds`.
    pub successes: Vec<u64>,
}

impl Merge for ThresholdTally {
    fn merge(&mut self, other: Self) {
        self.trials += other.trials;
        self.discarded += other.discarded;
        self.anomalies += other.anomalies;
        for (a, b) in self.successes.iter_mut().zip(other.successes) {
            *a += b;
        }
    }
}

/// Estimates `P(statistic ⋄ t)` for every threshold `t` from one sample stream.
///
/// The same samples serve all thresholds, so the estimates are monotone in `t`.
#[derive(Debug, Clone)]
pub struct ThresholdExperiment<S> {
    pub statistic: S,
    pub thresholds: Vec<f64>,
}

impl<S: Statistic> ThresholdExperiment<S> {
    pub fn new(statistic: S, thresholds: Vec<f64>) -> crate::Result<Self> {
        super::estimate::check_thresholds(&thresholds)?;
        Ok(Self { statistic, thresholds })
    }

    /// Estimates for statistic `index`, one per threshold.
    pub fn estimates(&self, tally: &ThresholdTally, index: usize, master: u64) -> Vec<TailPoint> {
        let k = self.thresholds.len();
        let row = &tally.successes[index * k..(index + 1) * k];
        let est = row
            .iter()
            .map(|&s| TailEstimate::new(s, tally.trials, tally.discarded + tally.anomalies, master))
            .collect();
        points(&self.thresholds, est)
    }
}

impl<S: Statistic> Experiment for ThresholdExperiment<S> {
    type Tally = ThresholdTally;

    fn empty_tally(&self) -> ThresholdTally {
        ThresholdTally {
            trials: 0,
            discarded: 0,
            anomalies: 0,
            successes: vec![0; self.statistic.arity() * self.thresholds.len()],
        }
    }

    fn run_trial(&self, seed: RandomSeed, tally: &mut ThresholdTally) {
        let arity = self.statistic.arity();
        let mut values = [0.0f64; 4];
        assert!(arity <= values.len());
        let mut rng = seed.rng();
        match self.statistic.evaluate(&mut rng, &mut values[..arity]) {
            Ok(()) => {
                tally.trials += 1;
                let event = self.statistic.event();
                let k = self.thresholds.len();
                for (i, &v) in values[..arity].iter().enumerate() {
                    for (j, &t) in self.thresholds.iter().enumerate() {
                        if event.fires(v, t) {
                            tally.successes[i * k + j] += 1;
                        }
                    }
                }
            }
            Err(TrialIssue::Degenerate) => tally.discarded += 1,
            Err(TrialIssue::Anomaly) => tally.anomalies += 1,
        }
    }
}
