//! Runs a config block and turns the tally into a record.
//!
//! Defaults for unset parameters:
//!
//! | key | default |
//! |-----|---------|
//! | `delta` | 0.5 (`normal_incompressibility`: 0.3) |
//! | `rho` | `(1 − δ)ε/5` |
//! | `epsilon` | 0.4 (`event_cover`: 0.1, `rounding_moment`: 0.04) |
//! | `c1` | 0.1 (`event_cover`: 1.0) |
//! | `paouris_c` | 3 |
//! | `spread.c_lo`, `spread.c_hi` | 0.1, 10 |
//! | `spread.samples` | 32 |
//! | `subset` | `0, …, d−1` with `d = N − n + 1` |
//! | `x` | flat unit vector |
//! | `center` | origin |
//! | `y` | random unit (`rounding_moment`) or random compressible (`sparsity_prob`) |
//!
//! The random matrix of `rounding_moment` and the default `y` come from
//! streams `u64::MAX` and `u64::MAX − 1` of the block seed, disjoint from the
//! trial streams.

use std::time::Instant;

use sigmin_core::ensembles::sample_matrix;
use sigmin_core::geometry::{classify_compressible, Classification, DecompositionParams};
use sigmin_core::montecarlo::{
    ColumnDistance, CompressibleInfimum, EventCover, LargeNorm, NormalCompressibility, OrderStatistic,
    ProjectedBlockStat, RoundingMoment, SmallBall, SmallestSingularValue, SparsityBudget, Statistic, TailEstimate,
    TailPoint, ThresholdExperiment,
};
use sigmin_core::RandomSeed;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::parallel::run_parallel;
use crate::record::{EstimateRecord, ExperimentRecord, Metric};
use crate::workloads;

const SETUP_MATRIX_STREAM: u64 = u64::MAX;
const SETUP_VECTOR_STREAM: u64 = u64::MAX - 1;

#[derive(Debug, thiserror::Error)]
#[error("experiment `{block}`: {source}")]
pub struct RunError {
    pub block: String,
    #[source]
    pub source: sigmin_core::Error,
}

/// Runs one block on `threads` workers (0 = all cores).
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<ExperimentRecord, RunError> {
    let start = Instant::now();
    let wrap = |source| RunError { block: config.name.clone(), source };
    let (estimates, metrics) = dispatch(config, threads).map_err(wrap)?;
    for e in &estimates {
        if e.discarded > 0 {
            log::warn!("{}: {} degenerate samples discarded", config.name, e.discarded);
        }
    }
    Ok(ExperimentRecord::new(config, estimates, metrics, start.elapsed().as_secs_f64()))
}

type Outcome = (Vec<EstimateRecord>, Vec<Metric>);

fn thresholded<S: Statistic>(
    config: &ExperimentConfig,
    threads: usize,
    statistic: S,
    names: &[&str],
) -> sigmin_core::Result<Outcome> {
    let exp = ThresholdExperiment::new(statistic, config.thresholds.clone())?;
    let tally = run_parallel(&exp, config.seed, config.trials, threads);
    let mut estimates = Vec::new();
    for (i, name) in names.iter().enumerate() {
        for p in exp.estimates(&tally, i, config.seed) {
            estimates.push(EstimateRecord::new(name, &p));
        }
    }
    let metrics = vec![
        Metric::new("trials", tally.trials as f64),
        Metric::new("discarded", tally.discarded as f64),
        Metric::new("anomalies", tally.anomalies as f64),
    ];
    Ok((estimates, metrics))
}

fn regime_rho(config: &ExperimentConfig, delta: f64) -> f64 {
    config.params.rho.unwrap_or_else(|| (1.0 - delta) * config.params.epsilon.unwrap_or(0.4) / 5.0)
}

fn dispatch(c: &ExperimentConfig, threads: usize) -> sigmin_core::Result<Outcome> {
    let p = &c.params;
    let spec = c.ensemble.clone();
    match c.kind {
        ExperimentKind::SvTail => {
            let stat = SmallestSingularValue::new(spec, c.rows, c.cols, c.normalization)?;
            thresholded(c, threads, stat, &["sigma_min"])
        }
        ExperimentKind::SmallBall => {
            let center = p.center.clone().unwrap_or_else(|| vec![0.0; c.cols]);
            if center.len() != c.cols {
                return Err(sigmin_core::Error::DimensionMismatch { expected: c.cols, found: center.len() });
            }
            thresholded(c, threads, SmallBall::new(spec, center)?, &["dist_over_sqrt_n"])
        }
        ExperimentKind::Paouris => {
            LargeNorm::check_thresholds(&c.thresholds)?;
            let stat = LargeNorm::new(spec, c.cols, p.paouris_c.unwrap_or(3.0))?;
            thresholded(c, threads, stat, &["norm_over_c_sqrt_n"])
        }
        ExperimentKind::CompInfTail => {
            let delta = p.delta.unwrap_or(0.5);
            let rho = regime_rho(c, delta);
            let stat = CompressibleInfimum::new(spec, c.rows, c.cols, delta, rho, c.normalization)?;
            let (est, mut metrics) = thresholded(c, threads, stat, &["certified_comp_inf"])?;
            metrics.push(Metric::new("rho", rho));
            Ok((est, metrics))
        }
        ExperimentKind::DistanceTail => {
            if c.rows != c.cols {
                return Err(sigmin_core::Error::DimensionMismatch { expected: c.cols, found: c.rows });
            }
            thresholded(c, threads, ColumnDistance::new(spec, c.cols)?, &["dist_col_to_span"])
        }
        ExperimentKind::OrderStat => {
            let stat = OrderStatistic::new(spec, c.cols, p.c1.unwrap_or(0.1))?;
            let rank = stat.rank();
            let (est, mut metrics) = thresholded(c, threads, stat, &["order_statistic"])?;
            metrics.push(Metric::new("rank", rank as f64));
            Ok((est, metrics))
        }
        ExperimentKind::ProjectedSvTail => {
            let subset = p.subset.clone().unwrap_or_else(|| workloads::leading_subset(c.rows, c.cols));
            let x = p.x.clone().unwrap_or_else(|| workloads::flat_unit(subset.len()));
            let stat = ProjectedBlockStat::new(spec, c.rows, c.cols, subset, x)?;
            let codim = stat.codimension();
            let (est, mut metrics) = thresholded(c, threads, stat, &["sigma_min_w", "norm_wx"])?;
            metrics.push(Metric::new("codimension", codim as f64));
            Ok((est, metrics))
        }
        ExperimentKind::NormalIncompressibility => {
            let stat = NormalCompressibility::new(spec, c.cols, p.delta.unwrap_or(0.3))?;
            thresholded(c, threads, stat, &["normal_dist_to_sparse"])
        }
        ExperimentKind::EventCover => event_cover(c, threads),
        ExperimentKind::RoundingMoment => rounding_moment(c, threads),
        ExperimentKind::SparsityProb => sparsity_prob(c, threads),
    }
}

fn event_cover(c: &ExperimentConfig, threads: usize) -> sigmin_core::Result<Outcome> {
    let p = &c.params;
    let subset = p.subset.clone().unwrap_or_else(|| workloads::leading_subset(c.rows, c.cols));
    let epsilon = p.epsilon.unwrap_or(0.1);
    let exp = EventCover::new(
        c.ensemble.clone(),
        c.rows,
        c.cols,
        subset,
        epsilon,
        p.c1.unwrap_or(1.0),
        p.spread.unwrap_or_default(),
        p.spread_samples.unwrap_or(32),
    )?;
    let tally = run_parallel(&exp, c.seed, c.trials, threads);
    let small = TailEstimate::new(tally.small_infimum, tally.trials, tally.discarded, c.seed);
    let estimates = vec![EstimateRecord::new("small_infimum", &TailPoint { threshold: epsilon, estimate: small })];
    let mut metrics = vec![
        Metric::new("trials", tally.trials as f64),
        Metric::new("discarded", tally.discarded as f64),
        Metric::new("band_count", exp.band_count() as f64),
        Metric::new("small_infimum", tally.small_infimum as f64),
        Metric::new("e1", tally.e1 as f64),
    ];
    for (i, v) in tally.e2.iter().enumerate() {
        metrics.push(Metric::new(format!("e2_{i}"), *v as f64));
    }
    metrics.push(Metric::new("e3", tally.e3 as f64));
    metrics.push(Metric::new("violations", tally.violations as f64));
    Ok((estimates, metrics))
}

fn rounding_moment(c: &ExperimentConfig, threads: usize) -> sigmin_core::Result<Outcome> {
    let a = sample_matrix(&c.ensemble, c.rows, c.cols, RandomSeed::new(c.seed, SETUP_MATRIX_STREAM))?;
    let y = match &c.params.y {
        Some(y) => y.clone(),
        None => workloads::random_unit(a.cols(), &mut RandomSeed::new(c.seed, SETUP_VECTOR_STREAM).rng()),
    };
    let exp = RoundingMoment::new(a, y, c.params.epsilon.unwrap_or(0.04))?;
    let report = exp.report(&run_parallel(&exp, c.seed, c.trials, threads));
    let metrics = vec![
        Metric::new("trials", report.trials as f64),
        Metric::new("mean", report.mean),
        Metric::new("std_error", report.std_error),
        Metric::new("bound", report.bound),
        Metric::new("holds", report.holds as u8 as f64),
    ];
    Ok((Vec::new(), metrics))
}

fn sparsity_prob(c: &ExperimentConfig, threads: usize) -> sigmin_core::Result<Outcome> {
    let delta = c.params.delta.unwrap_or(0.5);
    let epsilon = c.params.epsilon.unwrap_or(0.4);
    let rho = c.params.rho.unwrap_or((1.0 - delta) * epsilon / 5.0);
    DecompositionParams::new(delta, rho, epsilon, c.cols)?;
    let y = match &c.params.y {
        Some(y) => y.clone(),
        None => {
            let mut rng = RandomSeed::new(c.seed, SETUP_VECTOR_STREAM).rng();
            workloads::random_compressible(c.cols, delta, rho, &mut rng)
        }
    };
    if classify_compressible(&y, delta, rho)? != Classification::Comp {
        return Err(sigmin_core::Error::InvalidParameter { name: "y (must be compressible)", value: rho });
    }
    let exp = SparsityBudget::new(y, delta, rho, epsilon)?;
    let tally = run_parallel(&exp, c.seed, c.trials, threads);
    let report = exp.report(&tally);
    let hits = TailEstimate::new(tally.hits, tally.trials, 0, c.seed);
    let estimates =
        vec![EstimateRecord::new("in_sparse_budget", &TailPoint { threshold: report.budget as f64, estimate: hits })];
    let metrics = vec![
        Metric::new("trials", report.trials as f64),
        Metric::new("budget", report.budget as f64),
        Metric::new("rho", rho),
        Metric::new("frequency", report.frequency),
        Metric::new("holds", report.holds as u8 as f64),
    ];
    Ok((estimates, metrics))
}
