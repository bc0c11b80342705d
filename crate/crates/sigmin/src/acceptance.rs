//! Acceptance suite: fifteen end-to-end checks, each with a wall-clock limit.
//!
//! Seeds are fixed constants chosen before any run. A criterion passes only
//! if its check holds and it finishes within its limit.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use sigmin_core::ensembles::sample_matrix_with;
use sigmin_core::geometry::{
    classify_compressible, dist_to_sparse, random_round_with, sparse_net_cardinality, sparse_net_size_bound,
    spread_witness, Classification, DecompositionParams,
};
use sigmin_core::linalg;
use sigmin_core::montecarlo::{
    ColumnDistance, EventCover, Merge, Normalization, OrderStatistic, ProjectedBlockStat, RoundingMoment, SmallBall,
    SmallestSingularValue, SparsityBudget, Statistic, TailPoint, ThresholdExperiment,
};
use sigmin_core::{EnsembleSpec, RandomSeed, RealMatrix};

use crate::config;
use crate::experiment::run_experiment;
use crate::oracle;
use crate::parallel::{install, run_parallel, run_parallel_range};
use crate::workloads;

const SEED_BASE: u64 = 0x5EED_0000;

fn seed(id: u8) -> u64 {
    SEED_BASE + id as u64
}

/// Result of one criterion's check, before timing is applied.
#[derive(Debug, Clone)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(passed: bool, detail: String) -> Self {
        Self { passed, detail }
    }
}

/// Static description of a criterion.
#[derive(Clone, Copy)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub limit: Duration,
    run: fn(usize) -> Check,
}

impl std::fmt::Debug for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Criterion").field("id", &self.id).field("title", &self.title).finish()
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Outcome {
    /// One-line report, e.g. `[PASS] 05 svd oracle (0.01 s / 5 s): ...`.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:02} {} ({:.2} s / {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

impl Criterion {
    /// Runs the check on `threads` workers (0 = all cores) and applies the time limit.
    pub fn run(&self, threads: usize) -> Outcome {
        let start = Instant::now();
        let check = (self.run)(threads);
        let elapsed = start.elapsed();
        let mut detail = check.detail;
        if elapsed > self.limit {
            detail.push_str("; time limit exceeded");
        }
        Outcome {
            id: self.id,
            title: self.title,
            passed: check.passed && elapsed <= self.limit,
            detail,
            elapsed,
            limit: self.limit,
        }
    }
}

/// Criteria whose stated target is contradicted by an exact calculation.
/// They run and report honestly; callers may choose not to treat their
/// failure as fatal.
pub const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[(
    13,
    "P(Bin(100, P(|X| <= 0.05)) >= 11) is 2.2e-3 (gaussian) and 1.5e-4 (uniform cube), not below 1e-15, \
     so about 22 and 1.5 events are expected in 10^4 trials",
)];

pub fn is_known_unattainable(id: u8) -> bool {
    KNOWN_UNATTAINABLE.iter().any(|(k, _)| *k == id)
}

pub fn criteria() -> Vec<Criterion> {
    let s = Duration::from_secs;
    vec![
        Criterion { id: 1, title: "rounding hard bound", limit: s(10), run: rounding_hard_bound },
        Criterion { id: 2, title: "rounding second moment", limit: s(60), run: rounding_second_moment },
        Criterion { id: 3, title: "sparsity budget", limit: s(60), run: sparsity_budget },
        Criterion { id: 4, title: "dist_to_sparse oracle", limit: s(10), run: dist_to_sparse_oracle },
        Criterion { id: 5, title: "svd oracle", limit: s(5), run: svd_oracle },
        Criterion { id: 6, title: "small-ball oracle", limit: s(30), run: small_ball_oracle },
        Criterion { id: 7, title: "distance oracle", limit: s(300), run: distance_oracle },
        Criterion { id: 8, title: "linear small-ball scaling", limit: s(900), run: linear_scaling },
        Criterion { id: 9, title: "tall-case rarity", limit: s(600), run: tall_rarity },
        Criterion { id: 10, title: "projected block codimension and law", limit: s(300), run: projected_block_law },
        Criterion { id: 11, title: "event cover exactness", limit: s(120), run: event_cover_exactness },
        Criterion { id: 12, title: "spread witness", limit: s(5), run: spread_witness_size },
        Criterion { id: 13, title: "order-statistic floor", limit: s(30), run: order_statistic_floor },
        Criterion { id: 14, title: "net enumeration bound", limit: s(60), run: net_enumeration_bound },
        // Re-runs five small configs at several widths; sized to stay well inside self-test.
        Criterion { id: 15, title: "reproducibility", limit: s(300), run: reproducibility },
    ]
}

fn rng_for(id: u8, stream: u64) -> sigmin_core::rng::TrialRng {
    RandomSeed::new(seed(id), stream).rng()
}

fn tail(stat: impl Statistic, thresholds: Vec<f64>, master: u64, trials: u64, threads: usize) -> Vec<Vec<TailPoint>> {
    let arity = stat.arity();
    let exp = ThresholdExperiment::new(stat, thresholds).expect("valid thresholds");
    let tally = run_parallel(&exp, master, trials, threads);
    (0..arity).map(|i| exp.estimates(&tally, i, master)).collect()
}

fn rounding_hard_bound(threads: usize) -> Check {
    const DRAWS: u64 = 100_000;
    let violations: u64 = install(threads, || {
        (0..DRAWS)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_for(1, i);
                let n = rng.random_range(1..=200usize);
                let eps = rng.random_range(1e-3..1.0);
                let h = eps / (n as f64).sqrt();
                let y: Vec<f64> = match i % 3 {
                    0 => workloads::random_unit(n, &mut rng),
                    // Points on and half-way between lattice points.
                    1 => (0..n).map(|_| rng.random_range(-20..=20) as f64 * h).collect(),
                    _ => (0..n).map(|_| (rng.random_range(-20..=20) as f64 + 0.5) * h).collect(),
                };
                let eta = random_round_with(&y, eps, &mut rng).expect("valid input");
                eta.eta.iter().zip(&y).any(|(a, b)| (a - b).abs() > h) as u64
            })
            .sum()
    });
    Check::new(violations == 0, format!("{DRAWS} draws, {violations} sup-norm violations"))
}

fn rounding_second_moment(threads: usize) -> Check {
    let mut worst = f64::NEG_INFINITY;
    let mut failures = 0;
    for case in 0..50u64 {
        let mut rng = rng_for(2, case);
        let a = sample_matrix_with(&EnsembleSpec::Gaussian, 40, 20, &mut rng).expect("valid shape");
        let y = workloads::random_unit(20, &mut rng);
        let eps = rng.random_range(0.05..0.5);
        let exp = RoundingMoment::new(a, y, eps).expect("valid input");
        let report = exp.report(&run_parallel(&exp, seed(2) + 1000 * (case + 1), 10_000, threads));
        worst = worst.max((report.mean - report.bound) / report.std_error);
        failures += !report.holds as u32;
    }
    Check::new(
        failures == 0,
        format!("50 cases x 10^4 draws, {failures} above bound + 3 SE, worst (mean - bound)/SE = {worst:.2}"),
    )
}

fn sparsity_budget(threads: usize) -> Check {
    let params = DecompositionParams::compressible_regime(0.5, 0.4, 100).expect("valid regime");
    let mut lowest = f64::INFINITY;
    let mut failures = 0;
    for case in 0..50u64 {
        let y = workloads::random_compressible(100, params.delta(), params.rho(), &mut rng_for(3, case));
        let exp = SparsityBudget::new(y, params.delta(), params.rho(), params.epsilon()).expect("compressible y");
        let report = exp.report(&run_parallel(&exp, seed(3) + 1000 * (case + 1), 10_000, threads));
        lowest = lowest.min(report.frequency);
        failures += !report.holds as u32;
    }
    Check::new(
        failures == 0,
        format!("m = {}, lowest frequency {lowest:.4} over 50 vectors (floor 0.70)", params.sparse_budget()),
    )
}

fn dist_to_sparse_oracle(_threads: usize) -> Check {
    let mut rng = rng_for(4, 0);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let n = rng.random_range(1..=10usize);
        let k = rng.random_range(0..=n);
        let mut x = workloads::random_unit(n, &mut rng);
        if i % 4 == 0 {
            // Ties in magnitude.
            let v = x[0].abs();
            x.iter_mut().step_by(2).for_each(|c| *c = v.copysign(*c));
        }
        let got = dist_to_sparse(&x, k).expect("k <= n");
        worst = worst.max((got - oracle::dist_to_sparse_exhaustive(&x, k)).abs());
    }
    Check::new(worst <= 1e-12, format!("1000 vectors, max |error| = {worst:.3e} (tolerance 1e-12)"))
}

fn svd_oracle(_threads: usize) -> Check {
    let mut rng = rng_for(5, 0);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let entries: [f64; 9] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let a = RealMatrix::from_row_major(3, 3, &entries).expect("finite");
        let got = linalg::singular_values(&a).expect("finite");
        for (g, e) in got.iter().zip(oracle::singular_values_3x3(&entries)) {
            worst = worst.max((g - e).abs() / e);
        }
    }
    Check::new(worst <= 1e-8, format!("500 matrices, max relative error {worst:.3e} (tolerance 1e-8)"))
}

fn small_ball_oracle(threads: usize) -> Check {
    let stat = SmallBall::new(EnsembleSpec::Gaussian, vec![0.0; 50]).expect("valid");
    let est = tail(stat, vec![0.5], seed(6), 100_000, threads)[0][0].estimate;
    let exact = oracle::chi_square_cdf(50, 12.5);
    let err = (est.p_hat - exact).abs();
    Check::new(err <= 0.01, format!("p_hat = {:.3e}, chi-square oracle {exact:.3e}, |diff| = {err:.3e}", est.p_hat))
}

fn distance_oracle(threads: usize) -> Check {
    let stat = ColumnDistance::new(EnsembleSpec::Gaussian, 50).expect("valid");
    let points = tail(stat, vec![0.1, 0.3], seed(7), 200_000, threads).remove(0);
    let mut ok = true;
    let mut parts = Vec::new();
    for p in &points {
        let exact = oracle::half_normal_cdf(p.threshold);
        ok &= p.estimate.contains(exact);
        parts.push(format!(
            "eps={}: p_hat={:.5} CI=[{:.5}, {:.5}] oracle={exact:.5}",
            p.threshold, p.estimate.p_hat, p.estimate.ci_low, p.estimate.ci_high
        ));
    }
    parts.push(format!("discarded {}", points[0].estimate.discarded_degenerate));
    Check::new(ok, parts.join("; "))
}

fn linear_scaling(threads: usize) -> Check {
    const MIN_EVENTS: u64 = 20;
    const MAX_TRIALS: u64 = 1_280_000;
    let stat = SmallestSingularValue::new(EnsembleSpec::UniformCube, 80, 80, Normalization::InvSqrtCols)
        .expect("valid");
    let exp = ThresholdExperiment::new(stat, vec![0.1, 0.4]).expect("valid thresholds");
    let mut trials = 20_000;
    let mut tally = run_parallel(&exp, seed(8), trials, threads);
    while tally.successes[0] < MIN_EVENTS && trials < MAX_TRIALS {
        // Extend with fresh streams; the first `trials` are reused.
        let more = run_parallel_range(&exp, seed(8), trials..2 * trials, threads);
        tally.merge(more);
        trials *= 2;
    }
    let (lo, hi) = (tally.successes[0], tally.successes[1]);
    let ratio = hi as f64 / lo as f64;
    let enough = lo >= MIN_EVENTS && hi >= MIN_EVENTS;
    Check::new(
        enough && (2.0..=8.0).contains(&ratio),
        format!("{trials} trials, events {lo} (0.1/sqrt n) and {hi} (0.4/sqrt n), ratio {ratio:.3} (target [2, 8])"),
    )
}

fn tall_rarity(threads: usize) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, spec) in [EnsembleSpec::Gaussian, EnsembleSpec::UniformCube].into_iter().enumerate() {
        let name = spec.name();
        let stat = SmallestSingularValue::new(spec, 200, 50, Normalization::SqrtRows).expect("valid");
        let est = tail(stat, vec![0.2], seed(9) + i as u64, 5_000, threads)[0][0].estimate;
        let r3 = est.rule_of_three();
        ok &= est.successes == 0 && r3.is_some_and(|b| b <= 6e-4);
        parts.push(format!("{name}: {} events in {}, rule of three {:?}", est.successes, est.trials, r3));
    }
    parts.push(format!("edge oracle sqrt N - sqrt n = {:.3}", oracle::marchenko_pastur_lower_edge(200, 50)));
    Check::new(ok, parts.join("; "))
}

fn projected_block_law(threads: usize) -> Check {
    let spec = EnsembleSpec::independent_columns(EnsembleSpec::Gaussian);
    let subset = workloads::leading_subset(24, 20);
    let stat = ProjectedBlockStat::new(spec, 24, 20, subset, workloads::flat_unit(5)).expect("valid");
    let codim = stat.codimension();
    let thresholds = vec![0.25, 0.5, 0.75, 1.0, 1.25];
    let exp = ThresholdExperiment::new(stat, thresholds).expect("valid thresholds");
    let tally = run_parallel(&exp, seed(10), 100_000, threads);
    let scale = (codim as f64).sqrt();
    let mut worst = 0.0f64;
    for p in exp.estimates(&tally, 1, seed(10)) {
        worst = worst.max((p.estimate.p_hat - oracle::chi_cdf(codim as u64, p.threshold * scale)).abs());
    }
    let ok = codim == 9 && tally.anomalies == 0 && worst <= 0.01;
    Check::new(
        ok,
        format!(
            "codimension {codim}, {} samples with wrong basis dimension, {} discarded, max |p_hat - chi9 cdf| = {worst:.4}",
            tally.anomalies, tally.discarded
        ),
    )
}

fn event_cover_exactness(threads: usize) -> Check {
    let exp = EventCover::new(
        EnsembleSpec::independent_columns(EnsembleSpec::Gaussian),
        24,
        20,
        workloads::leading_subset(24, 20),
        1.0,
        1.0,
        Default::default(),
        32,
    )
    .expect("valid");
    let t = run_parallel(&exp, seed(11), 10_000, threads);
    Check::new(
        t.violations == 0 && t.trials + t.discarded == 10_000 && t.small_infimum > 0,
        format!(
            "{} samples ({} discarded), small infimum {}, E1 {}, E2 {:?}, E3 {}, violations {}",
            t.trials, t.discarded, t.small_infimum, t.e1, t.e2, t.e3, t.violations
        ),
    )
}

fn spread_witness_size(_threads: usize) -> Check {
    let (n, delta, rho) = (50, 0.3, 0.2);
    let required = rho * rho * delta * n as f64 / 2.0;
    let mut rng = rng_for(12, 0);
    let mut smallest = usize::MAX;
    let mut failures = 0;
    for _ in 0..1000 {
        let x = workloads::random_incompressible(n, delta, rho, &mut rng);
        debug_assert_eq!(classify_compressible(&x, delta, rho), Ok(Classification::Incomp));
        match spread_witness(&x, delta, rho) {
            Ok(j) if j.len() as f64 >= required => smallest = smallest.min(j.len()),
            _ => failures += 1,
        }
    }
    Check::new(failures == 0, format!("1000 vectors, {failures} failures, smallest |J| = {smallest} (required {required})"))
}

fn order_statistic_floor(threads: usize) -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    let cdfs: [(EnsembleSpec, fn(f64) -> f64); 2] =
        [(EnsembleSpec::Gaussian, oracle::gaussian_abs_cdf), (EnsembleSpec::UniformCube, oracle::uniform_cube_abs_cdf)];
    for (i, (spec, cdf)) in cdfs.into_iter().enumerate() {
        let name = spec.name();
        let stat = OrderStatistic::new(spec, 100, 0.1).expect("valid");
        let rank = stat.rank() as u64;
        let est = tail(stat, vec![0.05], seed(13) + i as u64, 10_000, threads)[0][0].estimate;
        let exact = oracle::order_statistic_probability(100, rank, cdf(0.05));
        ok &= est.successes == 0;
        parts.push(format!(
            "{name}: {} events in {} (binomial oracle p = {exact:.3e}, expected {:.1})",
            est.successes,
            est.trials,
            exact * est.trials as f64
        ));
    }
    Check::new(ok, parts.join("; "))
}

fn net_enumeration_bound(_threads: usize) -> Check {
    let params = DecompositionParams::compressible_regime(0.5, 0.5, 6).expect("valid regime");
    let m = params.sparse_budget();
    let bound = sparse_net_size_bound(&params, 10.0).expect("valid");
    let count = match sparse_net_cardinality(6, 0.5, m) {
        Ok(c) => c,
        Err(e) => return Check::new(false, format!("enumeration failed: {e}")),
    };
    let scan = oracle::net_cardinality_box_scan(6, 0.5, m);
    Check::new(
        count as f64 <= bound.bound && count == scan,
        format!("m = {m}, enumerated {count} points (box scan {scan}), bound {:.4e}", bound.bound),
    )
}

const REPRO_CONFIG: &str = "\
[experiment repro-sv]
kind = sv_tail
ensemble = gaussian
N = 12
n = 8
thresholds = 0.1, 0.3, 0.6
normalization = eps_over_sqrt_n
trials = 3000
seed = 101

[experiment repro-distance]
kind = distance_tail
ensemble = uniform_cube
n = 10
thresholds = 0.05, 0.2
trials = 3000
seed = 102

[experiment repro-projected]
kind = projected_sv_tail
ensemble.kind = independent_columns
ensemble.column.kind = laplace
N = 14
n = 12
thresholds = 0.2, 0.5
trials = 3000
seed = 103

[experiment repro-cover]
kind = event_cover
ensemble.kind = independent_columns
ensemble.column.kind = gaussian
N = 24
n = 20
epsilon = 1.0
trials = 1000
seed = 104

[experiment repro-sparsity]
kind = sparsity_prob
ensemble = gaussian
n = 40
trials = 3000
seed = 105
";

/// `(statistic, threshold, successes, trials)` and metrics of a record, without timing.
fn fingerprint(r: &crate::record::ExperimentRecord) -> (Vec<(String, u64, u64, u64)>, Vec<(String, u64)>) {
    let est = r.estimates.iter().map(|e| (e.statistic.clone(), e.threshold.to_bits(), e.successes, e.trials)).collect();
    let met = r.metrics.iter().map(|m| (m.name.clone(), m.value.to_bits())).collect();
    (est, met)
}

fn reproducibility(threads: usize) -> Check {
    let configs = config::parse(REPRO_CONFIG).expect("built-in config parses");
    let widest = threads.max(crate::parallel::default_threads()).max(4);
    let mut mismatches = Vec::new();
    for c in &configs {
        let base = fingerprint(&run_experiment(c, 1).expect("built-in config runs"));
        for width in [2, 3, widest] {
            let other = fingerprint(&run_experiment(c, width).expect("built-in config runs"));
            if other != base {
                mismatches.push(format!("{} at {width} threads", c.name));
            }
        }
    }
    Check::new(
        mismatches.is_empty(),
        format!("{} configs at 1, 2, 3 and {widest} threads; mismatches: {:?}", configs.len(), mismatches),
    )
}

/// Runs every criterion (or the selected ids), reporting each outcome as it completes.
pub fn run_suite(threads: usize, only: Option<&[u8]>, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    criteria()
        .into_iter()
        .filter(|c| only.is_none_or(|ids| ids.contains(&c.id)))
        .map(|c| {
            let o = c.run(threads);
            report(&o);
            o
        })
        .collect()
}
