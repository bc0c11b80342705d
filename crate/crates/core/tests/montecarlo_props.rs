use proptest::prelude::*;
use sigmin_core::ensembles::sample_matrix;
use sigmin_core::geometry::SpreadParams;
use sigmin_core::montecarlo::{
    certified_comp_lower_bound, estimate_tail, run, run_range, sampled_comp_infimum, wilson_interval, ColumnDistance,
    CompressibleInfimum, EventCover, Experiment, LargeNorm, Merge, NormalCompressibility, Normalization,
    OrderStatistic, ProjectedBlockStat, RoundingMoment, SmallBall, SmallestSingularValue, SparsityBudget,
    TailEstimate, ThresholdExperiment,
};
use sigmin_core::{EnsembleSpec, RandomSeed, RealMatrix};

fn cols(spec: EnsembleSpec) -> EnsembleSpec {
    EnsembleSpec::independent_columns(spec)
}

fn p_hat_at(points: &[sigmin_core::montecarlo::TailPoint], i: usize) -> f64 {
    points[i].estimate.p_hat
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn split_runs_merge_to_the_whole(a in 0u64..300, b in 0u64..300, master in any::<u64>()) {
        let (lo, hi) = (a.min(b), a.max(b));
        let exp = ThresholdExperiment::new(
            SmallestSingularValue::new(EnsembleSpec::Gaussian, 4, 3, Normalization::Absolute).unwrap(),
            vec![0.1, 0.5, 1.0],
        ).unwrap();
        let whole = run(&exp, master, 300);
        let mut left = run_range(&exp, master, 0..lo);
        let mid = run_range(&exp, master, lo..hi);
        let right = run_range(&exp, master, hi..300);
        // (left + mid) + right == left + (mid + right) == whole
        let mut assoc = mid.clone();
        assoc.merge(right.clone());
        let mut other = left.clone();
        other.merge(assoc);
        left.merge(mid);
        left.merge(right);
        prop_assert_eq!(&left, &whole);
        prop_assert_eq!(&other, &whole);
    }

    #[test]
    fn estimates_are_monotone_in_threshold(master in any::<u64>(), n in 2usize..8) {
        let pts = estimate_tail(
            SmallestSingularValue::new(cols(EnsembleSpec::UniformCube), n + 2, n, Normalization::Absolute).unwrap(),
            vec![0.05, 0.2, 0.5, 1.0, 2.0],
            400,
            master,
        ).unwrap();
        prop_assert!(pts.windows(2).all(|w| w[0].estimate.successes <= w[1].estimate.successes));
    }

    #[test]
    fn wilson_brackets_and_narrows(s in 0u64..1000, extra in 0u64..1000) {
        let t = s + extra;
        prop_assume!(t > 0);
        let e = TailEstimate::new(s, t, 0, 0);
        prop_assert!(0.0 <= e.ci_low && e.ci_low <= e.p_hat && e.p_hat <= e.ci_high && e.ci_high <= 1.0);
        let (lo4, hi4) = wilson_interval(4 * s, 4 * t);
        prop_assert!(hi4 - lo4 <= e.ci_high - e.ci_low + 1e-12);
        let pooled = e.merge(&TailEstimate::new(s, t, 3, 9));
        prop_assert_eq!((pooled.successes, pooled.trials, pooled.discarded_degenerate), (2 * s, 2 * t, 3));
        prop_assert_eq!(e.rule_of_three().is_some(), s == 0);
    }
}

#[test]
fn sv_tail_extremes() {
    let pts = estimate_tail(
        SmallestSingularValue::new(EnsembleSpec::Gaussian, 2, 2, Normalization::Absolute).unwrap(),
        vec![0.0, 100.0],
        2000,
        1,
    )
    .unwrap();
    assert_eq!((p_hat_at(&pts, 0), p_hat_at(&pts, 1)), (0.0, 1.0));
}

#[test]
fn zero_threshold_events_are_null() {
    let small = estimate_tail(SmallBall::new(EnsembleSpec::Gaussian, vec![0.0; 5]).unwrap(), vec![0.0], 2000, 2);
    let dist = estimate_tail(ColumnDistance::new(cols(EnsembleSpec::Gaussian), 6).unwrap(), vec![0.0], 2000, 3);
    let order = estimate_tail(OrderStatistic::new(EnsembleSpec::Gaussian, 20, 0.1).unwrap(), vec![0.0], 2000, 4);
    for pts in [small, dist, order] {
        assert_eq!(p_hat_at(&pts.unwrap(), 0), 0.0);
    }
    let x = vec![0.5f64.sqrt(); 2];
    let proj = estimate_tail(
        ProjectedBlockStat::new(cols(EnsembleSpec::Gaussian), 6, 5, vec![0, 1], x).unwrap(),
        vec![0.0],
        2000,
        5,
    )
    .unwrap();
    assert_eq!(p_hat_at(&proj, 0), 0.0);
}

#[test]
fn paouris_with_zero_constant_always_fires() {
    let pts = estimate_tail(LargeNorm::new(EnsembleSpec::L1Ball, 10, 0.0).unwrap(), vec![1.0, 5.0], 500, 6).unwrap();
    assert_eq!((p_hat_at(&pts, 0), p_hat_at(&pts, 1)), (1.0, 1.0));
    assert!(LargeNorm::check_thresholds(&[0.5]).is_err());
    assert!(LargeNorm::check_thresholds(&[1.0, 2.0]).is_ok());
}

#[test]
fn certified_bound_on_identity_and_below_samples() {
    let id = RealMatrix::identity(6).unwrap();
    let (delta, rho) = (0.5, 0.2);
    let l = certified_comp_lower_bound(&id, delta, rho).unwrap();
    assert!((l - ((1.0 - rho * rho).sqrt() - rho)).abs() < 1e-12);
    assert_eq!(certified_comp_lower_bound(&id, delta, 0.0).unwrap(), 1.0);
    for t in 0..50 {
        let a = sample_matrix(&EnsembleSpec::Gaussian, 9, 6, RandomSeed::new(40, t)).unwrap();
        let certified = certified_comp_lower_bound(&a, delta, rho).unwrap();
        let sampled = sampled_comp_infimum(&a, delta, rho, 400, &mut RandomSeed::new(41, t).rng()).unwrap();
        assert!(sampled >= certified - 1e-12, "trial {t}: {sampled} < {certified}");
    }
}

#[test]
fn comp_inf_rejects_large_dimensions() {
    assert!(CompressibleInfimum::new(EnsembleSpec::Gaussian, 40, 20, 0.5, 0.1, Normalization::SqrtRows).is_err());
    assert!(CompressibleInfimum::new(EnsembleSpec::Gaussian, 24, 12, 0.5, 0.1, Normalization::SqrtRows).is_ok());
}

#[test]
fn normals_are_rarely_compressible() {
    for spec in [EnsembleSpec::Gaussian, EnsembleSpec::UniformCube] {
        for n in 2..=12 {
            let pts = estimate_tail(NormalCompressibility::new(cols(spec.clone()), n, 0.3).unwrap(), vec![0.1], 10_000, 7)
                .unwrap();
            let incompressible = 1.0 - p_hat_at(&pts, 0);
            assert!(incompressible >= 0.99, "{spec:?} n={n}: {incompressible}");
        }
    }
}

#[test]
fn cover_flags_examples() {
    let cover = EventCover::new(
        cols(EnsembleSpec::Gaussian),
        24,
        20,
        (0..5).collect(),
        1.0,
        1.0,
        SpreadParams::default(),
        8,
    )
    .unwrap();
    assert_eq!(cover.d(), 5);
    // m = ceil(log2(sqrt(480)/5)) = ceil(2.13) = 3
    assert_eq!(cover.band_count(), 3);
    let level = 5f64.sqrt();
    let f = cover.flags(level / 2.0, 3.0);
    assert!(f.small_infimum && f.e1 && f.covered());
    let f = cover.flags(level, 12.0);
    assert_eq!(f.e2, vec![false, true, false, false]);
    assert!(!f.e1 && !f.e3 && f.covered());
    let f = cover.flags(10.0 * level, 1.0);
    assert!(!f.small_infimum && f.covered());
    assert!(cover.flags(0.0, 480f64.sqrt()).e3);
    let mut tally = cover.empty_tally();
    cover.run_trial(RandomSeed::trial(8, 0), &mut tally);
    assert_eq!(tally.trials + tally.discarded, 1);
    assert_eq!(tally.e2.len(), 4);
}

#[test]
fn rounding_experiments_report() {
    let a = sample_matrix(&EnsembleSpec::Gaussian, 12, 8, RandomSeed::new(42, 0)).unwrap();
    let y: Vec<f64> = (0..8).map(|i| 0.1 * i as f64 - 0.3).collect();
    let moment = RoundingMoment::new(a, y, 0.04).unwrap();
    let report = moment.report(&run(&moment, 9, 5000));
    assert!(report.holds && report.mean <= report.bound, "{report:?}");
    let mut sparse_y = vec![0.0; 20];
    sparse_y[0] = 0.8;
    sparse_y[1] = 0.6;
    let budget = SparsityBudget::new(sparse_y, 0.5, 0.1, 0.1).unwrap();
    let r = budget.report(&run(&budget, 10, 2000));
    assert!(r.holds && r.frequency == 1.0, "{r:?}");
}
