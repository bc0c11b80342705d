use sigmin_core::ensembles::{
    isotropy_report, l1_ball_radius, make_concatenated, sample_matrix, sample_vector, MomentAccumulator,
};
use sigmin_core::{EnsembleSpec, RandomSeed};

const VECTOR_KINDS: [EnsembleSpec; 4] =
    [EnsembleSpec::Gaussian, EnsembleSpec::UniformCube, EnsembleSpec::Laplace, EnsembleSpec::L1Ball];

#[test]
fn isotropy_reports_at_two_hundred_thousand() {
    for (spec, n) in [
        (EnsembleSpec::Gaussian, 10),
        (EnsembleSpec::UniformCube, 5),
        (EnsembleSpec::L1Ball, 5),
        (EnsembleSpec::Laplace, 5),
    ] {
        let r = isotropy_report(&spec, n, 200_000, 7).unwrap();
        assert!(r.max_covariance_deviation < 0.05, "{spec:?}: {r:?}");
        assert!(r.max_abs_mean < 0.05, "{spec:?}: {r:?}");
    }
}

/// Mean of `f` over `trials` draws and its CLT standard error.
fn mean_and_se(trials: u64, mut f: impl FnMut(u64) -> f64) -> (f64, f64) {
    let (mut s, mut s2) = (0.0, 0.0);
    for t in 0..trials {
        let v = f(t);
        s += v;
        s2 += v * v;
    }
    let m = s / trials as f64;
    let var = (s2 / trials as f64 - m * m).max(0.0);
    (m, (var / trials as f64).sqrt())
}

#[test]
fn odd_mixed_moments_vanish() {
    for spec in VECTOR_KINDS {
        for (i, j, k) in [(0, 0, 0), (0, 0, 1), (0, 1, 2)] {
            let (m, se) = mean_and_se(50_000, |t| {
                let x = sample_vector(&spec, 4, RandomSeed::new(11, t)).unwrap();
                x[i] * x[j] * x[k]
            });
            assert!(m.abs() <= 4.0 * se, "{spec:?} E[x{i} x{j} x{k}] = {m} (se {se})");
        }
    }
}

#[test]
fn sign_flips_preserve_second_moments() {
    // Unconditional laws: flipping a fixed sign pattern leaves the covariance at identity.
    let signs = [1.0, -1.0, -1.0, 1.0, -1.0];
    for spec in [EnsembleSpec::UniformCube, EnsembleSpec::Laplace, EnsembleSpec::L1Ball] {
        let mut acc = MomentAccumulator::new(5);
        for t in 0..100_000 {
            let x = sample_vector(&spec, 5, RandomSeed::new(12, t)).unwrap();
            let flipped: Vec<f64> = x.iter().zip(signs).map(|(a, s)| a * s).collect();
            acc.push(&flipped);
        }
        assert!(acc.report().max_covariance_deviation < 0.05, "{spec:?}");
    }
}

#[test]
fn independent_columns_are_uncorrelated() {
    let spec = EnsembleSpec::independent_columns(EnsembleSpec::L1Ball);
    for (r1, r2) in [(0, 0), (1, 3), (2, 2)] {
        let (m, se) = mean_and_se(50_000, |t| {
            let a = sample_matrix(&spec, 4, 3, RandomSeed::new(13, t)).unwrap();
            a.get(r1, 0) * a.get(r2, 2)
        });
        assert!(m.abs() <= 4.0 * se, "cov(a[{r1},0], a[{r2},2]) = {m} (se {se})");
    }
}

#[test]
fn ell1_columns_stay_in_their_ball() {
    let spec = EnsembleSpec::independent_columns(EnsembleSpec::L1Ball);
    let r = l1_ball_radius(4);
    assert!((r - 15f64.sqrt()).abs() < 1e-12);
    for t in 0..1000 {
        let a = sample_matrix(&spec, 4, 3, RandomSeed::new(14, t)).unwrap();
        for c in a.columns() {
            assert!(c.iter().map(|v| v.abs()).sum::<f64>() <= r * (1.0 + 1e-12));
        }
    }
}

#[test]
fn concatenated_marginal_is_isotropic() {
    let spec = make_concatenated(EnsembleSpec::UniformCube, 6, 3).unwrap();
    let mut acc = MomentAccumulator::new(18);
    for t in 0..100_000 {
        let a = sample_matrix(&spec, 6, 3, RandomSeed::new(15, t)).unwrap();
        assert_eq!((a.rows(), a.cols()), (6, 6));
        acc.push(&a.as_slice()[..18]);
    }
    let r = acc.report();
    assert!(r.max_covariance_deviation < 0.05 && r.max_abs_mean < 0.05, "{r:?}");
}

#[test]
fn coordinate_marginals_are_isotropic() {
    let idx = [0, 3, 7];
    for spec in VECTOR_KINDS {
        let mut acc = MomentAccumulator::new(idx.len());
        for t in 0..100_000 {
            let x = sample_vector(&spec, 10, RandomSeed::new(16, t)).unwrap();
            let sub: Vec<f64> = idx.iter().map(|&i| x[i]).collect();
            acc.push(&sub);
        }
        assert!(acc.report().max_covariance_deviation < 0.05, "{spec:?}");
    }
}

#[test]
fn same_seed_same_bits() {
    let spec = EnsembleSpec::Concatenated {
        base: Box::new(EnsembleSpec::independent_columns(EnsembleSpec::Laplace)),
        copies: 2,
    };
    let a = sample_matrix(&spec, 5, 2, RandomSeed::new(3, 9)).unwrap();
    let b = sample_matrix(&spec, 5, 2, RandomSeed::new(3, 9)).unwrap();
    assert_eq!(a.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
}
