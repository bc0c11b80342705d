use proptest::prelude::*;
use sigmin_core::ensembles::sample_matrix;
use sigmin_core::geometry::{
    classify_compressible, dist_to_sparse, for_each_net_point, is_spread, lattice_spacing, random_round,
    rounding_approximation, sparse_net_contains, spread_witness, support_size, Classification, SpreadParams,
};
use sigmin_core::linalg::{hs_norm, norm};
use sigmin_core::{EnsembleSpec, Error, RandomSeed};

fn unit(n: usize, master: u64, stream: u64) -> Vec<f64> {
    let g = sample_matrix(&EnsembleSpec::Gaussian, n, 1, RandomSeed::new(master, stream)).unwrap().into_col_major();
    let r = norm(&g);
    g.into_iter().map(|v| v / r).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rounding_neighbours_and_sup_bound(
        y in prop::collection::vec(-3.0f64..3.0, 1..40),
        eps in 1e-3f64..1.0,
        stream in any::<u64>(),
    ) {
        let out = random_round(&y, eps, RandomSeed::new(31, stream)).unwrap();
        let h = lattice_spacing(eps, y.len());
        for i in 0..y.len() {
            prop_assert!((out.eta[i] - y[i]).abs() <= h);
            let k = (y[i] / h).floor();
            let lat = out.lattice[i] as f64;
            prop_assert!(lat == k || lat == k + 1.0);
            prop_assert!((0.0..1.0).contains(&out.fractional_parts[i]));
            prop_assert_eq!(out.eta[i], lat * h);
        }
        prop_assert_eq!(out.support_size, out.lattice.iter().filter(|&&k| k != 0).count());
    }

    #[test]
    fn dist_to_sparse_is_monotone(x in prop::collection::vec(-2.0f64..2.0, 1..12)) {
        let n = x.len();
        let d: Vec<f64> = (0..=n).map(|k| dist_to_sparse(&x, k).unwrap()).collect();
        prop_assert!(d.windows(2).all(|w| w[0] >= w[1]));
        prop_assert_eq!(d[n], 0.0);
        prop_assert!((d[0] - norm(&x)).abs() <= 1e-12 * (1.0 + norm(&x)));
        prop_assert_eq!(d[support_size(&x).min(n)], 0.0);
        prop_assert_eq!(dist_to_sparse(&x, n + 1), Err(Error::IndexOutOfRange { index: n + 1, dim: n }));
    }

    #[test]
    fn witness_exists_for_incompressible(n in 10usize..60, stream in any::<u64>()) {
        let (delta, rho) = (0.3, 0.2);
        let x = unit(n, 32, stream);
        if classify_compressible(&x, delta, rho).unwrap() == Classification::Incomp {
            let j = spread_witness(&x, delta, rho).unwrap();
            prop_assert!(j.len() as f64 >= rho * rho * delta * n as f64 / 2.0);
            for &i in &j {
                prop_assert!(x[i].abs() >= rho / (2.0 * n as f64).sqrt());
                prop_assert!(x[i].abs() <= 1.0 / (delta * n as f64).sqrt());
            }
        }
    }
}

#[test]
fn rounding_is_unbiased_per_coordinate() {
    const T: u64 = 10_000;
    let eps = 0.3;
    let n = 6;
    let h = lattice_spacing(eps, n);
    let offsets = [0.1, 0.25, 0.5, 0.75, 0.93, 3.4];
    let y: Vec<f64> = offsets.iter().map(|p| p * h - h).collect();
    let mut ups = vec![0u64; n];
    let mut p = Vec::new();
    for t in 0..T {
        let out = random_round(&y, eps, RandomSeed::new(33, t)).unwrap();
        for (u, r) in ups.iter_mut().zip(&out.rounded_up) {
            *u += *r as u64;
        }
        p = out.fractional_parts;
    }
    for i in 0..n {
        let exact = offsets[i] - f64::floor(offsets[i]);
        assert!((p[i] - exact).abs() <= 1e-12, "coordinate {i}: {} vs {exact}", p[i]);
        let freq = ups[i] as f64 / T as f64;
        let tol = 4.0 * (p[i] * (1.0 - p[i]) / T as f64).sqrt();
        assert!((freq - p[i]).abs() <= tol, "coordinate {i}: {freq} vs {}", p[i]);
    }
}

#[test]
fn half_step_is_a_fair_coin() {
    let (eps, n) = (0.2, 3);
    let h = lattice_spacing(eps, n);
    let y = [0.5 * h, 0.0, 0.0];
    let up = (0..10_000).filter(|&t| random_round(&y, eps, RandomSeed::new(34, t)).unwrap().eta[0] > 0.0).count();
    assert!((up as f64 / 1e4 - 0.5).abs() <= 0.02);
}

#[test]
fn rounding_approximation_mean_attempts() {
    let a = sample_matrix(&EnsembleSpec::Gaussian, 20, 10, RandomSeed::new(35, 0)).unwrap();
    let x = unit(10, 35, 1);
    let target = 2.0 * lattice_spacing(0.04, 10) * hs_norm(&a).unwrap();
    let mut total = 0u64;
    for t in 0..1000 {
        let out = rounding_approximation(&x, &a, 0.04, RandomSeed::new(36, t), 64).unwrap();
        let diff: Vec<f64> = x.iter().zip(&out.eta).map(|(p, q)| p - q).collect();
        assert!(norm(&a.mul_vec(&diff).unwrap()) <= target);
        total += out.attempts as u64;
    }
    assert!((total as f64 / 1000.0) < 2.2, "mean attempts {}", total as f64 / 1000.0);
}

#[test]
fn rounding_approximation_trivial_cases() {
    let a = sample_matrix(&EnsembleSpec::Gaussian, 5, 4, RandomSeed::new(37, 0)).unwrap();
    let h = lattice_spacing(0.04, 4);
    let on_lattice = [3.0 * h, -h, 0.0, 7.0 * h];
    let out = rounding_approximation(&on_lattice, &a, 0.04, RandomSeed::new(37, 1), 1).unwrap();
    assert_eq!(out.attempts, 1);
    assert!(on_lattice.iter().zip(&out.eta).all(|(p, q)| (p - q).abs() <= 1e-12));
    let zero = sigmin_core::RealMatrix::zeros(5, 4).unwrap();
    let x = unit(4, 37, 2);
    assert_eq!(rounding_approximation(&x, &zero, 0.04, RandomSeed::new(37, 3), 1).unwrap().attempts, 1);
}

#[test]
fn spread_frequency_on_the_sphere() {
    let params = SpreadParams::new(0.01, 10.0).unwrap();
    let hits = (0..10_000).filter(|&t| is_spread(&unit(10, 38, t), &params)).count();
    assert!(hits as f64 / 1e4 >= 0.5, "{hits}");
    let flat = vec![1.0 / 10f64.sqrt(); 10];
    assert!(is_spread(&flat, &SpreadParams::new(0.5, 2.0).unwrap()));
    let mut e1 = vec![0.0; 10];
    e1[0] = 1.0;
    assert!(!is_spread(&e1, &SpreadParams::default()));
}

#[test]
fn net_points_satisfy_membership() {
    for (n, eps, m) in [(3, 0.5, 2), (4, 0.7, 4), (2, 0.3, 1)] {
        let h = lattice_spacing(eps, n);
        let mut count = 0;
        for_each_net_point(n, eps, m, |k| {
            let z: Vec<f64> = k.iter().map(|&v| v as f64 * h).collect();
            assert!(sparse_net_contains(&z, eps, m), "{k:?}");
            count += 1;
        })
        .unwrap();
        assert!(count > 1);
    }
}

#[test]
fn uniform_vector_witness_is_everything() {
    let n = 40;
    let x = vec![1.0 / (n as f64).sqrt(); n];
    assert_eq!(spread_witness(&x, 0.3, 0.2).unwrap().len(), n);
    let mut e1 = vec![0.0; n];
    e1[0] = 1.0;
    assert_eq!(spread_witness(&e1, 0.5, 0.1), Err(Error::Compressible));
}
